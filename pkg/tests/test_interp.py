import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import schedule_lattice, random_lattice
from oracles import bilinear_reference, corner_blend_reference, lattice_node_frames
from padpress.bench import sample_points
from padpress.core import AxisSpec, PressureFrame, QueryPoint, SampleLattice
from padpress.errors import ArityMismatch, NonFiniteCoordinate
from padpress.interp import (
    ClampFlag,
    Interpolator,
    available_backends,
    locate_cell,
    query,
    query_batch,
)

BACKENDS = available_backends()


def engines(lattice):
    return [Interpolator(lattice, b) for b in BACKENDS]


class TestLocateCell:
    AX = AxisSpec("z", "mm", [0.0, 0.5, 1.0, 1.5])

    def test_interior_point(self):
        cell, flag = locate_cell(self.AX, 1.25)
        assert (cell.i0, cell.i1, cell.t) == (2, 3, 0.5)
        assert flag is ClampFlag.INSIDE

    def test_last_sample_uses_final_cell(self):
        cell, flag = locate_cell(AxisSpec("theta", "deg", [15, 30, 45]), 45.0)
        assert (cell.i0, cell.i1, cell.t) == (1, 2, 1.0)
        assert flag is ClampFlag.INSIDE

    def test_above_range_clamps(self):
        cell, flag = locate_cell(AxisSpec("theta", "deg", [15, 30, 45]), 60.0)
        assert (cell.i0, cell.i1, cell.t) == (2, 2, 0.0)
        assert flag is ClampFlag.ABOVE

    def test_below_range_clamps(self):
        cell, flag = locate_cell(self.AX, -1.0)
        assert (cell.i0, cell.i1, cell.t) == (0, 0, 0.0)
        assert flag is ClampFlag.BELOW

    def test_interior_sample_is_right_open(self):
        cell, flag = locate_cell(self.AX, 0.5)
        assert (cell.i0, cell.i1, cell.t) == (1, 2, 0.0)
        assert flag is ClampFlag.INSIDE

    def test_first_sample(self):
        cell, flag = locate_cell(self.AX, 0.0)
        assert (cell.i0, cell.i1, cell.t) == (0, 1, 0.0)
        assert flag is ClampFlag.INSIDE

    def test_single_sample_axis(self):
        ax = AxisSpec("z", "mm", [0.7])
        cell, flag = locate_cell(ax, 0.7)
        assert (cell.i0, cell.i1, cell.t) == (0, 0, 0.0)
        assert flag is ClampFlag.INSIDE
        assert locate_cell(ax, -1)[1] is ClampFlag.BELOW
        assert locate_cell(ax, 2)[1] is ClampFlag.ABOVE

    def test_nonfinite_rejected(self):
        with pytest.raises(NonFiniteCoordinate):
            locate_cell(self.AX, float("nan"))


class TestQueryExamples:
    def test_node_passthrough_is_exact(self, full_lattice):
        for engine in engines(full_lattice):
            for idx in full_lattice.node_indices():
                frame, report = engine.query(
                    QueryPoint(full_lattice.node_coords(idx)))
                assert np.array_equal(frame.values,
                                      full_lattice.frames[idx].values)
                assert not report.any_clamped

    def test_cell_midpoint_of_1x1_frames(self):
        # Corner values 0/10/20/30 -> midpoint blends to their mean.
        frames = {
            (0, 0): PressureFrame(1, 1, [0.0]),
            (0, 1): PressureFrame(1, 1, [10.0]),
            (1, 0): PressureFrame(1, 1, [20.0]),
            (1, 1): PressureFrame(1, 1, [30.0]),
        }
        lattice = SampleLattice(
            axes=(AxisSpec("z", "mm", [0.0, 1.0]),
                  AxisSpec("theta", "deg", [0.0, 1.0])),
            frame_rows=1, frame_cols=1, frames=frames)
        for engine in engines(lattice):
            frame, _ = engine.query(QueryPoint((0.5, 0.5)))
            assert frame.values[0] == 15.0

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_matches_bilinear_oracle(self, backend, rng):
        lattice = schedule_lattice(rng=rng)
        engine = Interpolator(lattice, backend)
        nodes = lattice_node_frames(lattice)
        z_s = lattice.axes[0].samples.tolist()
        t_s = lattice.axes[1].samples.tolist()
        points = sample_points(lattice, 1000, seed=42)
        worst = 0.0
        for z, theta in points:
            frame, _ = engine.query(QueryPoint((z, theta)))
            expected = bilinear_reference(z_s, t_s, nodes, z, theta)
            worst = max(worst, np.abs(frame.values - expected).max())
        assert worst <= 1e-9

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_matches_corner_oracle_in_6d(self, backend, rng):
        samples = [sorted(rng.uniform(-5, 5, 2)) for _ in range(6)]
        lattice = random_lattice(samples, rows=2, cols=2, rng=rng)
        engine = Interpolator(lattice, backend)
        nodes = lattice_node_frames(lattice)
        axes_samples = [ax.samples.tolist() for ax in lattice.axes]
        points = sample_points(lattice, 200, seed=5)
        for coords in points:
            frame, _ = engine.query(QueryPoint(coords))
            expected = corner_blend_reference(axes_samples, nodes, coords)
            assert np.abs(frame.values - expected).max() <= 1e-9

    def test_arity_mismatch(self, small_lattice):
        with pytest.raises(ArityMismatch):
            query(small_lattice, QueryPoint((1.0,)))

    def test_nonfinite_coordinate(self, small_lattice):
        with pytest.raises(NonFiniteCoordinate):
            query(small_lattice, QueryPoint((float("inf"), 30.0)))


class TestQueryBatch:
    def test_empty(self, small_lattice):
        assert query_batch(small_lattice, []) == []

    def test_determinism(self, small_lattice):
        p = QueryPoint((0.3, 22.0))
        (f1, r1), (f2, r2) = query_batch(small_lattice, [p, p])
        assert np.array_equal(f1.values, f2.values)
        assert r1 == r2

    def test_equals_mapped_query(self, small_lattice, rng):
        points = [QueryPoint(row)
                  for row in sample_points(small_lattice, 500, seed=9)]
        batch = query_batch(small_lattice, points)
        for point, (frame, report) in zip(points, batch):
            single_frame, single_report = query(small_lattice, point)
            assert np.array_equal(frame.values, single_frame.values)
            assert report == single_report

    def test_first_failure_aborts_with_index(self, small_lattice):
        points = [QueryPoint((0.1, 20.0)), QueryPoint((float("nan"), 20.0))]
        with pytest.raises(NonFiniteCoordinate) as err:
            query_batch(small_lattice, points)
        assert err.value.index == 1


class TestBackends:
    def test_native_available(self):
        # The built package must carry the compiled kernel.
        assert "native" in BACKENDS

    def test_backends_bit_identical(self, rng):
        lattice = schedule_lattice(rng=rng)
        if len(BACKENDS) < 2:
            pytest.skip("only one backend built")
        eng = [Interpolator(lattice, b) for b in BACKENDS]
        for coords in sample_points(lattice, 500, seed=3):
            frames = [e.query(QueryPoint(coords))[0] for e in eng]
            for other in frames[1:]:
                assert np.array_equal(frames[0].values, other.values)

    def test_unknown_backend(self, small_lattice):
        with pytest.raises(ValueError):
            Interpolator(small_lattice, "cuda")


# -- property-style invariants --

seeds = st.integers(0, 2**32 - 1)


def _random_axes(rng, max_axes=3, max_len=4):
    ndim = int(rng.integers(1, max_axes + 1))
    axes = []
    for _ in range(ndim):
        n = int(rng.integers(1, max_len + 1))
        start = rng.uniform(-50, 50)
        gaps = rng.uniform(0.1, 5.0, size=n - 1)
        axes.append(start + np.concatenate([[0.0], np.cumsum(gaps)]))
    return axes


@settings(max_examples=40, deadline=None)
@given(seed=seeds)
def test_node_reproduction_property(seed):
    rng = np.random.default_rng(seed)
    lattice = random_lattice(_random_axes(rng), rows=3, cols=2, rng=rng)
    engine = Interpolator(lattice)
    for idx in lattice.node_indices():
        frame, _ = engine.query(QueryPoint(lattice.node_coords(idx)))
        stored = lattice.frames[idx].values
        tol = 1e-12 * np.maximum(1.0, np.abs(stored))
        assert (np.abs(frame.values - stored) <= tol).all()


@settings(max_examples=40, deadline=None)
@given(seed=seeds)
def test_convex_combination_bounds(seed):
    rng = np.random.default_rng(seed)
    lattice = random_lattice(_random_axes(rng), rows=3, cols=2, rng=rng)
    engine = Interpolator(lattice)
    nodes = lattice_node_frames(lattice)
    packed = np.stack([nodes[idx] for idx in lattice.node_indices()])
    for coords in sample_points(lattice, 50, seed=seed ^ 0xA5A5):
        frame, _ = engine.query(QueryPoint(coords))
        corner_rows = _corner_rows(lattice, coords, nodes)
        lo = corner_rows.min(axis=0)
        hi = corner_rows.max(axis=0)
        # Weight products can stray one ulp from summing to exactly 1.
        eps = 4e-16 * np.maximum(1.0, np.abs(hi))
        assert (frame.values >= lo - eps).all()
        assert (frame.values <= hi + eps).all()
        assert (frame.values >= 0.0).all()


def _corner_rows(lattice, coords, nodes):
    from itertools import product
    spans = []
    for ax, x in zip(lattice.axes, coords):
        s = ax.samples
        x = min(max(x, s[0]), s[-1])
        if len(s) == 1:
            spans.append([0])
            continue
        k = int(np.searchsorted(s, x, side="right")) - 1
        k = min(max(k, 0), len(s) - 2)
        spans.append([k, k + 1])
    return np.stack([nodes[idx] for idx in product(*spans)])


def test_equal_corners_reproduce_value_everywhere(rng):
    # Adversarial convexity case: constant lattice must stay constant.
    value = 82.87
    lattice = random_lattice([[0.0, 1.0], [0.0, 1.0]], rows=2, cols=2,
                             rng=rng, scale=0.0)
    frames = {idx: PressureFrame(2, 2, [value] * 4)
              for idx in lattice.node_indices()}
    lattice = SampleLattice(axes=lattice.axes, frame_rows=2, frame_cols=2,
                            frames=frames)
    engine = Interpolator(lattice)
    for coords in sample_points(lattice, 200, seed=11):
        frame, _ = engine.query(QueryPoint(coords))
        assert np.abs(frame.values - value).max() <= 4e-16 * value


@settings(max_examples=30, deadline=None)
@given(seed=seeds)
def test_axis_order_symmetry(seed):
    # Transpose the lattice axes; queries with swapped coordinates must
    # agree to reassociation precision.
    rng = np.random.default_rng(seed)
    axes = _random_axes(rng, max_axes=2, max_len=4)
    if len(axes) == 1:
        axes.append(np.array([0.0, 1.0]))
    lattice = random_lattice(axes, rows=2, cols=3, rng=rng)
    transposed = SampleLattice(
        axes=(lattice.axes[1], lattice.axes[0]),
        frame_rows=2, frame_cols=3,
        frames={(j, i): f for (i, j), f in lattice.frames.items()})
    e1 = Interpolator(lattice)
    e2 = Interpolator(transposed)
    for x, y in sample_points(lattice, 25, seed=seed ^ 0x5A5A):
        f1, _ = e1.query(QueryPoint((x, y)))
        f2, _ = e2.query(QueryPoint((y, x)))
        assert np.abs(f1.values - f2.values).max() <= 1e-12


def test_engine_matches_theta_first_formulation(rng):
    # The published two-stage formulation blends theta first; the engine
    # must agree within reassociation tolerance.
    lattice = schedule_lattice(rows=4, cols=3, rng=rng, scale=200.0)
    engine = Interpolator(lattice)
    nodes = lattice_node_frames(lattice)
    z_s = lattice.axes[0].samples.tolist()
    t_s = lattice.axes[1].samples.tolist()
    for z, theta in sample_points(lattice, 300, seed=21):
        frame, _ = engine.query(QueryPoint((z, theta)))
        expected = bilinear_reference(z_s, t_s, nodes, z, theta)
        assert np.abs(frame.values - expected).max() <= 1e-12


@settings(max_examples=30, deadline=None)
@given(seed=seeds)
def test_per_axis_linearity(seed):
    # Three collinear points inside one cell: midpoint value must be the
    # mean of the endpoints, elementwise.
    rng = np.random.default_rng(seed)
    lattice = random_lattice(_random_axes(rng), rows=2, cols=2, rng=rng)
    engine = Interpolator(lattice)
    coords = [rng.uniform(ax.lo, ax.hi) for ax in lattice.axes]
    moving = int(rng.integers(0, lattice.ndim))
    ax = lattice.axes[moving]
    if len(ax) == 1:
        cell_lo, cell_hi = ax.lo, ax.lo + 1.0  # degenerate: constant axis
    else:
        k = int(rng.integers(0, len(ax) - 1))
        cell_lo, cell_hi = float(ax.samples[k]), float(ax.samples[k + 1])
    a = rng.uniform(cell_lo, cell_hi)
    b = rng.uniform(cell_lo, cell_hi)
    mid = (a + b) / 2.0

    def at(x):
        c = list(coords)
        c[moving] = x
        return engine.query(QueryPoint(c))[0].values

    assert np.abs(at(mid) - (at(a) + at(b)) / 2.0).max() <= 1e-9


def test_element_independence(rng):
    lattice = schedule_lattice(rows=2, cols=2, rng=rng)
    node = (1, 1)
    element = 2
    perturbed_values = lattice.frames[node].values.copy()
    perturbed_values[element] += 7.5
    frames = dict(lattice.frames)
    frames[node] = PressureFrame(2, 2, perturbed_values)
    other = SampleLattice(axes=lattice.axes, frame_rows=2, frame_cols=2,
                          frames=frames)
    e1, e2 = Interpolator(lattice), Interpolator(other)
    for coords in sample_points(lattice, 200, seed=2):
        f1, _ = e1.query(QueryPoint(coords))
        f2, _ = e2.query(QueryPoint(coords))
        same = f1.values == f2.values
        assert same[[0, 1, 3]].all()  # untouched elements never move


@settings(max_examples=40, deadline=None)
@given(seed=seeds)
def test_clamping_equals_query_at_clamped_point(seed):
    rng = np.random.default_rng(seed)
    lattice = random_lattice(_random_axes(rng), rows=2, cols=2, rng=rng)
    engine = Interpolator(lattice)
    coords = []
    expect_flags = []
    for ax in lattice.axes:
        span = ax.hi - ax.lo + 1.0
        mode = rng.integers(0, 3)
        if mode == 0:
            coords.append(ax.lo - rng.uniform(0.1, span))
            expect_flags.append(ClampFlag.BELOW)
        elif mode == 1:
            coords.append(ax.hi + rng.uniform(0.1, span))
            expect_flags.append(ClampFlag.ABOVE)
        else:
            coords.append(rng.uniform(ax.lo, ax.hi))
            expect_flags.append(ClampFlag.INSIDE)
    frame, report = engine.query(QueryPoint(coords))
    for entry, expected_flag, raw in zip(report.entries, expect_flags, coords):
        assert entry.flag is expected_flag
        if expected_flag is ClampFlag.INSIDE:
            assert entry.clamped == raw
    clamped_frame, clamped_report = engine.query(
        QueryPoint(report.clamped_coords))
    assert np.array_equal(frame.values, clamped_frame.values)
    assert not clamped_report.any_clamped


def test_concurrent_queries_are_safe(full_lattice):
    # Hammer one engine from several threads; per-thread scratch must
    # keep results identical to the single-threaded answers.
    import threading

    engine = Interpolator(full_lattice)
    points = [QueryPoint(row) for row in sample_points(full_lattice, 400, 8)]
    expected = [engine.query(p)[0].values for p in points]
    failures = []

    def worker():
        for p, want in zip(points, expected):
            got, _ = engine.query(p)
            if not np.array_equal(got.values, want):
                failures.append(p)

    threads = [threading.Thread(target=worker) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert not failures
