"""Command-line entry point: build, query, bench, serve, replay.

Diagnostics go to stderr (level via the PADPRESS_LOG environment
variable: error, warn, info, debug); data output goes to stdout or the
requested file. Domain failures exit nonzero with a one-line reason.
"""

from __future__ import annotations

import json
import logging
import os
import sys

import click

from . import bench as bench_mod
from . import export, ingest, lattice_io, service
from .core import QueryPoint, SaturationWarning, lattice_validate
from .errors import PadpressError
from .interp import available_backends, engine_for

logger = logging.getLogger("padpress")

_LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING,
               "info": logging.INFO, "debug": logging.DEBUG}


def _setup_logging() -> None:
    level_name = os.environ.get("PADPRESS_LOG", "warn").lower()
    level = _LOG_LEVELS.get(level_name)
    if level is None:
        click.echo(f"warning: unknown PADPRESS_LOG level {level_name!r}, "
                   "using 'warn'", err=True)
        level = logging.WARNING
    logging.basicConfig(stream=sys.stderr, level=level,
                        format="%(levelname)s %(name)s: %(message)s")


def _fail(exc: PadpressError) -> None:
    raise click.ClickException(f"{type(exc).__name__}: {exc}")


@click.group()
@click.version_option()
def main():
    """Pressure-distribution rendering from measured finger-pad data."""
    _setup_logging()


@main.command("build")
@click.option("--input", "inputs", multiple=True, required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Capture CSV, one per plate angle (repeatable).")
@click.option("--out", required=True, type=click.Path(dir_okay=False),
              help="Lattice file to write.")
@click.option("--threshold-kpa", default=ingest.DEFAULT_THRESHOLD_KPA,
              show_default=True, help="Contact baseline threshold.")
@click.option("--baseline-stat", default="max", show_default=True,
              type=click.Choice(["max", "sum"]),
              help="Per-frame statistic compared against the threshold.")
def cmd_build(inputs, out, threshold_kpa, baseline_stat):
    """Calibrate capture sessions into a lattice model file."""
    try:
        sessions = [ingest.parse_capture(path) for path in inputs]
        lattice = ingest.build_lattice(sessions, threshold_kpa=threshold_kpa,
                                       baseline_stat=baseline_stat)
        lattice_io.write_lattice(lattice, out)
    except PadpressError as exc:
        _fail(exc)
    for ax in lattice.axes:
        click.echo(f"axis {ax.name} [{ax.unit}]: {ax.samples.tolist()}")
    click.echo(f"nodes: {lattice.node_count} "
               f"({lattice.frame_rows}x{lattice.frame_cols} frames)")
    for finding in lattice_validate(lattice):
        if isinstance(finding, SaturationWarning):
            click.echo(f"warning: {finding.count} values above "
                       f"{lattice.full_scale_kpa} kPa full scale", err=True)
    click.echo(f"wrote {out}")


def _load_lattice(path):
    try:
        return lattice_io.read_lattice(path)
    except PadpressError as exc:
        _fail(exc)


def _parse_at(at: str, lattice) -> QueryPoint:
    axis_names = [ax.name for ax in lattice.axes]
    given = {}
    for part in at.split(","):
        name, sep, value = part.partition("=")
        name = name.strip()
        if not sep:
            raise click.BadParameter(f"expected name=value, got {part!r}",
                                     param_hint="--at")
        if name not in axis_names:
            raise click.BadParameter(
                f"unknown axis {name!r}; lattice axes: {axis_names}",
                param_hint="--at")
        if name in given:
            raise click.BadParameter(f"duplicate axis {name!r}",
                                     param_hint="--at")
        try:
            given[name] = float(value)
        except ValueError:
            raise click.BadParameter(f"bad value for {name!r}: {value!r}",
                                     param_hint="--at") from None
    missing = [n for n in axis_names if n not in given]
    if missing:
        raise click.BadParameter(f"missing axes: {missing}", param_hint="--at")
    return QueryPoint(tuple(given[n] for n in axis_names))


@main.command("query")
@click.option("--lattice", "lattice_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--at", required=True,
              help="Query coordinates, e.g. 'z=1.25,theta=30'.")
@click.option("--format", "fmt", default="csv", show_default=True,
              type=click.Choice(["csv", "pgm", "json"]))
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write to a file instead of stdout.")
def cmd_query(lattice_path, at, fmt, out):
    """Interpolate one frame and print or save it."""
    lattice = _load_lattice(lattice_path)
    point = _parse_at(at, lattice)
    try:
        frame, report = engine_for(lattice).query(point)
    except PadpressError as exc:
        _fail(exc)
    if report.any_clamped:
        clamped = {e.axis: e.clamped for e in report.entries
                   if e.flag.value != "inside"}
        click.echo(f"warning: out-of-range coordinates clamped to {clamped}",
                   err=True)
    if fmt == "csv":
        payload = export.frame_to_csv(frame)
    elif fmt == "pgm":
        payload = export.frame_to_pgm(frame, lattice.full_scale_kpa)
    else:
        payload = json.dumps(export.frame_to_json_dict(frame, report)) + "\n"
    if out is None:
        click.echo(payload, nl=False)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(payload)


@main.command("bench")
@click.option("--lattice", "lattice_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--queries", default=100_000, show_default=True,
              help="Number of timed queries.")
@click.option("--seed", default=0, show_default=True,
              help="Seed for the query-point stream.")
@click.option("--backend", default="auto", show_default=True,
              type=click.Choice(["auto", "native", "python", "both"]),
              help="Kernel backend; 'both' compares all available.")
@click.option("--json", "as_json", is_flag=True,
              help="Machine-readable report on stdout.")
def cmd_bench(lattice_path, queries, seed, backend, as_json):
    """Measure per-query latency against the 10 us real-time budget."""
    lattice = _load_lattice(lattice_path)
    if backend == "both" and len(available_backends()) == 1:
        click.echo("note: native kernel not built; python backend only",
                   err=True)
    try:
        reports = bench_mod.run_bench_suite(lattice, n=queries, seed=seed,
                                            backend=backend)
    except (PadpressError, RuntimeError) as exc:
        raise click.ClickException(str(exc))
    if as_json:
        click.echo(json.dumps([r.as_dict() for r in reports]))
    else:
        for report in reports:
            click.echo(bench_mod.format_report(report))


@main.command("serve")
@click.option("--lattice", "lattice_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--addr", default="127.0.0.1:8765", show_default=True)
@click.option("--rate-hz", default=service.DEFAULT_RATE_HZ, show_default=True)
@click.option("--ui-dir", type=click.Path(exists=True, file_okay=False),
              default=None, help="Serve a viewer bundle under /ui.")
def cmd_serve(lattice_path, addr, rate_hz, ui_dir):
    """Stream interpolated frames to WebSocket viewers until interrupted."""
    lattice = _load_lattice(lattice_path)
    try:
        service.serve(lattice, addr=addr, rate_hz=rate_hz, ui_dir=ui_dir)
    except PadpressError as exc:
        _fail(exc)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    except KeyboardInterrupt:
        pass


@main.command("replay")
@click.option("--lattice", "lattice_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--trajectory", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="CSV of timed query points: t_s,<axis>,...")
@click.option("--addr", default="127.0.0.1:8765", show_default=True)
@click.option("--rate-hz", default=service.DEFAULT_RATE_HZ, show_default=True)
@click.option("--realtime/--fast", default=True, show_default=True,
              help="Pace ticks to the wall clock or run flat out.")
@click.option("--wait-viewer/--no-wait-viewer", default=True,
              show_default=True,
              help="Start the trajectory only once a viewer connects.")
def cmd_replay(lattice_path, trajectory, addr, rate_hz, realtime, wait_viewer):
    """Stream a recorded trajectory, then exit."""
    lattice = _load_lattice(lattice_path)
    try:
        service.replay(lattice, trajectory, addr=addr, rate_hz=rate_hz,
                       realtime=realtime, wait_for_viewer=wait_viewer)
    except PadpressError as exc:
        _fail(exc)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    except KeyboardInterrupt:
        pass


if __name__ == "__main__":
    main()
