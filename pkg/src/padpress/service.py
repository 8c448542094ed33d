"""Real-time rendering loop as a WebSocket service.

Clients stream query-point updates; the service interpolates at a fixed
tick rate and broadcasts predicted frames to every connected viewer.

Protocol (one JSON object per text message):

* on connect, server -> client::

    {"type": "hello", "axes": [{"name", "unit", "min", "max"}, ...],
     "rows": R, "cols": C, "full_scale_kpa": ...}

* client -> server input updates::

    {"type": "input", "seq": n, "coords": {"z": 1.25, "theta": 30.0}}

  Unknown or missing axis names, non-finite values, or unparseable
  messages get ``{"type": "error", "reason": ...}`` and the connection
  stays open.

* server -> client, one per tick::

    {"type": "frame", "seq", "t_us", "query": {...}, "clamped": {...},
     "rows", "cols", "values": [...], "compute_us"}

  ``seq`` echoes the input update actually used (0 until the first
  arrives), ``query`` echoes the clamped coordinates, and ``compute_us``
  times only the interpolation call.

Input handling is last-writer-wins: each tick renders the single most
recent update, never a backlog. Live viewers that cannot keep up drop
frames (keep-latest mailboxes); replay viewers get lossless delivery
because replay's contract is a deterministic frame sequence.
"""

from __future__ import annotations

import asyncio
import contextlib
import csv
import json
import logging
import math
import socket
import time
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Callable, Optional, Sequence, Union

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .core import QueryPoint, SampleLattice
from .errors import BindFailure, MalformedTrajectory
from .interp import Interpolator

logger = logging.getLogger(__name__)

DEFAULT_RATE_HZ = 60.0
MIN_RATE_HZ = 1.0
MAX_RATE_HZ = 1000.0

PathOrFile = Union[str, Path, IO[str]]


@dataclass(frozen=True)
class InputState:
    """Most recent query-point update; replaced atomically, never queued."""

    seq: int
    coords: tuple
    t_recv_us: int


@dataclass(frozen=True)
class FrameMessage:
    """One broadcast frame plus its provenance."""

    seq: int
    t_us: int
    query: dict
    clamped: dict
    rows: int
    cols: int
    values: list
    compute_us: float

    def as_dict(self) -> dict:
        return {
            "type": "frame",
            "seq": self.seq,
            "t_us": self.t_us,
            "query": self.query,
            "clamped": self.clamped,
            "rows": self.rows,
            "cols": self.cols,
            "values": self.values,
            "compute_us": self.compute_us,
        }


class RenderHub:
    """Shared state: one input slot, one engine, N viewer mailboxes."""

    def __init__(self, lattice: SampleLattice, rate_hz: float,
                 lossless: bool = False):
        if not (MIN_RATE_HZ <= rate_hz <= MAX_RATE_HZ):
            raise ValueError(
                f"tick rate must be in [{MIN_RATE_HZ}, {MAX_RATE_HZ}] Hz, "
                f"got {rate_hz}")
        self.lattice = lattice
        self.engine = Interpolator(lattice)
        self.engine.query(QueryPoint(lattice.min_corner))  # warm the caches
        self.rate_hz = float(rate_hz)
        self.lossless = lossless
        self.axis_names = tuple(ax.name for ax in lattice.axes)
        # Cold-start default: the lattice's minimum corner.
        self.state = InputState(seq=0, coords=lattice.min_corner, t_recv_us=0)
        self.viewers: set = set()
        self.first_viewer = asyncio.Event()
        self.tick_count = 0
        self.compute_count = 0

    # -- input path (single writer) --

    def submit_input(self, seq: int, coords: tuple) -> None:
        self.state = InputState(seq=seq, coords=coords,
                                t_recv_us=time.time_ns() // 1000)

    # -- render path (ticker) --

    def render(self, seq: int, coords: tuple) -> FrameMessage:
        t0 = time.perf_counter_ns()
        frame, report = self.engine.query(QueryPoint(coords))
        compute_us = (time.perf_counter_ns() - t0) / 1000.0
        self.compute_count += 1
        return FrameMessage(
            seq=seq,
            t_us=time.time_ns() // 1000,
            query=dict(zip(self.axis_names, report.clamped_coords)),
            clamped=report.flags_by_axis(),
            rows=frame.rows,
            cols=frame.cols,
            values=frame.values.tolist(),
            compute_us=compute_us,
        )

    def render_current(self) -> FrameMessage:
        state = self.state
        return self.render(state.seq, state.coords)

    def broadcast(self, message) -> None:
        for queue in list(self.viewers):
            if not self.lossless and queue.full():
                with contextlib.suppress(asyncio.QueueEmpty):
                    queue.get_nowait()  # slow viewer: drop the stale frame
            queue.put_nowait(message)

    def attach_viewer(self) -> asyncio.Queue:
        queue = asyncio.Queue() if self.lossless else asyncio.Queue(maxsize=1)
        self.viewers.add(queue)
        self.first_viewer.set()
        return queue

    def detach_viewer(self, queue) -> None:
        self.viewers.discard(queue)

    def hello(self) -> dict:
        return {
            "type": "hello",
            "axes": [{"name": ax.name, "unit": ax.unit,
                      "min": ax.lo, "max": ax.hi}
                     for ax in self.lattice.axes],
            "rows": self.lattice.frame_rows,
            "cols": self.lattice.frame_cols,
            "full_scale_kpa": self.lattice.full_scale_kpa,
        }

    def parse_input(self, raw: str):
        """Validate one client message; returns (seq, coords) or raises ValueError."""
        try:
            msg = json.loads(raw)
        except json.JSONDecodeError:
            raise ValueError("message is not valid JSON") from None
        if not isinstance(msg, dict) or msg.get("type") != "input":
            raise ValueError("expected {\"type\": \"input\", ...}")
        seq = msg.get("seq")
        if not isinstance(seq, int):
            raise ValueError("input message needs an integer seq")
        coords_doc = msg.get("coords")
        if not isinstance(coords_doc, dict):
            raise ValueError("input message needs a coords object")
        unknown = set(coords_doc) - set(self.axis_names)
        if unknown:
            raise ValueError(f"unknown axis names: {sorted(unknown)}")
        missing = set(self.axis_names) - set(coords_doc)
        if missing:
            raise ValueError(f"missing axis names: {sorted(missing)}")
        coords = []
        for name in self.axis_names:
            value = coords_doc[name]
            if not isinstance(value, (int, float)) or isinstance(value, bool) \
                    or not math.isfinite(value):
                raise ValueError(f"coordinate {name!r} must be a finite number")
            coords.append(float(value))
        return seq, tuple(coords)


# -- trajectory replay --

def load_trajectory(src: PathOrFile, axis_names: Sequence[str]) -> list:
    """Parse a trajectory CSV: header ``t_s,<axis>,...``, one row per update.

    Returns [(t_s, coords), ...] with non-decreasing timestamps. Any
    structural defect raises :class:`MalformedTrajectory` with the data
    line number (header excluded).
    """
    if hasattr(src, "read"):
        return _load_trajectory_file(src, axis_names)
    with open(src, "r", encoding="utf-8", newline="") as fh:
        return _load_trajectory_file(fh, axis_names)


def _load_trajectory_file(fh: IO[str], axis_names: Sequence[str]) -> list:
    reader = csv.reader(fh)
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise MalformedTrajectory("trajectory file is empty") from None
    expected = ["t_s", *axis_names]
    if header != expected:
        raise MalformedTrajectory(
            f"trajectory header must be {','.join(expected)}, "
            f"got {','.join(header)}")
    rows = []
    last_t = -math.inf
    for line, record in enumerate(reader, start=1):
        if not record:
            continue
        if len(record) != len(expected):
            raise MalformedTrajectory(
                f"expected {len(expected)} columns, got {len(record)}",
                line=line)
        try:
            numbers = [float(tok) for tok in record]
        except ValueError:
            raise MalformedTrajectory(f"unparseable row {record!r}",
                                      line=line) from None
        if not all(math.isfinite(x) for x in numbers):
            raise MalformedTrajectory("row contains non-finite values",
                                      line=line)
        t_s, coords = numbers[0], tuple(numbers[1:])
        if t_s < last_t:
            raise MalformedTrajectory(f"timestamp {t_s} after {last_t}",
                                      line=line)
        last_t = t_s
        rows.append((t_s, coords))
    if not rows:
        raise MalformedTrajectory("trajectory has a header but no rows")
    return rows


def tick_schedule(trajectory: Sequence, rate_hz: float,
                  default_coords: tuple) -> list:
    """Sample a trajectory at tick instants 0, 1/rate, 2/rate, ...

    Each tick takes the most recent row at or before the tick time
    (last-writer-wins); ``seq`` is that row's 1-based position, 0 before
    the first row applies. The schedule runs until one tick past the
    last row. This function is the deterministic core shared by live
    replay and offline verification.
    """
    dt = 1.0 / rate_hz
    last_t = trajectory[-1][0]
    ticks = []
    i = 0
    seq, coords = 0, tuple(default_coords)
    k = 0
    while True:
        t_k = k * dt
        while i < len(trajectory) and trajectory[i][0] <= t_k:
            coords = trajectory[i][1]
            i += 1
            seq = i
        ticks.append((seq, coords))
        if t_k > last_t:
            return ticks
        k += 1


# -- FastAPI application --

def build_app(lattice: SampleLattice,
              rate_hz: float = DEFAULT_RATE_HZ,
              trajectory: Optional[Sequence] = None,
              realtime: bool = True,
              wait_for_viewer: bool = True,
              ui_dir: Optional[str] = None,
              on_done: Optional[Callable[[], None]] = None):
    """Build the service app.

    Without a trajectory the app runs the live loop (idle ticks skip
    compute when nobody is watching). With one it replays the trajectory
    through the same render path and closes viewers when done;
    ``realtime=False`` drops the tick pacing for offline-speed replay.
    """
    replay_mode = trajectory is not None
    hub = RenderHub(lattice, rate_hz, lossless=replay_mode)

    async def _live_loop():
        period = 1.0 / hub.rate_hz
        loop = asyncio.get_running_loop()
        next_t = loop.time()
        while True:
            next_t += period
            hub.tick_count += 1
            if hub.viewers:
                hub.broadcast(hub.render_current())
            await asyncio.sleep(max(0.0, next_t - loop.time()))

    async def _replay_loop():
        if wait_for_viewer:
            await hub.first_viewer.wait()
        period = 1.0 / hub.rate_hz
        for seq, coords in tick_schedule(trajectory, hub.rate_hz,
                                         lattice.min_corner):
            hub.tick_count += 1
            hub.broadcast(hub.render(seq, coords))
            await asyncio.sleep(period if realtime else 0.0)
        hub.broadcast(None)  # sentinel: close viewers
        app.state.replay_done = True
        if on_done is not None:
            on_done()

    @contextlib.asynccontextmanager
    async def lifespan(app):
        runner = _replay_loop if replay_mode else _live_loop
        task = asyncio.create_task(runner())
        try:
            yield
        finally:
            task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await task

    app = FastAPI(lifespan=lifespan)
    app.state.hub = hub
    app.state.replay_done = False

    @app.websocket("/ws")
    async def ws_endpoint(websocket: WebSocket):
        await websocket.accept()
        await websocket.send_text(json.dumps(hub.hello()))
        queue = hub.attach_viewer()

        async def sender():
            while True:
                message = await queue.get()
                if message is None:
                    await websocket.close()
                    return
                await websocket.send_text(json.dumps(message.as_dict()))

        async def receiver():
            while True:
                raw = await websocket.receive_text()
                if replay_mode:
                    await websocket.send_text(json.dumps(
                        {"type": "error",
                         "reason": "inputs are ignored during replay"}))
                    continue
                try:
                    seq, coords = hub.parse_input(raw)
                except ValueError as exc:
                    await websocket.send_text(json.dumps(
                        {"type": "error", "reason": str(exc)}))
                    continue
                hub.submit_input(seq, coords)

        try:
            done, pending = await asyncio.wait(
                [asyncio.create_task(sender()),
                 asyncio.create_task(receiver())],
                return_when=asyncio.FIRST_COMPLETED)
            for task in pending:
                task.cancel()
                with contextlib.suppress(asyncio.CancelledError, Exception):
                    await task
            for task in done:
                exc = task.exception()
                if exc is not None and not isinstance(exc, WebSocketDisconnect):
                    raise exc
        except WebSocketDisconnect:
            pass
        finally:
            hub.detach_viewer(queue)

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles
        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def parse_addr(addr: str) -> tuple:
    host, sep, port = addr.rpartition(":")
    if not sep or not port.isdigit():
        raise BindFailure(f"address must be host:port, got {addr!r}")
    return host or "127.0.0.1", int(port)


def bind_socket(addr: str) -> socket.socket:
    """Bind the listen socket up front so failures surface before startup."""
    host, port = parse_addr(addr)
    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        sock.bind((host, port))
    except OSError as exc:
        sock.close()
        raise BindFailure(f"cannot bind {addr}: {exc}") from exc
    return sock


def _run_uvicorn(app, sock, log_level: str = "warning") -> None:
    import uvicorn

    config = uvicorn.Config(app, log_level=log_level, lifespan="on")
    server = uvicorn.Server(config)
    app.state.stop_server = lambda: setattr(server, "should_exit", True)
    server.run(sockets=[sock])


def serve(lattice: SampleLattice, addr: str = "127.0.0.1:8765",
          rate_hz: float = DEFAULT_RATE_HZ,
          ui_dir: Optional[str] = None) -> None:
    """Run the live loop until interrupted. Raises BindFailure early."""
    sock = bind_socket(addr)
    app = build_app(lattice, rate_hz=rate_hz, ui_dir=ui_dir)
    logger.info("serving on ws://%s/ws at %.0f Hz", addr, rate_hz)
    _run_uvicorn(app, sock)


def replay(lattice: SampleLattice, trajectory_path: PathOrFile,
           addr: str = "127.0.0.1:8765",
           rate_hz: float = DEFAULT_RATE_HZ,
           realtime: bool = True,
           wait_for_viewer: bool = True) -> None:
    """Stream a recorded trajectory, then exit (one tick past its last row)."""
    axis_names = tuple(ax.name for ax in lattice.axes)
    trajectory = load_trajectory(trajectory_path, axis_names)
    sock = bind_socket(addr)
    holder = {}
    app = build_app(lattice, rate_hz=rate_hz, trajectory=trajectory,
                    realtime=realtime, wait_for_viewer=wait_for_viewer,
                    on_done=lambda: holder["stop"]())
    logger.info("replaying %d rows on ws://%s/ws at %.0f Hz",
                len(trajectory), addr, rate_hz)
    import uvicorn

    config = uvicorn.Config(app, log_level="warning", lifespan="on")
    server = uvicorn.Server(config)
    holder["stop"] = lambda: setattr(server, "should_exit", True)
    server.run(sockets=[sock])
