"""Read and write the lattice model file.

The file is a single self-describing JSON document:

    {
      "version": 1,
      "frame_rows": 16, "frame_cols": 15,
      "element_pitch_mm": 1.5, "full_scale_kpa": 82.87,
      "axes": [
        {"name": "z", "unit": "mm", "samples": [0.0, 0.5, 1.0, 1.5]},
        {"name": "theta", "unit": "deg", "samples": [15.0, 30.0, 45.0]}
      ],
      "frames": [
        {"index": [0, 0], "values": [ ... rows*cols scalars, row-major ... ]},
        ...
      ]
    }

The writer emits frames in lexicographic index order; the reader accepts
any order but rejects duplicate or missing nodes. Floats are written in
shortest round-trip form, so write -> read reproduces every value
bit-identically.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import IO, Union

from .core import (
    AxisSpec,
    PressureFrame,
    SampleLattice,
    error_findings,
    lattice_validate,
)
from .errors import (
    DuplicateNodeError,
    GeometryMismatchError,
    MalformedLatticeFile,
    MissingNodeError,
)

FORMAT_VERSION = 1

PathOrFile = Union[str, Path, IO[str]]


def lattice_to_dict(lattice: SampleLattice) -> dict:
    """Plain-dict form of a lattice, frames in lexicographic index order."""
    return {
        "version": FORMAT_VERSION,
        "frame_rows": lattice.frame_rows,
        "frame_cols": lattice.frame_cols,
        "element_pitch_mm": lattice.element_pitch_mm,
        "full_scale_kpa": lattice.full_scale_kpa,
        "axes": [
            {"name": ax.name, "unit": ax.unit, "samples": ax.samples.tolist()}
            for ax in lattice.axes
        ],
        "frames": [
            {"index": list(index), "values": lattice.frames[index].values.tolist()}
            for index in sorted(lattice.frames.keys())
        ],
    }


def write_lattice(lattice: SampleLattice, dest: PathOrFile) -> None:
    """Serialize a lattice to ``dest`` (path or text file object)."""
    doc = lattice_to_dict(lattice)
    if hasattr(dest, "write"):
        json.dump(doc, dest)
    else:
        with open(dest, "w", encoding="utf-8") as fh:
            json.dump(doc, fh)


def dumps_lattice(lattice: SampleLattice) -> str:
    return json.dumps(lattice_to_dict(lattice))


def _require(doc: dict, key: str):
    if key not in doc:
        raise MalformedLatticeFile(f"missing required key {key!r}")
    return doc[key]


def lattice_from_dict(doc) -> SampleLattice:
    """Build and fully validate a lattice from a parsed document."""
    if not isinstance(doc, dict):
        raise MalformedLatticeFile("document root must be an object")
    version = _require(doc, "version")
    if version != FORMAT_VERSION:
        raise MalformedLatticeFile(f"unsupported format version {version!r}")

    frame_rows = _require(doc, "frame_rows")
    frame_cols = _require(doc, "frame_cols")
    if not isinstance(frame_rows, int) or not isinstance(frame_cols, int):
        raise MalformedLatticeFile("frame_rows/frame_cols must be integers")

    axes_doc = _require(doc, "axes")
    if not isinstance(axes_doc, list) or not axes_doc:
        raise MalformedLatticeFile("axes must be a non-empty list")
    axes = []
    for ax in axes_doc:
        try:
            axes.append(AxisSpec(name=str(ax["name"]), unit=str(ax["unit"]),
                                 samples=ax["samples"]))
        except (KeyError, TypeError) as exc:
            raise MalformedLatticeFile(f"malformed axis entry: {ax!r}") from exc
    shape = tuple(len(ax) for ax in axes)

    frames_doc = _require(doc, "frames")
    if not isinstance(frames_doc, list):
        raise MalformedLatticeFile("frames must be a list")
    frames = {}
    for entry in frames_doc:
        try:
            raw_index = entry["index"]
            raw_values = entry["values"]
        except (KeyError, TypeError) as exc:
            raise MalformedLatticeFile(f"malformed frame entry: {entry!r}") from exc
        if len(raw_index) != len(axes):
            raise MalformedLatticeFile(
                f"frame index {raw_index!r} does not match {len(axes)} axes")
        index = tuple(int(i) for i in raw_index)
        if any(i < 0 or i >= n for i, n in zip(index, shape)):
            raise MalformedLatticeFile(
                f"frame index {index!r} outside axis shape {shape!r}")
        if index in frames:
            raise DuplicateNodeError(f"duplicate frame for node {index!r}",
                                     index=index)
        if len(raw_values) != frame_rows * frame_cols:
            raise GeometryMismatchError(
                f"frame {index!r} has {len(raw_values)} values, expected "
                f"{frame_rows}x{frame_cols}", index=index)
        frames[index] = PressureFrame(frame_rows, frame_cols, raw_values)

    lattice = SampleLattice(
        axes=tuple(axes),
        frame_rows=frame_rows,
        frame_cols=frame_cols,
        frames=frames,
        element_pitch_mm=float(doc.get("element_pitch_mm", 1.5)),
        full_scale_kpa=float(doc.get("full_scale_kpa", 82.87)),
    )
    missing = [f for f in error_findings(lattice_validate(lattice))]
    if missing:
        raise MissingNodeError(f"lattice is incomplete: {missing[:5]!r}",
                               count=len(missing))
    return lattice


def read_lattice(src: PathOrFile) -> SampleLattice:
    """Parse and validate a lattice file; raises specific errors per defect."""
    try:
        if hasattr(src, "read"):
            doc = json.load(src)
        else:
            with open(src, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise MalformedLatticeFile(f"not valid JSON: {exc}") from exc
    return lattice_from_dict(doc)


def loads_lattice(text: str) -> SampleLattice:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedLatticeFile(f"not valid JSON: {exc}") from exc
    return lattice_from_dict(doc)
