"""Regenerate the committed golden files under tests/data/.

Run from the repository root:

    python tools/make_test_data.py
"""

import pathlib
import sys

import numpy as np

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from padpress import build_lattice, write_capture, write_lattice  # noqa: E402
from padpress.synth import synth_session  # noqa: E402

DATA = pathlib.Path(__file__).resolve().parents[1] / "tests" / "data"


def main():
    DATA.mkdir(parents=True, exist_ok=True)
    sessions = []
    for i, angle in enumerate((15.0, 30.0, 45.0)):
        session = synth_session(angle, seed=100 + i)
        write_capture(session, DATA / f"capture_{int(angle)}deg.csv")
        sessions.append(session)
    lattice = build_lattice(sessions, 0.5)
    write_lattice(lattice, DATA / "lattice_4x3_16x15.json")

    # 100-row trajectory: a z ramp and back at drifting angle, 100 Hz.
    rows = []
    for k in range(100):
        t = k * 0.01
        z = 1.5 * (k / 99.0)
        theta = 15.0 + 30.0 * abs(float(np.sin(k / 20.0)))
        rows.append((t, z, theta))
    with open(DATA / "trajectory_100.csv", "w", encoding="utf-8") as fh:
        fh.write("t_s,z,theta\n")
        for t, z, theta in rows:
            fh.write(f"{t!r},{z!r},{theta!r}\n")
    print(f"wrote golden files to {DATA}")


if __name__ == "__main__":
    main()
