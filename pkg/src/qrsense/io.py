"""CSV readers and writers for matrices, sample files and spectra.

All numbers are written with Python's float formatting, which ignores the
process locale.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .harmonic import SamplingSchedule, Tone

MATRIX_HEADER = ["row", "col", "re", "im"]
SAMPLE_HEADER = ["slot", "time_s", "value"]
SPECTRUM_HEADER = ["freq_index", "freq_hz", "amplitude", "phase_rad"]


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_matrix_csv(matrix, path) -> None:
    """One line per entry, 1-based (row, col), 17 significant digits."""
    matrix = np.asarray(matrix)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(MATRIX_HEADER)
        for (i, j), z in np.ndenumerate(matrix):
            w.writerow([i + 1, j + 1, fmt(z.real), fmt(z.imag)])


def read_matrix_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        return np.zeros((0, 0), dtype=complex)
    m = max(int(r["row"]) for r in rows)
    n = max(int(r["col"]) for r in rows)
    out = np.zeros((m, n), dtype=complex)
    for r in rows:
        out[int(r["row"]) - 1, int(r["col"]) - 1] = complex(float(r["re"]), float(r["im"]))
    return out


def write_samples_csv(schedule: SamplingSchedule, samples, path) -> None:
    """Samples are given in acquisition order and written in time order."""
    samples = np.asarray(samples, dtype=float)
    order = schedule.acquisition_order
    if samples.shape != (len(order),):
        raise ValueError(f"expected {len(order)} samples")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SAMPLE_HEADER)
        for slot, value in sorted(zip(order, samples)):
            w.writerow([slot, format(slot * schedule.dt, ".12g"), fmt(value)])


def read_samples_csv(schedule: SamplingSchedule, path) -> np.ndarray:
    """Load a sample file back into acquisition order."""
    with open(path, newline="") as fh:
        by_slot = {int(r["slot"]): float(r["value"]) for r in csv.DictReader(fh)}
    try:
        return np.array([by_slot[s] for s in schedule.acquisition_order])
    except KeyError as exc:
        raise ValueError(f"sample file lacks slot {exc.args[0]}") from None


def write_spectrum_csv(components, f0: float, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SPECTRUM_HEADER)
        for t in sorted(components, key=lambda t: t.n):
            w.writerow([t.n, fmt(t.n * f0), fmt(t.amplitude), fmt(t.phase)])


def read_spectrum_csv(path) -> list[Tone]:
    with open(path, newline="") as fh:
        return [Tone(int(r["freq_index"]), float(r["amplitude"]), float(r["phase_rad"]))
                for r in csv.DictReader(fh)]


def write_table(path, config_line: str, header, rows, trailer=()) -> None:
    """Experiment output: ``# config:`` comment, CSV body, optional ``#`` trailer lines."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        fh.write(f"# config: {config_line}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) if isinstance(v, float) else v for v in row])
        for line in trailer:
            fh.write(f"# {line}\n")
