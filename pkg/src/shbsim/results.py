"""Result containers shared by the solvers, plus delimited-file export.

CSV conventions: the first column is always the sweep variable, headers are
plain column names, floats are written with "%.12g" so identical runs produce
byte-identical files.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

_FLOAT_FMT = "%.12g"


class Peak(NamedTuple):
    center: float   # eV
    height: float
    fwhm: float     # eV; nan when a half-height crossing is off-grid


@dataclass(frozen=True)
class SpectrumResult:
    """Sampled transmission curve and the peaks detected on it."""

    omegas: np.ndarray          # eV, strictly increasing
    values: np.ndarray          # transmission, >= 0
    peaks: tuple[Peak, ...] = ()
    normalized: bool = False

    def __post_init__(self) -> None:
        if self.omegas.ndim != 1 or self.omegas.shape != self.values.shape:
            raise ValueError("omegas and values must be 1-d arrays of equal length")
        if np.any(np.diff(self.omegas) <= 0):
            raise ValueError("omegas must be strictly increasing")

    def value_at(self, omega: float) -> float:
        """Sample nearest to a probe energy."""
        return float(self.values[int(np.argmin(np.abs(self.omegas - omega)))])


@dataclass(frozen=True)
class TrajectoryResult:
    """Time series of photon/emitter populations and the cavity amplitude."""

    times: np.ndarray               # fs
    photon_population: np.ndarray
    emitter_population: np.ndarray
    a_amp: np.ndarray               # complex cavity amplitude series
    t_off_index: int | None = None  # first sample at/after drive switch-off

    def __post_init__(self) -> None:
        n = self.times.shape[0]
        for name in ("photon_population", "emitter_population", "a_amp"):
            if getattr(self, name).shape[0] != n:
                raise ValueError(f"{name} length does not match times")

    def slice(self, t_start: float, t_stop: float | None = None) -> "TrajectoryResult":
        t_stop = self.times[-1] if t_stop is None else t_stop
        sel = (self.times >= t_start) & (self.times <= t_stop)
        return TrajectoryResult(
            self.times[sel],
            self.photon_population[sel],
            self.emitter_population[sel],
            self.a_amp[sel],
        )


@dataclass(frozen=True)
class ScanResult:
    """Scalar field over a 1-d or 2-d parameter grid."""

    axes: dict[str, np.ndarray]     # ordered {name: grid}
    values: np.ndarray              # shape = tuple(len(g) for g in axes)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        expected = tuple(len(g) for g in self.axes.values())
        if self.values.shape != expected:
            raise ValueError(f"values shape {self.values.shape} != grid shape {expected}")

    @property
    def argmax(self) -> dict:
        flat = int(np.argmax(self.values))
        idx = np.unravel_index(flat, self.values.shape)
        coords = {name: float(grid[i]) for (name, grid), i in zip(self.axes.items(), idx)}
        coords["value"] = float(self.values[idx])
        return coords


def write_spectrum_csv(path: str | Path, s: SpectrumResult) -> Path:
    path = Path(path)
    data = np.column_stack([s.omegas, s.values])
    np.savetxt(path, data, fmt=_FLOAT_FMT, delimiter=",",
               header="omega_eV,transmission", comments="")
    return path


def write_peaks_json(path: str | Path, s: SpectrumResult) -> Path:
    path = Path(path)
    doc = {
        "normalized": s.normalized,
        "peaks": [
            {"center_eV": p.center, "height": p.height,
             "fwhm_eV": None if np.isnan(p.fwhm) else p.fwhm}
            for p in s.peaks
        ],
    }
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path


def write_trajectory_csv(path: str | Path, t: TrajectoryResult) -> Path:
    path = Path(path)
    data = np.column_stack([t.times, t.photon_population, t.emitter_population])
    np.savetxt(path, data, fmt=_FLOAT_FMT, delimiter=",",
               header="t_fs,photon,emitter", comments="")
    return path


def write_scan_csv(path: str | Path, scan: ScanResult) -> Path:
    """Long format: one row per grid cell, axis columns first."""
    path = Path(path)
    names = list(scan.axes)
    grids = np.meshgrid(*scan.axes.values(), indexing="ij")
    cols = [g.ravel() for g in grids] + [scan.values.ravel()]
    np.savetxt(path, np.column_stack(cols), fmt=_FLOAT_FMT, delimiter=",",
               header=",".join(names + ["value"]), comments="")
    return path


def write_json(path: str | Path, doc: dict) -> Path:
    path = Path(path)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path
