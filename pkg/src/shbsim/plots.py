"""Figure rendering for scenario outputs.

Every scenario writes plot-ready CSV/JSON; this module additionally renders
the standard figures (PNG) next to them.  Uses the Agg backend so runs work
headless.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .results import ScanResult, SpectrumResult, TrajectoryResult  # noqa: E402

_RC = {
    "figure.figsize": (6.0, 4.0),
    "figure.dpi": 130,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.2,
}


def _new_axes():
    plt.rcParams.update(_RC)
    fig, ax = plt.subplots()
    return fig, ax


def _save(fig, path: str | Path) -> Path:
    path = Path(path)
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
    return path


def render_spectra(path, curves: list[tuple[str, SpectrumResult]],
                   title: str = "Transmission spectrum") -> Path:
    fig, ax = _new_axes()
    for label, s in curves:
        ax.plot(s.omegas, s.values, label=label)
        for p in s.peaks:
            ax.axvline(p.center, color="gray", alpha=0.25, lw=0.8)
    ax.set_xlabel("probe energy (eV)")
    ax.set_ylabel("transmission" + (" (normalized)" if curves and curves[0][1].normalized else ""))
    ax.set_title(title)
    ax.legend()
    return _save(fig, path)


def render_trajectories(path, curves: list[tuple[str, TrajectoryResult]],
                        title: str = "Cavity photon population",
                        logscale: bool = True) -> Path:
    fig, ax = _new_axes()
    for label, t in curves:
        ax.plot(t.times, t.photon_population, label=label)
        if t.t_off_index is not None:
            ax.axvline(t.times[t.t_off_index], color="k", ls="--", lw=0.8, alpha=0.5)
    if logscale:
        ax.set_yscale("log")
    ax.set_xlabel("time (fs)")
    ax.set_ylabel("photon population")
    ax.set_title(title)
    ax.legend()
    return _save(fig, path)


def render_scan_heatmap(path, scan: ScanResult, title: str = "Parameter scan",
                        logscale: bool = False) -> Path:
    names = list(scan.axes)
    if len(names) != 2:
        raise ValueError("heatmap rendering needs a 2-d scan")
    x = scan.axes[names[1]]
    y = scan.axes[names[0]]
    vals = scan.values
    if logscale:
        vals = np.log10(np.maximum(vals, 1e-300))
    fig, ax = _new_axes()
    mesh = ax.pcolormesh(x, y, vals, shading="nearest", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label=("log10 value" if logscale else "value"))
    am = scan.argmax
    ax.plot(am[names[1]], am[names[0]], "r+", markersize=10)
    ax.set_xlabel(names[1])
    ax.set_ylabel(names[0])
    ax.set_title(title)
    return _save(fig, path)


def render_eigen_sweep(path, omega_a_grid, eigen_results,
                       title: str = "Single-excitation spectrum") -> Path:
    """Scatter of mode energies against cavity energy, colored by photon weight."""
    fig, ax = _new_axes()
    xs, ys, cs = [], [], []
    for wa, res in zip(omega_a_grid, eigen_results):
        xs.extend([wa] * res.eigenvalues.size)
        ys.extend(res.eigenvalues.real.tolist())
        cs.extend(res.photon_weights.tolist())
    sc = ax.scatter(xs, ys, c=cs, s=4, cmap="plasma", vmin=0, vmax=1)
    fig.colorbar(sc, ax=ax, label="photon weight")
    ax.set_xlabel("cavity energy (eV)")
    ax.set_ylabel("mode energy (eV)")
    ax.set_title(title)
    return _save(fig, path)


def render_drive_and_trajectory(path, waveform_samples: tuple[np.ndarray, np.ndarray],
                                curves: list[tuple[str, TrajectoryResult]],
                                title: str = "Driven dynamics") -> Path:
    plt.rcParams.update(_RC)
    fig, (ax0, ax1) = plt.subplots(2, 1, sharex=True,
                                   gridspec_kw={"height_ratios": [1, 3]})
    ts, amps = waveform_samples
    ax0.plot(ts, amps, color="tab:orange", lw=0.9)
    ax0.set_ylabel("drive (eV)")
    for label, t in curves:
        ax1.plot(t.times, t.photon_population, label=label)
        if t.t_off_index is not None:
            ax1.axvline(t.times[t.t_off_index], color="k", ls="--", lw=0.8, alpha=0.5)
    ax1.set_yscale("log")
    ax1.set_xlabel("time (fs)")
    ax1.set_ylabel("photon population")
    ax1.legend()
    ax0.set_title(title)
    return _save(fig, path)
