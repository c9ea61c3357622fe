"""Closed-form transmission spectrum of the hybrid system.

The cavity response to a weak probe at energy omega is

    T(omega) = |1 / (D_a - delta(omega) - i [kappa + rho(omega)] / 2)|^2

with D_a = omega_a - omega and (rho, delta) the dressed-ensemble kernels from
:func:`shbsim.ensemble.spectral_density`.  The proportionality constant is
fixed to 1; figure-style comparisons use per-curve normalized spectra.
"""
from __future__ import annotations

import numpy as np
from scipy import signal

from .ensemble import Ensemble, spectral_density
from .results import Peak, SpectrumResult

DEFAULT_PROMINENCE = 0.02


def transmission_at(e: Ensemble, omega) -> float | np.ndarray:
    """Un-normalized transmission at one or many probe energies."""
    rho, delta = spectral_density(e, omega)
    d_a = e.cavity.omega_a - np.asarray(omega, dtype=float)
    denom = (d_a - delta) ** 2 + 0.25 * (e.cavity.kappa + rho) ** 2
    out = 1.0 / denom
    return float(out) if np.asarray(omega).ndim == 0 else out


def transmission_sweep(e: Ensemble, omega_min: float, omega_max: float,
                       n_points: int, normalize: bool = True,
                       prominence: float = DEFAULT_PROMINENCE) -> SpectrumResult:
    """Uniform-grid transmission sweep with peak detection."""
    if not omega_min < omega_max:
        raise ValueError("transmission_sweep requires omega_min < omega_max")
    if n_points < 2:
        raise ValueError("transmission_sweep requires n_points >= 2")
    omegas = np.linspace(omega_min, omega_max, n_points)
    values = np.asarray(transmission_at(e, omegas))
    if normalize:
        values = values / values.max()
    peaks = detect_peaks(omegas, values, prominence)
    return SpectrumResult(omegas, values, tuple(peaks), normalized=normalize)


def _half_height_crossing(x: np.ndarray, y: np.ndarray, peak: int, half: float,
                          direction: int) -> float:
    """Linear-interpolated x where y crosses `half` walking from the peak."""
    i = peak
    while True:
        j = i + direction
        if j < 0 or j >= len(y):
            return float("nan")
        if y[j] <= half:
            t = (half - y[i]) / (y[j] - y[i])
            return float(x[i] + t * (x[j] - x[i]))
        i = j


def detect_peaks(omegas: np.ndarray, values: np.ndarray,
                 prominence: float = DEFAULT_PROMINENCE) -> list[Peak]:
    """Local maxima above a prominence cut, with half-height FWHM.

    The prominence threshold is taken relative to the curve maximum.  FWHM is
    measured by walking from each peak to the first crossings of half the
    peak height and linearly interpolating; nan if a crossing never happens
    inside the sampled range.
    """
    if len(values) < 3:
        raise ValueError("peak detection requires at least 3 samples")
    idx, _ = signal.find_peaks(values, prominence=prominence * float(np.max(values)))
    peaks = []
    for p in idx:
        half = values[p] / 2.0
        left = _half_height_crossing(omegas, values, p, half, -1)
        right = _half_height_crossing(omegas, values, p, half, +1)
        fwhm = right - left if np.isfinite(left) and np.isfinite(right) else float("nan")
        peaks.append(Peak(float(omegas[p]), float(values[p]), fwhm))
    peaks.sort(key=lambda pk: pk.center)
    return peaks


def find_peaks(s: SpectrumResult, prominence: float = DEFAULT_PROMINENCE) -> list[Peak]:
    """Peak list of an existing spectrum at a chosen prominence."""
    return detect_peaks(s.omegas, s.values, prominence)


def peaks_in_window(s: SpectrumResult, lo: float, hi: float) -> list[Peak]:
    return [p for p in s.peaks if lo <= p.center <= hi]


def hole_contrast(s: SpectrumResult, hole_centers: tuple[float, ...],
                  background_omega: float, half_window: float = 0.02) -> float:
    """Mean in-hole maximum divided by the background value.

    For each hole centre, take the spectrum maximum within +-half_window; the
    contrast is the average of those maxima over the value at the background
    probe energy (normalization-independent).
    """
    bg = s.value_at(background_omega)
    tops = []
    for c in hole_centers:
        sel = (s.omegas >= c - half_window) & (s.omegas <= c + half_window)
        if not np.any(sel):
            raise ValueError("hole window lies outside the sampled spectrum")
        tops.append(float(s.values[sel].max()))
    return float(np.mean(tops) / bg)
