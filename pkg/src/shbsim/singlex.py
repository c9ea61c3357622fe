"""Exact single-excitation solver.

With one excitation shared between the cavity and N emitters, the effective
non-Hermitian generator is the (N+1)-dimensional arrowhead matrix

    M = [[omega_a - i*kappa/2,  g_1, ..., g_N ],
         [g_1, omega_1 - i*Gamma/2,  0 ...    ],
         [...                                 ],
         [g_N, 0, ...,  omega_N - i*Gamma/2   ]]

whose eigenvalues give mode energies (real part) and decay rates 2|Im|.
Quantum jumps out of this sector only feed the dark ground state, so the
amplitude evolution dc/dt = -(i/hbar) M c reproduces the full master-equation
photon number exactly for a one-photon initial state.

Eigenvalues are found from the arrowhead secular equation

    omega_a - i*kappa/2 - lam = sum_i g_i^2 / (omega_i - i*Gamma/2 - lam)

by damped Newton iterations confined between adjacent emitter poles (all
poles share the imaginary offset -i*Gamma/2, so the substitution
lam = x - i*Gamma/2 puts them on the real axis).  The root set is verified
against the trace and a residual bound; on any failure a dense
general-complex eigensolver takes over.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg

from .constants import HBAR
from .ensemble import Ensemble
from .errors import FitError, NumericalError
from .results import TrajectoryResult

_DENSE_CAP = 2001           # largest dimension the dense fallback will accept
_RESIDUAL_TOL = 1e-9
_NEWTON_ITERS = 100


@dataclass(frozen=True)
class SingleExcitationOperator:
    """Arrowhead generator: complex diagonal + real first row/column."""

    diag: np.ndarray    # complex, length N+1; [cavity, emitters...]
    arm: np.ndarray     # real couplings, length N

    def __post_init__(self) -> None:
        if self.diag.shape[0] != self.arm.shape[0] + 1:
            raise ValueError("diag must be one entry longer than arm")

    @property
    def dim(self) -> int:
        return self.diag.shape[0]

    def matrix(self) -> np.ndarray:
        m = np.zeros((self.dim, self.dim), dtype=complex)
        np.fill_diagonal(m, self.diag)
        m[0, 1:] = self.arm
        m[1:, 0] = self.arm
        return m


@dataclass(frozen=True)
class EigenResult:
    """Eigenvalues (sorted by real part) and per-mode photon weights."""

    eigenvalues: np.ndarray     # complex eV
    photon_weights: np.ndarray  # |cavity amplitude|^2 of normalized eigenvectors

    @property
    def decay_rates(self) -> np.ndarray:
        return 2.0 * np.abs(self.eigenvalues.imag)

    def in_window(self, lo: float, hi: float) -> "EigenResult":
        sel = (self.eigenvalues.real > lo) & (self.eigenvalues.real < hi)
        return EigenResult(self.eigenvalues[sel], self.photon_weights[sel])


def build_operator(e: Ensemble) -> SingleExcitationOperator:
    diag = np.concatenate((
        [e.cavity.omega_a - 0.5j * e.cavity.kappa],
        e.omegas - 0.5j * e.gamma,
    )).astype(complex)
    return SingleExcitationOperator(diag, e.couplings)


def _arrowhead_weights(lam: np.ndarray, poles: np.ndarray,
                       g: np.ndarray) -> np.ndarray:
    """Photon weights from the analytic eigenvector v = (1, g_i/(lam - z_i))."""
    if poles.size == 0:
        return np.ones_like(lam, dtype=float)
    amp2 = np.abs(g[None, :] / (lam[:, None] - poles[None, :])) ** 2
    return 1.0 / (1.0 + amp2.sum(axis=1))


def _secular_roots(z_a: complex, poles: np.ndarray, g: np.ndarray,
                   gamma: float) -> np.ndarray | None:
    """All roots of the arrowhead secular equation, or None on failure."""
    order = np.argsort(poles.real)
    w = poles.real[order]
    g2 = g[order] ** 2
    n = w.size
    c = z_a + 0.5j * gamma          # shifted cavity pole in the x-plane
    omega_eff = float(np.sqrt(g2.sum()))

    def f_fp(x: complex) -> tuple[complex, complex]:
        d = w - x
        return c - x - np.sum(g2 / d), -1.0 - np.sum(g2 / d ** 2)

    def newton(x0: complex, lo: float, hi: float) -> complex:
        x = x0
        for _ in range(_NEWTON_ITERS):
            fx, fpx = f_fp(x)
            step = fx / fpx
            xn = x - step
            halvings = 0
            while not (lo < xn.real < hi) and halvings < 60:
                step *= 0.5
                xn = x - step
                halvings += 1
            if abs(xn - x) < 1e-15 * (1.0 + abs(xn)):
                return xn
            x = xn
        return x

    eps = 1e-13
    roots: list[complex] = []
    for k in range(n - 1):
        lo, hi = w[k], w[k + 1]
        for frac in (0.5, 0.25, 0.75):
            roots.append(newton(lo + frac * (hi - lo), lo + eps, hi - eps))
    span = w[-1] - w[0] if n > 1 else 1.0
    pad = max(omega_eff, span / max(n - 1, 1), 1e-3)
    for scale in (0.25, 1.0, 4.0):
        roots.append(newton(w[0] - scale * pad, -np.inf, w[0] - eps))
        roots.append(newton(w[-1] + scale * pad, w[-1] + eps, np.inf))

    arr = np.array(roots)
    res = np.abs([f_fp(r)[0] for r in arr])
    arr = arr[res < _RESIDUAL_TOL * (1.0 + np.abs(arr))]
    dedup: list[complex] = []
    tol = max(1e-9, 1e-9 * max(span, 1.0))
    for r in sorted(arr, key=lambda v: (v.real, v.imag)):
        if not dedup or abs(r - dedup[-1]) > tol:
            dedup.append(r)
    if len(dedup) != n + 1:
        return None
    lam = np.array(dedup) - 0.5j * gamma
    trace_err = abs(lam.sum() - (z_a + poles.sum()))
    if trace_err > 1e-8 * (1.0 + abs(z_a) + float(np.abs(poles).sum())):
        return None
    return lam


def eigensolve(op: SingleExcitationOperator, method: str = "auto") -> EigenResult:
    """Full eigendecomposition of the arrowhead operator.

    method: "auto" tries the secular equation and falls back to a dense
    solver; "secular" raises NumericalError instead of falling back; "dense"
    goes straight to the dense solver.  Emitters with zero coupling are
    deflated exactly (eigenvalue at their pole, photon weight 0).
    """
    if method not in ("auto", "secular", "dense"):
        raise ValueError("method must be 'auto', 'secular' or 'dense'")
    z_a = complex(op.diag[0])
    poles_all = op.diag[1:]
    g_all = np.asarray(op.arm, dtype=float)
    gamma = float(-2.0 * poles_all.imag[0]) if poles_all.size else 0.0
    # the pole-shift trick requires one shared emitter linewidth
    uniform = poles_all.size == 0 or np.allclose(poles_all.imag, poles_all.imag[0])

    coupled = g_all != 0.0
    deflated_lam = poles_all[~coupled]
    poles = poles_all[coupled]
    g = g_all[coupled]

    lam = None
    if method in ("auto", "secular"):
        if poles.size == 0:
            lam = np.array([z_a])
        elif uniform and np.unique(poles.real).size == poles.size:
            lam = _secular_roots(z_a, poles, g, gamma)
        if lam is None and method == "secular":
            raise NumericalError("secular root finding failed to locate all eigenvalues")

    if lam is None:     # dense path
        if op.dim > _DENSE_CAP:
            raise NumericalError(
                f"dense eigensolver refused: dim {op.dim} exceeds cap {_DENSE_CAP}")
        vals, vecs = np.linalg.eig(op.matrix())
        weights = np.abs(vecs[0, :]) ** 2 / (np.abs(vecs) ** 2).sum(axis=0)
        order = np.argsort(vals.real)
        return EigenResult(vals[order], weights[order])

    weights = _arrowhead_weights(lam, poles, g)
    if deflated_lam.size:
        lam = np.concatenate([lam, deflated_lam])
        weights = np.concatenate([weights, np.zeros(deflated_lam.size)])
    order = np.argsort(lam.real)
    return EigenResult(lam[order], weights[order])


def cavity_sweep_spectrum(e: Ensemble, omega_a_grid, hermitian: bool = False,
                          method: str = "auto") -> list[EigenResult]:
    """Eigendecomposition at each cavity energy on the grid.

    hermitian=True zeroes kappa and Gamma for clean anticrossing diagrams.
    """
    grid = np.atleast_1d(np.asarray(omega_a_grid, dtype=float))
    if grid.size == 0:
        raise ValueError("omega_a_grid must be nonempty")
    base = build_operator(e)
    out = []
    for wa in grid:
        diag = base.diag.copy()
        if hermitian:
            diag = diag.real.astype(complex)
        diag[0] = wa - (0.0 if hermitian else 0.5j * e.cavity.kappa)
        out.append(eigensolve(SingleExcitationOperator(diag, base.arm), method))
    return out


def evolve_fock(e: Ensemble, t_max: float, dt: float,
                method: str = "spectral") -> TrajectoryResult:
    """Free evolution from a one-photon Fock state (emitters in the ground state).

    "spectral" propagates by exact eigenvector expansion; "rk4" is a direct
    fixed-step integrator kept as an independent cross-check.
    """
    if dt <= 0 or t_max < dt:
        raise ValueError("evolve_fock requires dt > 0 and t_max >= dt")
    op = build_operator(e)
    m = op.matrix()
    times = np.arange(0.0, t_max + dt / 2, dt)
    c0 = np.zeros(op.dim, dtype=complex)
    c0[0] = 1.0

    if method == "spectral":
        try:
            lam, vecs = scipy.linalg.eig(m)
            coef = np.linalg.solve(vecs, c0)
        except np.linalg.LinAlgError as exc:   # pragma: no cover - defensive
            raise NumericalError(f"eigendecomposition failed: {exc}") from exc
        phases = np.exp(-1j * np.outer(times, lam) / HBAR)
        states = phases * coef[None, :] @ vecs.T        # (nt, dim)
    elif method == "rk4":
        states = np.empty((times.size, op.dim), dtype=complex)
        states[0] = c0
        c = c0.copy()
        pref = -1j / HBAR
        for k in range(1, times.size):
            k1 = pref * (m @ c)
            k2 = pref * (m @ (c + 0.5 * dt * k1))
            k3 = pref * (m @ (c + 0.5 * dt * k2))
            k4 = pref * (m @ (c + dt * k3))
            c = c + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            states[k] = c
    else:
        raise ValueError("method must be 'spectral' or 'rk4'")

    photon = np.abs(states[:, 0]) ** 2
    emitter = (np.abs(states[:, 1:]) ** 2).sum(axis=1)
    return TrajectoryResult(times, photon, emitter, states[:, 0])


def trajectory_maxima(traj: TrajectoryResult, t_start: float,
                      t_stop: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Times and heights of local maxima of the photon population."""
    part = traj.slice(t_start, t_stop)
    v = part.photon_population
    if v.size < 3:
        return np.array([]), np.array([])
    mask = (v[1:-1] >= v[:-2]) & (v[1:-1] > v[2:])
    idx = np.where(mask)[0] + 1
    return part.times[idx], v[idx]


def fit_envelope_decay(traj: TrajectoryResult, t_start: float,
                       t_stop: float | None = None) -> float:
    """Envelope decay rate in eV from the post-t_start population maxima.

    Least-squares slope of log(peak height) against peak time, times -hbar.
    Requires at least five maxima in the fit window.
    """
    tp, vp = trajectory_maxima(traj, t_start, t_stop)
    keep = vp > 0
    tp, vp = tp[keep], vp[keep]
    if tp.size < 5:
        raise FitError(
            f"envelope fit needs >= 5 population maxima after t_start, found {tp.size}")
    slope = np.polyfit(tp, np.log(vp), 1)[0]
    return float(-slope * HBAR)


def dominant_frequency(traj: TrajectoryResult, t_start: float,
                       f_min: float = 0.01) -> float:
    """Dominant oscillation frequency (cycles/fs) of the photon population.

    The slow envelope trend (moving average over ~1.5/f_min) is subtracted
    before a Hann-windowed, zero-padded discrete Fourier transform; bins
    below f_min are ignored as residual envelope leakage, and the winning
    bin is refined by parabolic interpolation.
    """
    part = traj.slice(t_start)
    v = part.photon_population
    if v.size < 16:
        raise FitError("dominant_frequency needs at least 16 samples after t_start")
    dt = float(part.times[1] - part.times[0])
    win = min(max(int(round(1.5 / (f_min * dt))), 3), v.size)
    trend = scipy.ndimage.uniform_filter1d(v, size=win, mode="nearest")
    sig = (v - trend) * np.hanning(v.size)
    npad = 8 * v.size
    spec = np.abs(np.fft.rfft(sig, n=npad))
    freqs = np.fft.rfftfreq(npad, d=dt)
    spec[freqs < f_min] = 0.0
    k = int(np.argmax(spec))
    if spec[k] == 0.0:
        raise FitError("no spectral weight above f_min")
    if 0 < k < spec.size - 1:
        denom = spec[k - 1] - 2 * spec[k] + spec[k + 1]
        if denom != 0.0:
            shift = 0.5 * (spec[k - 1] - spec[k + 1]) / denom
            return float(freqs[k] + shift * (freqs[1] - freqs[0]))
    return float(freqs[k])


def dark_modes(result: EigenResult, windows) -> list[complex]:
    """One eigenvalue per spectral-gap window: smallest |Im| among those whose
    real part falls inside the window."""
    picks = []
    for lo, hi in windows:
        cand = result.in_window(lo, hi)
        if cand.eigenvalues.size == 0:
            raise NumericalError(f"no eigenvalue inside the gap window ({lo}, {hi})")
        picks.append(complex(cand.eigenvalues[np.argmin(np.abs(cand.eigenvalues.imag))]))
    return picks


def write_eigen_csv(path, result: EigenResult) -> Path:
    """CSV export: re_eV, im_eV, photon_weight."""
    path = Path(path)
    data = np.column_stack([result.eigenvalues.real, result.eigenvalues.imag,
                            result.photon_weights])
    np.savetxt(path, data, fmt="%.12g", delimiter=",",
               header="re_eV,im_eV,photon_weight", comments="")
    return path
