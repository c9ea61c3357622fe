"""Driven linear (mean-field) dynamics of the hybrid system.

In the rotating frame at the probe energy, the amplitudes x = (<a>, <s_1>,
..., <s_N>) obey the linear ODE

    dx/dt = -(i/hbar) (M x + s(t) b),   b = (W_a, W_e, ..., W_e)

where M is the single-excitation arrowhead with detuned diagonal and s(t) is
the drive envelope: 1 for a constant drive, a +-1 square wave for the
pi-phase-switched pulse train (the phase flip is a sign flip in the rotating
frame), 0 after switch-off.

Pulse-train convention: the waveform period T is the full square-wave period;
the sign flips every T/2.  With this convention the optimal pump period of
the burned comb comes out at the collective Rabi period 2*pi*hbar/Omega, as
it must for the phase flips to track the sign of the oscillating amplitude.

Integration is fixed-step RK4 with steps aligned to the drive discontinuities
(segment boundaries at multiples of T/2 and at t_off), so no step straddles a
sign flip.  Photon population is reported in the mean-field approximation
|<a>|^2, valid at low drive.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .constants import HBAR
from .ensemble import Ensemble
from .errors import NumericalError
from .results import ScanResult, TrajectoryResult

DIPOLE_RATIO = 19.0         # cavity/emitter dipole moment ratio
DEFAULT_DRIVE_AMP = 1e-3    # eV, deep linear regime


@dataclass(frozen=True)
class DriveWaveform:
    """Laser drive in the rotating frame."""

    kind: str                       # "constant" | "pulse_train" | "off"
    amplitude_a: float = 0.0        # eV, cavity drive W_a
    amplitude_e: float | None = None  # eV, emitter drive; None -> W_a / 19
    probe_omega: float = 0.0        # eV, rotating-frame energy
    period: float | None = None     # fs, pulse_train only (full square period)
    t_off: float = math.inf         # fs, switch-off time

    def __post_init__(self) -> None:
        if self.kind not in ("constant", "pulse_train", "off"):
            raise ValueError("DriveWaveform.kind must be constant, pulse_train or off")
        if self.amplitude_a < 0:
            raise ValueError("DriveWaveform.amplitude_a must be >= 0")
        if self.amplitude_e is not None and self.amplitude_e < 0:
            raise ValueError("DriveWaveform.amplitude_e must be >= 0")
        if self.kind == "pulse_train" and not (self.period and self.period > 0):
            raise ValueError("DriveWaveform.period must be > 0 for pulse_train")

    @property
    def effective_amplitude_e(self) -> float:
        if self.amplitude_e is not None:
            return self.amplitude_e
        return self.amplitude_a / DIPOLE_RATIO


def pulse_sign(t: float, period: float) -> float:
    """Square-wave sign: +1 on [kT, kT + T/2), -1 on [kT + T/2, (k+1)T)."""
    frac = t - period * math.floor(t / period)
    return 1.0 if frac < period / 2.0 else -1.0


def drive_value(w: DriveWaveform, t: float) -> tuple[float, float]:
    """(cavity drive, emitter drive) at time t, in eV."""
    if t < 0:
        raise ValueError("drive_value requires t >= 0")
    if w.kind == "off" or t >= w.t_off:
        return 0.0, 0.0
    s = 1.0 if w.kind == "constant" else pulse_sign(t, w.period)
    return s * w.amplitude_a, s * w.effective_amplitude_e


@dataclass(frozen=True)
class MeanFieldState:
    """Snapshot of the mean-field amplitudes at one time."""

    a_amp: complex
    sigma_amps: np.ndarray
    t: float = 0.0

    def vector(self) -> np.ndarray:
        return np.concatenate(([self.a_amp], np.asarray(self.sigma_amps, complex)))

    @classmethod
    def from_vector(cls, x: np.ndarray, t: float = 0.0) -> "MeanFieldState":
        x = np.asarray(x, complex)
        return cls(complex(x[0]), x[1:].copy(), t)


def _rotating_matrix(e: Ensemble, probe_omega: float) -> np.ndarray:
    m = np.zeros((e.n + 1, e.n + 1), dtype=complex)
    m[0, 0] = e.cavity.omega_a - probe_omega - 0.5j * e.cavity.kappa
    if e.n:
        idx = np.arange(1, e.n + 1)
        m[idx, idx] = e.omegas - probe_omega - 0.5j * e.gamma
        m[0, 1:] = e.couplings
        m[1:, 0] = e.couplings
    return m


def _segments(w: DriveWaveform, t_max: float):
    """(t0, t1, sign) pieces over which the drive is constant."""
    t_off = min(w.t_off, t_max)
    cuts = {0.0, t_off, t_max}
    if w.kind == "pulse_train":
        half = w.period / 2.0
        k = 1
        while k * half < t_off - 1e-12:
            cuts.add(k * half)
            k += 1
    times = sorted(cuts)
    for t0, t1 in zip(times, times[1:]):
        if t1 - t0 < 1e-12:
            continue
        mid = 0.5 * (t0 + t1)
        if w.kind == "off" or mid >= w.t_off:
            s = 0.0
        elif w.kind == "constant":
            s = 1.0
        else:
            s = pulse_sign(mid, w.period)
        yield t0, t1, s


def _rk4_step_operators(a: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    """One-step RK4 propagator for dx/dt = A x + c as x' = R x + S c.

    For a linear system the classic RK4 update is exactly the degree-4 Taylor
    polynomial, so the step can be applied as a single matrix-vector product:
        R = I + hA + (hA)^2/2 + (hA)^3/6 + (hA)^4/24
        S = h I + h^2 A/2 + h^3 A^2/6 + h^4 A^3/24
    """
    dim = a.shape[0]
    eye = np.eye(dim, dtype=complex)
    ha = h * a
    r = eye + ha
    term = ha
    for fac in (2.0, 3.0, 4.0):
        term = term @ ha / fac
        r = r + term
    s = h * (eye + ha / 2.0 + ha @ ha / 6.0 + ha @ ha @ ha / 24.0)
    return r, s


def integrate_driven(e: Ensemble, w: DriveWaveform, t_max: float, dt: float,
                     initial: MeanFieldState | np.ndarray | None = None) -> TrajectoryResult:
    """Fixed-step RK4 integration of the driven mean-field amplitudes.

    `initial` optionally sets the starting amplitudes (<a>, <s_i>...), either
    as a MeanFieldState or a raw vector; default is everything in the ground
    state.  Samples are recorded at every step; within a segment the step is
    uniform, and because the system is linear each step is applied through
    the precomputed RK4 one-step propagator.
    """
    if dt <= 0:
        raise ValueError("integrate_driven requires dt > 0")
    if t_max <= 0:
        raise ValueError("integrate_driven requires t_max > 0")
    m = _rotating_matrix(e, w.probe_omega)
    dim = e.n + 1
    b = np.zeros(dim, dtype=complex)
    b[0] = w.amplitude_a
    if e.n:
        b[1:] = w.effective_amplitude_e
    a_gen = (-1j / HBAR) * m
    c_gen = (-1j / HBAR) * b

    if initial is None:
        x = np.zeros(dim, dtype=complex)
    elif isinstance(initial, MeanFieldState):
        x = initial.vector()
    else:
        x = np.asarray(initial, complex).copy()
    if x.shape != (dim,):
        raise ValueError(f"initial state must have shape ({dim},)")

    step_cache: dict[float, tuple[np.ndarray, np.ndarray]] = {}
    times = [0.0]
    states = [x.copy()]
    for t0, t1, s in _segments(w, t_max):
        nsub = max(1, math.ceil((t1 - t0) / dt))
        h = (t1 - t0) / nsub
        key = round(h, 15)
        if key not in step_cache:
            step_cache[key] = _rk4_step_operators(a_gen, h)
        r_op, s_op = step_cache[key]
        drive_kick = s_op @ (s * c_gen) if s != 0.0 else None
        norm_in = float(np.vdot(x, x).real)
        for k in range(nsub):
            x = r_op @ x
            if drive_kick is not None:
                x = x + drive_kick
            times.append(t0 + (k + 1) * h)
            states.append(x)
        if s == 0.0:
            norm_out = float(np.vdot(x, x).real)
            if norm_out > norm_in * (1.0 + 1e-9) + 1e-30:
                raise NumericalError(
                    "undriven population grew during integration; reduce dt")

    arr = np.array(states)
    t_arr = np.array(times)
    t_off_index = None
    if np.isfinite(w.t_off) and w.t_off <= t_max:
        t_off_index = int(np.searchsorted(t_arr, w.t_off - 1e-12))
    photon = np.abs(arr[:, 0]) ** 2
    emitter = (np.abs(arr[:, 1:]) ** 2).sum(axis=1)
    return TrajectoryResult(t_arr, photon, emitter, arr[:, 0], t_off_index)


def quench_protocol(e: Ensemble, w: DriveWaveform, t_total: float,
                    dt: float) -> TrajectoryResult:
    """Drive, switch off at w.t_off, keep evolving to t_total."""
    if not (np.isfinite(w.t_off) and w.t_off < t_total):
        raise ValueError("quench_protocol requires w.t_off < t_total")
    return integrate_driven(e, w, t_total, dt)


def steady_amplitudes(e: Ensemble, w: DriveWaveform) -> np.ndarray:
    """Algebraic fixed point of the constant-drive equations: M x = -b."""
    if w.kind != "constant":
        raise ValueError("steady_amplitudes requires a constant waveform")
    m = _rotating_matrix(e, w.probe_omega)
    b = np.zeros(e.n + 1, dtype=complex)
    b[0] = w.amplitude_a
    if e.n:
        b[1:] = w.effective_amplitude_e
    return np.linalg.solve(m, -b)


def steady_state_residual(e: Ensemble, w: DriveWaveform, x: np.ndarray) -> float:
    """|M x + b| for a candidate steady state."""
    m = _rotating_matrix(e, w.probe_omega)
    b = np.zeros(e.n + 1, dtype=complex)
    b[0] = w.amplitude_a
    if e.n:
        b[1:] = w.effective_amplitude_e
    return float(np.linalg.norm(m @ x + b))


def driven_steady_population(e: Ensemble, probe_omegas, amplitude_a: float,
                             amplitude_e: float | None = None,
                             t_converge: float = 3000.0,
                             dt: float = 2.0) -> np.ndarray:
    """|<a>|^2 after integrating a constant drive to convergence, per probe.

    All probe energies are integrated together as a batch (the generator
    differs only by a diagonal shift).  RK4 has the exact fixed point of the
    continuous system for a linear ODE, so a coarse stable step reaches the
    steady state to machine precision once transients have decayed.
    """
    probes = np.atleast_1d(np.asarray(probe_omegas, dtype=float))
    m0 = _rotating_matrix(e, 0.0)
    dim = e.n + 1
    b = np.zeros(dim, dtype=complex)
    b[0] = amplitude_a
    if e.n:
        b[1:] = amplitude_a / DIPOLE_RATIO if amplitude_e is None else amplitude_e
    pref = -1j / HBAR
    mt = m0.T.copy()

    x = np.zeros((probes.size, dim), dtype=complex)
    shift = probes[:, None]

    def rhs(state: np.ndarray) -> np.ndarray:
        return pref * (state @ mt - shift * state + b[None, :])

    nsteps = max(1, math.ceil(t_converge / dt))
    for _ in range(nsteps):
        k1 = rhs(x)
        k2 = rhs(x + 0.5 * dt * k1)
        k3 = rhs(x + 0.5 * dt * k2)
        k4 = rhs(x + dt * k3)
        x = x + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    pop = np.abs(x[:, 0]) ** 2
    return pop if np.asarray(probe_omegas).ndim else float(pop[0])


# ---------------------------------------------------------------------------
# grid scans
# ---------------------------------------------------------------------------

def _pulse_cell(args) -> float:
    ens_doc, probe, period, amp_a, amp_e, t_max, dt = args
    e = Ensemble.from_dict(ens_doc)
    w = DriveWaveform("pulse_train", amplitude_a=amp_a, amplitude_e=amp_e,
                      probe_omega=probe, period=period)
    traj = integrate_driven(e, w, t_max, dt)
    return float(traj.photon_population.max())


def _map_cells(worker, jobs: list, n_workers: int) -> list:
    if n_workers <= 1 or len(jobs) <= 1:
        return [worker(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(worker, jobs, chunksize=max(1, len(jobs) // (4 * n_workers))))


def default_workers() -> int:
    return max(1, os.cpu_count() or 1)


def pulse_grid_scan(e: Ensemble, omega_grid, period_grid, t_max: float, dt: float,
                    amplitude_a: float = DEFAULT_DRIVE_AMP,
                    amplitude_e: float | None = None,
                    n_workers: int = 1) -> ScanResult:
    """Max photon population over (probe energy, pulse period) cells."""
    omega_grid = np.atleast_1d(np.asarray(omega_grid, dtype=float))
    period_grid = np.atleast_1d(np.asarray(period_grid, dtype=float))
    if omega_grid.size == 0 or period_grid.size == 0:
        raise ValueError("pulse_grid_scan requires nonempty grids")
    doc = e.to_dict()
    jobs = [(doc, float(wp), float(T), amplitude_a, amplitude_e, t_max, dt)
            for wp in omega_grid for T in period_grid]
    vals = _map_cells(_pulse_cell, jobs, n_workers)
    field = np.array(vals).reshape(omega_grid.size, period_grid.size)
    return ScanResult(
        axes={"omega_eV": omega_grid, "period_fs": period_grid},
        values=field,
        metadata={"t_max_fs": t_max, "dt_fs": dt, "amplitude_a_eV": amplitude_a},
    )


def _quench_row(args) -> np.ndarray:
    ens_doc, probe, period, amp_a, amp_e, t_off, t_max, dt, sample_times = args
    e = Ensemble.from_dict(ens_doc)
    w = DriveWaveform("pulse_train", amplitude_a=amp_a, amplitude_e=amp_e,
                      probe_omega=probe, period=period, t_off=t_off)
    traj = quench_protocol(e, w, t_max, dt)
    return np.interp(sample_times, traj.times, traj.photon_population)


def period_time_scan(e: Ensemble, period_grid, t_max: float, dt: float,
                     probe_omega: float, t_off: float,
                     amplitude_a: float = DEFAULT_DRIVE_AMP,
                     amplitude_e: float | None = None,
                     sample_dt: float = 0.5,
                     n_workers: int = 1) -> ScanResult:
    """Photon population over (pulse period, time) at a fixed probe energy.

    Rows use drive-aligned integration steps and are resampled onto a common
    uniform time grid.
    """
    period_grid = np.atleast_1d(np.asarray(period_grid, dtype=float))
    if period_grid.size == 0:
        raise ValueError("period_time_scan requires a nonempty period grid")
    sample_times = np.arange(0.0, t_max + sample_dt / 2, sample_dt)
    doc = e.to_dict()
    jobs = [(doc, probe_omega, float(T), amplitude_a, amplitude_e, t_off, t_max,
             dt, sample_times) for T in period_grid]
    rows = _map_cells(_quench_row, jobs, n_workers)
    return ScanResult(
        axes={"period_fs": period_grid, "t_fs": sample_times},
        values=np.vstack(rows),
        metadata={"probe_omega_eV": probe_omega, "t_off_fs": t_off,
                  "dt_fs": dt, "amplitude_a_eV": amplitude_a},
    )
