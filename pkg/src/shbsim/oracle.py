"""Ground-truth dense Lindblad solver at desk scale.

The density matrix of (cavity Fock space truncated at `photon_cutoff`) x
(N two-level emitters) is column-stacked into a vector |rho>>, turning the
master equation

    d rho/dt = (1/hbar) { i[rho, H] + (kappa/2) D[a] rho
                          + (Gamma/2) sum_i D[s_i] rho },
    D[o] rho = 2 o rho o' - o'o rho - rho o'o

into d|rho>>/dt = L |rho>>.  Under column stacking vec(A X B) =
(B^T kron A) vec(X), which gives

    L = (1/hbar) [ i (conj(H_eff) kron I - I kron H_eff)
                   + kappa conj(a) kron a
                   + Gamma sum_i conj(s_i) kron s_i ]

with H_eff = H - i(kappa/2) a'a - i(Gamma/2) sum_i s_i's_i.  The jump-term
conjugations follow from the stacking convention (they are invisible here
because the ladder operators are real); every assembled L is certified by
the trace-preservation identity vec(I)^T L = 0.

Basis order: photon index varies slowest, then emitter 1, ..., emitter N
(each qubit ordered |g>, |e>).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np
import scipy.linalg

from .constants import HBAR
from .dynamics import DriveWaveform, drive_value
from .ensemble import Ensemble
from .errors import NumericalError

_DIM_SQ_CAP = 4096
_TRACE_TOL = 1e-8


@dataclass(frozen=True)
class DenseOperatorSpace:
    """Truncated product space for the dense solver."""

    n_emitters: int
    photon_cutoff: int

    def __post_init__(self) -> None:
        if not 0 <= self.n_emitters <= 4:
            raise ValueError("DenseOperatorSpace.n_emitters must be in [0, 4]")
        if self.photon_cutoff < 1:
            raise ValueError("DenseOperatorSpace.photon_cutoff must be >= 1")
        if self.dim ** 2 > _DIM_SQ_CAP:
            raise ValueError(
                f"operator space too large: dim^2 = {self.dim ** 2} exceeds {_DIM_SQ_CAP}")

    @property
    def dim(self) -> int:
        return (self.photon_cutoff + 1) * 2 ** self.n_emitters


def _destroy(cutoff: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, cutoff + 1)), 1).astype(complex)


_SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)   # |g><e|


def photon_annihilator(space: DenseOperatorSpace) -> np.ndarray:
    ops = [_destroy(space.photon_cutoff)] + [np.eye(2, dtype=complex)] * space.n_emitters
    return reduce(np.kron, ops)


def emitter_lowering(space: DenseOperatorSpace, i: int) -> np.ndarray:
    """sigma_i^- for emitter i (0-based position in the ensemble)."""
    if not 0 <= i < space.n_emitters:
        raise ValueError("emitter index out of range")
    ops = [np.eye(space.photon_cutoff + 1, dtype=complex)]
    ops += [_SIGMA_MINUS if j == i else np.eye(2, dtype=complex)
            for j in range(space.n_emitters)]
    return reduce(np.kron, ops)


def number_operator(space: DenseOperatorSpace) -> np.ndarray:
    a = photon_annihilator(space)
    return a.conj().T @ a


def vec(m: np.ndarray) -> np.ndarray:
    """Column-stack a matrix (concatenate its columns)."""
    return m.reshape(-1, order="F")


def unvec(v: np.ndarray) -> np.ndarray:
    d = int(round(np.sqrt(v.size)))
    return v.reshape(d, d, order="F")


@dataclass(frozen=True)
class VectorizedState:
    """Column-stacked density matrix."""

    rho_vec: np.ndarray

    @property
    def dim(self) -> int:
        return int(round(np.sqrt(self.rho_vec.size)))

    def matrix(self) -> np.ndarray:
        return unvec(self.rho_vec)

    def trace(self) -> complex:
        return complex(np.trace(self.matrix()))

    def validate(self, tol: float = _TRACE_TOL) -> None:
        rho = self.matrix()
        if np.max(np.abs(rho - rho.conj().T)) > tol:
            raise NumericalError("state is not Hermitian within tolerance")
        if abs(np.trace(rho) - 1.0) > tol:
            raise NumericalError("state trace deviates from 1")
        if float(np.linalg.eigvalsh((rho + rho.conj().T) / 2).min()) < -tol:
            raise NumericalError("state has a negative eigenvalue beyond tolerance")

    @classmethod
    def from_density_matrix(cls, rho: np.ndarray) -> "VectorizedState":
        return cls(vec(np.asarray(rho, complex)))

    @classmethod
    def ground(cls, space: DenseOperatorSpace) -> "VectorizedState":
        rho = np.zeros((space.dim, space.dim), dtype=complex)
        rho[0, 0] = 1.0
        return cls.from_density_matrix(rho)

    @classmethod
    def fock_photon(cls, space: DenseOperatorSpace, n: int) -> "VectorizedState":
        """Photon Fock |n> with all emitters in the ground state."""
        if not 0 <= n <= space.photon_cutoff:
            raise ValueError("Fock occupation exceeds the photon cutoff")
        psi = np.zeros(space.dim, dtype=complex)
        psi[n * 2 ** space.n_emitters] = 1.0
        return cls.from_density_matrix(np.outer(psi, psi.conj()))


def build_hamiltonian(e: Ensemble, space: DenseOperatorSpace,
                      drive_a: float = 0.0, drive_e: float = 0.0,
                      probe_omega: float = 0.0) -> np.ndarray:
    """Rotating-frame Hamiltonian (eV) with optional instantaneous drive."""
    if e.n > space.n_emitters:
        raise ValueError("ensemble does not fit in the operator space")
    a = photon_annihilator(space)
    n_op = a.conj().T @ a
    h = (e.cavity.omega_a - probe_omega) * n_op
    s_sum = np.zeros_like(a)
    for i, em in enumerate(e.emitters):
        s = emitter_lowering(space, i)
        h = h + (em.omega - probe_omega) * (s.conj().T @ s)
        h = h + em.g * (s.conj().T @ a + a.conj().T @ s)
        s_sum = s_sum + s
    if drive_a:
        h = h + drive_a * (a + a.conj().T)
    if drive_e:
        h = h + drive_e * (s_sum + s_sum.conj().T)
    return h


def build_liouvillian(e: Ensemble, space: DenseOperatorSpace,
                      w: DriveWaveform | None = None,
                      t: float = 0.0) -> np.ndarray:
    """Dense Liouvillian (1/fs) at time t for the given drive waveform."""
    if w is None:
        drive_a = drive_e = 0.0
        probe = 0.0
    else:
        drive_a, drive_e = drive_value(w, t)
        probe = w.probe_omega
    h = build_hamiltonian(e, space, drive_a, drive_e, probe)
    a = photon_annihilator(space)
    ident = np.eye(space.dim, dtype=complex)

    h_eff = h - 0.5j * e.cavity.kappa * (a.conj().T @ a)
    jump = e.cavity.kappa * np.kron(a.conj(), a)
    for i in range(e.n):
        s = emitter_lowering(space, i)
        h_eff = h_eff - 0.5j * e.gamma * (s.conj().T @ s)
        jump = jump + e.gamma * np.kron(s.conj(), s)

    liouv = 1j * (np.kron(h_eff.conj(), ident) - np.kron(ident, h_eff)) + jump
    return liouv / HBAR


def trace_preservation_defect(liouv: np.ndarray) -> float:
    """Norm of the trace functional acting on L; 0 for a valid Lindbladian."""
    d = int(round(np.sqrt(liouv.shape[0])))
    tvec = vec(np.eye(d, dtype=complex))
    return float(np.linalg.norm(tvec @ liouv))


def propagate(liouvillian, rho0: VectorizedState, t_max: float, dt: float,
              method: str = "rk4", store_every: int = 1,
              trace_tol: float = _TRACE_TOL) -> tuple[np.ndarray, list[VectorizedState]]:
    """Propagate d|rho>>/dt = L|rho>>.

    `liouvillian` is a constant matrix or a callable t -> matrix (re-evaluated
    within every step for time-dependent drives).  "rk4" is fixed-step
    4th order; "expm" applies the exact exponential per step and requires a
    constant L.  Hermiticity is restored after every step and the trace is
    required to stay within `trace_tol` of 1.
    """
    if dt <= 0:
        raise ValueError("propagate requires dt > 0")
    time_dependent = callable(liouvillian)
    if method == "expm" and time_dependent:
        raise ValueError("expm propagation requires a time-independent Liouvillian")

    nsteps = int(round(t_max / dt))
    times = [0.0]
    states = [rho0]
    x = rho0.rho_vec.astype(complex).copy()

    if method == "expm":
        prop = scipy.linalg.expm(np.asarray(liouvillian) * dt)
    elif method != "rk4":
        raise ValueError("method must be 'rk4' or 'expm'")

    for k in range(nsteps):
        t = k * dt
        if method == "expm":
            x = prop @ x
        else:
            l0 = liouvillian(t) if time_dependent else liouvillian
            lh = liouvillian(t + dt / 2) if time_dependent else l0
            l1 = liouvillian(t + dt) if time_dependent else l0
            k1 = l0 @ x
            k2 = lh @ (x + 0.5 * dt * k1)
            k3 = lh @ (x + 0.5 * dt * k2)
            k4 = l1 @ (x + dt * k3)
            x = x + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        rho = unvec(x)
        rho = 0.5 * (rho + rho.conj().T)
        tr = float(np.trace(rho).real)
        if abs(tr - 1.0) > trace_tol:
            raise NumericalError(
                f"trace drifted to {tr} at t={t + dt:.3f} fs; reduce dt")
        x = vec(rho)
        if (k + 1) % store_every == 0 or k == nsteps - 1:
            times.append((k + 1) * dt)
            states.append(VectorizedState(x.copy()))
    return np.array(times), states


def expectation(obs: np.ndarray, rho: VectorizedState) -> complex:
    """tr(O rho) via the Choi inner product <<O'|rho>>."""
    obs = np.asarray(obs, complex)
    if obs.shape != (rho.dim, rho.dim):
        raise ValueError("observable dimension does not match the state")
    return complex(np.vdot(vec(obs.conj().T), rho.rho_vec))


@dataclass(frozen=True)
class SteadyStateResult:
    state: VectorizedState
    residual: float
    degenerate: bool


def steady_state(liouv: np.ndarray, degeneracy_tol: float = 1e-10) -> SteadyStateResult:
    """Steady density matrix as the trace-one null vector of L.

    The null direction comes from the SVD; near-degenerate null spaces are
    flagged.  The returned state is re-hermitized and trace-normalized, and
    the residual |L|rho>>| is reported.
    """
    liouv = np.asarray(liouv, complex)
    _, svals, vh = np.linalg.svd(liouv)
    null_count = int(np.sum(svals < degeneracy_tol * svals[0]))
    v = vh[-1].conj()
    rho = unvec(v)
    rho = 0.5 * (rho + rho.conj().T)
    tr = np.trace(rho)
    if abs(tr) < 1e-14:
        raise NumericalError("steady-state candidate is traceless")
    rho = rho / tr
    x = vec(rho)
    residual = float(np.linalg.norm(liouv @ x) / np.linalg.norm(x))
    return SteadyStateResult(VectorizedState(x), residual, null_count > 1)
