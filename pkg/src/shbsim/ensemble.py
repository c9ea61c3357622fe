"""Emitter ensembles: frequency combs, q-Gaussian couplings, hole burning,
comb disorder and dense random sampling.

The ensemble is the single source of truth for every solver: it carries the
cavity parameters, the common emitter linewidth and the ordered emitter list.
All values are immutable after construction; every operation returns a new
ensemble.

Conventions: emitter positions keep their original 1-based comb index through
burning, so "remove teeth 12,13,14" is meaningful after other teeth are gone.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, NamedTuple

import numpy as np

from .errors import SingularEvaluationError


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ValueError(message)


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Emitter:
    """One two-level emitter: transition energy, cavity coupling, comb index."""

    omega: float   # eV
    g: float       # eV
    index: int     # original comb position, 1-based

    def __post_init__(self) -> None:
        _require(np.isfinite(self.omega), "Emitter.omega must be finite")
        _require(self.g >= 0, "Emitter.g must be >= 0")
        _require(self.index >= 1, "Emitter.index must be >= 1")


@dataclass(frozen=True)
class Cavity:
    omega_a: float  # resonance energy, eV
    kappa: float    # energy decay rate, eV

    def __post_init__(self) -> None:
        _require(np.isfinite(self.omega_a), "Cavity.omega_a must be finite")
        _require(self.kappa >= 0, "Cavity.kappa must be >= 0")


@dataclass(frozen=True)
class Ensemble:
    """Cavity + ordered emitter list + common emitter decay rate."""

    cavity: Cavity
    emitters: tuple[Emitter, ...]
    gamma: float    # eV, shared by all emitters

    def __post_init__(self) -> None:
        _require(self.gamma >= 0, "Ensemble.gamma must be >= 0")
        om = [e.omega for e in self.emitters]
        _require(all(a <= b for a, b in zip(om, om[1:])),
                 "Ensemble.emitters must be sorted by omega ascending")
        idx = [e.index for e in self.emitters]
        _require(len(set(idx)) == len(idx), "Ensemble emitter indices must be unique")

    @property
    def n(self) -> int:
        return len(self.emitters)

    @property
    def omegas(self) -> np.ndarray:
        return np.array([e.omega for e in self.emitters], dtype=float)

    @property
    def couplings(self) -> np.ndarray:
        return np.array([e.g for e in self.emitters], dtype=float)

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(e.index for e in self.emitters)

    # -- JSON round trip ----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "cavity": {"omega_a": self.cavity.omega_a, "kappa": self.cavity.kappa},
            "gamma": self.gamma,
            "emitters": [
                {"index": e.index, "omega": e.omega, "g": e.g} for e in self.emitters
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Ensemble":
        cav = Cavity(float(doc["cavity"]["omega_a"]), float(doc["cavity"]["kappa"]))
        ems = tuple(
            Emitter(float(d["omega"]), float(d["g"]), int(d["index"]))
            for d in doc["emitters"]
        )
        return cls(cav, ems, float(doc["gamma"]))

    def save(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")
        return path

    @classmethod
    def load(cls, path: str | Path) -> "Ensemble":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class CombSpec:
    """Equidistant frequency comb with q-Gaussian coupling envelope."""

    n: int
    omega_e: float        # comb centre, eV
    delta_omega: float    # half width, eV
    q: float
    beta: float           # eV^-2
    amplitude: float      # coupling amplitude A, eV

    def __post_init__(self) -> None:
        _require(self.n >= 1, "CombSpec.n must be >= 1")
        _require(self.delta_omega >= 0, "CombSpec.delta_omega must be >= 0")
        _require(self.beta >= 0, "CombSpec.beta must be >= 0")
        _require(self.amplitude >= 0, "CombSpec.amplitude must be >= 0")
        _require(self.q < 3, "CombSpec.q must be < 3")

    def tooth_positions(self) -> np.ndarray:
        if self.n == 1:
            return np.array([self.omega_e])
        spacing = 2.0 * self.delta_omega / (self.n - 1)
        return self.omega_e - self.delta_omega + spacing * np.arange(self.n)


@dataclass(frozen=True)
class HoleSpec:
    """Which emitters a burning pulse removes."""

    mode: str                                   # "by_index" | "by_window"
    indices: frozenset[int] = frozenset()
    windows: tuple[tuple[float, float], ...] = ()   # (centre eV, full width eV)

    def __post_init__(self) -> None:
        _require(self.mode in ("by_index", "by_window"),
                 "HoleSpec.mode must be 'by_index' or 'by_window'")
        if self.mode == "by_index":
            # empty set is legal and burns nothing
            _require(all(i >= 1 for i in self.indices),
                     "HoleSpec.indices must be >= 1")
        else:
            _require(len(self.windows) > 0, "HoleSpec.windows must be nonempty")
            _require(all(w > 0 for _, w in self.windows),
                     "HoleSpec window widths must be > 0")

    @classmethod
    def by_index(cls, indices: Iterable[int]) -> "HoleSpec":
        return cls(mode="by_index", indices=frozenset(int(i) for i in indices))

    @classmethod
    def by_window(cls, windows: Iterable[tuple[float, float]]) -> "HoleSpec":
        return cls(mode="by_window", windows=tuple((float(c), float(w)) for c, w in windows))


@dataclass(frozen=True)
class DisorderSpec:
    r: float      # dimensionless, 0 <= r < 1
    seed: int

    def __post_init__(self) -> None:
        _require(0 <= self.r < 1, "DisorderSpec.r must satisfy 0 <= r < 1")


@dataclass(frozen=True)
class RandomEnsembleSpec:
    """Dense ensemble with q-Gaussian-distributed frequencies, uniform coupling."""

    n: int
    omega_e: float
    q: float
    beta: float
    g_uniform: float
    truncation_halfwidth: float
    seed: int

    def __post_init__(self) -> None:
        _require(self.n >= 1, "RandomEnsembleSpec.n must be >= 1")
        _require(self.g_uniform >= 0, "RandomEnsembleSpec.g_uniform must be >= 0")
        _require(self.truncation_halfwidth > 0,
                 "RandomEnsembleSpec.truncation_halfwidth must be > 0")
        _require(self.q < 3, "RandomEnsembleSpec.q must be < 3")
        _require(self.beta > 0, "RandomEnsembleSpec.beta must be > 0")


class SpectralDensity(NamedTuple):
    rho: float | np.ndarray     # Omega^2 rho(omega), eV (dressed broadening)
    delta: float | np.ndarray   # Omega^2 delta(omega), eV (Lamb shift)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def eq_exponential(x, q: float):
    """q-deformed exponential [1 + (1-q)x]^(1/(1-q)).

    Continuous in q at q=1 (plain exp) and clamped to 0 where the base would
    go negative (compact-support convention for q < 1).  Works on scalars and
    arrays.
    """
    x = np.asarray(x, dtype=float)
    if abs(q - 1.0) < 1e-12:
        out = np.exp(x)
    else:
        base = 1.0 + (1.0 - q) * x
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(base > 0.0, np.exp(np.log(np.maximum(base, 1e-300)) / (1.0 - q)), 0.0)
    return float(out) if out.ndim == 0 else out


def cauchy_ppf(u, loc: float = 0.0, scale: float = 1.0):
    """Inverse CDF of the Cauchy distribution (the q=2 q-Gaussian)."""
    u = np.asarray(u, dtype=float)
    out = loc + scale * np.tan(np.pi * (u - 0.5))
    return float(out) if out.ndim == 0 else out


def build_comb(spec: CombSpec, gamma: float, cavity: Cavity) -> Ensemble:
    """Equidistant comb over [omega_e - dw, omega_e + dw] with q-Gaussian couplings."""
    om = spec.tooth_positions()
    g = spec.amplitude * eq_exponential(-spec.beta * (om - spec.omega_e) ** 2, spec.q)
    g = np.atleast_1d(g)
    emitters = tuple(
        Emitter(float(om[i]), float(g[i]), i + 1) for i in range(spec.n)
    )
    return Ensemble(cavity, emitters, gamma)


def calibrate_amplitude(n: int, omega_e: float, delta_omega: float, q: float,
                        beta: float, target_collective_coupling: float) -> float:
    """Amplitude A such that sqrt(sum g_i^2) over the full comb hits the target."""
    unit = CombSpec(n, omega_e, delta_omega, q, beta, amplitude=1.0)
    probe = build_comb(unit, gamma=0.0, cavity=Cavity(omega_e, 0.0))
    norm = collective_coupling(probe)
    _require(norm > 0, "calibration impossible: unit-amplitude comb has zero coupling")
    return target_collective_coupling / norm


def burn_holes(e: Ensemble, spec: HoleSpec) -> Ensemble:
    """Remove the selected emitters; survivors keep their original indices.

    by_window removes every emitter with omega inside the closed interval
    [centre - width/2, centre + width/2] of any window.
    """
    _require(e.n > 0, "burn_holes requires a nonempty ensemble")
    if spec.mode == "by_index":
        keep = [em for em in e.emitters if em.index not in spec.indices]
    else:
        def in_any_window(om: float) -> bool:
            return any(c - w / 2 <= om <= c + w / 2 for c, w in spec.windows)
        keep = [em for em in e.emitters if not in_any_window(em.omega)]
    if not keep:
        warnings.warn("hole burning removed every emitter", stacklevel=2)
    return replace(e, emitters=tuple(keep))


def selected_by_window(e: Ensemble, spec: HoleSpec) -> frozenset[int]:
    """Indices a by_window burn would remove (closed-interval rule)."""
    _require(spec.mode == "by_window", "selected_by_window requires a by_window spec")
    sel = set()
    for em in e.emitters:
        if any(c - w / 2 <= em.omega <= c + w / 2 for c, w in spec.windows):
            sel.add(em.index)
    return frozenset(sel)


def hole_gap_windows(comb: CombSpec, indices: Iterable[int]) -> tuple[tuple[float, float], ...]:
    """Open spectral-gap intervals left by burning contiguous index runs.

    Each window spans from the surviving tooth below the run to the surviving
    tooth above it (extended by one spacing at a comb edge).  Dark modes are
    searched inside these gaps.
    """
    teeth = np.atleast_1d(comb.tooth_positions())
    spacing = (2 * comb.delta_omega / (comb.n - 1)) if comb.n > 1 else comb.delta_omega
    burned = sorted(set(int(i) for i in indices))
    _require(all(1 <= i <= comb.n for i in burned),
             "hole indices must lie within the comb")
    windows = []
    run_start = None
    prev = None
    for i in burned + [None]:
        if run_start is None:
            run_start = i
        elif i is None or i != prev + 1:
            lo = teeth[run_start - 2] if run_start >= 2 else teeth[0] - spacing
            hi = teeth[prev] if prev <= comb.n - 1 else teeth[-1] + spacing
            windows.append((float(lo), float(hi)))
            run_start = i
        prev = i
    return tuple(windows)


def apply_disorder(e: Ensemble, spec: DisorderSpec, comb: CombSpec) -> Ensemble:
    """Shift each tooth by a seeded uniform offset and recompute its coupling.

    The offset of tooth i is alpha_i * delta_omega/(N-1) with alpha_i drawn
    uniformly from [-r, r]; draws are keyed to the original comb index, so
    burning and disordering commute.
    """
    if comb.n == 1:
        return e
    rng = np.random.default_rng(spec.seed)
    alpha = rng.uniform(-spec.r, spec.r, size=comb.n)
    scale = comb.delta_omega / (comb.n - 1)
    moved = []
    for em in e.emitters:
        om = em.omega + alpha[em.index - 1] * scale
        g = comb.amplitude * eq_exponential(-comb.beta * (om - comb.omega_e) ** 2, comb.q)
        moved.append(Emitter(float(om), float(g), em.index))
    moved.sort(key=lambda em: em.omega)
    return replace(e, emitters=tuple(moved))


def sample_random_ensemble(spec: RandomEnsembleSpec, gamma: float, cavity: Cavity) -> Ensemble:
    """Draw n frequencies from the truncated q-Gaussian density, uniform couplings.

    q=2 uses the Cauchy inverse CDF with rejection of draws outside the
    truncation window; other q use rejection sampling against a uniform
    proposal (the density is bounded by its centre value).
    """
    rng = np.random.default_rng(spec.seed)
    hw = spec.truncation_halfwidth
    accepted: list[float] = []
    while len(accepted) < spec.n:
        batch = max(spec.n - len(accepted), 1024)
        if abs(spec.q - 2.0) < 1e-12:
            x = cauchy_ppf(rng.uniform(size=batch), scale=1.0 / np.sqrt(spec.beta))
            x = x[np.abs(x) <= hw]
        else:
            x = rng.uniform(-hw, hw, size=batch)
            u = rng.uniform(size=batch)
            x = x[u <= eq_exponential(-spec.beta * x ** 2, spec.q)]
        accepted.extend(x.tolist())
    om = spec.omega_e + np.sort(np.array(accepted[: spec.n]))
    emitters = tuple(
        Emitter(float(om[i]), spec.g_uniform, i + 1) for i in range(spec.n)
    )
    return Ensemble(cavity, emitters, gamma)


def collective_coupling(e: Ensemble) -> float:
    """Effective coupling sqrt(sum g_i^2); 0 for an empty ensemble."""
    if e.n == 0:
        return 0.0
    return float(np.sqrt(np.sum(e.couplings ** 2)))


def spectral_density(e: Ensemble, omega) -> SpectralDensity:
    """Dressed-ensemble kernels at probe energy omega.

    Returns (rho, delta) where
        rho   = sum_i g_i^2 Gamma   / ((Gamma/2)^2 + D_i^2)
        delta = sum_i g_i^2 D_i     / ((Gamma/2)^2 + D_i^2)
    with D_i = omega_i - omega.  Accepts scalar or array omega; large
    ensembles are evaluated in probe-axis chunks to bound memory.
    """
    omega_arr = np.atleast_1d(np.asarray(omega, dtype=float))
    scalar = np.asarray(omega).ndim == 0
    if e.n == 0:
        rho = np.zeros_like(omega_arr)
        delta = np.zeros_like(omega_arr)
        return SpectralDensity(float(rho[0]) if scalar else rho,
                               float(delta[0]) if scalar else delta)

    om_i = e.omegas
    g2 = e.couplings ** 2
    half_g = e.gamma / 2.0
    if e.gamma == 0.0 and np.any(np.isin(om_i, omega_arr)):
        raise SingularEvaluationError(
            "spectral_density is singular: gamma=0 and probe hits an emitter line")

    rho = np.empty_like(omega_arr)
    delta = np.empty_like(omega_arr)
    chunk = max(1, int(2_000_000 // max(e.n, 1)))
    for k in range(0, omega_arr.size, chunk):
        w = omega_arr[k:k + chunk, None]
        d = om_i[None, :] - w
        denom = half_g ** 2 + d ** 2
        rho[k:k + chunk] = (g2 * e.gamma / denom).sum(axis=1)
        delta[k:k + chunk] = (g2 * d / denom).sum(axis=1)
    if scalar:
        return SpectralDensity(float(rho[0]), float(delta[0]))
    return SpectralDensity(rho, delta)
