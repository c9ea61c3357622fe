"""Experiment configuration: a single JSON document, validated strictly.

Energies are always eV and times always fs; the document must say so in its
units header.  A manifest emitted by a previous run embeds the fully resolved
config and can be fed back to `run` to reproduce the run.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .dynamics import DriveWaveform
from .ensemble import (Cavity, CombSpec, DisorderSpec, HoleSpec,
                       RandomEnsembleSpec, calibrate_amplitude)
from .errors import ConfigError

SUPPORTED_RNGS = ("pcg64", "philox")
REQUIRED_UNITS = {"energy": "eV", "time": "fs"}


def _fail(path: str, message: str) -> None:
    raise ConfigError(f"{path}: {message}")


def _get_number(doc: dict, path: str, key: str, *, minimum=None,
                maximum=None, allow_none=False):
    if key not in doc or doc[key] is None:
        if allow_none:
            return None
        _fail(f"{path}.{key}", "missing required value")
    value = doc[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(f"{path}.{key}", f"expected a number, got {value!r}")
    if minimum is not None and value < minimum:
        _fail(f"{path}.{key}", f"must be >= {minimum}, got {value}")
    if maximum is not None and value > maximum:
        _fail(f"{path}.{key}", f"must be <= {maximum}, got {value}")
    return float(value)


def deep_merge(base: dict, override: dict) -> dict:
    """Recursive dict merge; override wins, sub-dicts merge."""
    out = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = deep_merge(out[key], value)
        else:
            out[key] = value
    return out


def config_digest(doc: dict) -> str:
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated, fully resolved experiment description."""

    scenario: str
    seed: int
    rng: str
    cavity: Cavity
    gamma: float
    ensemble_kind: str                       # "comb" | "random"
    comb: CombSpec | None
    random_ensemble: RandomEnsembleSpec | None
    holes: HoleSpec | None
    disorder: DisorderSpec | None
    drive: DriveWaveform | None
    grids: dict[str, Any] = field(default_factory=dict)
    numerics: dict[str, Any] = field(default_factory=dict)
    output_dir: str = "out"
    plots: bool = True
    raw: dict = field(default_factory=dict)

    @property
    def digest(self) -> str:
        return config_digest(self.raw)


def _parse_grid(doc, path: str) -> list[float]:
    """A grid is [lo, hi, n] or an explicit list of values."""
    if not isinstance(doc, list) or not doc:
        _fail(path, "expected [lo, hi, n] or a list of values")
    if len(doc) == 3 and isinstance(doc[2], int) and doc[2] > 1:
        lo, hi, n = float(doc[0]), float(doc[1]), int(doc[2])
        if not lo < hi:
            _fail(path, "grid lower bound must be below upper bound")
        step = (hi - lo) / (n - 1)
        return [lo + step * k for k in range(n)]
    return [float(v) for v in doc]


def validate_config(doc: dict) -> ExperimentConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config: top level must be a JSON object")
    units = doc.get("units")
    if units != REQUIRED_UNITS:
        _fail("units", f'must be exactly {{"energy": "eV", "time": "fs"}}, got {units!r}')
    scenario = doc.get("scenario")
    if not isinstance(scenario, str) or not scenario:
        _fail("scenario", "missing scenario name")

    seed = doc.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        _fail("seed", f"must be a nonnegative integer, got {seed!r}")
    rng = doc.get("rng", "pcg64")
    if rng not in SUPPORTED_RNGS:
        _fail("rng", f"must be one of {SUPPORTED_RNGS}, got {rng!r}")

    cav_doc = doc.get("cavity")
    if not isinstance(cav_doc, dict):
        _fail("cavity", "missing cavity section")
    cavity = Cavity(
        omega_a=_get_number(cav_doc, "cavity", "omega_a"),
        kappa=_get_number(cav_doc, "cavity", "kappa", minimum=0.0),
    )
    gamma = _get_number(doc, "config", "gamma", minimum=0.0)

    ens_doc = doc.get("ensemble")
    if not isinstance(ens_doc, dict):
        _fail("ensemble", "missing ensemble section")
    kind = ens_doc.get("kind")
    comb = None
    random_spec = None
    if kind == "comb":
        n = int(_get_number(ens_doc, "ensemble", "n", minimum=1))
        omega_e = _get_number(ens_doc, "ensemble", "omega_e")
        delta_omega = _get_number(ens_doc, "ensemble", "delta_omega", minimum=0.0)
        q = _get_number(ens_doc, "ensemble", "q")
        beta = _get_number(ens_doc, "ensemble", "beta", minimum=0.0)
        amplitude = _get_number(ens_doc, "ensemble", "amplitude",
                                minimum=0.0, allow_none=True)
        target = _get_number(ens_doc, "ensemble", "collective_coupling_target",
                             minimum=0.0, allow_none=True)
        if amplitude is None:
            if target is None:
                _fail("ensemble", "set either amplitude or collective_coupling_target")
            amplitude = calibrate_amplitude(n, omega_e, delta_omega, q, beta, target)
        try:
            comb = CombSpec(n, omega_e, delta_omega, q, beta, amplitude)
        except ValueError as exc:
            _fail("ensemble", str(exc))
    elif kind == "random":
        try:
            random_spec = RandomEnsembleSpec(
                n=int(_get_number(ens_doc, "ensemble", "n", minimum=1)),
                omega_e=_get_number(ens_doc, "ensemble", "omega_e"),
                q=_get_number(ens_doc, "ensemble", "q"),
                beta=_get_number(ens_doc, "ensemble", "beta"),
                g_uniform=_get_number(ens_doc, "ensemble", "g_uniform", minimum=0.0),
                truncation_halfwidth=_get_number(ens_doc, "ensemble",
                                                 "truncation_halfwidth"),
                seed=seed,
            )
        except ValueError as exc:
            _fail("ensemble", str(exc))
    else:
        _fail("ensemble.kind", f"must be 'comb' or 'random', got {kind!r}")

    holes = None
    if doc.get("holes") is not None:
        h = doc["holes"]
        mode = h.get("mode")
        try:
            if mode == "by_index":
                holes = HoleSpec.by_index(h.get("indices", []))
            elif mode == "by_window":
                holes = HoleSpec.by_window(tuple(map(tuple, h.get("windows", []))))
            else:
                _fail("holes.mode", f"must be 'by_index' or 'by_window', got {mode!r}")
        except ValueError as exc:
            _fail("holes", str(exc))

    disorder = None
    if doc.get("disorder") is not None:
        d = doc["disorder"]
        try:
            disorder = DisorderSpec(r=_get_number(d, "disorder", "r", minimum=0.0),
                                    seed=seed)
        except ValueError as exc:
            _fail("disorder", str(exc))

    drive = None
    if doc.get("drive") is not None:
        dr = doc["drive"]
        try:
            drive = DriveWaveform(
                kind=dr.get("kind", "constant"),
                amplitude_a=_get_number(dr, "drive", "amplitude_a", minimum=0.0),
                amplitude_e=_get_number(dr, "drive", "amplitude_e",
                                        minimum=0.0, allow_none=True),
                probe_omega=_get_number(dr, "drive", "probe_omega"),
                period=_get_number(dr, "drive", "period", allow_none=True),
                t_off=(_get_number(dr, "drive", "t_off", allow_none=True)
                       or float("inf")),
            )
        except ValueError as exc:
            _fail("drive", str(exc))

    grids = {}
    for name, g in (doc.get("grids") or {}).items():
        grids[name] = _parse_grid(g, f"grids.{name}")

    numerics = dict(doc.get("numerics") or {})
    for key in ("dt", "t_max", "sample_dt"):
        if key in numerics:
            _get_number(numerics, "numerics", key, minimum=1e-12)
    if "sweep_points" in numerics:
        sp = numerics["sweep_points"]
        if not isinstance(sp, int) or sp < 2:
            _fail("numerics.sweep_points", f"must be an integer >= 2, got {sp!r}")

    output_dir = doc.get("output_dir", "out")
    plots = bool(doc.get("plots", True))

    return ExperimentConfig(
        scenario=scenario, seed=seed, rng=rng, cavity=cavity, gamma=gamma,
        ensemble_kind=kind, comb=comb, random_ensemble=random_spec,
        holes=holes, disorder=disorder, drive=drive, grids=grids,
        numerics=numerics, output_dir=output_dir, plots=plots, raw=doc,
    )


def load_config_document(path: str | Path) -> dict:
    """Read a config or manifest file; manifests contribute their config."""
    try:
        doc = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if isinstance(doc, dict) and "config" in doc and "scenario" in doc.get("config", {}):
        return doc["config"]
    return doc
