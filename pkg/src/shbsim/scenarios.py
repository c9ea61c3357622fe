"""Scenario registry: one named, seeded, reproducible experiment per figure.

Every scenario composes the same pipeline: build ensemble -> burn/disorder ->
solve -> export CSV/JSON (+ rendered figures) -> manifest.  The manifest
embeds the fully resolved config, so feeding it back to `run` reproduces the
run byte-for-byte on the numeric outputs.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from . import plots
from .config import ExperimentConfig, config_digest, deep_merge, validate_config
from .constants import HBAR
from .dynamics import (DriveWaveform, drive_value, driven_steady_population,
                       integrate_driven, period_time_scan, pulse_grid_scan,
                       quench_protocol)
from .ensemble import (Ensemble, HoleSpec, apply_disorder, build_comb,
                       burn_holes, collective_coupling, hole_gap_windows,
                       sample_random_ensemble)
from .errors import FitError
from .response import hole_contrast, transmission_sweep
from .results import (ScanResult, write_json, write_peaks_json, write_scan_csv,
                      write_spectrum_csv, write_trajectory_csv)
from .singlex import (build_operator, cavity_sweep_spectrum, dark_modes,
                      dominant_frequency, eigensolve, evolve_fock,
                      fit_envelope_decay, write_eigen_csv)


class UnknownScenarioError(KeyError):
    pass


@dataclass(frozen=True)
class Scenario:
    name: str
    description: str
    defaults: dict
    runner: Callable


_UNITS = {"energy": "eV", "time": "fs"}
_COMB50 = {
    "kind": "comb", "n": 50, "omega_e": 2.0, "delta_omega": 0.2,
    "q": 2.0, "beta": 0.1, "amplitude": None,
    "collective_coupling_target": 0.102,
}
_RANDOM5000 = {
    "kind": "random", "n": 5000, "omega_e": 2.0, "q": 2.0, "beta": 0.1,
    "g_uniform": 0.002, "truncation_halfwidth": 0.5,
}
_HOLES_IDX = {"mode": "by_index", "indices": [12, 13, 14, 37, 38, 39]}
_HOLES_WIN = {"mode": "by_window", "windows": [[1.9, 0.033], [2.1, 0.033]]}
_FIT_T_START = 19.75    # fs, three bare-cavity lifetimes for kappa = 0.1 eV


def _base(scenario: str, **overrides) -> dict:
    doc = {
        "units": dict(_UNITS),
        "scenario": scenario,
        "seed": 7,
        "rng": "pcg64",
        "cavity": {"omega_a": 2.0, "kappa": 0.1},
        "gamma": 0.01,
        "ensemble": dict(_COMB50),
        "output_dir": "out",
        "plots": True,
    }
    return deep_merge(doc, overrides)


# ---------------------------------------------------------------------------
# pipeline helpers
# ---------------------------------------------------------------------------

def _base_ensemble(cfg: ExperimentConfig) -> Ensemble:
    if cfg.ensemble_kind == "comb":
        e = build_comb(cfg.comb, cfg.gamma, cfg.cavity)
        if cfg.disorder is not None:
            e = apply_disorder(e, cfg.disorder, cfg.comb)
        return e
    return sample_random_ensemble(cfg.random_ensemble, cfg.gamma, cfg.cavity)


def _burned_ensemble(cfg: ExperimentConfig, e: Ensemble) -> Ensemble:
    if cfg.holes is None:
        return e
    return burn_holes(e, cfg.holes)


def _sweep(cfg: ExperimentConfig, e: Ensemble):
    num = cfg.numerics
    lo, hi = num.get("sweep_range", [1.8, 2.2])
    return transmission_sweep(e, lo, hi, int(num.get("sweep_points", 2001)),
                              normalize=True,
                              prominence=float(num.get("prominence", 0.02)))


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


class _Out:
    """Collects written files and their hashes for the manifest."""

    def __init__(self, directory: Path):
        self.dir = directory
        self.dir.mkdir(parents=True, exist_ok=True)
        self.files: dict[str, str] = {}
        self.figures: list[str] = []

    def record(self, path: Path) -> None:
        self.files[path.name] = _sha256(path)

    def figure(self, path: Path) -> None:
        self.figures.append(path.name)


# ---------------------------------------------------------------------------
# scenario runners
# ---------------------------------------------------------------------------

def _run_fig1c(cfg: ExperimentConfig, out: _Out, n_workers: int) -> dict:
    full = _base_ensemble(cfg)
    burned = _burned_ensemble(cfg, full)
    grid = np.array(cfg.grids.get("omega_a", np.linspace(1.8, 2.2, 81).tolist()))
    hermitian = bool(cfg.raw.get("extras", {}).get("hermitian", False))
    for tag, ens in (("before", full), ("after", burned)):
        res = cavity_sweep_spectrum(ens, grid, hermitian=hermitian)
        data = np.vstack([
            np.column_stack([np.full(r.eigenvalues.size, wa),
                             r.eigenvalues.real, r.eigenvalues.imag,
                             r.photon_weights])
            for wa, r in zip(grid, res)
        ])
        path = out.dir / f"fig1c_spectrum_{tag}.csv"
        np.savetxt(path, data, fmt="%.12g", delimiter=",",
                   header="omega_a_eV,re_eV,im_eV,photon_weight", comments="")
        out.record(path)
        if cfg.plots:
            out.figure(plots.render_eigen_sweep(
                out.dir / f"fig1c_spectrum_{tag}.png", grid, res,
                title=f"Single-excitation spectrum ({tag} burning)"))
    return {"hermitian": hermitian, "n_omega_a": int(grid.size)}


def _run_fig2a(cfg: ExperimentConfig, out: _Out, n_workers: int) -> dict:
    full = _base_ensemble(cfg)
    burned = _burned_ensemble(cfg, full)
    curves = []
    summary = {}
    for tag, ens in (("before", full), ("after", burned)):
        s = _sweep(cfg, ens)
        out.record(write_spectrum_csv(out.dir / f"fig2a_transmission_{tag}.csv", s))
        out.record(write_peaks_json(out.dir / f"fig2a_peaks_{tag}.json", s))
        curves.append((f"{tag} burning", s))
        summary[f"n_peaks_{tag}"] = len(s.peaks)
    if cfg.plots:
        out.figure(plots.render_spectra(out.dir / "fig2a_transmission.png", curves))
    summary["collective_coupling_eV"] = collective_coupling(full)
    return summary


def _run_fig2b(cfg: ExperimentConfig, out: _Out, n_workers: int) -> dict:
    full = _base_ensemble(cfg)
    burned = _burned_ensemble(cfg, full)
    num = cfg.numerics
    t_max, dt = float(num.get("t_max", 400.0)), float(num.get("dt", 0.05))
    t_start = float(num.get("fit_t_start", _FIT_T_START))
    curves = []
    summary = {"fit_t_start_fs": t_start}
    for tag, ens in (("without_shb", full), ("with_shb", burned)):
        traj = evolve_fock(ens, t_max, dt)
        out.record(write_trajectory_csv(out.dir / f"fig2b_rabi_{tag}.csv", traj))
        curves.append((tag.replace("_", " "), traj))
        try:
            summary[f"envelope_rate_eV_{tag}"] = fit_envelope_decay(traj, t_start)
        except FitError as exc:
            summary[f"envelope_rate_eV_{tag}"] = None
            summary[f"envelope_fit_error_{tag}"] = str(exc)
    if cfg.plots:
        out.figure(plots.render_trajectories(out.dir / "fig2b_rabi.png", curves))
    return summary


def _symmetric_hole_indices(i_left: int, n: int) -> frozenset[int]:
    i_right = n + 1 - i_left
    idx = set()
    for c in (i_left, i_right):
        for k in (c - 1, c, c + 1):
            if 1 <= k <= n:
                idx.add(k)
    return frozenset(idx)


def _run_fig2c(cfg: ExperimentConfig, out: _Out, n_workers: int) -> dict:
    full = _base_ensemble(cfg)
    n = cfg.comb.n
    i_values = [int(v) for v in cfg.grids.get("i_left", list(range(1, n // 2 + 1)))]
    num = cfg.numerics
    lo, hi = num.get("sweep_range", [1.8, 2.2])
    points = int(num.get("sweep_points", 2001))
    rows = []
    for i_left in i_values:
        holes = HoleSpec.by_index(_symmetric_hole_indices(i_left, n))
        s = transmission_sweep(burn_holes(full, holes), lo, hi, points, normalize=True)
        rows.append(s.values)
    omegas = np.linspace(lo, hi, points)
    scan = ScanResult(
        axes={"i_left": np.array(i_values, dtype=float), "omega_eV": omegas},
        values=np.vstack(rows),
        metadata={"description": "normalized transmission vs left hole centre"},
    )
    out.record(write_scan_csv(out.dir / "fig2c_hole_position_sweep.csv", scan))
    if cfg.plots:
        out.figure(plots.render_scan_heatmap(
            out.dir / "fig2c_hole_position_sweep.png", scan,
            title="Transmission vs hole position"))
    return {"n_positions": len(i_values)}


def _run_fig2d(cfg: ExperimentConfig, out: _Out, n_workers: int) -> dict:
    full = _base_ensemble(cfg)
    pairs = cfg.raw.get("extras", {}).get("hole_pairs", [[13, 38], [19, 32]])
    num = cfg.numerics
    t_max, dt = float(num.get("t_max", 600.0)), float(num.get("dt", 0.05))
    fft_t_start = float(num.get("fft_t_start", 60.0))
    curves = []
    summary = {}
    for i_left, i_right in pairs:
        idx = sorted({i_left - 1, i_left, i_left + 1, i_right - 1, i_right, i_right + 1})
        burned = burn_holes(full, HoleSpec.by_index(idx))
        traj = evolve_fock(burned, t_max, dt)
        tag = f"{i_left}_{i_right}"
        out.record(write_trajectory_csv(out.dir / f"fig2d_rabi_holes_{tag}.csv", traj))
        curves.append((f"holes ({i_left},{i_right})", traj))

        windows = hole_gap_windows(cfg.comb, idx)
        modes = dark_modes(eigensolve(build_operator(burned)), windows)
        splitting = abs(modes[1].real - modes[0].real)
        freq = dominant_frequency(traj, fft_t_start)
        summary[f"holes_{tag}"] = {
            "dark_splitting_eV": splitting,
            "fft_frequency_per_fs": freq,
            "predicted_frequency_per_fs": splitting / (2 * np.pi * HBAR),
        }
    if cfg.plots:
        out.figure(plots.render_trajectories(
            out.dir / "fig2d_tunable_rabi.png", curves, title="Tunable Rabi oscillation"))
    return summary


def _drive_samples(w: DriveWaveform, t_max: float, n: int = 2000):
    ts = np.linspace(0.0, t_max, n)
    amps = np.array([drive_value(w, t)[0] for t in ts])
    return ts, amps


def _run_fig3a(cfg: ExperimentConfig, out: _Out, n_workers: int) -> dict:
    full = _base_ensemble(cfg)
    burned = _burned_ensemble(cfg, full)
    num = cfg.numerics
    t_max, dt = float(num.get("t_max", 1000.0)), float(num.get("dt", 0.02))
    w = cfg.drive
    curves = []
    summary = {"t_off_fs": w.t_off}
    for tag, ens in (("without_shb", full), ("with_shb", burned)):
        traj = quench_protocol(ens, w, t_max, dt)
        out.record(write_trajectory_csv(out.dir / f"fig3a_constant_quench_{tag}.csv", traj))
        curves.append((tag.replace("_", " "), traj))
        summary[f"steady_population_{tag}"] = float(
            traj.photon_population[traj.t_off_index - 1])
    if cfg.plots:
        out.figure(plots.render_drive_and_trajectory(
            out.dir / "fig3a_constant_quench.png", _drive_samples(w, t_max),
            curves, title="Constant drive quench"))
    return summary


def _run_fig3b(cfg: ExperimentConfig, out: _Out, n_workers: int) -> dict:
    ens = _burned_ensemble(cfg, _base_ensemble(cfg))
    num = cfg.numerics
    t_max, dt = float(num.get("t_max", 300.0)), float(num.get("dt", 0.02))
    w = cfg.drive
    scan = pulse_grid_scan(ens, cfg.grids["omega"], cfg.grids["period"],
                           t_max, dt, amplitude_a=w.amplitude_a,
                           amplitude_e=w.amplitude_e, n_workers=n_workers)
    out.record(write_scan_csv(out.dir / "fig3b_pulse_grid.csv", scan))
    argmax = scan.argmax
    const_pop = float(driven_steady_population(
        ens, argmax["omega_eV"], w.amplitude_a, w.amplitude_e))
    omega_coll = collective_coupling(_base_ensemble(cfg))
    summary = {
        "argmax": argmax,
        "rabi_period_fs": 2 * np.pi * HBAR / omega_coll,
        "constant_drive_population": const_pop,
        "pulsed_over_constant": argmax["value"] / const_pop,
    }
    out.record(write_json(out.dir / "fig3b_argmax.json", summary))
    if cfg.plots:
        out.figure(plots.render_scan_heatmap(
            out.dir / "fig3b_pulse_grid.png", scan,
            title="Max photon population vs (probe, period)"))
    return summary


def _run_fig3c(cfg: ExperimentConfig, out: _Out, n_workers: int) -> dict:
    full = _base_ensemble(cfg)
    burned = _burned_ensemble(cfg, full)
    num = cfg.numerics
    t_max, dt = float(num.get("t_max", 900.0)), float(num.get("dt", 0.02))
    w = cfg.drive
    curves = []
    summary = {"period_fs": w.period, "t_off_fs": w.t_off}
    for tag, ens in (("without_shb", full), ("with_shb", burned)):
        traj = quench_protocol(ens, w, t_max, dt)
        out.record(write_trajectory_csv(out.dir / f"fig3c_pulse_quench_{tag}.csv", traj))
        curves.append((tag.replace("_", " "), traj))
        summary[f"max_population_{tag}"] = float(traj.photon_population.max())
    if cfg.plots:
        out.figure(plots.render_drive_and_trajectory(
            out.dir / "fig3c_pulse_quench.png", _drive_samples(w, min(t_max, 4 * w.t_off)),
            curves, title="Pulse-train drive quench"))
    return summary


def _run_fig3d(cfg: ExperimentConfig, out: _Out, n_workers: int) -> dict:
    ens = _burned_ensemble(cfg, _base_ensemble(cfg))
    num = cfg.numerics
    t_max, dt = float(num.get("t_max", 600.0)), float(num.get("dt", 0.02))
    sample_dt = float(num.get("sample_dt", 0.5))
    w = cfg.drive
    scan = period_time_scan(ens, cfg.grids["period"], t_max, dt,
                            probe_omega=w.probe_omega, t_off=w.t_off,
                            amplitude_a=w.amplitude_a, amplitude_e=w.amplitude_e,
                            sample_dt=sample_dt, n_workers=n_workers)
    out.record(write_scan_csv(out.dir / "fig3d_period_time.csv", scan))
    if cfg.plots:
        out.figure(plots.render_scan_heatmap(
            out.dir / "fig3d_period_time.png", scan, logscale=True,
            title="Photon population vs (period, time)"))
    return {"t_off_fs": w.t_off, "n_periods": len(cfg.grids["period"])}


def _run_fig4a(cfg: ExperimentConfig, out: _Out, n_workers: int) -> dict:
    disordered = _base_ensemble(cfg)           # disorder applied inside
    burned = _burned_ensemble(cfg, disordered)
    clean = build_comb(cfg.comb, cfg.gamma, cfg.cavity)
    clean_burned = burn_holes(clean, cfg.holes)
    curves = []
    summary = {"r": cfg.disorder.r, "seed": cfg.seed}
    for tag, ens in (("disordered", burned), ("clean", clean_burned)):
        s = _sweep(cfg, ens)
        out.record(write_spectrum_csv(out.dir / f"fig4a_transmission_{tag}.csv", s))
        out.record(write_peaks_json(out.dir / f"fig4a_peaks_{tag}.json", s))
        curves.append((tag, s))
        summary[f"n_peaks_{tag}"] = len(s.peaks)
    if cfg.plots:
        out.figure(plots.render_spectra(
            out.dir / "fig4a_transmission.png", curves,
            title="SHB with comb disorder"))
    return summary


def _run_fig4b(cfg: ExperimentConfig, out: _Out, n_workers: int) -> dict:
    dense = _base_ensemble(cfg)
    burned = _burned_ensemble(cfg, dense)
    curves = []
    for tag, ens in (("before", dense), ("after", burned)):
        s = _sweep(cfg, ens)
        out.record(write_spectrum_csv(out.dir / f"fig4b_transmission_{tag}.csv", s))
        out.record(write_peaks_json(out.dir / f"fig4b_peaks_{tag}.json", s))
        curves.append((f"{tag} burning", s))
    contrast = hole_contrast(curves[1][1], (1.9, 2.1), 2.0)
    if cfg.plots:
        out.figure(plots.render_spectra(
            out.dir / "fig4b_transmission.png", curves,
            title=f"Dense random ensemble, N={cfg.random_ensemble.n}"))
    return {"n_emitters": cfg.random_ensemble.n,
            "n_removed": dense.n - burned.n,
            "hole_contrast": contrast}


def _run_fig4c(cfg: ExperimentConfig, out: _Out, n_workers: int) -> dict:
    n_values = [int(v) for v in cfg.raw.get("extras", {}).get("n_values",
                                                              [2000, 4000, 6000])]
    curves = []
    contrasts = {}
    for n in n_values:
        doc = deep_merge(cfg.raw, {"ensemble": {"n": n}})
        sub = validate_config(doc)
        burned = _burned_ensemble(sub, _base_ensemble(sub))
        s = _sweep(sub, burned)
        out.record(write_spectrum_csv(out.dir / f"fig4c_transmission_N{n}.csv", s))
        curves.append((f"N={n}", s))
        contrasts[str(n)] = hole_contrast(s, (1.9, 2.1), 2.0)
    out.record(write_json(out.dir / "fig4c_contrasts.json", contrasts))
    if cfg.plots:
        out.figure(plots.render_spectra(
            out.dir / "fig4c_transmission.png", curves,
            title="SHB contrast vs ensemble size"))
    return {"contrasts": contrasts}


def gamma_scan(cfg: ExperimentConfig, gammas,
               spectra: list | None = None) -> ScanResult:
    """Hole contrast of the burned spectrum for each emitter decay rate.

    The contrast is the mean in-hole transmission maximum over the value at
    the ensemble centre.  Pass a list as `spectra` to also collect the
    (gamma, SpectrumResult) pairs.
    """
    gammas = [float(g) for g in gammas]
    if not gammas:
        raise ValueError("gamma_scan requires a nonempty gamma list")
    hole_centers = tuple(c for c, _ in cfg.holes.windows) if (
        cfg.holes and cfg.holes.mode == "by_window") else (1.9, 2.1)
    contrasts = []
    for g in gammas:
        sub = validate_config(deep_merge(cfg.raw, {"gamma": g}))
        s = _sweep(sub, _burned_ensemble(sub, _base_ensemble(sub)))
        if spectra is not None:
            spectra.append((g, s))
        contrasts.append(hole_contrast(s, hole_centers, cfg.cavity.omega_a))
    return ScanResult(axes={"gamma_eV": np.array(gammas)},
                      values=np.array(contrasts),
                      metadata={"observable": "hole_contrast"})


def _run_fig4d(cfg: ExperimentConfig, out: _Out, n_workers: int) -> dict:
    gammas = cfg.raw.get("extras", {}).get("gamma_values", [0.01, 0.03, 0.05])
    spectra: list = []
    scan = gamma_scan(cfg, gammas, spectra)
    for g, s in spectra:
        out.record(write_spectrum_csv(out.dir / f"fig4d_transmission_gamma{g:g}.csv", s))
    out.record(write_scan_csv(out.dir / "fig4d_contrast_vs_gamma.csv", scan))
    if cfg.plots:
        out.figure(plots.render_spectra(
            out.dir / "fig4d_transmission.png",
            [(f"Gamma={g:g} eV", s) for g, s in spectra],
            title="SHB contrast vs emitter decay rate"))
    return {"contrasts": {f"{g:g}": float(v)
                          for g, v in zip(scan.axes["gamma_eV"], scan.values)}}


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

REGISTRY: dict[str, Scenario] = {}


def _register(name: str, description: str, defaults: dict, runner) -> None:
    REGISTRY[name] = Scenario(name, description, defaults, runner)


_register("fig1c", "single-excitation spectra vs cavity energy, before/after burning",
          _base("fig1c", holes=_HOLES_IDX,
                grids={"omega_a": [1.8, 2.2, 81]}), _run_fig1c)
_register("fig2a", "transmission spectrum with and without spectral hole burning",
          _base("fig2a", holes=_HOLES_IDX,
                numerics={"sweep_points": 2001, "sweep_range": [1.8, 2.2],
                          "prominence": 0.02}), _run_fig2a)
_register("fig2b", "free Rabi oscillation from a one-photon Fock state",
          _base("fig2b", holes=_HOLES_IDX,
                numerics={"dt": 0.05, "t_max": 400.0,
                          "fit_t_start": _FIT_T_START}), _run_fig2b)
_register("fig2c", "burned transmission vs position of the left hole",
          _base("fig2c", numerics={"sweep_points": 2001, "sweep_range": [1.8, 2.2]},
                grids={"i_left": [float(i) for i in range(1, 26)]}), _run_fig2c)
_register("fig2d", "tunable Rabi oscillation for two hole-pair placements",
          _base("fig2d", extras={"hole_pairs": [[13, 38], [19, 32]]},
                numerics={"dt": 0.05, "t_max": 600.0, "fft_t_start": 60.0}),
          _run_fig2d)
_register("fig3a", "quench under a constant drive, before/after burning",
          _base("fig3a", holes=_HOLES_IDX,
                drive={"kind": "constant", "amplitude_a": 1e-3,
                       "probe_omega": 2.0, "t_off": 600.0},
                numerics={"dt": 0.02, "t_max": 1000.0}), _run_fig3a)
_register("fig3b", "pulse grid scan: max population over (probe, period)",
          _base("fig3b", holes=_HOLES_IDX,
                drive={"kind": "pulse_train", "amplitude_a": 1e-3,
                       "probe_omega": 2.0, "period": 42.0},
                grids={"omega": [1.9, 2.1, 21], "period": [30.0, 55.0, 21]},
                numerics={"dt": 0.02, "t_max": 300.0}), _run_fig3b)
_register("fig3c", "quench under the optimal pulse train, before/after burning",
          _base("fig3c", holes=_HOLES_IDX,
                drive={"kind": "pulse_train", "amplitude_a": 1e-3,
                       "probe_omega": 2.0, "period": 42.0, "t_off": 420.0},
                numerics={"dt": 0.02, "t_max": 900.0}), _run_fig3c)
_register("fig3d", "pulse quench vs (period, time) at resonant probe",
          _base("fig3d", holes=_HOLES_IDX,
                drive={"kind": "pulse_train", "amplitude_a": 1e-3,
                       "probe_omega": 2.0, "period": 42.0, "t_off": 300.0},
                grids={"period": [35.0, 45.0, 11]},
                numerics={"dt": 0.02, "t_max": 600.0, "sample_dt": 0.5}),
          _run_fig3d)
_register("fig4a", "SHB robustness against comb disorder",
          _base("fig4a", holes=_HOLES_IDX, disorder={"r": 0.5},
                numerics={"sweep_points": 2001, "sweep_range": [1.8, 2.2]}),
          _run_fig4a)
_register("fig4b", "SHB in a dense random ensemble (window burning)",
          _base("fig4b", ensemble=dict(_RANDOM5000), holes=_HOLES_WIN,
                numerics={"sweep_points": 2001, "sweep_range": [1.8, 2.2]}),
          _run_fig4b)
_register("fig4c", "dense-ensemble SHB contrast for N = 2000, 4000, 6000",
          _base("fig4c", ensemble=dict(_RANDOM5000), holes=_HOLES_WIN,
                extras={"n_values": [2000, 4000, 6000]},
                numerics={"sweep_points": 2001, "sweep_range": [1.8, 2.2]}),
          _run_fig4c)
_register("fig4d", "dense-ensemble SHB contrast for Gamma = 0.01, 0.03, 0.05 eV",
          _base("fig4d", ensemble=dict(_RANDOM5000), holes=_HOLES_WIN,
                extras={"gamma_values": [0.01, 0.03, 0.05]},
                numerics={"sweep_points": 2001, "sweep_range": [1.8, 2.2]}),
          _run_fig4d)


def scenario_list() -> list[dict]:
    """Names, one-line descriptions and default configs of all scenarios."""
    return [
        {"name": s.name, "description": s.description, "defaults": s.defaults}
        for s in REGISTRY.values()
    ]


def scenario_defaults(name: str) -> dict:
    if name not in REGISTRY:
        raise UnknownScenarioError(name)
    return REGISTRY[name].defaults


def resolve_config(doc: dict) -> ExperimentConfig:
    """Merge a (partial) user document over its scenario defaults and validate."""
    name = doc.get("scenario")
    if not isinstance(name, str) or name not in REGISTRY:
        raise UnknownScenarioError(str(name))
    merged = deep_merge(REGISTRY[name].defaults, doc)
    return validate_config(merged)


def run_scenario(cfg: ExperimentConfig, out_dir: str | Path | None = None,
                 n_workers: int = 1) -> dict:
    """Execute a scenario and write its outputs plus a manifest."""
    if cfg.scenario not in REGISTRY:
        raise UnknownScenarioError(cfg.scenario)
    scenario = REGISTRY[cfg.scenario]
    out = _Out(Path(out_dir if out_dir is not None else cfg.output_dir))
    summary = scenario.runner(cfg, out, n_workers)
    manifest = {
        "scenario": cfg.scenario,
        "seed": cfg.seed,
        "config": cfg.raw,
        "config_digest": cfg.digest,
        "outputs": out.files,
        "figures": sorted(out.figures),
        "summary": summary,
    }
    write_json(out.dir / "manifest.json", manifest)
    return manifest
