"""shbsim: spectral-hole-burning simulator for a lossy cavity coupled to an
inhomogeneously broadened two-level emitter ensemble."""

from .constants import CONSTANTS, HBAR, PhysicalConstants
from .dynamics import (DriveWaveform, MeanFieldState, drive_value,
                       integrate_driven, period_time_scan, pulse_grid_scan,
                       quench_protocol)
from .ensemble import (Cavity, CombSpec, DisorderSpec, Emitter, Ensemble,
                       HoleSpec, RandomEnsembleSpec, apply_disorder,
                       build_comb, burn_holes, calibrate_amplitude,
                       collective_coupling, eq_exponential,
                       sample_random_ensemble, spectral_density)
from .response import find_peaks, transmission_at, transmission_sweep
from .results import Peak, ScanResult, SpectrumResult, TrajectoryResult
from .scenarios import gamma_scan, run_scenario, scenario_list
from .singlex import (EigenResult, SingleExcitationOperator, build_operator,
                      cavity_sweep_spectrum, eigensolve, evolve_fock,
                      fit_envelope_decay)

__version__ = "0.1.0"

__all__ = [
    "CONSTANTS", "HBAR", "PhysicalConstants",
    "Cavity", "CombSpec", "DisorderSpec", "Emitter", "Ensemble", "HoleSpec",
    "RandomEnsembleSpec", "apply_disorder", "build_comb", "burn_holes",
    "calibrate_amplitude", "collective_coupling", "eq_exponential",
    "sample_random_ensemble", "spectral_density",
    "find_peaks", "transmission_at", "transmission_sweep",
    "Peak", "ScanResult", "SpectrumResult", "TrajectoryResult",
    "DriveWaveform", "MeanFieldState", "drive_value", "integrate_driven",
    "period_time_scan", "pulse_grid_scan", "quench_protocol",
    "EigenResult", "SingleExcitationOperator", "build_operator",
    "cavity_sweep_spectrum", "eigensolve", "evolve_fock", "fit_envelope_decay",
    "gamma_scan", "run_scenario", "scenario_list",
    "__version__",
]
