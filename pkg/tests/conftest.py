import numpy as np
import pytest

from shbsim import (Cavity, CombSpec, HoleSpec, build_comb, burn_holes,
                    calibrate_amplitude)

PAPER_HOLE_INDICES = frozenset({12, 13, 14, 37, 38, 39})


@pytest.fixture(scope="session")
def comb_spec():
    """The standard 50-tooth comb, amplitude calibrated to Omega = 0.102 eV."""
    amp = calibrate_amplitude(50, 2.0, 0.2, 2.0, 0.1, 0.102)
    return CombSpec(n=50, omega_e=2.0, delta_omega=0.2, q=2.0, beta=0.1,
                    amplitude=amp)


@pytest.fixture(scope="session")
def cavity():
    return Cavity(omega_a=2.0, kappa=0.1)


@pytest.fixture(scope="session")
def full_comb(comb_spec, cavity):
    return build_comb(comb_spec, gamma=0.01, cavity=cavity)


@pytest.fixture(scope="session")
def burned_comb(full_comb):
    return burn_holes(full_comb, HoleSpec.by_index(PAPER_HOLE_INDICES))


@pytest.fixture(scope="session")
def gap_windows(comb_spec):
    """Open spectral gaps left by the standard burn (between surviving teeth)."""
    from shbsim.ensemble import hole_gap_windows
    return hole_gap_windows(comb_spec, PAPER_HOLE_INDICES)


def assert_close(a, b, rtol=0.0, atol=0.0):
    np.testing.assert_allclose(a, b, rtol=rtol, atol=atol)
