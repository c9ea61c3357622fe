import numpy as np
import pytest

from shbsim import (Cavity, CombSpec, Emitter, Ensemble, HoleSpec,
                    build_comb, build_operator, burn_holes,
                    cavity_sweep_spectrum, eigensolve, evolve_fock,
                    fit_envelope_decay)
from shbsim.constants import HBAR
from shbsim.errors import FitError, NumericalError
from shbsim.results import TrajectoryResult
from shbsim.singlex import (SingleExcitationOperator, dark_modes,
                            dominant_frequency)

from conftest import PAPER_HOLE_INDICES


def resonant_jc(g=0.05, kappa=0.0, gamma=0.0):
    return Ensemble(Cavity(2.0, kappa), (Emitter(2.0, g, 1),), gamma)


def random_ensemble(seed, n, kappa=0.1, gamma=0.01):
    rng = np.random.default_rng(seed)
    omegas = np.sort(rng.uniform(1.92, 2.08, n))
    gs = rng.uniform(0.01, 0.05, n)
    ems = tuple(Emitter(float(o), float(g), i + 1)
                for i, (o, g) in enumerate(zip(omegas, gs)))
    return Ensemble(Cavity(2.0, kappa), ems, gamma)


class TestBuildOperator:
    def test_resonant_jc_doublet(self):
        op = build_operator(resonant_jc())
        lam = np.linalg.eigvalsh(op.matrix())
        np.testing.assert_allclose(np.sort(lam), [1.95, 2.05], rtol=1e-14)

    def test_empty_ensemble_single_entry(self):
        op = build_operator(Ensemble(Cavity(2.0, 0.1), (), 0.01))
        assert op.dim == 1
        assert op.diag[0] == pytest.approx(2.0 - 0.05j)

    def test_matches_elementwise_dense_construction(self, burned_comb):
        op = build_operator(burned_comb)
        assert op.dim == 45
        dense = np.zeros((45, 45), dtype=complex)
        dense[0, 0] = 2.0 - 0.05j
        for k, em in enumerate(burned_comb.emitters):
            dense[k + 1, k + 1] = em.omega - 0.005j
            dense[0, k + 1] = em.g
            dense[k + 1, 0] = em.g
        np.testing.assert_array_equal(op.matrix(), dense)

    def test_arrowhead_structure(self, burned_comb):
        m = build_operator(burned_comb).matrix()
        off = m.copy()
        np.fill_diagonal(off, 0)
        off[0, :] = 0
        off[:, 0] = 0
        assert np.all(off == 0)


class TestEigensolve:
    def test_resonant_jc_eigenpairs(self):
        res = eigensolve(build_operator(resonant_jc()))
        np.testing.assert_allclose(res.eigenvalues, [1.95, 2.05], atol=1e-12)
        np.testing.assert_allclose(res.photon_weights, [0.5, 0.5], atol=1e-12)

    @pytest.mark.parametrize("seed,n", [(0, 5), (1, 20), (2, 50), (3, 7)])
    def test_secular_matches_dense(self, seed, n):
        op = build_operator(random_ensemble(seed, n))
        sec = eigensolve(op, method="secular")
        den = eigensolve(op, method="dense")
        np.testing.assert_allclose(sec.eigenvalues, den.eigenvalues, atol=1e-9)
        np.testing.assert_allclose(sec.photon_weights, den.photon_weights, atol=1e-9)

    def test_burned_comb_secular_matches_dense(self, burned_comb):
        op = build_operator(burned_comb)
        sec = eigensolve(op, method="secular")
        den = eigensolve(op, method="dense")
        np.testing.assert_allclose(sec.eigenvalues, den.eigenvalues, atol=1e-9)

    def test_zero_coupling_deflation(self):
        ems = (Emitter(1.95, 0.0, 1), Emitter(2.0, 0.04, 2), Emitter(2.05, 0.0, 3))
        e = Ensemble(Cavity(2.0, 0.1), ems, 0.01)
        res = eigensolve(build_operator(e))
        # deflated poles appear exactly, with zero photon weight
        for pole in (1.95 - 0.005j, 2.05 - 0.005j):
            k = int(np.argmin(np.abs(res.eigenvalues - pole)))
            assert res.eigenvalues[k] == pole
            assert res.photon_weights[k] == 0.0

    def test_auto_falls_back_to_dense_when_secular_fails(self, full_comb):
        # cavity shifted into the comb interior: two roots share an interval
        shifted = Ensemble(Cavity(1.9, 0.1), full_comb.emitters, full_comb.gamma)
        op = build_operator(shifted)
        with pytest.raises(NumericalError):
            eigensolve(op, method="secular")
        auto = eigensolve(op, method="auto")
        den = eigensolve(op, method="dense")
        np.testing.assert_allclose(auto.eigenvalues, den.eigenvalues, atol=1e-12)

    def test_eigenvalue_set_invariant_under_emitter_permutation(self, burned_comb):
        op = build_operator(burned_comb)
        rng = np.random.default_rng(0)
        perm = rng.permutation(op.dim - 1)
        shuffled = SingleExcitationOperator(
            np.concatenate(([op.diag[0]], op.diag[1:][perm])), op.arm[perm])
        a = eigensolve(op).eigenvalues
        b = eigensolve(shuffled).eigenvalues
        np.testing.assert_allclose(a, b, atol=1e-10)

    def test_hermitian_weights_sum_to_one(self, burned_comb):
        herm = Ensemble(Cavity(2.0, 0.0), burned_comb.emitters, 0.0)
        res = eigensolve(build_operator(herm))
        assert np.all(np.abs(res.eigenvalues.imag) < 1e-12)
        assert res.photon_weights.sum() == pytest.approx(1.0, abs=1e-10)

    def test_burned_comb_dark_pair(self, burned_comb, gap_windows):
        res = eigensolve(build_operator(burned_comb))
        for lo, hi in gap_windows:
            sel = res.in_window(lo, hi)
            assert sel.eigenvalues.size == 2
        modes = dark_modes(res, gap_windows)
        rates = [2 * abs(m.imag) for m in modes]
        # far below the cavity linewidth, at most modestly above Gamma
        assert all(0.01 < r < 0.02 for r in rates)
        assert all(r < 0.1 / 5 for r in rates)


class TestCavitySweep:
    def test_single_emitter_anticrossing_minimum_gap(self):
        e = resonant_jc(g=0.05)
        grid = np.linspace(1.9, 2.1, 41)     # includes resonance at 2.0
        results = cavity_sweep_spectrum(e, grid, hermitian=True)
        gaps = [abs(r.eigenvalues[1] - r.eigenvalues[0]) for r in results]
        k = int(np.argmin(gaps))
        assert grid[k] == pytest.approx(2.0, abs=1e-12)
        assert gaps[k] == pytest.approx(2 * 0.05, rel=1e-10)

    def test_burned_sweep_keeps_two_in_gap_branches(self, burned_comb, gap_windows):
        grid = np.linspace(1.8, 2.2, 9)
        for res in cavity_sweep_spectrum(burned_comb, grid):
            for lo, hi in gap_windows:
                assert res.in_window(lo, hi).eigenvalues.size >= 1

    def test_unburned_comb_no_photonic_mode_in_hole_regions(self, full_comb,
                                                            gap_windows):
        res = eigensolve(build_operator(full_comb))
        for lo, hi in gap_windows:
            sel = res.in_window(lo, hi)
            assert np.all(sel.photon_weights < 0.1)

    def test_empty_grid_rejected(self, burned_comb):
        with pytest.raises(ValueError, match="nonempty"):
            cavity_sweep_spectrum(burned_comb, [])


class TestEvolveFock:
    def test_empty_ensemble_bare_cavity_decay(self):
        e = Ensemble(Cavity(2.0, 0.1), (), 0.01)
        traj = evolve_fock(e, 50.0, 0.05)
        expected = np.exp(-0.1 * traj.times / HBAR)
        np.testing.assert_allclose(traj.photon_population, expected, atol=1e-12)

    def test_resonant_jc_rabi_flopping(self):
        traj = evolve_fock(resonant_jc(g=0.05), 100.0, 0.05)
        expected = np.cos(0.05 * traj.times / HBAR) ** 2
        np.testing.assert_allclose(traj.photon_population, expected, atol=1e-10)

    def test_spectral_agrees_with_step_halved_rk4(self, burned_comb):
        spectral = evolve_fock(burned_comb, 50.0, 0.01)
        direct = evolve_fock(burned_comb, 50.0, 0.005, method="rk4")
        np.testing.assert_allclose(spectral.photon_population,
                                   direct.photon_population[::2], atol=1e-8)

    def test_hermitian_population_conserved(self, burned_comb):
        herm = Ensemble(Cavity(2.0, 0.0), burned_comb.emitters, 0.0)
        traj = evolve_fock(herm, 200.0, 0.1)
        total = traj.photon_population + traj.emitter_population
        np.testing.assert_allclose(total, 1.0, atol=1e-10)

    def test_dissipative_total_population_monotone(self, burned_comb):
        traj = evolve_fock(burned_comb, 200.0, 0.05)
        total = traj.photon_population + traj.emitter_population
        assert np.all(np.diff(total) <= 1e-10)

    def test_validation(self, burned_comb):
        with pytest.raises(ValueError):
            evolve_fock(burned_comb, 10.0, -0.1)
        with pytest.raises(ValueError):
            evolve_fock(burned_comb, 0.01, 0.05)


class TestEnvelopeFit:
    def test_recovers_decay_of_damped_rabi_signal(self):
        kappa, g = 0.05, 0.08
        times = np.arange(0.0, 400.0, 0.05)
        photon = np.exp(-kappa * times / HBAR) * np.cos(g * times / HBAR) ** 2
        traj = TrajectoryResult(times, photon, 1 - photon,
                                np.sqrt(photon).astype(complex))
        rate = fit_envelope_decay(traj, 10.0)
        assert rate == pytest.approx(kappa, rel=0.02)

    def test_too_few_maxima_raises(self):
        times = np.arange(0.0, 10.0, 0.05)
        photon = np.exp(-times)
        traj = TrajectoryResult(times, photon, 1 - photon,
                                np.sqrt(photon).astype(complex))
        with pytest.raises(FitError, match="maxima"):
            fit_envelope_decay(traj, 0.0)

    def test_burned_long_window_rate_close_to_dark_decay(self, burned_comb,
                                                         gap_windows):
        # independent estimates of the same linewidth: envelope slope of the
        # long-lived oscillation vs 2|Im lambda| of the in-gap mode
        traj = evolve_fock(burned_comb, 400.0, 0.05)
        rate = fit_envelope_decay(traj, 19.75)
        modes = dark_modes(eigensolve(build_operator(burned_comb)), gap_windows)
        gamma_dark = 2 * abs(modes[0].imag)
        assert rate == pytest.approx(gamma_dark, rel=0.30)


class TestDominantFrequency:
    def test_pure_tone_recovered(self):
        times = np.arange(0.0, 500.0, 0.05)
        f0 = 0.043
        photon = np.exp(-0.01 * times / HBAR) * (1 + np.cos(2 * np.pi * f0 * times)) / 2
        traj = TrajectoryResult(times, photon, 1 - photon,
                                np.sqrt(photon).astype(complex))
        assert dominant_frequency(traj, 0.0) == pytest.approx(f0, rel=0.01)

    def test_dc_component_suppressed(self):
        times = np.arange(0.0, 500.0, 0.05)
        photon = np.exp(-0.02 * times / HBAR) * (1 + 0.05 * np.cos(2 * np.pi * 0.03 * times))
        traj = TrajectoryResult(times, photon, 1 - photon,
                                np.sqrt(photon).astype(complex))
        assert dominant_frequency(traj, 0.0) == pytest.approx(0.03, rel=0.02)
