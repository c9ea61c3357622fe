import json
import math

import numpy as np
import pytest

from shbsim import (Cavity, CombSpec, DisorderSpec, Emitter, Ensemble,
                    HoleSpec, RandomEnsembleSpec, apply_disorder, build_comb,
                    burn_holes, collective_coupling, eq_exponential,
                    sample_random_ensemble, spectral_density)
from shbsim.ensemble import (calibrate_amplitude, cauchy_ppf,
                             hole_gap_windows, selected_by_window)
from shbsim.errors import SingularEvaluationError

from conftest import PAPER_HOLE_INDICES


class TestEqExponential:
    def test_zero_argument_is_one_for_all_q(self):
        for q in (-1.0, 0.0, 0.5, 1.0, 2.0, 2.9):
            assert eq_exponential(0.0, q) == pytest.approx(1.0)

    def test_q2_is_lorentzian_kernel(self):
        # e_2(x) = 1/(1-x)
        assert eq_exponential(-0.004, 2.0) == pytest.approx(1.0 / 1.004, rel=1e-12)

    def test_q1_is_plain_exponential(self):
        assert eq_exponential(-1.0, 1.0) == pytest.approx(math.exp(-1.0), rel=1e-12)

    def test_continuous_in_q_near_one(self):
        for x in (-2.0, -0.3, 0.4):
            for q in (1.0 - 1e-9, 1.0 + 1e-9):
                assert eq_exponential(x, q) == pytest.approx(math.exp(x), rel=1e-6)

    def test_compact_support_clamp_below_cutoff(self):
        # q<1: base 1+(1-q)x goes negative for x < -1/(1-q)
        assert eq_exponential(-3.0, 0.5) == 0.0
        assert eq_exponential(-1.9, 0.5) > 0.0

    def test_array_input(self):
        x = np.array([-0.5, 0.0, -2.0])
        out = eq_exponential(x, 2.0)
        np.testing.assert_allclose(out, 1.0 / (1.0 - x))

    def test_monotone_along_comb(self, full_comb, comb_spec):
        # couplings peak at the tooth nearest the comb centre
        g = full_comb.couplings
        d2 = (full_comb.omegas - comb_spec.omega_e) ** 2
        order = np.argsort(d2)
        assert np.all(np.diff(g[order]) <= 1e-15)


class TestBuildComb:
    def test_standard_comb_endpoints_and_spacing(self, full_comb):
        om = full_comb.omegas
        assert om[0] == pytest.approx(1.8, abs=1e-14)
        assert om[-1] == pytest.approx(2.2, abs=1e-14)
        np.testing.assert_allclose(np.diff(om), 0.4 / 49, rtol=1e-13)
        assert full_comb.indices == tuple(range(1, 51))

    def test_single_tooth_sits_at_centre(self, cavity):
        spec = CombSpec(1, 2.0, 0.2, 2.0, 0.1, 0.01)
        e = build_comb(spec, 0.01, cavity)
        assert e.n == 1
        assert e.emitters[0].omega == pytest.approx(2.0)

    def test_two_teeth_are_the_endpoints(self, cavity):
        spec = CombSpec(2, 2.0, 0.2, 2.0, 0.1, 0.01)
        e = build_comb(spec, 0.01, cavity)
        np.testing.assert_allclose(e.omegas, [1.8, 2.2])

    def test_invalid_specs_name_the_field(self):
        with pytest.raises(ValueError, match="CombSpec.n"):
            CombSpec(0, 2.0, 0.2, 2.0, 0.1, 0.01)
        with pytest.raises(ValueError, match="q"):
            CombSpec(5, 2.0, 0.2, 3.0, 0.1, 0.01)
        with pytest.raises(ValueError, match="amplitude"):
            CombSpec(5, 2.0, 0.2, 2.0, 0.1, -0.01)
        with pytest.raises(ValueError, match="kappa"):
            Cavity(2.0, -0.1)

    def test_calibration_hits_target(self, full_comb):
        assert collective_coupling(full_comb) == pytest.approx(0.102, rel=1e-12)

    def test_calibration_scales_linearly(self):
        a1 = calibrate_amplitude(50, 2.0, 0.2, 2.0, 0.1, 0.102)
        a2 = calibrate_amplitude(50, 2.0, 0.2, 2.0, 0.1, 0.204)
        assert a2 == pytest.approx(2 * a1, rel=1e-12)


class TestBurnHoles:
    def test_index_burn_removes_exactly_the_requested_teeth(self, full_comb):
        burned = burn_holes(full_comb, HoleSpec.by_index(PAPER_HOLE_INDICES))
        assert burned.n == 44
        survivors = set(burned.indices)
        assert survivors == set(range(1, 51)) - PAPER_HOLE_INDICES
        # survivor frequency multiset equals comb minus removed teeth
        expected = [em.omega for em in full_comb.emitters
                    if em.index not in PAPER_HOLE_INDICES]
        np.testing.assert_array_equal(burned.omegas, expected)

    def test_empty_index_set_is_identity(self, full_comb):
        burned = burn_holes(full_comb, HoleSpec.by_index(()))
        assert burned == full_comb

    def test_window_burn_closed_interval_oracle(self, full_comb):
        # brute-force membership over all 50 teeth; the 0.033 eV windows at
        # 2 +- 0.102 eV include the boundary teeth 11/15/36/40, so window
        # burning removes ten teeth where the index form removes six.
        spec = HoleSpec.by_window([(2.0 - 0.102, 0.033), (2.0 + 0.102, 0.033)])
        oracle = set()
        for em in full_comb.emitters:
            for c, w in spec.windows:
                if c - w / 2 <= em.omega <= c + w / 2:
                    oracle.add(em.index)
        assert oracle == {11, 12, 13, 14, 15, 36, 37, 38, 39, 40}
        assert selected_by_window(full_comb, spec) == oracle
        assert oracle - PAPER_HOLE_INDICES == {11, 15, 36, 40}
        burned = burn_holes(full_comb, spec)
        assert set(burned.indices) == set(range(1, 51)) - oracle

    def test_burning_everything_warns_not_raises(self, full_comb):
        spec = HoleSpec.by_window([(2.0, 10.0)])
        with pytest.warns(UserWarning, match="every emitter"):
            burned = burn_holes(full_comb, spec)
        assert burned.n == 0

    def test_gap_windows_span_surviving_flank_teeth(self, comb_spec):
        windows = hole_gap_windows(comb_spec, PAPER_HOLE_INDICES)
        teeth = comb_spec.tooth_positions()
        assert windows == ((teeth[10], teeth[14]), (teeth[35], teeth[39]))


class TestApplyDisorder:
    def test_zero_disorder_is_identity(self, full_comb, comb_spec):
        out = apply_disorder(full_comb, DisorderSpec(r=0.0, seed=5), comb_spec)
        np.testing.assert_array_equal(out.omegas, full_comb.omegas)
        np.testing.assert_array_equal(out.couplings, full_comb.couplings)

    def test_shift_bound(self, full_comb, comb_spec):
        for seed in range(5):
            out = apply_disorder(full_comb, DisorderSpec(r=0.5, seed=seed), comb_spec)
            bound = 0.5 * comb_spec.delta_omega / (comb_spec.n - 1)
            shifts = np.abs(np.sort(out.omegas) - full_comb.omegas)
            assert shifts.max() <= bound + 1e-15

    def test_same_seed_bit_reproducible(self, full_comb, comb_spec):
        a = apply_disorder(full_comb, DisorderSpec(r=0.5, seed=42), comb_spec)
        b = apply_disorder(full_comb, DisorderSpec(r=0.5, seed=42), comb_spec)
        assert a == b

    def test_distinct_seeds_differ(self, full_comb, comb_spec):
        a = apply_disorder(full_comb, DisorderSpec(r=0.5, seed=1), comb_spec)
        b = apply_disorder(full_comb, DisorderSpec(r=0.5, seed=2), comb_spec)
        assert not np.array_equal(a.omegas, b.omegas)

    def test_couplings_follow_shifted_frequency(self, full_comb, comb_spec):
        out = apply_disorder(full_comb, DisorderSpec(r=0.5, seed=3), comb_spec)
        expected = comb_spec.amplitude * eq_exponential(
            -comb_spec.beta * (out.omegas - comb_spec.omega_e) ** 2, comb_spec.q)
        np.testing.assert_allclose(out.couplings, expected, rtol=1e-13)

    def test_disorder_commutes_with_burning(self, full_comb, comb_spec):
        # draws are keyed to the original comb index
        spec = DisorderSpec(r=0.5, seed=9)
        holes = HoleSpec.by_index(PAPER_HOLE_INDICES)
        a = burn_holes(apply_disorder(full_comb, spec, comb_spec), holes)
        b = apply_disorder(burn_holes(full_comb, holes), spec, comb_spec)
        assert a == b


class TestRandomEnsemble:
    def test_cauchy_ppf_analytic_quantile(self):
        scale = 1.0 / math.sqrt(0.1)
        assert cauchy_ppf(0.75, scale=scale) == pytest.approx(
            math.tan(math.pi / 4) / math.sqrt(0.1), rel=1e-12)
        assert cauchy_ppf(0.5) == pytest.approx(0.0, abs=1e-12)

    def test_sample_median_converges_to_centre(self):
        spec = RandomEnsembleSpec(n=5000, omega_e=2.0, q=2.0, beta=0.1,
                                  g_uniform=0.002, truncation_halfwidth=0.5,
                                  seed=17)
        e = sample_random_ensemble(spec, 0.01, Cavity(2.0, 0.1))
        median = float(np.median(e.omegas))
        assert abs(median - 2.0) < 3 * 0.5 / math.sqrt(5000)

    def test_sample_respects_truncation_and_uniform_coupling(self):
        spec = RandomEnsembleSpec(n=2000, omega_e=2.0, q=2.0, beta=0.1,
                                  g_uniform=0.002, truncation_halfwidth=0.5,
                                  seed=3)
        e = sample_random_ensemble(spec, 0.01, Cavity(2.0, 0.1))
        assert e.n == 2000
        assert np.all(np.abs(e.omegas - 2.0) <= 0.5)
        assert np.all(e.couplings == 0.002)

    def test_fixed_seed_deterministic(self):
        spec = RandomEnsembleSpec(n=500, omega_e=2.0, q=2.0, beta=0.1,
                                  g_uniform=0.002, truncation_halfwidth=0.5,
                                  seed=11)
        a = sample_random_ensemble(spec, 0.01, Cavity(2.0, 0.1))
        b = sample_random_ensemble(spec, 0.01, Cavity(2.0, 0.1))
        assert a == b

    def test_non_cauchy_q_rejection_sampling(self):
        spec = RandomEnsembleSpec(n=800, omega_e=2.0, q=1.0, beta=50.0,
                                  g_uniform=0.01, truncation_halfwidth=0.5,
                                  seed=4)
        e = sample_random_ensemble(spec, 0.01, Cavity(2.0, 0.1))
        # q=1 is a plain Gaussian of std 1/sqrt(2*beta) = 0.1
        assert abs(float(np.std(e.omegas)) - 0.1) < 0.02


class TestCollectiveCoupling:
    def test_single_emitter(self):
        e = Ensemble(Cavity(2.0, 0.1), (Emitter(2.0, 0.05, 1),), 0.01)
        assert collective_coupling(e) == pytest.approx(0.05)

    def test_sqrt_n_enhancement(self):
        ems = tuple(Emitter(1.9 + 0.01 * i, 0.03, i + 1) for i in range(16))
        e = Ensemble(Cavity(2.0, 0.1), ems, 0.01)
        assert collective_coupling(e) == pytest.approx(4 * 0.03, rel=1e-12)

    def test_empty_ensemble_is_zero(self):
        assert collective_coupling(Ensemble(Cavity(2.0, 0.1), (), 0.01)) == 0.0

    def test_invariant_under_burning_zero_coupling_emitters(self):
        ems = (Emitter(1.9, 0.0, 1), Emitter(2.0, 0.05, 2), Emitter(2.1, 0.0, 3))
        e = Ensemble(Cavity(2.0, 0.1), ems, 0.01)
        burned = burn_holes(e, HoleSpec.by_index({1, 3}))
        assert collective_coupling(burned) == collective_coupling(e)


class TestSpectralDensity:
    def test_symmetric_ensemble_has_zero_lamb_shift_at_centre(self, full_comb):
        rho, delta = spectral_density(full_comb, 2.0)
        assert rho > 0
        assert abs(delta) < 1e-15

    def test_single_resonant_emitter(self):
        g, gamma = 0.02, 0.01
        e = Ensemble(Cavity(2.0, 0.1), (Emitter(2.0, g, 1),), gamma)
        rho, delta = spectral_density(e, 2.0)
        assert rho == pytest.approx(4 * g ** 2 / gamma, rel=1e-12)
        assert delta == pytest.approx(0.0, abs=1e-18)

    def test_matches_brute_force_summation(self, full_comb):
        w = 1.95
        gamma = full_comb.gamma
        rho_o = sum(em.g ** 2 * gamma / ((gamma / 2) ** 2 + (em.omega - w) ** 2)
                    for em in full_comb.emitters)
        delta_o = sum(em.g ** 2 * (em.omega - w) / ((gamma / 2) ** 2 + (em.omega - w) ** 2)
                      for em in full_comb.emitters)
        rho, delta = spectral_density(full_comb, w)
        assert rho == pytest.approx(rho_o, rel=1e-12)
        assert delta == pytest.approx(delta_o, rel=1e-12)

    def test_rho_nonnegative_everywhere(self, burned_comb):
        grid = np.linspace(1.7, 2.3, 601)
        rho, _ = spectral_density(burned_comb, grid)
        assert np.all(rho >= 0)

    def test_singular_when_gamma_zero_on_resonance(self):
        e = Ensemble(Cavity(2.0, 0.1), (Emitter(2.0, 0.05, 1),), 0.0)
        with pytest.raises(SingularEvaluationError):
            spectral_density(e, 2.0)
        # off resonance it is fine
        rho, delta = spectral_density(e, 2.1)
        assert rho == 0.0
        assert delta != 0.0

    def test_scalar_and_array_agree(self, burned_comb):
        grid = np.array([1.85, 1.95, 2.05])
        rho_arr, delta_arr = spectral_density(burned_comb, grid)
        for k, w in enumerate(grid):
            rho, delta = spectral_density(burned_comb, float(w))
            assert rho == pytest.approx(rho_arr[k], rel=1e-14)
            assert delta == pytest.approx(delta_arr[k], rel=1e-14)


class TestSerialization:
    def test_json_round_trip(self, burned_comb, tmp_path):
        path = burned_comb.save(tmp_path / "ensemble.json")
        loaded = Ensemble.load(path)
        assert loaded == burned_comb
        doc = json.loads(path.read_text())
        assert set(doc) == {"cavity", "gamma", "emitters"}
        assert set(doc["cavity"]) == {"omega_a", "kappa"}
        assert set(doc["emitters"][0]) == {"index", "omega", "g"}

    def test_ensemble_invariants_enforced(self):
        with pytest.raises(ValueError, match="sorted"):
            Ensemble(Cavity(2.0, 0.1),
                     (Emitter(2.1, 0.01, 1), Emitter(1.9, 0.01, 2)), 0.01)
        with pytest.raises(ValueError, match="unique"):
            Ensemble(Cavity(2.0, 0.1),
                     (Emitter(1.9, 0.01, 1), Emitter(2.1, 0.01, 1)), 0.01)
        with pytest.raises(ValueError, match="gamma"):
            Ensemble(Cavity(2.0, 0.1), (), -0.01)
