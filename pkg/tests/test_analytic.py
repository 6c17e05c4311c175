import math
import warnings

import numpy as np
import pytest

from oracles import exact_noise_average_mgf, exact_noise_average_moment
from spiked_qaoa.analytic import (
    QuadratureWarning,
    SineGaussianLaw,
    gaussian_expectation,
    law_histogram,
    law_moment,
    law_moment_result,
    mgf_second_moment,
    p1_biased_expected_overlap,
    p1_expected_mgf,
    p1_expected_mgf_series,
    p1_expected_sq_overlap_general_q,
    p1_q2_expected_sq_overlap,
    pi_asymptotic_law,
    pi_biased_limit,
    qaoa_biased_limit,
    rho_ell,
    rounded_pi_law,
    sample_law,
    scaled_snr,
    second_moment_terms,
    sine_gaussian_law,
    sine_gaussian_law_p1,
)
from spiked_qaoa.analytic.scaling import epsilon_p
from spiked_qaoa.model import generate_instance
from spiked_qaoa.rng import derive_seed, stream
from spiked_qaoa.statevector import (
    BiasSpec,
    QaoaSchedule,
    overlap_distribution,
    prepare_biased,
    prepare_uniform,
    run_qaoa,
    sample_bias,
)

G_FIG = math.sqrt(math.log(5) / 32)


class TestScaling:
    def test_epsilon(self):
        assert epsilon_p(1, 5) == 1
        assert epsilon_p(2, 3) == pytest.approx(1 / 3)
        assert epsilon_p(3, 2) == pytest.approx(1 / 3)

    def test_rho(self):
        assert rho_ell(3, 4, 0) == 0.5
        assert rho_ell(3, 4, 3) == 1
        assert rho_ell(2, 3, 1) == pytest.approx(2 / 3)
        for q in (2, 3, 5):
            vals = [rho_ell(4, q, ell) for ell in range(5)]
            assert vals == sorted(vals)

    def test_scaled_snr(self):
        assert scaled_snr(2.0, 100, 1, 2) == pytest.approx(20.0)
        assert scaled_snr(1.0, 64, 2, 3) == pytest.approx(64 ** (2 / 3))

    def test_invalid(self):
        with pytest.raises(ValueError):
            epsilon_p(0, 3)
        with pytest.raises(ValueError):
            rho_ell(2, 3, 3)


class TestClosedForm:
    @pytest.mark.parametrize("gamma,beta", [(0.3, 0.2), (1.1, 2.0)])
    def test_trivial_limits(self, gamma, beta):
        assert p1_q2_expected_sq_overlap(12, gamma, beta, 0.0) == pytest.approx(1 / 12, abs=1e-15)
        assert p1_q2_expected_sq_overlap(12, 0.0, beta, 3.0) == pytest.approx(1 / 12, abs=1e-15)

    @pytest.mark.parametrize("n", [3, 4, 6])
    def test_against_exact_average(self, n):
        for gamma, beta, lam in [(0.3, 0.7, 1.5), (G_FIG, math.pi / 4, math.sqrt(n))]:
            ref = exact_noise_average_moment(n, 2, gamma, beta, lam, 2)
            assert p1_q2_expected_sq_overlap(n, gamma, beta, lam) == pytest.approx(ref, abs=1e-12)


class TestMgf:
    def test_zero_is_one(self):
        for q in (2, 3, 4):
            assert p1_expected_mgf(20, q, 0.4, 0.9, 2.0, 0.0) == 1

    @pytest.mark.parametrize("n,q", [(4, 2), (4, 3), (6, 3), (5, 4)])
    def test_brute_force(self, n, q):
        for zeta in (-1.3, 0.4, 2.0):
            ref = exact_noise_average_mgf(n, q, 0.35, 0.6, 1.7, zeta)
            assert p1_expected_mgf(n, q, 0.35, 0.6, 1.7, zeta).real == pytest.approx(ref, abs=1e-12)

    def test_conjugate_symmetry(self):
        for q in (2, 3):
            val = p1_expected_mgf(30, q, 0.3, 0.4, 5.0, 1.7)
            assert abs(val.imag) <= 1e-10

    def test_domain(self):
        with pytest.raises(ValueError):
            p1_expected_mgf(5, 2, 0.3, 0.4, 1.0, 6.0)

    @pytest.mark.parametrize("n", [8, 12])
    def test_truncation_sound(self, n):
        for zeta in (0.5, 3.0):
            full = p1_expected_mgf_series(n, 3, 0.3, 0.5, 2.0, zeta, tol=0.0)
            assert len(full.terms) == n + 1 and not full.tol_met
            cut = p1_expected_mgf_series(n, 3, 0.3, 0.5, 2.0, zeta, tol=1e-6)
            assert abs(cut.value - full.value) <= cut.tail_bound
            for term in full.terms:
                assert abs(term.I) <= term.bound

    def test_flag_when_tolerance_unmet(self):
        res = p1_expected_mgf_series(4, 2, 0.3, 0.5, 1.0, 3.5, tol=1e-15)
        assert not res.tol_met and res.tail_bound == 0

    def test_fd_second_moment_q2(self):
        for gamma, beta, lam in [(0.2, 0.4, 1.0), (G_FIG, math.pi / 4, math.sqrt(50)), (0.5, 1.2, 6.0)]:
            closed = p1_q2_expected_sq_overlap(50, gamma, beta, lam)
            assert mgf_second_moment(50, 2, gamma, beta, lam) == pytest.approx(closed, abs=1e-8)

    def test_simulator_q3(self):
        n, q, gamma, beta, lam, zeta = 8, 3, 0.3, 0.7, 1.0, 1.0
        sched = QaoaSchedule([gamma], [beta])
        vals = []
        for i in range(5000):
            inst = generate_instance(n, q, lam, derive_seed(11, "mgf-test", i))
            d = overlap_distribution(run_qaoa(inst, sched, prepare_uniform(n)), inst.u)
            vals.append(np.dot(d.mass, np.exp(zeta * d.values)))
        vals = np.array(vals)
        se = vals.std(ddof=1) / math.sqrt(vals.size)
        assert abs(vals.mean() - p1_expected_mgf(n, q, gamma, beta, lam, zeta).real) <= 3 * se


class TestGeneralQ:
    @pytest.mark.parametrize("n", [10, 50, 200])
    def test_matches_q2_closed_form(self, n):
        for gamma in (0.1, 0.3, 0.6):
            for beta in (0.2, math.pi / 4, 1.3):
                for lam in (0.0, 1.0, math.sqrt(n)):
                    a = p1_expected_sq_overlap_general_q(n, 2, gamma, beta, lam)
                    assert a == pytest.approx(p1_q2_expected_sq_overlap(n, gamma, beta, lam), abs=1e-10)

    @pytest.mark.parametrize("q", [2, 3, 4])
    def test_lambda_zero(self, q):
        assert p1_expected_sq_overlap_general_q(9, q, 0.4, 0.3, 0.0) == pytest.approx(1 / 9, abs=1e-14)

    def test_raw_t0(self):
        t0, _, _ = second_moment_terms(15, 3, 0.4, 0.3, 2.0)
        assert t0 == pytest.approx(1 / 15, abs=1e-15)

    @pytest.mark.parametrize("n,q", [(4, 3), (6, 3), (5, 4)])
    def test_brute_force(self, n, q):
        ref = exact_noise_average_moment(n, q, 0.45, 0.5, 2.2, 2)
        assert p1_expected_sq_overlap_general_q(n, q, 0.45, 0.5, 2.2) == pytest.approx(ref, abs=1e-12)

    def test_large_gamma_bound(self):
        for q in (2, 3):
            for gamma in (1.0, 2.0, 3.0):
                _, t1, t2 = second_moment_terms(400, q, gamma, 0.6, 30.0)
                assert abs(t1) + abs(t2) <= 4 * math.exp(-q * gamma**2)


class TestBiased:
    def test_formula_matches_simulator(self):
        n, q, k, delta, gamma, beta, lam = 8, 3, 4, math.pi / 8, 0.3, 0.6, 2.0
        sched = QaoaSchedule([gamma], [beta])
        vals = []
        for i in range(3000):
            inst = generate_instance(n, q, lam, derive_seed(5, "biased-test", i))
            bias = sample_bias(n, k, delta, stream(5, "bias-test", i))
            d = overlap_distribution(run_qaoa(inst, sched, prepare_biased(inst.u, bias)), inst.u)
            vals.append(np.dot(d.mass, d.values))
        vals = np.array(vals)
        se = vals.std(ddof=1) / math.sqrt(vals.size)
        assert abs(vals.mean() - p1_biased_expected_overlap(n, q, gamma, beta, lam, k, delta)) <= 3 * se

    def test_no_bias_even_q(self):
        # with k = 0 the even-order cost is sign symmetric, so the mean overlap vanishes
        assert p1_biased_expected_overlap(10, 2, 0.3, 0.5, 2.0, 0, 0.3) == pytest.approx(0, abs=1e-14)

    def test_boosting_grows_with_delta(self):
        # at n=20, q=3, k=9 the finite-n mean rises with delta at every Lambda;
        # it is already positive at delta=0 because an odd-order cost is not sign symmetric
        gamma = 1 / (2 * math.sqrt(3))
        for Lam in (0.25, 0.5, 1.0):
            lam = Lam * 20 ** 0.5
            means = [p1_biased_expected_overlap(20, 3, gamma, math.pi / 4, lam, 9, d) for d in (0, math.pi / 16, math.pi / 8)]
            assert means[0] > 0.05
            assert means[0] < means[1] < means[2]

    def test_full_bias_gamma_zero(self):
        # every qubit biased, no phase: mean overlap is cos(2 beta) sin(2 delta)
        n, delta, beta = 6, 0.3, 0.4
        inst = generate_instance(n, 2, 0.0, 0)
        bias = BiasSpec(k=n, delta=delta, theta=np.full(n, np.pi / 4 - delta))
        d = overlap_distribution(run_qaoa(inst, QaoaSchedule([0.0], [beta]), prepare_biased(inst.u, bias)), inst.u)
        expected = math.cos(2 * beta) * math.sin(2 * delta)
        assert np.dot(d.mass, d.values) == pytest.approx(expected, abs=1e-14)
        assert p1_biased_expected_overlap(n, 2, 0.0, beta, 0.0, n, delta) == pytest.approx(expected, abs=1e-14)


class TestLaws:
    def test_p1_coefficients(self):
        for q in (2, 3, 5):
            law = sine_gaussian_law_p1(q, 1 / (2 * math.sqrt(q)), math.pi / 4, 1.0)
            assert abs(law.a * law.b) == pytest.approx(math.sqrt(q / math.e), abs=1e-14)
        assert sine_gaussian_law_p1(3, 0.4, math.pi / 2, 1.0).a == pytest.approx(0, abs=1e-15)

    def test_invalid_law(self):
        with pytest.raises(ValueError):
            SineGaussianLaw(a=1.5, b=1, gpow=1, eps=1, Lambda=1)

    @pytest.mark.parametrize("gamma,beta,Lam", [(G_FIG, math.pi / 4, 1.0), (0.2, 0.5, 0.2), (0.4, 1.0, 2.5)])
    def test_q2_second_moment(self, gamma, beta, Lam):
        law = sine_gaussian_law_p1(2, gamma, beta, Lam)
        exact = math.exp(-8 * gamma**2) * math.sin(2 * beta) ** 2 * (1 - math.exp(-32 * Lam**2 * gamma**2)) / 2
        assert law_moment(law, 2) == pytest.approx(exact, abs=1e-9)

    def test_zero_amplitude(self):
        assert law_moment(SineGaussianLaw(0.0, 2.0, 2, 1.0, 1.0), 3) == 0

    def test_odd_moment_vanishes(self):
        assert law_moment(sine_gaussian_law(3, 2, 0.7, 1.1, 0.8), 1) == pytest.approx(0, abs=1e-14)
        assert law_moment(pi_asymptotic_law(2, 2, 1.3), 3) == pytest.approx(0, abs=1e-14)

    def test_pi_limits(self):
        assert law_moment(pi_asymptotic_law(1, 3, 0.0), 2) == 0
        assert law_moment(pi_asymptotic_law(1, 2, 1e4), 2) == pytest.approx(1, abs=1e-3)
        for q in (2, 3, 4):
            small = law_moment(pi_asymptotic_law(1, q, 1e-3), 2) / 1e-6
            double_factorial = math.prod(range(2 * q - 3, 0, -2))
            # next-order term is -Lambda^2 E[G^{4q-4}], a relative 7e-4 at q = 4
            assert small == pytest.approx(double_factorial, rel=1e-3)

    def test_rounded(self):
        assert law_moment(rounded_pi_law(3, 0.0), 2) == 0
        assert law_moment(rounded_pi_law(3, 1e8), 2) == pytest.approx(1, abs=1e-3)
        for q in (2, 3):
            ratio = law_moment(rounded_pi_law(q, 1e-3), 2) / law_moment(pi_asymptotic_law(1, q, 1e-3), 2)
            assert ratio == pytest.approx(2 / math.pi, abs=1e-3)

    @pytest.mark.parametrize(
        "law",
        [
            sine_gaussian_law_p1(2, G_FIG, math.pi / 4, 1.0),
            sine_gaussian_law_p1(3, 1 / (2 * math.sqrt(3)), math.pi / 4, 1.0),
            pi_asymptotic_law(1, 3, 1.0),
            pi_asymptotic_law(2, 3, 1.0),
            rounded_pi_law(3, 1.0),
        ],
        ids=["sine-q2", "sine-q3", "pi-p1", "pi-p2", "rounded"],
    )
    def test_quadrature_vs_monte_carlo(self, law):
        draws = sample_law(law, 10**7, stream(0, "law-mc")) ** 2
        se = draws.std() / math.sqrt(draws.size)
        assert abs(law_moment(law, 2) - draws.mean()) <= 4 * se

    def test_oscillation_flag(self):
        law = sine_gaussian_law(3, 3, 0.5, 4.0, 3.0)
        res = law_moment_result(law, 2)
        assert res.oscillation_flag and not res.converged
        with pytest.warns(QuadratureWarning):
            law_moment(law, 2)

    def test_adaptive_fallback_on_stiff_law(self):
        # Hermite nodes under-resolve G^4; the adaptive rule must still hit a dense midpoint sum
        law = sine_gaussian_law_p1(5, 1 / (2 * math.sqrt(5)), math.pi / 4, 1.0)
        res = law_moment_result(law, 2)
        assert res.converged and res.method == "adaptive"
        h = 24 / 2_000_000
        g = -12 + h * (np.arange(2_000_000) + 0.5)
        dense = np.sum(law.transform(g) ** 2 * np.exp(-g * g / 2)) * h / math.sqrt(2 * math.pi)
        assert res.value == pytest.approx(dense, abs=1e-9)

    def test_certified_results_do_not_warn(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            law_moment(sine_gaussian_law_p1(3, 0.3, 0.7, 1.0), 2)

    def test_gaussian_expectation_polynomial(self):
        res = gaussian_expectation(lambda g: g**4)
        assert res.value == pytest.approx(3, abs=1e-12) and res.converged

    def test_histogram_masses(self):
        law = sine_gaussian_law_p1(2, G_FIG, math.pi / 4, 1.0)
        centers = np.linspace(-1, 1, 13)
        edges = np.concatenate([centers - 1 / 12, [1 + 1 / 12]])
        mass = law_histogram(law, edges)
        assert np.all(mass >= 0) and mass.sum() == pytest.approx(1, abs=1e-10)
        draws = sample_law(law, 10**6, stream(1, "hist"))
        empirical = np.histogram(draws, edges)[0] / draws.size
        assert np.max(np.abs(empirical - mass)) < 3e-3

    def test_biased_limits(self):
        assert qaoa_biased_limit(3, 0.3, 0.5, 0.0, 2.0) == 0
        assert qaoa_biased_limit(3, 0.3, 0.5, 0.4, 0.0) == 0
        q, g, b, Lam = 3, 0.25, 0.6, 0.8
        expected = math.exp(-2 * q * g**2) * math.sin(2 * b) * math.sin(2 * q * Lam * g)
        assert qaoa_biased_limit(q, g, b, math.pi / 4, Lam) == pytest.approx(expected)
        assert pi_biased_limit(3, 0.0, 5.0) == 0
        assert pi_biased_limit(2, math.pi / 4, 1.0) == pytest.approx(1 / math.sqrt(2))
        assert pi_biased_limit(3, 0.3, 1e9) == pytest.approx(1, abs=1e-6)
        with pytest.raises(ValueError):
            pi_biased_limit(3, 1.0, 1.0)
