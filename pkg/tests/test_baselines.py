import math

import numpy as np
import pytest
from scipy.stats import ks_2samp

from oracles import naive_contract
from spiked_qaoa.baselines import (
    biased_init,
    implicit_power_iteration,
    power_iteration,
    random_init,
    round_sign,
    tensor_contract,
    unfold_spectral,
)
from spiked_qaoa.errors import CapacityError
from spiked_qaoa.model import SpikedTensorInstance, generate_instance
from spiked_qaoa.rng import stream


def noiseless(n, q, lam, seed=0):
    u = stream(seed, "u").integers(0, 2, n) * 2 - 1
    return SpikedTensorInstance(n=n, q=q, lam=lam, u=u, w=np.zeros(n**q))


class TestContract:
    @pytest.mark.parametrize("n,q", [(3, 3), (4, 2), (3, 4)])
    def test_matches_naive(self, n, q):
        inst = generate_instance(n, q, 1.7, 11)
        v = np.random.default_rng(0).standard_normal(n)
        np.testing.assert_allclose(tensor_contract(inst, v), naive_contract(inst, v), atol=1e-12)

    def test_signal_only(self):
        n, q, lam = 6, 3, 2.5
        inst = noiseless(n, q, lam)
        np.testing.assert_allclose(tensor_contract(inst, inst.u), lam * n ** (q / 2 - 1) * inst.u, atol=1e-12)

    def test_order_two_is_matrix_product(self):
        inst = generate_instance(5, 2, 0.8, 3)
        y = inst.lam / 5 * np.outer(inst.u, inst.u) + inst.noise / math.sqrt(5)
        v = np.arange(5.0)
        np.testing.assert_allclose(tensor_contract(inst, v), y @ v, atol=1e-12)

    def test_length_check(self):
        with pytest.raises(ValueError):
            tensor_contract(generate_instance(3, 2, 1, 0), np.ones(4))


class TestPowerIteration:
    @pytest.mark.parametrize("q", [2, 3, 4])
    def test_noiseless_fixed_point(self, q):
        inst = noiseless(7, q, 3.0)
        init = inst.u + 0.3 * np.random.default_rng(q).standard_normal(7)
        trace = power_iteration(inst, 3, init)
        for it in trace.iterates:
            np.testing.assert_allclose(it, inst.u, atol=1e-12)
        assert trace.overlaps[-1] == pytest.approx(1)

    def test_norm_and_scale_invariance(self):
        inst = generate_instance(6, 3, 1.5, 4)
        init = random_init(6, stream(0, "init"))
        a = power_iteration(inst, 4, init)
        b = power_iteration(inst, 4, 17.0 * init)
        for x, y in zip(a.iterates, b.iterates):
            assert abs(np.linalg.norm(x) - math.sqrt(6)) <= 1e-10
            np.testing.assert_allclose(x, y, atol=1e-12)

    @pytest.mark.parametrize("q", [2, 3, 4])
    def test_sign_equivariance(self, q):
        inst = generate_instance(5, q, 1.0, 8)
        init = random_init(5, stream(1, "init"))
        a = power_iteration(inst, 1, init).iterates[0]
        b = power_iteration(inst, 1, -init).iterates[0]
        np.testing.assert_allclose(b, -a if q % 2 == 0 else a, atol=1e-12)

    def test_degenerate(self):
        # odd order and an init orthogonal to u: the contraction vanishes without noise
        inst = SpikedTensorInstance(n=2, q=3, lam=1.0, u=[1, 1], w=np.zeros(8))
        trace = power_iteration(inst, 5, np.array([1.0, -1.0]))
        assert trace.degenerate and trace.iterates == []

    def test_errors(self):
        inst = generate_instance(3, 2, 1, 0)
        with pytest.raises(ValueError):
            power_iteration(inst, 0, np.ones(3))
        with pytest.raises(ValueError):
            power_iteration(inst, 2, np.zeros(3))

    def test_implicit_matches_materialised(self):
        n, q, lam, steps, count = 6, 3, 2.0, 2, 3000
        full, implicit = [], []
        for i in range(count):
            inst = generate_instance(n, q, lam, i)
            init = random_init(n, stream(i, "init"))
            full.append(power_iteration(inst, steps, init).overlaps[-1])
            trace = implicit_power_iteration(inst.u, q, lam, steps, init, stream(i, "implicit"))
            implicit.append(trace.overlaps[-1])
        assert ks_2samp(full, implicit).pvalue > 1e-3


class TestInitialisers:
    def test_random_init_norm(self):
        assert np.linalg.norm(random_init(50, stream(0, "r"))) == pytest.approx(math.sqrt(50))

    def test_biased_zero_delta_is_rademacher(self):
        u = np.ones(20_000)
        v = biased_init(u, 20_000, 0.0, stream(0, "b"))
        assert set(np.unique(v * math.sqrt(20_000))) == {-1.0, 1.0}
        assert abs(v.mean() * math.sqrt(20_000)) < 4 / math.sqrt(20_000)

    def test_biased_full(self):
        u = np.array([1, -1, 1, 1, -1])
        np.testing.assert_allclose(biased_init(u, 5, math.pi / 4, stream(0, "b")), u / math.sqrt(5))

    def test_biased_mean(self):
        n, k, delta, draws = 10, 4, 0.3, 100_000
        u = np.array([1, -1] * 5)
        rng = stream(2, "b")
        agree = np.array([float(u @ biased_init(u, k, delta, rng)) * math.sqrt(n) / n for _ in range(draws)])
        target = k / n * math.sin(2 * delta)
        assert abs(agree.mean() - target) < 4 * agree.std() / math.sqrt(draws)

    def test_biased_errors(self):
        with pytest.raises(ValueError):
            biased_init(np.ones(3), 4, 0.1, stream(0, "b"))
        with pytest.raises(ValueError):
            biased_init(np.ones(3), 1, 1.0, stream(0, "b"))

    def test_round_sign(self):
        u = np.array([1, -1, -1, 1])
        np.testing.assert_array_equal(round_sign(u / 2), u)
        np.testing.assert_array_equal(round_sign([0.0, -0.0, -1e-300]), [1, 1, -1])


class TestUnfolding:
    def test_noiseless_recovery(self):
        inst = noiseless(6, 4, 1.0, seed=3)
        est = unfold_spectral(inst, 20, stream(0, "unfold"))
        target = inst.u * math.sqrt(6) / np.linalg.norm(inst.u)
        assert min(np.max(np.abs(est - target)), np.max(np.abs(est + target))) <= 1e-8

    def test_recovery_rate(self):
        n, q = 8, 4
        lam = 2 * n ** ((q - 2) / 4)
        hits = 0
        for s in range(200):
            inst = generate_instance(n, q, lam, s)
            est = unfold_spectral(inst, 50, stream(s, "unfold"))
            hits += abs(float(inst.u @ est)) / n > 0.5
        assert hits >= 160

    def test_errors(self):
        with pytest.raises(ValueError):
            unfold_spectral(generate_instance(4, 3, 1, 0), 5, stream(0, "u"))
        with pytest.raises(CapacityError):
            unfold_spectral(generate_instance(6, 4, 1, 0), 5, stream(0, "u"), max_entries=1000)
