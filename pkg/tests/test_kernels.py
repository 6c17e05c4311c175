import os
import subprocess
import sys

import numpy as np
import pytest

from spiked_qaoa import _fallback, kernels
from spiked_qaoa.model import _incidence, generate_instance, noise_monomials, signal_bits, signal_table

try:
    from spiked_qaoa import _kernels
except ImportError:  # extension not built
    _kernels = None

needs_compiled = pytest.mark.skipif(_kernels is None, reason="compiled extension not built")


def diag_args(n, q, seed):
    inst = generate_instance(n, q, 0.9, seed)
    masks, coefs = noise_monomials(inst)
    ptr, others, weights = _incidence(masks, coefs, n)
    return n, ptr, others, weights, float(coefs.sum()), signal_table(inst), signal_bits(inst.u)


def random_state(n, seed):
    rng = np.random.default_rng(seed)
    amp = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    return amp / np.linalg.norm(amp)


def test_backend_name():
    assert kernels.BACKEND in ("compiled", "python")
    if _kernels is not None and os.environ.get("SPIKED_QAOA_KERNELS", "") != "python":
        assert kernels.BACKEND == "compiled"


def test_forced_fallback():
    env = dict(os.environ, SPIKED_QAOA_KERNELS="python")
    out = subprocess.run(
        [sys.executable, "-c", "import spiked_qaoa; print(spiked_qaoa.BACKEND)"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "python"


@needs_compiled
@pytest.mark.parametrize("n,q", [(5, 2), (7, 3), (6, 4), (11, 3)])
def test_cost_diagonal_backends_agree(n, q):
    args = diag_args(n, q, n + q)
    np.testing.assert_allclose(_kernels.cost_diagonal(*args), _fallback.cost_diagonal(*args), atol=1e-11)


@needs_compiled
@pytest.mark.parametrize("n", [1, 4, 9])
def test_mixer_backends_agree(n):
    a = random_state(n, n)
    b = a.copy()
    _kernels.apply_mixer(a, n, 0.37)
    _fallback.apply_mixer(b, n, 0.37)
    np.testing.assert_allclose(a, b, atol=1e-14)


@needs_compiled
def test_phase_and_masses_backends_agree():
    n = 8
    rng = np.random.default_rng(0)
    diag = rng.standard_normal(1 << n)
    a = random_state(n, 1)
    b = a.copy()
    _kernels.apply_phase(a, diag, 0.8)
    _fallback.apply_phase(b, diag, 0.8)
    np.testing.assert_allclose(a, b, atol=1e-14)
    np.testing.assert_allclose(
        np.asarray(_kernels.agreement_masses(a, n, 0b10110010)),
        _fallback.agreement_masses(a, n, 0b10110010),
        atol=1e-14,
    )


def test_single_qubit_mixer():
    for impl in filter(None, (_kernels, _fallback)):
        amp = np.array([1.0, 0.0], dtype=complex)
        impl.apply_mixer(amp, 1, np.pi / 2)
        np.testing.assert_allclose(amp, [0, -1j], atol=1e-15)
