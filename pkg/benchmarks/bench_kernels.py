"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py --n 12 14 16 18 --q 3

Prints one row per (kernel, n) with the best-of-``repeat`` wall time for each
backend and their ratio.  Without the extension only the fallback column is filled.
"""

from __future__ import annotations

import argparse
import csv
import sys
import timeit

import numpy as np

from spiked_qaoa import _fallback
from spiked_qaoa.model import _incidence, generate_instance, noise_monomials, signal_bits, signal_table

try:
    from spiked_qaoa import _kernels
except ImportError:
    _kernels = None


def cases(n: int, q: int, seed: int):
    inst = generate_instance(n, q, 1.0, seed)
    masks, coefs = noise_monomials(inst)
    ptr, others, weights = _incidence(masks, coefs, n)
    diag_args = (n, ptr, others, weights, float(coefs.sum()), signal_table(inst), signal_bits(inst.u))
    rng = np.random.default_rng(seed)
    amp = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    amp /= np.linalg.norm(amp)
    diag = np.asarray(_fallback.cost_diagonal(*diag_args))
    ubits = signal_bits(inst.u)
    return {
        "cost_diagonal": lambda impl: impl.cost_diagonal(*diag_args),
        "apply_phase": lambda impl: impl.apply_phase(amp.copy(), diag, 0.3),
        "apply_mixer": lambda impl: impl.apply_mixer(amp.copy(), n, 0.7),
        "agreement_masses": lambda impl: impl.agreement_masses(amp, n, ubits),
    }


def best_time(fn, repeat: int) -> float:
    number = 1
    while timeit.timeit(fn, number=number) < 0.05 and number < 1 << 12:
        number *= 2
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, nargs="+", default=[12, 14, 16])
    parser.add_argument("--q", type=int, default=3)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    writer = csv.writer(sys.stdout)
    writer.writerow(["kernel", "n", "q", "compiled_s", "fallback_s", "speedup"])
    for n in args.n:
        for name, call in cases(n, args.q, args.seed).items():
            slow = best_time(lambda: call(_fallback), args.repeat)
            fast = best_time(lambda: call(_kernels), args.repeat) if _kernels else None
            speedup = f"{slow / fast:.2f}" if fast else ""
            writer.writerow([name, n, args.q, f"{fast:.3e}" if fast else "", f"{slow:.3e}", speedup])
            sys.stdout.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
