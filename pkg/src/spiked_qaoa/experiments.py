"""Experiment drivers behind the CLI subcommands.

Each driver validates its config, fans the per-instance work out over a thread
pool, aggregates in a fixed order and only then writes CSV/SVG artifacts, so
output bytes do not depend on the thread count.  Timings go to a JSONL sidecar.
"""

from __future__ import annotations

import csv
import io
import json
import math
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.stats import ks_2samp

from . import analytic as an
from .baselines import biased_init, implicit_power_iteration, random_init, round_sign, unfold_spectral
from .config import SIMULATED_KINDS, ExperimentConfig
from .errors import CapacityError, ConfigError
from .io import save_instance
from .model import DEFAULT_MAX_ENTRIES, cost_diagonal, generate_instance
from .optimizer import optimize_enhancement
from .rng import derive_seed, stream
from .statevector import (
    QaoaSchedule,
    overlap_distribution,
    prepare_biased,
    prepare_uniform,
    run_qaoa,
    sample_bias,
)
from .svg import Chart

LAW_SAMPLES = 200_000


# --- plumbing -----------------------------------------------------------
class Progress:
    """Append-only JSONL log of task timings."""

    def __init__(self, path: Path):
        self.path = path
        self._lock = threading.Lock()
        self._t0 = time.perf_counter()
        path.write_text("")

    def log(self, event: str, **fields) -> None:
        record = {"event": event, "elapsed": round(time.perf_counter() - self._t0, 6), **fields}
        with self._lock, self.path.open("a") as fh:
            fh.write(json.dumps(record, sort_keys=True) + "\n")


def pmap(fn: Callable, items: Sequence, threads: int, progress: Progress | None = None) -> list:
    """Ordered parallel map; results come back in input order."""

    def task(item):
        t = time.perf_counter()
        out = fn(item)
        if progress is not None:
            progress.log("task", item=repr(item), seconds=round(time.perf_counter() - t, 6))
        return out

    if threads <= 1 or len(items) <= 1:
        return [task(x) for x in items]
    with ThreadPoolExecutor(threads) as pool:
        return list(pool.map(task, items))


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (list, tuple)):
        return ";".join(_cell(x) for x in v)
    return str(v)


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _emit(out: Path, files: dict[str, str]) -> list[Path]:
    paths = []
    for name, text in files.items():
        path = out / name
        path.write_text(text)
        paths.append(path)
    return paths


def _prepare(cfg: ExperimentConfig) -> tuple[Path, Progress]:
    cfg.validate()
    if cfg.kind in SIMULATED_KINDS and cfg.simulate:
        sizes = cfg.n
        big = [n for n in sizes if n > cfg.max_n]
        if big:
            raise CapacityError(f"n={big[0]} exceeds the simulator cap {cfg.max_n}; raise it with --max-n")
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    progress = Progress(out / f"{cfg.kind}.progress.jsonl")
    progress.log("start", config=cfg.to_dict())
    return out, progress


def _mean_se(values) -> tuple[float, float]:
    a = np.asarray(values, dtype=np.float64)
    se = float(a.std(ddof=1) / math.sqrt(a.size)) if a.size > 1 else math.nan
    return float(a.mean()), se


def loglog_slope(x, y) -> tuple[float, float]:
    """Least-squares fit of ``log|y| = slope log x + intercept``."""
    lx, ly = np.log(np.asarray(x, float)), np.log(np.abs(np.asarray(y, float)))
    slope, intercept = np.polyfit(lx, ly, 1)
    return float(slope), float(intercept)


# --- angles and laws ----------------------------------------------------
def resolve_angles(cfg: ExperimentConfig, p: int | None = None) -> tuple[list[float], list[float]]:
    p = cfg.p if p is None else p
    if cfg.angles != "table1-optimal":
        return list(cfg.angles["gamma"]), list(cfg.angles["beta"])
    if p == 1:
        # the depth-1 optimum is available in closed form
        return [1 / (2 * math.sqrt(cfg.q))], [math.pi / 4]
    rep = optimize_enhancement(p, cfg.q, cfg.starts, stream(cfg.seed, "angles", p, cfg.q))
    return list(rep.best_gammas), list(rep.best_betas)


def effective_Lambda(cfg: ExperimentConfig, n: int) -> float:
    """``Lambda`` such that the law at scale ``n^{(q-2+eps_p)/2}`` matches ``lambda_n``."""
    return cfg.snr(n) / n ** ((cfg.q - 2 + an.epsilon_p(cfg.p, cfg.q)) / 2)


def limit_law(p: int, q: int, gammas, betas, Lambda: float) -> an.SineGaussianLaw:
    if p == 1:
        return an.sine_gaussian_law_p1(q, gammas[0], betas[0], Lambda)
    t = an.coeff_engine(p, q, gammas, betas)
    return an.sine_gaussian_law(p, q, t.a, t.b, Lambda)


def _instance_seed(cfg: ExperimentConfig, n: int, i: int) -> int:
    return derive_seed(cfg.seed, "instance", n, i)


def _simulate(cfg: ExperimentConfig, n: int, i: int, schedule: QaoaSchedule):
    seed = _instance_seed(cfg, n, i)
    inst = generate_instance(n, cfg.q, cfg.snr(n), seed)
    state = run_qaoa(inst, schedule, prepare_uniform(n, max_n=cfg.max_n), max_n=cfg.max_n)
    return seed, overlap_distribution(state, inst.u)


# --- histogram ----------------------------------------------------------
def run_histogram(cfg: ExperimentConfig) -> list[Path]:
    out, progress = _prepare(cfg)
    gammas, betas = resolve_angles(cfg)
    schedule = QaoaSchedule(gammas, betas)
    tasks = [(n, i) for n in cfg.n for i in range(cfg.instances)]
    results = pmap(lambda t: _simulate(cfg, t[0], t[1], schedule), tasks, cfg.threads, progress)

    rows, summary = [], []
    for (n, _), (seed, dist) in zip(tasks, results):
        rows.extend((n, seed, float(v), float(m)) for v, m in zip(dist.values, dist.mass))
        summary.append((n, seed, float(np.dot(dist.mass, dist.values**2))))

    files = {
        "histogram.csv": csv_text(["n", "instance_seed", "overlap_value", "probability"], rows),
        "histogram_summary.csv": csv_text(["n", "instance_seed", "mean_sq_overlap"], summary),
    }
    limit_rows = []
    for n in cfg.n:
        law = limit_law(cfg.p, cfg.q, gammas, betas, effective_Lambda(cfg, n))
        centers = (2 * np.arange(n + 1) - n) / n
        edges = np.concatenate([centers - 1 / n, [1 + 1 / n]])
        mass = an.law_histogram(law, edges)
        limit_rows.extend((n, float(c), float(m)) for c, m in zip(centers, mass))

        chart = Chart(f"Overlap distribution, n={n}, q={cfg.q}, p={cfg.p}", "overlap R", "probability")
        for (tn, _), (seed, dist) in zip(tasks, results):
            if tn == n:
                chart.add("", list(dist.values), list(dist.mass), style="dashed", color="#9bbcd9")
        chart.add("limit law", list(centers), list(mass), style="step", color="#d62728")
        files[f"histogram_n{n}.svg"] = chart.render()
    files["histogram_limit.csv"] = csv_text(["n", "overlap_value", "probability"], limit_rows)
    paths = _emit(out, files)
    progress.log("done", files=[p.name for p in paths])
    return paths


# --- convergence --------------------------------------------------------
def _exact_sq_overlap(cfg: ExperimentConfig, n: int, gamma: float, beta: float) -> float | None:
    if cfg.p != 1:
        return None
    lam = cfg.snr(n)
    if cfg.q == 2:
        return an.p1_q2_expected_sq_overlap(n, gamma, beta, lam)
    return an.p1_expected_sq_overlap_general_q(n, cfg.q, gamma, beta, lam)


def run_convergence(cfg: ExperimentConfig) -> list[Path]:
    out, progress = _prepare(cfg)
    gammas, betas = resolve_angles(cfg)
    schedule = QaoaSchedule(gammas, betas)
    sims: dict[int, list[float]] = {}
    if cfg.simulate:
        tasks = [(n, i) for n in cfg.n for i in range(cfg.instances)]
        results = pmap(lambda t: _simulate(cfg, t[0], t[1], schedule), tasks, cfg.threads, progress)
        for (n, _), (_, dist) in zip(tasks, results):
            sims.setdefault(n, []).append(float(np.dot(dist.mass, dist.values**2)))

    rows, dev_sim, dev_exact = [], [], []
    for n in cfg.n:
        limit = an.law_moment(limit_law(cfg.p, cfg.q, gammas, betas, effective_Lambda(cfg, n)), 2)
        exact = _exact_sq_overlap(cfg, n, gammas[0], betas[0])
        sim, se = _mean_se(sims[n]) if n in sims else (None, None)
        d_sim = None if sim is None else sim - limit
        d_exact = None if exact is None else exact - limit
        if d_sim is not None:
            dev_sim.append((n, d_sim))
        if d_exact is not None:
            dev_exact.append((n, d_exact))
        rows.append((n, cfg.snr(n), len(sims.get(n, [])), sim, se, exact, limit, d_sim, d_exact))

    fits = []
    chart = Chart(f"|<R^2> - limit|, q={cfg.q}, p={cfg.p}", "n", "|deviation|", logx=True, logy=True)
    for label, pts in (("simulated", dev_sim), ("exact", dev_exact)):
        if len(pts) >= 2:
            xs, ys = zip(*pts)
            slope, icpt = loglog_slope(xs, ys)
            fits.append((label, slope, icpt))
            chart.add(label, list(xs), [abs(y) for y in ys], style="points")
            chart.add(f"{label} fit, slope {slope:.3f}", list(xs), [math.exp(icpt) * x**slope for x in xs], style="dashed")
    files = {
        "convergence.csv": csv_text(
            [
                "n",
                "lambda_n",
                "instances",
                "simulated_sq_overlap",
                "simulated_stderr",
                "exact_sq_overlap",
                "limit_sq_overlap",
                "deviation_simulated",
                "deviation_exact",
            ],
            rows,
        ),
        "convergence_fit.csv": csv_text(["method", "slope", "intercept"], fits),
        "convergence.svg": chart.render(),
    }
    paths = _emit(out, files)
    progress.log("done", files=[p.name for p in paths])
    return paths


# --- enhancement-factor grid (table1) -----------------------------------
def run_table1(cfg: ExperimentConfig) -> list[Path]:
    out, progress = _prepare(cfg)
    cells = [(p, q) for p in cfg.p_values for q in cfg.q_values]
    reports = pmap(
        lambda c: optimize_enhancement(c[0], c[1], cfg.starts, stream(cfg.seed, "table1", c[0], c[1])),
        cells,
        cfg.threads,
        progress,
    )
    rows = [(r.p, r.q, r.best_value, r.best_gammas, r.best_betas, r.starts) for r in reports]
    by_cell = {(r.p, r.q): r.best_value for r in reports}
    grid = [(p, *(by_cell[(p, q)] for q in cfg.q_values)) for p in cfg.p_values]
    files = {
        "table1.csv": csv_text(["p", "q", "enhancement", "gammas", "betas", "starts"], rows),
        "table1_grid.csv": csv_text(["p", *(f"q={q}" for q in cfg.q_values)], grid),
    }
    paths = _emit(out, files)
    progress.log("done", files=[p.name for p in paths])
    return paths


# --- MGF cross-check ----------------------------------------------------
MGF_HEADER = ["method", "n", "q", "gamma", "beta", "lambda", "zeta", "value", "reference", "discrepancy", "stderr"]


def _mgf_point_rows(n, q, g, b, lam, zetas) -> list[tuple]:
    rows = []
    general = an.p1_expected_sq_overlap_general_q(n, q, g, b, lam)
    ref = an.p1_q2_expected_sq_overlap(n, g, b, lam) if q == 2 else general
    if q == 2:
        rows.append(("closed-form", n, q, g, b, lam, None, ref, ref, 0.0, None))
    rows.append(("general-q", n, q, g, b, lam, None, general, ref, general - ref, None))
    fd = an.mgf_second_moment(n, q, g, b, lam)
    rows.append(("mgf-second-derivative", n, q, g, b, lam, None, fd, ref, fd - ref, None))
    for z in zetas:
        res = an.p1_expected_mgf_series(n, q, g, b, lam, z)
        value = float(res.value.real)
        mref = 1.0 if z == 0 else None
        rows.append(("mgf", n, q, g, b, lam, z, value, mref, None if mref is None else value - mref, None))
    return rows


def run_mgf_check(cfg: ExperimentConfig) -> list[Path]:
    out, progress = _prepare(cfg)
    q = cfg.q
    points = [(n, g, b, lam) for n in cfg.n for g in cfg.gammas for b in cfg.betas for lam in cfg.lams]
    blocks = pmap(lambda t: _mgf_point_rows(t[0], q, t[1], t[2], t[3], cfg.zetas), points, cfg.threads, progress)
    rows = [r for block in blocks for r in block]

    # simulator Monte Carlo on the diagonal of the grid, small n only
    mc_sizes = [n for n in cfg.n if n <= min(10, cfg.max_n)]
    diag = list(zip(cfg.gammas, cfg.betas, cfg.lams))
    tasks = [(n, j, i) for n in mc_sizes for j in range(len(diag)) for i in range(cfg.instances)]

    def simulate(t):
        n, j, i = t
        g, b, lam = diag[j]
        inst = generate_instance(n, q, lam, derive_seed(cfg.seed, "mgf", n, j, i))
        state = run_qaoa(inst, QaoaSchedule([g], [b]), prepare_uniform(n))
        dist = overlap_distribution(state, inst.u)
        return [float(np.dot(dist.mass, dist.values**2))] + [
            float(np.dot(dist.mass, np.exp(z * dist.values))) for z in cfg.zetas
        ]

    samples = pmap(simulate, tasks, cfg.threads, progress)
    for n in mc_sizes:
        for j, (g, b, lam) in enumerate(diag):
            block = np.array([s for t, s in zip(tasks, samples) if t[0] == n and t[1] == j])
            mean, se = _mean_se(block[:, 0])
            ref = an.p1_expected_sq_overlap_general_q(n, q, g, b, lam)
            rows.append(("simulator", n, q, g, b, lam, None, mean, ref, mean - ref, se))
            for col, z in enumerate(cfg.zetas, start=1):
                mean, se = _mean_se(block[:, col])
                mref = float(an.p1_expected_mgf(n, q, g, b, lam, z).real)
                rows.append(("simulator-mgf", n, q, g, b, lam, z, mean, mref, mean - mref, se))

    paths = _emit(out, {"mgf_check.csv": csv_text(MGF_HEADER, rows)})
    progress.log("done", files=[p.name for p in paths])
    return paths


# --- boosting -----------------------------------------------------------
BOOST_HEADER = [
    "leg",
    "n",
    "q",
    "c",
    "k",
    "delta",
    "Lambda",
    "lambda_n",
    "samples",
    "mean_overlap",
    "stderr",
    "limit",
    "finite_n_exact",
]


def boosting_snr(n: int, q: int, c: float, Lambda: float) -> float:
    return Lambda * n ** ((1 - c) * (q - 1))


def run_boosting(cfg: ExperimentConfig) -> list[Path]:
    if cfg.p != 1:
        raise ConfigError("boosting uses a single QAOA layer (p = 1)")
    out, progress = _prepare(cfg)
    q, c = cfg.q, cfg.c
    (gamma,), (beta,) = resolve_angles(cfg, 1)
    rows = []

    # QAOA leg: one instance per (n, Lambda, i), reused across the delta grid
    tasks = [(n, li, i) for n in cfg.n for li in range(len(cfg.Lambdas)) for i in range(cfg.instances)]

    def simulate(t):
        n, li, i = t
        lam = boosting_snr(n, q, c, cfg.Lambdas[li])
        k = round(n**c)
        inst = generate_instance(n, q, lam, _instance_seed(cfg, n, i))
        diag = None
        means = []
        for di, delta in enumerate(cfg.deltas):
            bias = sample_bias(n, k, delta, stream(cfg.seed, "bias", n, li, di, i))
            init = prepare_biased(inst.u, bias, max_n=cfg.max_n)
            if diag is None:
                diag = cost_diagonal(inst, max_n=cfg.max_n)
            state = run_qaoa(inst, QaoaSchedule([gamma], [beta]), init, diag=diag, max_n=cfg.max_n)
            dist = overlap_distribution(state, inst.u)
            means.append(float(np.dot(dist.mass, dist.values)))
        return means

    results = pmap(simulate, tasks, cfg.threads, progress)
    for n in cfg.n:
        k = round(n**c)
        for li, Lam in enumerate(cfg.Lambdas):
            lam = boosting_snr(n, q, c, Lam)
            block = np.array([r for t, r in zip(tasks, results) if t[0] == n and t[1] == li])
            for di, delta in enumerate(cfg.deltas):
                mean, se = _mean_se(block[:, di])
                rows.append(
                    (
                        "qaoa",
                        n,
                        q,
                        c,
                        k,
                        delta,
                        Lam,
                        lam,
                        block.shape[0],
                        mean,
                        se,
                        an.qaoa_biased_limit(q, gamma, beta, delta, Lam),
                        an.p1_biased_expected_overlap(n, q, gamma, beta, lam, k, delta),
                    )
                )

    # power-iteration leg at large n through the implicit sampler
    n = cfg.pi_n
    k = round(n**c)
    pi_tasks = [(di, li) for di in range(len(cfg.deltas)) for li in range(len(cfg.Lambdas))]

    def pi_block(t):
        di, li = t
        lam = boosting_snr(n, q, c, cfg.Lambdas[li])
        vals = np.empty(cfg.pi_seeds)
        for s in range(cfg.pi_seeds):
            g = stream(cfg.seed, "boost-pi", di, li, s)
            u = np.where(g.random(n) < 0.5, 1.0, -1.0)
            init = biased_init(u, k, cfg.deltas[di], g)
            vals[s] = implicit_power_iteration(u, q, lam, 1, init, g).overlaps[0]
        return vals

    pi_results = pmap(pi_block, pi_tasks, cfg.threads, progress)
    for (di, li), vals in zip(pi_tasks, pi_results):
        delta, Lam = cfg.deltas[di], cfg.Lambdas[li]
        mean, se = _mean_se(vals)
        rows.append(
            ("power-iteration", n, q, c, k, delta, Lam, boosting_snr(n, q, c, Lam), vals.size, mean, se,
             an.pi_biased_limit(q, delta, Lam), None)
        )  # fmt: skip

    paths = _emit(out, {"boosting.csv": csv_text(BOOST_HEADER, rows)})
    progress.log("done", files=[p.name for p in paths])
    return paths


# --- classical baselines vs QAOA law ------------------------------------
BASELINE_HEADER = [
    "method",
    "n",
    "q",
    "p",
    "Lambda",
    "samples",
    "mean_sq_overlap",
    "stderr",
    "law_sq_overlap",
    "ks_statistic",
    "ks_pvalue",
]


def pi_overlap_samples(n: int, q: int, p: int, Lambda: float, seeds: int, seed: int, *, threads: int = 1):
    """Final and rounded 1-step overlaps of ``p``-step power iteration at scale ``Lambda``."""
    lam = Lambda * n ** ((q - 2 + an.epsilon_p(p, q)) / 2)
    lam1 = Lambda * n ** ((q - 2 + an.epsilon_p(1, q)) / 2)

    def one(s):
        g = stream(seed, "pi", n, p, s)
        u = np.where(g.random(n) < 0.5, 1.0, -1.0)
        init = random_init(n, g)
        final = implicit_power_iteration(u, q, lam, p, init, g).overlaps[-1]
        g1 = stream(seed, "pi-rounded", n, s)
        u1 = np.where(g1.random(n) < 0.5, 1.0, -1.0)
        v1 = implicit_power_iteration(u1, q, lam1, 1, random_init(n, g1), g1).iterates[0]
        return final, float(u1 @ round_sign(v1)) / n

    out = pmap(one, list(range(seeds)), threads)
    return np.array([a for a, _ in out]), np.array([b for _, b in out])


def run_baseline_compare(cfg: ExperimentConfig) -> list[Path]:
    out, progress = _prepare(cfg)
    q, p, Lam = cfg.q, cfg.p, cfg.Lambda
    rows = []
    law_rng = stream(cfg.seed, "law-samples")
    for n in cfg.n:
        t = time.perf_counter()
        final, rounded = pi_overlap_samples(n, q, p, Lam, cfg.instances, cfg.seed, threads=cfg.threads)
        progress.log("pi", n=n, seconds=round(time.perf_counter() - t, 6))
        for method, data, law in (
            ("power-iteration", final, an.pi_asymptotic_law(p, q, Lam)),
            ("rounded-power-iteration", rounded, an.rounded_pi_law(q, Lam)),
        ):
            ref = an.sample_law(law, LAW_SAMPLES, law_rng)
            ks = ks_2samp(data, ref)
            mean, se = _mean_se(data**2)
            rows.append(
                (method, n, q, p if method == "power-iteration" else 1, Lam, data.size, mean, se,
                 an.law_moment(law, 2), float(ks.statistic), float(ks.pvalue))
            )  # fmt: skip
        if q % 2 == 0 and n**q <= DEFAULT_MAX_ENTRIES:
            vals = []
            for s in range(cfg.instances):
                inst = generate_instance(n, q, cfg.snr(n), derive_seed(cfg.seed, "unfold", n, s))
                v = unfold_spectral(inst, p, stream(cfg.seed, "unfold", n, s))
                vals.append((float(inst.u @ v) / n) ** 2)
            mean, se = _mean_se(vals)
            rows.append(("unfold-spectral", n, q, p, Lam, len(vals), mean, se, None, None, None))

    gammas, betas = resolve_angles(cfg)
    law = limit_law(p, q, gammas, betas, Lam)
    rows.append(("qaoa-law", None, q, p, Lam, None, None, None, an.law_moment(law, 2), None, None))
    paths = _emit(out, {"baseline_compare.csv": csv_text(BASELINE_HEADER, rows)})
    progress.log("done", files=[p.name for p in paths])
    return paths


def generate_instances(out: str | Path, n: int, q: int, lam: float, seed: int, count: int = 1) -> list[Path]:
    """Write ``count`` instances with seeds derived from ``seed``; instance ``i`` is reproducible alone."""
    if count < 1:
        raise ConfigError("count must be positive")
    if n < 2 or q < 2 or lam < 0:
        raise ConfigError("need n >= 2, q >= 2 and lam >= 0")
    if n**q > DEFAULT_MAX_ENTRIES:
        raise CapacityError(f"n^q = {n}^{q} exceeds the tensor size cap")
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for i in range(count):
        inst = generate_instance(n, q, lam, derive_seed(seed, "instance", n, i))
        paths.append(save_instance(inst, out / f"instance_n{n}_q{q}_{i:04d}.spkt"))
    return paths


RUNNERS: dict[str, Callable[[ExperimentConfig], list[Path]]] = {
    "histogram": run_histogram,
    "convergence": run_convergence,
    "table1": run_table1,
    "mgf-check": run_mgf_check,
    "boosting": run_boosting,
    "baseline-compare": run_baseline_compare,
}
