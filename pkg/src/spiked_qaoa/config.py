"""Experiment configuration: one JSON document per run, overridable from the CLI."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any

from .analytic.scaling import epsilon_p
from .errors import ConfigError

KINDS = ("histogram", "convergence", "table1", "mgf-check", "boosting", "baseline-compare")
SIMULATED_KINDS = ("histogram", "convergence", "boosting")
DEFAULT_MAX_N = 20


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    n: tuple[int, ...] = (12,)
    q: int = 2
    p: int = 1
    lambda_rule: str = "scaling"  # "scaling": Lambda * n^exponent, "fixed": lam
    Lambda: float = 1.0
    exponent: float | None = None  # None derives (q - 2 + eps_p) / 2
    lam: float = 0.0
    angles: Any = "table1-optimal"  # or {"gamma": [...], "beta": [...]}
    instances: int = 40
    seed: int = 0
    out: str = "results"
    threads: int = 1
    max_n: int = DEFAULT_MAX_N
    simulate: bool = True
    # table1
    p_values: tuple[int, ...] = (1,)
    q_values: tuple[int, ...] = (2, 3, 4, 5, 6, 7)
    starts: int = 300
    # mgf-check
    gammas: tuple[float, ...] = (0.2, 0.35, 0.5)
    betas: tuple[float, ...] = (0.3, math.pi / 4, 1.2)
    lams: tuple[float, ...] = (0.5, 2.0, 6.0)
    zetas: tuple[float, ...] = (0.0, 0.5, 1.0)
    # boosting
    c: float = 0.75
    deltas: tuple[float, ...] = (0.0, math.pi / 16, math.pi / 8)
    Lambdas: tuple[float, ...] = (1.0,)
    pi_n: int = 4000
    pi_seeds: int = 2000

    def __post_init__(self):
        for name in ("n", "p_values", "q_values", "gammas", "betas", "lams", "zetas", "deltas", "Lambdas"):
            value = getattr(self, name)
            if isinstance(value, (int, float)):
                value = (value,)
            object.__setattr__(self, name, tuple(value))
        if isinstance(self.angles, dict):
            object.__setattr__(
                self, "angles", {"gamma": list(self.angles["gamma"]), "beta": list(self.angles["beta"])}
            )

    # --- serialisation -------------------------------------------------
    def to_dict(self) -> dict:
        d = asdict(self)
        for k, v in d.items():
            if isinstance(v, tuple):
                d[k] = list(v)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        if "kind" not in data:
            raise ConfigError("config needs a 'kind'")
        try:
            return cls(**data)
        except (TypeError, ValueError, KeyError) as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_json(cls, text: str) -> ExperimentConfig:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data)

    @classmethod
    def load(cls, path: str | Path) -> ExperimentConfig:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        return cls.from_json(text)

    def override(self, **changes) -> ExperimentConfig:
        return replace(self, **{k: v for k, v in changes.items() if v is not None})

    # --- derived quantities -------------------------------------------
    def snr(self, n: int) -> float:
        """``lambda_n`` for size ``n`` under the configured rule."""
        if self.lambda_rule == "fixed":
            return self.lam
        exponent = (self.q - 2 + epsilon_p(self.p, self.q)) / 2 if self.exponent is None else self.exponent
        return self.Lambda * n**exponent

    def validate(self) -> ExperimentConfig:
        if self.kind not in KINDS:
            raise ConfigError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.lambda_rule not in ("scaling", "fixed"):
            raise ConfigError("lambda_rule must be 'scaling' or 'fixed'")
        if self.q < 2 or self.p < 1:
            raise ConfigError("need q >= 2 and p >= 1")
        if not self.n or any(int(v) != v or v < 2 for v in self.n):
            raise ConfigError("n must be a nonempty list of integers >= 2")
        if self.instances < 1:
            raise ConfigError("instances must be positive")
        if self.threads < 1:
            raise ConfigError("threads must be positive")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.Lambda < 0 or self.lam < 0:
            raise ConfigError("SNR parameters must be nonnegative")
        if self.angles != "table1-optimal":
            if not isinstance(self.angles, dict) or set(self.angles) != {"gamma", "beta"}:
                raise ConfigError("angles must be 'table1-optimal' or {'gamma': [...], 'beta': [...]}")
            if len(self.angles["gamma"]) != self.p or len(self.angles["beta"]) != self.p:
                raise ConfigError("explicit angles must have length p")
        if self.kind == "table1" and (self.starts < 1 or not self.p_values or not self.q_values):
            raise ConfigError("table1 needs starts >= 1 and nonempty p/q lists")
        if self.kind == "boosting":
            if not 0.5 < self.c < 1:
                raise ConfigError("boosting needs 1/2 < c < 1")
            if any(not 0 <= d <= math.pi / 4 for d in self.deltas):
                raise ConfigError("deltas must lie in [0, pi/4]")
        if self.kind == "convergence" and not self.simulate and self.p != 1:
            raise ConfigError("exact-formula convergence runs need p = 1")
        return self


DEFAULTS: dict[str, dict] = {
    "histogram": {
        "n": [12],
        "angles": {"gamma": [math.sqrt(math.log(5) / 32)], "beta": [math.pi / 4]},
        "instances": 40,
    },
    "convergence": {
        "n": [10, 12, 14, 16, 18, 20],
        "Lambda": 0.2,
        "angles": {"gamma": [math.sqrt(math.log(5) / 32)], "beta": [math.pi / 4]},
        "instances": 40,
    },
    "table1": {"p_values": [1, 2], "q_values": [2, 3, 4, 5, 6, 7], "starts": 300},
    "mgf-check": {"n": [50], "instances": 5000},
    "boosting": {"n": [20], "q": 3, "instances": 200, "angles": {"gamma": [1 / (2 * math.sqrt(3))], "beta": [math.pi / 4]}},
    "baseline-compare": {"n": [2000], "q": 3, "instances": 5000},
}


def default_config(kind: str) -> ExperimentConfig:
    if kind not in KINDS:
        raise ConfigError(f"kind must be one of {KINDS}, got {kind!r}")
    return ExperimentConfig(kind=kind, **DEFAULTS.get(kind, {}))
