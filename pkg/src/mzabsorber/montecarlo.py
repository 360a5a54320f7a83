"""Seeded Monte Carlo runs of the absorber models.

Every trial consumes a fixed number of uniform doubles from a single PCG64
stream: first the model's randomness (absorber branch or phases), then one
draw for the outcome.  A trial range ``[start, start + n)`` jumps the stream
ahead by ``start * draws_per_trial``, so disjoint ranges can run on separate
workers and their merged counts match a single-worker run exactly.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from mzabsorber.errors import ConfigError
from mzabsorber.models import Model, ScenarioConfig, branch_distributions, outcome_distribution

RNG_NAME = "numpy.PCG64"
MAX_SEED = 2**64 - 1
BLOCK = 1 << 18

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class TrialSummary:
    n_trials: int
    clicks_d: int
    clicks_c: int
    absorbed: int
    seed: Optional[int]
    model: ScenarioConfig
    rng: str = RNG_NAME

    def __post_init__(self):
        if self.n_trials < 1:
            raise ConfigError("nTrials: must be >= 1")
        if min(self.clicks_d, self.clicks_c, self.absorbed) < 0:
            raise ValueError("negative counts")
        if self.clicks_d + self.clicks_c + self.absorbed != self.n_trials:
            raise ValueError("outcome counts do not add up to nTrials")

    @property
    def estimate_d(self) -> float:
        return self.clicks_d / self.n_trials

    @property
    def std_err_d(self) -> float:
        p = self.estimate_d
        return math.sqrt(p * (1.0 - p) / self.n_trials)

    def to_dict(self) -> dict:
        return {
            "nTrials": self.n_trials,
            "clicksD": self.clicks_d,
            "clicksC": self.clicks_c,
            "absorbed": self.absorbed,
            "estimateD": self.estimate_d,
            "stdErrD": self.std_err_d,
            "seed": self.seed,
            "rng": self.rng,
            "model": self.model.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> TrialSummary:
        return cls(
            d["nTrials"],
            d["clicksD"],
            d["clicksC"],
            d["absorbed"],
            d["seed"],
            ScenarioConfig.from_dict(d["model"]),
            d.get("rng", RNG_NAME),
        )


def draws_per_trial(model: Model) -> int:
    branch = 1 if model is Model.COLLAPSED_MIXTURE else 0
    return branch + model.random_phases + 1


def _check_seed(seed: int) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise ConfigError(f"seed: must be an integer, got {seed!r}")
    if not 0 <= seed <= MAX_SEED:
        raise ConfigError(f"seed: must fit in 64 bits unsigned, got {seed}")
    return int(seed)


def stream(seed: int, start: int, model: Model) -> np.random.Generator:
    """Generator positioned at trial ``start`` of the run keyed by ``seed``."""
    bitgen = np.random.PCG64(_check_seed(seed))
    bitgen.advance(int(start) * draws_per_trial(model))
    return np.random.Generator(bitgen)


def _count_block(config: ScenarioConfig, u: np.ndarray) -> tuple[int, int, int]:
    model = config.model
    if model is Model.COLLAPSED_MIXTURE:
        (da, ca, _), (db, cb, _) = branch_distributions(config)
        in_a = u[:, 0] < config.weight_a2
        p_d = np.where(in_a, da, db)
        p_c = np.where(in_a, ca, cb)
    else:
        phases = [TWO_PI * u[:, k] for k in range(model.random_phases)]
        p_d, p_c, _ = outcome_distribution(config, *phases)
        p_d = np.broadcast_to(p_d, u.shape[:1])
        p_c = np.broadcast_to(p_c, u.shape[:1])
    v = u[:, -1]
    hit_d = v < p_d
    hit_c = ~hit_d & (v < p_d + p_c)
    n_d = int(np.count_nonzero(hit_d))
    n_c = int(np.count_nonzero(hit_c))
    return n_d, n_c, len(v) - n_d - n_c


def run_range(config: ScenarioConfig, start: int, n_trials: int, seed: int) -> TrialSummary:
    """Trials ``[start, start + n_trials)`` of the run keyed by ``seed``."""
    if n_trials < 1:
        raise ConfigError("nTrials: must be >= 1")
    if start < 0:
        raise ConfigError("start: must be >= 0")
    gen = stream(seed, start, config.model)
    k = draws_per_trial(config.model)
    counts = np.zeros(3, dtype=np.int64)
    done = 0
    while done < n_trials:
        m = min(BLOCK, n_trials - done)
        counts += _count_block(config, gen.random((m, k)))
        done += m
    d, c, a = (int(x) for x in counts)
    return TrialSummary(n_trials, d, c, a, int(seed), config)


def run_trials(
    config: ScenarioConfig, n_trials: int, seed: int, workers: int = 1
) -> TrialSummary:
    """Run ``n_trials`` independent, freshly prepared trials.

    The result depends only on ``(config, n_trials, seed)``; ``workers``
    changes wall time, not counts.
    """
    if isinstance(n_trials, bool) or not isinstance(n_trials, (int, np.integer)) or n_trials < 1:
        raise ConfigError(f"nTrials: must be a positive integer, got {n_trials!r}")
    _check_seed(seed)
    workers = max(1, min(int(workers), n_trials))
    if workers == 1:
        return run_range(config, 0, n_trials, seed)
    edges = np.linspace(0, n_trials, workers + 1).astype(int)
    with ThreadPoolExecutor(workers) as pool:
        parts = list(
            pool.map(
                lambda r: run_range(config, int(r[0]), int(r[1] - r[0]), seed),
                zip(edges[:-1], edges[1:]),
            )
        )
    out = parts[0]
    for p in parts[1:]:
        out = merge(out, p)
    return out


def merge(a: TrialSummary, b: TrialSummary) -> TrialSummary:
    """Pool two summaries of the same model.

    Counts add.  The seed is kept when both share it and dropped otherwise.
    """
    if a.model != b.model:
        raise ConfigError("cannot merge summaries of different models")
    if a.rng != b.rng:
        raise ConfigError("cannot merge summaries from different generators")
    return TrialSummary(
        a.n_trials + b.n_trials,
        a.clicks_d + b.clicks_d,
        a.clicks_c + b.clicks_c,
        a.absorbed + b.absorbed,
        a.seed if a.seed == b.seed else None,
        a.model,
        a.rng,
    )
