"""Quadrature cross-checks and the collapse-vs-persistence decision layer."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from statistics import NormalDist
from typing import Callable

import numpy as np
from scipy import stats

from mzabsorber.errors import ConfigError
from mzabsorber.models import (
    COLLAPSE_VALUE,
    CONFOUND_THETA,
    PERSISTENCE_VALUE,
    ScenarioConfig,
    pb_coherent_fixed,
    probability_at,
)

TWO_PI = 2.0 * math.pi

CONFOUND_CAVEAT = (
    "A coherent fixed-phase coupling at theta = pi/4 also gives Pb(D) = "
    f"{pb_coherent_fixed(CONFOUND_THETA).probability:.12f}, and phases near 0 "
    "give values down to (3 - 2*sqrt(2))/8; agreement with 1/8 does not exclude "
    "a persistent superposition with such a coupling."
)


def quadrature_average(kernel: Callable[[float], float], n_nodes: int) -> float:
    """Mean of ``kernel`` over one period by the midpoint rule.

    Exact (up to rounding) for trigonometric polynomials whose highest
    harmonic is below ``n_nodes``.
    """
    if n_nodes < 2:
        raise ConfigError(f"nNodes: must be >= 2, got {n_nodes}")
    nodes = (np.arange(n_nodes) + 0.5) * (TWO_PI / n_nodes)
    return math.fsum(float(kernel(t)) for t in nodes) / n_nodes


def _check_counts(clicks: int, n: int) -> None:
    if n < 1:
        raise ConfigError(f"n: must be >= 1, got {n}")
    if not 0 <= clicks <= n:
        raise ConfigError(f"clicks: must lie in [0, n], got {clicks} of {n}")


def wilson_interval(clicks: int, n: int, confidence: float = 0.95) -> tuple[float, float]:
    _check_counts(clicks, n)
    if not 0.0 < confidence < 1.0:
        raise ConfigError(f"confidence: must lie in (0, 1), got {confidence}")
    z = NormalDist().inv_cdf(0.5 + confidence / 2.0)
    p = clicks / n
    z2n = z * z / n
    center = (p + z2n / 2.0) / (1.0 + z2n)
    half = z / (1.0 + z2n) * math.sqrt(p * (1.0 - p) / n + z2n / (4.0 * n))
    lo = 0.0 if clicks == 0 else max(0.0, center - half)
    hi = 1.0 if clicks == n else min(1.0, center + half)
    return lo, hi


def _check_open_probability(key: str, p: float) -> None:
    if not 0.0 < p < 1.0:
        raise ConfigError(f"{key}: must lie strictly inside (0, 1), got {p}")


def log_likelihood_ratio(clicks: int, n: int, p0: float, p1: float) -> float:
    """ln L(p1) - ln L(p0) in nats; positive favours ``p1``."""
    _check_counts(clicks, n)
    _check_open_probability("p0", p0)
    _check_open_probability("p1", p1)
    return clicks * math.log(p1 / p0) + (n - clicks) * math.log((1.0 - p1) / (1.0 - p0))


@dataclass(frozen=True)
class TestDesign:
    """Exact one-sided binomial test of ``p0`` against ``p1``.

    Rejects when the click count is ``>= critical`` (``p1 > p0``) or
    ``<= critical`` (``p1 < p0``).
    """

    n_trials: int
    critical: int
    upper: bool
    size: float
    power: float

    __test__ = False

    def rejects(self, clicks):
        clicks = np.asarray(clicks)
        return clicks >= self.critical if self.upper else clicks <= self.critical


def _design_at(n: int, p0: float, p1: float, alpha: float) -> TestDesign:
    ks = np.arange(n + 2)
    if p1 > p0:
        # P(X >= k) = sf(k - 1); smallest k whose tail fits inside alpha
        tails = stats.binom.sf(ks - 1, n, p0)
        c = int(np.argmax(tails <= alpha))
        return TestDesign(n, c, True, float(tails[c]), float(stats.binom.sf(c - 1, n, p1)))
    tails = stats.binom.cdf(ks - 1, n, p0)
    # largest k with P(X <= k) <= alpha; -1 means never reject
    c = int(np.nonzero(tails <= alpha)[0].max()) - 1
    size = float(stats.binom.cdf(c, n, p0)) if c >= 0 else 0.0
    power = float(stats.binom.cdf(c, n, p1)) if c >= 0 else 0.0
    return TestDesign(n, c, False, size, power)


def design_test(
    p0: float = COLLAPSE_VALUE,
    p1: float = PERSISTENCE_VALUE,
    alpha: float = 0.05,
    power: float = 0.95,
    max_trials: int = 1_000_000,
) -> TestDesign:
    """Smallest experiment whose exact test has size <= alpha and the power asked for."""
    _check_open_probability("p0", p0)
    _check_open_probability("p1", p1)
    _check_open_probability("alpha", alpha)
    _check_open_probability("power", power)
    if p0 == p1:
        raise ConfigError("p0 and p1 must differ")
    # exact power is not monotone in n, so walk n upward one at a time
    for n in range(1, max_trials + 1):
        d = _design_at(n, p0, p1, alpha)
        if d.power >= power:
            return d
    raise ConfigError(f"no design with n <= {max_trials} reaches power {power}")


def required_trials(
    p0: float = COLLAPSE_VALUE,
    p1: float = PERSISTENCE_VALUE,
    alpha: float = 0.05,
    power: float = 0.95,
) -> int:
    return design_test(p0, p1, alpha, power).n_trials


def calibration_rejection_rate(
    design: TestDesign, p_true: float, replications: int = 10_000, seed: int = 0
) -> float:
    """Fraction of simulated experiments at ``p_true`` that the test rejects."""
    rng = np.random.default_rng(seed)
    clicks = rng.binomial(design.n_trials, p_true, size=replications)
    return float(np.mean(design.rejects(clicks)))


class Verdict(str, enum.Enum):
    FAVORS_COLLAPSE = "favors-collapse"
    FAVORS_PERSISTENCE = "favors-persistence"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class DiscriminationReport:
    clicks: int
    n_trials: int
    confidence: float
    log_likelihood_ratio: float
    wilson_interval: tuple[float, float]
    verdict: Verdict
    p0: float = COLLAPSE_VALUE
    p1: float = PERSISTENCE_VALUE
    caveat: str = CONFOUND_CAVEAT

    def to_dict(self) -> dict:
        lo, hi = self.wilson_interval
        return {
            "clicks": self.clicks,
            "nTrials": self.n_trials,
            "estimateD": self.clicks / self.n_trials,
            "confidence": self.confidence,
            "logLikelihoodRatio": self.log_likelihood_ratio,
            "wilsonIntervalD": {"lo": lo, "hi": hi},
            "verdict": self.verdict.value,
            "p0": self.p0,
            "p1": self.p1,
            "caveat": self.caveat,
        }

    @classmethod
    def from_dict(cls, d: dict) -> DiscriminationReport:
        w = d["wilsonIntervalD"]
        return cls(
            d["clicks"],
            d["nTrials"],
            d["confidence"],
            d["logLikelihoodRatio"],
            (w["lo"], w["hi"]),
            Verdict(d["verdict"]),
            d["p0"],
            d["p1"],
            d["caveat"],
        )


def discriminate(
    clicks: int,
    n: int,
    confidence: float = 0.95,
    p0: float = COLLAPSE_VALUE,
    p1: float = PERSISTENCE_VALUE,
) -> DiscriminationReport:
    """Weigh collapse (``p0``) against persistence (``p1``) given D click counts.

    One hypothesis inside the Wilson interval and the other outside decides
    for the one inside.  Both inside is inconclusive, as is both outside on
    the same side of the data.  With the data strictly between two excluded
    hypotheses collapse is rejected, which favours persistence.
    """
    lo, hi = wilson_interval(clicks, n, confidence)
    llr = log_likelihood_ratio(clicks, n, p0, p1)
    in0, in1 = lo <= p0 <= hi, lo <= p1 <= hi
    if in0 and not in1:
        verdict = Verdict.FAVORS_COLLAPSE
    elif in1 and not in0:
        verdict = Verdict.FAVORS_PERSISTENCE
    elif in0 and in1:
        verdict = Verdict.INCONCLUSIVE
    elif (p0 < lo) == (p1 < lo):
        verdict = Verdict.INCONCLUSIVE
    else:
        verdict = Verdict.FAVORS_PERSISTENCE
    return DiscriminationReport(clicks, n, confidence, llr, (lo, hi), verdict, p0, p1)


def sweep_theta(config: ScenarioConfig, n_points: int) -> list[tuple[float, float]]:
    """(theta, P(D)) on ``n_points`` evenly spaced phases in [0, 2*pi)."""
    if n_points < 2:
        raise ConfigError(f"points: must be >= 2, got {n_points}")
    thetas = np.arange(n_points) * (TWO_PI / n_points)
    return [(float(t), probability_at(config, float(t))) for t in thetas]
