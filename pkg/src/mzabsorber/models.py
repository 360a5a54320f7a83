"""The six absorber models and their detector-D click probabilities.

Every model has an engine route (state evolution through
:mod:`mzabsorber.interferometer`) and, where one exists, a closed form.
The closed forms are kept separate from the engine so each can check the
other.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from mzabsorber.errors import ConfigError
from mzabsorber.interferometer import (
    LOWER_PATH,
    UPPER_PATH,
    DeviceGeometry,
    JointState,
    Mode,
    PhotonState,
    apply_beam_splitter,
    apply_mirrors,
    apply_partial_absorber,
    apply_phase,
    evolve_device,
    evolve_joint,
    evolve_through,
    outcome_probabilities,
)

SQRT2 = math.sqrt(2.0)
# Lowest click rate reachable by the fixed-phase family (at theta = 0).
COHERENT_MINIMUM = (3.0 - 2.0 * SQRT2) / 8.0
COLLAPSE_VALUE = 0.125
PERSISTENCE_VALUE = 0.375
# Fixed phase at which a coherent coupling reproduces the collapse value.
CONFOUND_THETA = math.pi / 4


class Model(str, enum.Enum):
    COLLAPSED_MIXTURE = "collapsed"
    ENTANGLED_RANDOM_PHASE = "entangled-random"
    COHERENT_FIXED_PHASE = "coherent-fixed"
    FINE_TUNED_MIMIC = "fine-tuned-mimic"
    RANDOM_LOWER_PHASE = "random-lower"
    BLOCKED_BOTH_PATHS = "blocked-both"

    @property
    def random_phases(self) -> int:
        """Number of uniform phases resampled on every run."""
        return _RANDOM_PHASES[self]

    @property
    def description(self) -> str:
        return _DESCRIPTIONS[self]


_RANDOM_PHASES = {
    Model.COLLAPSED_MIXTURE: 0,
    Model.ENTANGLED_RANDOM_PHASE: 1,
    Model.COHERENT_FIXED_PHASE: 0,
    Model.FINE_TUNED_MIMIC: 1,
    Model.RANDOM_LOWER_PHASE: 2,
    Model.BLOCKED_BOTH_PATHS: 2,
}

_DESCRIPTIONS = {
    Model.COLLAPSED_MIXTURE: (
        "absorber already in a definite position; proper mixture of the "
        "open and blocked devices (Pb(D) = 1/8)"
    ),
    Model.ENTANGLED_RANDOM_PHASE: (
        "absorber stays superposed; surviving upper fraction gets a fresh "
        "uniform phase each run (Pb(D) = 3/8 on average)"
    ),
    Model.COHERENT_FIXED_PHASE: (
        "absorber stays superposed with a fixed coupling phase theta; "
        "Pb(D) = |3 - 2 sqrt2 cos theta| / 8"
    ),
    Model.FINE_TUNED_MIMIC: (
        "half of the lower photon shares the upper photon's random phase; "
        "reproduces the collapse value for every theta"
    ),
    Model.RANDOM_LOWER_PHASE: (
        "independent random phases on both arms; only the relative phase "
        "matters, so it averages to 3/8"
    ),
    Model.BLOCKED_BOTH_PATHS: (
        "variant device: position A blocks the upper path, position B the "
        "lower path; branches never interfere"
    ),
}


class Method(str, enum.Enum):
    CLOSED_FORM = "closed-form"
    QUADRATURE = "quadrature"
    JOINT_ENGINE = "joint-engine"


def _check_weights(weight_a2: float, weight_b2: float) -> None:
    for key, w in (("weightA2", weight_a2), ("weightB2", weight_b2)):
        if not (math.isfinite(w) and 0.0 <= w <= 1.0):
            raise ConfigError(f"{key} must be a probability, got {w!r}")
    if abs(weight_a2 + weight_b2 - 1.0) > 1e-12:
        raise ConfigError(
            f"weightA2 + weightB2 must equal 1, got {weight_a2!r} + {weight_b2!r}"
        )


@dataclass(frozen=True)
class ScenarioConfig:
    model: Model
    weight_a2: float = 0.5
    weight_b2: float = 0.5
    fixed_theta: Optional[float] = None
    geometry: DeviceGeometry = field(default=None)

    def __post_init__(self):
        try:
            model = Model(self.model)
        except ValueError:
            raise ConfigError(f"model: unknown model {self.model!r}") from None
        object.__setattr__(self, "model", model)
        _check_weights(self.weight_a2, self.weight_b2)
        if model is Model.COHERENT_FIXED_PHASE:
            if self.fixed_theta is None or not math.isfinite(self.fixed_theta):
                raise ConfigError("fixedTheta: required (finite) for coherent-fixed")
        elif self.fixed_theta is not None:
            raise ConfigError(f"fixedTheta: only valid for coherent-fixed, not {model.value}")
        if self.geometry is None:
            default = (
                DeviceGeometry.blocked_both()
                if model is Model.BLOCKED_BOTH_PATHS
                else DeviceGeometry.main()
            )
            object.__setattr__(self, "geometry", default)
        if model in _COHERENT and self.geometry != DeviceGeometry.main():
            raise ConfigError(f"geometry: {model.value} is defined on the main device only")

    def to_dict(self) -> dict:
        g = self.geometry
        return {
            "model": self.model.value,
            "weightA2": self.weight_a2,
            "weightB2": self.weight_b2,
            "fixedTheta": self.fixed_theta,
            "geometry": {
                "blockedModeInA": g.blocked_in_a.value if g.blocked_in_a else None,
                "blockedModeInB": g.blocked_in_b.value if g.blocked_in_b else None,
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> ScenarioConfig:
        g = d.get("geometry")
        geometry = None
        if g is not None:
            geometry = DeviceGeometry(
                Mode(g["blockedModeInA"]) if g.get("blockedModeInA") else None,
                Mode(g["blockedModeInB"]) if g.get("blockedModeInB") else None,
            )
        return cls(
            Model(d["model"]),
            float(d.get("weightA2", 0.5)),
            float(d.get("weightB2", 0.5)),
            d.get("fixedTheta"),
            geometry,
        )


_COHERENT = {
    Model.ENTANGLED_RANDOM_PHASE,
    Model.COHERENT_FIXED_PHASE,
    Model.FINE_TUNED_MIMIC,
    Model.RANDOM_LOWER_PHASE,
}


@dataclass(frozen=True)
class AnalyticResult:
    probability: float
    model: ScenarioConfig
    method: Method

    def __post_init__(self):
        p = float(self.probability)
        if not -1e-12 <= p <= 1.0 + 1e-12:
            raise ValueError(f"probability out of range: {p}")
        object.__setattr__(self, "probability", min(max(p, 0.0), 1.0))
        object.__setattr__(self, "method", Method(self.method))

    def to_dict(self) -> dict:
        return {
            "probability": self.probability,
            "method": self.method.value,
            "model": self.model.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> AnalyticResult:
        return cls(d["probability"], ScenarioConfig.from_dict(d["model"]), Method(d["method"]))


# --- closed forms -----------------------------------------------------------


def pb_collapsed(weight_a2: float = 0.5, weight_b2: float = 0.5) -> AnalyticResult:
    """Proper mixture: open device never clicks D, blocked device clicks 1/4."""
    _check_weights(weight_a2, weight_b2)
    config = ScenarioConfig(Model.COLLAPSED_MIXTURE, weight_a2, weight_b2)
    return AnalyticResult(weight_a2 * 0.0 + weight_b2 * 0.25, config, Method.CLOSED_FORM)


def pb_random_phase_given_theta(theta, weight_a2: float = 0.5):
    """D probability with the surviving upper fraction at phase ``theta``.

    For equal weights this is ``(3 - 2*sqrt(2)*cos(theta)) / 8``.  Accepts
    arrays.
    """
    r = math.sqrt(weight_a2)
    return (1.0 + weight_a2 - 2.0 * r * np.cos(theta)) / 4.0


def pb_random_phase_average(weight_a2: float = 0.5, weight_b2: float = 0.5) -> AnalyticResult:
    # the cosine term integrates to zero over a full period
    _check_weights(weight_a2, weight_b2)
    config = ScenarioConfig(Model.ENTANGLED_RANDOM_PHASE, weight_a2, weight_b2)
    return AnalyticResult((1.0 + weight_a2) / 4.0, config, Method.CLOSED_FORM)


def pb_coherent_fixed(theta: float, weight_a2: float = 0.5, weight_b2: float = 0.5) -> AnalyticResult:
    _check_weights(weight_a2, weight_b2)
    arg = 1.0 + weight_a2 - 2.0 * math.sqrt(weight_a2) * math.cos(theta)
    # (1 - sqrt(wA))^2 <= arg, so the absolute value never bites
    assert arg >= -1e-15, arg
    config = ScenarioConfig(Model.COHERENT_FIXED_PHASE, weight_a2, weight_b2, fixed_theta=theta)
    return AnalyticResult(abs(arg) / 4.0, config, Method.CLOSED_FORM)


def reference_probability(config: ScenarioConfig) -> float:
    """Ensemble-average D click probability (closed form) for ``config``."""
    wa, wb = config.weight_a2, config.weight_b2
    m = config.model
    if m is Model.COLLAPSED_MIXTURE:
        return pb_collapsed(wa, wb).probability
    if m in (Model.ENTANGLED_RANDOM_PHASE, Model.RANDOM_LOWER_PHASE):
        return (1.0 + wa) / 4.0
    if m is Model.COHERENT_FIXED_PHASE:
        return pb_coherent_fixed(config.fixed_theta, wa, wb).probability
    if m is Model.FINE_TUNED_MIMIC:
        return wb / 4.0
    # each blocked-both branch sends half a photon into BS2 through one arm
    return 0.25


# --- engine routes ----------------------------------------------------------


def _superposed_absorber(weight_a2: float, theta):
    return lambda s: apply_partial_absorber(s, UPPER_PATH, weight_a2, theta)


def coherent_state(theta, weight_a2: float = 0.5) -> PhotonState:
    """Output state with the upper survivor at phase ``theta``."""
    return evolve_through(PhotonState.basis(), _superposed_absorber(weight_a2, theta))


def random_lower_state(theta_upper, theta_lower, weight_a2: float = 0.5) -> PhotonState:
    def arm(s):
        return apply_phase(_superposed_absorber(weight_a2, theta_upper)(s), LOWER_PATH, theta_lower)

    return evolve_through(PhotonState.basis(), arm)


def mimic_parts(theta, weight_a2: float = 0.5) -> tuple[PhotonState, PhotonState]:
    """Output of the fine-tuned mimic as two mutually incoherent parts.

    The lower arm is split into a fraction that carries the same phase as
    the upper survivor (and so stays coherent with it) and an untouched
    remainder in an orthogonal environment state.  The returned parts are
    unnormalized; their norms sum to one.
    """
    s = apply_mirrors(apply_beam_splitter(PhotonState.basis()))
    lower = s.amplitude(LOWER_PATH)
    s = apply_partial_absorber(s, UPPER_PATH, weight_a2, theta)
    kick = np.exp(1j * np.asarray(theta))
    perturbed = s.with_amplitude(LOWER_PATH, math.sqrt(weight_a2) * kick * lower)
    untouched = PhotonState(0.0, 0.0).with_amplitude(
        LOWER_PATH, math.sqrt(1.0 - weight_a2) * lower
    )
    return apply_beam_splitter(perturbed), apply_beam_splitter(untouched)


def joint_output(config: ScenarioConfig, phase_a=0.0, phase_b=0.0) -> JointState:
    j = JointState.prepare(config.weight_a2, config.weight_b2)
    return evolve_joint(j, config.geometry, phase_a, phase_b)


def outcome_distribution(config: ScenarioConfig, *phases):
    """(P(D), P(C), P(absorbed)) from the engine.

    ``phases`` are the per-run random phases (``config.model.random_phases``
    of them; scalars or equal-shape arrays).  The coherent fixed-phase model
    uses ``config.fixed_theta`` and the collapsed mixture takes none.
    """
    m = config.model
    if len(phases) != m.random_phases:
        raise ValueError(f"{m.value} takes {m.random_phases} phases, got {len(phases)}")
    wa = config.weight_a2
    if m is Model.COLLAPSED_MIXTURE:
        return outcome_probabilities(joint_output(config))
    if m is Model.BLOCKED_BOTH_PATHS:
        return outcome_probabilities(joint_output(config, *phases))
    if m is Model.COHERENT_FIXED_PHASE:
        return outcome_probabilities(coherent_state(config.fixed_theta, wa))
    if m is Model.ENTANGLED_RANDOM_PHASE:
        return outcome_probabilities(coherent_state(phases[0], wa))
    if m is Model.RANDOM_LOWER_PHASE:
        return outcome_probabilities(random_lower_state(phases[0], phases[1], wa))
    parts = [outcome_probabilities(p) for p in mimic_parts(phases[0], wa)]
    return tuple(x + y for x, y in zip(*parts))


def branch_distributions(config: ScenarioConfig):
    """Per-branch outcome distributions for a definite absorber position."""
    out = []
    for blocked in (config.geometry.blocked_in_a, config.geometry.blocked_in_b):
        out.append(outcome_probabilities(evolve_device(PhotonState.basis(), blocked)))
    return out


def pb_fine_tuned_mimic(theta: float, weight_a2: float = 0.5, weight_b2: float = 0.5) -> AnalyticResult:
    config = ScenarioConfig(Model.FINE_TUNED_MIMIC, weight_a2, weight_b2)
    p_d, _, _ = outcome_distribution(config, theta)
    return AnalyticResult(float(p_d), config, Method.JOINT_ENGINE)


def pb_random_lower(theta_upper: float, theta_lower: float, weight_a2: float = 0.5) -> float:
    return float(abs(random_lower_state(theta_upper, theta_lower, weight_a2).a2) ** 2)


def pb_blocked_both(
    theta_a: float, theta_b: float, weight_a2: float = 0.5, weight_b2: float = 0.5
) -> AnalyticResult:
    config = ScenarioConfig(Model.BLOCKED_BOTH_PATHS, weight_a2, weight_b2)
    p_d, _, _ = outcome_distribution(config, theta_a, theta_b)
    return AnalyticResult(float(p_d), config, Method.JOINT_ENGINE)


def probability_at(config: ScenarioConfig, theta: float) -> float:
    """Per-run D probability with the model's (first) phase set to ``theta``.

    Second phases are held at zero; the coherent fixed-phase model ignores
    ``config.fixed_theta`` here and is evaluated at ``theta``.
    """
    m = config.model
    wa, wb = config.weight_a2, config.weight_b2
    if m is Model.COLLAPSED_MIXTURE:
        return pb_collapsed(wa, wb).probability
    if m is Model.COHERENT_FIXED_PHASE:
        return pb_coherent_fixed(theta, wa, wb).probability
    if m is Model.ENTANGLED_RANDOM_PHASE:
        return float(pb_random_phase_given_theta(theta, wa))
    if m is Model.FINE_TUNED_MIMIC:
        return pb_fine_tuned_mimic(theta, wa, wb).probability
    if m is Model.RANDOM_LOWER_PHASE:
        return pb_random_lower(theta, 0.0, wa)
    return pb_blocked_both(theta, 0.0, wa, wb).probability


def analytic(config: ScenarioConfig, theta: Optional[float] = None) -> AnalyticResult:
    """Headline analytic value for a configured model.

    Without ``theta`` the phase-averaged models report their ensemble
    average.  With it they report the single run at that phase (the relative
    phase, for random-lower).  The collapsed and fixed-phase models ignore it.
    """
    m = config.model
    wa, wb = config.weight_a2, config.weight_b2
    if m is Model.COLLAPSED_MIXTURE:
        return pb_collapsed(wa, wb)
    if m is Model.COHERENT_FIXED_PHASE:
        return pb_coherent_fixed(config.fixed_theta, wa, wb)
    if m is Model.ENTANGLED_RANDOM_PHASE:
        if theta is None:
            return pb_random_phase_average(wa, wb)
        return AnalyticResult(float(pb_random_phase_given_theta(theta, wa)), config, Method.CLOSED_FORM)
    if m is Model.RANDOM_LOWER_PHASE:
        if theta is None:
            return AnalyticResult(reference_probability(config), config, Method.CLOSED_FORM)
        return AnalyticResult(pb_random_lower(theta, 0.0, wa), config, Method.JOINT_ENGINE)
    t = 0.0 if theta is None else theta
    if m is Model.FINE_TUNED_MIMIC:
        return pb_fine_tuned_mimic(t, wa, wb)
    return pb_blocked_both(t, 0.0, wa, wb)
