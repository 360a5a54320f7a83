"""Single-photon state evolution through the absorber interferometer.

The photon lives in three basis states: ``Mode.RIGHT`` (|1>, moving right),
``Mode.UP`` (|2>, moving up) and ``Mode.ABSORBED`` (the absorbed component).
The device is beam splitter, mirrors, absorber stage, beam splitter.

Amplitudes may be complex scalars or numpy arrays of equal shape; every
operation is plain complex arithmetic, so a whole batch of phases can be
pushed through the device in one call.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

Amplitude = Union[complex, np.ndarray]

_SQRT_HALF = np.sqrt(0.5)


class Mode(str, enum.Enum):
    RIGHT = "mode1"
    UP = "mode2"
    ABSORBED = "absorbed"


# Output ports after the second beam splitter. D is dark for the balanced,
# unobstructed device; C is the complementary port.
DETECTOR_D = Mode.UP
DETECTOR_C = Mode.RIGHT

# Between the mirrors and the second splitter, the arm that left BS1 going up
# has been turned right, and vice versa.
UPPER_PATH = Mode.RIGHT
LOWER_PATH = Mode.UP

_PROPAGATING = (Mode.RIGHT, Mode.UP)


def _coerce(value) -> Amplitude:
    if np.ndim(value) == 0:
        return complex(value)
    return np.asarray(value, dtype=complex)


def _check_propagating(mode: Mode) -> Mode:
    mode = Mode(mode)
    if mode not in _PROPAGATING:
        raise ValueError(f"{mode.value} is not a propagating mode")
    return mode


@dataclass(frozen=True, eq=False)
class PhotonState:
    """Amplitudes of |1>, |2> and |absorbed>."""

    a1: Amplitude
    a2: Amplitude
    absorbed: Amplitude = 0j

    def __post_init__(self):
        for name in ("a1", "a2", "absorbed"):
            value = _coerce(getattr(self, name))
            if not np.all(np.isfinite(value)):
                raise ValueError(f"non-finite amplitude in {name}")
            object.__setattr__(self, name, value)

    @classmethod
    def basis(cls, mode: Mode = Mode.RIGHT) -> PhotonState:
        mode = Mode(mode)
        return cls(
            1.0 if mode is Mode.RIGHT else 0.0,
            1.0 if mode is Mode.UP else 0.0,
            1.0 if mode is Mode.ABSORBED else 0.0,
        )

    def amplitude(self, mode: Mode) -> Amplitude:
        mode = Mode(mode)
        if mode is Mode.RIGHT:
            return self.a1
        if mode is Mode.UP:
            return self.a2
        return self.absorbed

    def with_amplitude(self, mode: Mode, value: Amplitude) -> PhotonState:
        amps = {Mode.RIGHT: self.a1, Mode.UP: self.a2, Mode.ABSORBED: self.absorbed}
        amps[Mode(mode)] = value
        return PhotonState(amps[Mode.RIGHT], amps[Mode.UP], amps[Mode.ABSORBED])

    def norm(self):
        return abs(self.a1) ** 2 + abs(self.a2) ** 2 + abs(self.absorbed) ** 2

    def allclose(self, other: PhotonState, atol: float = 1e-12) -> bool:
        return all(
            np.allclose(self.amplitude(m), other.amplitude(m), rtol=0.0, atol=atol)
            for m in Mode
        )

    def __repr__(self):
        return f"PhotonState(a1={self.a1!r}, a2={self.a2!r}, absorbed={self.absorbed!r})"


def apply_beam_splitter(s: PhotonState) -> PhotonState:
    """50/50 splitter: reflection picks up a factor i, transmission does not."""
    return PhotonState(
        (s.a1 + 1j * s.a2) * _SQRT_HALF,
        (s.a2 + 1j * s.a1) * _SQRT_HALF,
        s.absorbed,
    )


def apply_mirrors(s: PhotonState) -> PhotonState:
    """|1> -> i|2>, |2> -> i|1>."""
    return PhotonState(1j * s.a2, 1j * s.a1, s.absorbed)


def _absorb(s: PhotonState, path: Mode, transmission: float, phase) -> PhotonState:
    amp = s.amplitude(path)
    lost = (1.0 - transmission) * abs(amp) ** 2
    # Absorbed components carry no observable relative phase; only the total
    # absorbed probability matters, so magnitudes add in quadrature.
    absorbed = np.sqrt(abs(s.absorbed) ** 2 + lost)
    survivor = np.sqrt(transmission) * np.exp(1j * np.asarray(phase)) * amp
    return s.with_amplitude(path, survivor).with_amplitude(Mode.ABSORBED, absorbed)


def apply_absorber(
    s: PhotonState, blocked: Optional[Mode] = None, survivor_phase=0.0
) -> PhotonState:
    """Classical absorber stage.

    With ``blocked`` set, that path is fully absorbed and the other
    propagating path is multiplied by ``exp(i * survivor_phase)``.  With
    nothing blocked the phase multiplies both propagating amplitudes.
    """
    kick = np.exp(1j * np.asarray(survivor_phase))
    if blocked is None:
        return PhotonState(s.a1 * kick, s.a2 * kick, s.absorbed)
    blocked = _check_propagating(blocked)
    other = Mode.UP if blocked is Mode.RIGHT else Mode.RIGHT
    out = _absorb(s, blocked, 0.0, 0.0)
    return out.with_amplitude(other, out.amplitude(other) * kick)


def apply_partial_absorber(
    s: PhotonState, path: Mode, transmission: float, phase=0.0
) -> PhotonState:
    """Superposed absorber on one arm.

    A fraction ``1 - transmission`` of the arm's probability is absorbed; the
    surviving amplitude is scaled by ``sqrt(transmission)`` and kicked by
    ``exp(i * phase)``.  The other arm is untouched.
    """
    if not 0.0 <= transmission <= 1.0:
        raise ValueError(f"transmission must be in [0, 1], got {transmission}")
    return _absorb(s, _check_propagating(path), transmission, phase)


def apply_phase(s: PhotonState, path: Mode, phase) -> PhotonState:
    path = _check_propagating(path)
    return s.with_amplitude(path, s.amplitude(path) * np.exp(1j * np.asarray(phase)))


def evolve_through(
    state: PhotonState, arm_stage: Callable[[PhotonState], PhotonState]
) -> PhotonState:
    """BS1, mirrors, ``arm_stage``, BS2."""
    return apply_beam_splitter(arm_stage(apply_mirrors(apply_beam_splitter(state))))


def evolve_device(
    state: PhotonState, blocked: Optional[Mode] = None, survivor_phase=0.0
) -> PhotonState:
    return evolve_through(state, lambda s: apply_absorber(s, blocked, survivor_phase))


@dataclass(frozen=True)
class DeviceGeometry:
    """Which path the absorber blocks in each of its two positions."""

    blocked_in_a: Optional[Mode] = None
    blocked_in_b: Optional[Mode] = UPPER_PATH

    def __post_init__(self):
        for name in ("blocked_in_a", "blocked_in_b"):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, _check_propagating(value))

    @classmethod
    def main(cls) -> DeviceGeometry:
        return cls(None, UPPER_PATH)

    @classmethod
    def blocked_both(cls) -> DeviceGeometry:
        """Position A blocks the upper path, position B the lower one."""
        return cls(UPPER_PATH, LOWER_PATH)


@dataclass(frozen=True, eq=False)
class JointState:
    """Photon conditioned on each absorber position.

    ``weight_a`` and ``weight_b`` are the complex branch coefficients
    (lambda times the uncontrolled branch phase).  Branches never interfere,
    so readouts are incoherent sums over them.
    """

    weight_a: complex
    weight_b: complex
    photon_a: PhotonState
    photon_b: PhotonState

    def __post_init__(self):
        wa, wb = complex(self.weight_a), complex(self.weight_b)
        total = abs(wa) ** 2 + abs(wb) ** 2
        if not np.isfinite(total) or abs(total - 1.0) > 1e-12:
            raise ValueError(f"branch weights must have unit total norm, got {total}")
        object.__setattr__(self, "weight_a", wa)
        object.__setattr__(self, "weight_b", wb)

    @classmethod
    def prepare(
        cls,
        weight_a2: float = 0.5,
        weight_b2: float = 0.5,
        phase_a: float = 0.0,
        phase_b: float = 0.0,
        photon: Optional[PhotonState] = None,
    ) -> JointState:
        photon = photon if photon is not None else PhotonState.basis(Mode.RIGHT)
        return cls(
            np.sqrt(weight_a2) * np.exp(1j * phase_a),
            np.sqrt(weight_b2) * np.exp(1j * phase_b),
            photon,
            photon,
        )

    def branches(self):
        yield abs(self.weight_a) ** 2, self.photon_a
        yield abs(self.weight_b) ** 2, self.photon_b

    def norm(self):
        return sum(w * p.norm() for w, p in self.branches())


def evolve_joint(
    j: JointState, geometry: DeviceGeometry, phase_a=0.0, phase_b=0.0
) -> JointState:
    return JointState(
        j.weight_a,
        j.weight_b,
        evolve_device(j.photon_a, geometry.blocked_in_a, phase_a),
        evolve_device(j.photon_b, geometry.blocked_in_b, phase_b),
    )


def detection_probability(state: Union[PhotonState, JointState], mode: Mode = DETECTOR_D):
    """Born-rule probability of finding the photon in ``mode``."""
    if isinstance(state, JointState):
        return sum(w * abs(p.amplitude(mode)) ** 2 for w, p in state.branches())
    return abs(state.amplitude(mode)) ** 2


def outcome_probabilities(state: Union[PhotonState, JointState]):
    """(P(D click), P(C click), P(absorbed))."""
    return tuple(
        detection_probability(state, m) for m in (DETECTOR_D, DETECTOR_C, Mode.ABSORBED)
    )
