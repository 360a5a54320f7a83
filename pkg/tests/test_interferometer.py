import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mzabsorber.interferometer import (
    DETECTOR_C,
    DETECTOR_D,
    LOWER_PATH,
    UPPER_PATH,
    DeviceGeometry,
    JointState,
    Mode,
    PhotonState,
    apply_absorber,
    apply_beam_splitter,
    apply_mirrors,
    apply_partial_absorber,
    detection_probability,
    evolve_device,
    evolve_joint,
    outcome_probabilities,
)

R = 1 / math.sqrt(2)

# Independent matrix form of the optical elements, basis (|1>, |2>, |absorbed>).
BS = np.array([[1, 1j, 0], [1j, 1, 0], [0, 0, math.sqrt(2)]]) / math.sqrt(2)
MIRRORS = np.array([[0, 1j, 0], [1j, 0, 0], [0, 0, 1]])


def vec(s):
    return np.array([s.a1, s.a2, s.absorbed])


def state(v):
    return PhotonState(*v)


finite = st.floats(-1.0, 1.0, allow_nan=False)


@st.composite
def normalized_states(draw):
    v = np.array([complex(draw(finite), draw(finite)) for _ in range(3)])
    n = np.linalg.norm(v)
    if n < 1e-3:
        v = np.array([1, 0, 0], dtype=complex)
        n = 1.0
    return state(v / n)


phases = st.floats(0.0, 2 * math.pi, exclude_max=True)


class TestBeamSplitter:
    def test_right_mover(self):
        out = apply_beam_splitter(PhotonState.basis(Mode.RIGHT))
        assert out.allclose(PhotonState(R, 1j * R, 0))

    def test_up_mover(self):
        out = apply_beam_splitter(PhotonState.basis(Mode.UP))
        assert out.allclose(PhotonState(1j * R, R, 0))

    def test_norm_of_mixed_input(self):
        out = apply_beam_splitter(PhotonState(0.6, 0.8j, 0))
        assert out.norm() == pytest.approx(1.0, abs=1e-12)

    def test_twice_gives_i_up(self):
        out = apply_beam_splitter(apply_beam_splitter(PhotonState.basis()))
        assert out.allclose(PhotonState(0, 1j, 0))

    @given(normalized_states())
    def test_matches_matrix(self, s):
        assert np.allclose(vec(apply_beam_splitter(s)), BS @ vec(s), atol=1e-12)

    @given(normalized_states())
    def test_unitary(self, s):
        assert apply_beam_splitter(s).norm() == pytest.approx(1.0, abs=1e-12)


class TestMirrors:
    @pytest.mark.parametrize(
        "mode, expected",
        [(Mode.RIGHT, PhotonState(0, 1j, 0)), (Mode.UP, PhotonState(1j, 0, 0))],
    )
    def test_basis(self, mode, expected):
        assert apply_mirrors(PhotonState.basis(mode)).allclose(expected)

    def test_twice_is_minus_identity(self):
        out = apply_mirrors(apply_mirrors(PhotonState.basis()))
        assert out.allclose(PhotonState(-1, 0, 0))

    @given(normalized_states())
    def test_matches_matrix(self, s):
        assert np.allclose(vec(apply_mirrors(s)), MIRRORS @ vec(s), atol=1e-12)
        assert apply_mirrors(s).norm() == pytest.approx(1.0, abs=1e-12)


class TestAbsorber:
    def test_blocks_upper_arm(self):
        s = PhotonState(-R, 1j * R, 0)
        out = apply_absorber(s, Mode.RIGHT, 0.0)
        assert out.a1 == 0
        assert out.a2 == pytest.approx(1j * R)
        assert abs(out.absorbed) ** 2 == pytest.approx(0.5, abs=1e-15)
        d = detection_probability(apply_beam_splitter(out), DETECTOR_D)
        assert d == pytest.approx(0.25, abs=1e-15)

    def test_open_zero_phase_is_identity(self):
        assert apply_absorber(PhotonState.basis(), None, 0.0).allclose(PhotonState.basis())

    def test_open_phase_pi(self):
        out = apply_absorber(PhotonState.basis(Mode.UP), None, math.pi)
        assert out.allclose(PhotonState(0, -1, 0))

    def test_survivor_gets_phase(self):
        out = apply_absorber(PhotonState(R, R, 0), Mode.UP, math.pi / 2)
        assert out.allclose(PhotonState(1j * R, 0, R))

    def test_absorbed_adds_in_quadrature(self):
        s = PhotonState(0.6, 0, 0.8)
        out = apply_absorber(s, Mode.RIGHT)
        assert out.absorbed == pytest.approx(1.0)

    def test_cannot_block_absorbed(self):
        with pytest.raises(ValueError):
            apply_absorber(PhotonState.basis(), Mode.ABSORBED)

    @given(normalized_states(), st.sampled_from([None, Mode.RIGHT, Mode.UP]), phases)
    def test_norm_preserved(self, s, blocked, phase):
        assert apply_absorber(s, blocked, phase).norm() == pytest.approx(1.0, abs=1e-12)

    @given(normalized_states(), st.floats(0, 1), phases)
    def test_partial_norm_preserved(self, s, t, phase):
        out = apply_partial_absorber(s, UPPER_PATH, t, phase)
        assert out.norm() == pytest.approx(1.0, abs=1e-12)
        assert out.amplitude(LOWER_PATH) == s.amplitude(LOWER_PATH)

    def test_partial_transmission_range(self):
        with pytest.raises(ValueError):
            apply_partial_absorber(PhotonState.basis(), UPPER_PATH, 1.5)


class TestDevice:
    def test_open_device_is_dark_at_d(self):
        out = evolve_device(PhotonState.basis())
        assert out.allclose(PhotonState(-1, 0, 0))
        assert detection_probability(out, DETECTOR_D) < 1e-24

    def test_blocked_upper(self):
        out = evolve_device(PhotonState.basis(), UPPER_PATH)
        assert out.allclose(PhotonState(-0.5, 0.5j, R))
        p_d, p_c, p_abs = outcome_probabilities(out)
        assert p_d == pytest.approx(0.25, abs=1e-15)
        assert p_c == pytest.approx(0.25, abs=1e-15)
        assert p_abs == pytest.approx(0.5, abs=1e-15)

    def test_open_device_norm(self):
        assert evolve_device(PhotonState.basis()).norm() == pytest.approx(1.0, abs=1e-12)

    @given(normalized_states(), st.sampled_from([None, Mode.RIGHT, Mode.UP]), phases)
    def test_probabilities_complete(self, s, blocked, phase):
        assert sum(outcome_probabilities(evolve_device(s, blocked, phase))) == pytest.approx(
            1.0, abs=1e-12
        )

    def test_array_phases(self):
        thetas = np.linspace(0, 2 * np.pi, 7)
        batch = evolve_device(PhotonState.basis(), Mode.UP, thetas)
        for k, t in enumerate(thetas):
            single = evolve_device(PhotonState.basis(), Mode.UP, t)
            assert batch.a1[k] == pytest.approx(single.a1)
            assert batch.a2[k] == pytest.approx(single.a2)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            PhotonState(float("nan"), 0)


class TestJoint:
    def test_branch_a_only(self):
        j = evolve_joint(JointState.prepare(1.0, 0.0), DeviceGeometry.main())
        assert j.photon_a.allclose(PhotonState(-1, 0, 0))
        assert detection_probability(j) < 1e-24

    def test_branch_b_only(self):
        j = evolve_joint(JointState.prepare(0.0, 1.0), DeviceGeometry.main())
        assert detection_probability(j) == pytest.approx(0.25, abs=1e-15)

    @given(phases, phases, phases, phases)
    def test_norm(self, a, b, pa, pb):
        j = JointState.prepare(0.5, 0.5, a, b)
        out = evolve_joint(j, DeviceGeometry.main(), pa, pb)
        assert out.norm() == pytest.approx(1.0, abs=1e-12)
        assert sum(outcome_probabilities(out)) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("geometry", [DeviceGeometry.main(), DeviceGeometry.blocked_both()])
    @pytest.mark.parametrize("weights, branch", [((1.0, 0.0), "a"), ((0.0, 1.0), "b")])
    def test_single_branch_matches_device(self, geometry, weights, branch):
        out = evolve_joint(JointState.prepare(*weights), geometry, 0.3, 1.1)
        blocked = geometry.blocked_in_a if branch == "a" else geometry.blocked_in_b
        phase = 0.3 if branch == "a" else 1.1
        expected = evolve_device(PhotonState.basis(), blocked, phase)
        got = out.photon_a if branch == "a" else out.photon_b
        assert got.allclose(expected, atol=0.0)
        for mode in (DETECTOR_D, DETECTOR_C, Mode.ABSORBED):
            assert detection_probability(out, mode) == detection_probability(expected, mode)

    def test_weights_must_be_normalized(self):
        p = PhotonState.basis()
        with pytest.raises(ValueError):
            JointState(1.0, 1.0, p, p)

    def test_main_geometry(self):
        g = DeviceGeometry.main()
        assert g.blocked_in_a is None and g.blocked_in_b is UPPER_PATH
