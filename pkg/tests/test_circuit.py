import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import FiniteModeMirror

from diamondmirror.bogoliubov import overlaps
from diamondmirror.circuit import (
    DetectorChannel,
    MirrorUnitary,
    MomentSet,
    covariance_from_moments,
    energy_decay_exponent,
    output_moments_ll,
    output_moments_lr,
    particle_number,
    particle_number_fast,
)
from diamondmirror.errors import DetectorOverlapTooLarge, InvalidParameter, NonPhysical
from diamondmirror.gaussian import is_physical
from diamondmirror.modes import Direction, Frame, WavepacketSpec

G = WavepacketSpec(Frame.DIAMOND, Direction.LEFT, 0.8, 0.25)
LEFT = DetectorChannel.make("left", 2.0, 0.4, 1.0)
RIGHT = DetectorChannel.make("right", 2.5, 0.4, -1.0)
PLUS = DetectorChannel.make("left", 3.0, 1.0, 1.5)
MINUS = DetectorChannel.make("left", 3.0, 1.0, -1.5)


class TestTypes:
    @pytest.mark.parametrize("theta", [-0.1, 3.5])
    def test_theta_range(self, theta):
        with pytest.raises(InvalidParameter):
            MirrorUnitary(theta, 0.0)

    def test_channel_validation(self):
        spec = WavepacketSpec(Frame.MINKOWSKI, Direction.LEFT, 1.0, 0.5)
        with pytest.raises(InvalidParameter):
            DetectorChannel(spec, Direction.RIGHT)
        with pytest.raises(InvalidParameter):
            DetectorChannel(G, Direction.LEFT)

    def test_moment_validation(self):
        with pytest.raises(InvalidParameter):
            MomentSet(np.array([[0, 1], [0, 0]]), np.zeros((2, 2)))
        with pytest.raises(InvalidParameter):
            MomentSet(np.zeros((2, 2)), np.array([[0, 1], [0, 0]]))
        with pytest.raises(InvalidParameter):
            MomentSet(np.diag([-1.0, 0.0]), np.zeros((2, 2)))


class TestParticleNumber:
    @pytest.mark.parametrize("det, g", [
        (LEFT, G),
        (RIGHT, G),
        (DetectorChannel.make("left", 12.0, 3.2, 2.0), WavepacketSpec(Frame.DIAMOND, Direction.LEFT, 2.0, 0.2)),
    ])
    def test_identity_channel(self, det, g):
        u = MirrorUnitary(0.0, 0.3)
        assert particle_number(det, g, u) == 0.0
        assert particle_number_fast(det, g, u) == 0.0

    @pytest.mark.parametrize("theta", [0.3, 1.0, 2.0, np.pi])
    def test_transmissivity_scaling(self, theta):
        ref = particle_number(LEFT, G, MirrorUnitary(np.pi / 2), method="kg")
        val = particle_number(LEFT, G, MirrorUnitary(theta), method="kg")
        assert val == pytest.approx((1 - np.cos(theta)) * ref, rel=1e-12)

    def test_phase_independent(self):
        a = particle_number(LEFT, G, MirrorUnitary(np.pi / 2, 0.0), method="kg")
        b = particle_number(LEFT, G, MirrorUnitary(np.pi / 2, 1.3), method="kg")
        assert a == b

    def test_matches_overlap_formula(self):
        o = overlaps(LEFT.spec, G, method="kg")
        expected = 2 * (abs(o.a_fg) ** 2 * o.i_s + abs(o.b_fg) ** 2 * o.i_c)
        assert particle_number(LEFT, G, MirrorUnitary(np.pi / 2), method="kg") == pytest.approx(expected)

    def test_fast_matches_exact(self):
        det = DetectorChannel.make("left", 10.0, 1.0, 2.0)
        g = WavepacketSpec(Frame.DIAMOND, Direction.LEFT, 5.0, 0.2)
        u = MirrorUnitary(np.pi / 2)
        exact = particle_number(det, g, u, method="kg")
        assert particle_number_fast(det, g, u) == pytest.approx(exact, rel=1e-3)


def _oracle(detectors, u):
    model = FiniteModeMirror(G)
    coefs = [model.detector(d.spec, d.side) for d in detectors]
    return model.moments(coefs, u.theta, u.phi)


class TestMomentsAgainstOracle:
    @pytest.mark.parametrize("theta, phi", [(np.pi / 3, 0.7), (np.pi / 2, 0.0), (2.5, -1.0)])
    def test_left_right(self, theta, phi):
        u = MirrorUnitary(theta, phi)
        n, m = _oracle((LEFT, RIGHT), u)
        ms = output_moments_lr(LEFT, RIGHT, G, u, method="kg")
        scale = np.abs(m).max()
        assert np.abs(ms.n - n).max() <= 1e-3 * scale
        assert np.abs(ms.m - m).max() <= 1e-3 * scale

    @pytest.mark.parametrize("theta, phi", [(np.pi / 3, 0.7), (np.pi / 2, np.pi / 2)])
    def test_left_left(self, theta, phi):
        u = MirrorUnitary(theta, phi)
        n, m = _oracle((PLUS, MINUS), u)
        ms = output_moments_ll(PLUS, MINUS, G, u, method="kg")
        scale = np.abs(m).max()
        assert np.abs(ms.n - n).max() <= 1e-3 * scale
        assert np.abs(ms.m - m).max() <= 1e-3 * scale

    def test_oracle_rules_out_sinh_weight_on_both_terms(self):
        # weighting |B|^2 with I_s instead of I_c misses the vacuum-noise part
        u = MirrorUnitary(np.pi / 2)
        n, _ = _oracle((LEFT, RIGHT), u)
        o = overlaps(LEFT.spec, G, method="kg")
        alt = 2 * (abs(o.a_fg) ** 2 + abs(o.b_fg) ** 2) * o.i_s
        assert abs(alt - n[0, 0].real) > 0.05 * n[0, 0].real

    def test_oracle_discretisation_matches_overlaps(self):
        model = FiniteModeMirror(G)
        A, B, i_s = model.overlaps(model.detector(LEFT.spec, LEFT.side), Direction.LEFT)
        o = overlaps(LEFT.spec, G, method="kg")
        assert A == pytest.approx(o.a_fg, rel=1e-5)
        assert B == pytest.approx(o.b_fg, rel=1e-5)
        assert i_s == pytest.approx(o.i_s, rel=1e-5)


class TestMoments:
    def test_identity_channel(self):
        u = MirrorUnitary(0.0)
        assert np.all(output_moments_lr(LEFT, RIGHT, G, u, method="kg").n == 0)
        sigma = covariance_from_moments(output_moments_ll(PLUS, MINUS, G, u, method="kg"))
        assert np.abs(sigma - np.eye(4)).max() < 1e-8

    def test_same_side_phase_independent(self):
        a = output_moments_ll(PLUS, MINUS, G, MirrorUnitary(np.pi / 2, 0.0), method="kg")
        b = output_moments_ll(PLUS, MINUS, G, MirrorUnitary(np.pi / 2, np.pi / 2), method="kg")
        assert np.array_equal(a.n, b.n) and np.array_equal(a.m, b.m)

    def test_cross_side_depends_on_phase(self):
        a = output_moments_lr(LEFT, RIGHT, G, MirrorUnitary(np.pi / 2, 0.0), method="kg")
        b = output_moments_lr(LEFT, RIGHT, G, MirrorUnitary(np.pi / 2, np.pi / 2), method="kg")
        assert abs(a.m[0, 1] - b.m[0, 1]) > 1e-6
        assert a.n[0, 1] == 0 and a.m[0, 0] == b.m[0, 0]

    def test_cache_reuse(self):
        cache = {}
        u = MirrorUnitary(np.pi / 2)
        a = output_moments_lr(LEFT, RIGHT, G, u, method="kg", cache=cache)
        assert len(cache) == 2
        b = output_moments_lr(LEFT, RIGHT, G, u, method="kg", cache=cache)
        assert np.array_equal(a.m, b.m)

    def test_side_validation(self):
        u = MirrorUnitary()
        with pytest.raises(InvalidParameter):
            output_moments_lr(RIGHT, LEFT, G, u)
        with pytest.raises(InvalidParameter):
            output_moments_ll(LEFT, RIGHT, G, u)

    def test_overlap_gate(self):
        near = DetectorChannel.make("left", 3.0, 1.0, 1.2)
        with pytest.raises(DetectorOverlapTooLarge) as info:
            output_moments_ll(PLUS, near, G, MirrorUnitary())
        assert abs(info.value.commutator) >= 0.05
        # a looser gate lets the same geometry through
        output_moments_ll(PLUS, near, G, MirrorUnitary(), method="kg", gate=1.0)

    def test_output_covariance_physical(self):
        ms = output_moments_lr(LEFT, RIGHT, G, MirrorUnitary(np.pi / 2, 0.4), method="kg")
        assert is_physical(covariance_from_moments(ms))


class TestCovariance:
    def test_vacuum(self):
        ms = MomentSet(np.zeros((2, 2)), np.zeros((2, 2)))
        assert np.array_equal(covariance_from_moments(ms), np.eye(4))

    def test_thermal(self):
        ms = MomentSet(np.diag([0.5, 2.0]), np.zeros((2, 2)))
        assert np.allclose(covariance_from_moments(ms), np.diag([2, 2, 5, 5]))

    def test_tmsv_moments(self):
        r = 0.6
        n = np.diag([np.sinh(r) ** 2] * 2)
        m = np.array([[0, np.sinh(r) * np.cosh(r)], [np.sinh(r) * np.cosh(r), 0]])
        sigma = covariance_from_moments(MomentSet(n, m))
        ch, sh = np.cosh(2 * r), np.sinh(2 * r)
        assert np.allclose(sigma, [[ch, 0, sh, 0], [0, ch, 0, -sh], [sh, 0, ch, 0], [0, -sh, 0, ch]])

    @pytest.mark.parametrize("m", [0.5, 0.5j])
    def test_nonphysical(self, m):
        ms = MomentSet(np.zeros((2, 2)), np.diag([m, 0]))
        with pytest.raises(NonPhysical):
            covariance_from_moments(ms)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(0, 3), st.floats(0, 3), st.floats(-np.pi, np.pi))
    def test_symmetric_output(self, na, nb, ph):
        nab = 0.3 * np.sqrt(na * nb) * np.exp(1j * ph)
        n = np.array([[na, nab], [np.conj(nab), nb]])
        sigma = covariance_from_moments(MomentSet(n, np.zeros((2, 2))), tol=np.inf)
        assert np.allclose(sigma, sigma.T)


class TestEnergyDecay:
    def test_synthetic_slope(self):
        k0 = np.geomspace(10, 100, 10)
        slope = energy_decay_exponent(LEFT, G, MirrorUnitary(), k0_grid=k0,
                                      particle_numbers=3.0 / k0**2)
        assert slope == pytest.approx(-1.0, abs=1e-12)

    @pytest.mark.parametrize("grid", [[1, 2, 3], [1, 2, 3, 3, 4], [-1, 1, 2, 3, 4]])
    def test_grid_validation(self, grid):
        with pytest.raises(InvalidParameter):
            energy_decay_exponent(LEFT, G, MirrorUnitary(), k0_grid=grid,
                                  particle_numbers=np.ones(len(grid)))

    def test_rejects_nonpositive_energy(self):
        with pytest.raises(InvalidParameter):
            energy_decay_exponent(LEFT, G, MirrorUnitary(), k0_grid=[1, 2, 3, 4, 5],
                                  particle_numbers=[1, 1, 0, 1, 1])
