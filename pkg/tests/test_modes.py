import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diamondmirror.errors import InvalidParameter, OutsideDiamond
from diamondmirror.modes import (
    DiamondScale,
    Direction,
    Frame,
    LightconePoint,
    WavepacketSpec,
    diamond_coords_3p1,
    diamond_mode_exterior,
    diamond_mode_interior,
    diamond_time,
    gaussian_diamond_waveform,
    gaussian_minkowski_waveform,
    klein_gordon_inner,
    minkowski_mode,
    profile,
    profile_normalization,
    wavepacket_waveform,
    worldline_time,
)
from diamondmirror.numerics import integrate_adaptive

# frozen oracles (mpmath, 30 digits)
ATANH_08 = 1.0986122886681096913952452369225257046474905578227
TWO_TANH_1 = 1.5231883119115297762389165652095871808255371945159
NORM_002_04 = 2.42374235114056661846436743978
# Fourier synthesis int dk f(k) u_k(V) for k0=5, sigma=1, V-V0=1
MINK_SYNTH = complex(0.0294252775765694417737813248805, 0.0996277235850863848730360775343)
# Fourier synthesis int dw g(w) g_w(V) for w0=5, delta=0.2, aV=1
DIAMOND_SYNTH = complex(0.0847112528203926205246108541953, 0.0855157003967636875225022559093)

SQ4PI = math.sqrt(4 * math.pi)


def mink(k0, sigma, pos=0.0, direction=Direction.LEFT):
    return WavepacketSpec(Frame.MINKOWSKI, direction, k0, sigma, pos)


def diam(w0, delta):
    return WavepacketSpec(Frame.DIAMOND, Direction.LEFT, w0, delta)


class TestScaleAndSpecs:
    @pytest.mark.parametrize("a", [0.1, 1.0, 7.5])
    def test_temperature_lifetime(self, a):
        s = DiamondScale(a)
        assert s.lifetime == pytest.approx(4 / a)
        assert s.temperature * math.pi * s.lifetime == pytest.approx(2.0)

    @pytest.mark.parametrize("a", [0.0, -1.0, float("inf")])
    def test_bad_scale(self, a):
        with pytest.raises(InvalidParameter):
            DiamondScale(a)

    @pytest.mark.parametrize("freq, bw", [(0.0, 1.0), (1.0, 0.0), (-2.0, 1.0)])
    def test_bad_spec(self, freq, bw):
        with pytest.raises(InvalidParameter):
            WavepacketSpec(Frame.MINKOWSKI, Direction.LEFT, freq, bw)

    def test_diamond_centre_is_fixed(self):
        assert WavepacketSpec(Frame.DIAMOND, Direction.LEFT, 1.0, 0.1, 3.0).center_pos == 0.0

    def test_lightcone_point(self):
        p = LightconePoint.from_tz(0.5, -0.25)
        assert (p.V, p.U) == (0.25, 0.75)
        assert (p.t, p.z) == (0.5, -0.25)


class TestCoordinates:
    def test_origin(self):
        assert diamond_coords_3p1(0, 0, 0, 0) == (0, 0, 0, 0)

    def test_time_axis(self):
        eta, xi, zeta, rho = diamond_coords_3p1(1.0, 0, 0, 0)
        assert eta == pytest.approx(ATANH_08, rel=1e-14)
        assert xi == pytest.approx(0.0, abs=1e-14)

    @pytest.mark.parametrize("point", [(2.5, 0, 0, 0), (1.0, 1.5, 0, 0), (0.5, 1.2, 1.2, 1.2)])
    def test_outside(self, point):
        with pytest.raises(OutsideDiamond):
            diamond_coords_3p1(*point)

    def test_worldline_examples(self):
        assert worldline_time(0.0) == 0.0
        assert worldline_time(2.0) == pytest.approx(TWO_TANH_1, rel=1e-15)
        assert worldline_time(1e3) == pytest.approx(2.0)
        assert worldline_time(-1e3) == pytest.approx(-2.0)

    @settings(max_examples=80, deadline=None)
    @given(st.floats(-30, 30), st.floats(-30, 30))
    def test_worldline_odd_increasing(self, x, y):
        assert worldline_time(-x) == -worldline_time(x)
        assert abs(worldline_time(x)) < 2.0 + 1e-15
        if x < y:
            assert worldline_time(x) <= worldline_time(y)

    def test_diamond_time_edge(self):
        assert diamond_time(1.9999999999) == pytest.approx(2 * math.atanh(1.9999999999 / 2))
        with pytest.raises(OutsideDiamond):
            diamond_time(2.0)


class TestModeFunctions:
    def test_interior_centre(self):
        assert diamond_mode_interior(0.0, 2.0) == pytest.approx(1 / math.sqrt(8 * math.pi))

    def test_interior_example(self):
        assert diamond_mode_interior(1.0, 1.0) == pytest.approx(np.exp(-1j * math.log(3)) / SQ4PI,
                                                                rel=1e-14)

    def test_exterior_example(self):
        assert diamond_mode_exterior(4.0, 1.0) == pytest.approx(np.exp(1j * math.log(3)) / SQ4PI,
                                                                rel=1e-14)
        assert abs(diamond_mode_exterior(1e9, 1.0)) == pytest.approx(1 / SQ4PI)

    @pytest.mark.parametrize("V", [-3.0, -2.0, 2.0, 5.0])
    def test_interior_support(self, V):
        assert diamond_mode_interior(V, 1.0) == 0

    @pytest.mark.parametrize("V", [-2.0, 0.0, 1.99, 2.0])
    def test_exterior_support(self, V):
        assert diamond_mode_exterior(V, 1.0) == 0

    @settings(max_examples=100, deadline=None)
    @given(st.floats(-10, 10), st.floats(0.01, 10))
    def test_disjoint_support(self, V, om):
        assert diamond_mode_interior(V, om) * diamond_mode_exterior(V, om) == 0

    def test_minkowski_mode(self):
        assert minkowski_mode(0.0, 1.0) == pytest.approx(1 / SQ4PI)
        assert minkowski_mode(math.pi, 1.0) == pytest.approx(-1 / SQ4PI)
        assert abs(minkowski_mode(17.3, 2.0)) == pytest.approx(1 / math.sqrt(8 * math.pi))
        with pytest.raises(InvalidParameter):
            minkowski_mode(0.0, 0.0)


class TestProfiles:
    def test_normalisation_oracle(self):
        assert profile_normalization(0.02, 0.4) == pytest.approx(NORM_002_04, rel=1e-13)

    @pytest.mark.parametrize("c, w", [(5.0, 0.2), (0.02, 0.4), (12.0, 3.2), (0.01, 0.4)])
    def test_unit_norm(self, c, w):
        spec = diam(c, w)
        res = integrate_adaptive(lambda x: np.abs(profile(spec, x)) ** 2, (1e-12, c + 12 * w),
                                 rel_tol=1e-12)
        assert res.value.real == pytest.approx(1.0, abs=1e-10)

    def test_peak_near_centre(self):
        spec = mink(40.0, 1.0)
        k = np.linspace(30, 50, 20001)
        assert k[np.argmax(np.abs(profile(spec, k)))] == pytest.approx(40.0, abs=0.05)

    def test_phase(self):
        spec = mink(3.0, 1.0, pos=2.0)
        assert np.angle(profile(spec, 1.0)) == pytest.approx(-2.0)
        assert np.imag(profile(diam(3.0, 1.0), 1.0)) == 0

    def test_non_positive_frequency(self):
        with pytest.raises(InvalidParameter):
            profile(diam(1.0, 0.2), 0.0)


class TestWaveforms:
    def test_diamond_centre_value(self):
        assert gaussian_diamond_waveform(0.0, 5.0, 0.2) == pytest.approx(
            (0.04 / (2 * math.pi * 25)) ** 0.25)

    def test_diamond_edge_vanishes(self):
        # Gaussian decay in diamond time s, which diverges logarithmically at the edge
        vals = np.abs(gaussian_diamond_waveform(2 - np.logspace(-2, -12, 6), 5.0, 0.2))
        assert np.all(np.diff(vals) < 0) and vals[-1] < 1e-12
        with pytest.raises(OutsideDiamond):
            gaussian_diamond_waveform(2.0, 5.0, 0.2)

    def test_diamond_against_fourier_synthesis(self):
        spec = diam(5.0, 0.2)
        assert wavepacket_waveform(spec, 1.0) == pytest.approx(DIAMOND_SYNTH, rel=1e-12)
        # narrowband closed form: mismatch is below 1e-10 for omega0/delta = 25
        assert abs(gaussian_diamond_waveform(1.0, 5.0, 0.2) - DIAMOND_SYNTH) < 1e-10

    def test_minkowski_against_fourier_synthesis(self):
        spec = mink(5.0, 1.0)
        assert wavepacket_waveform(spec, 1.0) == pytest.approx(MINK_SYNTH, rel=1e-12)
        # the closed form uses the narrowband normalisation: k0/sigma = 5 costs ~5e-4
        rel = abs(gaussian_minkowski_waveform(1.0, 5.0, 1.0, 0.0) - MINK_SYNTH) / abs(MINK_SYNTH)
        assert 1e-5 < rel < 1e-3

    def test_minkowski_closed_form(self):
        assert gaussian_minkowski_waveform(3.0, 5.0, 1.0, 3.0) == pytest.approx(
            (1 / (2 * math.pi * 25)) ** 0.25)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(0, 5), st.floats(1, 20), st.floats(0.1, 3), st.floats(-3, 3))
    def test_minkowski_even_envelope(self, x, k0, s, V0):
        a = gaussian_minkowski_waveform(V0 + x, k0, s, V0)
        b = gaussian_minkowski_waveform(V0 - x, k0, s, V0)
        assert abs(a) == pytest.approx(abs(b), rel=1e-12, abs=1e-300)

    def test_small_a_limit(self):
        small = DiamondScale(1e-4)
        V = np.linspace(-3, 3, 13)
        d = gaussian_diamond_waveform(V, 2.0, 0.5, small)
        m = gaussian_minkowski_waveform(V, 2.0, 0.5, 0.0)
        assert np.max(np.abs(d - m)) < 1e-6

    def test_exact_derivative(self):
        spec = mink(4.0, 0.7, 0.3)
        x, h = 0.9, 1e-6
        _, der = wavepacket_waveform(spec, x, derivative=True)
        fd = (wavepacket_waveform(spec, x + h) - wavepacket_waveform(spec, x - h)) / (2 * h)
        assert der == pytest.approx(fd, rel=1e-7)

    def test_diamond_waveform_zero_outside(self):
        spec = diam(2.0, 0.3)
        assert wavepacket_waveform(spec, np.array([-2.5, 2.0, 3.0])).tolist() == [0j, 0j, 0j]


class TestKleinGordon:
    @pytest.mark.parametrize("k0, sigma, pos", [(3.0, 1.0, 1.0), (6.0, 1.0, -2.0), (30.0, 3.2, 2.0)])
    def test_unit_norm(self, k0, sigma, pos):
        spec = mink(k0, sigma, pos)
        F = lambda V: wavepacket_waveform(spec, V)  # noqa: E731
        dF = lambda V: wavepacket_waveform(spec, V, derivative=True)[1]  # noqa: E731
        res = klein_gordon_inner(F, F, (pos - 50 / sigma, pos + 50 / sigma), df=dF, dg=dF)
        assert res.value == pytest.approx(1.0, abs=1e-6)

    def test_norm_positive_with_finite_differences(self):
        spec = mink(5.0, 1.0)
        F = lambda V: wavepacket_waveform(spec, V)  # noqa: E731
        val = klein_gordon_inner(F, F, (-50, 50)).value
        assert abs(val.imag) < 1e-12 and val.real == pytest.approx(1.0, abs=1e-6)

    def test_hermitian(self):
        f = mink(3.0, 1.0, 0.5)
        g = mink(4.0, 1.5, -0.3)
        F = lambda V: wavepacket_waveform(f, V)  # noqa: E731
        G = lambda V: wavepacket_waveform(g, V)  # noqa: E731
        fg = klein_gordon_inner(F, G, (-60, 60)).value
        gf = klein_gordon_inner(G, F, (-60, 60)).value
        assert fg == pytest.approx(np.conj(gf), abs=1e-9)
