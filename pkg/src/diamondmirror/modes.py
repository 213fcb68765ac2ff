"""Coordinates, mode functions and wavepackets inside and around the diamond.

All field computations are (1+1)-dimensional and use lightcone coordinates
``V = t + z`` and ``U = t - z``.  A left-moving mode depends on ``V`` only and a
right-moving one on ``U`` only; the formulas are identical, so every function
here simply takes "the" lightcone coordinate of the relevant sector.

The diamond time coordinate along a null ray is

    V0(V) = (1/a) * log((1 + aV/2) / (1 - aV/2)),      |V| < 2/a,

which is also written ``s`` below.  Wavepackets are Gaussian superpositions
of single-frequency modes; besides the narrowband closed forms, this module
provides their exact Fourier synthesis in terms of the Faddeeva function.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import erfc, wofz

from .errors import InvalidParameter, OutsideDiamond
from .numerics import integrate_adaptive

__all__ = [
    "Frame",
    "Direction",
    "DiamondScale",
    "WavepacketSpec",
    "LightconePoint",
    "diamond_coords_3p1",
    "worldline_time",
    "diamond_time",
    "diamond_mode_interior",
    "diamond_mode_exterior",
    "minkowski_mode",
    "profile",
    "profile_normalization",
    "gaussian_diamond_waveform",
    "gaussian_minkowski_waveform",
    "wavepacket_waveform",
    "diamond_packet_in_time",
    "klein_gordon_inner",
]

S_CLAMP = 50.0
_SQRT_PI = np.sqrt(np.pi)


class Frame(enum.Enum):
    DIAMOND = "diamond"
    MINKOWSKI = "minkowski"


class Direction(enum.Enum):
    LEFT = "left"
    RIGHT = "right"

    def flipped(self) -> "Direction":
        return Direction.RIGHT if self is Direction.LEFT else Direction.LEFT


@dataclass(frozen=True)
class DiamondScale:
    """Inverse length ``a`` fixing the diamond ``|t| + |z| < 2/a``."""

    a: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.a) and self.a > 0):
            raise InvalidParameter("diamond scale a must be positive and finite")

    @property
    def lifetime(self) -> float:
        return 4.0 / self.a

    @property
    def temperature(self) -> float:
        return self.a / (2 * np.pi)


UNIT_SCALE = DiamondScale(1.0)


@dataclass(frozen=True)
class WavepacketSpec:
    """Gaussian wavepacket of single-frequency modes.

    Parameters
    ----------
    frame : Frame
        ``DIAMOND`` for a packet of interior diamond modes (always centred at
        ``t = 0``), ``MINKOWSKI`` for a detector mode.
    direction : Direction
        Left movers depend on ``V``, right movers on ``U``.
    center_freq, bandwidth : float
        ``omega0, delta`` or ``k0, sigma``.
    center_pos : float
        Lightcone position of a Minkowski packet; ignored for the diamond frame.
    """

    frame: Frame
    direction: Direction
    center_freq: float
    bandwidth: float
    center_pos: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.center_freq) and self.center_freq > 0):
            raise InvalidParameter("center_freq must be positive")
        if not (np.isfinite(self.bandwidth) and self.bandwidth > 0):
            raise InvalidParameter("bandwidth must be positive")
        if not np.isfinite(self.center_pos):
            raise InvalidParameter("center_pos must be finite")
        if self.frame is Frame.DIAMOND and self.center_pos != 0.0:
            object.__setattr__(self, "center_pos", 0.0)

    @cached_property
    def normalization(self) -> float:
        return profile_normalization(self.center_freq, self.bandwidth)

    def with_direction(self, direction: Direction) -> "WavepacketSpec":
        return WavepacketSpec(self.frame, direction, self.center_freq, self.bandwidth,
                              self.center_pos)

    def moved_to(self, center_pos: float) -> "WavepacketSpec":
        return WavepacketSpec(self.frame, self.direction, self.center_freq, self.bandwidth,
                              center_pos)


@dataclass(frozen=True)
class LightconePoint:
    V: float
    U: float

    @classmethod
    def from_tz(cls, t: float, z: float) -> "LightconePoint":
        return cls(t + z, t - z)

    @property
    def t(self) -> float:
        return 0.5 * (self.V + self.U)

    @property
    def z(self) -> float:
        return 0.5 * (self.V - self.U)


def diamond_coords_3p1(t, x, y, z, scale: DiamondScale = UNIT_SCALE):
    """Diamond coordinates ``(eta, xi, zeta, rho)`` of a point inside the diamond."""
    a = scale.a
    r = np.sqrt(x * x + y * y + z * z)
    if not abs(t) + r < 2 / a:
        raise OutsideDiamond(f"point (t={t}, r={r}) is outside |t| + r < 2/a")
    f = 1 - (a * t / 2) ** 2 + (a * r / 2) ** 2 - a * x
    if f == 0:
        raise OutsideDiamond("conformal factor vanishes at this point")
    q = 1 + (a * t / 2) ** 2 - (a * r / 2) ** 2
    eta = np.arctanh(a * t / q) / a
    xi = np.log(np.sqrt(q * q - (a * t) ** 2) / f) / a
    return eta, xi, 2 * y / f, 2 * z / f


def worldline_time(eta, scale: DiamondScale = UNIT_SCALE):
    """Minkowski time ``t = (2/a) tanh(a eta / 2)`` along the diamond observer's worldline."""
    return 2 / scale.a * np.tanh(scale.a * np.asarray(eta, dtype=float) / 2)


def diamond_time(V, scale: DiamondScale = UNIT_SCALE, clamp: bool = True):
    """Diamond lightcone coordinate ``V0(V)``; clamped to ``+-50/a`` when ``clamp``.

    Raises OutsideDiamond for ``|V| >= 2/a``.
    """
    a = scale.a
    V = np.asarray(V, dtype=float)
    x = a * V / 2
    if np.any(np.abs(x) >= 1):
        raise OutsideDiamond("lightcone coordinate lies outside |V| < 2/a")
    s = 2 * np.arctanh(x) / a
    if clamp:
        s = np.clip(s, -S_CLAMP / a, S_CLAMP / a)
    return s


def diamond_mode_interior(V, omega, scale: DiamondScale = UNIT_SCALE):
    """Single-frequency interior diamond mode; zero for ``|V| >= 2/a``."""
    if np.any(np.asarray(omega) <= 0):
        raise InvalidParameter("omega must be positive")
    a = scale.a
    V = np.asarray(V, dtype=float)
    inside = np.abs(a * V / 2) < 1
    x = np.where(inside, a * V / 2, 0.0)
    phase = np.log1p(x) - np.log1p(-x)
    out = np.where(inside, np.exp(-1j * omega / a * phase) / np.sqrt(4 * np.pi * omega), 0j)
    return out[()] if out.ndim == 0 else out


def diamond_mode_exterior(V, omega, scale: DiamondScale = UNIT_SCALE):
    """Single-frequency exterior diamond mode; zero for ``|V| <= 2/a``."""
    if np.any(np.asarray(omega) <= 0):
        raise InvalidParameter("omega must be positive")
    a = scale.a
    V = np.asarray(V, dtype=float)
    outside = np.abs(a * V / 2) > 1
    x = np.where(outside, a * V / 2, 3.0)
    phase = np.log(np.abs((x + 1) / (x - 1)))
    out = np.where(outside, np.exp(1j * omega / a * phase) / np.sqrt(4 * np.pi * omega), 0j)
    return out[()] if out.ndim == 0 else out


def minkowski_mode(coord, k):
    """Plane wave ``exp(-i k coord) / sqrt(4 pi k)``."""
    if np.any(np.asarray(k) <= 0):
        raise InvalidParameter("k must be positive")
    return np.exp(-1j * k * np.asarray(coord, dtype=float)) / np.sqrt(4 * np.pi * k)


def profile_normalization(center, width):
    """Constant N with ``int_0^inf N^2 x exp(-(x - c)^2 / (2 w^2)) dx = 1``.

    The integral is elementary, so no narrowband approximation is involved.
    """
    c, w = float(center), float(width)
    u = c / (w * np.sqrt(2))
    moment = w * w * np.exp(-u * u) + c * w * np.sqrt(np.pi / 2) * erfc(-u)
    return 1.0 / np.sqrt(moment)


def profile(spec: WavepacketSpec, freq):
    """Frequency profile ``g(omega)`` or ``f(k)`` of a wavepacket (normalised)."""
    freq = np.asarray(freq, dtype=float)
    if np.any(freq <= 0):
        raise InvalidParameter("profile is defined for positive frequencies only")
    amp = spec.normalization * np.sqrt(freq) * np.exp(
        -((freq - spec.center_freq) ** 2) / (4 * spec.bandwidth**2)
    )
    if spec.frame is Frame.MINKOWSKI:
        return amp * np.exp(-1j * freq * spec.center_pos)
    return amp.astype(complex)


def gaussian_diamond_waveform(V, omega0, delta, scale: DiamondScale = UNIT_SCALE):
    """Narrowband closed form of the diamond wavepacket at ``t = 0``."""
    s = diamond_time(V, scale)
    return (delta**2 / (2 * np.pi * omega0**2)) ** 0.25 * np.exp(-s * (s * delta**2 + 1j * omega0))


def gaussian_minkowski_waveform(V, k0, sigma, V0):
    """Narrowband closed form of a Minkowski detector wavepacket centred at ``V0``."""
    x = np.asarray(V, dtype=float) - V0
    return (sigma**2 / (2 * np.pi * k0**2)) ** 0.25 * np.exp(-x * (x * sigma**2 + 1j * k0))


def _w_transform(s, c, b):
    """``int_0^inf exp(-(q-c)^2/(4 b^2) - i q s) dq`` and its s-derivative."""
    s = np.asarray(s, dtype=float)
    z = b * s + 1j * c / (2 * b)
    w = wofz(z)
    gauss = np.exp(-b * b * s * s - 1j * c * s)
    tail = np.exp(-c * c / (4 * b * b))
    val = b * _SQRT_PI * (2 * gauss - tail * w)
    dw = -2 * z * w + 2j / _SQRT_PI
    der = b * _SQRT_PI * (2 * (-2 * b * b * s - 1j * c) * gauss - tail * b * dw)
    return val, der


def wavepacket_waveform(spec: WavepacketSpec, coord, scale: DiamondScale = UNIT_SCALE,
                        derivative: bool = False):
    """Exact position-space waveform of a wavepacket (and optionally d/dcoord).

    For the Minkowski frame this is ``sum_k conj(phase) f(k) u_k`` evaluated in
    closed form.  For the diamond frame it is ``int dw g(w) g_w(V)`` restricted
    to the interior; outside the diamond both value and derivative vanish.
    """
    pref = spec.normalization / np.sqrt(4 * np.pi)
    coord = np.asarray(coord, dtype=float)
    if spec.frame is Frame.MINKOWSKI:
        val, der = _w_transform(coord - spec.center_pos, spec.center_freq, spec.bandwidth)
        val, der = pref * val, pref * der
    else:
        a = scale.a
        x = a * coord / 2
        inside = np.abs(x) < 1
        xi = np.where(inside, x, 0.0)
        s = np.clip(2 * np.arctanh(xi) / a, -S_CLAMP / a, S_CLAMP / a)
        val, der = _w_transform(s, spec.center_freq, spec.bandwidth)
        val = np.where(inside, pref * val, 0j)
        der = np.where(inside, pref * der / (1 - xi * xi), 0j)
    if derivative:
        return val, der
    return val


def diamond_packet_in_time(spec: WavepacketSpec, s):
    """Diamond wavepacket and its derivative as functions of ``s = V0``.

    Working in ``s`` avoids the cancellation in ``1 - (aV/2)^2`` near the
    diamond edge.
    """
    if spec.frame is not Frame.DIAMOND:
        raise InvalidParameter("diamond_packet_in_time needs a diamond-frame packet")
    pref = spec.normalization / np.sqrt(4 * np.pi)
    val, der = _w_transform(s, spec.center_freq, spec.bandwidth)
    return pref * val, pref * der


def klein_gordon_inner(f, g, domain, scale: DiamondScale = UNIT_SCALE, df=None, dg=None,
                       abs_tol=1e-12, rel_tol=1e-9):
    """Klein-Gordon product ``<f, g> = i int (conj(f) g' - g conj(f)')`` over ``domain``.

    ``f`` and ``g`` are vectorised callables of the lightcone coordinate.
    Missing derivatives are taken by central differences with step ``1e-5/a``.
    The sign makes norms of positive-frequency modes positive.

    Returns
    -------
    QuadratureResult
    """
    h = 1e-5 / scale.a
    if df is None:
        df = lambda x: (f(x + h) - f(x - h)) / (2 * h)  # noqa: E731
    if dg is None:
        dg = lambda x: (g(x + h) - g(x - h)) / (2 * h)  # noqa: E731

    def integrand(x):
        fc = np.conj(f(x))
        return 1j * (fc * dg(x) - g(x) * np.conj(df(x)))

    return integrate_adaptive(integrand, domain, abs_tol=abs_tol, rel_tol=rel_tol)
