"""The finite-lifetime mirror as a beamsplitter acting on diamond wavepacket modes.

For a detector packet ``f`` on side ``i`` write ``A_i = A_fg`` and
``B_i = B_fg`` (see :func:`diamondmirror.bogoliubov.overlaps`), ``c = cos theta``
and ``s = sin theta``.  Evaluating the output operators in the Minkowski
vacuum gives the non-zero second moments

    <a_i^dag a_j> = 2(1-c) [conj(A_i) A_j I_s + conj(B_i) B_j I_c]      same side
    <a_i a_j>     = -(1-c)(1 + 2 I_s) (A_i B_j + A_j B_i)                same side
    <a_l a_r>     = -i s [e^{i phi} A_l B_r + e^{-i phi} B_l A_r]        opposite sides

with ``I_c - I_s = 1``.  Left and right movers are treated identically.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bogoliubov import OverlapSet, detector_commutator, overlaps, thermal_integrals
from .errors import DetectorOverlapTooLarge, InvalidParameter, NonPhysical
from .gaussian import is_physical
from .modes import (
    UNIT_SCALE,
    DiamondScale,
    Direction,
    Frame,
    S_CLAMP,
    WavepacketSpec,
    gaussian_diamond_waveform,
    gaussian_minkowski_waveform,
    klein_gordon_inner,
)

__all__ = [
    "MirrorUnitary",
    "DetectorChannel",
    "MomentSet",
    "particle_number",
    "particle_number_fast",
    "fast_overlaps",
    "output_moments_lr",
    "output_moments_ll",
    "covariance_from_moments",
    "energy_decay_exponent",
    "DEFAULT_OVERLAP_GATE",
]

DEFAULT_OVERLAP_GATE = 0.05


@dataclass(frozen=True)
class MirrorUnitary:
    """Beamsplitter between the left and right diamond wavepacket modes."""

    theta: float = np.pi / 2
    phi: float = 0.0

    def __post_init__(self):
        if not (0 <= self.theta <= np.pi):
            raise InvalidParameter("theta must lie in [0, pi]")
        if not np.isfinite(self.phi):
            raise InvalidParameter("phi must be finite")


@dataclass(frozen=True)
class DetectorChannel:
    spec: WavepacketSpec
    side: Direction

    def __post_init__(self):
        if self.spec.frame is not Frame.MINKOWSKI:
            raise InvalidParameter("detectors are Minkowski wavepackets")
        if self.spec.direction is not self.side:
            raise InvalidParameter("detector packet direction must match its side")

    @classmethod
    def make(cls, side, k0, sigma, center):
        side = Direction(side)
        return cls(WavepacketSpec(Frame.MINKOWSKI, side, k0, sigma, center), side)


@dataclass(frozen=True)
class MomentSet:
    """Second moments of two detector modes labelled A (index 0) and B (index 1).

    ``n[i, j] = <a_i^dag a_j>`` and ``m[i, j] = <a_i a_j>``.
    """

    n: np.ndarray
    m: np.ndarray
    labels: tuple = ("A", "B")
    overlaps: tuple = field(default=(), compare=False)

    def __post_init__(self):
        n = np.asarray(self.n, dtype=complex)
        m = np.asarray(self.m, dtype=complex)
        if n.shape != (2, 2) or m.shape != (2, 2):
            raise InvalidParameter("moment matrices must be 2x2")
        tol = 1e-12 * (1 + np.abs(n).max())
        if np.abs(n - n.conj().T).max() > tol:
            raise InvalidParameter("<a_i^dag a_j> must be Hermitian")
        if np.abs(m - m.T).max() > 1e-12 * (1 + np.abs(m).max()):
            raise InvalidParameter("<a_i a_j> must be symmetric")
        if np.diag(n).real.min() < -tol:
            raise InvalidParameter("particle numbers must be non-negative")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "m", m)

    @property
    def n_aa_dag_a(self):
        return self.n

    @property
    def m_aa(self):
        return self.m


def _number(o: OverlapSet, u: MirrorUnitary) -> float:
    c = np.cos(u.theta)
    return float(2 * (1 - c) * (abs(o.a_fg) ** 2 * o.i_s + abs(o.b_fg) ** 2 * o.i_c))


def particle_number(det: DetectorChannel, g: WavepacketSpec, u: MirrorUnitary,
                    scale: DiamondScale = UNIT_SCALE, method: str = "double") -> float:
    """Mean number of output particles in detector mode ``det``."""
    if u.theta == 0:
        return 0.0
    o = overlaps(det.spec, g.with_direction(det.side), scale, method=method)
    return _number(o, u)


def fast_overlaps(det: DetectorChannel, g: WavepacketSpec, scale: DiamondScale = UNIT_SCALE):
    """Overlaps from Klein-Gordon products of the narrowband closed-form waveforms.

    Returns an :class:`OverlapSet` with ``a_fg = <F, G>`` and
    ``b_fg = -<G, F*>``.  Products are taken in the diamond time ``s``, where
    both waveforms are smooth and the diamond packet decays like a Gaussian.
    """
    f = det.spec
    a = scale.a
    w0, dl = g.center_freq, g.bandwidth
    k0, sg, V0 = f.center_freq, f.bandwidth, f.center_pos
    S = min(S_CLAMP, 8.0 * a / dl) / a
    cg = (dl**2 / (2 * np.pi * w0**2)) ** 0.25
    cf = (sg**2 / (2 * np.pi * k0**2)) ** 0.25

    def G(s):
        return cg * np.exp(-s * (s * dl**2 + 1j * w0))

    def dG(s):
        return -(2 * s * dl**2 + 1j * w0) * G(s)

    def F(s):
        return gaussian_minkowski_waveform(2 / a * np.tanh(a * s / 2), k0, sg, V0)

    def dF(s):
        x = 2 / a * np.tanh(a * s / 2) - V0
        jac = 1 / np.cosh(a * s / 2) ** 2
        return -(2 * x * sg**2 + 1j * k0) * cf * np.exp(-x * (x * sg**2 + 1j * k0)) * jac

    def Fc(s):
        return np.conj(F(s))

    def dFc(s):
        return np.conj(dF(s))

    p = klein_gordon_inner(F, G, (-S, S), scale, df=dF, dg=dG, abs_tol=1e-14, rel_tol=1e-10)
    q = klein_gordon_inner(G, Fc, (-S, S), scale, df=dG, dg=dFc, abs_tol=1e-14, rel_tol=1e-10)
    i_c, i_s = thermal_integrals(g, scale)
    return OverlapSet(p.value, -q.value, i_c, i_s, p.value,
                      p.error_estimate + q.error_estimate, "fast")


def particle_number_fast(det: DetectorChannel, g: WavepacketSpec, u: MirrorUnitary,
                         scale: DiamondScale = UNIT_SCALE) -> float:
    """Particle number from position-space commutators of closed-form waveforms.

    Valid in the narrowband regime (``k0 >> sigma`` and ``omega0 >> delta``);
    much cheaper than :func:`particle_number` at high detector frequency.
    """
    if u.theta == 0:
        return 0.0
    return _number(fast_overlaps(det, g.with_direction(det.side), scale), u)


def _overlaps_for(det, g, scale, method, cache):
    key = (det.spec, det.side)
    if cache is not None and key in cache:
        return cache[key]
    gd = g.with_direction(det.side)
    o = fast_overlaps(det, gd, scale) if method == "fast" else overlaps(det.spec, gd, scale,
                                                                         method=method)
    if cache is not None:
        cache[key] = o
    return o


def _same_side(oi, oj, c):
    Ai, Bi, Aj, Bj = oi.a_fg, oi.b_fg, oj.a_fg, oj.b_fg
    i_s, i_c = oi.i_s, oi.i_c
    n = 2 * (1 - c) * (np.conj(Ai) * Aj * i_s + np.conj(Bi) * Bj * i_c)
    m = -(1 - c) * (1 + 2 * i_s) * (Ai * Bj + Aj * Bi)
    return n, m


def output_moments_lr(detL: DetectorChannel, detR: DetectorChannel, g: WavepacketSpec,
                      u: MirrorUnitary, scale: DiamondScale = UNIT_SCALE,
                      method: str = "double", cache=None) -> MomentSet:
    """Moments of a left-moving (A) and a right-moving (B) output detector mode.

    ``cache`` may be a dict reused across calls to avoid recomputing overlaps.
    """
    if detL.side is not Direction.LEFT or detR.side is not Direction.RIGHT:
        raise InvalidParameter("output_moments_lr needs a left and a right detector")
    c, s = np.cos(u.theta), np.sin(u.theta)
    if u.theta == 0:
        return MomentSet(np.zeros((2, 2)), np.zeros((2, 2)), ("L", "R"))
    ol = _overlaps_for(detL, g, scale, method, cache)
    orr = _overlaps_for(detR, g, scale, method, cache)
    n = np.zeros((2, 2), dtype=complex)
    m = np.zeros((2, 2), dtype=complex)
    n[0, 0], m[0, 0] = _same_side(ol, ol, c)
    n[1, 1], m[1, 1] = _same_side(orr, orr, c)
    n[0, 0], n[1, 1] = n[0, 0].real, n[1, 1].real
    ep = np.exp(1j * u.phi)
    m[0, 1] = m[1, 0] = -1j * s * (ep * ol.a_fg * orr.b_fg + np.conj(ep) * ol.b_fg * orr.a_fg)
    return MomentSet(n, m, ("L", "R"), (ol, orr))


def output_moments_ll(detPlus: DetectorChannel, detMinus: DetectorChannel, g: WavepacketSpec,
                      u: MirrorUnitary, scale: DiamondScale = UNIT_SCALE,
                      method: str = "double", gate: float = DEFAULT_OVERLAP_GATE,
                      cache=None) -> MomentSet:
    """Moments of two detector modes moving in the same direction.

    Raises
    ------
    DetectorOverlapTooLarge
        If ``|[a_+, a_-^dag]|`` reaches ``gate``; such detector modes are not
        independent and no orthogonalisation is attempted.
    """
    if detPlus.side is not detMinus.side:
        raise InvalidParameter("output_moments_ll needs two detectors on the same side")
    comm = detector_commutator(detPlus.spec, detMinus.spec)
    if abs(comm) >= gate:
        raise DetectorOverlapTooLarge(
            f"detector commutator {abs(comm):.3g} exceeds gate {gate}", commutator=comm)
    if u.theta == 0:
        return MomentSet(np.zeros((2, 2)), np.zeros((2, 2)), ("+", "-"))
    c = np.cos(u.theta)
    op = _overlaps_for(detPlus, g, scale, method, cache)
    om = _overlaps_for(detMinus, g, scale, method, cache)
    n = np.zeros((2, 2), dtype=complex)
    m = np.zeros((2, 2), dtype=complex)
    for i, oi in enumerate((op, om)):
        for j, oj in enumerate((op, om)):
            n[i, j], m[i, j] = _same_side(oi, oj, c)
    n[0, 0], n[1, 1] = n[0, 0].real, n[1, 1].real
    n[1, 0] = np.conj(n[0, 1])
    return MomentSet(n, m, ("+", "-"), (op, om))


def covariance_from_moments(m: MomentSet, tol: float = 1e-6) -> np.ndarray:
    """Covariance matrix in the basis ``(X_A, P_A, X_B, P_B)``, vacuum = identity.

    ``X = a + a^dag`` and ``P = -i(a - a^dag)``.

    Raises
    ------
    NonPhysical
        If ``sigma + i Omega`` has an eigenvalue below ``-tol``.
    """
    n, mm = m.n, m.m
    sigma = np.empty((4, 4))
    for i in range(2):
        ni, mi = n[i, i].real, mm[i, i]
        sigma[2 * i:2 * i + 2, 2 * i:2 * i + 2] = [
            [1 + 2 * ni + 2 * mi.real, 2 * mi.imag],
            [2 * mi.imag, 1 + 2 * ni - 2 * mi.real],
        ]
    ab, adb = mm[0, 1], n[0, 1]
    C = np.array([
        [2 * ab.real + 2 * adb.real, 2 * ab.imag + 2 * adb.imag],
        [2 * ab.imag - 2 * adb.imag, -2 * ab.real + 2 * adb.real],
    ])
    sigma[0:2, 2:4] = C
    sigma[2:4, 0:2] = C.T
    if not is_physical(sigma, tol):
        raise NonPhysical("covariance matrix violates the uncertainty principle")
    return sigma


def energy_decay_exponent(det_template: DetectorChannel, g: WavepacketSpec, u: MirrorUnitary,
                          scale: DiamondScale = UNIT_SCALE, k0_grid=(), particle_numbers=None):
    """Log-log slope of the detected energy ``k0 * N`` against ``k0``.

    ``particle_numbers`` bypasses the physics (for synthetic checks); otherwise
    N is computed with :func:`particle_number_fast` at each ``k0``.  A slope
    below -1 means the summed energy flux converges.
    """
    k0 = np.asarray(k0_grid, dtype=float)
    if k0.size < 5 or np.any(np.diff(k0) <= 0) or np.any(k0 <= 0):
        raise InvalidParameter("k0_grid must be increasing, positive and hold >= 5 points")
    if particle_numbers is None:
        sp = det_template.spec
        particle_numbers = [
            particle_number_fast(
                DetectorChannel(WavepacketSpec(sp.frame, sp.direction, k, sp.bandwidth,
                                               sp.center_pos), det_template.side),
                g, u, scale)
            for k in k0
        ]
    energy = k0 * np.asarray(particle_numbers, dtype=float)
    if np.any(energy <= 0):
        raise InvalidParameter("energies must be positive to fit a power law")
    slope, _ = np.polyfit(np.log(k0), np.log(energy), 1)
    return float(slope)
