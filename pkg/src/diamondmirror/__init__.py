"""Particle production and entanglement from a mirror living in a causal diamond.

A (1+1)D massless scalar field starts in the Minkowski vacuum.  A perfectly
reflecting mirror exists only inside the diamond ``|t| + |z| < 2/a`` and acts
as a beamsplitter on diamond wavepacket modes.  The package computes what
inertial wavepacket detectors see afterwards: particle numbers, two-mode
Gaussian states and their entanglement, and the high-frequency energy decay.

Submodules
----------
numerics    Kummer function, adaptive Gauss-Kronrod quadrature.
modes       coordinates, mode functions, wavepackets, Klein-Gordon product.
bogoliubov  diamond/Minkowski kernels and wavepacket overlaps.
circuit     beamsplitter output moments, particle numbers, covariance matrices.
gaussian    two-mode Gaussian entanglement measures.
sweeps      figure-data parameter sweeps (driven by ``diamondmirror.cli``).
"""

from . import bogoliubov, circuit, gaussian, modes, numerics
from .bogoliubov import (
    OverlapSet,
    alpha0,
    beta0,
    detector_commutator,
    overlaps,
    thermal_integrals,
    unruh_a,
    unruh_b,
)
from .circuit import (
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
from .errors import (
    DegenerateState,
    DetectorOverlapTooLarge,
    DiamondMirrorError,
    InvalidParameter,
    NonConvergence,
    NonPhysical,
    OptimizationFailed,
    OutsideDiamond,
    ToleranceNotMet,
)
from .gaussian import (
    StandardForm,
    entropy_of_entanglement,
    eof,
    epr_variance_product,
    is_physical,
    log_negativity,
    standard_form,
    tmsv,
)
from .modes import (
    DiamondScale,
    Direction,
    Frame,
    LightconePoint,
    WavepacketSpec,
    klein_gordon_inner,
    profile,
)
from .numerics import QuadratureResult, integrate_adaptive, kummer_m, squeezing_parameter

__version__ = "0.1.0"
