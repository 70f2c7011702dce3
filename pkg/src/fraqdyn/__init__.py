"""Fractional-order Hindmarsh-Rose neuron models.

Caputo predictor-corrector integration, equilibrium branches, fractional
stability and critical orders, parameter sweeps and burst analysis.
"""

from .bifurcation import (
    HOPF_AT_QSTAR,
    STABLE_ALL_Q,
    UNSTABLE_ALL_Q,
    HopfCurve,
    RegimeTable,
    RegionGrid,
    hopf_curve_2d,
    hopf_curve_3d,
    regime_boundaries_3d,
    stability_region_3d,
)
from .dynamics import (
    BURSTING,
    EQUILIBRIUM,
    LIMIT_CYCLE,
    UNDETERMINED,
    AttractorClass,
    AttractorConfig,
    Burst,
    BurstSummary,
    SpikeTrain,
    classify_attractor,
    detect_spikes,
    interspike_cv,
    segment_bursts,
)
from .equilibria import (
    Equilibrium2D,
    Equilibrium3D,
    branch_inverse_2d,
    equilibria_2d,
    equilibrium_3d,
    inverse_big_h,
)
from .errors import ConfigError, DomainError, FraqdynError, SolverDivergence
from .fracsolve import SolverConfig, Trajectory, VectorField, abm_weights, mittag_leffler, solve_caputo
from .hrmodels import (
    AssumptionWarning,
    HR2DParams,
    HR3DParams,
    big_h,
    derive,
    h,
    hr2d_field,
    hr2d_vector_field,
    hr3d_field,
    hr3d_vector_field,
    reference_2d,
    reference_3d,
    resting_x0,
)
from .polynomial import CubicRoots, cubic_real_roots
from .stability import (
    Status,
    StabilityVerdict,
    classify_2d,
    classify_3d,
    critical_q_2d,
    critical_q_3d,
    hopf_window_2d,
    matignon_check,
    stability_band_3d,
    stable_2x2,
)

__version__ = "0.1.0"
