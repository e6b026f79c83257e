"""Spectral analysis of model geometric Laplacians with non-compact ends.

Numerical toolkit for operators of the form -d²/du² + μ + V(u) arising from
transverse-mode decomposition on cylindrical ends, their cusp-end analogues,
and 2D corner models -∂₁² - ∂₂² + Δ_Y.  Provides exterior complex scaling,
essential-spectrum ray predictions, resonance extraction with θ-sweep
stability certificates, a glued-kernel approximate resolvent with pole
search on second sheets, limiting-absorption estimates, and independent
transfer-matrix oracles for piecewise-constant potentials.
"""

from .spectral_core import (
    CrossSectionSpectrum,
    ScalingParameter,
    SpectralSurfacePoint,
    make_cross_section,
    in_gamma,
    theta_prime,
    surface_point,
    branch_sqrt,
)
from .potentials import RadialPotential, square_well, barrier, smooth_bump, tabulated, zero_potential
from .modes import (
    ModeOperator,
    LineOperator,
    reduce_cylindrical,
    reduce_cusp,
    cusp_to_schrodinger,
    warped_product_potential,
    WarpedProfile,
    bump_profile,
)
from .scaling import (
    ScaledModeOperator,
    RaySet,
    dilate_mode,
    essential_rays,
    distance_to_rays,
    apply_dilation,
    THETA_DEFAULT,
    THETA_SWEEP_DEFAULT,
)
from .discretize import (
    Grid1D,
    Grid2D,
    DiscretizedOperator,
    ResonanceSet,
    Resonance,
    discretize,
    eig,
    find_resonances,
    bound_states,
    aligned_grid,
)
from .continuation import (
    CutoffFamily,
    WeightedSpaceParam,
    CoreModel,
    free_mode_kernel,
    weighted_norm,
    cutoff_eval,
    assemble_parametrix,
    residual_G,
    pole_search,
    continue_matrix_element,
    AnalyticVector,
)
from .lap import LapReport, lap_estimate
from .corner import (
    CornerModel,
    ChannelSpectrum,
    channel_spectra,
    corner_essential_spectrum,
    corner_discretize,
    corner_resonances,
    accumulation_check,
    AccumulationReport,
)
from .errors import EndspecError, ConfigError, NumericalError, GridError

__version__ = "0.1.0"
