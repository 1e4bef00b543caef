"""Pseudospectral Zakharov-Kuznetsov solver on the half-strip with a boundary wavemaker."""

__version__ = "0.1.0"

from .errors import (
    AccuracyError,
    ConfigError,
    ConvergenceError,
    DimensionError,
    DivergentSeriesError,
    FormatError,
    NumericError,
    OrderError,
    SingularMultiplierError,
    ZKError,
)
from .transverse import StripGeometry, TransverseModes, eigenvalue, basis_eval, forward_transverse, inverse_transverse
from .dispersion import ModeSpectrum, omega_2d, omega_k, sigma_k, propagate_mode, propagate_2d, airy_kernel_2d, space_time_spectrum
from .fractional import rl_integral, frac_fourier_multiplier, gamma_ratio_constant
from .norms import BourgainParams, NormReport, x0b_norm, y0b_norm, hs_t_l2y_norm, energy_norm, zb_norm, restriction_norm
from .forcing import (
    BoundaryData,
    ForcingMultiplier,
    linear_trace,
    corrected_boundary,
    forcing_multiplier,
    forcing_from_boundary,
    neumann_series_forcing,
    forcing_regularity,
    calibrate_forcing_constant,
    trace_inverse,
)
from .solver import (
    SolverConfig,
    SpaceTimeField,
    PicardReport,
    Solution,
    extend_initial,
    extend_boundary,
    cutoff_theta,
    duhamel_inhomogeneous,
    duhamel_delta,
    nonlinearity,
    picard_solve,
    solve_with_halving,
    restrict,
    pde_residual,
)
from .estimates import (
    EstimateConfig,
    RatioSweep,
    check_group_estimate,
    check_delta_forcing,
    check_duhamel_yx,
    check_trace_estimate,
    check_bilinear,
    check_strichartz_embedding,
    grid_study,
)
