"""Band-limited smoothing kernels, two-sided recovery bounds for monotone
step functions, and exact spectral checks on box domains."""

from .laplace_box import (
    BoxDomain,
    LayerData,
    ScanRow,
    berezin_liyau,
    boundary_layer_volume,
    box_constants,
    counting_bounds,
    fit_loglog_slope,
    interior_inverse_moment,
    layer_data,
    optimal_theta,
    remainder_scan,
    spectral_bounds,
    unit_ball_constant,
)
from .mollifier import (
    BandLimitCertificate,
    CheckResult,
    TestFunction,
    ZetaSolution,
    build_gamma,
    build_rho_from_zeta,
    certify,
    crude_root_bound,
    eval_kernel,
    load_testfunction,
    moment,
    rayleigh_polynomial_bound,
    solve_zeta,
)
from .power_model import (
    ModelSandwich,
    PowerParams,
    classify,
    cubic_sandwich,
    model_sandwich,
    p_poly,
    riesz_bounds,
    weyl_pointwise,
)
from .report import BoundRow, rows_to_csv, write_csv, write_json
from .tauber_core import (
    Bounds,
    SmoothingParams,
    StepFunction,
    conv_F,
    conv_F_integral,
    conv_Fprime,
    corridor_bounds,
    pointwise_bounds,
    random_ensemble,
    signed_kernel_bounds,
    tauber_identity_residual,
    weighted_interval_bounds,
)

__all__ = [
    "BandLimitCertificate",
    "Bounds",
    "BoundRow",
    "BoxDomain",
    "CheckResult",
    "LayerData",
    "ModelSandwich",
    "PowerParams",
    "ScanRow",
    "SmoothingParams",
    "StepFunction",
    "TestFunction",
    "ZetaSolution",
    "berezin_liyau",
    "boundary_layer_volume",
    "box_constants",
    "build_gamma",
    "build_rho_from_zeta",
    "certify",
    "classify",
    "conv_F",
    "conv_F_integral",
    "conv_Fprime",
    "corridor_bounds",
    "counting_bounds",
    "crude_root_bound",
    "cubic_sandwich",
    "eval_kernel",
    "fit_loglog_slope",
    "interior_inverse_moment",
    "layer_data",
    "load_testfunction",
    "model_sandwich",
    "moment",
    "optimal_theta",
    "p_poly",
    "pointwise_bounds",
    "random_ensemble",
    "rayleigh_polynomial_bound",
    "remainder_scan",
    "riesz_bounds",
    "rows_to_csv",
    "signed_kernel_bounds",
    "solve_zeta",
    "spectral_bounds",
    "tauber_identity_residual",
    "unit_ball_constant",
    "weighted_interval_bounds",
    "weyl_pointwise",
    "write_csv",
    "write_json",
]

__version__ = "0.1.0"
