"""Needlet-based blind deconvolution on the unit sphere.

The package splits along the pipeline: harmonic analysis primitives
(`harmonics`, `quadrature`), the needlet frame (`needlets`), blockwise
operators and screening (`operators`), seeded experiment inputs
(`simulate`), the two estimators (`estimators`), constant calibration
(`calibrate`), and the Monte Carlo study harness (`bench`).  The
`sphdeconv` console script fronts the lot.
"""

from .harmonics import (
    FOUR_PI,
    HarmonicCoeffs,
    SphPoint,
    analyze,
    eval_sh,
    grid_analyze,
    grid_synthesize,
    legendre_kernel,
    points_analyze,
    points_synthesize,
    sh_design_matrix,
    synthesize,
)
from .quadrature import CubatureSet, GridSpec, level_cubature, load_pointset, product_rule
from .needlets import (
    NeedletCoeffs,
    NeedletFrame,
    band_range,
    besov_norm,
    build_frame,
    localization_profile,
    needlet_analyze,
    needlet_synthesize,
    window_a,
    window_b,
)
from .operators import (
    BlockOperator,
    DipEstimate,
    ThresholdedOperator,
    block_inverse_norm,
    estimate_dip,
    load_operator,
    perturb,
    rosenthal,
    save_operator,
    spectral_cutoff,
    t_op,
    threshold_perturbed,
)
from .simulate import (
    FixtureConfig,
    Observation,
    TargetDensity,
    fixture_streams,
    make_fixture,
    observe_signal,
    target_density,
)
from .estimators import (
    EstimateResult,
    ThresholdConfig,
    bbd_estimate,
    bnd_estimate,
    max_level,
    signal_threshold,
)
from .calibrate import (
    STUDY_OVERSAMPLE,
    CalibrationResult,
    calibrate_kappa,
    calibrate_tau,
)
from .bench import (
    ErrorReport,
    eval_grid,
    export_field,
    lp_error,
    run_study,
    write_field_csv,
)

__version__ = "0.1.0"

__all__ = [
    "FOUR_PI",
    "HarmonicCoeffs",
    "SphPoint",
    "analyze",
    "eval_sh",
    "grid_analyze",
    "grid_synthesize",
    "legendre_kernel",
    "points_analyze",
    "points_synthesize",
    "sh_design_matrix",
    "synthesize",
    "CubatureSet",
    "GridSpec",
    "level_cubature",
    "load_pointset",
    "product_rule",
    "NeedletCoeffs",
    "NeedletFrame",
    "band_range",
    "besov_norm",
    "build_frame",
    "localization_profile",
    "needlet_analyze",
    "needlet_synthesize",
    "window_a",
    "window_b",
    "BlockOperator",
    "DipEstimate",
    "ThresholdedOperator",
    "block_inverse_norm",
    "estimate_dip",
    "load_operator",
    "perturb",
    "rosenthal",
    "save_operator",
    "spectral_cutoff",
    "t_op",
    "threshold_perturbed",
    "FixtureConfig",
    "Observation",
    "TargetDensity",
    "fixture_streams",
    "make_fixture",
    "observe_signal",
    "target_density",
    "EstimateResult",
    "ThresholdConfig",
    "bbd_estimate",
    "bnd_estimate",
    "max_level",
    "signal_threshold",
    "STUDY_OVERSAMPLE",
    "CalibrationResult",
    "calibrate_kappa",
    "calibrate_tau",
    "ErrorReport",
    "eval_grid",
    "export_field",
    "lp_error",
    "run_study",
    "write_field_csv",
]
