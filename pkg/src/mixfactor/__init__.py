"""PCA of mixed numerical/categorical data, rotation and multiple factor analysis."""
from ._kernels import BACKEND
from .errors import (
    DimensionError,
    MixfactorError,
    NumericalError,
    SchemaError,
    UnknownLevelError,
    ZeroVarianceError,
)
from .gsvd import DiagMetric, GsvdResult, col_scores, gsvd, row_scores
from .mfamix import (
    MfamixModel,
    fit_mfamix,
    group_contributions,
    partial_axes,
    partial_observations,
    predict_mfamix,
)
from .pcamix import (
    FactorModel,
    ca_oracle,
    correlation_circle,
    fit_pcamix,
    level_scores,
    predict_scores,
)
from .pcarot import (
    RotationResult,
    planar_angle,
    predict_rotated,
    rotate,
    rotated_sqload,
    varimax_criterion,
)
from .preprocess import (
    MixedTable,
    Preprocessed,
    apply_preprocess,
    build_preprocessed,
    indicator,
    splitmix,
    standardize,
)

__version__ = "0.1.0"
