"""Numerics for products of random invertible matrices.

Transfer-operator spectral data, projective random walks, exponential
tilting, asymptotic bias functionals, a partition of unity on projective
space, and first-order Edgeworth validation experiments for the log
coefficients of the matrix product.
"""

from .bias import GridFunction, b_bias, b_bias_grid, d_bias, delta020_check
from .edgeworth import (
    EcdfTable,
    EdgeworthParams,
    ecdf_ks,
    edgeworth_cocycle_cdf,
    edgeworth_coeff_cdf,
    grid_ks,
    normal_cdf,
    normal_pdf,
    sandwich_diagnostic,
)
from .models import (
    ConditionReport,
    FiniteSupportModel,
    RotationDiagRotationModel,
    ScalarRotationModel,
    estimate_moment,
    matrix_n,
    proximality_check,
)
from .partition import PartitionScheme, chi, chi_bar, holder_estimate, partition_check
from .projective import (
    DualPoint,
    ProjectivePoint,
    WalkRecord,
    act,
    angular_distance,
    cocycle,
    coeff_log_direct,
    delta,
    ensemble_walk,
    log_delta,
    walk,
)
from .spectral import (
    OperatorMatrix,
    ProjectiveGrid,
    SpectralData,
    build_operator,
    dominant_eigen,
    lambda_derivatives,
    mc_invariant_measure,
    spectral_data,
    stationary_measure,
)
from .streams import substream
from .tilt import TiltedPathWeight, expect_tilted, path_weight

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
