"""Infinitesimal laws, their transforms, and multiplicative convolutions.

Scalar infinitesimal distributions are dual-number moment sequences; the
package computes their transforms (psi, eta, kappa, rho, S, T and their
infinitesimal companions), free and infinitesimal cumulants, t-coefficients
over non-crossing linked partitions, the three multiplicative convolutions
with independent combinatorial oracles, the 2x2 upper-triangular embedding,
and a seeded Wishart Monte Carlo harness for the limit-law predictions.
"""

from .convolve import (
    ProductKind,
    VerificationReport,
    boolean_mixed_moments,
    convolve_by_transform,
    free_mixed_moments,
    monotone_word_moment,
    oracle_boolean_product,
    oracle_free_product,
    oracle_monotone_product,
    oracle_product,
    verify,
)
from .cumulants import (
    CumulantVector,
    MixedVanishingReport,
    TCoeffVector,
    constant_cumulant_law,
    cumulants_from_moments,
    d_t_pi_value,
    inf_cumulants_direct,
    kappa_from_t,
    make_mixed_t,
    mixed_vanishing_check,
    moments_from_cumulants,
    moments_from_t,
    t_coeffs_from_moments,
    t_pi_value,
)
from .dual import DualScalar
from .errors import (
    ConfigError,
    InfconvError,
    InvalidInputError,
    MathDomainError,
    SizeLimitError,
)
from .laws import (
    InfLaw,
    TransformKind,
    d_transform,
    eta_plain,
    eta_tilde,
    kappa_transform,
    law_from_transform,
    psi,
    rho_transform,
    s_transform,
    scaled,
    shifted,
    t_transform,
    transform,
)
from .partitions import (
    LinkedPartition,
    SetPartition,
    connected_classes,
    enumerate_nc,
    enumerate_ncl,
    is_noncrossing,
    linked_class,
    non_minimal_elements,
    parse_partition_text,
)
from .series import DualSeries
from .triangular import (
    UT2,
    CenteredWordReport,
    TildeFunctional,
    apply_series,
    block_transform,
    block_transform_formula,
    centered_alternating_check,
    eta_block,
    kappa_block,
    psi_block,
    rho_block,
    t_block,
)
from .wishart import (
    McEstimate,
    McExtrapolation,
    McRow,
    WishartConfig,
    estimate_moments,
    product_experiment,
    sample_wishart,
    trace_powers,
)

__version__ = "0.1.0"

__all__ = [
    "ProductKind",
    "VerificationReport",
    "boolean_mixed_moments",
    "convolve_by_transform",
    "free_mixed_moments",
    "monotone_word_moment",
    "oracle_boolean_product",
    "oracle_free_product",
    "oracle_monotone_product",
    "oracle_product",
    "verify",
    "CumulantVector",
    "MixedVanishingReport",
    "TCoeffVector",
    "constant_cumulant_law",
    "cumulants_from_moments",
    "d_t_pi_value",
    "t_pi_value",
    "inf_cumulants_direct",
    "kappa_from_t",
    "make_mixed_t",
    "mixed_vanishing_check",
    "moments_from_cumulants",
    "moments_from_t",
    "t_coeffs_from_moments",
    "DualScalar",
    "ConfigError",
    "InfconvError",
    "InvalidInputError",
    "MathDomainError",
    "SizeLimitError",
    "InfLaw",
    "TransformKind",
    "d_transform",
    "eta_plain",
    "eta_tilde",
    "kappa_transform",
    "law_from_transform",
    "psi",
    "rho_transform",
    "s_transform",
    "scaled",
    "shifted",
    "t_transform",
    "transform",
    "LinkedPartition",
    "SetPartition",
    "connected_classes",
    "enumerate_nc",
    "enumerate_ncl",
    "is_noncrossing",
    "linked_class",
    "non_minimal_elements",
    "parse_partition_text",
    "DualSeries",
    "UT2",
    "CenteredWordReport",
    "TildeFunctional",
    "apply_series",
    "block_transform",
    "block_transform_formula",
    "centered_alternating_check",
    "eta_block",
    "kappa_block",
    "psi_block",
    "rho_block",
    "t_block",
    "McEstimate",
    "McExtrapolation",
    "McRow",
    "WishartConfig",
    "estimate_moments",
    "product_experiment",
    "sample_wishart",
    "trace_powers",
    "__version__",
]
