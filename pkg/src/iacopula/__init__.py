"""Joint distributions of ordered categorical variables from their marginals.

Copula models are built with :func:`build_joint`; arbitrary marginal-to-joint
models are probed for invariance under bin aggregation and for neutrality
with the checks in :mod:`iacopula.conformance`.
"""

from .copulas import (
    CopulaError,
    CopulaSpec,
    PluginCopula,
    UnsupportedDimensionError,
    check_copula_axioms,
    evaluate,
    rectangle_probability,
)
from .conformance import (
    ConformanceReport,
    ExtractedCopula,
    check_extraction_against,
    check_ia_at,
    check_ia_randomized,
    check_m_neutrality,
    check_m_neutrality_randomized,
    extract_copula,
    extracted_copula,
    verify_extraction_consistency,
    verify_factorization,
)
from .couplings import MaximalCouplingModel, maximal_coupling
from .joint import JointPmf, build_joint, joint_cdf, marginal_of
from .marginals import (
    Marginal,
    MarginalError,
    Permutation,
    Profile,
    collapse,
    marginal_cdf,
    permute,
    split,
)
from .oracles import CopulaModel, SubprocessOracle, get_model, register_model
from .tables import render_table

__version__ = "0.1.0"

__all__ = [
    "ConformanceReport",
    "CopulaError",
    "CopulaModel",
    "CopulaSpec",
    "ExtractedCopula",
    "JointPmf",
    "Marginal",
    "MarginalError",
    "MaximalCouplingModel",
    "Permutation",
    "PluginCopula",
    "Profile",
    "SubprocessOracle",
    "UnsupportedDimensionError",
    "build_joint",
    "check_copula_axioms",
    "check_extraction_against",
    "check_ia_at",
    "check_ia_randomized",
    "check_m_neutrality",
    "check_m_neutrality_randomized",
    "collapse",
    "evaluate",
    "extract_copula",
    "extracted_copula",
    "get_model",
    "joint_cdf",
    "marginal_cdf",
    "marginal_of",
    "maximal_coupling",
    "permute",
    "rectangle_probability",
    "register_model",
    "render_table",
    "split",
    "verify_extraction_consistency",
    "verify_factorization",
]
