"""Stratified sampling designs from simple random sampling to Latinized partial stratification."""

from .analysis import (
    Estimator,
    MEAN,
    ReplicationSummary,
    SobolEstimate,
    estimate,
    lhs_variance_formula,
    pss_variance_formula,
    replicate_study,
    sobol_indices,
    ss_variance_formula,
)
from .design_spec import DesignSpec, Method, SubspaceSpec, make_design, parse_pss_notation, validate_design
from .designs import SampleSet, generate, lhs, lpss, lss, pss, srs, stratified
from .distributions import MarginalDistribution, lognormal, normal, uniform
from .errors import (
    ConstructionError,
    ContractError,
    DesignError,
    DimensionMismatchError,
    DomainError,
    LPSSError,
    NotationError,
)
from .strata import StrataGrid, tensor_stratify

__version__ = "0.1.0"
