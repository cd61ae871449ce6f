"""Expected-utility analysis of delegating KPI queries to an AI or a data engineer."""

__version__ = "0.1.0"

from .core import (
    INFEASIBLE,
    DelegationParams,
    FSStatus,
    Mode,
    PolicyDecision,
    Region,
    RegionLabel,
    alpha_star_fs,
    alpha_star_ps,
    beta_double_star,
    beta_star,
    classify_region,
    decide_policy,
    expected_value_fs,
    expected_value_ps,
)
from .errors import (
    ConfigError,
    DelegationError,
    GridSpecError,
    IngestionError,
    InsufficientDataError,
    MissingParameterError,
    ParameterDomainError,
)

__all__ = [
    "INFEASIBLE",
    "DelegationParams",
    "FSStatus",
    "Mode",
    "PolicyDecision",
    "Region",
    "RegionLabel",
    "alpha_star_fs",
    "alpha_star_ps",
    "beta_double_star",
    "beta_star",
    "classify_region",
    "decide_policy",
    "expected_value_fs",
    "expected_value_ps",
    "ConfigError",
    "DelegationError",
    "GridSpecError",
    "IngestionError",
    "InsufficientDataError",
    "MissingParameterError",
    "ParameterDomainError",
]
