"""Perfect sampling of Gaussian Markov random fields."""

from ._core import (
    FlatCoupler,
    LevelSchedule,
    StratifiedCoupler,
    check,
    covariance,
    duality_check_binary,
    gamma_tilde,
    gamma_truncated,
    run_cli,
    sample_gaussian,
    sample_l_dependent,
    sample_truncated,
)

__all__ = [
    "FlatCoupler",
    "LevelSchedule",
    "StratifiedCoupler",
    "check",
    "covariance",
    "duality_check_binary",
    "gamma_tilde",
    "gamma_truncated",
    "run_cli",
    "sample_gaussian",
    "sample_l_dependent",
    "sample_truncated",
]
