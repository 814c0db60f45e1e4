"""Numerical verification layer: series, quadrature, paths, continuation."""

from .series import SeriesValue, NoConvergence, fd_series, euler_integral_check
from .scene import (
    NumericScene,
    SceneError,
    ConditionViolated,
    EndpointDivergence,
    scene_from_json,
    scene_from_alphas,
)
from .paths import period_vector
from .continuation import (
    BranchJump,
    ClearanceLost,
    LoopSchedule,
    continue_chains,
    continue_loop,
    verify_monodromy_numeric,
)

__all__ = [
    "SeriesValue",
    "NoConvergence",
    "fd_series",
    "euler_integral_check",
    "NumericScene",
    "SceneError",
    "ConditionViolated",
    "EndpointDivergence",
    "scene_from_json",
    "scene_from_alphas",
    "period_vector",
    "BranchJump",
    "ClearanceLost",
    "LoopSchedule",
    "continue_chains",
    "continue_loop",
    "verify_monodromy_numeric",
]
