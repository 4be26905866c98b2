"""Minimization over the Stiefel manifold through re-centered Cayley coordinates."""

from .cayley import (
    EmptyBlock,
    EvalCounter,
    ParametrizedObjective,
    SingularPoint,
    forward,
    inverse,
    mobility,
    parametrize,
    pullback_gradient,
)
from .center import choose_center, verify_center
from .driver import AlarmMode, AlcpConfig, alarming, run, run_naive_cp
from .manifold import (
    CenterPoint,
    NotOnManifold,
    SkewParam,
    StiefelPoint,
    TangentVector,
    frobenius_inner,
    new_stiefel,
    random_stiefel,
)
from .optimizers import Kind, LineSearchConfig, LineSearchStalled, StrategicInfo
from .problems import Objective, ProblemInstance, eigenbasis, generate, nearest_point, procrustes, toy_target
from .records import RunRecord, RunResult, Termination
from .retraction import qr_retraction, riemannian_grad, run_rgd

__all__ = [
    "AlarmMode",
    "AlcpConfig",
    "CenterPoint",
    "EmptyBlock",
    "EvalCounter",
    "Kind",
    "LineSearchConfig",
    "LineSearchStalled",
    "NotOnManifold",
    "Objective",
    "ParametrizedObjective",
    "ProblemInstance",
    "RunRecord",
    "RunResult",
    "SingularPoint",
    "SkewParam",
    "StiefelPoint",
    "StrategicInfo",
    "TangentVector",
    "Termination",
    "alarming",
    "choose_center",
    "eigenbasis",
    "forward",
    "frobenius_inner",
    "generate",
    "inverse",
    "mobility",
    "nearest_point",
    "new_stiefel",
    "parametrize",
    "procrustes",
    "pullback_gradient",
    "qr_retraction",
    "random_stiefel",
    "riemannian_grad",
    "run",
    "run_naive_cp",
    "run_rgd",
    "toy_target",
    "verify_center",
]
