from .engine import (
    Chain,
    chains_to_csv,
    GibbsBlock,
    McmcConfig,
    ProbModel,
    leapfrog,
    sample_gibbs_hybrid,
    sample_hmc,
    sample_rwmh,
)
from .diagnostics import diagnostics
from .transforms import Affine, Exp, Identity, Interval, Transform, VectorTransform

__all__ = [
    "Affine",
    "Chain",
    "chains_to_csv",
    "Exp",
    "GibbsBlock",
    "Identity",
    "Interval",
    "McmcConfig",
    "ProbModel",
    "Transform",
    "VectorTransform",
    "diagnostics",
    "leapfrog",
    "sample_gibbs_hybrid",
    "sample_hmc",
    "sample_rwmh",
]
