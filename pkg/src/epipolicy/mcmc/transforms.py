"""Scalar bijections between unconstrained and constrained parameter space.

Each transform maps an unconstrained coordinate z to a constrained value x
and reports the log absolute Jacobian ln|dx/dz| plus the derivatives needed
to chain-rule gradients through the mapping.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class Transform:
    def forward(self, z: float) -> float:
        raise NotImplementedError

    def inverse(self, x: float) -> float:
        raise NotImplementedError

    def log_jac(self, z: float) -> float:
        raise NotImplementedError

    def d_forward(self, z: float) -> float:
        """dx/dz (signed)."""
        raise NotImplementedError

    def d_log_jac(self, z: float) -> float:
        """d/dz of log_jac."""
        raise NotImplementedError


@dataclass(frozen=True)
class Identity(Transform):
    def forward(self, z):
        return z

    def inverse(self, x):
        return x

    def log_jac(self, z):
        return 0.0

    def d_forward(self, z):
        return 1.0

    def d_log_jac(self, z):
        return 0.0


@dataclass(frozen=True)
class Affine(Transform):
    """x = loc + scale * z; useful for prior-whitened sampling coordinates."""

    loc: float
    scale: float

    def forward(self, z):
        return self.loc + self.scale * z

    def inverse(self, x):
        return (x - self.loc) / self.scale

    def log_jac(self, z):
        return math.log(abs(self.scale))

    def d_forward(self, z):
        return self.scale

    def d_log_jac(self, z):
        return 0.0


def _exp_capped(z: float) -> float:
    # math.exp raises OverflowError past ~709; cap so that warmup
    # excursions produce a huge-but-finite value the target can reject
    return math.exp(min(z, 700.0))


@dataclass(frozen=True)
class Exp(Transform):
    """x = scale * exp(z) + lo, mapping onto (lo, inf)."""

    lo: float = 0.0
    scale: float = 1.0

    def forward(self, z):
        return self.lo + self.scale * _exp_capped(z)

    def inverse(self, x):
        return math.log((x - self.lo) / self.scale)

    def log_jac(self, z):
        return z + math.log(self.scale)

    def d_forward(self, z):
        return self.scale * _exp_capped(z)

    def d_log_jac(self, z):
        return 1.0


@dataclass(frozen=True)
class Interval(Transform):
    """x = lo + (hi - lo) * sigmoid(z), mapping onto (lo, hi)."""

    lo: float = 0.0
    hi: float = 1.0

    def _sigmoid(self, z):
        if z >= 0:
            return 1.0 / (1.0 + math.exp(-z))
        ez = math.exp(z)
        return ez / (1.0 + ez)

    @staticmethod
    def _softplus(z):
        if z > 30.0:
            return z
        if z < -30.0:
            return math.exp(z)
        return math.log1p(math.exp(z))

    def forward(self, z):
        return self.lo + (self.hi - self.lo) * self._sigmoid(z)

    def inverse(self, x):
        p = (x - self.lo) / (self.hi - self.lo)
        return math.log(p) - math.log1p(-p)

    def log_jac(self, z):
        # ln(hi-lo) + ln s + ln(1-s), written to survive |z| >> 1
        return (math.log(self.hi - self.lo)
                - self._softplus(z) - self._softplus(-z))

    def d_forward(self, z):
        s = self._sigmoid(z)
        return (self.hi - self.lo) * s * (1.0 - s)

    def d_log_jac(self, z):
        return 1.0 - 2.0 * self._sigmoid(z)


class VectorTransform:
    """Per-coordinate bundle of scalar transforms."""

    def __init__(self, parts):
        self.parts = list(parts)

    def __len__(self):
        return len(self.parts)

    def forward(self, z: np.ndarray) -> np.ndarray:
        return np.array([t.forward(v) for t, v in zip(self.parts, z)])

    def inverse(self, x: np.ndarray) -> np.ndarray:
        return np.array([t.inverse(v) for t, v in zip(self.parts, x)])

    def log_jac(self, z: np.ndarray) -> float:
        return float(sum(t.log_jac(v) for t, v in zip(self.parts, z)))

    def d_forward(self, z: np.ndarray) -> np.ndarray:
        return np.array([t.d_forward(v) for t, v in zip(self.parts, z)])

    def d_log_jac(self, z: np.ndarray) -> np.ndarray:
        return np.array([t.d_log_jac(v) for t, v in zip(self.parts, z)])

    @staticmethod
    def identity(dim: int) -> "VectorTransform":
        return VectorTransform([Identity()] * dim)
