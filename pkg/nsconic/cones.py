"""Cones and their logarithmically homogeneous self-concordant barriers.

Supported: the nonnegative orthant, the exponential cone
    cl{x : x1 >= x2 exp(x3 / x2), x2 > 0},
the 3-D power cone
    {x : x1^a x2^(1-a) >= |x3|, x1, x2 >= 0},
and Cartesian products of these. Product vectors are block concatenations in
declaration order. Dual-side quantities go through the primal barrier at the
shadow point: F*'(s) = -x_tilde with F'(x_tilde) = -s, F*''(s) = F''(x_tilde)^{-1}.
"""

from __future__ import annotations

import functools
import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as sla

from .errors import DimensionMismatch, NoConvergence, NotInterior, NotInteriorDual
from .linalg import norm_dual

logger = logging.getLogger(__name__)

NEWTON_TOL = 1e-11
NEWTON_MAX_STEPS = 200
MAX_BACKTRACKS = 60
BACKTRACK_FACTOR = 0.5


@dataclass(frozen=True)
class BarrierEval:
    value: float
    gradient: np.ndarray
    hessian: np.ndarray
    nu: float


@dataclass(frozen=True)
class ShadowPair:
    x_tilde: np.ndarray
    s_tilde: np.ndarray
    mu: float
    mu_tilde: float


class Cone(ABC):
    """A proper cone together with its barrier."""

    kind: str = ""

    @property
    @abstractmethod
    def dim(self) -> int: ...

    @property
    @abstractmethod
    def nu(self) -> float: ...

    @abstractmethod
    def evaluate(self, x: np.ndarray) -> Tuple[float, np.ndarray, np.ndarray]:
        """(F, F', F'') at an interior x; no membership check."""

    @abstractmethod
    def margin(self, x: np.ndarray) -> float: ...

    @abstractmethod
    def dual_margin(self, s: np.ndarray) -> float: ...

    def shadow(self, s: np.ndarray, hint: Optional[np.ndarray] = None) -> np.ndarray:
        return _newton_shadow(self, s, hint)

    def seed(self) -> np.ndarray:
        """Interior starting point for the central-point Newton solve."""
        return np.ones(self.dim)

    def blocks(self) -> Iterator[Tuple[slice, "Cone"]]:
        yield slice(0, self.dim), self


@dataclass(frozen=True)
class NonnegOrthant(Cone):
    size: int
    kind = "nonneg"

    def __post_init__(self) -> None:
        if int(self.size) < 1:
            raise ValueError("orthant dimension must be at least 1")

    @property
    def dim(self) -> int:
        return int(self.size)

    @property
    def nu(self) -> float:
        return float(self.size)

    def evaluate(self, x):
        inv = 1.0 / x
        return float(-np.sum(np.log(x))), -inv, np.diag(inv * inv)

    def margin(self, x) -> float:
        return float(np.min(x))

    def dual_margin(self, s) -> float:
        return float(np.min(s))

    def shadow(self, s, hint=None):
        return 1.0 / s


@dataclass(frozen=True)
class ExponentialCone(Cone):
    kind = "exp"

    @property
    def dim(self) -> int:
        return 3

    @property
    def nu(self) -> float:
        return 3.0

    def seed(self) -> np.ndarray:
        return np.array([1.0, 1.0, -1.0])

    def evaluate(self, x):
        x1, x2, x3 = x
        r = math.log(x1 / x2)
        psi = x2 * r - x3
        dpsi = np.array([x2 / x1, r - 1.0, -1.0])
        d2psi = np.array([
            [-x2 / (x1 * x1), 1.0 / x1, 0.0],
            [1.0 / x1, -1.0 / x2, 0.0],
            [0.0, 0.0, 0.0],
        ])
        value = -math.log(psi) - math.log(x1) - math.log(x2)
        grad = -dpsi / psi - np.array([1.0 / x1, 1.0 / x2, 0.0])
        hess = np.outer(dpsi, dpsi) / (psi * psi) - d2psi / psi + np.diag([1.0 / (x1 * x1), 1.0 / (x2 * x2), 0.0])
        return value, grad, 0.5 * (hess + hess.T)

    def margin(self, x) -> float:
        x1, x2, x3 = (float(v) for v in x)
        if x1 <= 0.0 or x2 <= 0.0:
            return min(x1, x2)
        return min(x1, x2, x2 * math.log(x1 / x2) - x3)

    def dual_margin(self, s) -> float:
        s1, s2, s3 = (float(v) for v in s)
        if s3 > 0.0:
            return -s3
        if s3 == 0.0:
            # closure piece {s1 >= 0, s2 >= 0, s3 = 0} is boundary
            return min(s1, s2, 0.0)
        if s1 <= 0.0:
            return s1
        return min(s1, -s3, s2 - s3 + s3 * math.log(-s3 / s1))


@dataclass(frozen=True)
class PowerCone(Cone):
    alpha: float
    kind = "pow"

    def __post_init__(self) -> None:
        if not (0.0 < float(self.alpha) < 1.0):
            raise ValueError(f"power cone exponent must lie in (0, 1), got {self.alpha}")

    @property
    def dim(self) -> int:
        return 3

    @property
    def nu(self) -> float:
        return 3.0

    def seed(self) -> np.ndarray:
        return np.array([1.0, 1.0, 0.0])

    def evaluate(self, x):
        a = float(self.alpha)
        x1, x2, x3 = x
        p = x1 ** (2.0 * a) * x2 ** (2.0 - 2.0 * a)
        psi = p - x3 * x3
        dpsi = np.array([2.0 * a * p / x1, (2.0 - 2.0 * a) * p / x2, -2.0 * x3])
        d2psi = np.array([
            [2.0 * a * (2.0 * a - 1.0) * p / (x1 * x1), 2.0 * a * (2.0 - 2.0 * a) * p / (x1 * x2), 0.0],
            [2.0 * a * (2.0 - 2.0 * a) * p / (x1 * x2), (2.0 - 2.0 * a) * (1.0 - 2.0 * a) * p / (x2 * x2), 0.0],
            [0.0, 0.0, -2.0],
        ])
        value = -math.log(psi) - (1.0 - a) * math.log(x1) - a * math.log(x2)
        grad = -dpsi / psi - np.array([(1.0 - a) / x1, a / x2, 0.0])
        hess = np.outer(dpsi, dpsi) / (psi * psi) - d2psi / psi + np.diag([(1.0 - a) / (x1 * x1), a / (x2 * x2), 0.0])
        return value, grad, 0.5 * (hess + hess.T)

    def margin(self, x) -> float:
        a = float(self.alpha)
        x1, x2, x3 = (float(v) for v in x)
        if x1 <= 0.0 or x2 <= 0.0:
            return min(x1, x2)
        return min(x1, x2, x1 ** (2.0 * a) * x2 ** (2.0 - 2.0 * a) - x3 * x3)

    def dual_margin(self, s) -> float:
        a = float(self.alpha)
        s1, s2, s3 = (float(v) for v in s)
        if s1 <= 0.0 or s2 <= 0.0:
            return min(s1, s2)
        return min(s1, s2, (s1 / a) ** (2.0 * a) * (s2 / (1.0 - a)) ** (2.0 - 2.0 * a) - s3 * s3)


@dataclass(frozen=True)
class ProductCone(Cone):
    parts: Tuple[Cone, ...]
    kind = "product"

    def __post_init__(self) -> None:
        if not self.parts:
            raise ValueError("product cone needs at least one part")
        object.__setattr__(self, "parts", tuple(self.parts))

    @property
    def dim(self) -> int:
        return sum(p.dim for p in self.parts)

    @property
    def nu(self) -> float:
        return float(sum(p.nu for p in self.parts))

    def blocks(self):
        start = 0
        for part in self.parts:
            for sl, leaf in part.blocks():
                yield slice(start + sl.start, start + sl.stop), leaf
            start += part.dim

    def evaluate(self, x):
        value = 0.0
        grads: List[np.ndarray] = []
        hessians: List[np.ndarray] = []
        for sl, leaf in self.blocks():
            f, g, h = leaf.evaluate(x[sl])
            value += f
            grads.append(g)
            hessians.append(h)
        return value, np.concatenate(grads), sla.block_diag(*hessians)

    def margin(self, x) -> float:
        return min(leaf.margin(x[sl]) for sl, leaf in self.blocks())

    def dual_margin(self, s) -> float:
        return min(leaf.dual_margin(s[sl]) for sl, leaf in self.blocks())

    def shadow(self, s, hint=None):
        out = np.empty(self.dim)
        for sl, leaf in self.blocks():
            out[sl] = leaf.shadow(s[sl], None if hint is None else hint[sl])
        return out

    def seed(self) -> np.ndarray:
        return np.concatenate([leaf.seed() for _, leaf in self.blocks()])


def product(parts: Sequence[Cone]) -> Cone:
    parts = tuple(parts)
    return parts[0] if len(parts) == 1 else ProductCone(parts)


def _vector(cone: Cone, v) -> np.ndarray:
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.shape[0] != cone.dim:
        raise DimensionMismatch(f"vector has length {v.shape[0]}, cone dimension is {cone.dim}")
    return v


def membership_margin(cone: Cone, x) -> float:
    x = _vector(cone, x)
    if not np.all(np.isfinite(x)):
        return -math.inf
    return cone.margin(x)


def dual_membership_margin(cone: Cone, s) -> float:
    s = _vector(cone, s)
    if not np.all(np.isfinite(s)):
        return -math.inf
    return cone.dual_margin(s)


def barrier_eval(cone: Cone, x) -> BarrierEval:
    x = _vector(cone, x)
    margin = membership_margin(cone, x)
    if not margin > 0.0:
        raise NotInterior(f"point is not interior (margin {margin:.3e})")
    value, grad, hess = cone.evaluate(x)
    return BarrierEval(value=value, gradient=grad, hessian=hess, nu=cone.nu)


def _newton_shadow(cone: Cone, s: np.ndarray, hint: Optional[np.ndarray]) -> np.ndarray:
    # minimizes F(x) + <s, x>; the minimizer solves F'(x) = -s
    x = None
    if hint is not None and cone.margin(hint) > 0.0:
        x = np.array(hint, dtype=float)
    if x is None:
        x = initial_point(cone)
    polished = False
    for _ in range(NEWTON_MAX_STEPS):
        _, grad, hess = cone.evaluate(x)
        g = grad + s
        dx = -np.linalg.solve(hess, g)
        decrement = math.sqrt(max(float(-g @ dx), 0.0))
        if decrement <= NEWTON_TOL:
            if polished or decrement == 0.0:
                return x
            polished = True
        step = 1.0 if decrement < 0.25 else 1.0 / (1.0 + decrement)
        for _ in range(MAX_BACKTRACKS):
            trial = x + step * dx
            if cone.margin(trial) > 0.0:
                break
            step *= BACKTRACK_FACTOR
        else:
            raise NoConvergence("shadow Newton step could not stay interior")
        x = trial
    raise NoConvergence(f"shadow Newton did not converge in {NEWTON_MAX_STEPS} steps")


def conjugate_shadow(cone: Cone, s, hint=None) -> np.ndarray:
    """x_tilde = -F*'(s), the point with F'(x_tilde) = -s."""
    s = _vector(cone, s)
    margin = dual_membership_margin(cone, s)
    if not margin > 0.0:
        raise NotInteriorDual(f"dual point is not interior (margin {margin:.3e})")
    if hint is not None:
        hint = _vector(cone, hint)
    return cone.shadow(s, hint)


def shadow_residual(cone: Cone, x_tilde, s) -> float:
    """||F'(x_tilde) + s||* at x_tilde."""
    be = barrier_eval(cone, x_tilde)
    return norm_dual(be.gradient + np.asarray(s, dtype=float), be.hessian)


def shadow_pair(cone: Cone, x, s, hint=None) -> ShadowPair:
    x = _vector(cone, x)
    s = _vector(cone, s)
    x_tilde = conjugate_shadow(cone, s, hint)
    s_tilde = -barrier_eval(cone, x).gradient
    nu = cone.nu
    return ShadowPair(
        x_tilde=x_tilde,
        s_tilde=s_tilde,
        mu=float(x @ s) / nu,
        mu_tilde=float(x_tilde @ s_tilde) / nu,
    )


@functools.lru_cache(maxsize=None)
def _central_point(cone: Cone) -> Tuple[float, ...]:
    if isinstance(cone, NonnegOrthant):
        return tuple([1.0] * cone.dim)
    if isinstance(cone, ProductCone):
        return tuple(v for _, leaf in cone.blocks() for v in _central_point(leaf))
    # Newton on g(x) = x + F'(x), i.e. minimizing F(x) + |x|^2 / 2
    x = cone.seed()
    for _ in range(NEWTON_MAX_STEPS):
        value, grad, hess = cone.evaluate(x)
        g = x + grad
        if float(np.linalg.norm(g)) <= 1e-14:
            break
        dx = -np.linalg.solve(np.eye(cone.dim) + hess, g)
        phi = value + 0.5 * float(x @ x)
        step = 1.0
        for _ in range(MAX_BACKTRACKS):
            trial = x + step * dx
            if cone.margin(trial) > 0.0:
                f_trial, _, _ = cone.evaluate(trial)
                if f_trial + 0.5 * float(trial @ trial) <= phi + 1e-12 * max(1.0, abs(phi)):
                    break
            step *= BACKTRACK_FACTOR
        else:
            break
        x = trial
    _, grad, _ = cone.evaluate(x)
    residual = float(np.linalg.norm(x + grad))
    if residual > NEWTON_TOL:
        raise NoConvergence(f"central point residual {residual:.3e} for {cone!r}")
    logger.debug("central point for %r: %s", cone, x)
    return tuple(float(v) for v in x)


def initial_point(cone: Cone) -> np.ndarray:
    """x0 with x0 = -F'(x0)."""
    return np.array(_central_point(cone))
