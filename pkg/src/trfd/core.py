"""Problem model for composite nonsmooth minimization.

The solver minimizes f(x) = h(F(x)) over a polyhedral feasible region,
where F: R^n -> R^m is a black-box residual map and h is one of two
piecewise-linear convex outer functions: the sum of absolute values
(least-absolute-deviation fitting) or the maximum of components
(minimax).  Restricting h to these two shapes is what lets every
trust-region subproblem be rewritten as a linear program.

This module also provides the p-norm utilities and the tight
norm-equivalence constants c_{2,p}(n) and c_{p,2}(m) that the stepsize
and radius rules depend on:

    ||x||_2 <= c_{2,p}(n) ||x||_p   on R^n
    ||z||_p <= c_{p,2}(m) ||z||_2   on R^m
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

# float64 machine precision, 2**-52
MACHINE_EPS = float(np.finfo(np.float64).eps)


class PNorm(enum.Enum):
    """Which p-norm defines the trust region: p in {1, 2, inf}."""

    ONE = "1"
    TWO = "2"
    INF = "inf"

    @classmethod
    def from_value(cls, value) -> "PNorm":
        if isinstance(value, PNorm):
            return value
        key = str(value).strip().lower()
        aliases = {
            "1": cls.ONE,
            "one": cls.ONE,
            "2": cls.TWO,
            "two": cls.TWO,
            "inf": cls.INF,
            "infinity": cls.INF,
        }
        if key not in aliases:
            raise ValueError(f"unknown p-norm: {value!r}")
        return aliases[key]


def norm(v, p: PNorm) -> float:
    """The p-norm of a vector, p in {1, 2, inf}."""
    v = np.asarray(v, dtype=float)
    if p is PNorm.ONE:
        return float(np.sum(np.abs(v)))
    if p is PNorm.TWO:
        return float(np.linalg.norm(v))
    return float(np.max(np.abs(v))) if v.size else 0.0


@dataclass(frozen=True)
class NormConstants:
    """Tight norm-equivalence constants for a given p and dimensions.

    c2p_n:  ||x||_2 <= c2p_n * ||x||_p for x in R^n
    cp2_m:  ||z||_p <= cp2_m * ||z||_2 for z in R^m
    """

    c2p_n: float
    cp2_m: float


def norm_constants(p: PNorm, n: int, m: int) -> NormConstants:
    if n < 1 or m < 1:
        raise ValueError("dimensions must be at least 1")
    if p is PNorm.ONE:
        return NormConstants(c2p_n=1.0, cp2_m=math.sqrt(m))
    if p is PNorm.TWO:
        return NormConstants(c2p_n=1.0, cp2_m=1.0)
    return NormConstants(c2p_n=math.sqrt(n), cp2_m=1.0)


class OuterFunction(enum.Enum):
    """The known convex outer function h applied to the residual vector.

    L1 is the sum of absolute values; MINIMAX is the maximum component.
    Both are positively homogeneous, which the subproblem layer relies
    on, and MINIMAX is additionally monotone.
    """

    L1 = "l1"
    MINIMAX = "minimax"

    def __call__(self, z) -> float:
        return eval_h(self, z)

    def lipschitz(self, p: PNorm, m: int) -> float:
        """Lipschitz constant of h with respect to the p-norm on R^m."""
        if self is OuterFunction.MINIMAX:
            return 1.0
        if p is PNorm.ONE:
            return 1.0
        if p is PNorm.TWO:
            return math.sqrt(m)
        return float(m)

    @property
    def monotone(self) -> bool:
        return self is OuterFunction.MINIMAX

    @classmethod
    def from_value(cls, value) -> "OuterFunction":
        if isinstance(value, OuterFunction):
            return value
        key = str(value).strip().lower()
        aliases = {"l1": cls.L1, "minimax": cls.MINIMAX, "max": cls.MINIMAX}
        if key not in aliases:
            raise ValueError(f"unknown outer function: {value!r}")
        return aliases[key]


def eval_h(h: OuterFunction, z) -> float:
    z = np.asarray(z, dtype=float)
    if h is OuterFunction.L1:
        return float(np.sum(np.abs(z)))
    return float(np.max(z))


@dataclass(frozen=True)
class FeasibleRegion:
    """Polyhedron {x : lower <= x <= upper, a_i . x <= b_i}.

    Bounds may be infinite; an empty constraint list with infinite
    bounds represents the unconstrained region.
    """

    lower: np.ndarray
    upper: np.ndarray
    linear_ineq: tuple = ()

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        if lower.shape != upper.shape or lower.ndim != 1:
            raise ValueError("bounds must be 1-d arrays of equal length")
        if np.any(lower > upper):
            raise ValueError("lower bound exceeds upper bound")
        rows = []
        for a, b in self.linear_ineq:
            a = np.asarray(a, dtype=float)
            if a.shape != lower.shape:
                raise ValueError("inequality row has wrong length")
            rows.append((a, float(b)))
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "linear_ineq", tuple(rows))

    @classmethod
    def unconstrained(cls, n: int) -> "FeasibleRegion":
        return cls(np.full(n, -np.inf), np.full(n, np.inf))

    @classmethod
    def box(cls, lower, upper) -> "FeasibleRegion":
        return cls(np.asarray(lower, dtype=float), np.asarray(upper, dtype=float))

    @property
    def n(self) -> int:
        return self.lower.size

    @property
    def is_unconstrained(self) -> bool:
        return (
            not self.linear_ineq
            and bool(np.all(np.isinf(self.lower)))
            and bool(np.all(np.isinf(self.upper)))
        )

    def contains(self, x, tol: float = 1e-9) -> bool:
        x = np.asarray(x, dtype=float)
        if np.any(x < self.lower - tol) or np.any(x > self.upper + tol):
            return False
        return all(float(a @ x) <= b + tol for a, b in self.linear_ineq)


@dataclass(frozen=True)
class Problem:
    """A composite instance: dimensions, oracle handle, h, region, start."""

    n: int
    m: int
    oracle: object
    h: OuterFunction
    region: FeasibleRegion
    x0: np.ndarray
    name: str = ""

    def __post_init__(self):
        x0 = np.asarray(self.x0, dtype=float)
        if x0.shape != (self.n,):
            raise ValueError("start point has wrong length")
        if self.region.n != self.n:
            raise ValueError("region dimension mismatch")
        if not self.region.contains(x0):
            raise ValueError("start point is infeasible")
        if getattr(self.oracle, "m", self.m) != self.m:
            raise ValueError("oracle output dimension mismatch")
        object.__setattr__(self, "x0", x0)

    def f(self, fvec) -> float:
        return eval_h(self.h, fvec)
