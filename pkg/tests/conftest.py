import itertools
import sys

import numpy as np
import pytest

from trfd.core import FeasibleRegion, OuterFunction, PNorm, Problem
from trfd.oracle import InProcessOracle
from trfd.simplex import LinearProgram


def make_problem(fn, n, m, h, x0, region=None, name="test"):
    return Problem(
        n=n,
        m=m,
        oracle=InProcessOracle(fn, m),
        h=OuterFunction.from_value(h),
        region=region if region is not None else FeasibleRegion.unconstrained(n),
        x0=np.asarray(x0, dtype=float),
        name=name,
    )


def rosenbrock_residuals(x):
    return np.array([10.0 * (x[1] - x[0] ** 2), 1.0 - x[0]])


def random_box_lp(rng, max_total=12):
    """Feasible-by-construction LP: random box, rows satisfied at an
    interior point with positive slack."""
    nv = int(rng.integers(2, 6))
    nr = int(rng.integers(1, max_total - nv + 1))
    lo = rng.uniform(-3.0, 0.0, nv)
    hi = lo + rng.uniform(0.5, 3.0, nv)
    xbar = rng.uniform(lo, hi)
    A = rng.uniform(-2.0, 2.0, (nr, nv))
    rows, senses, rhs = [], [], []
    for i in range(nr):
        margin = rng.uniform(0.05, 2.0)
        if rng.random() < 0.3:
            rows.append(-A[i])
            senses.append(">=")
            rhs.append(float(-A[i] @ xbar - margin))
        else:
            rows.append(A[i])
            senses.append("<=")
            rhs.append(float(A[i] @ xbar + margin))
    c = rng.uniform(-2.0, 2.0, nv)
    return LinearProgram(
        c=c, rows=np.array(rows), sense=tuple(senses), rhs=np.array(rhs), lower=lo, upper=hi
    )


def enumerate_lp_minimum(lp):
    """Exhaustive vertex enumeration over all nv-subsets of active
    constraints; independent of the simplex implementation."""
    nv = lp.n_variables
    G, g = [], []
    for a, s, b in zip(lp.rows, lp.sense, lp.rhs):
        if s in ("<=", "="):
            G.append(a)
            g.append(b)
        if s in (">=", "="):
            G.append(-a)
            g.append(-b)
    for j in range(nv):
        e = np.zeros(nv)
        e[j] = 1.0
        if np.isfinite(lp.upper[j]):
            G.append(e.copy())
            g.append(lp.upper[j])
        if np.isfinite(lp.lower[j]):
            G.append(-e)
            g.append(-lp.lower[j])
    G = np.array(G)
    g = np.array(g)
    best = np.inf
    for idx in itertools.combinations(range(len(g)), nv):
        S = G[list(idx)]
        if abs(np.linalg.det(S)) < 1e-9:
            continue
        v = np.linalg.solve(S, g[list(idx)])
        if np.all(G @ v <= g + 1e-9):
            best = min(best, float(lp.c @ v))
    return best


def random_mixed_lp(rng, max_total=12):
    """Harder generator: free variables capped by explicit rows, mixed
    senses including equalities through an interior point."""
    nv = int(rng.integers(2, 6))
    nr_coupling = int(rng.integers(1, max(2, max_total - nv)))
    lo = np.full(nv, -np.inf)
    hi = np.full(nv, np.inf)
    boxed = rng.random(nv) < 0.6
    lo[boxed] = rng.uniform(-3.0, 0.0, int(boxed.sum()))
    hi[boxed] = lo[boxed] + rng.uniform(0.5, 3.0, int(boxed.sum()))
    xbar = np.where(boxed, np.clip(rng.uniform(-1.0, 1.0, nv), lo, hi), rng.uniform(-1.0, 1.0, nv))

    rows, senses, rhs = [], [], []
    # cap every free variable with two explicit rows so the feasible set
    # is bounded and vertex enumeration is exact
    for j in np.flatnonzero(~boxed):
        e = np.zeros(nv)
        e[j] = 1.0
        cap = abs(xbar[j]) + float(rng.uniform(0.5, 2.0))
        rows.append(e.copy())
        senses.append("<=")
        rhs.append(cap)
        rows.append(-e)
        senses.append("<=")
        rhs.append(cap)
    A = rng.uniform(-2.0, 2.0, (nr_coupling, nv))
    for i in range(nr_coupling):
        roll = rng.random()
        if roll < 0.2:
            rows.append(A[i])
            senses.append("=")
            rhs.append(float(A[i] @ xbar))
        elif roll < 0.5:
            rows.append(-A[i])
            senses.append(">=")
            rhs.append(float(-A[i] @ xbar - rng.uniform(0.05, 2.0)))
        else:
            rows.append(A[i])
            senses.append("<=")
            rhs.append(float(A[i] @ xbar + rng.uniform(0.05, 2.0)))
    c = rng.uniform(-2.0, 2.0, nv)
    return LinearProgram(
        c=c, rows=np.array(rows), sense=tuple(senses), rhs=np.array(rhs), lower=lo, upper=hi
    )


def random_tr_instance(rng, h, p, n=2, m=2):
    A = rng.uniform(-2.0, 2.0, (m, n))
    F_x = rng.uniform(-2.0, 2.0, m)
    r = float(rng.uniform(0.3, 0.8))
    return OuterFunction.from_value(h), F_x, A, FeasibleRegion.unconstrained(n), np.zeros(n), PNorm.from_value(p), r


@pytest.fixture(scope="session")
def demo_oracle_cmd():
    return f"{sys.executable} -m trfd.demo_oracle"
