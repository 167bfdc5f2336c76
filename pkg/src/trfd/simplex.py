"""Dense bounded-variable primal simplex.

Solves  min c.x  subject to  rows of the form a.x {<=, >=, =} b  and
box bounds l <= x <= u (either side may be infinite).  Inequalities are
converted to equalities with slack variables; a Phase-I pass with
artificial variables produces an initial feasible basis, after which
Phase II optimizes the true objective.

The subproblems this package generates are small (at most a few hundred
variables) and dense, so the basis is refactorized from scratch at every
pivot via LAPACK solves; there is no factorization update machinery.
Everything is deterministic: Dantzig pricing with first-index
tie-breaking, switching to Bland's rule once the degenerate-pivot count
passes 5 * (rows + columns).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# reduced-cost / feasibility target
OPT_TOL = 1e-9
# a basis-changing pivot with step below this counts as degenerate
DEGEN_TOL = 1e-12
# smallest acceptable pivot element magnitude
PIVOT_TOL = 1e-11


class NumericalTrouble(Exception):
    """The simplex cycled past its safeguard or lost feasibility."""


@dataclass
class LinearProgram:
    """min c.x  s.t.  rows[i].x (sense[i]) rhs[i],  lower <= x <= upper."""

    c: np.ndarray
    rows: np.ndarray
    sense: tuple
    rhs: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        nv = self.c.size
        self.rows = np.asarray(self.rows, dtype=float).reshape(-1, nv)
        self.rhs = np.asarray(self.rhs, dtype=float)
        self.lower = np.asarray(self.lower, dtype=float)
        self.upper = np.asarray(self.upper, dtype=float)
        self.sense = tuple(self.sense)
        if self.rows.shape[0] != self.rhs.size or len(self.sense) != self.rhs.size:
            raise ValueError("row/sense/rhs length mismatch")
        if self.lower.size != nv or self.upper.size != nv:
            raise ValueError("bound length mismatch")
        for s in self.sense:
            if s not in ("<=", ">=", "="):
                raise ValueError(f"bad sense {s!r}")

    @property
    def n_variables(self) -> int:
        return self.c.size

    @property
    def n_rows(self) -> int:
        return self.rhs.size


@dataclass
class SimplexResult:
    x: np.ndarray
    objective: float
    iterations: int
    max_residual: float


def solve_lp(lp: LinearProgram) -> SimplexResult:
    """Solve to proven optimality; raises NumericalTrouble on breakdown."""
    nv = lp.n_variables
    nr = lp.n_rows

    if nr == 0:
        # box-only problem: each coordinate minimizes independently
        x = np.where(lp.c > 0, lp.lower, np.where(lp.c < 0, lp.upper, np.clip(0.0, lp.lower, lp.upper)))
        if not np.all(np.isfinite(x)):
            raise NumericalTrouble("unbounded direction")
        return SimplexResult(x=x, objective=float(lp.c @ x), iterations=0, max_residual=_residual(lp, x))

    # canonical form: A x + s = b with >= rows negated, = rows given a
    # slack fixed at zero
    A = lp.rows.copy()
    b = lp.rhs.astype(float).copy()
    ge = np.array([s == ">=" for s in lp.sense])
    A[ge] *= -1.0
    b[ge] *= -1.0

    slack_lo = np.zeros(nr)
    slack_hi = np.full(nr, np.inf)
    eq = np.array([s == "=" for s in lp.sense])
    slack_hi[eq] = 0.0

    ncol = nv + nr
    full_A = np.hstack([A, np.eye(nr)])
    lo = np.concatenate([lp.lower, slack_lo])
    hi = np.concatenate([lp.upper, slack_hi])

    # nonbasic start values: clamp 0 into the bounds; free variables sit
    # at 0 until they enter the basis
    value = np.clip(0.0, lo, hi)
    value[np.isnan(value)] = 0.0

    # slack basis where the implied slack value is feasible, artificial
    # columns elsewhere
    resid = b - A @ value[:nv]
    basis = np.empty(nr, dtype=int)
    art_cols = []
    for i in range(nr):
        s_val = resid[i]
        if slack_lo[i] - OPT_TOL <= s_val <= slack_hi[i] + OPT_TOL:
            basis[i] = nv + i
        else:
            col = np.zeros(nr)
            col[i] = 1.0 if s_val > 0 else -1.0
            art_cols.append(col)
            basis[i] = ncol + len(art_cols) - 1

    iters = 0
    if art_cols:
        full_A = np.hstack([full_A, np.column_stack(art_cols)])
        lo = np.concatenate([lo, np.zeros(len(art_cols))])
        hi = np.concatenate([hi, np.full(len(art_cols), np.inf)])
        value = np.concatenate([value, np.zeros(len(art_cols))])
        phase1_cost = np.zeros(full_A.shape[1])
        phase1_cost[ncol:] = 1.0
        iters += _optimize(full_A, b, lo, hi, phase1_cost, basis, value)
        infeas = _objective(phase1_cost, full_A, b, basis, value)
        if infeas > 1e-7 * max(1.0, float(np.max(np.abs(b), initial=1.0))):
            raise NumericalTrouble(f"phase I ended infeasible ({infeas:.3e})")
        # artificials are pinned at zero for phase II
        hi[ncol:] = 0.0

    cost = np.zeros(full_A.shape[1])
    cost[:nv] = lp.c
    iters += _optimize(full_A, b, lo, hi, cost, basis, value)

    x_full = _assemble(full_A, b, basis, value)
    x = x_full[:nv]
    max_residual = _residual(lp, x)
    if max_residual > 1e-6:
        raise NumericalTrouble(f"solution residual {max_residual:.3e}")
    return SimplexResult(
        x=x,
        objective=float(lp.c @ x),
        iterations=iters,
        max_residual=max_residual,
    )


def _assemble(A, b, basis, value) -> np.ndarray:
    x = value.copy()
    x[basis] = 0.0
    xb = np.linalg.solve(A[:, basis], b - A @ x)
    x[basis] = xb
    return x


def _objective(cost, A, b, basis, value) -> float:
    return float(cost @ _assemble(A, b, basis, value))


def _residual(lp: LinearProgram, x: np.ndarray) -> float:
    worst = 0.0
    for a, s, rhs in zip(lp.rows, lp.sense, lp.rhs):
        v = float(a @ x)
        if s == "<=":
            worst = max(worst, v - rhs)
        elif s == ">=":
            worst = max(worst, rhs - v)
        else:
            worst = max(worst, abs(v - rhs))
    worst = max(worst, float(np.max(lp.lower - x, initial=0.0)))
    worst = max(worst, float(np.max(x - lp.upper, initial=0.0)))
    return worst


def _optimize(A, b, lo, hi, cost, basis, value) -> int:
    """Run the pivot loop in place; returns the pivot count."""
    nr, ncol = A.shape
    is_basic = np.zeros(ncol, dtype=bool)
    is_basic[basis] = True
    fixed = lo == hi

    bland = False
    degenerate = 0
    bland_after = 5 * (nr + ncol)
    max_iters = 2000 + 200 * (nr + ncol)

    for it in range(max_iters):
        B = A[:, basis]
        v_masked = value.copy()
        v_masked[basis] = 0.0
        try:
            xb = np.linalg.solve(B, b - A @ v_masked)
            y = np.linalg.solve(B.T, cost[basis])
        except np.linalg.LinAlgError as exc:
            raise NumericalTrouble("singular basis") from exc

        z = cost - y @ A
        can_up = ~is_basic & ~fixed & (value < hi)
        can_dn = ~is_basic & ~fixed & (value > lo)
        improving = (can_up & (z < -OPT_TOL)) | (can_dn & (z > OPT_TOL))
        if not improving.any():
            value[basis] = xb
            return it

        if bland:
            e = int(np.flatnonzero(improving)[0])
        else:
            scores = np.where(improving, np.abs(z), -1.0)
            e = int(np.argmax(scores))
        direction = 1.0 if z[e] < 0 else -1.0

        try:
            w = np.linalg.solve(B, A[:, e])
        except np.linalg.LinAlgError as exc:
            raise NumericalTrouble("singular basis") from exc
        dw = direction * w

        # ratio test over the basics, plus the entering variable's own
        # opposite bound
        sigma_own = (hi[e] - value[e]) if direction > 0 else (value[e] - lo[e])
        lo_b = lo[basis]
        hi_b = hi[basis]
        ratios = np.full(nr, np.inf)
        dec = dw > PIVOT_TOL
        ratios[dec] = np.maximum(xb[dec] - lo_b[dec], 0.0) / dw[dec]
        inc = dw < -PIVOT_TOL
        ratios[inc] = np.maximum(hi_b[inc] - xb[inc], 0.0) / (-dw[inc])

        sigma_rows = float(np.min(ratios)) if nr else np.inf
        sigma = min(sigma_own, sigma_rows)
        if not np.isfinite(sigma):
            raise NumericalTrouble("unbounded direction")

        if sigma_own <= sigma_rows:
            # bound flip, no basis change
            value[e] = hi[e] if direction > 0 else lo[e]
            continue

        window = sigma + 1e-12 * max(1.0, sigma)
        candidates = np.flatnonzero(ratios <= window)
        if bland:
            leave = int(candidates[np.argmin(basis[candidates])])
        else:
            leave = int(candidates[np.argmax(np.abs(dw[candidates]))])
        if abs(w[leave]) <= PIVOT_TOL:
            raise NumericalTrouble("pivot element too small")

        leave_col = int(basis[leave])
        value[leave_col] = lo_b[leave] if dw[leave] > 0 else hi_b[leave]
        is_basic[leave_col] = False
        basis[leave] = e
        is_basic[e] = True

        if sigma <= DEGEN_TOL:
            degenerate += 1
            if degenerate > bland_after:
                bland = True

    raise NumericalTrouble("pivot limit exceeded (cycling safeguard)")


def to_mps(lp: LinearProgram, name: str = "TRLP") -> str:
    """Render the instance in fixed-column MPS text for offline inspection."""
    lines = [f"NAME          {name}", "ROWS", " N  COST"]
    tags = {"<=": "L", ">=": "G", "=": "E"}
    for i, s in enumerate(lp.sense):
        lines.append(f" {tags[s]}  R{i}")
    lines.append("COLUMNS")
    for j in range(lp.n_variables):
        entries = [("COST", lp.c[j])] if lp.c[j] != 0.0 else []
        entries += [(f"R{i}", lp.rows[i, j]) for i in range(lp.n_rows) if lp.rows[i, j] != 0.0]
        for k in range(0, len(entries), 2):
            pair = entries[k : k + 2]
            body = "".join(f"  {rname:<10}{val:>15.8g}" for rname, val in pair)
            lines.append(f"    X{j:<9}{body}")
    lines.append("RHS")
    for i in range(lp.n_rows):
        if lp.rhs[i] != 0.0:
            lines.append(f"    RHS       R{i:<9} {lp.rhs[i]:>14.8g}")
    lines.append("BOUNDS")
    for j in range(lp.n_variables):
        l, u = lp.lower[j], lp.upper[j]
        if np.isneginf(l) and np.isposinf(u):
            lines.append(f" FR BND       X{j}")
            continue
        if np.isneginf(l):
            lines.append(f" MI BND       X{j}")
        elif l != 0.0:
            lines.append(f" LO BND       X{j:<9} {l:>14.8g}")
        if np.isposinf(u):
            lines.append(f" PL BND       X{j}")
        else:
            lines.append(f" UP BND       X{j:<9} {u:>14.8g}")
    lines.append("ENDATA")
    return "\n".join(lines) + "\n"
