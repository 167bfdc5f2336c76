"""The trust-region solve loop with coupled stepsize/radius updates.

One iteration classifies as one of four kinds:

  * U1:      the criticality measure eta at the reference radius fell
             below epsilon/2; halve tau, rebuild the model.
  * success: the trial step achieved ratio rho >= alpha; accept it and
             double the radius (capped at the reference radius).
  * U2:      rho < alpha but tau * sqrt(n) still fits under the halved
             radius; halve the radius and retry the step with the same
             model, costing a single evaluation.
  * U3:      rho < alpha and the halved radius would violate the
             tau * sqrt(n) <= radius coupling; halve both and rebuild.

The coupling invariant tau_k * sqrt(n) <= Delta_k holds at every
iteration boundary and is asserted as such.  Evaluation accounting is
strict: a model rebuild costs exactly n evaluations, a trial point one,
and the budget is checked before each oracle call group so that no
partial Jacobian is ever bought.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import jsontext
from .core import NormConstants, OuterFunction, PNorm, Problem, eval_h, norm_constants, MACHINE_EPS
from .jacobian import DegenerateStep, build_jacobian
from .oracle import EvalBudget, OracleFailure
from .simplex import NumericalTrouble
from .subproblem import solve_tr_subproblem

TRACE_SCHEMA = "trfd-trace-v1"

# model decrease below 1e-15 * (1 + |f|) is treated as no decrease
RHO_DEGENERATE_REL = 1e-15


class IterationClass(enum.Enum):
    SUCCESS = "success"
    U1 = "u1"
    U2 = "u2"
    U3 = "u3"


class Termination(enum.Enum):
    BUDGET_EXHAUSTED = "budget_exhausted"
    DELTA_FLOOR = "delta_floor"
    ETA_FLOOR = "eta_floor"
    ORACLE_ERROR = "oracle_error"
    NUMERICAL_TROUBLE = "numerical_trouble"


@dataclass
class TrfdParams:
    """Algorithm parameters; ``defaults`` reproduces the standard tuning.

    The standard tuning sets sigma so that the initial finite-difference
    stepsize tau0 = epsilon / (L_h * sigma * c_p2 * c_2p * sqrt(n))
    equals sqrt(machine eps), takes Delta0 = max(1, tau0 * sqrt(n)),
    Delta* = 1000, alpha = 0.15, theta = 1, and stops when the radius or
    the criticality measure falls to 1e-13.
    """

    epsilon: float
    alpha: float
    theta: float
    sigma: float
    lipschitz_h: float
    consts: NormConstants
    p: PNorm
    budget: EvalBudget
    delta0: float
    delta_star: float
    stop_delta: float
    stop_eta: float

    def __post_init__(self):
        if not (0 < self.alpha < 1):
            raise ValueError("alpha must lie in (0, 1)")
        if not (0 < self.theta <= 1):
            raise ValueError("theta must lie in (0, 1]")
        if self.epsilon <= 0 or self.sigma <= 0:
            raise ValueError("epsilon and sigma must be positive")
        n = self.budget.n
        if self.tau0 * math.sqrt(n) > self.delta0:
            raise ValueError("delta0 must be at least tau0 * sqrt(n)")
        if self.delta0 > self.delta_star:
            raise ValueError("delta0 must not exceed delta_star")

    @property
    def tau0(self) -> float:
        n = self.budget.n
        return self.epsilon / (
            self.lipschitz_h * self.sigma * self.consts.cp2_m * self.consts.c2p_n * math.sqrt(n)
        )

    @classmethod
    def defaults(
        cls,
        problem: Problem,
        p: PNorm,
        simplex_gradients: int = 100,
        *,
        epsilon: float = 1e-15,
        alpha: float = 0.15,
        theta: float = 1.0,
        delta_star: float = 1000.0,
        stop_delta: float = 1e-13,
        stop_eta: float = 1e-13,
    ) -> "TrfdParams":
        p = PNorm.from_value(p)
        n, m = problem.n, problem.m
        consts = norm_constants(p, n, m)
        lip = problem.h.lipschitz(p, m)
        sqrt_n = math.sqrt(n)
        sigma = epsilon / (lip * consts.cp2_m * consts.c2p_n * sqrt_n * math.sqrt(MACHINE_EPS))
        tau0 = epsilon / (lip * sigma * consts.cp2_m * consts.c2p_n * sqrt_n)
        return cls(
            epsilon=epsilon,
            alpha=alpha,
            theta=theta,
            sigma=sigma,
            lipschitz_h=lip,
            consts=consts,
            p=p,
            budget=EvalBudget(simplex_gradients=simplex_gradients, n=n),
            delta0=max(1.0, tau0 * sqrt_n),
            delta_star=delta_star,
            stop_delta=stop_delta,
            stop_eta=stop_eta,
        )


@dataclass
class IterationSnapshot:
    k: int
    cls: IterationClass
    entered_at: str  # "step1" | "step3"
    tau: float
    delta: float
    eta: float
    rho: float | None
    rho_degenerate: bool
    f: float
    x: np.ndarray
    evals_iter: int
    evals_total: int


@dataclass
class RunRecord:
    problem_name: str
    n: int
    m: int
    h: OuterFunction
    params: TrfdParams
    iterations: list
    best_f: list
    termination: Termination
    termination_evals: int
    final_x: np.ndarray
    final_f: float

    @property
    def total_evals(self) -> int:
        return len(self.best_f)


def compute_rho(f_x: float, f_trial: float, model_at_d: float) -> float | None:
    """Decrease ratio; None signals a degenerate (non-positive) denominator."""
    denom = f_x - model_at_d
    if denom <= RHO_DEGENERATE_REL * (1.0 + abs(f_x)):
        return None
    return (f_x - f_trial) / denom


class _TrackingOracle:
    """Delegating wrapper that routes every evaluation through the
    driver's best-f bookkeeping without double-counting."""

    def __init__(self, oracle, tracked_eval):
        self._oracle = oracle
        self._tracked_eval = tracked_eval
        self.m = oracle.m

    @property
    def eval_count(self) -> int:
        return self._oracle.eval_count

    def eval_F(self, x):
        return self._tracked_eval(x)


def solve(problem: Problem, params: TrfdParams) -> RunRecord:
    if params.budget.n != problem.n:
        raise ValueError("budget dimension does not match the problem")
    oracle = problem.oracle
    h = problem.h
    region = problem.region
    n = problem.n
    sqrt_n = math.sqrt(n)
    max_evals = params.budget.max_evals
    eps_half = params.epsilon / 2.0

    best_f: list = []
    snapshots: list = []
    count_at_entry = oracle.eval_count

    def used() -> int:
        return oracle.eval_count - count_at_entry

    def tracked_eval(point):
        fvec = oracle.eval_F(point)
        fv = eval_h(h, fvec)
        best_f.append(fv if not best_f else min(best_f[-1], fv))
        return fvec

    # the data-profile convention scores every evaluation, probe points
    # included, so the Jacobian builder goes through the same tracking
    tracking = _TrackingOracle(oracle, tracked_eval)

    def finish(term: Termination, last_classified_evals: int) -> RunRecord:
        return RunRecord(
            problem_name=problem.name,
            n=n,
            m=problem.m,
            h=h,
            params=params,
            iterations=snapshots,
            best_f=best_f,
            termination=term,
            termination_evals=used() - last_classified_evals,
            final_x=x.copy(),
            final_f=f_x,
        )

    x = problem.x0.copy()
    f_x = math.inf
    tau = params.tau0
    delta = params.delta0
    evals_done = 0  # evaluations covered by classified iterations
    assert tau * sqrt_n <= delta

    try:
        if used() + 1 > max_evals:
            return finish(Termination.BUDGET_EXHAUSTED, used())
        F_x = tracked_eval(x)
        f_x = eval_h(h, F_x)

        k = 0
        evals_done = used()
        entry = "step1"
        A_model = None
        eta = None
        eta_sol = None

        while True:
            if entry == "step1":
                if used() + n > max_evals:
                    return finish(Termination.BUDGET_EXHAUSTED, evals_done)
                A_model = build_jacobian(tracking, x, F_x, tau)
                eta_sol = solve_tr_subproblem(h, F_x, A_model.A, region, x, params.p, params.delta_star)
                eta = eta_sol.eta
                if eta <= params.stop_eta:
                    return finish(Termination.ETA_FLOOR, evals_done)
                if eta < eps_half:
                    snapshots.append(IterationSnapshot(
                        k=k, cls=IterationClass.U1, entered_at=entry,
                        tau=tau, delta=delta, eta=eta, rho=None, rho_degenerate=False,
                        f=f_x, x=x.copy(), evals_iter=n, evals_total=used(),
                    ))
                    evals_done = used()
                    tau = tau / 2.0
                    k += 1
                    assert tau * sqrt_n <= delta
                    continue

            if delta == params.delta_star:
                sol = eta_sol
            else:
                sol = solve_tr_subproblem(h, F_x, A_model.A, region, x, params.p, delta)

            if used() + 1 > max_evals:
                return finish(Termination.BUDGET_EXHAUSTED, evals_done)
            trial_x = x + sol.d_star
            F_trial = tracked_eval(trial_x)
            f_trial = eval_h(h, F_trial)
            rho = compute_rho(f_x, f_trial, sol.model_value)
            evals_iter = (n + 1) if entry == "step1" else 1

            if rho is not None and rho >= params.alpha:
                snapshots.append(IterationSnapshot(
                    k=k, cls=IterationClass.SUCCESS, entered_at=entry,
                    tau=tau, delta=delta, eta=eta, rho=rho, rho_degenerate=False,
                    f=f_x, x=x.copy(), evals_iter=evals_iter, evals_total=used(),
                ))
                evals_done = used()
                x = trial_x
                F_x = F_trial
                f_x = f_trial
                delta = min(2.0 * delta, params.delta_star)
                k += 1
                assert tau * sqrt_n <= delta
                if delta <= params.stop_delta:
                    return finish(Termination.DELTA_FLOOR, evals_done)
                entry = "step1"
                continue

            delta_next = delta / 2.0
            if tau * sqrt_n <= delta_next:
                snapshots.append(IterationSnapshot(
                    k=k, cls=IterationClass.U2, entered_at=entry,
                    tau=tau, delta=delta, eta=eta, rho=rho, rho_degenerate=rho is None,
                    f=f_x, x=x.copy(), evals_iter=evals_iter, evals_total=used(),
                ))
                evals_done = used()
                delta = delta_next
                k += 1
                assert tau * sqrt_n <= delta
                if delta <= params.stop_delta:
                    return finish(Termination.DELTA_FLOOR, evals_done)
                entry = "step3"
            else:
                snapshots.append(IterationSnapshot(
                    k=k, cls=IterationClass.U3, entered_at=entry,
                    tau=tau, delta=delta, eta=eta, rho=rho, rho_degenerate=rho is None,
                    f=f_x, x=x.copy(), evals_iter=evals_iter, evals_total=used(),
                ))
                evals_done = used()
                delta = delta_next
                tau = tau / 2.0
                k += 1
                assert tau * sqrt_n <= delta
                if delta <= params.stop_delta:
                    return finish(Termination.DELTA_FLOOR, evals_done)
                entry = "step1"

    except OracleFailure:
        return finish(Termination.ORACLE_ERROR, evals_done)
    except (NumericalTrouble, DegenerateStep):
        return finish(Termination.NUMERICAL_TROUBLE, evals_done)


def record_to_doc(record: RunRecord) -> dict:
    p = record.params
    return {
        "schema": TRACE_SCHEMA,
        "problem": {
            "name": record.problem_name,
            "n": record.n,
            "m": record.m,
            "h": record.h.value,
        },
        "params": {
            "epsilon": p.epsilon,
            "alpha": p.alpha,
            "theta": p.theta,
            "sigma": p.sigma,
            "lipschitz_h": p.lipschitz_h,
            "c2p_n": p.consts.c2p_n,
            "cp2_m": p.consts.cp2_m,
            "p": p.p.value,
            "simplex_gradients": p.budget.simplex_gradients,
            "max_evals": p.budget.max_evals,
            "tau0": p.tau0,
            "delta0": p.delta0,
            "delta_star": p.delta_star,
            "stop_delta": p.stop_delta,
            "stop_eta": p.stop_eta,
        },
        "iterations": [
            {
                "k": s.k,
                "class": s.cls.value,
                "entered_at": s.entered_at,
                "tau": s.tau,
                "delta": s.delta,
                "eta": s.eta,
                "rho": s.rho,
                "rho_degenerate": s.rho_degenerate,
                "f": s.f,
                "x": list(map(float, s.x)),
                "evals_iter": s.evals_iter,
                "evals_total": s.evals_total,
            }
            for s in record.iterations
        ],
        "best_f": list(map(float, record.best_f)),
        "termination": record.termination.value,
        "termination_evals": record.termination_evals,
        "final_x": list(map(float, record.final_x)),
        "final_f": record.final_f,
        "total_evals": record.total_evals,
    }


def record_from_doc(doc: dict) -> RunRecord:
    if doc.get("schema") != TRACE_SCHEMA:
        raise ValueError(f"unknown trace schema: {doc.get('schema')!r}")
    pd = doc["params"]
    n = doc["problem"]["n"]
    params = TrfdParams(
        epsilon=pd["epsilon"],
        alpha=pd["alpha"],
        theta=pd["theta"],
        sigma=pd["sigma"],
        lipschitz_h=pd["lipschitz_h"],
        consts=NormConstants(c2p_n=pd["c2p_n"], cp2_m=pd["cp2_m"]),
        p=PNorm.from_value(pd["p"]),
        budget=EvalBudget(simplex_gradients=pd["simplex_gradients"], n=n),
        delta0=pd["delta0"],
        delta_star=pd["delta_star"],
        stop_delta=pd["stop_delta"],
        stop_eta=pd["stop_eta"],
    )
    snapshots = [
        IterationSnapshot(
            k=it["k"],
            cls=IterationClass(it["class"]),
            entered_at=it["entered_at"],
            tau=it["tau"],
            delta=it["delta"],
            eta=it["eta"],
            rho=it["rho"],
            rho_degenerate=it["rho_degenerate"],
            f=it["f"],
            x=np.asarray(it["x"], dtype=float),
            evals_iter=it["evals_iter"],
            evals_total=it["evals_total"],
        )
        for it in doc["iterations"]
    ]
    return RunRecord(
        problem_name=doc["problem"]["name"],
        n=n,
        m=doc["problem"]["m"],
        h=OuterFunction.from_value(doc["problem"]["h"]),
        params=params,
        iterations=snapshots,
        best_f=list(doc["best_f"]),
        termination=Termination(doc["termination"]),
        termination_evals=doc["termination_evals"],
        final_x=np.asarray(doc["final_x"], dtype=float),
        final_f=math.inf if doc["final_f"] is None else doc["final_f"],
    )


def save_trace(record: RunRecord, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(jsontext.dumps(record_to_doc(record), indent=1))


def load_trace(path) -> RunRecord:
    with open(path, "r", encoding="ascii") as fh:
        return record_from_doc(jsontext.loads(fh.read()))
