import numpy as np
import pytest

from trfd.bench import (
    Campaign,
    EmptyGroup,
    SolverConfig,
    TRFD_L1,
    TRFD_M,
    data_profile,
    emit_profile_csv,
    read_profile_csv,
    run_campaign,
)
from trfd.core import OuterFunction, PNorm
from trfd.oracle import EvalBudget
from trfd.solver import RunRecord, Termination, TrfdParams
from trfd.testset import registry_by_name
from trfd.core import NormConstants


def fake_record(name, n, best_f, budget=100):
    params = TrfdParams(
        epsilon=1e-15, alpha=0.15, theta=1.0, sigma=1e9, lipschitz_h=1.0,
        consts=NormConstants(1.0, 1.0), p=PNorm.ONE,
        budget=EvalBudget(simplex_gradients=budget, n=n),
        delta0=1.0, delta_star=1000.0, stop_delta=1e-13, stop_eta=1e-13,
    )
    return RunRecord(
        problem_name=name, n=n, m=n, h=OuterFunction.L1, params=params,
        iterations=[], best_f=list(best_f), termination=Termination.BUDGET_EXHAUSTED,
        termination_evals=0, final_x=np.zeros(n), final_f=best_f[-1],
    )


def test_profile_step_at_solving_evaluation():
    # n = 1: kappa simplex gradients cover 2*kappa evaluations; the
    # solver reaches the target exactly at evaluation 6 = 3 * (n + 1)
    best = [10.0] * 5 + [0.0] + [0.0] * 14
    records = {("p", "S"): fake_record("p", 1, best, budget=10)}
    prof = data_profile(records, 1e-3, budget=10)
    assert prof.curves["S"][0] == 0.0
    assert prof.curves["S"][2] == 0.0
    assert prof.curves["S"][3] == 1.0
    assert prof.curves["S"][10] == 1.0


def test_profile_never_solving_is_zero():
    records = {
        ("p", "good"): fake_record("p", 1, [10.0, 0.0, 0.0, 0.0]),
        ("p", "stuck"): fake_record("p", 1, [10.0, 10.0, 10.0, 10.0]),
    }
    prof = data_profile(records, 1e-3, budget=2)
    assert prof.curves["stuck"] == [0.0, 0.0, 0.0]
    assert prof.curves["good"][1] == 1.0


def test_profile_identical_records_identical_curves():
    best = [8.0, 4.0, 2.0, 1.0]
    records = {
        ("p", "a"): fake_record("p", 1, best),
        ("p", "b"): fake_record("p", 1, list(best)),
    }
    prof = data_profile(records, 1e-1, budget=2)
    assert prof.curves["a"] == prof.curves["b"]


def test_profile_tolerance_ordering_and_monotone():
    rng = np.random.default_rng(0)
    records = {}
    for i in range(6):
        vals = np.minimum.accumulate(rng.uniform(0, 10, 40))
        vals[0] = 10.0
        records[(f"p{i}", "S")] = fake_record(f"p{i}", 1, list(vals), budget=20)
    tight = data_profile(records, 1e-5, budget=20).curves["S"]
    loose = data_profile(records, 1e-1, budget=20).curves["S"]
    for a, b in zip(tight, loose):
        assert b >= a
    for curve in (tight, loose):
        assert all(y >= x for x, y in zip(curve, curve[1:]))
        assert all(0.0 <= v <= 1.0 for v in curve)


def test_profile_final_value_is_solved_fraction():
    records = {
        ("p0", "S"): fake_record("p0", 1, [10.0, 1e-9, 1e-9, 1e-9]),
        ("p1", "S"): fake_record("p1", 1, [10.0, 10.0, 10.0, 10.0]),
        ("p1", "T"): fake_record("p1", 1, [10.0, 0.0, 0.0, 0.0]),
        ("p0", "T"): fake_record("p0", 1, [10.0, 10.0, 10.0, 10.0]),
    }
    prof = data_profile(records, 1e-3, budget=2)
    assert prof.curves["S"][-1] == 0.5
    assert prof.curves["T"][-1] == 0.5


def test_profile_missing_record_raises():
    records = {
        ("p", "a"): fake_record("p", 1, [1.0]),
        ("q", "a"): fake_record("q", 1, [1.0]),
        ("p", "b"): fake_record("p", 1, [1.0]),
    }
    with pytest.raises(EmptyGroup):
        data_profile(records, 1e-3)
    with pytest.raises(EmptyGroup):
        data_profile({}, 1e-3)


def test_csv_row_count_and_roundtrip(tmp_path):
    records = {("p", "S"): fake_record("p", 1, [10.0] + [1.0] * 199, budget=100)}
    prof = data_profile(records, 1e-3, budget=100)
    path = tmp_path / "profile.csv"
    emit_profile_csv(prof, path)
    lines = path.read_text().splitlines()
    assert len(lines) == 102  # header + kappa 0..100
    assert lines[0] == "kappa,S"
    back = read_profile_csv(path)
    assert back.curves["S"] == prof.curves["S"]


def test_run_campaign_writes_traces_and_summary(tmp_path):
    camp = Campaign(
        problems=[registry_by_name("rosenbrock"), registry_by_name("dem")],
        solver_configs=[TRFD_L1],
        tolerances=(1e-3,),
    )
    out = tmp_path / "out"
    result = run_campaign(camp, out_dir=str(out))
    assert sorted(p.name for p in out.iterdir()) == [
        "dem__TRFD-L1.json",
        "rosenbrock__TRFD-L1.json",
        "summary.json",
    ]
    assert len(result.records) == 2
    for rec in result.records.values():
        assert rec.total_evals <= 100 * (rec.n + 1)


def test_campaign_rerun_bit_identical(tmp_path):
    camp = Campaign(
        problems=[registry_by_name("rosenbrock"), registry_by_name("cb2")],
        solver_configs=[TRFD_L1, TRFD_M],
    )
    out1, out2 = tmp_path / "a", tmp_path / "b"
    run_campaign(camp, out_dir=str(out1))
    run_campaign(camp, out_dir=str(out2))
    files1 = sorted(p.name for p in out1.iterdir())
    assert files1 == sorted(p.name for p in out2.iterdir())
    for name in files1:
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes(), name


def test_campaign_parallel_matches_serial(tmp_path):
    camp = Campaign(
        problems=[registry_by_name("rosenbrock"), registry_by_name("dem"),
                  registry_by_name("lq")],
        solver_configs=[TRFD_L1],
    )
    out1, out2 = tmp_path / "serial", tmp_path / "par"
    run_campaign(camp, out_dir=str(out1), jobs=1)
    run_campaign(camp, out_dir=str(out2), jobs=3)
    for p in sorted(out1.iterdir()):
        assert p.read_bytes() == (out2 / p.name).read_bytes()


def test_affine_campaign_terminates_by_floor():
    camp = Campaign(problems=[registry_by_name("chebyshev_line_fit")], solver_configs=[TRFD_M])
    result = run_campaign(camp)
    rec = next(iter(result.records.values()))
    assert rec.termination in (Termination.ETA_FLOOR, Termination.DELTA_FLOOR)


def test_solver_config_auto_rule():
    maxl = registry_by_name("maxl_6").make_problem()   # sqrt(12) < 6
    cheb = registry_by_name("chebyshev_line_fit").make_problem()  # sqrt(10) >= 2
    assert TRFD_M.build_params(maxl).p is PNorm.ONE
    assert TRFD_M.build_params(cheb).p is PNorm.INF
    assert SolverConfig(name="x", p="inf").build_params(maxl).p is PNorm.INF
