import math

import numpy as np
import pytest

from trfd.core import OuterFunction, eval_h
from trfd.jacobian import build_jacobian
from trfd.testset import (
    problem_to_config,
    registry,
    registry_by_name,
    registry_family,
)

L1_REQUIRED = {
    "linear_full_rank", "linear_rank_one", "rosenbrock", "powell_singular",
    "freudenstein_roth", "bard", "beale", "helical_valley", "gaussian",
    "box_3d", "wood", "brown_dennis",
}
MINIMAX_REQUIRED = {
    "cb2", "cb3", "dem", "ql", "lq", "mifflin1", "wolfe", "rosen_suzuki",
    "maxq_8", "maxl_6",
}


def test_registry_coverage():
    l1 = registry_family("l1")
    mm = registry_family("minimax")
    assert len(l1) >= 12
    assert len(mm) >= 10
    assert L1_REQUIRED <= {bp.name for bp in l1}
    assert MINIMAX_REQUIRED <= {bp.name for bp in mm}
    for bp in l1:
        assert 2 <= bp.n <= 12
    for bp in mm:
        assert 2 <= bp.n <= 50


def test_standard_entries():
    rb = registry_by_name("rosenbrock")
    assert (rb.n, rb.m) == (2, 2)
    assert rb.x0 == (-1.2, 1.0)
    cb2 = registry_by_name("cb2")
    assert (cb2.n, cb2.m) == (2, 3)
    assert cb2.f_ref == pytest.approx(1.9522245, abs=1e-6)
    with pytest.raises(KeyError):
        registry_by_name("not_a_problem")


def test_every_entry_evaluates_at_start():
    for bp in registry():
        fvec = bp.residuals(np.asarray(bp.x0, dtype=float))
        assert np.shape(fvec) == (bp.m,)
        f0 = eval_h(bp.family, fvec)
        assert np.isfinite(f0)
        # the start is never already optimal, or profiles are vacuous
        assert f0 > bp.f_ref + 1e-12


def test_f_ref_provenance_notes():
    for bp in registry():
        assert bp.f_ref_note
        assert "certify_f_ref.py" in bp.f_ref_note


def test_analytic_jacobians_match_forward_differences():
    rng = np.random.default_rng(12)
    tau = 1e-6
    for bp in registry():
        ap = bp.analytic()
        if ap is None:
            continue
        lo, hi = ap.box
        sample_lo = np.maximum(lo, -2.0)
        sample_hi = np.minimum(hi, 2.0)
        for _ in range(5):
            x = rng.uniform(sample_lo, sample_hi)
            scratch = bp.make_problem()
            F_x = scratch.oracle.eval_F(x)
            model = build_jacobian(scratch.oracle, x, F_x, tau)
            bound = ap.lipschitz_jacobian * math.sqrt(bp.n) / 2.0 * tau
            err = np.linalg.norm(model.A - ap.jacobian(x), 2)
            assert err <= bound * (1 + 1e-6) + 1e-12, bp.name


def test_at_least_three_certificates_per_family():
    for family in ("l1", "minimax"):
        certified = [bp for bp in registry_family(family) if bp.jacobian is not None]
        assert len(certified) >= 3


def test_fresh_oracle_per_problem():
    bp = registry_by_name("rosenbrock")
    a = bp.make_problem()
    b = bp.make_problem()
    a.oracle.eval_F(np.array([0.0, 0.0]))
    assert a.oracle.eval_count == 1
    assert b.oracle.eval_count == 0


def test_exact_roots_claimed_in_notes():
    known_roots = {
        "rosenbrock": [1.0, 1.0],
        "freudenstein_roth": [5.0, 4.0],
        "beale": [3.0, 0.5],
        "box_3d": [1.0, 10.0, 1.0],
        "wood": [1.0, 1.0, 1.0, 1.0],
        "helical_valley": [1.0, 0.0, 0.0],
        "brown_almost_linear": [1.0] * 5,
    }
    for name, root in known_roots.items():
        bp = registry_by_name(name)
        assert eval_h(bp.family, bp.residuals(np.asarray(root))) == pytest.approx(0.0, abs=1e-12)
    # minimax reference points
    assert eval_h(OuterFunction.MINIMAX, registry_by_name("dem").residuals(np.array([0.0, -3.0]))) == -3.0
    assert eval_h(OuterFunction.MINIMAX, registry_by_name("rosen_suzuki").residuals(np.array([0.0, 1.0, 2.0, -1.0]))) == -44.0
    assert eval_h(OuterFunction.MINIMAX, registry_by_name("ql").residuals(np.array([1.2, 2.4]))) == pytest.approx(7.2, rel=1e-12)


def test_config_export_roundtrip():
    from trfd.config import problem_from_config

    bp = registry_by_name("cb2")
    doc = problem_to_config(bp)
    assert doc["oracle"] == {"registry": "cb2"}
    prob = problem_from_config(doc)
    assert prob.n == bp.n and prob.m == bp.m
    x0 = np.asarray(bp.x0)
    assert np.array_equal(prob.x0, x0)
    assert np.array_equal(prob.oracle.eval_F(x0), bp.residuals(x0))


def test_auto_norm_rule_covers_both_branches():
    # sqrt(m) < n picks the 1-norm, otherwise the inf-norm
    mm = registry_family("minimax")
    p1 = [bp for bp in mm if math.sqrt(bp.m) < bp.n]
    pinf = [bp for bp in mm if math.sqrt(bp.m) >= bp.n]
    assert p1 and pinf
