import numpy as np
import pytest
from conftest import rosenbrock_residuals

from trfd.oracle import (
    EvalBudget,
    HandshakeTimeout,
    InProcessOracle,
    OracleFailure,
    SpawnFailure,
    format_float,
    spawn_external,
)


def test_inprocess_rosenbrock_values():
    oracle = InProcessOracle(rosenbrock_residuals, 2)
    assert np.array_equal(oracle.eval_F([1.0, 1.0]), [0.0, 0.0])
    # F1 = 10*(1 - 1.44) = -4.4, F2 = 1 - (-1.2) = 2.2
    fvec = oracle.eval_F([-1.2, 1.0])
    assert fvec == pytest.approx([-4.4, 2.2], rel=1e-15)
    assert oracle.eval_count == 2


def test_counting_and_determinism():
    oracle = InProcessOracle(rosenbrock_residuals, 2)
    x = np.array([0.3, -0.7])
    a = oracle.eval_F(x)
    b = oracle.eval_F(x)
    assert np.array_equal(a, b)
    assert oracle.eval_count == 2


def test_wrong_length_and_nonfinite():
    bad_len = InProcessOracle(lambda x: np.zeros(3), 2)
    with pytest.raises(OracleFailure):
        bad_len.eval_F([0.0, 0.0])
    bad_val = InProcessOracle(lambda x: np.array([np.nan, 0.0]), 2)
    with pytest.raises(OracleFailure):
        bad_val.eval_F([0.0, 0.0])


def test_budget_accounting():
    b = EvalBudget(simplex_gradients=100, n=4)
    assert b.max_evals == 500
    with pytest.raises(ValueError):
        EvalBudget(simplex_gradients=0, n=4)


def test_format_float_roundtrip():
    rng = np.random.default_rng(1)
    for v in [0.0, 1.0, -1.0, 0.1, 1e-300, np.pi] + list(rng.normal(size=50)):
        assert float(format_float(v)) == float(v)


def test_external_echo(demo_oracle_cmd):
    oracle = spawn_external(f"{demo_oracle_cmd} --echo", n=2, m=2)
    try:
        assert oracle.eval_count == 0
        out = oracle.eval_F([2.0, 3.0])
        assert np.array_equal(out, [2.0, 3.0])
        assert oracle.eval_count == 1
        # bit-exactness through the wire
        x = np.array([np.pi, -1.0 / 3.0])
        assert np.array_equal(oracle.eval_F(x), x)
    finally:
        oracle.close()


def test_external_registry_problem(demo_oracle_cmd):
    oracle = spawn_external(f"{demo_oracle_cmd} --problem rosenbrock", n=2, m=2)
    try:
        assert oracle.eval_F([-1.2, 1.0]) == pytest.approx([-4.4, 2.2], rel=1e-15)
    finally:
        oracle.close()


def test_spawn_failure():
    with pytest.raises(SpawnFailure):
        spawn_external("definitely-not-a-real-command-xyz --echo", n=2, m=2)


def test_wrong_m_reply(demo_oracle_cmd):
    oracle = spawn_external(f"{demo_oracle_cmd} --echo --wrong-m", n=2, m=2)
    try:
        with pytest.raises(OracleFailure):
            oracle.eval_F([1.0, 2.0])
    finally:
        oracle.close()


def test_garbage_reply(demo_oracle_cmd):
    oracle = spawn_external(f"{demo_oracle_cmd} --echo --garbage", n=2, m=2)
    try:
        with pytest.raises(OracleFailure):
            oracle.eval_F([1.0, 2.0])
    finally:
        oracle.close()


def test_process_death(demo_oracle_cmd):
    oracle = spawn_external(f"{demo_oracle_cmd} --echo --die-after 1", n=2, m=2)
    try:
        oracle.eval_F([1.0, 2.0])
        with pytest.raises(OracleFailure):
            oracle.eval_F([3.0, 4.0])
    finally:
        oracle.close()


def test_handshake_timeout(demo_oracle_cmd):
    with pytest.raises(HandshakeTimeout):
        spawn_external(f"{demo_oracle_cmd} --echo --no-ready", n=2, m=2, timeout=0.5)


def test_eval_timeout(demo_oracle_cmd):
    oracle = spawn_external(f"{demo_oracle_cmd} --echo --sleep 5", n=2, m=2, timeout=0.5)
    try:
        with pytest.raises(OracleFailure):
            oracle.eval_F([1.0, 2.0])
    finally:
        oracle.close()


def test_timeout_env_override(demo_oracle_cmd, monkeypatch):
    monkeypatch.setenv("TRFD_ORACLE_TIMEOUT_SECS", "7.5")
    oracle = spawn_external(f"{demo_oracle_cmd} --echo", n=2, m=2)
    try:
        assert oracle.timeout == 7.5
    finally:
        oracle.close()
