"""Unrolled encoder: schedule exactness, step size, descent, and paths."""

import math

import numpy as np
import pytest

from locosparse.encoder import (EncoderConfig, encode, momentum_schedule,
                                spectral_norm_sq_inv)
from locosparse.errors import (ConfigError, ContractError,
                               DegenerateInputError, DivergenceError)
from locosparse.penalties import PenaltyConfig
from locosparse.simplex import project_columns

from oracles import jacobi_eigenvalues_classical


def test_aswritten_schedule_closed_forms():
    sched = momentum_schedule(15, "aswritten")
    golden = (1.0 + math.sqrt(5.0)) / 2.0
    assert abs(sched.etas[0] - 0.0) < 1e-15
    assert abs(sched.etas[1] - 1.0) < 1e-15
    assert abs(sched.etas[2] - golden) < 1e-15
    assert abs(sched.gammas[0] - (-1.0)) < 1e-15
    assert abs(sched.gammas[1] - 0.0) < 1e-15
    # recurrence: eta(t+1) solves eta^2 - eta - eta(t) = 0
    for t in range(15):
        lhs = sched.etas[t + 1] ** 2 - sched.etas[t + 1]
        assert abs(lhs - sched.etas[t]) < 1e-12
    for t in range(15):
        want = (sched.etas[t] - 1.0) / sched.etas[t + 1]
        assert abs(sched.gammas[t] - want) < 1e-15


def test_fista_schedule_closed_forms():
    sched = momentum_schedule(10, "fista")
    golden = (1.0 + math.sqrt(5.0)) / 2.0
    assert abs(sched.etas[0] - 1.0) < 1e-15
    assert abs(sched.etas[1] - golden) < 1e-15
    assert abs(sched.gammas[0] - 0.0) < 1e-15
    for t in range(10):
        lhs = sched.etas[t + 1] ** 2 - sched.etas[t + 1]
        assert abs(lhs - sched.etas[t] ** 2) < 1e-12
    assert np.all(sched.gammas[1:] > 0.0)


def test_none_schedule_is_all_zero():
    sched = momentum_schedule(8, "none")
    assert np.all(sched.gammas == 0.0)


def test_schedule_rejects_bad_arguments():
    with pytest.raises(ConfigError):
        momentum_schedule(0, "fista")
    with pytest.raises(ConfigError):
        momentum_schedule(5, "nesterov")


def test_encoder_config_validation():
    with pytest.raises(ConfigError):
        EncoderConfig(steps=0)
    with pytest.raises(ConfigError):
        EncoderConfig(momentum_mode="turbo")
    with pytest.raises(ConfigError):
        EncoderConfig(step_size_override=0.0)


def test_step_size_against_jacobi_oracle():
    rng = np.random.default_rng(4)
    for _ in range(10):
        A = rng.normal(size=(10, 6))
        est = spectral_norm_sq_inv(A)
        evals = jacobi_eigenvalues_classical(A.T @ A)
        want = 1.0 / evals[-1]
        assert est == pytest.approx(want, rel=1e-6)


def test_step_size_orthonormal_columns_is_one():
    q, _ = np.linalg.qr(np.random.default_rng(9).normal(size=(12, 5)))
    assert spectral_norm_sq_inv(q) == pytest.approx(1.0, rel=1e-8)


def test_step_size_zero_matrix_raises():
    with pytest.raises(DegenerateInputError):
        spectral_norm_sq_inv(np.zeros((4, 4)))


def _random_instance(seed, d=16, m=16, n=32):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(d, m))
    A /= np.linalg.norm(A, axis=0)
    Y = rng.normal(size=(d, n))
    return A, Y


def test_wl_descent_and_simplex_feasibility():
    # the trace starts at the infeasible all-zero code, so the descent
    # guarantee covers the values produced by the 15 steps themselves
    for seed in range(10):
        A, Y = _random_instance(seed)
        cfg = EncoderConfig(PenaltyConfig("wl", 0.5), steps=15, momentum_mode="none")
        X, trace = encode(Y, A, cfg)
        diffs = np.diff(trace.objective_per_step[1:])
        assert diffs.max() <= 1e-10
        assert X.min() >= -1e-12
        assert np.abs(X.sum(axis=0) - 1.0).max() <= 1e-12


def test_lap_descent_with_supplied_graph():
    A, Y = _random_instance(77, n=12)
    W = np.zeros((12, 12))
    for i in range(11):
        W[i, i + 1] = W[i + 1, i] = 1.0
    G = np.diag(W.sum(axis=1)) - W
    cfg = EncoderConfig(PenaltyConfig("lap", 0.3, laplacian=G),
                        steps=15, momentum_mode="none")
    X, trace = encode(Y, A, cfg)
    assert np.diff(trace.objective_per_step[1:]).max() <= 1e-10
    assert np.abs(X.sum(axis=0) - 1.0).max() <= 1e-12


def test_l1_path_matches_handrolled_ista():
    A, Y = _random_instance(5, d=12, m=9, n=7)
    lam = 0.4
    cfg = EncoderConfig(PenaltyConfig("l1", lam), steps=15, momentum_mode="none")
    X, _ = encode(Y, A, cfg)

    alpha = spectral_norm_sq_inv(A)
    Z = np.zeros((9, 7))
    for _ in range(15):
        step = Z - alpha * (A.T @ (A @ Z - Y))
        Z = np.sign(step) * np.maximum(np.abs(step) - alpha * lam, 0.0)
    assert np.allclose(X, Z, atol=1e-12)


def test_l1_codes_can_go_negative():
    A, Y = _random_instance(6, d=10, m=8, n=20)
    X, _ = encode(Y, A, EncoderConfig(PenaltyConfig("l1", 0.05)))
    assert X.min() < 0.0


def test_momentum_modes_agree_on_easy_problem():
    # on a well-conditioned instance all three schedules should land on
    # nearly the same minimizer after 60 steps
    A, Y = _random_instance(13, d=16, m=8, n=5)
    results = {}
    for mode in ("aswritten", "fista", "none"):
        cfg = EncoderConfig(PenaltyConfig("wl", 0.2), steps=60, momentum_mode=mode)
        results[mode], _ = encode(Y, A, cfg)
    assert np.abs(results["aswritten"] - results["none"]).max() < 1e-6
    assert np.abs(results["fista"] - results["none"]).max() < 1e-6


def test_single_column_promotion():
    A, Y = _random_instance(21, n=1)
    cfg = EncoderConfig(PenaltyConfig("wl", 0.5))
    X1, _ = encode(Y[:, 0], A, cfg)
    X2, _ = encode(Y, A, cfg)
    assert X1.shape == X2.shape == (16, 1)
    assert np.array_equal(X1, X2)


def test_trace_objective_at_init_is_data_energy():
    A, Y = _random_instance(30, n=4)
    _, trace = encode(Y, A, EncoderConfig(PenaltyConfig("wl", 0.5)))
    assert trace.objective_per_step[0] == pytest.approx(0.5 * (Y * Y).sum())
    assert trace.objective_per_step.size == 16


def test_encode_requires_penalty():
    A, Y = _random_instance(1)
    with pytest.raises(ConfigError):
        encode(Y, A, EncoderConfig())


def test_lap_penalty_needs_matching_graph():
    A, Y = _random_instance(2, n=6)
    with pytest.raises(ConfigError):
        encode(Y, A, EncoderConfig(PenaltyConfig("lap", 0.5)))
    bad = EncoderConfig(PenaltyConfig("lap", 0.5, laplacian=np.eye(4)))
    with pytest.raises(ContractError):
        encode(Y, A, bad)


def test_shape_mismatch_raises():
    with pytest.raises(ContractError):
        encode(np.zeros((5, 2)), np.zeros((4, 3)),
               EncoderConfig(PenaltyConfig("l1", 0.1)))


def test_absurd_step_size_raises_divergence():
    # the iterates blow through the float range; the objective overflow
    # on the way up is expected, the error must still surface
    A, Y = _random_instance(8)
    cfg = EncoderConfig(PenaltyConfig("l1", 0.5), steps=15,
                        momentum_mode="none", step_size_override=1e200)
    with np.errstate(over="ignore"), pytest.raises(DivergenceError):
        encode(Y, A, cfg)


def test_override_step_size_is_used():
    # a vanishing step size caps every code at roughly alpha * |A^T Y|,
    # orders of magnitude below what the default step size produces
    A, Y = _random_instance(14)
    cfg = EncoderConfig(PenaltyConfig("l1", 0.5), step_size_override=1e-12)
    X, _ = encode(Y, A, cfg)
    assert 0.0 < np.abs(X).max() < 1e-9
    default, _ = encode(Y, A, EncoderConfig(PenaltyConfig("l1", 0.5)))
    assert np.abs(default).max() > 1e-3


def test_projection_helper_feasible_on_random_batches():
    rng = np.random.default_rng(50)
    M = rng.normal(scale=5.0, size=(10, 30))
    P = project_columns(M)
    assert P.min() >= 0.0
    assert np.abs(P.sum(axis=0) - 1.0).max() < 1e-12
