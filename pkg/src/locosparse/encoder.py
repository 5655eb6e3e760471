"""The unrolled encoder: momentum-accelerated projected gradient steps.

Codes start at zero and take a fixed number of gradient steps on the
composite objective, each followed by the simplex projection (wl and
lap penalties) or by soft thresholding (the l1 baseline, where a
simplex constraint would pin the l1 norm to one and neuter the
penalty). The step size is the inverse squared spectral norm of the
dictionary unless overridden.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (ConfigError, ContractError, DegenerateInputError,
                     DivergenceError)
from .penalties import PenaltyConfig
from .rng import CounterRng, derive_seed
from .simplex import pairwise_sq_distances, project_columns

MOMENTUM_MODES = ("aswritten", "fista", "none")


@dataclass(frozen=True)
class EncoderConfig:
    penalty: PenaltyConfig | None = None
    steps: int = 15
    momentum_mode: str = "aswritten"
    step_size_override: float | None = None

    def __post_init__(self):
        if self.steps < 1:
            raise ConfigError(f"steps must be positive, got {self.steps}")
        if self.momentum_mode not in MOMENTUM_MODES:
            raise ConfigError(
                f"unknown momentum mode {self.momentum_mode!r}; "
                f"expected one of {MOMENTUM_MODES}")
        if self.step_size_override is not None and self.step_size_override <= 0:
            raise ConfigError("step_size_override must be positive")


@dataclass(frozen=True)
class MomentumSchedule:
    etas: np.ndarray    # eta(0) .. eta(T)
    gammas: np.ndarray  # gamma(0) .. gamma(T-1)


@dataclass(frozen=True)
class EncodeTrace:
    objective_per_step: np.ndarray  # objective at init and after each step
    final_code: np.ndarray


def momentum_schedule(steps, mode):
    """Momentum coefficients for T steps, gamma(t) = (eta(t) - 1)/eta(t+1).

    aswritten starts eta at 0 with 4*eta(t) under the root, which makes
    gamma(0) = -1 (the first lookahead resets to the origin) and
    gamma(1) = 0; fista is the standard schedule with eta(0) = 1 and
    4*eta(t)^2 under the root; none holds every gamma at zero.
    """
    if steps < 1:
        raise ConfigError(f"steps must be positive, got {steps}")
    etas = np.empty(steps + 1)
    if mode == "aswritten":
        etas[0] = 0.0
        for t in range(steps):
            etas[t + 1] = (1.0 + np.sqrt(1.0 + 4.0 * etas[t])) / 2.0
    elif mode == "fista":
        etas[0] = 1.0
        for t in range(steps):
            etas[t + 1] = (1.0 + np.sqrt(1.0 + 4.0 * etas[t] ** 2)) / 2.0
    elif mode == "none":
        etas[:] = 1.0
    else:
        raise ConfigError(f"unknown momentum mode {mode!r}")
    gammas = (etas[:-1] - 1.0) / etas[1:]
    return MomentumSchedule(etas, gammas)


_POWER_SEED = derive_seed(0, "power-iteration")


def spectral_norm_sq_inv(A, tol=1e-10, max_iters=10000):
    """1 / sigma_max(A)^2 by power iteration on A^T A.

    Iterates until successive Rayleigh quotients agree to `tol` (or the
    cap is reached, in which case the last estimate is returned). The
    start vector comes from a fixed internal stream so the result is
    reproducible.
    """
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2:
        raise ContractError("dictionary must be a matrix")
    if not A.any():
        raise DegenerateInputError("zero dictionary has no spectral norm")
    rng = CounterRng(_POWER_SEED)
    v = rng.normals(A.shape[1])
    v /= np.linalg.norm(v)
    rayleigh = np.inf
    for _ in range(max_iters):
        w = A.T @ (A @ v)
        prev, rayleigh = rayleigh, float(v @ w)
        norm = float(np.linalg.norm(w))
        if norm == 0.0:
            v = rng.normals(A.shape[1])  # fell into the null space; restart
            v /= np.linalg.norm(v)
            rayleigh = np.inf
            continue
        v = w / norm
        if abs(rayleigh - prev) < tol:
            break
    return 1.0 / rayleigh


def encode(Y, A, cfg):
    """Run the unrolled encoder on a batch of stimulus columns.

    Args:
        Y: d x n stimulus matrix (a single column may be passed 1-D).
        A: d x m dictionary.
        cfg: EncoderConfig with a concrete penalty.

    Returns:
        (codes, trace): codes is m x n; the trace records the composite
        batch objective at initialization and after every step. For wl
        and lap the codes land on the probability simplex column-wise;
        the l1 path returns soft-thresholded codes instead.
    """
    Y = np.asarray(Y, dtype=np.float64)
    if Y.ndim == 1:
        Y = Y[:, None]
    A = np.asarray(A, dtype=np.float64)
    if Y.ndim != 2 or A.ndim != 2 or A.shape[0] != Y.shape[0]:
        raise ContractError(f"shape mismatch: Y {Y.shape} vs A {A.shape}")
    pen = cfg.penalty
    if pen is None:
        raise ConfigError("encoder config carries no penalty")
    lam = pen.lam
    m, n = A.shape[1], Y.shape[1]

    Gsym = None
    if pen.kind == "lap":
        if pen.laplacian is None:
            raise ConfigError("lap penalty requires a graph Laplacian")
        G = np.asarray(pen.laplacian, dtype=np.float64)
        if G.shape != (n, n):
            raise ContractError(f"laplacian is {G.shape} but the batch has {n} columns")
        Gsym = G + G.T
    D = pairwise_sq_distances(A, Y) if pen.kind == "wl" else None

    alpha = (cfg.step_size_override if cfg.step_size_override is not None
             else spectral_norm_sq_inv(A))
    sched = momentum_schedule(cfg.steps, cfg.momentum_mode)

    def objective(X):
        resid = Y - A @ X
        fit = 0.5 * float((resid * resid).sum())
        if pen.kind == "l1":
            return fit + lam * float(np.abs(X).sum())
        if pen.kind == "wl":
            return fit + lam * float((D * X).sum())
        return fit + lam * float(((X @ G) * X).sum())

    X = np.zeros((m, n))
    lookahead = X
    objs = np.empty(cfg.steps + 1)
    objs[0] = objective(X)
    for t in range(cfg.steps):
        if pen.kind == "l1":
            step = lookahead - alpha * (A.T @ (A @ lookahead - Y))
            Xn = np.sign(step) * np.maximum(np.abs(step) - alpha * lam, 0.0)
        else:
            grad = A.T @ (A @ lookahead - Y)
            if pen.kind == "wl":
                grad = grad + lam * D
            else:
                grad = grad + lam * (lookahead @ Gsym)
            Xn = project_columns(lookahead - alpha * grad)
        if not np.all(np.isfinite(Xn)):
            raise DivergenceError(f"encoder produced non-finite values at step {t}")
        lookahead = Xn + sched.gammas[t] * (Xn - X)
        X = Xn
        objs[t + 1] = objective(X)
    return X, EncodeTrace(objs, X)
