"""Numerical MLE by moment matching.

For strictly positive counts ``u`` the MLE of a toric model is the unique
model point ``p`` with ``A p = A u / N``.  We find it by damped Newton on the
moment residual in log-parameters, with the last parameter pinned to 1 to
remove the scaling redundancy.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, DomainError, PreconditionError
from .model import (
    DataVector,
    ToricModel,
    _p_from_log,
    log_likelihood,
    sufficient_statistic,
    variety_residual,
)

__all__ = ["SolverOptions", "MLEResult", "solve_birch", "moment_residual", "target_moments"]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverOptions:
    tol: float = 1e-12
    max_iter: int = 200
    # Armijo backtracking on ||g||^2
    armijo: float = 1e-4
    shrink: float = 0.5
    min_step: float = 1e-12
    restarts: int = 10
    seed: int = 0

    def __post_init__(self):
        if not self.tol > 0:
            raise DomainError("tol must be positive")
        if self.max_iter < 1:
            raise DomainError("max_iter must be at least 1")


@dataclass
class MLEResult:
    """Estimated distribution with its certificates.

    ``theta_hat`` is gauge fixed by the solver that produced it: Newton pins
    the last parameter to 1, the closed forms return the radical expressions
    (which satisfy ``sum_j theta^{a_j} = 1``).
    """

    p_hat: np.ndarray
    theta_hat: np.ndarray
    log_lik: float
    moment_residual: float
    variety_residual: float
    method: str
    iterations: int = 0
    model_label: str = ""
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        out = {
            "model": self.model_label,
            "method": self.method,
            "p_hat": [float(x) for x in self.p_hat],
            "theta_hat": [float(x) for x in self.theta_hat],
            "log_lik": float(self.log_lik),
            "moment_residual": float(self.moment_residual),
            "variety_residual": float(self.variety_residual),
            "iterations": int(self.iterations),
        }
        out.update(self.extra)
        return out


def target_moments(model, u):
    """``b / N`` as floats."""
    u = u if isinstance(u, DataVector) else DataVector(u)
    b = np.array(sufficient_statistic(model, u), dtype=float)
    return b / u.N


def moment_residual(model, p, u):
    """``max_i |(A p)_i - b_i / N|``."""
    p = np.asarray(p, dtype=float)
    if p.shape != (model.m,):
        raise DomainError(f"p must have length {model.m}")
    return float(np.max(np.abs(model.array @ p - target_moments(model, u))))


def _newton(model, target, eta0, opts):
    """Damped Newton for ``A f(theta) = target`` over the first d-1 log-parameters."""
    A = model.array
    d = model.d
    eta = np.array(eta0, dtype=float)

    def full(e):
        return np.append(e, 0.0)

    def resid(e):
        p = _p_from_log(model, full(e))
        return p, A @ p - target

    def newton_step(p, g):
        mean = A @ p
        # covariance of the columns of A under p; its leading (d-1) block is nonsingular
        cov = (A * p) @ A.T - np.outer(mean, mean)
        return np.linalg.solve(cov[: d - 1, : d - 1], -g[: d - 1])

    p, g = resid(eta)
    it = 0
    for it in range(1, opts.max_iter + 1):
        if np.max(np.abs(g)) <= opts.tol:
            # a couple of undamped polishing steps, kept only while they help
            for _ in range(2):
                cand = eta + newton_step(p, g)
                p_new, g_new = resid(cand)
                if np.max(np.abs(g_new)) >= np.max(np.abs(g)):
                    break
                eta, p, g = cand, p_new, g_new
            return eta, p, it - 1, True
        try:
            step = newton_step(p, g)
        except np.linalg.LinAlgError:
            return eta, p, it, False
        f0 = g @ g
        t = 1.0
        while True:
            cand = eta + t * step
            p_new, g_new = resid(cand)
            if g_new @ g_new <= (1 - 2 * opts.armijo * t) * f0 or t < opts.min_step:
                break
            t *= opts.shrink
        if t < opts.min_step:
            # line search stalled; at machine precision this is success if the residual is tiny
            return eta, p, it, bool(np.max(np.abs(g)) <= opts.tol)
        eta, p, g = cand, p_new, g_new
    return eta, p, opts.max_iter, bool(np.max(np.abs(g)) <= opts.tol)


def solve_birch(model: ToricModel, u, opts: SolverOptions | None = None, theta0=None) -> MLEResult:
    """MLE of a toric model for strictly positive counts.

    Parameters
    ----------
    model : ToricModel
    u : DataVector or sequence of int
        Counts; every entry must be positive.
    opts : SolverOptions, optional
    theta0 : array_like, optional
        Positive starting parameters (default all ones).

    Returns
    -------
    MLEResult
        ``theta_hat`` normalized so its last entry is 1.

    Raises
    ------
    PreconditionError
        If some count is zero.
    ConvergenceError
        If no start reaches the tolerance; carries the last iterate.
    """
    opts = opts or SolverOptions()
    u = u if isinstance(u, DataVector) else DataVector(u)
    if len(u) != model.m:
        raise DomainError(f"data vector has length {len(u)}, model has {model.m} columns")
    if not u.positive:
        raise PreconditionError(
            "Birch's theorem needs a strictly positive data vector; "
            f"got zero counts at positions {[j for j, x in enumerate(u) if x == 0]}")
    target = target_moments(model, u)

    if theta0 is None:
        starts = [np.zeros(model.d - 1)]
    else:
        theta0 = np.asarray(theta0, dtype=float)
        if theta0.shape != (model.d,) or not np.all(theta0 > 0):
            raise DomainError("theta0 must be a positive vector of length d")
        lt = np.log(theta0)
        starts = [lt[:-1] - lt[-1]]
    rng = np.random.default_rng(opts.seed)
    starts += [rng.uniform(np.log(1e-2), np.log(1e2), model.d - 1) for _ in range(opts.restarts)]

    total_iter = 0
    best = None
    for k, eta0 in enumerate(starts):
        eta, p, its, ok = _newton(model, target, eta0, opts)
        total_iter += its
        res = float(np.max(np.abs(model.array @ p - target)))
        if best is None or res < best[2]:
            best = (eta, p, res)
        if not ok:
            log.debug("start %d stalled at residual %.3e", k, res)
            continue
        vres = variety_residual(model, p)
        if vres > 10 * opts.tol:
            log.debug("start %d off the variety: %.3e", k, vres)
            continue
        theta = np.exp(np.append(eta, 0.0))
        return MLEResult(
            p_hat=p,
            theta_hat=theta,
            log_lik=log_likelihood(p, u),
            moment_residual=res,
            variety_residual=vres,
            method="birch_newton",
            iterations=total_iter,
            model_label=model.label,
        )
    eta, p, res = best
    raise ConvergenceError(
        f"Newton did not reach moment residual {opts.tol:g} for model {model.label!r}",
        last_iterate={"theta": np.exp(np.append(eta, 0.0)).tolist(), "p": p.tolist()},
        residual=res,
    )
