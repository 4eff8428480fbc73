"""Solvers built on user-supplied auxiliary subproblem oracles.

Equilibrium and variational-like problems have no computable projection
step for general bifunctions, so the per-iteration subproblem is a
first-class capability: the caller supplies an oracle and the solvers
drive it.  The linear/projection reduction ships as the only built-in.
The higher-order family regularizes each half-step with a p-th power
penalty and solves it by projected gradient descent.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import (
    SolveConfig,
    SolveReport,
    TraceRecord,
    check_divergence,
    default_start,
    effective_T,
    g_value,
    recover_iterate,
    resolve_rho,
)
from .errors import CapabilityError, InnerLoopError, OracleContractError, UnsupportedSetError
from .sets import Box, NonnegOrthant, WholeSpace, distance, project

_FEASIBILITY_TOL = 1e-10
_KERNEL_SAMPLE_TOL = 1e-8


def _checked_oracle_value(K, value, label):
    value = np.atleast_1d(np.asarray(value, dtype=float))
    if not np.all(np.isfinite(value)) or distance(K, value) > _FEASIBILITY_TOL:
        raise OracleContractError(f"{label} oracle returned an infeasible point")
    return value


@dataclass(frozen=True)
class EquilibriumProblem:
    """Equilibrium problem: find u with g(u) in K and F(u, g(v)) >= 0.

    aux_oracle(anchor, center, rho) must return the feasible vector
    g(u+) solving rho*F(anchor, y) + <g(u+) - center, y - g(u+)> >= 0
    for all feasible y; its output is feasibility-checked on every call.
    """

    dim: int
    F: Callable
    K: object
    aux_oracle: Callable
    g: Optional[Callable] = None
    g_inverse: Optional[Callable] = None

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be at least 1")


@dataclass(frozen=True)
class VarLikeProblem:
    """Variational-like problem: <T(u), eta(g(v), g(u))> >= 0 on K.

    eta is the direction kernel, E_grad the gradient of the strongly
    preinvex auxiliary kernel, and aux_oracle(anchor, center, rho)
    returns g(u+) solving
    <rho*T(anchor) + E_grad(g(u+)) - E_grad(center), eta(y, g(u+))> >= 0
    for all feasible y.  eta(y, y) = 0 is required (checked on samples);
    skew additivity is sampled and warned about, not enforced.
    """

    dim: int
    T: Callable
    K: object
    eta: Callable
    E_grad: Callable
    aux_oracle: Callable
    g: Optional[Callable] = None
    g_inverse: Optional[Callable] = None

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be at least 1")
        rng = np.random.default_rng(0)
        samples = [rng.standard_normal(self.dim) for _ in range(5)]
        for y in samples:
            if float(np.linalg.norm(self.eta(y, y))) > _KERNEL_SAMPLE_TOL:
                raise ValueError("eta(y, y) must vanish")
        for y1, y2 in zip(samples[:-1], samples[1:]):
            skew = np.asarray(self.eta(y1, y2)) + np.asarray(self.eta(y2, y1))
            if float(np.linalg.norm(skew)) > _KERNEL_SAMPLE_TOL:
                warnings.warn("eta is not antisymmetric on sampled pairs", stacklevel=2)
                break


@dataclass(frozen=True)
class HigherOrderProblem:
    """Problem with a p-th power strengthening term of modulus mu.

    nu is the regularization weight of the iteration subproblem and
    defaults to mu; the underlying operator data lives in base.
    """

    base: GviProblem
    p: float
    mu: float
    nu: Optional[float] = None

    def __post_init__(self):
        if not self.p > 1:
            raise ValueError("p must exceed 1")
        if self.mu < 0:
            raise ValueError("mu must be nonnegative")
        if self.nu is None:
            object.__setattr__(self, "nu", self.mu)
        elif self.nu < 0:
            raise ValueError("nu must be nonnegative")


def projection_aux_oracle(T, K):
    """Built-in oracle for the linear bifunction F(u, y) = <T(u), y - g(u)>.

    Returns the procedure (anchor, center, rho) -> P_K[center - rho*T(anchor)],
    which solves the auxiliary inequality exactly in that case.
    """

    def oracle(anchor, center, rho):
        return project(K, np.asarray(center, dtype=float) - rho * np.asarray(T(anchor), dtype=float))

    return oracle


def diagonal_kernel_oracle(T, K, weights):
    """Built-in oracle for eta(y1, y2) = y1 - y2 with E(y) = (1/2) y^T D y.

    D = diag(weights) must be positive; the auxiliary inequality then
    reads <rho*T(anchor) + D g(u+) - D center, y - g(u+)> >= 0, whose
    solution is the D-norm projection of center - rho*D^{-1}T(anchor).
    For coordinate-separable sets that projection is the plain clamp,
    so only those sets are supported.
    """
    weights = np.atleast_1d(np.asarray(weights, dtype=float))
    if np.any(weights <= 0):
        raise ValueError("weights must be positive")
    if not isinstance(K, (Box, NonnegOrthant, WholeSpace)):
        raise UnsupportedSetError("diagonal kernel oracle needs a coordinate-separable set")

    def oracle(anchor, center, rho):
        shift = rho * np.asarray(T(anchor), dtype=float) / weights
        return project(K, np.asarray(center, dtype=float) - shift)

    return oracle


def _displacement_report(u, iters, disp, tol, trace, details):
    return SolveReport(
        solution=u,
        iterations=iters,
        residual_norm=disp,
        converged=bool(disp <= tol),
        trace=trace,
        details=details,
    )


def solve_eq_predictor_corrector(problem, config=None, u0=None):
    """Predictor-corrector iteration through the auxiliary oracle.

    Predictor: g(w) = oracle(u_n, g(u_n), beta); corrector:
    g(u+) = oracle(w, g(w), rho), recovered through the
    anchor - g(anchor) + . device.  Stops when the g-image displacement
    ||g(u+) - g(u_n)|| drops to tol; at least one step is always taken.

    Parameters
    ----------
    problem : EquilibriumProblem
    config : SolveConfig, optional
        beta_step defaults to the resolved rho when None.
    u0 : array_like, optional

    Returns
    -------
    SolveReport
    """
    config = SolveConfig() if config is None else config
    rho = config.rho if config.rho is not None else 1.0
    if not rho > 0:
        raise ValueError("rho must be positive")
    beta = rho if config.beta_step is None else config.beta_step
    if not beta > 0:
        raise ValueError("beta_step must be positive for the predictor")
    u = default_start(problem) if u0 is None else np.atleast_1d(np.asarray(u0, dtype=float)).copy()

    trace = [TraceRecord(float(np.linalg.norm(u)), np.inf)]
    iters = 0
    disp = np.inf
    while disp > config.tol and iters < config.max_iters:
        gu = g_value(problem, u)
        gw = _checked_oracle_value(problem.K, problem.aux_oracle(u, gu, beta), "equilibrium")
        w = recover_iterate(problem, u, gw)
        g_next = _checked_oracle_value(problem.K, problem.aux_oracle(w, gw, rho), "equilibrium")
        u = recover_iterate(problem, w, g_next)
        check_divergence(u)
        iters += 1
        disp = float(np.linalg.norm(g_next - gu))
        trace.append(TraceRecord(float(np.linalg.norm(u)), disp))
    details = {"algorithm": "eq-predictor-corrector", "rho": rho, "beta_step": beta}
    return _displacement_report(u, iters, disp, config.tol, trace, details)


def solve_eq_inertial(problem, config=None, u0=None):
    """Inertial proximal point iteration through the auxiliary oracle.

    The center is extrapolated, g(u_n) + alpha_n*(g(u_n) - g(u_{n-1}))
    with alpha_n in [0, 1) from config.alpha_schedule (default 0), and
    the implicit relation g(u+) = oracle(u+, center, rho) is solved by
    inner fixed-point iteration anchored at u_n.

    Parameters
    ----------
    problem : EquilibriumProblem
    config : SolveConfig, optional
    u0 : array_like, optional

    Returns
    -------
    SolveReport

    Raises
    ------
    InnerLoopError
        When the inner iteration fails to go Cauchy within
        inner_max_iters.
    """
    config = SolveConfig() if config is None else config
    rho = config.rho if config.rho is not None else 1.0
    if not rho > 0:
        raise ValueError("rho must be positive")
    u = default_start(problem) if u0 is None else np.atleast_1d(np.asarray(u0, dtype=float)).copy()
    u_prev = u.copy()

    trace = [TraceRecord(float(np.linalg.norm(u)), np.inf)]
    iters = 0
    disp = np.inf
    while disp > config.tol and iters < config.max_iters:
        alpha_n = config.alpha_at(iters, default=0.0)
        if not 0.0 <= alpha_n < 1.0:
            raise ValueError("inertial weight must lie in [0, 1)")
        gu = g_value(problem, u)
        center = gu + alpha_n * (gu - g_value(problem, u_prev))
        w = gu.copy()
        inner = 0
        while True:
            w_next = _checked_oracle_value(
                problem.K, problem.aux_oracle(recover_iterate(problem, u, w), center, rho), "equilibrium"
            )
            inner += 1
            if float(np.linalg.norm(w_next - w)) <= config.inner_tol:
                w = w_next
                break
            w = w_next
            if inner >= config.inner_max_iters:
                raise InnerLoopError("eq-inertial")
        u_prev = u
        u = recover_iterate(problem, u, w)
        check_divergence(u)
        iters += 1
        disp = float(np.linalg.norm(w - gu))
        trace.append(
            TraceRecord(float(np.linalg.norm(u)), disp, info={"alpha_n": alpha_n, "inner_iters": inner})
        )
    details = {"algorithm": "eq-inertial", "rho": rho}
    return _displacement_report(u, iters, disp, config.tol, trace, details)


def solve_varlike(problem, config=None, u0=None):
    """Single-stage iteration for variational-like problems.

    Each step asks the oracle for g(u+) from anchor u_n and center
    g(u_n); the iteration stops when ||eta(g(u+), g(u_n))|| drops to
    tol.  At least one step is always taken.

    Parameters
    ----------
    problem : VarLikeProblem
    config : SolveConfig, optional
    u0 : array_like, optional

    Returns
    -------
    SolveReport
    """
    config = SolveConfig() if config is None else config
    rho = config.rho if config.rho is not None else 1.0
    if not rho > 0:
        raise ValueError("rho must be positive")
    u = default_start(problem) if u0 is None else np.atleast_1d(np.asarray(u0, dtype=float)).copy()

    trace = [TraceRecord(float(np.linalg.norm(u)), np.inf)]
    iters = 0
    disp = np.inf
    while disp > config.tol and iters < config.max_iters:
        gu = g_value(problem, u)
        g_next = _checked_oracle_value(problem.K, problem.aux_oracle(u, gu, rho), "variational-like")
        u = recover_iterate(problem, u, g_next)
        check_divergence(u)
        iters += 1
        disp = float(np.linalg.norm(np.asarray(problem.eta(g_next, gu), dtype=float)))
        trace.append(TraceRecord(float(np.linalg.norm(u)), disp))
    details = {"algorithm": "varlike", "rho": rho}
    return _displacement_report(u, iters, disp, config.tol, trace, details)


def _power_subproblem(problem, anchor, center, rho, config):
    """Minimize rho*<T(anchor), v> + (1/2)||v - center||^2 + (nu/p)||v - anchor||^p over K."""
    base = problem.base
    p, nu = problem.p, problem.nu
    Ta = effective_T(base, anchor)
    if p == 2.0:
        return project(base.K, (center + nu * anchor - rho * Ta) / (1.0 + nu))
    if nu == 0.0:
        return project(base.K, center - rho * Ta)

    def objective(v):
        return float(
            rho * (Ta @ v)
            + 0.5 * float((v - center) @ (v - center))
            + (nu / p) * float(np.linalg.norm(v - anchor)) ** p
        )

    v = project(base.K, np.asarray(center, dtype=float))
    f_v = objective(v)
    for _ in range(config.inner_max_iters):
        shift = v - anchor
        s = float(np.linalg.norm(shift))
        grad = rho * Ta + (v - center)
        if s > 0:
            grad = grad + nu * s ** (p - 2.0) * shift
        tau = 1.0 / (1.0 + nu * (p - 1.0) * s ** (p - 2.0)) if s > 0 else 1.0
        for _ in range(60):
            v_next = project(base.K, v - tau * grad)
            f_next = objective(v_next)
            if f_next <= f_v:
                break
            tau *= 0.5
        step = float(np.linalg.norm(v_next - v))
        v, f_v = v_next, f_next
        if step <= config.inner_tol:
            return v
    raise InnerLoopError("higher-order subproblem")


def solve_higher_order(problem, config=None, u0=None, mode="two_step"):
    """Iterate the p-th power regularized subproblem.

    mode="two_step" runs two self-anchored half-steps per iteration:
    y = sub(anchor=u_n, center=u_n), then u+ = sub(anchor=y, center=y);
    for p = 2, nu = 0 each half-step is exactly a projection.
    mode="implicit" instead solves the proximal relation
    u+ = sub(anchor=u+, center=u_n) by fixed-point iteration, which
    satisfies <rho*T(u+) + u+ - u_n, v - u+> >= 0 on K.  Both stop on
    the displacement ||u+ - u_n|| <= tol.

    Parameters
    ----------
    problem : HigherOrderProblem
    config : SolveConfig, optional
    u0 : array_like, optional
    mode : {"two_step", "implicit"}

    Returns
    -------
    SolveReport

    Raises
    ------
    CapabilityError
        When the base problem has a non-identity g.
    InnerLoopError
        When the subproblem or the implicit fixed point stalls.
    """
    if mode not in ("two_step", "implicit"):
        raise ValueError("mode must be 'two_step' or 'implicit'")
    base = problem.base
    if base.g is not None:
        raise CapabilityError("the built-in subproblem solver needs g = identity")
    config = SolveConfig() if config is None else config
    rho = resolve_rho(base, config)
    u = default_start(base) if u0 is None else np.atleast_1d(np.asarray(u0, dtype=float)).copy()

    star = None
    if base.known_solution is not None:
        star = np.asarray(base.known_solution, dtype=float)

    def lyap(pt):
        return float(np.linalg.norm(star - pt)) ** 2 if star is not None else None

    trace = [TraceRecord(float(np.linalg.norm(u)), np.inf, lyapunov=lyap(u))]
    iters = 0
    disp = np.inf
    while disp > config.tol and iters < config.max_iters:
        if mode == "two_step":
            y = _power_subproblem(problem, u, u, rho, config)
            u_next = _power_subproblem(problem, y, y, rho, config)
        else:
            w = u.copy()
            inner = 0
            while True:
                w_next = _power_subproblem(problem, w, u, rho, config)
                inner += 1
                if float(np.linalg.norm(w_next - w)) <= config.inner_tol:
                    w = w_next
                    break
                w = w_next
                if inner >= config.inner_max_iters:
                    raise InnerLoopError("higher-order implicit step")
            u_next = w
        check_divergence(u_next)
        step_sq = float(np.linalg.norm(u_next - u)) ** 2
        disp = np.sqrt(step_sq)
        u = u_next
        iters += 1
        trace.append(
            TraceRecord(float(np.linalg.norm(u)), disp, lyapunov=lyap(u), info={"step_sq": step_sq})
        )
    details = {"algorithm": "higher-order", "mode": mode, "rho": rho, "p": problem.p, "nu": problem.nu}
    return _displacement_report(u, iters, disp, config.tol, trace, details)
