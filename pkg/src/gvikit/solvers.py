"""Projection fixed-point solvers and dynamical-system discretizations.

All methods iterate on the fixed-point characterization
g(u) = P_K[g(u) - rho*T(u)] of the variational inequality, differing in
where the operator is evaluated and how implicitly the step is taken.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    SolveConfig,
    SolveReport,
    TraceRecord,
    check_divergence,
    default_start,
    effective_T,
    eval_operator,
    g_value,
    recover_iterate,
    residual,
    resolve_rho,
)
from .errors import CapabilityError, InnerLoopError
from .sets import project

FORWARD_T = "ForwardT"
FULL_IMPLICIT = "FullImplicit"
EXPLICIT_T = "ExplicitT"
_VARIANTS = (FORWARD_T, FULL_IMPLICIT, EXPLICIT_T)


@dataclass(frozen=True)
class TwoStepScheme:
    """Weights of the unified two-step scheme.

    lam blends the predictor into the projection argument's g-part,
    xi blends it into the operator evaluation point.  (0, 0) recovers
    the plain projection method; (1/2, 1/2) the midpoint scheme.
    """

    lam: float = 0.5
    xi: float = 0.5

    def __post_init__(self):
        if not 0 <= self.lam <= 1 or not 0 <= self.xi <= 1:
            raise ValueError("scheme weights must lie in [0, 1]")


@dataclass(frozen=True)
class DynamicalVariant:
    """Discretization variant of the projected dynamical system.

    tag is one of "ForwardT" (implicit operator, damped update),
    "FullImplicit" (implicit operator and projection argument), or
    "ExplicitT" (explicit operator with time-step-scaled projection).
    """

    tag: str = FORWARD_T
    h: float = 1.0

    def __post_init__(self):
        if self.tag not in _VARIANTS:
            raise ValueError(f"tag must be one of {_VARIANTS}")
        if not self.h > 0:
            raise ValueError("h must be positive")


def _prepare(problem, config, u0):
    config = SolveConfig() if config is None else config
    rho = resolve_rho(problem, config)
    if u0 is None:
        u = default_start(problem)
    else:
        u = np.atleast_1d(np.asarray(u0, dtype=float)).copy()
    return config, rho, u


def _lyapunov(problem, u):
    if problem.known_solution is None:
        return None
    gap = g_value(problem, problem.known_solution) - g_value(problem, u)
    return float(gap @ gap)


def _run_fixed_point(problem, config, u0, step, details=None, with_lyapunov=False):
    # Shared outer loop: stop on ||R(u)|| <= tol or the iteration cap.
    # step returns the next iterate, optionally with a per-step info dict.
    config, rho, u = _prepare(problem, config, u0)
    rnorm = float(np.linalg.norm(residual(problem, u, rho)))
    lyap = _lyapunov(problem, u) if with_lyapunov else None
    trace = [TraceRecord(float(np.linalg.norm(u)), rnorm, lyapunov=lyap)]
    iters = 0
    while rnorm > config.tol and iters < config.max_iters:
        out = step(u, rho, config)
        u, info = out if isinstance(out, tuple) else (out, None)
        check_divergence(u)
        iters += 1
        rnorm = float(np.linalg.norm(residual(problem, u, rho)))
        lyap = _lyapunov(problem, u) if with_lyapunov else None
        trace.append(TraceRecord(float(np.linalg.norm(u)), rnorm, lyapunov=lyap, info=info))
    return SolveReport(
        solution=u,
        iterations=iters,
        residual_norm=rnorm,
        converged=bool(rnorm <= config.tol),
        trace=trace,
        details=dict(details or {}, rho=rho),
    )


def solve_projection(problem, config=None, u0=None):
    """Fixed-point projection iteration.

    Updates u <- u - g(u) + P_K[g(u) - rho*T(u)] until the residual norm
    drops below tol or the iteration cap is reached.

    Parameters
    ----------
    problem : GviProblem
    config : SolveConfig, optional
    u0 : array_like, optional
        Start point; defaults to the projection of the origin onto K.

    Returns
    -------
    SolveReport
    """

    def step(u, rho, cfg):
        gu = g_value(problem, u)
        return u - gu + project(problem.K, gu - rho * effective_T(problem, u))

    return _run_fixed_point(problem, config, u0, step, details={"algorithm": "projection"})


def solve_extragradient(problem, config=None, u0=None):
    """Extragradient iteration: predictor projection, corrector at the predictor.

    Requires g to be the identity or g_inverse to be supplied, since the
    corrector evaluates the operator at the g-preimage of the predictor.

    Parameters
    ----------
    problem : GviProblem
    config : SolveConfig, optional
    u0 : array_like, optional

    Returns
    -------
    SolveReport
    """
    if problem.g is not None and problem.g_inverse is None:
        raise CapabilityError("extragradient needs g_inverse for non-identity g")

    def step(u, rho, cfg):
        gu = g_value(problem, u)
        py = project(problem.K, gu - rho * effective_T(problem, u))
        y = eval_operator(problem, "g_inverse", py)
        return u - gu + project(problem.K, gu - rho * effective_T(problem, y))

    return _run_fixed_point(problem, config, u0, step, details={"algorithm": "extragradient"})


def solve_two_step(problem, config=None, u0=None, scheme=None):
    """Unified two-step predictor-corrector scheme.

    Predictor: g(y) = P_K[g(u) - rho*T(u)] (iterate recovered via the
    u - g(u) + . device).  Corrector:
    w = P_K[(1-lam)*g(u) + lam*g(y) - rho*T((1-xi)*u + xi*y)],
    u+ = u - g(u) + w.  Averages act on g-values and evaluation points,
    which matches the classical midpoint schemes exactly for linear g.

    Parameters
    ----------
    problem : GviProblem
    config : SolveConfig, optional
    u0 : array_like, optional
    scheme : TwoStepScheme, optional
        Defaults to the (lam, xi) fields of the config.

    Returns
    -------
    SolveReport
    """
    cfg0 = SolveConfig() if config is None else config
    sch = TwoStepScheme(cfg0.lam, cfg0.xi) if scheme is None else scheme

    def step(u, rho, cfg):
        gu = g_value(problem, u)
        py = project(problem.K, gu - rho * effective_T(problem, u))
        y = recover_iterate(problem, u, py)
        gy = g_value(problem, y)
        mid = (1.0 - sch.xi) * u + sch.xi * y
        w = project(
            problem.K,
            (1.0 - sch.lam) * gu + sch.lam * gy - rho * effective_T(problem, mid),
        )
        return u - gu + w

    details = {"algorithm": "two-step", "lam": sch.lam, "xi": sch.xi}
    return _run_fixed_point(problem, config, u0, step, details=details)


def solve_dynamical(problem, config=None, u0=None, variant=None):
    """Discretized projected dynamical system with an implicit operator.

    Each outer step solves its update relation in g-image space:

    - ForwardT: w solves w = (h*P_K[g(u_n) - rho*T(u(w))] + g(u_n))/(1+h),
      the damped map of the forward-difference discretization, by inner
      fixed-point iteration (u(w) recovered via g_inverse or the
      u - g(u) + . device).
    - FullImplicit: w solves w = (h*P_K[w - rho*T(u(w))] + g(u_n))/(1+h);
      the inner map contracts with factor h/(1+h) in its first argument.
    - ExplicitT: explicit update w = P_K[g(u_n) - (rho*h/(1+h))*T(u_n)],
      the variational form of the explicit discretization (the raw
      printed fixed-point relation is not stationary at solutions, so the
      equivalent inequality form is taken as normative).

    Parameters
    ----------
    problem : GviProblem
    config : SolveConfig, optional
    u0 : array_like, optional
    variant : DynamicalVariant or str, optional
        Defaults to ForwardT with the config's h.

    Returns
    -------
    SolveReport

    Raises
    ------
    InnerLoopError
        When an inner fixed-point loop exceeds inner_max_iters.
    """
    cfg0 = SolveConfig() if config is None else config
    if variant is None:
        variant = DynamicalVariant(FORWARD_T, cfg0.h)
    elif isinstance(variant, str):
        variant = DynamicalVariant(variant, cfg0.h)
    h = variant.h
    damp = h / (1.0 + h)

    def inner_solve(u, rho, cfg, implicit_projection_arg):
        gu = g_value(problem, u)
        w = gu.copy()
        for _ in range(cfg.inner_max_iters):
            point = recover_iterate(problem, u, w)
            arg = w if implicit_projection_arg else gu
            w_next = (h * project(problem.K, arg - rho * effective_T(problem, point)) + gu) / (1.0 + h)
            delta = float(np.linalg.norm(w_next - w))
            w = w_next
            if delta <= cfg.inner_tol:
                return recover_iterate(problem, u, w)
        raise InnerLoopError(variant.tag)

    def step(u, rho, cfg):
        if variant.tag == FORWARD_T:
            u_next = inner_solve(u, rho, cfg, implicit_projection_arg=False)
        elif variant.tag == FULL_IMPLICIT:
            u_next = inner_solve(u, rho, cfg, implicit_projection_arg=True)
        else:
            gu = g_value(problem, u)
            w = project(problem.K, gu - rho * damp * effective_T(problem, u))
            u_next = recover_iterate(problem, u, w)
        step_g = g_value(problem, u_next) - g_value(problem, u)
        return u_next, {"step_gsq": float(step_g @ step_g)}

    details = {"algorithm": "dynamical", "variant": variant.tag, "h": h}
    return _run_fixed_point(problem, config, u0, step, details=details, with_lyapunov=True)
