"""Predictor-corrector solvers built on the projection residual.

Contains the blended predictor-corrector iteration and the two
double-projection methods with Armijo line search, including the
hyperplane-corrected variant that projects onto the intersection of K
with the separating hyperplane found by the search.
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
    g_value,
    recover_iterate,
    residual,
    resolve_rho,
)
from .errors import InfeasibleSetError, LineSearchError
from .sets import project, project_intersection

_MAX_ARMIJO_POWER = 64


@dataclass(frozen=True)
class ArmijoResult:
    """Outcome of the backtracking line search along the residual."""

    m: int
    eta: float
    trial_point: np.ndarray


@dataclass(frozen=True)
class StepData:
    """Search direction and step length of one double-projection iteration.

    d is built exactly as -(eta*R(u) - eta*T(u) + T(y)); z and y are the
    predictor point and the line-search point.
    """

    d: np.ndarray
    alpha: float
    z: np.ndarray
    y: np.ndarray


def armijo_search(problem, u, R_u, gamma, sigma):
    """Find the smallest m >= 0 with ⟨T(u) - T(u - γ^m R), R⟩ ≤ σ‖R‖².

    Parameters
    ----------
    problem : GviProblem
    u : ndarray
        Current iterate.
    R_u : ndarray
        Residual at u; must be nonzero.
    gamma, sigma : float
        Backtracking ratio and sufficient-decrease scalar, both in (0, 1).

    Returns
    -------
    ArmijoResult
        With eta = gamma**m and trial_point = u - eta*R_u.

    Raises
    ------
    LineSearchError
        If no m ≤ 64 satisfies the inequality (signals wrong scaling).
    """
    if not 0 < gamma < 1 or not 0 < sigma < 1:
        raise ValueError("gamma and sigma must lie in (0, 1)")
    rsq = float(R_u @ R_u)
    if rsq == 0.0:
        raise ValueError("R_u must be nonzero")
    Tu = effective_T(problem, u)
    eta = 1.0
    for m in range(_MAX_ARMIJO_POWER + 1):
        trial = u - eta * R_u
        if float((Tu - effective_T(problem, trial)) @ R_u) <= sigma * rsq:
            return ArmijoResult(m=m, eta=eta, trial_point=trial)
        eta *= gamma
    raise LineSearchError("no step within 64 backtracking halvings; check operator scaling")


def _search_step(problem, u, gu, R, config):
    # Predictor, line search, direction, and step length shared by both
    # double-projection correctors.  rho = 1 is fixed inside the predictor.
    gz = gu - R
    z = recover_iterate(problem, u, gz)
    search = armijo_search(problem, u, R, config.gamma, config.sigma)
    eta = search.eta
    y = recover_iterate(problem, u, gu - eta * R)
    Tu = effective_T(problem, u)
    Ty = effective_T(problem, y)
    d = -(eta * R - eta * Tu + Ty)
    c = eta * float(R @ (R - Tu + Ty))
    dsq = float(d @ d)
    if dsq == 0.0:
        alpha = 0.0
    elif config.step_denominator_squared:
        alpha = c / dsq
    else:
        alpha = c / np.sqrt(dsq)
    return StepData(d=d, alpha=alpha, z=z, y=y), c, search


def _solve_double_projection(problem, config, u0, optimal):
    config = SolveConfig() if config is None else config
    u = default_start(problem) if u0 is None else np.atleast_1d(np.asarray(u0, dtype=float)).copy()
    gu = g_value(problem, u)
    R = gu - project(problem.K, gu - effective_T(problem, u))
    rnorm = float(np.linalg.norm(R))
    trace = [TraceRecord(float(np.linalg.norm(u)), rnorm)]
    iters = 0
    while rnorm > config.tol and iters < config.max_iters:
        step, c, search = _search_step(problem, u, gu, R, config)
        info = {"m": search.m, "eta": search.eta, "c": c, "alpha": step.alpha}
        moved = gu + step.alpha * step.d
        if optimal and float(step.d @ step.d) > 0.0:
            try:
                g_next = project_intersection(
                    problem.K, step.d, c + float(gu @ step.d), moved
                )
            except InfeasibleSetError:
                info["fallback"] = "basic"
                g_next = project(problem.K, moved)
        else:
            g_next = project(problem.K, moved)
        info["d"] = step.d.copy()
        info["step_g"] = g_next - gu
        u = recover_iterate(problem, u, g_next)
        check_divergence(u)
        iters += 1
        gu = g_value(problem, u)
        R = gu - project(problem.K, gu - effective_T(problem, u))
        rnorm = float(np.linalg.norm(R))
        trace.append(TraceRecord(float(np.linalg.norm(u)), rnorm, info=info))
    details = {
        "algorithm": "dp-optimal" if optimal else "dp-basic",
        "rho": 1.0,
        "step_denominator": "norm_squared" if config.step_denominator_squared else "norm",
    }
    return SolveReport(
        solution=u,
        iterations=iters,
        residual_norm=rnorm,
        converged=bool(rnorm <= config.tol),
        trace=trace,
        details=details,
    )


def solve_double_projection_basic(problem, config=None, u0=None):
    """Double-projection method with Armijo search and projected corrector.

    Per iteration (rho = 1 fixed inside the predictor):
    z = P_K[g(u) - T(u)], R = g(u) - g(z), Armijo gives eta,
    g(y) = (1-eta)*g(u) + eta*g(z), d = -(eta*R - eta*T(u) + T(y)),
    alpha = eta*⟨R, R - T(u) + T(y)⟩ / ‖d‖², g(u+) = P_K[g(u) + alpha*d].
    Stops on ‖R(u)‖ ≤ tol; hitting the iteration cap yields a
    non-converged report rather than an error.

    Parameters
    ----------
    problem : GviProblem
    config : SolveConfig, optional
        The step_denominator_squared flag switches the alpha denominator
        between ‖d‖² (default) and ‖d‖; the choice is recorded in the
        report details.
    u0 : array_like, optional

    Returns
    -------
    SolveReport
    """
    return _solve_double_projection(problem, config, u0, optimal=False)


def solve_double_projection_optimal(problem, config=None, u0=None):
    """Double-projection method correcting onto K intersected with a hyperplane.

    Identical predictor, line search, and direction as the basic method;
    the corrector projects g(u) + alpha*d onto K ∩ H where H is the
    hyperplane {w : ⟨w - g(u), d⟩ = eta*⟨R, R - T(u) + T(y)⟩}.  When the
    intersection is infeasible the basic corrector is used for that
    iteration and the fallback is recorded in the trace.

    Parameters
    ----------
    problem : GviProblem
    config : SolveConfig, optional
    u0 : array_like, optional

    Returns
    -------
    SolveReport
    """
    return _solve_double_projection(problem, config, u0, optimal=True)


def solve_whe(problem, config=None, u0=None):
    """Blended predictor-corrector iteration on the projection equation.

    Predictor: g(y) = P_K[g(u) - rho*T(u)].  Corrector g-value:
    w = P_K[g(y) - rho*T(y) + g(y) - (g(u) - rho*T(u))].  The new
    g-image is the blend (1 - a_n)*g(u) + a_n*w with a_n from the
    alpha_schedule (default 1, the pure corrector).  Stops on
    ‖R(u)‖ ≤ tol.

    Parameters
    ----------
    problem : GviProblem
    config : SolveConfig, optional
        alpha_schedule values must lie in (0, 1].
    u0 : array_like, optional

    Returns
    -------
    SolveReport
    """
    config = SolveConfig() if config is None else config
    rho = resolve_rho(problem, config)
    u = default_start(problem) if u0 is None else np.atleast_1d(np.asarray(u0, dtype=float)).copy()
    rnorm = float(np.linalg.norm(residual(problem, u, rho)))
    trace = [TraceRecord(float(np.linalg.norm(u)), rnorm)]
    iters = 0
    while rnorm > config.tol and iters < config.max_iters:
        a_n = config.alpha_at(iters, default=1.0)
        if not 0.0 < a_n <= 1.0:
            raise ValueError("alpha_schedule values must lie in (0, 1]")
        gu = g_value(problem, u)
        shifted = gu - rho * effective_T(problem, u)
        gy = project(problem.K, shifted)
        y = recover_iterate(problem, u, gy)
        w = project(problem.K, gy - rho * effective_T(problem, y) + gy - shifted)
        u = recover_iterate(problem, u, (1.0 - a_n) * gu + a_n * w)
        check_divergence(u)
        iters += 1
        rnorm = float(np.linalg.norm(residual(problem, u, rho)))
        trace.append(TraceRecord(float(np.linalg.norm(u)), rnorm, info={"alpha_n": a_n}))
    return SolveReport(
        solution=u,
        iterations=iters,
        residual_norm=rnorm,
        converged=bool(rnorm <= config.tol),
        trace=trace,
        details={"algorithm": "whe", "rho": rho},
    )
