"""Problem model, residual maps, and diagnostics shared by every solver.

The central object is :class:`GviProblem`: find u with g(u) in K such that

    <T(u), g(v) - g(u)> >= 0   for all v with g(v) in K,

optionally with a second operator A entering as T(u) - A(u).  Solvers
consume a :class:`SolveConfig` and produce a :class:`SolveReport`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import CapabilityError, DivergenceError, NumericDomainError, UnsupportedSetError
from .sets import ConvexSet, NonnegOrthant, project

_DIVERGENCE_LIMIT = 1e12


@dataclass
class GviProblem:
    """A general variational inequality over a structured convex set.

    Parameters
    ----------
    dim : int
        Ambient dimension.
    T : callable
        Operator mapping an n-vector to an n-vector.
    K : ConvexSet
        Constraint set for the g-image.
    g : callable, optional
        Point map; None means the identity.
    g_inverse : callable, optional
        Inverse of g, required by algorithms that update in g-image space.
        Checked against g on a probe set at construction.
    A : callable, optional
        Second operator; the effective operator is T(u) - A(u).
    known_solution : ndarray, optional
        Reference solution when available, used by diagnostics.
    """

    dim: int
    T: Callable[[np.ndarray], np.ndarray]
    K: ConvexSet
    g: Optional[Callable[[np.ndarray], np.ndarray]] = None
    g_inverse: Optional[Callable[[np.ndarray], np.ndarray]] = None
    A: Optional[Callable[[np.ndarray], np.ndarray]] = None
    known_solution: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.known_solution is not None:
            self.known_solution = np.asarray(self.known_solution, dtype=float)
        if self.g_inverse is not None:
            self._check_g_inverse()

    def _check_g_inverse(self):
        # Probe g_inverse(g(u)) = u on a small deterministic set.
        rng = np.random.default_rng(0)
        probes = [np.zeros(self.dim), np.ones(self.dim)]
        probes += [rng.standard_normal(self.dim) for _ in range(3)]
        for u in probes:
            back = np.asarray(self.g_inverse(self.g(u)), dtype=float)
            if not np.allclose(back, u, rtol=0.0, atol=1e-10):
                raise ValueError("g_inverse(g(u)) deviates from u beyond 1e-10 on probe set")


def eval_operator(problem, name, u):
    """Evaluate one of the problem's maps with a finiteness check.

    Parameters
    ----------
    problem : GviProblem
    name : str
        One of ``"T"``, ``"g"``, ``"A"``, ``"g_inverse"``.
    u : ndarray

    Returns
    -------
    ndarray

    Raises
    ------
    NumericDomainError
        If the map returns non-finite values.
    """
    fn = getattr(problem, name)
    if name == "g" and fn is None:
        return np.asarray(u, dtype=float)
    if name == "A" and fn is None:
        return np.zeros(problem.dim)
    if name == "g_inverse" and fn is None:
        if problem.g is None:
            return np.asarray(u, dtype=float)
        raise CapabilityError("g_inverse required but not supplied")
    out = np.atleast_1d(np.asarray(fn(u), dtype=float))
    if not np.all(np.isfinite(out)):
        raise NumericDomainError(name)
    return out


def effective_T(problem, u):
    """T(u) - A(u), the operator actually driving every residual and step."""
    t = eval_operator(problem, "T", u)
    if problem.A is None:
        return t
    return t - eval_operator(problem, "A", u)


def g_value(problem, u):
    """g(u), defaulting to u itself when no g is supplied."""
    return eval_operator(problem, "g", u)


def recover_iterate(problem, point, new_g_value):
    """Recover an iterate whose g-value should equal ``new_g_value``.

    Uses g_inverse when supplied, otherwise the fixed-point device
    ``point - g(point) + new_g_value`` (exact when g is the identity).

    Parameters
    ----------
    problem : GviProblem
    point : ndarray
        Reference iterate at which the device is applied.
    new_g_value : ndarray
        Target value in g-image space.

    Returns
    -------
    ndarray
    """
    if problem.g is None:
        return np.asarray(new_g_value, dtype=float)
    if problem.g_inverse is not None:
        return eval_operator(problem, "g_inverse", new_g_value)
    return point - g_value(problem, point) + new_g_value


@dataclass
class SolveConfig:
    """Algorithm parameters shared by all solvers.

    Parameters
    ----------
    rho : float, optional
        Step scalar; None selects 0.5 / (estimated Lipschitz constant of T).
    tol : float
        Residual-norm stopping threshold.
    max_iters : int
        Outer iteration cap.
    lam, xi : float
        Two-step scheme weights in [0, 1].
    h : float
        Time step for the dynamical-system schemes.
    mu_step, beta_step : float, optional
        First and second projection steps of the three-step scheme;
        None means "use rho".
    sigma : float
        Armijo sufficient-decrease constant.
    gamma : float
        Armijo backtracking ratio.
    alpha : float
        Sufficient-decrease constant for the gap-descent line search.
    inner_tol : float
        Tolerance for inner fixed-point loops of implicit schemes.
    inner_max_iters : int
        Cap for inner fixed-point loops.
    alpha_schedule : float or callable, optional
        Per-iteration blending weight alpha_n (constant or n -> alpha_n);
        None selects the solver's default.
    step_denominator_squared : bool
        Double-projection step length uses ||d||^2 (True, default) or
        ||d|| (False) in the denominator.
    """

    rho: Optional[float] = None
    tol: float = 1e-7
    max_iters: int = 1000
    lam: float = 0.5
    xi: float = 0.5
    h: float = 1.0
    mu_step: Optional[float] = None
    beta_step: Optional[float] = None
    sigma: float = 0.5
    gamma: float = 0.8
    alpha: float = 0.3
    inner_tol: float = 1e-10
    inner_max_iters: int = 10000
    alpha_schedule: object = None
    step_denominator_squared: bool = True

    def __post_init__(self):
        if self.rho is not None and not self.rho > 0:
            raise ValueError("rho must be positive")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not 0 <= self.lam <= 1 or not 0 <= self.xi <= 1:
            raise ValueError("lam and xi must lie in [0, 1]")
        if not self.h > 0:
            raise ValueError("h must be positive")
        if not 0 < self.sigma < 1:
            raise ValueError("sigma must lie in (0, 1)")
        if not 0 < self.gamma < 1:
            raise ValueError("gamma must lie in (0, 1)")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if self.mu_step is not None and self.mu_step < 0:
            raise ValueError("mu_step must be nonnegative")
        if self.beta_step is not None and self.beta_step < 0:
            raise ValueError("beta_step must be nonnegative")

    def alpha_at(self, n, default=1.0):
        """Resolve the blending weight alpha_n for iteration n."""
        rule = self.alpha_schedule
        if rule is None:
            return default
        if callable(rule):
            return float(rule(n))
        return float(rule)


@dataclass
class TraceRecord:
    """One per-iteration trace entry."""

    iterate_norm: float
    residual_norm: float
    lyapunov: Optional[float] = None
    info: Optional[dict] = None


@dataclass
class SolveReport:
    """Outcome of a solver run.

    Attributes
    ----------
    solution : ndarray
        Final iterate.
    iterations : int
        Number of update steps performed.
    residual_norm : float
        Stopping-quantity norm at the final iterate.
    converged : bool
        Whether the stopping threshold was met.
    trace : list of TraceRecord
        One record per iterate including the start (length iterations + 1).
    details : dict
        Solver-specific annotations (step choices, fallbacks, ...).
    """

    solution: np.ndarray
    iterations: int
    residual_norm: float
    converged: bool
    trace: list = field(default_factory=list)
    details: dict = field(default_factory=dict)


def residual(problem, u, rho):
    """Projection residual R(u) = g(u) - P_K[g(u) - rho*(T(u) - A(u))].

    Zero exactly at solutions of the variational inequality.

    Parameters
    ----------
    problem : GviProblem
    u : array_like
    rho : float
        Positive step scalar.

    Returns
    -------
    ndarray
    """
    if not rho > 0:
        raise ValueError("rho must be positive")
    u = np.atleast_1d(np.asarray(u, dtype=float))
    gu = g_value(problem, u)
    return gu - project(problem.K, gu - rho * effective_T(problem, u))


def is_solution(problem, u, rho, tol=1e-7):
    """True iff the Euclidean residual norm is at most tol."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    return float(np.linalg.norm(residual(problem, u, rho))) <= tol


@dataclass
class ComplementarityGap:
    """Violations of the cone complementarity system."""

    primal_violation: float
    dual_violation: float
    pairing: float


def complementarity_gap(problem, u):
    """Complementarity diagnostics for cone constraints.

    Requires K to be the nonnegative orthant.  A point solves the
    complementarity system iff all three returned quantities vanish:
    g(u) >= 0, T(u) >= 0, and <T(u), g(u)> = 0.

    Parameters
    ----------
    problem : GviProblem
    u : array_like

    Returns
    -------
    ComplementarityGap
        primal_violation = ||min(g(u), 0)||_inf,
        dual_violation = ||min(T(u), 0)||_inf,
        pairing = <T(u), g(u)>.
    """
    if not isinstance(problem.K, NonnegOrthant):
        raise UnsupportedSetError("complementarity_gap requires a cone (NonnegOrthant) constraint")
    u = np.atleast_1d(np.asarray(u, dtype=float))
    gu = g_value(problem, u)
    tu = effective_T(problem, u)
    primal = float(np.linalg.norm(np.minimum(gu, 0.0), ord=np.inf))
    dual = float(np.linalg.norm(np.minimum(tu, 0.0), ord=np.inf))
    return ComplementarityGap(primal, dual, float(tu @ gu))


def quasi_to_general(m, K, T, dim):
    """Reduce a quasi variational inequality with K(u) = m(u) + K.

    Parameters
    ----------
    m : callable
        Point-to-point mapping defining the moving set.
    K : ConvexSet
        Fixed convex core of the moving set.
    T : callable
        Operator of the quasi variational inequality.
    dim : int

    Returns
    -------
    GviProblem
        Problem with g(u) = u - m(u); its solutions solve the quasi
        variational inequality.
    """

    def g(u):
        return np.asarray(u, dtype=float) - np.asarray(m(u), dtype=float)

    return GviProblem(dim=dim, T=T, K=K, g=g)


def wiener_hopf_residual(problem, z, rho):
    """Residual of the equation rho*T(g_inverse(P_K z)) + z - P_K z.

    Parameters
    ----------
    problem : GviProblem
        Must have g = identity or supply g_inverse.
    z : array_like
    rho : float

    Returns
    -------
    ndarray
    """
    if not rho > 0:
        raise ValueError("rho must be positive")
    z = np.atleast_1d(np.asarray(z, dtype=float))
    pz = project(problem.K, z)
    u = eval_operator(problem, "g_inverse", pz)
    return rho * effective_T(problem, u) + z - pz


def estimate_lipschitz(problem, trials=20, seed=0, eps=1e-4):
    """Estimate the Lipschitz constant of the effective operator.

    Samples finite differences at projected random base points.

    Parameters
    ----------
    problem : GviProblem
    trials : int
    seed : int
    eps : float

    Returns
    -------
    float
        Max sampled ||T(x + eps*d) - T(x)|| / eps over unit directions d.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        x = project(problem.K, rng.standard_normal(problem.dim))
        d = rng.standard_normal(problem.dim)
        d /= max(np.linalg.norm(d), 1e-30)
        diff = effective_T(problem, x + eps * d) - effective_T(problem, x)
        worst = max(worst, float(np.linalg.norm(diff)) / eps)
    return worst


def default_rho(problem, seed=0):
    """Default step scalar 0.5 / (estimated Lipschitz constant of T)."""
    lip = estimate_lipschitz(problem, seed=seed)
    if lip <= 1e-12:
        return 1.0
    return 0.5 / lip


def resolve_rho(problem, config):
    """Config rho if given, else the problem's default."""
    if config.rho is not None:
        return config.rho
    return default_rho(problem)


def default_start(problem):
    """Feasible default start: the projection of the origin onto K."""
    return project(problem.K, np.zeros(problem.dim))


def check_divergence(u):
    """Raise when an iterate leaves the trust region of the solvers."""
    if not np.all(np.isfinite(u)):
        raise NumericDomainError("iterate")
    if float(np.linalg.norm(u)) > _DIVERGENCE_LIMIT:
        raise DivergenceError(u)
