"""Sampling-based certification of convexity-type function classes.

Each check turns one definitional inequality into an executable sweep
over sampled point pairs and a t-grid, reporting the worst violation
and the triple that achieved it.  Verdicts are always "no violation
found on the sampled domain", never a proof: the definitions quantify
over continua.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np
from scipy.special import erf

_BASE_TOL = 1e-9
_FD_STEP = 1e-6


def default_t_grid():
    """Default blend grid {0, 0.1, ..., 1} with 0.5 included exactly."""
    return np.unique(np.concatenate([np.linspace(0.0, 1.0, 11), [0.5]]))


@dataclass(frozen=True)
class FunctionUnderTest:
    """A scalar function together with everything its checks need.

    F maps g-image points to scalars; grad_F, when given, is its
    gradient at g-image points.  domain_sampler(rng) yields points whose
    g-images lie in the intended convex set.  p and mu parameterize the
    strengthening term of the target class.
    """

    F: Callable
    domain_sampler: Callable
    grad_F: Optional[Callable] = None
    g: Optional[Callable] = None
    p: float = 2.0
    mu: float = 0.0

    def __post_init__(self):
        if not self.p > 1:
            raise ValueError("p must exceed 1")
        if self.mu < 0:
            raise ValueError("mu must be nonnegative")

    def g_image(self, u):
        u = np.atleast_1d(np.asarray(u, dtype=float))
        return u if self.g is None else np.atleast_1d(np.asarray(self.g(u), dtype=float))

    def value(self, y):
        return float(self.F(y))

    def gradient(self, y):
        if self.grad_F is not None:
            return np.atleast_1d(np.asarray(self.grad_F(y), dtype=float))
        y = np.asarray(y, dtype=float)
        out = np.empty(y.size)
        for k in range(y.size):
            step = np.zeros(y.size)
            step[k] = _FD_STEP
            out[k] = (self.value(y + step) - self.value(y - step)) / (2.0 * _FD_STEP)
        return out


@dataclass(frozen=True)
class CertReport:
    """Outcome of one sampled certification sweep.

    worst_violation is the largest LHS - RHS of the target inequality
    over all checked triples, witness the (u, v, t) triple achieving it,
    and verdict "pass" when the worst violation stays within the
    value-scale-normalized tolerance.  details carries check-specific
    extras (per-leg violations, fitted moduli).
    """

    checked_count: int
    worst_violation: float
    witness: tuple
    verdict: str
    details: Optional[dict] = None

    @property
    def passed(self):
        return self.verdict == "pass"


def _tolerance(scale):
    return _BASE_TOL * max(1.0, scale)


def _sweep(fut, samples, t_grid, seed, violation_fn):
    """Shared driver: track the worst violation and the value scale."""
    rng = np.random.default_rng(seed)
    t_grid = default_t_grid() if t_grid is None else np.asarray(t_grid, dtype=float)
    worst = -np.inf
    witness = None
    scale = 0.0
    count = 0
    for _ in range(samples):
        u = fut.domain_sampler(rng)
        v = fut.domain_sampler(rng)
        for t in t_grid:
            viol, this_scale = violation_fn(u, v, float(t))
            count += 1
            scale = max(scale, this_scale)
            if viol > worst:
                worst, witness = viol, (u, v, float(t))
    verdict = "pass" if worst <= _tolerance(scale) else "fail"
    return count, worst, witness, verdict, scale


def hos_convex_violation(fut, u, v, t):
    """LHS - RHS of the higher order strong convexity inequality."""
    yu, yv = fut.g_image(u), fut.g_image(v)
    mid = yu + t * (yv - yu)
    gap = float(np.linalg.norm(yv - yu))
    bound = (1.0 - t) * fut.value(yu) + t * fut.value(yv) - fut.mu * (
        t**fut.p * (1.0 - t) + t * (1.0 - t) ** fut.p
    ) * gap**fut.p
    return fut.value(mid) - bound


def check_hos_convex(fut, samples=200, t_grid=None, seed=0):
    """Sweep the higher order strong convexity inequality.

    F(g(u)+t(g(v)-g(u))) <= (1-t)F(g(u)) + tF(g(v))
                            - mu{t^p(1-t)+t(1-t)^p}||g(v)-g(u)||^p
    over sampled pairs and the t-grid.

    Parameters
    ----------
    fut : FunctionUnderTest
    samples : int
    t_grid : array_like, optional
    seed : int

    Returns
    -------
    CertReport
    """

    def violation(u, v, t):
        yu, yv = fut.g_image(u), fut.g_image(v)
        scale = max(abs(fut.value(yu)), abs(fut.value(yv)))
        return hos_convex_violation(fut, u, v, t), scale

    count, worst, witness, verdict, _ = _sweep(fut, samples, t_grid, seed, violation)
    return CertReport(count, worst, witness, verdict)


def gradient_char_violation(fut, u, v):
    """Worst of the first-order and monotonicity violations at a pair."""
    yu, yv = fut.g_image(u), fut.g_image(v)
    gap = float(np.linalg.norm(yv - yu))
    gu_grad = fut.gradient(yu)
    lower = fut.value(yu) + float(gu_grad @ (yv - yu)) + fut.mu * gap**fut.p - fut.value(yv)
    mono = 2.0 * fut.mu * gap**fut.p - float((gu_grad - fut.gradient(yv)) @ (yu - yv))
    return max(lower, mono)


def check_gradient_char(fut, samples=200, seed=0):
    """Sweep the two differential characterizations of the class.

    First order: F(g(v)) >= F(g(u)) + <F'(g(u)), g(v)-g(u)>
                 + mu||g(v)-g(u)||^p;
    monotonicity: <F'(g(u))-F'(g(v)), g(u)-g(v)> >= 2mu||g(v)-g(u)||^p.
    The gradient falls back to central differences when absent.

    Parameters
    ----------
    fut : FunctionUnderTest
    samples : int
    seed : int

    Returns
    -------
    CertReport
    """
    rng = np.random.default_rng(seed)
    worst = -np.inf
    witness = None
    scale = 0.0
    for _ in range(samples):
        u = fut.domain_sampler(rng)
        v = fut.domain_sampler(rng)
        yu, yv = fut.g_image(u), fut.g_image(v)
        scale = max(scale, abs(fut.value(yu)), abs(fut.value(yv)))
        viol = gradient_char_violation(fut, u, v)
        if viol > worst:
            worst, witness = viol, (u, v, None)
    verdict = "pass" if worst <= _tolerance(scale) else "fail"
    return CertReport(samples, worst, witness, verdict)


def parallelogram_violation(p, mu, u, v):
    """Signed lower-law violation ||u+v||^p + mu||v-u||^p - 2^{p-1}(...)."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    v = np.atleast_1d(np.asarray(v, dtype=float))
    lhs = float(np.linalg.norm(u + v)) ** p + mu * float(np.linalg.norm(v - u)) ** p
    rhs = 2.0 ** (p - 1.0) * (float(np.linalg.norm(u)) ** p + float(np.linalg.norm(v)) ** p)
    return lhs - rhs


def check_parallelogram(p, mu, samples=500, dim=3, seed=0):
    """Sweep the p-th power parallelogram laws on random vector pairs.

    worst_violation is the signed lower-law excess at the given mu;
    details report the largest modulus for which the lower law held on
    the samples (mu_lower), the smallest for the upper law (mu_upper),
    and the absolute two-sided deviation at the given mu
    (equality_violation), which vanishes classically for p = 2, mu = 1.

    Parameters
    ----------
    p : float
    mu : float
    samples : int
    dim : int
    seed : int

    Returns
    -------
    CertReport
    """
    if not p > 1:
        raise ValueError("p must exceed 1")
    rng = np.random.default_rng(seed)
    worst = -np.inf
    witness = None
    scale = 0.0
    equality = 0.0
    quotients = []
    for _ in range(samples):
        u = rng.standard_normal(dim)
        v = rng.standard_normal(dim)
        viol = parallelogram_violation(p, mu, u, v)
        rhs = 2.0 ** (p - 1.0) * (float(np.linalg.norm(u)) ** p + float(np.linalg.norm(v)) ** p)
        scale = max(scale, abs(rhs))
        equality = max(equality, abs(viol))
        gap = float(np.linalg.norm(v - u)) ** p
        if gap > 1e-12:
            quotients.append((rhs - float(np.linalg.norm(u + v)) ** p) / gap)
        if viol > worst:
            worst, witness = viol, (u, v, None)
    details = {
        "mu_lower": float(min(quotients)),
        "mu_upper": float(max(quotients)),
        "equality_violation": equality,
    }
    verdict = "pass" if worst <= _tolerance(scale) else "fail"
    return CertReport(samples, worst, witness, verdict, details=details)


def exp_convex_violation(fut, u, v, t, strong=False):
    """LHS - RHS of the (strong) exponential convexity inequality."""
    yu, yv = fut.g_image(u), fut.g_image(v)
    mid = yu + t * (yv - yu)
    strengthening = fut.mu * t * (1.0 - t) * float(np.linalg.norm(yv - yu)) ** 2 if strong else 0.0
    bound = (1.0 - t) * np.exp(fut.value(yu)) + t * np.exp(fut.value(yv)) - strengthening
    return float(np.exp(fut.value(mid)) - bound)


def exp_gradient_violation(fut, u, v, strong=False):
    """LHS - RHS of the differential exponential convexity bound."""
    yu, yv = fut.g_image(u), fut.g_image(v)
    eu = np.exp(fut.value(yu))
    mu = fut.mu if strong else 0.0
    lhs = float(eu * fut.gradient(yu) @ (yv - yu)) + mu * float(np.linalg.norm(yv - yu)) ** 2
    return lhs - (float(np.exp(fut.value(yv))) - eu)


def check_exp_convex(fut, samples=200, t_grid=None, seed=0, strong=False, concave=False):
    """Sweep the exponential convexity inequality, optionally strong.

    e^{F((1-t)g(u)+tg(v))} <= (1-t)e^{F(g(u))} + te^{F(g(v))}, with the
    strong form subtracting mu t(1-t)||g(v)-g(u)||^2 from the bound.
    When grad_F is supplied the differential bound
    e^{F(g(v))} - e^{F(g(u))} >= <e^{F(g(u))}F'(g(u)), g(v)-g(u)>
                                 + mu||g(v)-g(u)||^2
    is swept as well.  concave=True certifies the mirrored class by
    checking -F.

    Parameters
    ----------
    fut : FunctionUnderTest
    samples : int
    t_grid : array_like, optional
    seed : int
    strong, concave : bool

    Returns
    -------
    CertReport
    """
    if concave:
        flipped = replace(
            fut,
            F=lambda y: -fut.F(y),
            grad_F=None if fut.grad_F is None else (lambda y: -np.asarray(fut.grad_F(y))),
        )
        return check_exp_convex(flipped, samples, t_grid, seed, strong=strong, concave=False)

    curve_worst = -np.inf
    grad_worst = -np.inf

    def violation(u, v, t):
        nonlocal curve_worst, grad_worst
        yu, yv = fut.g_image(u), fut.g_image(v)
        scale = max(np.exp(fut.value(yu)), np.exp(fut.value(yv)))
        viol = exp_convex_violation(fut, u, v, t, strong=strong)
        curve_worst = max(curve_worst, viol)
        if fut.grad_F is not None:
            gviol = exp_gradient_violation(fut, u, v, strong=strong)
            grad_worst = max(grad_worst, gviol)
            viol = max(viol, gviol)
        return viol, scale

    count, worst, witness, verdict, _ = _sweep(fut, samples, t_grid, seed, violation)
    details = {"curve": curve_worst}
    if fut.grad_F is not None:
        details["differential"] = grad_worst
    return CertReport(count, worst, witness, verdict, details=details)


def hierarchy_violation(fut, u, v, t, tol=1e-12):
    """Implication violation along log-convex => convex => quasi-convex.

    Returns the worst failed conclusion at the triple: the convex excess
    where the log-convex inequality held, and the quasi-convex excess
    where the convex inequality held.  The log leg is only consulted
    where F > 0 at both ends.
    """
    yu, yv = fut.g_image(u), fut.g_image(v)
    mid = yu + t * (yv - yu)
    e_mid = float(np.exp(fut.value(mid)))
    e_u, e_v = float(np.exp(fut.value(yu))), float(np.exp(fut.value(yv)))
    convex_viol = e_mid - ((1.0 - t) * e_u + t * e_v)
    quasi_viol = e_mid - max(e_u, e_v)
    worst = -np.inf
    if fut.value(yu) > 0 and fut.value(yv) > 0:
        log_viol = e_mid - e_u ** (1.0 - t) * e_v**t
        if log_viol <= tol:
            worst = max(worst, convex_viol)
    if convex_viol <= tol:
        worst = max(worst, quasi_viol)
    return worst


def check_hierarchy(fut, samples=200, t_grid=None, seed=0):
    """Sweep the implication chain of the exponential convexity classes.

    Wherever the log-convex inequality holds at a sampled triple, the
    convex one must hold; wherever convex holds, so must quasi-convex
    (max form).  details carry the standalone worst violations of each
    leg for class inspection.

    Parameters
    ----------
    fut : FunctionUnderTest
    samples : int
    t_grid : array_like, optional
    seed : int

    Returns
    -------
    CertReport
    """
    legs = {"log": -np.inf, "convex": -np.inf, "quasi": -np.inf}

    def violation(u, v, t):
        yu, yv = fut.g_image(u), fut.g_image(v)
        mid = yu + t * (yv - yu)
        e_mid = float(np.exp(fut.value(mid)))
        e_u, e_v = float(np.exp(fut.value(yu))), float(np.exp(fut.value(yv)))
        scale = max(e_u, e_v)
        legs["convex"] = max(legs["convex"], e_mid - ((1.0 - t) * e_u + t * e_v))
        legs["quasi"] = max(legs["quasi"], e_mid - max(e_u, e_v))
        if fut.value(yu) > 0 and fut.value(yv) > 0:
            legs["log"] = max(legs["log"], e_mid - e_u ** (1.0 - t) * e_v**t)
        return hierarchy_violation(fut, u, v, t), scale

    count, worst, witness, verdict, _ = _sweep(fut, samples, t_grid, seed, violation)
    return CertReport(count, worst, witness, verdict, details=dict(legs))


def _interval_sampler(lo, hi):
    return lambda rng: rng.uniform(lo, hi, 1)


def _ball_sampler(dim, radius=2.0):
    return lambda rng: rng.uniform(-radius, radius, dim)


def builtin_functions():
    """Registry of ready-made FunctionUnderTest instances by id."""
    return {
        "quadratic": FunctionUnderTest(
            F=lambda y: float(y @ y),
            grad_F=lambda y: 2.0 * np.asarray(y, dtype=float),
            domain_sampler=_ball_sampler(3),
            p=2.0,
            mu=1.0,
        ),
        "affine": FunctionUnderTest(
            F=lambda y: float(np.sum(y)) + 1.0,
            grad_F=lambda y: np.ones(np.atleast_1d(y).size),
            domain_sampler=_ball_sampler(3),
            p=2.0,
            mu=0.0,
        ),
        "quartic": FunctionUnderTest(
            F=lambda y: float(y[0] ** 4),
            grad_F=lambda y: np.array([4.0 * y[0] ** 3]),
            domain_sampler=_interval_sampler(-1.0, 1.0),
            p=2.0,
            mu=0.0,
        ),
        "sine": FunctionUnderTest(
            F=lambda y: float(np.sin(y[0])),
            grad_F=lambda y: np.array([np.cos(y[0])]),
            domain_sampler=_interval_sampler(0.0, np.pi),
            p=2.0,
            mu=0.1,
        ),
        "exp-square": FunctionUnderTest(
            F=lambda y: float(np.exp(y[0] ** 2)),
            g=lambda u: u * u,
            domain_sampler=_interval_sampler(0.0, 2.0),
            p=2.0,
            mu=0.0,
        ),
        "erf-sqrt": FunctionUnderTest(
            F=lambda y: float(erf(np.sqrt(y[0]))),
            domain_sampler=_interval_sampler(1e-6, 4.0),
            p=2.0,
            mu=0.0,
        ),
        "log1p-square": FunctionUnderTest(
            F=lambda y: float(np.log1p(y[0] ** 2)),
            domain_sampler=_interval_sampler(-1.0, 1.0),
            p=2.0,
            mu=0.0,
        ),
        "abs-sqrt": FunctionUnderTest(
            F=lambda y: float(np.sqrt(abs(y[0]))),
            domain_sampler=_interval_sampler(-1.0, 1.0),
            p=2.0,
            mu=0.0,
        ),
    }
