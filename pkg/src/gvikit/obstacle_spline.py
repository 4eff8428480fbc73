"""Cubic-spline discretization of a third-order obstacle boundary value problem.

The penalized obstacle problem -u''' + {u >= psi}(u - psi) = f on (a, b)
with u(a), u'(a), u'(b) prescribed turns into a piecewise linear ODE:
u''' = f outside the contact interval (c, d] and u''' = p*u + f + r
inside.  A cubic spline with consistency relations at the knots yields a
banded linear system in the grid values; its solution feeds spline
coefficient recovery, error tables against the closed-form solution of
the benchmark instance, and energy/complementarity diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.integrate import trapezoid
from scipy.interpolate import PPoly
from scipy.linalg import solve_banded

from .errors import AssemblyError, GridError

_VARIANTS = ("corrected", "verbatim")


@dataclass(frozen=True)
class ObstacleProblem:
    """Data of the third-order obstacle boundary value problem.

    f is the source term, p the coefficient multiplying u on the contact
    interval (c, d], r the constant shift there, and alpha, beta1, beta2
    the boundary data u(a), u'(a), u'(b).  psi is the obstacle, used
    only by the diagnostics.
    """

    a: float
    b: float
    f: Callable
    p: Callable
    r: float
    alpha: float
    beta1: float
    beta2: float
    psi: Callable
    c: Optional[float] = None
    d: Optional[float] = None

    def __post_init__(self):
        if self.c is None:
            object.__setattr__(self, "c", (3.0 * self.a + self.b) / 4.0)
        if self.d is None:
            object.__setattr__(self, "d", (self.a + 3.0 * self.b) / 4.0)
        if not self.a < self.c < self.d < self.b:
            raise ValueError("interface points must satisfy a < c < d < b")


@dataclass(frozen=True)
class SplineSystem:
    """Banded system in the interior grid values s_1 ... s_n.

    matrix holds the diagonal-ordered band (1 superdiagonal, 2
    subdiagonals) accepted by banded LU; rhs the right-hand side.
    """

    n: int
    h: float
    matrix: np.ndarray
    rhs: np.ndarray


def _grid(problem, n):
    h = (problem.b - problem.a) / (n + 1)
    x = problem.a + h * np.arange(n + 2)
    return h, x


def _region_mask(problem, x):
    # Contact interval is open at c, closed at d, matching the grid
    # convention that (n+1)/4 and 3(n+1)/4 are integers.
    return (x > problem.c + 1e-12) & (x <= problem.d + 1e-12)


def _operator_values(problem, x, sigma, s=None):
    """T_i = f_i outside the contact region and p_i s_i + f_i + r inside."""
    f_vals = np.array([problem.f(xi) for xi in x], dtype=float)
    t = f_vals + np.where(sigma, problem.r, 0.0)
    if s is not None:
        p_vals = np.array([problem.p(xi) for xi in x], dtype=float)
        t = t + np.where(sigma, p_vals * s, 0.0)
    return t


def assemble(problem, n, variant="corrected"):
    """Build the banded spline system for n interior unknowns.

    The interior rows carry the (-1, 3, -3, 1) stencil on s and
    (1, 5, 5, 1)h^3/12 weights on T; the boundary rows inject u'(a) and
    u'(b).  The s-dependent part of T on the contact interval is folded
    into the matrix.  variant selects the right boundary row: "verbatim"
    uses the printed (3, 10, 31) T-weights, "corrected" the exactly
    derived (3, 16, 19, 6) weights (both sum to 44, agreeing on
    constant T; they differ by the second difference of T at the right
    end).

    Parameters
    ----------
    problem : ObstacleProblem
    n : int
        Interior grid count; n + 1 must be divisible by 4.
    variant : {"corrected", "verbatim"}

    Returns
    -------
    SplineSystem

    Raises
    ------
    GridError
        When n + 1 is not divisible by 4.
    """
    if variant not in _VARIANTS:
        raise ValueError(f"variant must be one of {_VARIANTS}")
    if n < 4 or (n + 1) % 4 != 0:
        raise GridError("n + 1 must be divisible by 4 (and n >= 4)")
    h, x = _grid(problem, n)
    sigma = _region_mask(problem, x)
    p_vals = np.array([problem.p(xi) for xi in x], dtype=float)
    t_known = _operator_values(problem, x, sigma)  # T with the p*s part left out
    w0 = h**3 / 12.0

    rows = []
    # left row, stencil on s_0..s_2, T-weights (3, 4, 1)
    rows.append(((1, np.array([3.0, -4.0, 1.0]), 0), (np.array([3.0, 4.0, 1.0]) * w0, 0),
                 -2.0 * h * problem.beta1))
    for i in range(2, n):
        rows.append(((i, np.array([-1.0, 3.0, -3.0, 1.0]), i - 2),
                     (np.array([1.0, 5.0, 5.0, 1.0]) * w0, i - 2), 0.0))
    if variant == "verbatim":
        rows.append(((n, np.array([-3.0, 8.0, -5.0]), n - 2),
                     (np.array([3.0, 10.0, 31.0]) * w0, n - 2), -2.0 * h * problem.beta2))
    else:
        rows.append(((n, np.array([-3.0, 8.0, -5.0]), n - 2),
                     (np.array([3.0, 16.0, 19.0, 6.0]) * w0, n - 2), -2.0 * h * problem.beta2))

    ab = np.zeros((4, n))
    rhs = np.zeros(n)
    for row, ((_, coeffs, j0), (weights, k0), extra) in enumerate(rows):
        rhs[row] = extra
        for off, coeff in enumerate(coeffs):
            j = j0 + off
            if 1 <= j <= n:
                ab[1 + row - (j - 1), j - 1] += coeff
            else:
                rhs[row] -= coeff * (problem.alpha if j == 0 else 0.0)
        for off, w in enumerate(weights):
            k = k0 + off
            rhs[row] += w * t_known[k]
            if sigma[k]:
                if 1 <= k <= n:
                    ab[1 + row - (k - 1), k - 1] -= w * p_vals[k]
                else:
                    rhs[row] += w * p_vals[k] * (problem.alpha if k == 0 else 0.0)
    return SplineSystem(n=n, h=h, matrix=ab, rhs=rhs)


def solve_grid(problem, n, variant="corrected"):
    """Solve the spline system and return the full grid s_0 ... s_{n+1}.

    s_0 is the boundary value u(a); s_{n+1} follows from the interior
    recurrence evaluated at the last knot.

    Parameters
    ----------
    problem : ObstacleProblem
    n : int
    variant : {"corrected", "verbatim"}

    Returns
    -------
    ndarray of length n + 2

    Raises
    ------
    AssemblyError
        When the banded system is singular.
    """
    system = assemble(problem, n, variant)
    try:
        interior = solve_banded((2, 1), system.matrix, system.rhs)
    except np.linalg.LinAlgError as exc:
        raise AssemblyError(f"singular spline system: {exc}") from exc
    if not np.all(np.isfinite(interior)):
        raise AssemblyError("spline system produced non-finite values")
    h, x = _grid(problem, n)
    s = np.empty(n + 2)
    s[0] = problem.alpha
    s[1 : n + 1] = interior
    sigma = _region_mask(problem, x)
    t = _operator_values(problem, x, sigma, s)
    s[n + 1] = s[n - 2] - 3.0 * s[n - 1] + 3.0 * s[n] + (h**3 / 12.0) * (
        t[n - 2] + 5.0 * t[n - 1] + 5.0 * t[n] + t[n + 1]
    )
    return s


def spline_fit(problem, s):
    """Recover the piecewise cubic from grid values.

    The knot slopes come from the first-derivative consistency relation,
    with the prescribed u'(a) and u'(b) at the ends; each piece is
    a_i t^3 + b_i t^2 + c_i t + d_i in t = x - x_i.

    Parameters
    ----------
    problem : ObstacleProblem
    s : ndarray
        Full grid vector of length n + 2 from solve_grid.

    Returns
    -------
    scipy.interpolate.PPoly
    """
    n = s.size - 2
    h, x = _grid(problem, n)
    sigma = _region_mask(problem, x)
    t = _operator_values(problem, x, sigma, s)

    dvals = np.empty(n + 2)
    dvals[0] = problem.beta1
    dvals[n + 1] = problem.beta2
    for i in range(1, n + 1):
        dvals[i] = (s[i + 1] - s[i - 1] - (h**3 / 12.0) * (t[i + 1] + 2.0 * t[i] + t[i - 1])) / (2.0 * h)

    a_c = (t[:-1] + t[1:]) / 12.0
    c_c = dvals[:-1]
    d_c = s[:-1]
    b_c = (s[1:] - s[:-1]) / h**2 - c_c / h - a_c * h
    return PPoly(np.vstack([a_c, b_c, c_c, d_c]), x)


_SQ3 = np.sqrt(3.0)


def _middle_basis(x):
    """Value, first, and second derivative rows of (e^x, e^{-x/2}cos, e^{-x/2}sin)."""
    E = np.exp(-x / 2.0)
    cth, sth = np.cos(_SQ3 * x / 2.0), np.sin(_SQ3 * x / 2.0)
    val = (np.exp(x), E * cth, E * sth)
    der = (np.exp(x), E * (-0.5 * cth - (_SQ3 / 2.0) * sth), E * (-0.5 * sth + (_SQ3 / 2.0) * cth))
    dd = (np.exp(x), E * (-0.5 * cth + (_SQ3 / 2.0) * sth), E * (-0.5 * sth - (_SQ3 / 2.0) * cth))
    return val, der, dd


@lru_cache(maxsize=1)
def analytic_constants():
    """Constants of the closed-form benchmark solution.

    The three pieces (quadratic; 1 + combination of e^x and damped
    trigonometric modes; shifted quadratic) are glued by continuity of
    u, u', u'' at x = 1/4 and x = 3/4, a dense 6-by-6 solve.
    """
    m = np.zeros((6, 6))
    rhs = np.array([1.0, 0.0, 0.0, -1.0, 0.0, 0.0])

    xq = 0.25
    val, der, dd = _middle_basis(xq)
    m[0, 0] = xq**2 / 2.0
    m[0, 1:4] = [-val[0], -val[1], -val[2]]
    m[1, 0] = xq
    m[1, 1:4] = [-der[0], -der[1], -der[2]]
    m[2, 0] = 1.0
    m[2, 1:4] = [-dd[0], -dd[1], -dd[2]]

    xq = 0.75
    val, der, dd = _middle_basis(xq)
    m[3, 1:4] = [val[0], val[1], val[2]]
    m[3, 4] = -xq * (xq - 2.0) / 2.0
    m[3, 5] = -1.0
    m[4, 1:4] = [der[0], der[1], der[2]]
    m[4, 4] = -(xq - 1.0)
    m[5, 1:4] = [dd[0], dd[1], dd[2]]
    m[5, 4] = -1.0
    return np.linalg.solve(m, rhs)


def analytic_solution(x):
    """Closed-form solution of the benchmark obstacle instance on [0, 1].

    Quadratic up to 1/4, then 1 plus exponential/damped-oscillatory
    modes up to 3/4, then a quadratic meeting u'(1) = 0.
    """
    a1, a2, a3, a4, a5, a6 = analytic_constants()
    x = np.asarray(x, dtype=float)
    val, _, _ = _middle_basis(x)
    middle = 1.0 + a2 * val[0] + a3 * val[1] + a4 * val[2]
    out = np.where(
        x <= 0.25,
        0.5 * a1 * x**2,
        np.where(x <= 0.75, middle, 0.5 * a5 * x * (x - 2.0) + a6),
    )
    return out if out.ndim else float(out)


def benchmark_problem():
    """Obstacle instance with f = 0, p = 1, r = -1, zero boundary data.

    The obstacle is -1 off the contact interval and +1 on [1/4, 3/4],
    the configuration whose closed-form solution analytic_solution
    evaluates.
    """
    return ObstacleProblem(
        a=0.0,
        b=1.0,
        f=lambda x: 0.0,
        p=lambda x: 1.0,
        r=-1.0,
        alpha=0.0,
        beta1=0.0,
        beta2=0.0,
        psi=lambda x: 1.0 if 0.25 <= x <= 0.75 else -1.0,
    )


def max_error(problem, n, variant="corrected", exact=analytic_solution):
    """Max grid deviation of the spline solution from a reference.

    Parameters
    ----------
    problem : ObstacleProblem
    n : int
    variant : {"corrected", "verbatim"}
    exact : callable
        Reference solution; defaults to the benchmark closed form.

    Returns
    -------
    float
    """
    s = solve_grid(problem, n, variant)
    _, x = _grid(problem, n)
    reference = np.array([exact(xi) for xi in x], dtype=float)
    return float(np.max(np.abs(s - reference)))


def discrete_energy(problem, v):
    """Trapezoid energy int (v'')^2 - 2 int f v' of a grid function.

    Derivatives are formed by repeated second-order differences, so the
    value is a diagnostic, not a quadrature-exact energy.

    Parameters
    ----------
    problem : ObstacleProblem
    v : ndarray
        Grid vector on the uniform grid including both endpoints.

    Returns
    -------
    float
    """
    v = np.asarray(v, dtype=float)
    if v.size < 3:
        raise ValueError("energy needs at least 3 grid values")
    h = (problem.b - problem.a) / (v.size - 1)
    x = problem.a + h * np.arange(v.size)
    dv = np.gradient(v, h, edge_order=2)
    ddv = np.gradient(dv, h, edge_order=2)
    f_vals = np.array([problem.f(xi) for xi in x], dtype=float)
    return float(trapezoid(ddv**2, dx=h) - 2.0 * trapezoid(f_vals * dv, dx=h))


def complementarity_check(s, problem):
    """Max one-sided complementarity violation over interior nodes.

    The obstacle formulation requires -u''' - f >= 0; the violation at a
    node is |min(-D3 s_i - f_i, 0) * (s_i - psi_i)| with D3 the
    five-point central third difference.  Diagnostic only.

    Parameters
    ----------
    s : ndarray
        Full grid vector (length n + 2).
    problem : ObstacleProblem

    Returns
    -------
    float
    """
    s = np.asarray(s, dtype=float)
    n = s.size - 2
    h, x = _grid(problem, n)
    worst = 0.0
    for i in range(2, n):
        d3 = (s[i + 2] - 2.0 * s[i + 1] + 2.0 * s[i - 1] - s[i - 2]) / (2.0 * h**3)
        residual = min(-d3 - problem.f(x[i]), 0.0)
        worst = max(worst, abs(residual * (s[i] - problem.psi(x[i]))))
    return worst
