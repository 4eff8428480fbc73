"""Independent oracles used by the test suite.

Expected values are re-derived through routes that share no code with
the package: brute-force grid search for small variational
inequalities, symbolic algebra for norm identities, finite differences
for gradients and third derivatives, and direct evaluation of printed
closed forms.
"""

import numpy as np
import sympy as sp


def grid_search_box2(T, lo=0.0, hi=1.0, coarse=1e-2, fine=1e-4):
    """Brute-force solve of a VI on a 2-d box, coarse scan refined once.

    Minimizes the natural residual ||x - clip(x - T(x), lo, hi)||_inf
    over a coarse lattice, then rescans a one-cell window around the
    winner at the fine step.  Projection is a bare clip, independent of
    the package's set machinery.
    """

    def residual(points):
        vals = np.array([p - np.clip(p - T(p), lo, hi) for p in points])
        return np.max(np.abs(vals), axis=1)

    axis = np.arange(lo, hi + coarse / 2, coarse)
    xs, ys = np.meshgrid(axis, axis, indexing="ij")
    points = np.column_stack([xs.ravel(), ys.ravel()])
    best = points[np.argmin(residual(points))]

    lo_w = np.maximum(best - coarse, lo)
    hi_w = np.minimum(best + coarse, hi)
    ax0 = np.arange(lo_w[0], hi_w[0] + fine / 2, fine)
    ax1 = np.arange(lo_w[1], hi_w[1] + fine / 2, fine)
    xs, ys = np.meshgrid(ax0, ax1, indexing="ij")
    points = np.column_stack([xs.ravel(), ys.ravel()])
    return points[np.argmin(residual(points))]


def fd_gradient(f, x, h=1e-6):
    """Central-difference gradient of a scalar function."""
    x = np.asarray(x, dtype=float)
    out = np.empty(x.size)
    for k in range(x.size):
        step = np.zeros(x.size)
        step[k] = h
        out[k] = (f(x + step) - f(x - step)) / (2.0 * h)
    return out


def fd_third_derivative(f, x, h=1e-3):
    """Five-point central third derivative of a scalar function."""
    return (f(x + 2 * h) - 2 * f(x + h) + 2 * f(x - h) - f(x - 2 * h)) / (2.0 * h**3)


def p1_h1(u, z):
    """Printed piecewise gap value of the scalar control instance.

    The projection argument collapses to z^2 - z + 1, independent of u,
    so the distance term is (z^2 - z)^2 exactly when z lies in (0, 1)
    and vanishes otherwise.
    """
    if 0.0 < z < 1.0:
        return 0.5 * (z + u - 1.0) ** 2 - 0.5 * (z * z - z) ** 2
    return 0.5 * (z + u - 1.0) ** 2


def p1_solution_branches(count=50):
    """Sampled points of both printed branches of the solution set.

    Branch one: u = 1 - z with z outside (0, 1).  Branch two:
    u = 1 - z^2 with z inside (0, 1).
    """
    z_outer = np.concatenate(
        [np.linspace(-3.0, 0.0, count - count // 2), np.linspace(1.0, 4.0, count // 2)]
    )
    branch1 = np.column_stack([1.0 - z_outer, z_outer])
    z_inner = np.linspace(0.02, 0.98, count)
    branch2 = np.column_stack([1.0 - z_inner**2, z_inner])
    return branch1, branch2


def p1_feasible_samples(count, rng):
    """Feasible (u, z) samples of the control instance: u + z^2 >= 1."""
    z = rng.uniform(-2.0, 2.0, count)
    u = 1.0 - z**2 + rng.uniform(0.0, 3.0, count)
    return np.column_stack([u, z])


def parallelogram_identity_residuals():
    """Symbolic residuals behind the norm-power laws.

    Returns the expanded difference for the squared-norm identity
    (exactly zero) and for the fourth-power lower law at modulus one in
    one dimension, which factors as 6(u^2 - v^2)^2 >= 0.
    """
    u, v = sp.symbols("u v", real=True)
    quad = sp.expand((u + v) ** 2 + (v - u) ** 2 - 2 * u**2 - 2 * v**2)
    quartic_margin = sp.expand(
        8 * (u**4 + v**4) - (u + v) ** 4 - (v - u) ** 4 - 6 * (u**2 - v**2) ** 2
    )
    return quad, quartic_margin


def quadratic_energy_value():
    """Symbolic bending energy of v(x) = x^2 with zero load on [0, 1]."""
    x = sp.symbols("x")
    v = x**2
    return float(sp.integrate(sp.diff(v, x, 2) ** 2, (x, 0, 1)))
