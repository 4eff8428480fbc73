"""Problem types, residual maps, and shared configuration plumbing."""

import numpy as np
import pytest

from oracles import fd_gradient

from gvikit import (
    GviProblem,
    SolveConfig,
    complementarity_gap,
    default_rho,
    estimate_lipschitz,
    is_solution,
    quasi_to_general,
    residual,
    resolve_rho,
    solve_projection,
    wiener_hopf_residual,
)
from gvikit.core import check_divergence, g_value, recover_iterate
from gvikit.errors import (
    CapabilityError,
    DivergenceError,
    NumericDomainError,
    UnsupportedSetError,
)
from gvikit.sets import Box, NonnegOrthant, WholeSpace, project


def test_residual_vanishes_at_known_solution(example4_10):
    out = residual(example4_10, np.ones(10), rho=1.0)
    np.testing.assert_allclose(out, np.zeros(10), atol=1e-14)


def test_residual_zero_operator_feasible_point(zero_operator_problem):
    u = np.full(3, 0.4)
    np.testing.assert_array_equal(residual(zero_operator_problem, u, 1.0), np.zeros(3))


def test_residual_clamps_against_box(example3_2):
    # At the origin the shifted point is e, feasible, so R = -e.
    out = residual(example3_2, np.zeros(2), rho=1.0)
    np.testing.assert_allclose(out, -np.ones(2), atol=1e-14)


def test_residual_rejects_nonfinite_operator():
    bad = GviProblem(dim=2, T=lambda x: np.array([np.nan, 1.0]), K=NonnegOrthant())
    with pytest.raises(NumericDomainError):
        residual(bad, np.zeros(2), 1.0)


def test_is_solution_examples(example4_10, example3_10, zero_operator_problem):
    assert is_solution(example4_10, np.ones(10), rho=1.0, tol=1e-7)
    assert is_solution(zero_operator_problem, np.full(3, 0.2), rho=1.0, tol=1e-12)
    assert not is_solution(example3_10, np.zeros(10), rho=1.0, tol=1e-7)
    assert np.linalg.norm(residual(example3_10, np.zeros(10), 1.0)) == pytest.approx(
        np.sqrt(10.0)
    )


def test_complementarity_gap_origin_solves():
    prob = GviProblem(dim=2, T=lambda u: u, K=NonnegOrthant())
    gap = complementarity_gap(prob, np.zeros(2))
    assert (gap.primal_violation, gap.dual_violation, gap.pairing) == (0.0, 0.0, 0.0)


def test_complementarity_gap_interior_zero():
    prob = GviProblem(dim=2, T=lambda u: u - 1.0, K=NonnegOrthant())
    gap = complementarity_gap(prob, np.ones(2))
    assert gap.primal_violation == 0.0
    assert gap.dual_violation == 0.0
    assert gap.pairing == pytest.approx(0.0)


def test_complementarity_gap_detects_primal_violation():
    prob = GviProblem(dim=2, T=lambda u: u + 1.0, K=NonnegOrthant())
    gap = complementarity_gap(prob, -np.ones(2))
    assert gap.primal_violation == pytest.approx(1.0)
    assert gap.dual_violation == 0.0
    assert gap.pairing == pytest.approx(0.0)


def test_complementarity_gap_requires_cone():
    prob = GviProblem(dim=2, T=lambda u: u, K=Box(np.zeros(2), np.ones(2)))
    with pytest.raises(UnsupportedSetError):
        complementarity_gap(prob, np.zeros(2))


def test_quasi_to_general_zero_shift_is_identity_map():
    K = Box(np.zeros(2), np.ones(2))
    prob = quasi_to_general(lambda u: np.zeros(2), K, lambda u: u - 1.0, dim=2)
    u = np.array([0.3, -0.8])
    np.testing.assert_allclose(g_value(prob, u), u)


def test_quasi_to_general_constant_shift_fixed_point():
    c = np.array([0.1, 0.2])
    K = Box(np.zeros(2), np.ones(2))
    prob = quasi_to_general(lambda u: c, K, lambda u: u - 1.0, dim=2)
    report = solve_projection(prob, SolveConfig(rho=0.5))
    u = report.solution
    lhs = u - c
    rhs = project(K, (u - c) - 0.5 * (u - 1.0))
    np.testing.assert_allclose(lhs, rhs, atol=1e-6)


def test_quasi_to_general_linear_shift_matches_grid_search():
    # g(u) = 0.9u over the unit box; brute-force the transformed fixed
    # point over [0,2]^2 and compare the solver's answer.
    K = Box(np.zeros(2), np.ones(2))
    prob = quasi_to_general(lambda u: 0.1 * u, K, lambda u: u - 1.0, dim=2)
    report = solve_projection(prob, SolveConfig(rho=0.5, tol=1e-10))
    axis = np.linspace(0.0, 2.0, 2001)
    xs, ys = np.meshgrid(axis, axis, indexing="ij")
    gx, gy = 0.9 * xs, 0.9 * ys
    px = np.clip(gx - 0.5 * (xs - 1.0), 0.0, 1.0)
    py = np.clip(gy - 0.5 * (ys - 1.0), 0.0, 1.0)
    res = np.maximum(np.abs(gx - px), np.abs(gy - py))
    k = np.unravel_index(np.argmin(res), res.shape)
    best = np.array([axis[k[0]], axis[k[1]]])
    assert np.max(np.abs(report.solution - best)) <= 1e-3


def test_wiener_hopf_residual_zero_operator(zero_operator_problem):
    z = np.full(3, 0.5)
    np.testing.assert_array_equal(wiener_hopf_residual(zero_operator_problem, z, 1.0), np.zeros(3))


def test_wiener_hopf_residual_at_solution_shift(example4_10):
    u = np.ones(10)
    z = u - example4_10.T(u)
    np.testing.assert_allclose(wiener_hopf_residual(example4_10, z, 1.0), np.zeros(10), atol=1e-12)


def test_wiener_hopf_residual_scalar_orthant():
    prob = GviProblem(dim=1, T=lambda u: u, K=NonnegOrthant())
    out = wiener_hopf_residual(prob, np.array([-1.0]), 1.0)
    np.testing.assert_allclose(out, [-1.0])


def test_wiener_hopf_residual_needs_inverse_for_nonidentity_g():
    prob = GviProblem(
        dim=2,
        T=lambda u: u,
        K=NonnegOrthant(),
        g=lambda u: 2.0 * u,
    )
    with pytest.raises(CapabilityError):
        wiener_hopf_residual(prob, np.zeros(2), 1.0)


def test_fixed_point_equivalence_of_residual(example4_10):
    # ||R(u)|| = 0 exactly when g(u) is the projection of the shifted
    # point, across step scales.
    rng = np.random.default_rng(0)
    for rho in (0.1, 1.0, 10.0):
        for _ in range(20):
            u = rng.uniform(0.0, 1.0, 10)
            r = np.linalg.norm(residual(example4_10, u, rho))
            gu = g_value(example4_10, u)
            fp = np.linalg.norm(
                gu - project(example4_10.K, gu - rho * example4_10.T(u))
            )
            assert (r <= 1e-10) == (fp <= 1e-10)
        star = np.ones(10)
        assert np.linalg.norm(residual(example4_10, star, rho)) <= 1e-10


def test_wiener_hopf_shift_equivalence(example4_10):
    # A residual zero maps to a Wiener-Hopf zero through z = g(u) - rho*Tu
    # and back through u = recover(P_K z).
    rho = 1.0
    u_star = np.ones(10)
    z = g_value(example4_10, u_star) - rho * example4_10.T(u_star)
    assert np.linalg.norm(wiener_hopf_residual(example4_10, z, rho)) <= 1e-8
    back = recover_iterate(example4_10, u_star, project(example4_10.K, z))
    assert np.linalg.norm(residual(example4_10, back, rho)) <= 1e-8


def test_residual_continuity_smoke_bound(example3_10):
    rng = np.random.default_rng(1)
    rho = 1.0
    L = estimate_lipschitz(example3_10)
    bound = 10.0 * (1.0 + rho * L + 2.0)
    for _ in range(50):
        u = rng.uniform(-1.0, 2.0, 10)
        delta = rng.standard_normal(10) * 1e-3
        diff = np.linalg.norm(
            residual(example3_10, u + delta, rho) - residual(example3_10, u, rho)
        )
        assert diff <= bound * np.linalg.norm(delta)


def test_solve_config_validation():
    with pytest.raises(ValueError):
        SolveConfig(rho=0.0)
    with pytest.raises(ValueError):
        SolveConfig(tol=-1.0)
    with pytest.raises(ValueError):
        SolveConfig(max_iters=0)
    with pytest.raises(ValueError):
        SolveConfig(lam=1.5)
    with pytest.raises(ValueError):
        SolveConfig(h=0.0)
    with pytest.raises(ValueError):
        SolveConfig(sigma=1.0)
    with pytest.raises(ValueError):
        SolveConfig(gamma=0.0)
    with pytest.raises(ValueError):
        SolveConfig(alpha=1.0)


def test_alpha_schedule_resolution():
    assert SolveConfig().alpha_at(5, default=1.0) == 1.0
    assert SolveConfig(alpha_schedule=0.25).alpha_at(5) == 0.25
    assert SolveConfig(alpha_schedule=lambda n: 1.0 / (n + 1)).alpha_at(3) == 0.25


def test_problem_validation_and_inverse_probe():
    with pytest.raises(ValueError):
        GviProblem(dim=0, T=lambda u: u, K=WholeSpace())
    with pytest.raises(ValueError):
        GviProblem(
            dim=2,
            T=lambda u: u,
            K=WholeSpace(),
            g=lambda u: 2.0 * u,
            g_inverse=lambda y: y,  # wrong inverse, probe must trip
        )
    ok = GviProblem(
        dim=2,
        T=lambda u: u,
        K=WholeSpace(),
        g=lambda u: 2.0 * u,
        g_inverse=lambda y: 0.5 * y,
    )
    np.testing.assert_allclose(ok.g_inverse(ok.g(np.array([1.0, -2.0]))), [1.0, -2.0])


def test_lipschitz_estimate_matches_linear_operator():
    M = np.array([[3.0, 0.0], [0.0, 0.5]])
    prob = GviProblem(dim=2, T=lambda u: M @ u, K=WholeSpace())
    L = estimate_lipschitz(prob)
    assert 1.0 <= L <= 3.0 + 1e-6
    assert default_rho(prob) == pytest.approx(0.5 / L)


def test_resolve_rho_prefers_explicit_value(example4_10):
    assert resolve_rho(example4_10, SolveConfig(rho=0.7)) == 0.7
    auto = resolve_rho(example4_10, SolveConfig())
    assert auto > 0.0
    assert auto == pytest.approx(0.5 / estimate_lipschitz(example4_10))


def test_divergence_detector():
    with pytest.raises(DivergenceError):
        check_divergence(np.array([1e13]))
    check_divergence(np.array([1e11]))


def test_fd_gradient_oracle_self_check():
    # The oracle itself must be trustworthy: exact on a quadratic.
    f = lambda x: float(x @ x)
    x = np.array([0.3, -1.2])
    np.testing.assert_allclose(fd_gradient(f, x), 2 * x, atol=1e-8)
