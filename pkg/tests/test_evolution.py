import json
import math

import numpy as np
import pytest
from scipy.linalg import expm

from oracles import dense_time_stepping, linear_convolution_quad
from weylap.errors import (HypothesisViolated, InvalidExponent, MaxIterExceeded, NegativeTime,
                           NotAContraction, StabilityViolation)
from weylap.evolution import (MildSolution, SemigroupSpec, contraction_constant, gamma_operator,
                              gronwall_bound, linear_mild_solution, linear_solution_bound,
                              linear_solution_on_grid, picard_solve, semigroup_apply,
                              translation_diagnostic, verify_stability, weyl_condition_check)
from weylap.seminorms import ScanSpec
from weylap.signals import (ParametricSignal, TrigSum, constant, paper_ode_solution, paper_step,
                            sine, zero)

SQRT_E = math.sqrt(math.e)


def test_semigroup_apply_examples():
    assert semigroup_apply(SemigroupSpec.scalar(-1), 1.0, 1.0)[0] == pytest.approx(math.exp(-1))
    S = SemigroupSpec.diagonal([-1, -2])
    np.testing.assert_allclose(semigroup_apply(S, math.log(2), [1, 1]), [0.5, 0.25], rtol=1e-14)
    x = np.array([0.3, -1.2])
    np.testing.assert_array_equal(semigroup_apply(S, 0.0, x), x)
    with pytest.raises(NegativeTime):
        semigroup_apply(S, -0.1, x)


def test_dense_semigroup_matches_eigendecomposition():
    A = np.array([[-1.0, 0.5], [0.0, -2.0]])
    S = SemigroupSpec.dense(A, 2.0, 0.9)
    w, V = np.linalg.eig(A)
    for t in (0.1, 1.0, 3.7):
        ref = (V @ np.diag(np.exp(w * t)) @ np.linalg.inv(V)).real @ np.array([1.0, 2.0])
        np.testing.assert_allclose(semigroup_apply(S, t, [1.0, 2.0]), ref, rtol=1e-10)


def test_scalar_and_diagonal_invariants():
    S = SemigroupSpec.diagonal([-3.0, -0.5])
    assert S.M == 1.0 and S.delta == 0.5
    with pytest.raises(ValueError):
        SemigroupSpec.scalar(0.5)


def test_verify_stability_examples():
    ok = verify_stability(SemigroupSpec.scalar(-1))
    assert ok.ok and ok.worst_ratio == pytest.approx(1.0)
    assert not verify_stability(SemigroupSpec.dense([[-1, 10], [0, -1]], 1, 1)).ok
    assert not verify_stability(SemigroupSpec.diagonal([-0.5], delta=1.0)).ok
    with pytest.raises(NegativeTime):
        verify_stability(SemigroupSpec.scalar(-1), [-1.0, 0.0])


def test_transient_growth_matches_direct_norm():
    A = np.array([[-1.0, 10.0], [0.0, -1.0]])
    chk = verify_stability(SemigroupSpec.dense(A, 1, 1), np.linspace(0, 5, 51))
    direct = max(np.linalg.norm(expm(t * A), 2) / math.exp(-t) for t in np.linspace(0, 5, 51))
    assert chk.worst_ratio == pytest.approx(direct, rel=1e-10)


def test_linear_step_closed_form():
    r = linear_mild_solution(SemigroupSpec.scalar(-1), paper_step(), 1.0)
    assert r.value[0] == pytest.approx((SQRT_E - 1) / math.e, abs=r.tail_bound + r.quad_tol + 1e-12)
    assert r.tail_bound <= 1e-6


def test_linear_zero_forcing():
    r = linear_mild_solution(SemigroupSpec.diagonal([-1, -3]), zero(2), 2.0)
    np.testing.assert_array_equal(r.value, [0.0, 0.0])
    assert r.tail_bound <= 1e-6


def test_linear_sin_analytic_and_quadrature_oracle():
    r = linear_mild_solution(SemigroupSpec.scalar(-1), sine(), 0.0)
    assert r.value[0] == pytest.approx(-0.5, abs=r.tail_bound + r.quad_tol + 1e-9)
    ref = linear_convolution_quad(-1.0, math.sin, 0.0, r.lower_limit)
    assert r.value[0] == pytest.approx(ref, abs=1e-9)


def test_linear_unstable_declared_envelope():
    with pytest.raises(StabilityViolation):
        linear_mild_solution(SemigroupSpec.diagonal([-0.5], delta=1.0), sine(), 0.0)


def test_linear_dense_against_componentwise_oracle():
    A = np.array([[-1.0, 0.5], [0.0, -2.0]])
    S = SemigroupSpec.dense(A, 2.0, 0.9)
    f = TrigSum(((1.0, 0.5),), (1.0,), (0.0,))
    t = 1.3
    r = linear_mild_solution(S, f, t, density=128)
    # solve the triangular system by hand: u2' = -2 u2 + 0.5 sin, u1' = -u1 + 0.5 u2 + sin
    u2 = lambda s: 0.5 * (2 * math.sin(s) - math.cos(s)) / 5
    u1_forcing = lambda s: math.sin(s) + 0.5 * u2(s)
    u1 = linear_convolution_quad(-1.0, u1_forcing, t, t - 60)
    np.testing.assert_allclose(r.value, [u1, u2(t)], atol=1e-6)


def test_linear_solution_bound_examples():
    scan = ScanSpec(-5, 5)
    b = linear_solution_bound(SemigroupSpec.scalar(-1), paper_step(), 1, scan)
    assert b == pytest.approx(0.5 / (1 - math.exp(-1)), abs=1e-6)
    assert linear_solution_bound(SemigroupSpec.scalar(-1), zero(), 1, scan) == 0.0
    S = SemigroupSpec.dense([[-2.0]], 2.0, 2.0)
    assert linear_solution_bound(S, constant(1.0), 1, scan) == pytest.approx(2 / (1 - math.exp(-2)))


def test_contraction_constant_formula():
    c = contraction_constant(1, 1, 2, 0.5)
    expected = (1 / math.sqrt(2)) * (math.e / (math.e - 1)) * 0.5
    assert c.k == pytest.approx(expected, rel=1e-14)
    assert c.satisfied_13
    assert contraction_constant(1, 1, 2, 0.0).k == 0.0
    edge = contraction_constant(1, 1, 2, c.threshold)
    assert edge.k == 1.0 and not edge.satisfied_13
    # p = 1 takes the limit M of the Hoelder factor
    assert contraction_constant(2, 1, 1, 0.1).k == pytest.approx(2 * math.e / (math.e - 1) * 0.1)


def test_weyl_condition_examples():
    assert weyl_condition_check(1, 4, 2, 0).bound == pytest.approx(1 - math.exp(-2), abs=1e-12)
    w = weyl_condition_check(1, 4, 4, 0)
    assert w.bound == pytest.approx(0.5 * (1 - math.exp(-4)) * 16, rel=1e-12)
    assert w.satisfied_14_or_15
    with pytest.raises(InvalidExponent):
        weyl_condition_check(1, 1, 1.5, 0)


def test_gronwall_examples():
    assert gronwall_bound(1, [0.5], [1]) == pytest.approx(2.0)
    assert gronwall_bound(3.0, [], [1]) == 3.0
    assert gronwall_bound(0.0, [0.2], [1, 2]) == 0.0
    with pytest.raises(HypothesisViolated):
        gronwall_bound(1, [0.5, 0.5], [1])


def test_picard_without_state_dependence():
    f = ParametricSignal.affine(paper_step(), 0.0, "none")
    u = picard_solve(SemigroupSpec.scalar(-1), f, 1, (-1, 5))
    assert u.picard.residuals[-1] == 0.0
    assert u.picard.iterations <= 2
    x = paper_ode_solution()
    err = np.abs(u.values[:, 0] - x.values(u.grid)[:, 0]).max()
    assert err <= u.tail_bound + u.quad_tol + 1e-12


def test_picard_zero_forcing():
    f = ParametricSignal.affine(None, 0.25, "sin")
    u = picard_solve(SemigroupSpec.scalar(-1), f, 2, (0, 3))
    assert u.picard.iterations == 1
    assert np.all(u.values == 0.0)


def test_picard_sin_coupling_against_time_stepping():
    f = ParametricSignal.affine(sine(), 0.25, "sin")
    u = picard_solve(SemigroupSpec.scalar(-1), f, 2, (0, 20))
    assert u.picard.k_bound == pytest.approx(0.2797, abs=1e-4)
    r = u.picard.residuals
    assert all(b <= (u.picard.k_bound + 0.05) * a for a, b in zip(r, r[1:]))
    ts = np.linspace(0, 20, 81)
    # start far back so the initial value is forgotten (e^{-60} ~ 1e-26)
    ref = dense_time_stepping(-1.0, lambda t, v: math.sin(t) + 0.25 * math.sin(v[0]),
                              -60.0, 20.0, ts, 0.0)
    assert np.abs(u(ts)[:, 0] - ref).max() <= 1e-3


def test_picard_errors():
    S = SemigroupSpec.scalar(-1)
    with pytest.raises(NotAContraction):
        picard_solve(S, ParametricSignal.affine(sine(), 0.9, "sin"), 2, (0, 1))
    with pytest.raises(InvalidExponent):
        picard_solve(S, ParametricSignal.affine(sine(), sine() * 0.1, "sin"), 1.5, (0, 1))
    with pytest.raises(MaxIterExceeded) as info:
        picard_solve(S, ParametricSignal.affine(sine(), 0.25, "sin"), 2, (0, 1), max_iter=3,
                     quad_check=False)
    assert len(info.value.history) == 3


def test_picard_time_dependent_lipschitz():
    f = ParametricSignal.affine(sine(), sine() * 0.3, "sin")
    u = picard_solve(SemigroupSpec.scalar(-1), f, 2, (0, 5))
    # unit window centred on a peak of sin^2
    assert u.meta["lipschitz_norm"] == pytest.approx(0.3 * math.sqrt((1 + math.sin(1)) / 2),
                                                     abs=1e-4)
    assert u.picard.residuals[-1] <= 1e-10


def test_mild_solution_consistency():
    S = SemigroupSpec.scalar(-1)
    f = ParametricSignal.affine(sine(), 0.25, "sin")
    u = picard_solve(S, f, 2, (0, 10))
    tol = 2 * (1e-6 + u.quad_tol)
    for ia, it in ((0, 512), (256, 2000), (1000, 2560)):
        nodes = u.grid[ia:it + 1]
        conv = gamma_operator(S, f, nodes, u.values[ia:it + 1])[-1]
        rhs = semigroup_apply(S, nodes[-1] - nodes[0], u.values[ia]) + conv
        assert np.linalg.norm(u.values[it] - rhs) <= tol


def test_mild_solution_outputs(tmp_path):
    u = linear_solution_on_grid(SemigroupSpec.scalar(-1), paper_step(), 0, 2, density=32)
    u.to_csv(tmp_path / "u.csv")
    lines = (tmp_path / "u.csv").read_text().splitlines()
    assert lines[0] == "t,u_1" and len(lines) == u.grid.size + 1
    cert = u.certificate()
    json.dumps(cert)
    assert set(cert) >= {"tail_bound", "quad_tol", "picard"}
    with pytest.raises(ValueError):
        u(5.0)


def test_translation_diagnostic_examples():
    f = ParametricSignal(1, lambda t, v: np.sin(t)[:, None], 0.0,
                         label="sin(t)")
    grid = np.linspace(-40, 10, 50 * 64 + 1)
    u = MildSolution(grid, np.zeros((grid.size, 1)), 0.0, 0.0)
    d = translation_diagnostic(f, u, math.pi, 2, 2 * math.pi, 1.0, 1.0)
    assert d.alpha0 == pytest.approx(2.0, abs=1e-5)
    assert d.weighted == pytest.approx(2.0, abs=1e-5)
    d0 = translation_diagnostic(f, u, 0.0, 2, 2 * math.pi, 1.0, 1.0)
    assert d0.alpha0 == 0.0 and d0.weighted == 0.0
    dp = translation_diagnostic(f, u, 2 * math.pi, 2, 2 * math.pi, 1.0, 0.5)
    assert dp.alpha0 == pytest.approx(0.0, abs=1e-9)
    assert dp.weighted == pytest.approx(0.0, abs=1e-9)
    # gamma != delta1 uses the closed-form kernel: weighted = h / (delta1 gamma)
    dg = translation_diagnostic(f, u, math.pi, 2, 2 * math.pi, 1.0, 2.0)
    assert dg.weighted == pytest.approx(1.0, abs=1e-5)
