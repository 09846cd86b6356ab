import math

import numpy as np
import pytest

from oracles import danilov_brute, window_average_quad
from weylap.errors import DegenerateScan, DimensionMismatch, InvalidExponent, NotConverged
from weylap.seminorms import (ScanSpec, danilov_membership, danilov_tail, stepanov_distance,
                              stepanov_norm, top_mass, truncated_distance, weyl_norm)
from weylap.signals import (constant, paper_primitive, paper_step, shift, sine, zero)


def test_stepanov_step_unit_window():
    est = stepanov_norm(paper_step(), 1, 1, ScanSpec(-5, 5))
    assert est.value == pytest.approx(0.5, abs=1e-6)


def test_stepanov_step_long_window():
    est = stepanov_norm(paper_step(), 1, 10, ScanSpec(-20, 5))
    assert est.value == pytest.approx(0.05, abs=1e-6)


def test_stepanov_sin_period_window():
    est = stepanov_norm(sine(), 2, 2 * math.pi, ScanSpec(-10, 10))
    assert est.value == pytest.approx(1 / math.sqrt(2), abs=1e-6)


def test_stepanov_constant_any_window():
    for l in (0.3, 1.0, 7.0):
        assert stepanov_norm(constant(3.0), 2, l, ScanSpec(-2, 2)).value \
            == pytest.approx(3.0, abs=1e-12)


def test_stepanov_matches_quadrature_oracle():
    F = paper_primitive()
    scan = ScanSpec(-1.0, 1.0, 0.25)
    est = stepanov_norm(F, 2, 1.5, scan)
    ref = max(window_average_quad(F, 2, xi, 1.5, (0.0, 0.5)) for xi in scan.grid()) ** 0.5
    assert est.value == pytest.approx(ref, abs=1e-5)


def test_scan_validation():
    with pytest.raises(DegenerateScan):
        ScanSpec(1, 1)
    with pytest.raises(DegenerateScan):
        ScanSpec(0, 1, 0.0)
    with pytest.raises(DegenerateScan):
        ScanSpec(0, 1, 0.1, 8)
    with pytest.raises(DegenerateScan):
        stepanov_norm(sine(), 1, 0.0, ScanSpec(0, 1))
    with pytest.raises(InvalidExponent):
        stepanov_norm(sine(), 0.5, 1.0, ScanSpec(0, 1))
    assert ScanSpec.parse("-5:5:0.5").grid().size == 21


def test_weyl_step_decays_with_monotone_history():
    est = weyl_norm(paper_step(), 1, ScanSpec(-20, 5, 0.05))
    assert est.value <= 1e-3
    vals = [v for _, v in est.history]
    assert all(b <= a + 1e-15 for a, b in zip(vals, vals[1:]))


def test_weyl_sin():
    est = weyl_norm(sine(), 2, ScanSpec(-10, 10, 0.05))
    assert est.value == pytest.approx(1 / math.sqrt(2), abs=1e-4)


def test_weyl_constant_converges_in_two_windows():
    est = weyl_norm(constant(1.0), 1, ScanSpec(-1, 1))
    assert len(est.history) == 2
    assert est.value == pytest.approx(1.0)


def test_weyl_not_converged_carries_history():
    with pytest.raises(NotConverged) as info:
        weyl_norm(paper_step(), 1, ScanSpec(-5, 5, 0.05), max_windows=3, tol=1e-12)
    assert len(info.value.history) == 3
    assert info.value.estimate.converged is False


def test_stepanov_distance_examples():
    scan = ScanSpec(-10, 10)
    d = stepanov_distance(sine(), shift(sine(), math.pi), 2, 2 * math.pi, scan)
    assert d.value == pytest.approx(math.sqrt(2), abs=1e-6)
    d = stepanov_distance(paper_step(), shift(paper_step(), 10.0), 1, 1, ScanSpec(-15, 5))
    assert d.value == pytest.approx(0.5, abs=1e-9)
    assert stepanov_distance(sine(), sine(), 1, 1, scan).value == 0.0
    with pytest.raises(DimensionMismatch):
        stepanov_distance(sine(), constant([1.0, 1.0]), 1, 1, scan)


def test_truncated_distance_saturates():
    d = truncated_distance(constant(5.0), zero(), 1.0, ScanSpec(0, 1))
    assert d.value == pytest.approx(1.0)


def test_top_mass_partial_cell():
    v = np.array([1.0, 3.0, 2.0])
    m = np.array([1.0, 1.0, 1.0])
    assert top_mass(v, m, 1.5) == pytest.approx(3.0 + 0.5 * 2.0)
    assert top_mass(v, m, 10.0) == pytest.approx(6.0)
    assert top_mass(v, m, 0.0) == 0.0


def test_top_mass_matches_brute_force():
    rng = np.random.default_rng(3)
    for _ in range(50):
        n = rng.integers(1, 9)
        v = rng.uniform(0, 2, n)
        m = rng.uniform(0.1, 1, n)
        b = rng.uniform(0, m.sum())
        assert top_mass(v, m, b) == pytest.approx(danilov_brute(v, m, b), abs=1e-12)


def test_danilov_step_and_constant():
    assert danilov_tail(paper_step(), 1, 0.1, 100, ScanSpec(-100, 5, 0.5)) \
        == pytest.approx(0.005, abs=1e-9)
    assert danilov_tail(constant(2.0), 2, 0.1, 10, ScanSpec(0, 5)) \
        == pytest.approx(2 * math.sqrt(0.1), abs=1e-9)


def test_danilov_membership():
    scan = ScanSpec(-5, 5, 0.05)
    res = danilov_membership(paper_step(), 1, [10, 100, 1000, 10000],
                             [0.1, 0.01, 0.001, 0.0001], scan, tol=1e-4)
    assert res.in_Mstar
    res = danilov_membership(constant(1.0), 1, [10, 100], [0.1, 0.1], ScanSpec(0, 1), tol=1e-4)
    assert not res.in_Mstar
    with pytest.raises(NotConverged):
        danilov_membership(constant(1.0), 1, [10, 100], [0.1, 0.01], ScanSpec(0, 1), tol=1e-4)
