import json
import math

import numpy as np
import pytest

from weylap.errors import DimensionMismatch, NonIntegrableTail
from weylap.signals import (Constant, ExpDecay, ParametricSignal, Primitive, PulseTrain, Sampled,
                            Sum, TrigSum, constant, dump_signal, from_spec, load_signal,
                            paper_ode_solution, paper_primitive, paper_step, primitive,
                            read_sampled_csv, shift, sine)


def test_step_values_are_right_continuous():
    f = paper_step()
    assert f(0.25) == 1.0
    assert f(3.0) == 0.0
    assert f(0.0) == 1.0
    assert f(0.5) == 0.0
    assert f(-1e-12) == 0.0


def test_values_shape():
    assert paper_step().values([0.1, 0.2]).shape == (2, 1)
    v = TrigSum(((1.0, 2.0),), (1.0,), (0.0,))
    assert v.dim == 2
    assert v.values(np.linspace(0, 1, 5)).shape == (5, 2)
    assert v(0.5).shape == (2,)


def test_primitive_of_step():
    F = paper_primitive()
    assert F(10.0) == pytest.approx(0.5, abs=1e-12)
    assert F(-1.0) == 0.0
    assert F(0.2) == pytest.approx(0.2, abs=1e-12)


def test_primitive_without_left_support_raises():
    with pytest.raises(NonIntegrableTail):
        primitive(sine())


def test_primitive_finite_anchor_uses_antiderivative():
    F = primitive(sine(), anchor=0.0)
    t = np.linspace(0, 5, 11)
    np.testing.assert_allclose(F.values(t)[:, 0], 1 - np.cos(t), atol=1e-12)


def test_primitive_numeric_fallback_matches_closed_form():
    x = paper_ode_solution()
    X = Primitive(x, -math.inf)
    # int_0^inf x = 1/2 (forcing mass, since x' = -x + f and x(inf)=0)
    assert X(60.0) == pytest.approx(0.5, abs=1e-9)


def test_ode_solution_closed_form():
    x = paper_ode_solution()
    assert x(0.5) == pytest.approx(1 - math.exp(-0.5), abs=1e-12)
    assert x(-1.0) == 0.0
    assert x(2.0) == pytest.approx((math.sqrt(math.e) - 1) * math.exp(-2.0), abs=1e-12)
    # both branches agree at t = 1/2
    assert x(0.5 - 1e-13) == pytest.approx(x(0.5), abs=1e-10)


def test_shift_by_period():
    f = sine()
    assert shift(f, 2 * math.pi)(1.0) == pytest.approx(math.sin(1.0), abs=1e-12)
    g = shift(shift(f, 1.0), 2.0)
    assert g.tau == pytest.approx(3.0)


def test_sum_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        Sum((constant(1.0), constant([1.0, 2.0])))


def test_algebra():
    f = paper_step() * 2.0 - constant(1.0)
    assert f(0.1) == pytest.approx(1.0)
    assert f(1.0) == pytest.approx(-1.0)
    assert (-f)(1.0) == pytest.approx(1.0)


def test_pulse_train_antiderivative():
    p = PulseTrain(period=2.0, width=0.5, height=3.0, phase=0.25)
    t = np.linspace(-3, 7, 41)
    a = p.antiderivative(t)[:, 0]
    # differences equal the exact integral over the interval
    fine = np.linspace(-3, 7, 400001)
    cum = np.concatenate([[0], np.cumsum(p.values(fine[:-1])[:, 0] * np.diff(fine))])
    np.testing.assert_allclose(a - a[0], np.interp(t, fine, cum), atol=1e-4)


def test_expdecay_window():
    e = ExpDecay(2.0, 1.0, 1.0, 3.0)
    assert e(0.5) == 0.0
    assert e(1.0) == pytest.approx(2.0)
    assert e(2.0) == pytest.approx(2 * math.exp(-1.0))
    assert e(3.0) == 0.0


def test_sampled_interpolation_and_extension():
    s = Sampled((0.0, 1.0, 2.0), ((0.0,), (2.0,), (0.0,)))
    assert s(0.5) == pytest.approx(1.0)
    assert s(-5.0) == 0.0
    assert s(9.0) == 0.0
    assert s.antiderivative(np.array([2.0]))[0, 0] - s.antiderivative(np.array([0.0]))[0, 0] \
        == pytest.approx(2.0)


def test_csv_and_json_round_trip(tmp_path):
    csv_path = tmp_path / "sig.csv"
    csv_path.write_text("t,value\n0,0\n1,1\n2,0\n")
    s = read_sampled_csv(csv_path)
    assert s(1.5) == pytest.approx(0.5)

    spec = {"kind": "sum", "children": [{"kind": "paper_step"},
                                        {"kind": "trig_sum", "params": {"amplitudes": [0.5],
                                                                        "omegas": [2.0]}}]}
    f = from_spec(spec)
    assert f(0.1) == pytest.approx(1 + 0.5 * math.sin(0.2))
    path = tmp_path / "f.json"
    dump_signal(f, path)
    g = load_signal(path)
    t = np.linspace(-2, 2, 17)
    np.testing.assert_array_equal(f.values(t), g.values(t))
    (tmp_path / "s.json").write_text(json.dumps({"kind": "sampled", "params": {"csv": "sig.csv"}}))
    assert load_signal(tmp_path / "s.json")(0.5) == pytest.approx(0.5)


def test_unknown_kind():
    with pytest.raises(ValueError):
        from_spec({"kind": "nope"})


def test_parametric_affine():
    f = ParametricSignal.affine(sine(), 0.25, "sin")
    out = f(np.array([1.0]), np.array([[2.0]]))
    assert out[0, 0] == pytest.approx(math.sin(1.0) + 0.25 * math.sin(2.0))
    assert f.constant_lipschitz
    assert f.lipschitz == 0.25
    g = ParametricSignal.affine(None, sine(), "tanh")
    assert not g.constant_lipschitz
    assert g.lipschitz_at(np.array([-math.pi / 2]))[0] == pytest.approx(1.0)
    frozen = f.frozen(0.0)
    assert frozen(1.0) == pytest.approx(math.sin(1.0))


def test_constant_zero_left_support():
    assert Constant((0.0,)).left_support() == -math.inf
    assert Constant((1.0,)).left_support() is None
