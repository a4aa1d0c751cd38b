import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sphereball.fnhandle import FnHandle
from sphereball.polycore import MultiPoly, dij_power, poly_eval
from sphereball.spheregeo import (
    PlaneRotation,
    dij_num,
    forward_diff,
    lp_norm_sphere,
    rotate,
    sphere_rule,
    tangential_partial,
)

E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])


def fn(func, name="f"):
    return FnHandle(func, 3, "sphere", name)


X1 = fn(lambda X: X[:, 0], "x1")
ONE = fn(lambda X: np.ones(len(X)), "one")


def test_rotate_quarter_turn():
    assert np.allclose(rotate(PlaneRotation(0, 1, np.pi / 2), E1), E2, atol=1e-15)


def test_rotate_zero_angle():
    x = np.array([0.6, 0.0, 0.8])
    assert np.array_equal(rotate(PlaneRotation(1, 2, 0.0), x), x)


@given(st.floats(-6.0, 6.0), st.sampled_from([(0, 1), (0, 2), (1, 2)]))
@settings(max_examples=40, deadline=None)
def test_rotate_inverse(th, plane):
    x = np.array([0.48, -0.6, 0.64])
    y = rotate(PlaneRotation(*plane, -th), rotate(PlaneRotation(*plane, th), x))
    assert np.max(np.abs(y - x)) < 1e-14


@pytest.mark.parametrize("deg", [2, 5, 10, 31])
@pytest.mark.parametrize("split", [False, True])
def test_sphere_rule_moments(deg, split):
    rule = sphere_rule(3, deg, split=split)
    x = rule.points
    assert rule.weights.sum() == pytest.approx(4 * np.pi, rel=1e-13)
    assert rule.weights @ x[:, 0] ** 2 == pytest.approx(4 * np.pi / 3, rel=1e-13)
    assert abs(rule.weights @ (x[:, 0] * x[:, 1])) < 1e-13


def test_sphere_rule_exact_on_declared_degree():
    # int x1^a x2^b x3^c over S^2 by the Gamma-function formula
    from math import gamma

    def moment(a, b, c):
        if a % 2 or b % 2 or c % 2:
            return 0.0
        al, bl, cl = (a + 1) / 2, (b + 1) / 2, (c + 1) / 2
        return 2 * gamma(al) * gamma(bl) * gamma(cl) / gamma(al + bl + cl)

    for deg in (6, 11):
        rule = sphere_rule(3, deg)
        x = rule.points
        for a in range(deg + 1):
            for b in range(deg + 1 - a):
                for c in range(deg + 1 - a - b):
                    got = rule.weights @ (x[:, 0] ** a * x[:, 1] ** b * x[:, 2] ** c)
                    assert got == pytest.approx(moment(a, b, c), abs=1e-12)


def test_lp_norm_constant():
    rule = sphere_rule(3, 8)
    assert lp_norm_sphere(ONE, 2, rule) == pytest.approx(np.sqrt(4 * np.pi))


def test_lp_norm_coordinate():
    rule = sphere_rule(3, 8)
    assert lp_norm_sphere(X1, 2, rule) == pytest.approx(np.sqrt(4 * np.pi / 3))
    assert abs(lp_norm_sphere(X1, np.inf, sphere_rule(3, 40)) - 1.0) < 1e-3


def test_forward_diff_constant():
    assert forward_diff(ONE, 3, 0, 1, 0.3, E1) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("th", [0.01, 0.3, 1.2])
def test_forward_diff_coordinate(th):
    assert forward_diff(X1, 1, 0, 1, th, E1) == pytest.approx(1 - np.cos(th), abs=1e-15)
    assert forward_diff(X1, 2, 0, 1, th, E1) == pytest.approx(1 - 2 * np.cos(th) + np.cos(2 * th), abs=1e-15)


def test_dij_num_coordinate():
    assert abs(dij_num(X1, 1, 0, 1, E1)) < 1e-10
    assert dij_num(X1, 1, 0, 1, (E1 + E2) / np.sqrt(2)) == pytest.approx(1 / np.sqrt(2), abs=1e-8)


def test_dij_num_constant():
    assert abs(dij_num(ONE, 2, 0, 2, E1)) < 1e-12


def test_dij_num_second_order_matches_exact():
    p = MultiPoly(3, {(1, 1, 0): 1.0})
    f = FnHandle.from_poly(p, "sphere")
    x = np.array([[0.48, -0.6, 0.64], [0.0, 0.8, -0.6], [0.36, 0.48, 0.8]])
    for i, j in ((0, 1), (0, 2), (1, 2)):
        exact = poly_eval(dij_power(p, i, j, 2), x)
        assert np.allclose(dij_num(f, 2, i, j, x), exact, atol=1e-8)


def test_tangential_partial():
    z = fn(lambda X: np.sum(X * X, axis=1), "norm2")
    x = np.array([0.48, -0.6, 0.64])
    for j in range(3):
        assert abs(tangential_partial(z, j, x)) < 1e-10
    assert tangential_partial(X1, 0, E2) == pytest.approx(1.0, abs=1e-8)
    assert abs(tangential_partial(X1, 0, E1)) < 1e-10
