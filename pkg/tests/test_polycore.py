from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sphereball.polycore import (
    DimensionError,
    LinearMap,
    MultiPoly,
    dii_sq_poly,
    dij_poly,
    dij_power,
    dmu_poly,
    laplace_beltrami_direct,
    laplace_beltrami_poly,
    poly_eval,
    rot_compose,
)
from sphereball.spheregeo import rotation_matrix

X1 = MultiPoly.variable(3, 0)
X2 = MultiPoly.variable(3, 1)
X3 = MultiPoly.variable(3, 2)


def polys(dim, max_deg=4):
    expo = st.tuples(*[st.integers(0, max_deg) for _ in range(dim)]).filter(lambda e: sum(e) <= max_deg)
    coef = st.floats(-3, 3, allow_nan=False).filter(lambda c: abs(c) > 1e-3)
    return st.dictionaries(expo, coef, max_size=6).map(lambda d: MultiPoly(dim, d))


def unit_points(dim, n, seed=0):
    z = np.random.default_rng(seed).standard_normal((n, dim))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


# -- poly_eval -----------------------------------------------------------

def test_eval_x1x2():
    assert poly_eval(MultiPoly(3, {(1, 1, 0): 1.0}), [1.0, 2.0, 0.0]) == 2.0


def test_eval_zero():
    assert poly_eval(MultiPoly.zero(3), [0.3, -4.0, 7.0]) == 0.0


def test_eval_unit_circle_root():
    p = 1.0 - MultiPoly.norm_squared(3)
    assert abs(poly_eval(p, [0.6, 0.8, 0.0])) < 1e-15


def test_eval_dimension_mismatch():
    with pytest.raises((DimensionError, ValueError)):
        poly_eval(X1, [1.0, 2.0])


@given(polys(3), polys(3))
@settings(max_examples=40, deadline=None)
def test_eval_is_a_ring_map(p, q):
    x = np.array([[0.3, -0.7, 0.2], [1.1, 0.4, -0.5]])
    assert np.allclose(poly_eval(p + q, x), poly_eval(p, x) + poly_eval(q, x), atol=1e-9)
    assert np.allclose(poly_eval(p * q, x), poly_eval(p, x) * poly_eval(q, x), atol=1e-8)


# -- rotation derivatives ----------------------------------------------

def test_d12_of_x1():
    assert dij_poly(X1, 0, 1).allclose(X2)


def test_d12_kills_planar_norm():
    assert dij_poly(X1 * X1 + X2 * X2, 0, 1).is_zero


def _angle_derivative(p, i, j, x, r, h=1e-2):
    # r-th derivative in theta of p(Q_theta x), with Q rotating e_i toward e_j
    def g(th):
        return poly_eval(p, rotation_matrix(3, i, j, th) @ x)

    if r == 1:
        return (g(h) - g(-h)) / (2 * h)
    return (g(h) - 2 * g(0.0) + g(-h)) / h ** 2


def test_d12_squared_of_x1x2():
    p = X1 * X2
    got = dij_power(p, 0, 1, 2)
    assert got.allclose(-4.0 * p)
    # independent oracle: second derivative in the rotation angle
    for x in unit_points(3, 5, seed=1):
        assert abs(poly_eval(got, x) - _angle_derivative(p, 0, 1, x, 2)) < 1e-4


@given(polys(3))
@settings(max_examples=30, deadline=None)
def test_dij_matches_angle_derivative(p):
    # Q rotates e_i toward e_j, so d/dtheta p(Q x) = x_i d_j p - x_j d_i p = -D_{i,j} p
    x = unit_points(3, 1, seed=2)[0]
    for i, j in ((0, 1), (0, 2), (1, 2)):
        lhs = poly_eval(dij_poly(p, i, j), x)
        fd = _angle_derivative(p, i, j, x, 1, h=1e-4)
        assert abs(lhs + fd) < 1e-5 * (1 + abs(fd))


@given(polys(3), polys(3))
@settings(max_examples=30, deadline=None)
def test_dij_leibniz_and_antisymmetry(p, q):
    lhs = dij_poly(p * q, 0, 2)
    assert lhs.allclose(p * dij_poly(q, 0, 2) + q * dij_poly(p, 0, 2), atol=1e-8)
    assert dij_poly(p, 2, 0).allclose(-dij_poly(p, 0, 2))


# -- Laplace-Beltrami ----------------------------------------------------

def test_laplace_x1x2_d3():
    assert laplace_beltrami_poly(X1 * X2).allclose(-6.0 * X1 * X2)


def test_laplace_constant():
    assert laplace_beltrami_poly(MultiPoly.constant(3, 2.5)).is_zero


def test_laplace_x1_d3():
    assert laplace_beltrami_poly(X1).allclose(-2.0 * X1)


@given(polys(3, 5))
@settings(max_examples=30, deadline=None)
def test_laplace_two_routes_agree(p):
    assert laplace_beltrami_poly(p).allclose(laplace_beltrami_direct(p), atol=1e-8)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_laplace_eigen_on_harmonic_monomial_combos(d):
    # Re (x1 + i x2)^n is harmonic of degree n
    z1, z2 = MultiPoly.variable(d, 0), MultiPoly.variable(d, 1)
    for n in range(1, 6):
        re = MultiPoly.zero(d)
        for k in range(0, n + 1, 2):
            re = re + comb(n, k) * (-1) ** (k // 2) * z1 ** (n - k) * z2 ** k
        assert laplace_beltrami_poly(re).allclose(-n * (n + d - 2) * re, atol=1e-8)


# -- D_mu and its decomposition ---------------------------------------------

def test_dmu_constant():
    assert dmu_poly(MultiPoly.constant(2, 1.0), 0.5).is_zero


def test_dmu_x1_d2():
    x = MultiPoly.variable(2, 0)
    assert dmu_poly(x, 0.5).allclose(-3.0 * x)


def _dmu_bruteforce(p, mu):
    # Delta p - <x, grad>^2 p - (d + 2mu - 1) <x, grad> p, written term by term
    d = p.dim
    out = MultiPoly.zero(d)
    for i in range(d):
        out = out + p.diff(i, 2)
    euler = MultiPoly.zero(d)
    for i in range(d):
        euler = euler + p.diff(i).mul_var(i)
    euler2 = MultiPoly.zero(d)
    for i in range(d):
        euler2 = euler2 + euler.diff(i).mul_var(i)
    return out - euler2 - (d + 2 * mu - 1) * euler


def test_dmu_x1x2_bruteforce():
    p = X1 * X2
    assert dmu_poly(p, 0.0).allclose(_dmu_bruteforce(p, 0.0))


@given(polys(3), st.sampled_from([0.0, 0.5, 1.3]))
@settings(max_examples=30, deadline=None)
def test_dmu_bruteforce(p, mu):
    assert dmu_poly(p, mu).allclose(_dmu_bruteforce(p, mu), atol=1e-8)


def test_dmu_eigenvalue_on_orthogonal_polynomial():
    # on B^1 with mu: Gegenbauer C_2^{mu+1/2}(t) ~ t^2 - 1/(2mu+2) has eigenvalue -n(n+d+2mu-1)
    for mu in (0.0, 0.5, 1.0):
        t = MultiPoly.variable(1, 0)
        p = t * t - 1.0 / (2 * mu + 2)
        assert dmu_poly(p, mu).allclose(-2 * (2 + 1 + 2 * mu - 1) * p)


def test_dii_sq_x1():
    for mu in (0.0, 0.5):
        assert dii_sq_poly(X1, 0, mu).allclose(-(2 * mu + 1) * X1)


def test_dii_sq_constant():
    assert dii_sq_poly(MultiPoly.constant(3, 4.0), 1, 0.5).is_zero


def test_decomposition_x1sq_x3():
    p = X1 * X1 * X3
    total = sum((dii_sq_poly(p, i, 0.5) for i in range(3)), MultiPoly.zero(3))
    for i in range(3):
        for j in range(i + 1, 3):
            total = total + dij_power(p, i, j, 2)
    assert total.allclose(dmu_poly(p, 0.5))


@given(polys(2, 5), st.sampled_from([0.0, 0.5]))
@settings(max_examples=25, deadline=None)
def test_decomposition_random(p, mu):
    total = dii_sq_poly(p, 0, mu) + dii_sq_poly(p, 1, mu) + dij_power(p, 0, 1, 2)
    assert total.allclose(dmu_poly(p, mu), atol=1e-8)


# -- rot_compose -------------------------------------------------------

def test_rot_compose_quarter_turn():
    q = LinearMap(rotation_matrix(3, 0, 1, np.pi / 2))
    got = rot_compose(X1, q)
    assert abs(poly_eval(got, [1.0, 0.0, 0.0])) < 1e-15


def test_rot_compose_identity():
    p = X1 * X2 * X2 - 3.0 * X3
    assert rot_compose(p, LinearMap(np.eye(3))).allclose(p)


@given(st.floats(-np.pi, np.pi))
@settings(max_examples=20, deadline=None)
def test_rot_compose_planar_invariant(th):
    p = X1 * X1 + X2 * X2
    assert rot_compose(p, LinearMap(rotation_matrix(3, 0, 1, th))).allclose(p, atol=1e-12)


@given(polys(3), st.floats(-np.pi, np.pi))
@settings(max_examples=25, deadline=None)
def test_rot_compose_pointwise(p, th):
    Q = rotation_matrix(3, 1, 2, th)
    x = unit_points(3, 4, seed=3)
    assert np.allclose(poly_eval(rot_compose(p, LinearMap(Q)), x), poly_eval(p, x @ Q.T), atol=1e-8)


def test_rot_compose_dimension_check():
    with pytest.raises(DimensionError):
        rot_compose(X1, LinearMap(np.eye(2)))
