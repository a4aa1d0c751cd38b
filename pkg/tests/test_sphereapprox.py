import numpy as np
import pytest
from scipy.special import eval_legendre

from sphereball.fnhandle import FnHandle
from sphereball.orthocore import CutoffEta
from sphereball.polycore import MultiPoly, dij_power, poly_eval
from sphereball.sphereapprox import (
    ZonalSpec,
    best_l2_error,
    en_upper,
    frac_laplacian_l2,
    hnorm_sphere,
    kfunc_sphere_upper,
    lipschitz_norm_sphere,
    modulus_curve,
    modulus_sphere,
    project_degree,
    sobolev_norm_sphere,
    vn_apply,
    zonal_eval,
)
from sphereball.spheregeo import forward_diff, lp_norm_sphere, sphere_rule

PAIRS = ((0, 1), (0, 2), (1, 2))


def poly(terms, dim=3):
    return MultiPoly(dim, {e: c for e, c in terms})


def ph(p, name="p"):
    return FnHandle.from_poly(p, "sphere", name)


X1 = poly([((1, 0, 0), 1.0)])
X1X2 = poly([((1, 1, 0), 1.0)])
X1X2X3 = poly([((1, 1, 1), 1.0)])
ONE = FnHandle(lambda X: np.ones(len(X)), 3, "sphere", "one")
ABS_X3 = FnHandle(lambda X: np.abs(X[:, 2]), 3, "sphere", "abs_x3")


@pytest.fixture(scope="module")
def rule():
    return sphere_rule(3, 24)


# -- zonal harmonics -------------------------------------------------------

def test_zonal_degree_one():
    t = np.linspace(-1, 1, 9)
    assert np.allclose(zonal_eval(1, 3, t), 3 * t, atol=1e-14)


@pytest.mark.parametrize("n", range(9))
def test_zonal_at_one_and_legendre(n):
    assert zonal_eval(n, 3, 1.0) == pytest.approx(2 * n + 1)
    t = np.linspace(-1, 1, 13)
    assert np.allclose(zonal_eval(n, 3, t), (2 * n + 1) * eval_legendre(n, t), atol=1e-12)


def test_zonal_degree_zero():
    assert np.all(zonal_eval(0, 3, np.linspace(-1, 1, 5)) == 1.0)


# -- projections and V_n ------------------------------------------------------

def test_project_reproduces_harmonic(rule):
    f = ph(X1X2)
    x = np.random.default_rng(0).standard_normal((20, 3))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    assert np.max(np.abs(project_degree(f, 2, rule)(x) - poly_eval(X1X2, x))) < 1e-9
    assert np.max(np.abs(project_degree(f, 1, rule)(x))) < 1e-9


def test_project_constant(rule):
    assert np.allclose(project_degree(ONE, 0, rule)(rule.points), 1.0, atol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 5])
def test_vn_reproduces(rule, n):
    assert np.max(np.abs(vn_apply(ph(X1), ZonalSpec(n, 3), rule)(rule.points) - rule.points[:, 0])) < 1e-8
    assert np.max(np.abs(vn_apply(ONE, ZonalSpec(n, 3), rule)(rule.points) - 1.0)) < 1e-10


def test_vn_filters_degree_three(rule):
    # x1x2x3 = (degree-3 harmonic) + (degree-1 part); V_2 multiplies the first by eta(3/2) = 1/2
    f = ph(X1X2X3)
    err = en_upper(f, 2, 2, rule)
    e2 = best_l2_error(f, 2, rule)
    assert err > 1e-3
    c = err / e2
    assert c == pytest.approx(1 - float(CutoffEta()(1.5)), rel=1e-10)
    # V_2 f lies in Pi_4, so the error dominates the distance to Pi_4
    assert err >= best_l2_error(f, 5, rule) - 1e-12


# -- best approximation ----------------------------------------------------

def test_best_l2_x1_squared(rule):
    f = ph(poly([((2, 0, 0), 1.0)]))
    # ||x1^2 - 1/3||^2 = 4 pi (1/5 - 2/9 + 1/9)
    ref = np.sqrt(4 * np.pi * (1 / 5 - 1 / 9))
    assert ref == pytest.approx(np.sqrt(16 * np.pi / 45))
    assert best_l2_error(f, 1, rule) == pytest.approx(ref, rel=1e-12)
    assert best_l2_error(f, 1, rule, method="kernel") == pytest.approx(ref, rel=1e-10)


@pytest.mark.parametrize("n", [1, 3, 4, 6])
def test_best_l2_zero_inside(rule, n):
    p = poly([((n - 1, 0, 0), 1.0), ((0, 1, 0), 0.5)]) if n > 1 else poly([((0, 0, 0), 2.0)])
    assert best_l2_error(ph(p), n, rule) < 1e-7


def test_best_l2_harmonic_inside(rule):
    assert best_l2_error(ph(X1X2), 3, rule) < 1e-7


def test_en_upper_polynomial(rule):
    p = poly([((2, 0, 1), 1.0), ((0, 1, 0), -2.0)])
    assert en_upper(ph(p), 3, 2, rule) < 1e-8


def test_en_upper_ratio_abs_x3():
    rule = sphere_rule(3, 64, split=True)
    ratios = [en_upper(ABS_X3, n, 2, rule) / best_l2_error(ABS_X3, n, rule, N_max=32) for n in (4, 8, 16, 32)]
    print("en_upper / E_n for |x3|:", np.round(ratios, 3).tolist())
    assert all(0.1 < r < 10 for r in ratios)
    assert max(ratios) / min(ratios) < 2
    # V_n f lies in Pi_2n
    for n in (4, 8):
        assert en_upper(ABS_X3, n, 2, rule) >= best_l2_error(ABS_X3, 2 * n + 1, rule, N_max=32)


# -- modulus and K-functional --------------------------------------------------

def test_modulus_constant(rule):
    assert modulus_sphere(ONE, 2, 0.3, 2, rule) < 1e-13


@pytest.mark.parametrize("t", [0.05, 0.2, 0.6])
def test_modulus_coordinate_sup(rule, t):
    got = modulus_sphere(ph(X1), 1, t, np.inf, rule)
    assert got == pytest.approx(2 * np.sin(t / 2), rel=1e-2)
    assert got <= 2 * np.sin(t / 2) + 1e-12


def test_modulus_monotone(rule):
    ts = np.linspace(0.05, 1.0, 12)
    om = modulus_curve(ABS_X3, 2, ts, 2, rule)
    assert np.all(np.diff(om) >= 0)


def test_kfunc_polynomial_candidate(rule):
    p = poly([((1, 1, 0), 1.0), ((0, 0, 1), 1.0)])
    t = 0.25
    val, info = kfunc_sphere_upper(ph(p), 1, t, 2, rule, [2, 4])
    bound = t * max(lp_norm_sphere(ph(dij_power(p, i, j, 1)), 2, rule) for i, j in PAIRS)
    assert val <= bound * (1 + 1e-9)


def test_kfunc_at_zero(rule):
    degs = [1, 2, 4]
    val, _ = kfunc_sphere_upper(ABS_X3, 1, 0.0, 2, rule, degs)
    dists = [en_upper(ABS_X3, m, 2, rule) for m in degs]
    assert val == pytest.approx(min(dists), rel=1e-12)


def test_kfunc_modulus_band_abs_x3():
    rule = sphere_rule(3, 32, split=True)
    t = 1 / 8
    k, _ = kfunc_sphere_upper(ABS_X3, 1, t, np.inf, rule, [1, 2, 4, 8, 16])
    om = modulus_sphere(ABS_X3, 1, t, np.inf, rule)
    c = max(k / om, om / k)
    print(f"K/omega for |x3| at t=1/8: {k / om:.3f} (band c = {c:.3f})")
    assert np.isfinite(c) and c < 4


# -- fractional Laplacian -----------------------------------------------------

def test_frac_laplacian_harmonic(rule):
    f = ph(X1X2)
    got = frac_laplacian_l2(f, 1.0, 6, rule)(rule.points)
    assert np.max(np.abs(got - 6 * poly_eval(X1X2, rule.points))) < 1e-9


def test_frac_laplacian_constant(rule):
    assert np.max(np.abs(frac_laplacian_l2(ONE, 0.7, 6, rule)(rule.points))) < 1e-10


def test_frac_laplacian_half(rule):
    got = frac_laplacian_l2(ph(X1), 0.5, 6, rule)(rule.points)
    assert np.max(np.abs(got - np.sqrt(2) * rule.points[:, 0])) < 1e-10


# -- norms ---------------------------------------------------------------------

def test_sobolev_constant(rule):
    for r in (1, 2, 3):
        assert sobolev_norm_sphere(ONE, r, 2, rule) == pytest.approx(np.sqrt(4 * np.pi), rel=1e-8)


def test_sobolev_coordinate_sup():
    # D_{1,2} x1 = x2, D_{1,3} x1 = x3, D_{2,3} x1 = 0; the sup is taken over the nodes
    rule = sphere_rule(3, 40)
    got = sobolev_norm_sphere(ph(X1), 1, np.inf, rule)
    grid = np.abs(rule.points).max(axis=0).sum()
    assert got == pytest.approx(grid, abs=1e-8)
    assert got == pytest.approx(3.0, abs=1e-2)


def test_sobolev_poly_vs_numeric(rule):
    p = poly([((2, 1, 0), 1.0), ((0, 0, 3), -0.5), ((1, 0, 0), 1.0)])
    numeric = FnHandle(lambda X: poly_eval(p, X), 3, "sphere", "numeric")
    for r in (1, 2):
        a = sobolev_norm_sphere(ph(p), r, 2, rule)
        b = sobolev_norm_sphere(numeric, r, 2, rule)
        assert abs(a - b) <= 1e-6 * a


def test_lipschitz_constant(rule):
    assert lipschitz_norm_sphere(ONE, 1, 0.5, 1, 2, rule) == pytest.approx(np.sqrt(4 * np.pi), rel=1e-8)


def test_lipschitz_alpha_zero(rule):
    p = poly([((1, 1, 0), 1.0), ((0, 0, 2), 0.5), ((0, 1, 0), 1.0)])
    f = ph(p)
    grid = np.array([0.1, 0.4, 1.0])
    got = lipschitz_norm_sphere(f, 1, 0.0, 1, 2, rule, theta_grid=grid)
    sup = 0.0
    for i, j in PAIRS:
        g = ph(dij_power(p, i, j, 1))
        for th in grid:
            sup = max(sup, lp_norm_sphere(FnHandle(lambda X: forward_diff(g, 1, i, j, th, X), 3), 2, rule))
    assert got == pytest.approx(lp_norm_sphere(f, 2, rule) + sup, rel=1e-7)


def test_hnorm_constant(rule):
    assert hnorm_sphere(ONE, 1, 0.5, 1, 2, rule) == pytest.approx(np.sqrt(4 * np.pi), rel=1e-8)


def test_hnorm_polynomial_finite(rule):
    f = ph(poly([((1, 1, 1), 1.0)]))
    for alpha in (0.0, 0.5, 0.9):
        assert np.isfinite(hnorm_sphere(f, 1, alpha, 1, 2, rule))


def test_hnorm_abs_x3_modulus_only():
    rule = sphere_rule(3, 32, split=True)
    vals = [hnorm_sphere(ABS_X3, 0, a, 1, np.inf, rule, dyadic_K=k) for a in (0.5, 0.9) for k in (4, 6)]
    assert all(np.isfinite(vals))
    # omega_1(|x3|, t) ~ t, so the sup stabilises as more dyadic levels are added
    assert vals[1] <= 1.2 * vals[0] and vals[3] <= 1.5 * vals[2]
