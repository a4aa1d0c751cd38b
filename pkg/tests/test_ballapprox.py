import numpy as np
import pytest

from sphereball.ballapprox import (
    BallKernelSpec,
    ball_rules,
    best_l2_error_ball,
    hat_modulus_ball,
    hnorm_ball,
    kfunc_ball_upper,
    lipschitz_norm_ball,
    modulus_ball,
    pnmu_kernel,
    sobolev_norm_ball,
    vnmu_apply,
)
from sphereball.balldomain import ball_mass, ball_rule, d_id1_direct, lp_norm_ball, norm_did1
from sphereball.fnhandle import FnHandle
from sphereball.polycore import MultiPoly, dij_power
from sphereball.sphereapprox import ZonalSpec, vn_apply
from sphereball.spheregeo import sphere_rule
from sphereball.verify.corpus import corpus


def bh(func, d=2, name="f"):
    return FnHandle(func, d, "ball", name)


ONE = bh(lambda X: np.ones(len(X)), name="one")
X1 = FnHandle.from_poly(MultiPoly(2, {(1, 0): 1.0}), "ball", "x1")
POLE = bh(lambda X: 1.0 / (1.5 - X[:, 0] - 0.5 * X[:, 1]), name="pole")


def disc_points(n, seed=0, rmax=0.95):
    rng = np.random.default_rng(seed)
    ang = rng.uniform(0, 2 * np.pi, n)
    rad = rmax * np.sqrt(rng.uniform(0, 1, n))
    return np.stack([rad * np.cos(ang), rad * np.sin(ang)], axis=1)


# -- kernels -------------------------------------------------------------

@pytest.mark.parametrize("m", [1, 2])
def test_kernel_degree_zero(m):
    x, y = disc_points(5, 1), disc_points(5, 2)
    assert np.allclose(pnmu_kernel((2, m), 0, x, y), 1.0, atol=1e-13)


@pytest.mark.parametrize("m", [1, 2])
def test_kernel_reproducing(m):
    mu = (m - 1) / 2
    rule = ball_rule(2, mu, 12)
    a = 1.0 / ball_mass(2, mu)
    x, z = disc_points(4, 3), disc_points(3, 4)
    for k in range(5):
        left = pnmu_kernel((2, m), k, x, rule.points)
        right = pnmu_kernel((2, m), k, rule.points, z)
        got = a * (left * rule.weights) @ right
        assert np.max(np.abs(got - pnmu_kernel((2, m), k, x, z))) < 1e-6


@pytest.mark.parametrize("m", [1, 2])
def test_kernel_symmetric(m):
    x, y = disc_points(30, 5), disc_points(30, 6)
    for k in (1, 3, 6):
        assert np.max(np.abs(pnmu_kernel((2, m), k, x, y) - pnmu_kernel((2, m), k, y, x).T)) < 1e-8


# -- V_n^mu ----------------------------------------------------------------

@pytest.mark.parametrize("n", [1, 3])
def test_vn_reproduces_coordinate(n):
    rule = ball_rule(2, 0.5, 16)
    x = disc_points(40, 7)
    assert np.max(np.abs(vnmu_apply(X1, BallKernelSpec(n, 2, 2), rule)(x) - x[:, 0])) < 1e-7
    assert np.max(np.abs(vnmu_apply(ONE, BallKernelSpec(n, 2, 2), rule)(x) - 1.0)) < 1e-10


@pytest.mark.parametrize("m", [1, 2])
def test_vn_lift_consistency(m):
    # F(x, x') = f(x) on S^{d+m-1}; the sphere operator at (x, x') equals the ball operator at x
    n = 3
    f = POLE
    ball = vnmu_apply(f, BallKernelSpec(n, 2, m), ball_rule(2, (m - 1) / 2, 24))
    D = 2 + m
    srule = sphere_rule(D, 24)
    F = FnHandle(lambda Y: f(Y[:, :2]), D, "sphere", "F")
    sph = vn_apply(F, ZonalSpec(n, D), srule)
    x = disc_points(25, 8)
    ph = np.sqrt(1 - np.sum(x * x, axis=1))
    if m == 1:
        Y = np.column_stack([x, ph])
    else:
        psi = np.random.default_rng(9).uniform(0, 2 * np.pi, len(x))
        Y = np.column_stack([x, ph * np.cos(psi), ph * np.sin(psi)])
    assert np.max(np.abs(sph(Y) - ball(x))) < 1e-6


@pytest.mark.parametrize("m", [1, 2])
@pytest.mark.parametrize("r", [1, 2, 3])
def test_rotation_derivative_routes(m, r):
    rule = ball_rule(2, (m - 1) / 2, 40)
    op = vnmu_apply(POLE, BallKernelSpec(8, 2, m), rule).meta["operator"]
    X = rule.points
    many = op.dij(r, 0, 1, X)  # polynomial refit
    few = np.concatenate([op.dij(r, 0, 1, X[k:k + 40]) for k in range(0, 200, 40)])  # kernel jets
    assert np.max(np.abs(many[:200] - few)) <= 1e-10 * np.max(np.abs(few))


# -- best approximation ------------------------------------------------------

def test_best_l2_polynomial_inside():
    rule = ball_rule(2, 0.5, 20)
    p = FnHandle.from_poly(MultiPoly(2, {(2, 1): 1.0, (0, 1): -1.0, (0, 0): 0.3}), "ball")
    for n in (3, 5):
        assert best_l2_error_ball(p, n, rule) < 1e-7


def test_best_l2_interval_square():
    rule = ball_rule(1, 0.5, 12)
    f = bh(lambda X: X[:, 0] ** 2, d=1)
    got = best_l2_error_ball(f, 1, rule)
    assert got == pytest.approx(np.sqrt(4 / 45), rel=1e-12)
    # direct least squares over span{1, t} with the normalised measure dt/2
    t, w = rule.points[:, 0], rule.weights / rule.total_mass
    A = np.column_stack([np.ones_like(t), t]) * np.sqrt(w)[:, None]
    coef, *_ = np.linalg.lstsq(A, t ** 2 * np.sqrt(w), rcond=None)
    resid = np.sqrt(np.sum(w * (t ** 2 - coef[0] - coef[1] * t) ** 2))
    assert got == pytest.approx(resid, rel=1e-10)


def test_best_l2_two_methods():
    rule = ball_rule(2, 0.0, 24)
    for n in (1, 3, 6):
        a = best_l2_error_ball(POLE, n, rule)
        b = best_l2_error_ball(POLE, n, rule, method="kernel")
        assert a == pytest.approx(b, rel=1e-6)


@pytest.mark.parametrize("entry", [e.name for e in corpus(domain="ball")])
def test_best_l2_monotone(entry):
    f = corpus([entry])[0].handle()
    rule = ball_rule(2, 0.5, 40)
    E = [best_l2_error_ball(f, n, rule, N_max=16) for n in range(16)]
    # blocks that vanish by symmetry give equal neighbours up to cancellation in the Parseval tail
    slack = 1e-10 * lp_norm_ball(f, 2, rule, normalized=True)
    assert all(b <= a + slack for a, b in zip(E, E[1:]))


# -- moduli --------------------------------------------------------------------

def test_modulus_constant():
    rules = ball_rules(2, 0.5, 16)
    assert modulus_ball(ONE, 2, 0.3, 2, 0.5, rules) < 1e-13


@pytest.mark.parametrize("t", [0.1, 0.5])
def test_modulus_interval_chebyshev(t):
    rules = ball_rules(1, 0.0, 64)
    f = bh(lambda X: X[:, 0], d=1, name="t")
    assert modulus_ball(f, 1, t, np.inf, 0.0, rules) == pytest.approx(2 * np.sin(t / 2), rel=1e-2)


def test_modulus_rejects_wrong_mu():
    with pytest.raises(ValueError):
        modulus_ball(ONE, 1, 0.1, 2, 0.0, ball_rules(2, 0.5, 8))


def test_hat_modulus_constant():
    assert hat_modulus_ball(ONE, 2, 0.3, 2, ball_rule(2, 0.0, 16)) < 1e-13


def test_hat_modulus_linear():
    f = bh(lambda X: X[:, 0], d=1, name="t")
    t = 0.2
    got = hat_modulus_ball(f, 1, t, np.inf, ball_rule(1, 0.0, 40))
    assert got == pytest.approx(t, rel=1e-2)
    assert got <= t + 1e-12


# -- K-functionals ---------------------------------------------------------

@pytest.mark.parametrize("mu", [0.0, 0.5])
def test_kfunc_at_zero(mu):
    rules = ball_rules(2, mu, 24, lift_degree=16)
    f = corpus(["falpha_0.75"])[0].handle()
    degs = [1, 2, 4]
    val, _ = kfunc_ball_upper(f, 1, 0.0, 2, rules, degs)
    m = int(round(2 * mu + 1))
    dists = [lp_norm_ball(lambda X: f(X) - vnmu_apply(f, BallKernelSpec(k, 2, m), rules.base)(X), 2, rules.base)
             for k in degs]
    assert val == pytest.approx(min(dists), rel=1e-10)


def test_kfunc_polynomial_candidate():
    rules = ball_rules(2, 0.5, 20, lift_degree=16)
    p = MultiPoly(2, {(1, 1): 1.0, (0, 1): 1.0})
    f = FnHandle.from_poly(p, "ball")
    t = 0.25
    val, info = kfunc_ball_upper(f, 1, t, 2, rules, [2, 4])
    # the candidate g = f costs t times its own derivative bracket
    rot = lp_norm_ball(FnHandle.from_poly(dij_power(p, 0, 1, 1), "ball"), 2, rules.base)
    lift = rules.lift
    side = max(np.sqrt(lift.weights @ d_id1_direct(f, 1, i, lift.points) ** 2) for i in range(2))
    assert val <= t * (rot + side) * (1 + 1e-8)
    assert info["distance"] < 1e-8


# -- norms -------------------------------------------------------------

def test_sobolev_constant():
    for mu in (0.0, 0.5):
        rule = ball_rule(2, mu, 12)
        assert sobolev_norm_ball(ONE, 2, 2, mu, rule) == pytest.approx(lp_norm_ball(ONE, 2, rule), rel=1e-9)


def test_sobolev_coordinate_sup():
    rule = ball_rule(2, 0.5, 40)
    got = sobolev_norm_ball(X1, 1, np.inf, 0.5, rule)
    X = rule.points
    # |x1| + |D_{1,2} x1| = |x2| + |phi d_1 x1| = phi + |phi d_2 x1| = 0, each maximised over the nodes
    grid = np.abs(X[:, 0]).max() + np.abs(X[:, 1]).max() + np.sqrt(1 - np.sum(X * X, axis=1)).max()
    assert got == pytest.approx(grid, abs=1e-7)
    assert got == pytest.approx(3.0, abs=2e-2)


def test_extension_terms_bounded_by_sobolev():
    ratios = []
    for name in ("exp_cos", "pole_ball", "ball_poly4"):
        f = corpus([name])[0].handle()
        for mu in (0.0, 0.5):
            for r in (1, 2):
                side = sum(norm_did1(f, r, i, 2, mu).value for i in range(2))
                W = sobolev_norm_ball(f, r, 2, mu, ball_rule(2, mu, 24))
                ratios.append(side / W)
    c = max(ratios)
    print("extension terms / Sobolev norm: c =", round(c, 4))
    assert np.isfinite(c) and c < 10


def test_lipschitz_constant():
    rules = ball_rules(2, 0.5, 12, lift_degree=12)
    assert lipschitz_norm_ball(ONE, 1, 0.5, 1, 2, 0.5, rules) == pytest.approx(
        lp_norm_ball(ONE, 2, rules.base), rel=1e-8)


def test_lipschitz_polynomial_alpha_zero():
    rules = ball_rules(2, 0.0, 16, lift_degree=16)
    f = FnHandle.from_poly(MultiPoly(2, {(2, 0): 1.0, (1, 1): 0.5}), "ball")
    small = lipschitz_norm_ball(f, 1, 0.0, 1, 2, 0.0, rules, theta_grid=[0.05])
    big = lipschitz_norm_ball(f, 1, 0.0, 1, 2, 0.0, rules, theta_grid=[0.05, 0.5])
    assert np.isfinite(big) and big >= small


def test_hnorm_constant_and_poly():
    rules = ball_rules(2, 0.5, 12, lift_degree=12)
    assert hnorm_ball(ONE, 1, 0.5, 1, 2, 0.5, rules) == pytest.approx(lp_norm_ball(ONE, 2, rules.base), rel=1e-8)
    assert np.isfinite(hnorm_ball(X1, 1, 0.9, 1, 2, 0.5, rules))
