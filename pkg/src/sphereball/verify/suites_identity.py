"""Exact identities: residual suites with absolute tolerances."""

from __future__ import annotations

import itertools

import numpy as np

from ..ballapprox import BallKernelSpec, lift_to_sphere, vnmu_apply
from ..balldomain import ball_rule, d_id1_direct, d_id1_tilde, norm_did1, norm_did1_direct
from ..fnhandle import FnHandle
from ..polycore import (MultiPoly, all_exponents, dii_sq_poly, dij_poly, dij_power, dmu_poly, homogenize,
                        laplace_beltrami_direct, laplace_beltrami_poly, poly_eval, random_poly)
from ..sphereapprox import ZonalSpec, project_degree_poly, vn_apply
from ..spheregeo import sphere_rule
from .common import residual_case, rng_for
from .corpus import corpus


def _coef_residual(a: MultiPoly, b: MultiPoly) -> float:
    return (a - b).max_abs_coeff() / max(1.0, a.max_abs_coeff(), b.max_abs_coeff())


def ball_orthogonal_poly(exponent, mu: float, rule) -> MultiPoly:
    """``x^exponent`` minus its weighted least-squares projection onto lower degrees."""
    d = len(exponent)
    k = sum(exponent)
    target = MultiPoly.monomial(exponent)
    if k == 0:
        return target
    low = all_exponents(d, k - 1)
    sw = np.sqrt(rule.weights)
    A = np.stack([np.prod(rule.points ** np.array(e), axis=1) for e in low], axis=1) * sw[:, None]
    b = poly_eval(target, rule.points) * sw
    c, *_ = np.linalg.lstsq(A, b, rcond=None)
    return target - MultiPoly(d, dict(zip(low, c)))


def run_eigen(spec):
    p = spec.params
    cases = []
    d = p["d"]
    rule = sphere_rule(d, p["exactness"])
    for n in range(p["n_max"] + 1):
        worst = 0.0
        for e in all_exponents(d, n, exact=True):
            y = homogenize(project_degree_poly(MultiPoly.monomial(e), n, rule), n)
            yv = poly_eval(y, rule.points)
            lv = poly_eval(laplace_beltrami_poly(y), rule.points)
            worst = max(worst, float(np.abs(lv + n * (n + d - 2) * yv).max() / np.abs(yv).max()))
        cases.append(residual_case(f"sphere:n={n}", {"d": d, "n": n}, worst, p["tol"]))
    for mu in p["ball_mus"]:
        rule = ball_rule(2, mu, p["ball_exactness"])
        for k in range(p["ball_k_max"] + 1):
            worst = 0.0
            for e in all_exponents(2, k, exact=True):
                P = ball_orthogonal_poly(e, mu, rule)
                pv = poly_eval(P, rule.points)
                dv = poly_eval(dmu_poly(P, mu), rule.points)
                worst = max(worst, float(np.abs(dv + k * (k + 2 + 2 * mu - 1) * pv).max() / np.abs(pv).max()))
            cases.append(residual_case(f"ball:mu={mu:g}:k={k}", {"d": 2, "mu": mu, "k": k}, worst,
                                       p["ball_tol"]))
    return cases


def run_decomp(spec):
    p = spec.params
    cases = []
    for d in p["dims"]:
        monos = [MultiPoly.monomial(e) for e in all_exponents(d, p["degree_max"])]
        if d >= 2:
            worst = max(_coef_residual(laplace_beltrami_poly(m), laplace_beltrami_direct(m)) for m in monos)
            cases.append(residual_case(f"sphere-sum:d={d}", {"d": d, "monomials": len(monos)}, worst, p["tol"]))
        for mu in p["mus"]:
            worst = 0.0
            for m in monos:
                lhs = MultiPoly.zero(d)
                for i in range(d):
                    lhs = lhs + dii_sq_poly(m, i, mu)
                for i, j in itertools.combinations(range(d), 2):
                    lhs = lhs + dij_poly(dij_poly(m, i, j), i, j)
                worst = max(worst, _coef_residual(lhs, dmu_poly(m, mu)))
            cases.append(residual_case(f"ball-sum:d={d}:mu={mu:g}", {"d": d, "mu": mu, "monomials": len(monos)},
                                       worst, p["tol"]))
    return cases


def run_parts(spec):
    p = spec.params
    d = p["d"]
    rule = sphere_rule(d, p["exactness"])
    rng = rng_for(spec, 3)
    pairs = []
    for _ in range(p["pairs"]):
        a, b = rng.integers(1, p["degree_max"] + 1, size=2)
        pairs.append((random_poly(d, int(a), rng), random_poly(d, int(b), rng)))
    cases = []
    for i, j in itertools.combinations(range(d), 2):
        worst = 0.0
        for f, g in pairs:
            fv, gv = poly_eval(f, rule.points), poly_eval(g, rule.points)
            lhs = rule.weights @ (fv * poly_eval(dij_poly(g, i, j), rule.points)) \
                + rule.weights @ (poly_eval(dij_poly(f, i, j), rule.points) * gv)
            nf = np.sqrt(rule.weights @ fv ** 2)
            ng = np.sqrt(rule.weights @ gv ** 2)
            worst = max(worst, abs(lhs) / (nf * ng))
        cases.append(residual_case(f"plane=({i},{j})", {"d": d, "pairs": len(pairs), "exactness": p["exactness"]},
                                   worst, p["tol"]))
    return cases


def run_commute(spec):
    p = spec.params
    rng = rng_for(spec, 4)
    cases = []
    d = p["d"]
    rule = sphere_rule(d, p["exactness"])
    X = rule.points
    for n in range(1, p["n_max"] + 1):
        f = random_poly(d, n, rng)
        g = vn_apply(f, ZonalSpec(n, d), rule)
        err = float(np.abs(g(X) - poly_eval(f, X)).max())
        cases.append(residual_case(f"sphere-reproduce:n={n}", {"d": d, "n": n}, err, p["repro_tol"]))
    f = random_poly(d, p["commute_degree"], rng)
    for n in p["commute_ns"]:
        op = vn_apply(f, ZonalSpec(n, d), rule).meta["operator"]
        for r in p["rs"]:
            worst = 0.0
            for i, j in itertools.combinations(range(d), 2):
                lhs = op.dij(r, i, j, X)
                rhs = vn_apply(dij_power(f, i, j, r), ZonalSpec(n, d), rule)(X)
                worst = max(worst, float(np.abs(lhs - rhs).max()))
            cases.append(residual_case(f"sphere-commute:n={n}:r={r}", {"d": d, "n": n, "r": r}, worst,
                                       p["commute_tol"]))
    for mu in p["ball_mus"]:
        m = int(round(2 * mu + 1))
        brule = ball_rule(2, mu, p["ball_exactness"])
        B = brule.points
        for n in range(1, p["n_max"] + 1):
            f = random_poly(2, n, rng)
            g = vnmu_apply(f, BallKernelSpec(n, 2, m), brule)
            err = float(np.abs(g(B) - poly_eval(f, B)).max())
            cases.append(residual_case(f"ball-reproduce:mu={mu:g}:n={n}", {"mu": mu, "n": n}, err, p["repro_tol"]))
        f = random_poly(2, p["commute_degree"], rng)
        for n in p["commute_ns"]:
            op = vnmu_apply(f, BallKernelSpec(n, 2, m), brule).meta["operator"]
            for r in p["rs"]:
                lhs = op.dij(r, 0, 1, B)
                rhs = vnmu_apply(dij_power(f, 0, 1, r), BallKernelSpec(n, 2, m), brule)(B)
                cases.append(residual_case(f"ball-commute:mu={mu:g}:n={n}:r={r}", {"mu": mu, "n": n, "r": r},
                                           float(np.abs(lhs - rhs).max()), p["commute_tol"]))
        # the ball operator is the sphere operator of the lifted function
        f = random_poly(2, p["lift_degree"], rng)
        n = p["lift_n"]
        srule = sphere_rule(2 + m, p["exactness"])
        F = lift_to_sphere(FnHandle.from_poly(f, "ball"), 2, m)
        vs = vn_apply(F, ZonalSpec(n, 2 + m), srule)
        ph = np.sqrt(np.clip(1.0 - np.sum(B * B, axis=1), 0.0, None))
        Y = np.concatenate([B, ph[:, None], np.zeros((len(B), m - 1))], axis=1)
        vb = vnmu_apply(f, BallKernelSpec(n, 2, m), brule)(B)
        cases.append(residual_case(f"ball-lift:mu={mu:g}:n={n}", {"mu": mu, "n": n, "deg": p["lift_degree"]},
                                   float(np.abs(vs(Y) - vb).max()), p["repro_tol"]))
    return cases


def _ball3_points(rng, count):
    v = rng.standard_normal((count, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return v * rng.uniform(0.0, 1.0, count)[:, None] ** (1.0 / 3.0)


def _numeric(entry_name):
    f = corpus([entry_name])[0].handle()
    return FnHandle(f.func, f.dim, "ball", f.name)


def run_lemma46(spec):
    p = spec.params
    rng = rng_for(spec, 5)
    Y = _ball3_points(rng, p["points"])
    polys = [random_poly(2, int(rng.integers(1, p["degree_max"] + 1)), rng) for _ in range(p["polys"])]
    cases = []
    for r in range(1, p["r_max"] + 1):
        for i in range(2):
            worst = 0.0
            for f in polys:
                h = FnHandle.from_poly(f, "ball")
                a = d_id1_tilde(h, r, i, Y)
                b = d_id1_direct(h, r, i, Y)
                worst = max(worst, float(np.abs(a - b).max() / max(1.0, np.abs(a).max())))
            cases.append(residual_case(f"poly:r={r}:i={i}", {"r": r, "i": i, "points": len(Y)}, worst, p["tol"]))
    g = _numeric(p["smooth_entry"])
    for r in range(1, p["r_max"] + 1):
        a = d_id1_tilde(g, r, 0, Y)
        b = d_id1_direct(g, r, 0, Y)
        res = float(np.abs(a - b).max() / max(1.0, np.abs(a).max()))
        cases.append(residual_case(f"{g.name}:r={r}", {"r": r, "i": 0, "route": "finite differences"}, res,
                                   p["stencil_tol"]))
    return cases


def run_parity(spec):
    p = spec.params
    rng = rng_for(spec, 6)
    Y = _ball3_points(rng, p["points"])
    Yf = Y * np.array([1.0, 1.0, -1.0])
    f = FnHandle.from_poly(random_poly(2, p["degree"], rng), "ball")
    g = _numeric(p["smooth_entry"])
    cases = []
    for r in range(1, p["r_max"] + 1):
        sgn = (-1.0) ** r
        for name, h, route, tol in (("poly", f, d_id1_direct, p["tol"]), (g.name, g, d_id1_direct, p["stencil_tol"]),
                                    ("poly", f, d_id1_tilde, p["tol"])):
            a = route(h, r, 0, Y)
            b = route(h, r, 0, Yf)
            res = float(np.abs(b - sgn * a).max() / max(1.0, np.abs(a).max()))
            rname = "rotation" if route is d_id1_direct else "formula"
            cases.append(residual_case(f"{rname}:{name}:r={r}", {"r": r, "route": rname}, res, tol))
    return cases


def run_prop48(spec):
    p = spec.params
    rng = rng_for(spec, 7)
    f = FnHandle.from_poly(random_poly(2, p["degree"], rng), "ball")
    g = _numeric(p["smooth_entry"])
    cases = []
    for mu in p["mus"]:
        for name, h in (("poly", f), (g.name, g)):
            for r in range(1, p["r_max"] + 1):
                for i in range(2):
                    a = norm_did1(h, r, i, 2, mu, degree=p["degree_rule"], normalized=True).value
                    b = norm_did1_direct(h, r, i, 2, mu, degree=p["degree_rule"], normalized=True).value
                    res = abs(a - b) / max(abs(b), 1e-300)
                    cases.append(residual_case(f"{name}:mu={mu:g}:r={r}:i={i}", {"mu": mu, "r": r, "i": i, "p": 2},
                                               res, p["tol"], lhs=a, rhs=b))
    x1 = FnHandle.from_poly(MultiPoly.variable(2, 0), "ball")
    val = norm_did1(x1, 1, 0, 2, 0.0).value
    cases.append(residual_case("value:x1:mu=0", {"expected": "sqrt(2 pi / 3)"}, abs(val - np.sqrt(2 * np.pi / 3)),
                               p["tol"], lhs=val, rhs=float(np.sqrt(2 * np.pi / 3))))
    return cases
