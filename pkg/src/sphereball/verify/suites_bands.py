"""Two-sided equivalence bands over dyadic scales."""

from __future__ import annotations

import numpy as np

from ..ballapprox import ball_rules, kfunc_ball_curve
from ..balldomain import ball_rule, lp_norm_ball, phi_eval
from ..polycore import MultiPoly, dii_sq_poly, dij_power, dmu_poly, poly_eval
from ..sphereapprox import kfunc_sphere_curve, modulus_curve
from ..spheregeo import lp_norm, lp_norm_sphere, sphere_rule
from .common import entries, point_cases, trend_case

INF = float("inf")


def _ptag(p):
    return "inf" if p == INF else f"{p:g}"


# ---------------------------------------------------------------------------
# modulus vs K-functional on the sphere
# ---------------------------------------------------------------------------

def run_kmod(spec):
    p = spec.params
    ts = 2.0 ** -np.arange(p["t_exp_min"], p["t_exp_max"] + 1, dtype=float)
    ps = [float(q) for q in p["ps"]]
    rule = sphere_rule(3, p["exactness"], split=True)
    cases = []
    for e in entries(spec, p["corpus_default"], domain="sphere"):
        f = e.handle()
        scale = lp_norm_sphere(f, 2, rule)
        for r in p["rs"]:
            ks = kfunc_sphere_curve(f, r, ts, ps, rule, p["candidates"])
            for q, (kv, _) in zip(ps, ks):
                om = modulus_curve(f, r, ts, q, rule, p["theta_grid"])
                params = {"entry": e.name, "r": r, "p": _ptag(q), "candidates": list(p["candidates"])}
                label = f"{e.name}:r={r}:p={_ptag(q)}"
                cases += point_cases(label, params, ts, kv, om)
                cases.append(trend_case(f"{label}:band", params, kv, om, ts, p["slope_tol"], p["spread_tol"],
                                        scale=scale))
    return cases


# ---------------------------------------------------------------------------
# the two ball K-functionals, plus the D_mu decomposition norms
# ---------------------------------------------------------------------------

def _cheb_basis(n):
    """Products T_a(x1) T_b(x2), a + b <= n, as exact polynomials."""
    cols = []
    for i in range(2):
        x = MultiPoly.variable(2, i)
        t = [MultiPoly.constant(2, 1.0), x]
        while len(t) <= n:
            t.append(2.0 * x * t[-1] - t[-2])
        cols.append(t)
    return [cols[0][a] * cols[1][b] for a in range(n + 1) for b in range(n + 1 - a)]


def _gram(vals, w):
    return vals.T @ (w[:, None] * vals)


def _sup_ratio(A, B, rel=1e-10):
    """max over v of (v'Av)/(v'Bv) on the range of B (null(B) must be null for A)."""
    lam, U = np.linalg.eigh(B)
    keep = lam > rel * lam.max()
    Q = U[:, keep] / np.sqrt(lam[keep])
    top = float(np.linalg.eigvalsh(Q.T @ A @ Q).max())
    P = U[:, ~keep]
    leak = float(np.abs(P.T @ A @ P).max()) if P.size else 0.0
    return np.sqrt(max(top, 0.0)), leak


def _prop41_cases(spec):
    """Best constants over all of Pi_n (generalized eigenvalues of L^2 Gram matrices)."""
    p = spec.params
    cases = []
    degs = [int(n) for n in p["prop41_degrees"]]
    for mu in p["mus"]:
        rule = ball_rule(2, mu, p["prop41_exactness"])
        X, w = rule.points, rule.weights
        ph2 = phi_eval(X) ** 2
        rows = {k: [] for k in ("dmu/sum", "sum/dmu", "phi/dii0", "phi/dii1", "dii/up0", "dii/up1")}
        leaks = []
        for n in degs:
            basis = _cheb_basis(n)

            def vals(op):
                return np.column_stack([poly_eval(op(g), X) for g in basis])

            G = {"id": _gram(vals(lambda g: g), w), "dmu": _gram(vals(lambda g: dmu_poly(g, mu)), w),
                 "rot": _gram(vals(lambda g: dij_power(g, 0, 1, 2)), w)}
            for i in range(2):
                G[f"dii{i}"] = _gram(vals(lambda g, i=i: dii_sq_poly(g, i, mu)), w)
                G[f"phi{i}"] = _gram(ph2[:, None] * vals(lambda g, i=i: g.diff(i, 2)), w)
            S = G["rot"] + G["dii0"] + G["dii1"]
            for key, a, b in (("dmu/sum", G["dmu"], S), ("sum/dmu", S, G["dmu"]),
                              ("phi/dii0", G["phi0"], G["dii0"]), ("phi/dii1", G["phi1"], G["dii1"]),
                              ("dii/up0", G["dii0"], G["phi0"] + G["id"]), ("dii/up1", G["dii1"], G["phi1"] + G["id"])):
                c, leak = _sup_ratio(a, b)
                rows[key].append(c)
                leaks.append(leak / max(np.abs(a).max(), 1.0))
        for key, cs in rows.items():
            params = {"mu": mu, "p": 2, "degrees": degs, "sup_over": "Pi_n", "max_null_leak": max(leaks)}
            cases += point_cases(f"best-constant:{key}:mu={mu:g}", params, degs, cs, np.ones(len(cs)))
            cases.append(trend_case(f"best-constant:{key}:mu={mu:g}:band", params, cs, np.ones(len(cs)), degs,
                                    p["slope_tol"], p["spread_tol"]))
    return cases


def run_thm44(spec):
    p = spec.params
    ts = 2.0 ** -np.arange(p["t_exp_min"], p["t_exp_max"] + 1, dtype=float)
    cases = []
    for mu in p["mus"]:
        rules = ball_rules(2, mu, p["degree"], lift_degree=p["lift_degree"])
        for e in entries(spec, p["corpus_default"], domain="ball"):
            f = e.handle()
            fn2 = lp_norm_ball(f, 2, rules.base)
            for r in p["rs"]:
                # the sup-norm comparison needs odd r
                ps = [2.0] + ([INF] if r % 2 else [])
                K = kfunc_ball_curve(f, r, ts, ps, rules, p["candidates"])
                H = kfunc_ball_curve(f, r, ts, ps, rules, p["candidates"], hat=True)
                for q, (kv, _), (hv, _) in zip(ps, K, H):
                    params = {"entry": e.name, "mu": mu, "r": r, "p": _ptag(q)}
                    label = f"{e.name}:mu={mu:g}:r={r}:p={_ptag(q)}"
                    cases += point_cases(label, params, ts, hv, kv)
                    if r == 1:
                        cases.append(trend_case(f"{label}:band", params, hv, kv, ts, p["slope_tol"],
                                                p["spread_tol"], scale=fn2))
                    else:
                        fq = lp_norm_ball(f, q, rules.base) if q != 2 else fn2
                        cases.append(trend_case(f"{label}:upper", params, kv, hv + ts ** r * fq, ts,
                                                p["slope_tol"], one_sided=True, scale=fn2))
    return cases + _prop41_cases(spec)
