"""Degree scans: Jackson / inverse, simultaneous approximation and the f_alpha exponent."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from ..ballapprox import BallKernelSpec, ball_rules, modulus_ball_curve, sobolev_norm_ball, vnmu_apply
from ..balldomain import d_id1_tilde, neg_phi_partial
from ..expansions import Expansion
from ..sphereapprox import ZonalSpec, dij_values, graded_basis, modulus_curve, vn_apply
from ..spheregeo import graded_sphere_rule, lp_norm, sphere_rule
from .common import entries, point_cases, trend_case
from .corpus import SCAN_NAMES, corpus, falpha_handle
from .fitting import loglog_slope
from .report import Case


PLANES = ((0, 1), (0, 2), (1, 2))


def _tails(values_or_f, basis, first_excluded):
    ex = Expansion.of(values_or_f, basis)
    return np.array([ex.tail(k) for k in first_excluded])


@lru_cache(maxsize=None)
def _sphere_scan(name, exactness, basis_degree, ns, r, theta_grid):
    f = corpus([name])[0].handle()
    rule = sphere_rule(3, exactness, split=True)
    B = graded_basis(rule, basis_degree)
    nmax = max(ns)
    E = _tails(f, B, range(nmax + 1))  # E[n]: distance to Pi_{n-1}
    sing = f.meta.get("singular_points")
    mrule = graded_sphere_rule(3, sing[0], exactness) if sing else rule
    om = modulus_curve(f, r, 1.0 / np.array(ns, float), 2, mrule, theta_grid)
    scale = float(np.sqrt(rule.weights @ f(rule.points) ** 2))
    return E, om, scale


@lru_cache(maxsize=None)
def _ball_scan(name, mu, degree, basis_degree, refine_degree, ns, r, theta_grid):
    f = corpus([name])[0].handle()
    rules = ball_rules(2, mu, degree)
    B = graded_basis(rules.base, basis_degree, domain="ball")
    nmax = max(ns)
    E = _tails(f, B, range(1, nmax + 2))  # E[n]: distance to Pi_n
    sing = f.meta.get("singular_points")
    mrules = ball_rules(2, mu, refine_degree, refine_at=sing[0]) if sing else rules
    om = modulus_ball_curve(f, r, 1.0 / np.array(ns, float), 2, mrules, theta_grid)
    scale = float(np.sqrt(rules.base.weights @ f(rules.base.points) ** 2))
    return E, om, scale


def _inverse_rhs(E, ns, r, shift):
    # n^-r sum_{k=1}^n k^(r-1) E_{k-shift}
    return np.array([n ** -r * sum(k ** (r - 1) * E[k - shift] for k in range(1, n + 1)) for n in ns])


def _scan_cases(kind, label, params, E, om, scale, ns, r, p, shift):
    ns_arr = np.array(ns, float)
    if kind == "jackson":
        lhs, rhs = E[list(ns)], om
    else:
        lhs, rhs = om, _inverse_rhs(E, ns, r, shift)
    cases = point_cases(label, params, ns, lhs, rhs)
    cases.append(trend_case(f"{label}:fit", params, lhs, rhs, ns_arr, p["slope_tol"], p["spread_tol"],
                            zero_tol=p["zero_tol"], scale=scale))
    return cases


def _run_sphere(spec, kind):
    p = spec.params
    ns = tuple(int(n) for n in p["ns"])
    cases = []
    for e in entries(spec, SCAN_NAMES, domain="sphere"):
        E, om, scale = _sphere_scan(e.name, p["exactness"], p["basis_degree"], ns, p["r"], p["theta_grid"])
        params = {"entry": e.name, "r": p["r"], "p": 2, "kind": e.kind}
        cases += _scan_cases(kind, f"{e.name}", params, E, om, scale, ns, p["r"], p, shift=1)
    return cases


def run_jackson_sphere(spec):
    return _run_sphere(spec, "jackson")


def run_inverse_sphere(spec):
    return _run_sphere(spec, "inverse")


def run_jackson_ball(spec):
    p = spec.params
    ns = tuple(int(n) for n in p["ns"])
    cases = []
    for mu in p["mus"]:
        for e in entries(spec, SCAN_NAMES, domain="ball"):
            E, om, scale = _ball_scan(e.name, float(mu), p["degree"], p["basis_degree"], p["refine_degree"], ns,
                                      p["r"], p["theta_grid"])
            # E here is indexed from n = 0 as distance to Pi_n
            params = {"entry": e.name, "mu": mu, "r": p["r"], "p": 2, "kind": e.kind}
            for kind in ("jackson", "inverse"):
                cases += _scan_cases(kind, f"{kind}:{e.name}:mu={mu:g}", params, E, om, scale, ns, p["r"], p,
                                     shift=0)
    return cases


# ---------------------------------------------------------------------------
# simultaneous approximation
# ---------------------------------------------------------------------------

def run_simul_sphere(spec):
    p = spec.params
    ns = [int(n) for n in p["ns"]]
    rule = sphere_rule(3, p["exactness"], split=True)
    B = graded_basis(rule, max(ns) + 1)
    X = rule.points
    cases = []
    for e in entries(spec, p["corpus_default"], domain="sphere"):
        f = e.handle()
        fvals = f(X)
        ops = [vn_apply(fvals, ZonalSpec(n, 3), rule).meta["operator"] for n in ns]
        for r in p["rs"]:
            approx = [op.dij_pairs(r, PLANES, X) for op in ops]
            for i, j in PLANES:
                dv = dij_values(f, r, i, j, X)
                if np.sqrt(rule.weights @ dv ** 2) < 1e-10 * np.sqrt(rule.weights @ fvals ** 2):
                    continue  # D_{i,j} annihilates f
                ex = Expansion.of(dv, B)
                lhs = [lp_norm(dv - a[(i, j)], rule.weights, 2) for a in approx]
                rhs = [ex.tail(n) for n in ns]
                params = {"entry": e.name, "r": r, "plane": [i, j]}
                label = f"{e.name}:r={r}:D{i}{j}"
                cases += point_cases(label, params, ns, lhs, rhs)
                cases.append(trend_case(f"{label}:fit", params, lhs, rhs, ns, p["slope_tol"], one_sided=True))
    return cases


def run_simul_ball(spec):
    p = spec.params
    ns = [int(n) for n in p["ns"]]
    cases = []
    for mu in p["mus"]:
        m = int(round(2 * mu + 1))
        rules = ball_rules(2, mu, p["degree"], lift_degree=p["lift_degree"])
        base, lift = rules.base, rules.lift
        Bb = graded_basis(base, max(ns) + 1, domain="ball")
        Bl = graded_basis(lift, max(ns) + 1, domain="sphere" if m == 1 else "ball")
        X, Y = base.points, lift.points
        shift = 0 if m == 1 else 1  # sphere tails exclude degrees <= n - 1; ball tails <= n
        for e in entries(spec, p["corpus_default"], domain="ball"):
            f = e.handle()
            fvals = f(X)
            ops = {n: vnmu_apply(fvals, BallKernelSpec(n, 2, m), base) for n in ns}
            for r in p["rs"]:
                terms = []
                dv = dij_values(f, r, 0, 1, X)
                if np.sqrt(base.weights @ dv ** 2) > 1e-10 * np.sqrt(base.weights @ fvals ** 2):
                    terms.append(("D01", dv, base, Bb, lambda g: dij_values(g, r, 0, 1, X), 1))
                for i in range(2):
                    lv = d_id1_tilde(f, r, i, Y)
                    terms.append((f"D{i}2~", lv, lift, Bl, lambda g, i=i: d_id1_tilde(g, r, i, Y), shift))
                for tname, vals, rule, basis, apply, sh in terms:
                    ex = Expansion.of(vals, basis)
                    lhs = [lp_norm(vals - apply(ops[n]), rule.weights, 2) for n in ns]
                    rhs = [ex.tail(n + sh) for n in ns]
                    params = {"entry": e.name, "mu": mu, "r": r, "term": tname}
                    label = f"{e.name}:mu={mu:g}:r={r}:{tname}"
                    cases += point_cases(label, params, ns, lhs, rhs)
                    cases.append(trend_case(f"{label}:fit", params, lhs, rhs, ns, p["slope_tol"], one_sided=True))
            # E_n <= c n^-r ||f||_{W^r}
            exf = Expansion.of(fvals, Bb)
            for r in p["rs"]:
                W = sobolev_norm_ball(f, r, 2, mu, base)
                E = [exf.tail(n + 1) for n in ns]
                rhs = [n ** -r * W for n in ns]
                params = {"entry": e.name, "mu": mu, "r": r, "sobolev_norm": W}
                cases.append(trend_case(f"sobolev-rate:{e.name}:mu={mu:g}:r={r}", params, E, rhs, ns,
                                        p["rate_slope_tol"], one_sided=True))
            # sum_i ||D^r_{i,d+1} f~|| <= c ||f||_{W^r}
            for r in p["rs"]:
                W = sobolev_norm_ball(f, r, 2, mu, base)
                side = sum(lp_norm(d_id1_tilde(f, r, i, Y), lift.weights, 2) for i in range(2))
                ok = bool(np.isfinite(side) and np.isfinite(W) and W > 0)
                cases.append(Case(f"lift-bound:{e.name}:mu={mu:g}:r={r}", {"entry": e.name, "mu": mu, "r": r},
                                  side, W, ok, fitted_c=side / W if W > 0 else None))
            # Chebyshev weight: E_{2n} <= c n^-r [E_n(D^r f) + max_i E_n((phi d_i)^r f)]
            if m == 1:
                for r in p["rs"]:
                    lhs, rhs = [], []
                    exd = Expansion.of(dij_values(f, r, 0, 1, X), Bb)
                    exs = [Expansion.of(((-1) ** r) * neg_phi_partial(f, r, i, X), Bb) for i in range(2)]
                    for n in ns:
                        if 2 * n + 1 > Bb.max_degree:
                            continue
                        lhs.append(exf.tail(2 * n + 1))
                        rhs.append(n ** -r * (exd.tail(n + 1) + max(x.tail(n + 1) for x in exs)))
                    used = [n for n in ns if 2 * n + 1 <= Bb.max_degree]
                    params = {"entry": e.name, "mu": mu, "r": r}
                    cases.append(trend_case(f"chebyshev-best:{e.name}:r={r}", params, lhs, rhs, used,
                                            p["slope_tol"], one_sided=True))
    return cases


# ---------------------------------------------------------------------------
# f_alpha
# ---------------------------------------------------------------------------

def run_falpha(spec):
    p = spec.params
    alpha = p["alpha"]
    f = falpha_handle(alpha)
    ts = 2.0 ** -np.arange(p["t_exp_min"], p["t_exp_max"] + 1, dtype=float)
    cases = []
    lo, hi = p["slope_window"]
    for mu in p["mus"]:
        rules = ball_rules(2, mu, p["degree"])
        om = modulus_ball_curve(f, p["r"], ts, np.inf, rules, p["theta_grid"])
        s = loglog_slope(ts, om)
        params = {"alpha": alpha, "mu": mu, "r": p["r"], "p": "inf", "t": ts.tolist(), "omega": om.tolist(),
                  "expected_slope": 2 * alpha, "window": [lo, hi]}
        cases.append(Case(f"modulus-exponent:mu={mu:g}", params, s, 2 * alpha, bool(lo <= s <= hi), slope=s))
    # best approximation rate in L^2: E_n <= c n^{-2 alpha}
    ns = [int(n) for n in p["ns"]]
    for mu in p["mus"]:
        rules = ball_rules(2, mu, p["en_degree"])
        B = graded_basis(rules.base, max(ns) + 1, domain="ball")
        ex = Expansion.of(f, B)
        E = [ex.tail(n + 1) for n in ns]
        rhs = [n ** (-2 * alpha) for n in ns]
        cases.append(trend_case(f"best-rate:mu={mu:g}", {"alpha": alpha, "mu": mu, "rate": 2 * alpha}, E, rhs, ns,
                                p["slope_tol"], one_sided=True))
    return cases
