"""Lipschitz-type norms against modulus-defined norms."""

from __future__ import annotations

import numpy as np

from ..ballapprox import ball_rules, hnorm_ball, lipschitz_norm_ball, modulus_ball_curve
from ..balldomain import lp_norm_ball
from ..expansions import Expansion
from ..sphereapprox import (dij_values, frac_laplacian_l2, graded_basis, hnorm_sphere, lipschitz_norm_sphere,
                            modulus_curve)
from ..spheregeo import graded_sphere_rule, lp_norm, lp_norm_sphere, sphere_rule
from .common import entries, point_cases, trend_case
from .report import Case

def _scale_scan(lip_fn, om_fn, base, r, alpha, levels):
    """Fine-scale seminorms for each level K: the Lipschitz quotient sup over
    theta <= 2^-K against sup_{t <= 2^-K} omega(t) / t^(r + alpha)."""
    grid = 2.0 ** (-np.arange(2 * (max(levels) + 2) + 1) / 2.0)
    q = om_fn(grid) / grid ** (r + alpha)
    lip, hn = [], []
    for K in levels:
        sel = grid <= 2.0 ** -K * (1 + 1e-12)
        lip.append(lip_fn(grid[sel]) - base)
        hn.append(float(q[sel].max()))
    return lip, hn


def _band_cases(label, params, levels, lip, hn, full, p):
    ts = [2.0 ** -K for K in levels]
    out = point_cases(label, params, ts, lip, hn)
    out.append(trend_case(f"{label}:band", params, lip, hn, ts, p["slope_tol"], p["spread_tol"]))
    a, b = full
    out.append(Case(f"{label}:full-norms", params, a, b, bool(np.isfinite(a) and np.isfinite(b) and b > 0),
                    fitted_c=a / b if b > 0 else None, note="full norms; ratio reported"))
    return out


def run_lip_sphere(spec):
    p = spec.params
    rule = sphere_rule(3, p["exactness"], split=True)
    levels = [int(k) for k in p["levels"]]
    cases = []
    for name, r, alpha, ell in _classes(p["classes"]):
        e = entries(spec, [name], domain="sphere")
        if not e:
            continue
        f = e[0].handle()
        sing = f.meta.get("singular_points")
        mrule = graded_sphere_rule(3, sing[0], p["exactness"]) if sing else rule
        base = lp_norm_sphere(f, 2, mrule)
        lip, hn = _scale_scan(lambda g: lipschitz_norm_sphere(f, r, alpha, ell, 2, mrule, theta_grid=g),
                              lambda g: modulus_curve(f, r + ell, g, 2, mrule, p["theta_grid"]),
                              base, r, alpha, levels)
        full = (lipschitz_norm_sphere(f, r, alpha, ell, 2, mrule),
                hnorm_sphere(f, r, alpha, ell, 2, mrule, theta_grid=p["theta_grid"]))
        params = {"entry": name, "r": r, "alpha": alpha, "ell": ell, "p": 2, "levels": levels}
        label = f"{name}:r={r}:alpha={alpha:g}"
        cases += _band_cases(label, params, levels, lip, hn, full, p)
        # E_n <= c n^-(r+alpha) ||f||
        ns = [int(n) for n in p["ns"]]
        ex = Expansion.of(f, graded_basis(rule, p["basis_degree"]))
        E = [ex.tail(n) for n in ns]
        rate = [n ** -(r + alpha) for n in ns]
        cases.append(trend_case(f"{label}:rate", dict(params, ns=ns), E, rate, ns, p["rate_slope_tol"],
                                one_sided=True))
    cases += _laplace_cases(spec, rule)
    return cases


def _laplace_cases(spec, rule):
    """L^2 size of (-Laplace-Beltrami)^(r/2) f next to the rotation derivatives."""
    p = spec.params
    X, w = rule.points, rule.weights
    out = []
    for e in entries(spec, p["laplace_entries"], domain="sphere"):
        f = e.handle()
        for r in (1, 2):
            lhs = lp_norm(frac_laplacian_l2(f, r / 2, p["laplace_N"], rule)(X), w, 2)
            rhs = sum(lp_norm(dij_values(f, r, i, j, X), w, 2) for i, j in ((0, 1), (0, 2), (1, 2)))
            ok = bool(np.isfinite(lhs) and np.isfinite(rhs) and lhs > 0 and rhs > 0)
            out.append(Case(f"laplace:{e.name}:r={r}", {"entry": e.name, "r": r, "N": p["laplace_N"]}, lhs, rhs,
                            ok, fitted_c=lhs / rhs if rhs > 0 else None,
                            note="reported ratio; no tolerance asserted"))
    return out


def run_lip_ball(spec):
    p = spec.params
    levels = [int(k) for k in p["levels"]]
    cases = []
    for mu in p["mus"]:
        rules = ball_rules(2, mu, p["degree"], lift_degree=p["lift_degree"])
        for name, r, alpha, ell in _classes(p["classes"]):
            e = entries(spec, [name], domain="ball")
            if not e:
                continue
            f = e[0].handle()
            sing = f.meta.get("singular_points")
            mrules = (ball_rules(2, mu, p["degree"], refine_at=sing[0], lift_degree=p["lift_degree"])
                      if sing else rules)
            base = lp_norm_ball(f, 2, mrules.base)
            lip, hn = _scale_scan(lambda g: lipschitz_norm_ball(f, r, alpha, ell, 2, mu, mrules, theta_grid=g),
                                  lambda g: modulus_ball_curve(f, r + ell, g, 2, mrules, p["theta_grid"]),
                                  base, r, alpha, levels)
            full = (lipschitz_norm_ball(f, r, alpha, ell, 2, mu, mrules),
                    hnorm_ball(f, r, alpha, ell, 2, mu, mrules, theta_grid=p["theta_grid"]))
            params = {"entry": name, "mu": mu, "r": r, "alpha": alpha, "ell": ell, "p": 2, "levels": levels}
            cases += _band_cases(f"{name}:mu={mu:g}:r={r}:alpha={alpha:g}", params, levels, lip, hn, full, p)
    return cases


def _classes(spec_list):
    """Parse ``name/r/alpha/ell`` strings."""
    out = []
    for item in spec_list:
        name, r, alpha, ell = str(item).split("/")
        out.append((name, int(r), float(alpha), int(ell)))
    return out
