"""Helpers shared by the suite runners."""

from __future__ import annotations

import numpy as np

from .config import SuiteSpec
from .corpus import corpus
from .fitting import fit_constant
from .report import Case


def rng_for(spec: SuiteSpec, salt: int = 0) -> np.random.Generator:
    return np.random.default_rng([spec.seed, salt])


def entries(spec: SuiteSpec, default, domain=None):
    names = spec.corpus if spec.corpus is not None else default
    return corpus(names, domain)


def residual_case(name, params, residual, tol, lhs=None, rhs=None) -> Case:
    ok = bool(np.isfinite(residual) and residual < tol)
    return Case(name, dict(params, tol=tol), lhs if lhs is not None else residual,
                rhs if rhs is not None else tol, ok, residual=residual)


def point_cases(prefix, params, xs, lhs, rhs):
    """One data row per scan point; a row passes when both sides are finite."""
    out = []
    for x, a, b in zip(xs, lhs, rhs):
        ok = bool(np.isfinite(a) and np.isfinite(b))
        out.append(Case(f"{prefix}@{x:g}", dict(params, at=float(x)), float(a), float(b), ok))
    return out


def trend_case(name, params, lhs, rhs, xs, slope_tol, spread_tol=None, one_sided=False,
               zero_tol=1e-12, scale=1.0) -> Case:
    """Fit ``lhs/rhs`` against ``xs``.

    Two-sided: pass iff ``|slope| < slope_tol`` (and ``spread < spread_tol``).
    One-sided: pass iff ``slope < slope_tol`` (an upper bound only).
    When every ``lhs`` is below ``zero_tol * scale`` the bound holds trivially.
    """
    lhs = np.asarray(lhs, float)
    rhs = np.asarray(rhs, float)
    p = dict(params, slope_tol=slope_tol, one_sided=one_sided)
    if spread_tol is not None:
        p["spread_tol"] = spread_tol
    if np.all(np.abs(lhs) <= zero_tol * scale):
        return Case(name, p, float(np.max(np.abs(lhs))), float(np.min(rhs)) if rhs.size else None, True,
                    note="left side vanishes to round-off (exact reproduction)")
    if np.any(rhs <= zero_tol * scale):
        return Case(name, p, float(np.max(lhs)), float(np.min(rhs)), False,
                    note="right side vanishes while the left does not")
    fit = fit_constant(lhs, rhs, xs)
    p["ratios"] = list(fit.ratios)
    p["spread"] = fit.spread
    if one_sided:
        ok = np.isfinite(fit.c) and fit.slope < slope_tol
    else:
        ok = fit.ok(slope_tol, spread_tol)
    return Case(name, p, float(np.max(lhs)), float(np.max(rhs)), bool(ok), fitted_c=fit.c, slope=fit.slope)
