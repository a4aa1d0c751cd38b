"""Empirical constants and trends for two-sided or one-sided scans."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Fit:
    c: float
    slope: float
    spread: float  # max(ratio) / min(ratio)
    ratios: tuple

    def ok(self, slope_tol: float, spread_tol: float | None = None) -> bool:
        if not np.isfinite(self.c) or abs(self.slope) >= slope_tol:
            return False
        return spread_tol is None or self.spread < spread_tol


def fit_constant(lhs, rhs, xs=None) -> Fit:
    """``c = max(lhs/rhs)`` and the least-squares slope of ``log(lhs/rhs)``
    against ``log xs`` (``xs`` defaults to ``1, 2, ...``)."""
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    if lhs.size == 0:
        raise ValueError("fit_constant needs at least one pair")
    if lhs.shape != rhs.shape:
        raise ValueError("lhs and rhs differ in length")
    if np.any(rhs <= 0):
        raise ValueError("rhs must be positive")
    ratio = lhs / rhs
    xs = np.arange(1, ratio.size + 1, dtype=float) if xs is None else np.asarray(xs, dtype=float)
    if ratio.size >= 2 and np.all(ratio > 0):
        slope = float(np.polyfit(np.log(xs), np.log(ratio), 1)[0])
        spread = float(ratio.max() / ratio.min())
    elif ratio.size >= 2:
        slope, spread = float("nan"), float("inf")
    else:
        slope, spread = 0.0, 1.0
    return Fit(float(ratio.max()), slope, spread, tuple(float(v) for v in ratio))


def loglog_slope(xs, ys) -> float:
    """Least-squares slope of ``log ys`` against ``log xs``."""
    return float(np.polyfit(np.log(np.asarray(xs, float)), np.log(np.asarray(ys, float)), 1)[0])
