"""Pointwise-evaluable functions on the sphere or the ball."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .polycore import MultiPoly, poly_eval


class EvaluationError(RuntimeError):
    """A function handle failed (or produced non-finite values) at some nodes."""


@dataclass(frozen=True)
class FnHandle:
    """A real function on ``S^{d-1}`` (``domain="sphere"``) or ``B^d`` (``"ball"``).

    ``func`` maps an ``(N, d)`` array to ``(N,)``.  ``poly`` is set when the
    function is a polynomial, which lets differential operators take the
    exact route.  ``meta`` carries reporting hints such as known smoothness
    exponents or ``singular_points``.
    """

    func: Callable[[np.ndarray], np.ndarray]
    dim: int
    domain: str = "sphere"
    name: str = "f"
    poly: MultiPoly | None = None
    meta: dict = field(default_factory=dict)

    def __call__(self, x) -> np.ndarray | float:
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        pts = np.atleast_2d(x)
        if pts.shape[-1] != self.dim:
            raise ValueError(f"{self.name}: expected points of dimension {self.dim}, got {pts.shape[-1]}")
        vals = np.asarray(self.func(pts), dtype=float).reshape(pts.shape[0])
        bad = ~np.isfinite(vals)
        if bad.any():
            k = int(np.flatnonzero(bad)[0])
            raise EvaluationError(f"{self.name}: non-finite value at node {k}, x={pts[k].tolist()}")
        return float(vals[0]) if single else vals

    @classmethod
    def from_poly(cls, p: MultiPoly, domain: str = "sphere", name: str = "poly", **meta) -> "FnHandle":
        return cls(lambda x: poly_eval(p, x), p.dim, domain, name, p, dict(meta, degree=p.degree))

    def with_func(self, func, name: str | None = None, poly: MultiPoly | None = None) -> "FnHandle":
        return FnHandle(func, self.dim, self.domain, name or self.name, poly, dict(self.meta))

    def __sub__(self, other: "FnHandle") -> "FnHandle":
        poly = self.poly - other.poly if self.poly is not None and other.poly is not None else None
        return FnHandle(lambda x: self.func(x) - other.func(x), self.dim, self.domain,
                        f"{self.name}-{other.name}", poly, {})


def extend(f: FnHandle) -> FnHandle:
    """``f~(x, x_{d+1}) = f(x)`` on the ball one dimension up."""
    poly = f.poly.embed(f.dim + 1) if f.poly is not None else None
    meta = dict(f.meta)
    if "singular_points" in meta:
        meta["singular_points"] = [list(p) + [0.0] for p in meta["singular_points"]]
    return FnHandle(lambda y: f.func(np.asarray(y)[:, : f.dim]), f.dim + 1, "ball",
                    f"{f.name}~", poly, meta)


def as_values(f, points: np.ndarray) -> np.ndarray:
    """Values of ``f`` at ``points``: ``f`` may be a handle, callable or precomputed array."""
    if isinstance(f, np.ndarray):
        if f.shape[0] != points.shape[0]:
            raise ValueError("value array does not match the node count")
        return f
    if isinstance(f, MultiPoly):
        return poly_eval(f, points)
    return np.asarray(f(points), dtype=float)
