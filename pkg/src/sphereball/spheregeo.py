"""Plane rotations, product quadrature and rotation differences on ``S^{d-1}``."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np
from scipy.special import gammaln

from .fnhandle import as_values
from .orthocore import gauss_rule

SUPPORTED_SPHERE_DIMS = (2, 3, 4)


def rotation_matrix(d: int, i: int, j: int, theta: float) -> np.ndarray:
    """Rotation by ``theta`` in the ``(x_i, x_j)`` plane, ``e_i`` turning towards ``e_j``."""
    if i == j or not (0 <= i < d and 0 <= j < d):
        raise ValueError(f"invalid plane ({i}, {j}) in dimension {d}")
    q = np.eye(d)
    c, s = np.cos(theta), np.sin(theta)
    q[i, i] = c
    q[i, j] = -s
    q[j, i] = s
    q[j, j] = c
    return q


@dataclass(frozen=True)
class PlaneRotation:
    i: int
    j: int
    theta: float

    def matrix(self, d: int) -> np.ndarray:
        return rotation_matrix(d, self.i, self.j, self.theta)


def rotate_points(x: np.ndarray, i: int, j: int, theta) -> np.ndarray:
    """Apply ``Q_{i,j,theta}`` to each row of ``x``; ``theta`` may be per-row."""
    x = np.asarray(x, dtype=float)
    out = x.copy()
    c, s = np.cos(theta), np.sin(theta)
    xi, xj = x[..., i], x[..., j]
    out[..., i] = xi * c - xj * s
    out[..., j] = xi * s + xj * c
    return out


def rotate(q: PlaneRotation, x) -> np.ndarray:
    """Rotate sphere point(s); renormalise only if the norm drifts by more than 1e-14."""
    x = np.asarray(x, dtype=float)
    y = rotate_points(x, q.i, q.j, q.theta)
    nrm = np.linalg.norm(y, axis=-1, keepdims=True)
    unit_in = np.abs(np.linalg.norm(x, axis=-1, keepdims=True) - 1.0) < 1e-12
    fix = unit_in & (np.abs(nrm - 1.0) > 1e-14)
    return np.where(fix, y / nrm, y)


def sphere_area(d: int) -> float:
    """Surface area of ``S^{d-1}``."""
    return float(2.0 * np.pi ** (d / 2.0) / np.exp(gammaln(d / 2.0)))


@dataclass(frozen=True)
class SphereRule:
    dim: int
    points: np.ndarray
    weights: np.ndarray
    exactness: int

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    def __len__(self) -> int:
        return len(self.weights)

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, as_values(values, self.points)))


def _polar_1d(npts: int, split: bool):
    """Gauss-Legendre nodes on [-1, 1], optionally two copies split at 0."""
    if not split:
        r = gauss_rule("legendre", npts)
        return r.nodes, r.weights
    r = gauss_rule("legendre", npts)
    t = np.concatenate([(r.nodes - 1.0) / 2.0, (r.nodes + 1.0) / 2.0])
    w = np.concatenate([r.weights, r.weights]) / 2.0
    return t, w


def sphere_rule(d: int, degree: int, split: bool = False) -> SphereRule:
    """Product rule on ``S^{d-1}`` exact for polynomials of degree ``<= degree``.

    * ``d = 2``: ``degree + 1`` equispaced angles.
    * ``d = 3``: Gauss-Legendre in ``x_3`` times equispaced azimuth.  With
      ``split=True`` the polar rule is a composite of two Gauss rules on
      ``[-1, 0]`` and ``[0, 1]``, which also integrates functions with a kink
      on the equator accurately.
    * ``d = 4``: Gauss-Jacobi(1/2, 1/2) in ``x_1`` times the ``d = 3`` rule.
    """
    if d not in SUPPORTED_SPHERE_DIMS and d != 1:
        raise ValueError(f"sphere_rule supports d in {SUPPORTED_SPHERE_DIMS}, got {d}")
    if degree < 0 or degree > 400:
        raise ValueError("degree out of range")
    if d == 1:
        return SphereRule(1, np.array([[-1.0], [1.0]]), np.array([1.0, 1.0]), 10**9)
    if d == 2:
        m = degree + 1
        phi = 2.0 * np.pi * np.arange(m) / m
        pts = np.stack([np.cos(phi), np.sin(phi)], axis=1)
        return SphereRule(2, pts, np.full(m, 2.0 * np.pi / m), degree)
    if d == 3:
        npol = degree // 2 + 1
        z, wz = _polar_1d(npol, split)
        m = degree + 1
        phi = 2.0 * np.pi * (np.arange(m) + 0.5) / m
        zz, pp = np.meshgrid(z, phi, indexing="ij")
        rho = np.sqrt(np.clip(1.0 - zz ** 2, 0.0, None))
        pts = np.stack([rho * np.cos(pp), rho * np.sin(pp), zz], axis=-1).reshape(-1, 3)
        w = (wz[:, None] * np.full(m, 2.0 * np.pi / m)[None, :]).reshape(-1)
        return SphereRule(3, pts, w, degree)
    inner = sphere_rule(3, degree, split)
    g = gauss_rule("jacobi", degree // 2 + 1, 0.5, 0.5)
    t = g.nodes
    s = np.sqrt(1.0 - t ** 2)
    pts = np.concatenate(
        [np.repeat(t, len(inner))[:, None], (s[:, None, None] * inner.points[None]).reshape(-1, 3)], axis=1
    )
    w = (g.weights[:, None] * inner.weights[None, :]).reshape(-1)
    return SphereRule(4, pts, w, degree)


def lp_norm(values: np.ndarray, weights: np.ndarray | None, p: float) -> float:
    """Discrete ``L^p`` norm; ``p = inf`` is the maximum over the given nodes."""
    v = np.abs(np.asarray(values, dtype=float))
    if p == np.inf:
        return float(v.max()) if v.size else 0.0
    if p < 1:
        raise ValueError("p must be >= 1")
    if p == 2:
        return float(np.sqrt(np.dot(weights, v * v)))
    return float(np.dot(weights, v ** p) ** (1.0 / p))


def lp_norm_sphere(f, p: float, rule: SphereRule, sup_points: np.ndarray | None = None) -> float:
    """``(sum_k w_k |f(x_k)|^p)^(1/p)``; for ``p = inf`` a grid sup over the nodes
    (plus ``sup_points`` when given)."""
    vals = as_values(f, rule.points)
    if p == np.inf and sup_points is not None:
        vals = np.concatenate([vals, as_values(f, sup_points)])
    return lp_norm(vals, rule.weights, p)


def forward_diff(f, r: int, i: int, j: int, theta: float, x) -> np.ndarray | float:
    """``sum_k (-1)^k binom(r, k) f(Q_{i,j,k theta} x)``."""
    if r < 1:
        raise ValueError("difference order must be >= 1")
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = np.atleast_2d(x)
    out = np.zeros(pts.shape[0])
    for k in range(r + 1):
        out += (-1) ** k * comb(r, k) * as_values(f, rotate_points(pts, i, j, k * theta))
    return float(out[0]) if single else out


def _central(g, r: int, h: float) -> np.ndarray:
    acc = 0.0
    for k in range(r + 1):
        acc = acc + (-1) ** k * comb(r, k) * g((r / 2.0 - k) * h)
    return acc / h ** r


def angular_derivative(g, r: int, h: float = 1e-2, richardson: bool = True):
    """r-th derivative at 0 of the angle function ``g`` by a central stencil.

    With ``richardson`` the O(h^2) error is eliminated using steps h and h/2.
    """
    if not richardson:
        return _central(g, r, h)
    return (4.0 * _central(g, r, h / 2.0) - _central(g, r, h)) / 3.0


def dij_num(f, r: int, i: int, j: int, x, h: float = 1e-2, richardson: bool = True):
    """``D_{i,j}^r f(x)`` as the r-th derivative of ``t -> f(Q_{i,j,-t} x)`` at 0."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = np.atleast_2d(x)
    if r == 0:
        out = as_values(f, pts)
    else:
        out = angular_derivative(lambda t: as_values(f, rotate_points(pts, i, j, -t)), r, h, richardson)
    out = np.asarray(out, dtype=float)
    return float(out[0]) if single else out


def tangential_partial(f, j: int, x, h: float = 1e-2) -> np.ndarray | float:
    """``-sum_{i != j} x_i D_{i,j} f(x)``: the j-th tangential derivative."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = np.atleast_2d(x)
    out = np.zeros(pts.shape[0])
    for i in range(pts.shape[1]):
        if i != j:
            out -= pts[:, i] * dij_num(f, 1, i, j, pts, h)
    return float(out[0]) if single else out


def graded_panels(length: float, levels: int, spacing: float, qmin: int = 6):
    """Gauss-Legendre nodes/weights on ``[0, length]`` with panels shrinking
    geometrically towards 0 and node spacing at most ``spacing`` elsewhere."""
    br = [0.0] + [length * 2.0 ** -k for k in range(levels, -1, -1)]
    t, w = [], []
    for a, b in zip(br[:-1], br[1:]):
        q = max(qmin, int(np.ceil((b - a) / spacing)) + 1)
        g = gauss_rule("legendre", q)
        t.append(a + (b - a) * (g.nodes + 1.0) / 2.0)
        w.append(g.weights * (b - a) / 2.0)
    return np.concatenate(t), np.concatenate(w)


def _frame(center: np.ndarray) -> np.ndarray:
    """Orthonormal basis whose last vector is ``center``."""
    c = np.asarray(center, dtype=float)
    c = c / np.linalg.norm(c)
    q, _ = np.linalg.qr(np.column_stack([c, np.eye(len(c))]))
    q = q[:, : len(c)]
    if q[:, 0] @ c < 0:
        q[:, 0] = -q[:, 0]
    return np.column_stack([q[:, 1:], q[:, 0]])


def graded_sphere_rule(d: int, center, degree: int, levels: int = 10) -> SphereRule:
    """Rule on ``S^{d-1}`` (``d`` in 2, 3) refined geometrically towards ``center``.

    Meant for integrands with a point singularity; it carries no polynomial
    exactness guarantee (``exactness = -1``).
    """
    spacing = 2.0 * np.pi / (degree + 1)
    c = np.asarray(center, dtype=float)
    if d == 2:
        t, w = graded_panels(np.pi, levels, spacing)
        ang = np.concatenate([t, -t]) + np.arctan2(c[1], c[0])
        wt = np.concatenate([w, w])
        return SphereRule(2, np.stack([np.cos(ang), np.sin(ang)], axis=1), wt, -1)
    if d != 3:
        raise ValueError("graded_sphere_rule supports d in (2, 3)")
    th, wth = graded_panels(np.pi, levels, spacing)
    m = degree + 1
    phi = 2.0 * np.pi * (np.arange(m) + 0.5) / m
    tt, pp = np.meshgrid(th, phi, indexing="ij")
    local = np.stack([np.sin(tt) * np.cos(pp), np.sin(tt) * np.sin(pp), np.cos(tt)], axis=-1).reshape(-1, 3)
    w = ((wth * np.sin(th))[:, None] * np.full(m, 2.0 * np.pi / m)[None, :]).reshape(-1)
    return SphereRule(3, local @ _frame(c).T, w, -1)
