"""Weighted geometry of the unit ball ``B^d``."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np
from scipy.special import betaln

from .fnhandle import FnHandle, as_values
from .orthocore import gauss_rule
from .polycore import MultiPoly, dij_power, poly_eval
from .spheregeo import dij_num, lp_norm, sphere_area, sphere_rule

SUPPORTED_BALL_DIMS = (1, 2, 3)


def ball_mass(d: int, mu: float) -> float:
    """``int_{B^d} (1 - ||x||^2)^{mu - 1/2} dx``."""
    if mu < 0:
        raise ValueError("mu must be >= 0")
    # polar: omega_{d-1} * (1/2) B(d/2, mu + 1/2)
    return float(sphere_area(d) * 0.5 * np.exp(betaln(d / 2.0, mu + 0.5))) if d > 1 else float(
        np.exp(betaln(0.5, mu + 0.5)))


@dataclass(frozen=True)
class BallWeight:
    """``W_mu(x) = (1 - ||x||^2)^{mu - 1/2}`` on ``B^d``."""

    d: int
    mu: float

    def __post_init__(self):
        if self.mu < 0:
            raise ValueError("mu must be >= 0")

    @property
    def m(self) -> int | None:
        m = 2 * self.mu + 1
        return int(round(m)) if abs(m - round(m)) < 1e-12 else None

    @property
    def mass(self) -> float:
        return ball_mass(self.d, self.mu)

    @property
    def a_mu(self) -> float:
        return 1.0 / self.mass

    def __call__(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return (1.0 - np.sum(x * x, axis=1)) ** (self.mu - 0.5)


@dataclass(frozen=True)
class BallRule:
    """Nodes in ``B^d`` with ``W_mu dx`` folded into the weights."""

    dim: int
    points: np.ndarray
    weights: np.ndarray
    exactness: int
    mu: float

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    def __len__(self) -> int:
        return len(self.weights)

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, as_values(values, self.points)))


def ball_rule(d: int, mu: float, degree: int) -> BallRule:
    """Polar product rule on ``B^d`` for ``W_mu``.

    With ``u = 2 r^2 - 1`` the radial measure ``r^{d-1} (1 - r^2)^{mu - 1/2} dr``
    becomes a Jacobi weight ``(1 - u)^{mu - 1/2} (1 + u)^{(d-2)/2}`` up to a
    constant; it is paired with ``sphere_rule(d, degree)``.  For ``d = 1`` a
    single Gauss-Jacobi(mu - 1/2, mu - 1/2) rule is used.
    """
    if d not in SUPPORTED_BALL_DIMS:
        raise ValueError(f"ball_rule supports d in {SUPPORTED_BALL_DIMS}, got {d}")
    if not 0 <= degree <= 96:
        raise ValueError("degree must lie in [0, 96]")
    if mu < 0:
        raise ValueError("mu must be >= 0")
    nrad = degree // 2 + 1
    a = mu - 0.5
    if d == 1:
        g = gauss_rule("jacobi", nrad, a, a)
        return BallRule(1, g.nodes[:, None], g.weights, degree, mu)
    b = (d - 2) / 2.0
    g = gauss_rule("jacobi", nrad, a, b)
    r = np.sqrt((1.0 + g.nodes) / 2.0)
    wr = g.weights * 2.0 ** (-a - b) / 4.0
    sph = sphere_rule(d, degree)
    pts = (r[:, None, None] * sph.points[None]).reshape(-1, d)
    w = (wr[:, None] * sph.weights[None, :]).reshape(-1)
    return BallRule(d, pts, w, degree, mu)


def phi_eval(x):
    """``sqrt(1 - ||x||^2)``; raises outside the ball."""
    x = np.asarray(x, dtype=float)
    sq = np.sum(np.atleast_2d(x) ** 2, axis=1)
    if np.any(sq > (1 + 1e-12) ** 2):
        raise ValueError("point outside the unit ball")
    out = np.sqrt(np.clip(1.0 - sq, 0.0, None))
    return float(out[0]) if x.ndim == 1 else out


def lp_norm_ball(f, p: float, rule: BallRule, sup_points: np.ndarray | None = None,
                 normalized: bool = False) -> float:
    """``(int |f|^p W_mu dx)^{1/p}`` by the rule; ``p = inf`` is an unweighted grid sup.

    ``normalized`` divides the measure by its mass.
    """
    vals = as_values(f, rule.points)
    if p == np.inf:
        if sup_points is not None:
            vals = np.concatenate([vals, as_values(f, sup_points)])
        return lp_norm(vals, None, p)
    w = rule.weights / rule.total_mass if normalized else rule.weights
    return lp_norm(vals, w, p)


def ball_sup_points(f, d: int, count: int = 48) -> np.ndarray | None:
    """Deterministic refinement cloud in ``B^d`` around ``f.meta['singular_points']``."""
    sing = getattr(f, "meta", {}).get("singular_points") if f is not None else None
    if not sing:
        return None
    rng = np.random.default_rng(54321)
    out = []
    for s in sing:
        s = np.asarray(s, dtype=float)[:d]
        out.append(s[None])
        for rad in np.geomspace(1e-4, 0.5, 12):
            v = rng.standard_normal((count // 12 + 1, d))
            v /= np.linalg.norm(v, axis=1, keepdims=True)
            q = s + rad * v
            nrm = np.linalg.norm(q, axis=1, keepdims=True)
            out.append(np.where(nrm > 1, q / nrm, q))
    return np.concatenate(out)


# ---------------------------------------------------------------------------
# partial derivatives
# ---------------------------------------------------------------------------

def richardson_partial(f, i: int, j: int, x: np.ndarray, h: float) -> np.ndarray:
    def stencil(hh):
        acc = np.zeros(x.shape[0])
        for k in range(j + 1):
            y = x.copy()
            y[:, i] += (j / 2.0 - k) * hh
            acc += (-1) ** k * comb(j, k) * as_values(f, y)
        return acc / hh ** j
    return (4.0 * stencil(h / 2.0) - stencil(h)) / 3.0


def partial_values(f, i: int, j: int, x, h: float = 2e-2) -> np.ndarray:
    """``d^j f / dx_i^j`` at rows of ``x``: exact for polynomials and kernel
    operators, Richardson-extrapolated central differences otherwise."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if j == 0:
        return as_values(f, x)
    poly = f if isinstance(f, MultiPoly) else getattr(f, "poly", None)
    if poly is not None:
        return poly_eval(poly.diff(i, j), x)
    op = getattr(f, "meta", {}).get("operator") if isinstance(f, FnHandle) else None
    if op is not None and hasattr(op, "partial"):
        return op.partial(j, i, x)
    return richardson_partial(f, i, j, x, h)


def phi_partial_terms(r: int) -> dict:
    """Expansion of ``(-phi d_i)^r`` as ``{(a, b, j): c}`` meaning ``c phi^a x_i^b d_i^j``.

    Uses ``d_i phi = -x_i / phi``, so one application maps
    ``phi^a x^b G_j`` to ``a phi^{a-1} x^{b+1} G_j - b phi^{a+1} x^{b-1} G_j - phi^{a+1} x^b G_{j+1}``.
    """
    terms = {(0, 0, 0): 1.0}
    for _ in range(r):
        nxt: dict = {}
        for (a, b, j), c in terms.items():
            for key, val in (((a - 1, b + 1, j), a * c), ((a + 1, b - 1, j), -b * c), ((a + 1, b, j + 1), -c)):
                if val != 0:
                    nxt[key] = nxt.get(key, 0.0) + val
        terms = {k: v for k, v in nxt.items() if v != 0}
    return terms


def _apply_terms(terms, f, i, z, xi, ph, s, h):
    out = np.zeros(z.shape[0])
    cache = {}
    op = getattr(f, "meta", {}).get("operator") if isinstance(f, FnHandle) else None
    jmax = max(j for (_, _, j) in terms)
    if op is not None and hasattr(op, "partials") and getattr(f, "poly", None) is None and jmax > 1:
        cache.update(op.partials(jmax, i, z))
    for (a, b, j), c in terms.items():
        if j not in cache:
            cache[j] = partial_values(f, i, j, z, h)
        out += c * ph ** a * xi ** b * s ** j * cache[j]
    return out


def neg_phi_partial(f, r: int, i: int, x, s=1.0, h: float = 2e-2) -> np.ndarray:
    """``(-phi(x) d/dx_i)^r [f(s x)]`` at rows ``x`` of ``B^d``."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    ph = np.sqrt(np.clip(1.0 - np.sum(x * x, axis=1), 0.0, None))
    s = np.broadcast_to(np.asarray(s, dtype=float), (x.shape[0],))
    return _apply_terms(phi_partial_terms(r), f, i, s[:, None] * x, x[:, i], ph, s, h)


def d_id1_tilde(f, r: int, i: int, y, h: float = 2e-2):
    """``D^r_{i,d+1}`` of the trivial extension of ``f``, evaluated at ``y`` in ``B^{d+1}``.

    With ``y = s (x, phi(x))`` the value is ``(-phi d_i)^r [f(s x)]`` at ``x``;
    points with negative last coordinate use the parity ``(-1)^r``.  At
    ``s = 0`` every term carries a positive power of ``s`` and the value is 0.
    """
    y = np.asarray(y, dtype=float)
    single = y.ndim == 1
    y = np.atleast_2d(y)
    d = y.shape[1] - 1
    if not 0 <= i < d:
        raise ValueError(f"index {i} out of range for base dimension {d}")
    s = np.linalg.norm(y, axis=1)
    safe = np.where(s > 0, s, 1.0)
    xi = np.where(s > 0, y[:, i] / safe, 0.0)
    ph = np.where(s > 0, np.abs(y[:, d]) / safe, 1.0)
    out = _apply_terms(phi_partial_terms(r), f, i, y[:, :d], xi, ph, s, h)
    if r % 2:
        out = np.where(y[:, d] < 0, -out, out)
    return float(out[0]) if single else out


def d_id1_direct(f, r: int, i: int, y, h: float = 1e-2) -> np.ndarray:
    """``D^r_{i,d+1} f~`` by rotating in the ``(x_i, x_{d+1})`` plane (independent route).

    Reported in the orientation of :func:`d_id1_tilde`, whose first-order
    operator is ``x_i d_{d+1} - x_{d+1} d_i``, i.e. ``(-1)^r`` times
    ``dij_power(., i, d, r)``.
    """
    y = np.atleast_2d(np.asarray(y, dtype=float))
    d = y.shape[1] - 1
    sign = (-1.0) ** r
    poly = f if isinstance(f, MultiPoly) else getattr(f, "poly", None)
    if poly is not None:
        return sign * poly_eval(dij_power(poly.embed(d + 1), i, d, r), y)
    return sign * np.asarray(dij_num(lambda z: as_values(f, z[:, :d]), r, i, d, y, h), dtype=float)


def central_diff_phi(f, r: int, i: int, h: float, x) -> np.ndarray | float:
    """``sum_k (-1)^k binom(r,k) f(x + (r/2 - k) h phi(x) e_i)``; exactly 0 where a
    shifted node leaves the ball."""
    if r < 1 or h <= 0:
        raise ValueError("need r >= 1 and h > 0")
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    ph = np.sqrt(np.clip(1.0 - np.sum(x * x, axis=1), 0.0, None))
    reach = 0.5 * r * h * ph
    ok = ph > 0  # phi = 0: every node coincides and the difference is 0
    for sgn in (-1.0, 1.0):
        y = x.copy()
        y[:, i] += sgn * reach
        ok &= np.sum(y * y, axis=1) <= 1.0 + 1e-15
    out = np.zeros(x.shape[0])
    if ok.any():
        xs = x[ok]
        acc = np.zeros(xs.shape[0])
        for k in range(r + 1):
            y = xs.copy()
            y[:, i] += (r / 2.0 - k) * h * ph[ok]
            acc += (-1) ** k * comb(r, k) * as_values(f, y)
        out[ok] = acc
    return float(out[0]) if single else out


# ---------------------------------------------------------------------------
# norms of the extended derivative
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NormResult:
    value: float
    resolution: dict


def norm_did1(f, r: int, i: int, p: float, mu: float, degree: int = 24, radial_nodes: int = 24,
              normalized: bool = False, h: float = 2e-2) -> NormResult:
    """``||D^r_{i,d+1} f~||_p`` through the base ball.

    ``mu = 0``: ``||(phi d_i)^r f||`` in ``L^p(B^d, W_0)``.
    ``mu = 1/2``: radial layers ``int_0^1 s^d (1-s^2)^{-1/2} int_{B^d} |(phi d_i)^r [f(s.)]|^p dx/phi ds``,
    with a Gauss-Jacobi rule in ``s``.  ``normalized`` divides by the total
    mass of the measure on the right-hand side.
    """
    d = f.dim if hasattr(f, "dim") else None
    if d is None:
        raise ValueError("f must expose its dimension")
    base = ball_rule(d, 0.0, degree)
    if abs(mu) < 1e-15:
        vals = neg_phi_partial(f, r, i, base.points, 1.0, h)
        if p == np.inf:
            return NormResult(float(np.abs(vals).max()), {"degree": degree, "nodes": len(base)})
        w = base.weights / base.total_mass if normalized else base.weights
        return NormResult(lp_norm(vals, w, p), {"degree": degree, "nodes": len(base)})
    if abs(mu - 0.5) > 1e-15:
        raise ValueError("norm_did1 supports mu in {0, 1/2}")
    g = gauss_rule("jacobi", radial_nodes, -0.5, float(d))
    s = (1.0 + g.nodes) / 2.0
    # s^d (1-s)^{-1/2} ds = 2^{-d-1/2} (1+t)^d (1-t)^{-1/2} dt; leftover (1+s)^{-1/2}
    ws = g.weights * 2.0 ** (-d - 0.5) * (1.0 + s) ** -0.5
    res = {"degree": degree, "nodes": len(base), "radial_nodes": radial_nodes}
    if p == np.inf:
        best = 0.0
        for sk in np.concatenate([s, [1.0]]):
            best = max(best, float(np.abs(neg_phi_partial(f, r, i, base.points, sk, h)).max()))
        return NormResult(best, res)
    total = 0.0
    for sk, wk in zip(s, ws):
        vals = neg_phi_partial(f, r, i, base.points, sk, h)
        total += wk * float(np.dot(base.weights, np.abs(vals) ** p))
    if normalized:
        total /= float(ws.sum()) * base.total_mass
    return NormResult(total ** (1.0 / p), res)


def norm_did1_direct(f, r: int, i: int, p: float, mu: float, degree: int = 24,
                     normalized: bool = True, h: float = 1e-2) -> NormResult:
    """The left-hand side of the same identity computed on ``S^d`` (``mu = 0``)
    or ``B^{d+1}`` with ``W_0`` (``mu = 1/2``) by rotating the extension."""
    d = f.dim
    if abs(mu) < 1e-15:
        rule = sphere_rule(d + 1, degree)
    elif abs(mu - 0.5) < 1e-15:
        rule = ball_rule(d + 1, 0.0, degree)
    else:
        raise ValueError("norm_did1_direct supports mu in {0, 1/2}")
    vals = d_id1_direct(f, r, i, rule.points, h)
    res = {"degree": degree, "nodes": len(rule.weights)}
    if p == np.inf:
        return NormResult(float(np.abs(vals).max()), res)
    w = rule.weights / rule.weights.sum() if normalized else rule.weights
    return NormResult(lp_norm(vals, w, p), res)


def graded_ball_rule(d: int, mu: float, center, degree: int, levels: int = 10) -> BallRule:
    """Radial Gauss-Jacobi times a graded angular rule pointing at ``center``.

    For point singularities on the boundary sphere; no polynomial exactness
    is claimed (``exactness = -1``).
    """
    from .spheregeo import graded_sphere_rule

    if d not in (2, 3):
        raise ValueError("graded_ball_rule supports d in (2, 3)")
    a = mu - 0.5
    b = (d - 2) / 2.0
    g = gauss_rule("jacobi", degree // 2 + 1, a, b)
    r = np.sqrt((1.0 + g.nodes) / 2.0)
    wr = g.weights * 2.0 ** (-a - b) / 4.0
    sph = graded_sphere_rule(d, center, degree, levels)
    pts = (r[:, None, None] * sph.points[None]).reshape(-1, d)
    w = (wr[:, None] * sph.weights[None, :]).reshape(-1)
    return BallRule(d, pts, w, -1, mu)
