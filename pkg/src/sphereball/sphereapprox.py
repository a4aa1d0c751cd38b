"""Zonal kernels, degree projections, the smoothing operator ``V_n`` and
smoothness measures on ``S^{d-1}``."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, factorial

import numpy as np

from .expansions import ConsistencyError, Expansion, GradedBasis
from .fnhandle import FnHandle, as_values
from .orthocore import CutoffEta, kernel_coefficients, zonal_coefficients, zonal_sum
from .polycore import MultiPoly, all_exponents, dij_power, multinomial, poly_eval
from .spheregeo import SphereRule, dij_num, forward_diff, lp_norm, rotate_points, sphere_area

_CHUNK_ENTRIES = 2_000_000


def _lam(d: int) -> float:
    if d < 2:
        raise ValueError("sphere dimension d must be >= 2")
    return (d - 2) / 2.0


@dataclass(frozen=True)
class ZonalSpec:
    """Kernel ``K_n = sum_{k <= 2n} eta(k/n) Z_k`` on ``S^{d-1}``."""

    n: int
    d: int
    eta: CutoffEta = field(default_factory=CutoffEta)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        _lam(self.d)

    @property
    def lam(self) -> float:
        return _lam(self.d)

    def coefficients(self) -> np.ndarray:
        return kernel_coefficients(self.n, self.eta)


def zonal_eval(n: int, d: int, t):
    """``Z_n(t) = (n + lam)/lam * C_n^lam(t)`` with ``lam = (d - 2)/2``."""
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1 + 1e-12):
        raise ValueError("argument outside [-1, 1]")
    e = np.zeros(n + 1)
    e[n] = 1.0
    out = zonal_sum(e, _lam(d), t)
    return out if np.ndim(out) else float(out)


# ---------------------------------------------------------------------------
# jets: Taylor coefficients of t -> K(u(t)) at t = 0
# ---------------------------------------------------------------------------

def _series_mul(a, b, order):
    out = [0.0] * (order + 1)
    for p, ap in enumerate(a):
        if ap is None:
            continue
        for q in range(order + 1 - p):
            if b[q] is not None:
                out[p + q] = out[p + q] + ap * b[q]
    return out


def compose_derivative(kprime, du, r: int):
    """r-th derivative at 0 of ``K(u(t))``.

    ``kprime[m]`` holds ``K^{(m)}(u(0))`` and ``du[m]`` holds ``u^{(m)}(0)``
    for ``m = 1..r`` (index 0 unused).  Arrays broadcast.
    """
    if r == 0:
        return kprime[0]
    shift = [None] + [du[m] / factorial(m) for m in range(1, r + 1)]
    power = [1.0] + [None] * r
    total = [0.0] * (r + 1)
    for m in range(1, r + 1):
        power = _series_mul(power, shift, r)
        for q in range(r + 1):
            if power[q] is not None and not (np.isscalar(power[q]) and power[q] == 0.0):
                total[q] = total[q] + kprime[m] / factorial(m) * power[q]
    return total[r] * factorial(r)


def rotation_jet(x: np.ndarray, y: np.ndarray, i: int, j: int, r: int):
    """Derivatives at ``t = 0`` of ``<Q_{i,j,-t} x, y>`` for every pair of rows.

    The function equals ``c + a cos t + b sin t`` with ``a = x_i y_i + x_j y_j``
    and ``b = x_j y_i - x_i y_j``.
    """
    a = np.outer(x[:, i], y[:, i]) + np.outer(x[:, j], y[:, j])
    b = np.outer(x[:, j], y[:, i]) - np.outer(x[:, i], y[:, j])
    cycle = (None, b, -a, -b, a)
    return [None] + [cycle[(m - 1) % 4 + 1] for m in range(1, r + 1)]


class ZonalOperator:
    """``x -> (1/omega) sum_b w_b f(y_b) sum_k c_k Z_k(<x, y_b>)``.

    Evaluation and rotation derivatives ``D_{i,j}^r`` are exact up to the
    quadrature; the kernel polynomial is differentiated analytically.
    """

    def __init__(self, coeffs, rule: SphereRule, values):
        self.coeffs = np.asarray(coeffs, dtype=float)
        self.rule = rule
        self.dim = rule.dim
        self.lam = _lam(rule.dim)
        self.values = as_values(values, rule.points)
        self.wf = rule.weights * self.values / sphere_area(rule.dim)

    def _chunks(self, n):
        step = max(1, _CHUNK_ENTRIES // max(len(self.wf), 1))
        for s in range(0, n, step):
            yield slice(s, min(n, s + step))

    def __call__(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        out = np.empty(x.shape[0])
        for sl in self._chunks(x.shape[0]):
            u = np.clip(x[sl] @ self.rule.points.T, -1.0, 1.0)
            out[sl] = zonal_sum(self.coeffs, self.lam, u) @ self.wf
        return out

    def dij(self, r: int, i: int, j: int, x) -> np.ndarray:
        """``D_{i,j}^r`` of the operator output at the rows of ``x``."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if r == 0:
            return self(x)
        out = np.empty(x.shape[0])
        y = self.rule.points
        for sl in self._chunks(x.shape[0]):
            u = np.clip(x[sl] @ y.T, -1.0, 1.0)
            kp = [None] + [zonal_sum(self.coeffs, self.lam, u, deriv=m) for m in range(1, r + 1)]
            g = compose_derivative(kp, rotation_jet(x[sl], y, i, j, r), r)
            out[sl] = g @ self.wf
        return out

    def dij_pairs(self, r: int, pairs, x) -> dict:
        """``D_{i,j}^r`` for several planes, sharing the kernel derivatives."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        out = {pr: np.empty(x.shape[0]) for pr in pairs}
        y = self.rule.points
        for sl in self._chunks(x.shape[0]):
            u = np.clip(x[sl] @ y.T, -1.0, 1.0)
            kp = [None] + [zonal_sum(self.coeffs, self.lam, u, deriv=m) for m in range(1, r + 1)]
            for i, j in pairs:
                out[(i, j)][sl] = compose_derivative(kp, rotation_jet(x[sl], y, i, j, r), r) @ self.wf
        return out

    def handle(self, name: str) -> FnHandle:
        return FnHandle(self, self.dim, "sphere", name, None, {"operator": self})


def project_degree(f, k: int, rule: SphereRule) -> FnHandle:
    """``proj_k f`` by quadrature against the zonal harmonic ``Z_k``."""
    e = np.zeros(k + 1)
    e[k] = 1.0
    return ZonalOperator(e, rule, f).handle(f"proj{k}")


def zonal_power_coefficients(k: int, d: int) -> np.ndarray:
    """Monomial coefficients of ``Z_k(t)`` (index = power of ``t``)."""
    lam = _lam(d)
    # recurrence on coefficient vectors, mirroring gegenbauer_all / Chebyshev
    prev = np.zeros(k + 1)
    prev[0] = 1.0
    if k == 0:
        return prev
    cur = np.zeros(k + 1)
    cur[1] = 1.0 if lam == 0 else 2.0 * lam
    for n in range(2, k + 1):
        nxt = np.zeros(k + 1)
        if lam == 0:
            nxt[1:] = 2.0 * cur[:-1]
            nxt -= prev
        else:
            nxt[1:] = 2.0 * (n + lam - 1.0) * cur[:-1] / n
            nxt -= (n + 2.0 * lam - 2.0) * prev / n
        prev, cur = cur, nxt
    return cur * zonal_coefficients(k, lam)[k]


def project_degree_poly(f, k: int, rule: SphereRule) -> MultiPoly:
    """``proj_k f`` as an explicit polynomial (parity ``k`` terms up to degree ``k``).

    Uses ``(x.y)^m = sum_{|b| = m} m!/b! x^b y^b``; exact when the rule
    integrates ``f`` times degree-``k`` polynomials.
    """
    d = rule.dim
    c = zonal_power_coefficients(k, d)
    vals = as_values(f, rule.points) * rule.weights / sphere_area(d)
    coeffs = {}
    for m in range(k % 2, k + 1, 2):
        if c[m] == 0.0:
            continue
        for e in all_exponents(d, m, exact=True):
            mono = np.prod(rule.points ** np.array(e), axis=1)
            coeffs[e] = c[m] * multinomial(e) * float(vals @ mono)
    scale = max((abs(v) for v in coeffs.values()), default=0.0)
    return MultiPoly(d, coeffs, prune=1e-15 * scale)


def vn_apply(f, spec: ZonalSpec, rule: SphereRule) -> FnHandle:
    """``V_n f``: the eta-filtered kernel operator."""
    if spec.d != rule.dim:
        raise ValueError("kernel and rule dimensions differ")
    op = ZonalOperator(spec.coefficients(), rule, f)
    return op.handle(f"V{spec.n}[{getattr(f, 'name', 'f')}]")


# ---------------------------------------------------------------------------
# expansions and best approximation
# ---------------------------------------------------------------------------

_BASES: dict = {}


def graded_basis(rule, max_degree: int, domain: str = "sphere") -> GradedBasis:
    """Cached discrete orthonormal basis on the rule's nodes."""
    key = (id(rule), domain)
    hit = _BASES.get(key)
    if hit is not None and hit[0] is rule and hit[1].max_degree >= max_degree:
        return hit[1]
    basis = GradedBasis(rule.points, rule.weights, max_degree, domain)
    _BASES[key] = (rule, basis)
    return basis


@dataclass
class HarmonicExpansion:
    """Per-degree components of ``f`` (values on the rule) and their energies."""

    max_degree: int
    components: list
    degree_sq: np.ndarray
    total_sq: float
    truncation_sq: float

    @classmethod
    def build(cls, f, max_degree: int, rule: SphereRule) -> "HarmonicExpansion":
        ex = Expansion.of(f, graded_basis(rule, max_degree))
        comps = [ex.component(k) for k in range(max_degree + 1)]
        sq = ex.degree_sq[: max_degree + 1]
        return cls(max_degree, comps, sq, ex.total_sq, ex.total_sq - float(sq.sum()))


def best_l2_error(f, n: int, rule: SphereRule, N_max: int | None = None, method: str = "basis") -> float:
    """``E_n(f)_2``: distance to ``Pi_{n-1}`` by the Parseval tail.

    ``method="kernel"`` sums ``||proj_k f||^2`` from the zonal Gram matrix
    instead of the orthonormal basis (slower, independent route).
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    N_max = max(n, N_max if N_max is not None else n)
    if method == "kernel":
        energy = kernel_degree_energies(f, N_max, rule)
        total = float(np.dot(rule.weights, as_values(f, rule.points) ** 2))
    elif method == "basis":
        ex = Expansion.of(f, graded_basis(rule, N_max))
        energy, total = ex.degree_sq, ex.total_sq
    else:
        raise ValueError(f"unknown method {method!r}")
    if float(energy[: N_max + 1].sum()) > total * (1 + 1e-8) + 1e-14:
        raise ConsistencyError("degree energies exceed the total norm")
    rad = total - float(energy[:n].sum())
    if rad < -1e-8 * max(total, 1.0):
        raise ConsistencyError(f"negative Parseval remainder {rad:.3e}")
    return float(np.sqrt(max(rad, 0.0)))


def kernel_degree_energies(f, N: int, rule: SphereRule) -> np.ndarray:
    """``||proj_k f||_2^2 = (1/omega) sum_ab w_a f_a w_b f_b Z_k(<y_a, y_b>)`` for ``k <= N``."""
    d = rule.dim
    lam = _lam(d)
    wf = rule.weights * as_values(f, rule.points)
    g = np.clip(rule.points @ rule.points.T, -1.0, 1.0)
    mult = zonal_coefficients(N, lam)
    out = np.empty(N + 1)
    om = sphere_area(d)
    # iterate the recurrence so only two Gram-sized matrices are alive
    p_prev = np.ones_like(g)
    out[0] = wf @ p_prev @ wf / om
    if N >= 1:
        p_cur = (1.0 if lam == 0 else 2.0 * lam) * g
        out[1] = mult[1] * (wf @ p_cur @ wf) / om
        for k in range(2, N + 1):
            if lam == 0:
                p_next = 2.0 * g * p_cur - p_prev
            else:
                p_next = (2.0 * (k + lam - 1.0) * g * p_cur - (k + 2.0 * lam - 2.0) * p_prev) / k
            p_prev, p_cur = p_cur, p_next
            out[k] = mult[k] * (wf @ p_cur @ wf) / om
    return out


def sphere_sup_points(f, d: int, count: int = 64) -> np.ndarray | None:
    """Refinement cloud around ``f.meta['singular_points']`` (deterministic)."""
    sing = getattr(f, "meta", {}).get("singular_points") if f is not None else None
    if not sing:
        return None
    rng = np.random.default_rng(12345)
    pts = []
    for s in sing:
        s = np.asarray(s, dtype=float)[:d]
        s = s / np.linalg.norm(s)
        for rad in np.geomspace(1e-4, 0.5, 12):
            v = rng.standard_normal((count // 12 + 1, d))
            v -= (v @ s)[:, None] * s
            v /= np.linalg.norm(v, axis=1, keepdims=True)
            pts.append(np.cos(rad) * s + np.sin(rad) * v)
        pts.append(s[None])
    return np.concatenate(pts)


def _norm(vals_fn, p, rule, extra):
    vals = vals_fn(rule.points)
    if p == np.inf and extra is not None:
        vals = np.concatenate([vals, vals_fn(extra)])
    return lp_norm(vals, rule.weights, p)


def en_upper(f, n: int, p: float, rule: SphereRule, spec: ZonalSpec | None = None) -> float:
    """``||f - V_n f||_p`` on the rule (plus refinement points when ``p = inf``)."""
    spec = spec or ZonalSpec(n, rule.dim)
    g = vn_apply(f, spec, rule)
    extra = sphere_sup_points(f, rule.dim) if p == np.inf else None
    return _norm(lambda X: as_values(f, X) - g(X), p, rule, extra)


# ---------------------------------------------------------------------------
# moduli and K-functionals
# ---------------------------------------------------------------------------

def _pairs(d):
    return [(i, j) for i in range(d) for j in range(i + 1, d)]


def modulus_curve(f, r: int, ts, p: float, rule: SphereRule, theta_grid: int = 16,
                  sup_points: np.ndarray | None = None) -> np.ndarray:
    """``omega_r(f, t)_p`` for each ``t`` in ``ts``.

    The angles for all ``t`` are pooled and the result is a running maximum
    over the pooled grid, so the curve is nondecreasing in ``t``.  Negative
    angles are not sampled: ``||Delta_{-theta} f|| = ||Delta_theta f||`` by
    rotation invariance of the measure.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    ts = np.asarray(ts, dtype=float)
    if np.any(ts <= 0) or np.any(ts > np.pi + 1e-12):
        raise ValueError("t must lie in (0, pi]")
    thetas = np.unique(np.concatenate([t * np.arange(1, theta_grid + 1) / theta_grid for t in ts]))
    if p == np.inf and sup_points is None:
        sup_points = sphere_sup_points(f, rule.dim)
    best = np.zeros(len(thetas))
    for i, j in _pairs(rule.dim):
        for a, th in enumerate(thetas):
            v = _norm(lambda X: forward_diff(f, r, i, j, th, X), p, rule, sup_points)
            best[a] = max(best[a], v)
    run = np.maximum.accumulate(best)
    idx = np.searchsorted(thetas, ts * (1 + 1e-12), side="right") - 1
    return run[idx]


def modulus_sphere(f, r: int, t: float, p: float, rule: SphereRule, theta_grid: int = 16,
                   sup_points: np.ndarray | None = None) -> float:
    """``max_{i<j} sup_{0 < theta <= t} ||Delta^r_{i,j,theta} f||_p`` on a grid."""
    return float(modulus_curve(f, r, [t], p, rule, theta_grid, sup_points)[0])


def dij_values(f, r: int, i: int, j: int, x, h: float = 1e-2) -> np.ndarray:
    """``D_{i,j}^r f`` at rows of ``x`` by the best available route."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    poly = getattr(f, "poly", None)
    if isinstance(f, MultiPoly):
        poly = f
    if poly is not None:
        return poly_eval(dij_power(poly, i, j, r), x)
    op = getattr(f, "meta", {}).get("operator") if isinstance(f, FnHandle) else None
    if op is not None and hasattr(op, "dij"):
        return op.dij(r, i, j, x)
    return np.asarray(dij_num(f, r, i, j, x, h), dtype=float)


def dij_handle(f, r: int, i: int, j: int, h: float = 1e-2) -> FnHandle:
    dim = f.dim if isinstance(f, (FnHandle, MultiPoly)) else None
    poly = dij_power(f.poly, i, j, r) if getattr(f, "poly", None) is not None else None
    return FnHandle(lambda X: dij_values(f, r, i, j, X, h), dim, getattr(f, "domain", "sphere"),
                    f"D{i}{j}^{r}", poly, dict(getattr(f, "meta", {}), operator=None))


def kfunc_sphere_curve(f, r: int, ts, p, rule: SphereRule, degrees, eta: CutoffEta | None = None):
    """``kfunc_sphere_upper`` for every ``t`` in ``ts``; candidates are evaluated once.

    Returns ``(values, infos)``.  ``p`` may also be a list, in which case a
    list of such pairs (one per exponent) is returned.
    """
    degrees = list(degrees)
    if not degrees:
        raise ValueError("need at least one candidate degree")
    ps = list(p) if isinstance(p, (list, tuple)) else [p]
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    extra = sphere_sup_points(f, rule.dim) if np.inf in ps else None
    pts = rule.points if extra is None else np.concatenate([rule.points, extra])
    nr = len(rule.points)
    fvals = as_values(f, pts)
    pairs = _pairs(rule.dim)
    cands = []
    for m in degrees:
        op = ZonalOperator(ZonalSpec(m, rule.dim, eta or CutoffEta()).coefficients(), rule, fvals[:nr])
        diff = fvals - op(pts)
        ders = op.dij_pairs(r, pairs, pts)
        cands.append((m, diff, ders))

    def norm(v, q):
        return lp_norm(v if q == np.inf else v[:nr], rule.weights, q)

    results = []
    for q in ps:
        table = [(m, norm(diff, q), max(norm(v, q) for v in ders.values())) for m, diff, ders in cands]
        vals, infos = [], []
        for t in ts:
            m, dist, der = min(table, key=lambda c: c[1] + t ** r * c[2])
            vals.append(dist + t ** r * der)
            infos.append({"m": m, "distance": dist, "derivative": der})
        results.append((np.array(vals), infos))
    return results if isinstance(p, (list, tuple)) else results[0]


def kfunc_sphere_upper(f, r: int, t: float, p: float, rule: SphereRule, degrees, eta: CutoffEta | None = None):
    """Upper bound of the K-functional from the candidates ``V_m f``.

    Returns ``(value, {"m": best m, "distance": ..., "derivative": ...})``.
    """
    vals, infos = kfunc_sphere_curve(f, r, [t], p, rule, degrees, eta)
    return float(vals[0]), infos[0]


# ---------------------------------------------------------------------------
# norms
# ---------------------------------------------------------------------------

def frac_laplacian_l2(f, s: float, N: int, rule: SphereRule) -> FnHandle:
    """``sum_{1 <= k <= N} (k(k + d - 2))^s proj_k f``."""
    if s <= 0:
        raise ValueError("s must be positive")
    d = rule.dim
    k = np.arange(N + 1, dtype=float)
    mult = (k * (k + d - 2)) ** s
    mult[0] = 0.0
    return ZonalOperator(mult, rule, f).handle(f"(-L)^{s}")


def sobolev_norm_sphere(f, r: int, p: float, rule: SphereRule, h: float = 1e-2) -> float:
    """``||f||_p + sum_{i<j} ||D_{i,j}^r f||_p``."""
    extra = sphere_sup_points(f, rule.dim) if p == np.inf else None
    total = _norm(lambda X: as_values(f, X), p, rule, extra)
    for i, j in _pairs(rule.dim):
        total += _norm(lambda X: dij_values(f, r, i, j, X, h), p, rule, extra)
    return total


def default_theta_grid(levels: int = 6, per_octave: int = 2) -> np.ndarray:
    """Angles ``2^{-k}`` (with intermediate points) for ``0 <= k <= levels``."""
    e = np.arange(0, levels * per_octave + 1) / per_octave
    return 2.0 ** -e


def lipschitz_norm_sphere(f, r: int, alpha: float, ell: int, p: float, rule: SphereRule,
                          theta_grid=None, h: float = 1e-2) -> float:
    """``||f||_p + max_{i<j} sup_theta ||Delta^ell_{i,j,theta} D^r_{i,j} f||_p / theta^alpha``."""
    if not 0 <= alpha < 1:
        raise ValueError("alpha must lie in [0, 1)")
    if ell < 1:
        raise ValueError("ell must be >= 1")
    thetas = default_theta_grid() if theta_grid is None else np.asarray(theta_grid, dtype=float)
    extra = sphere_sup_points(f, rule.dim) if p == np.inf else None
    base = _norm(lambda X: as_values(f, X), p, rule, extra)
    sup = 0.0
    for i, j in _pairs(rule.dim):
        def g(X, i=i, j=j):
            return dij_values(f, r, i, j, X, h) if r > 0 else as_values(f, X)
        for th in thetas:
            sup = max(sup, _norm(lambda X: forward_diff(g, ell, i, j, th, X), p, rule, extra) / th ** alpha)
    return base + sup


def hnorm_sphere(f, r: int, alpha: float, ell: int, p: float, rule: SphereRule, dyadic_K: int = 6,
                 theta_grid: int = 8) -> float:
    """``||f||_p + max_{0 <= k <= K} omega_{r+ell}(f, 2^-k)_p / 2^{-k(r+alpha)}``."""
    ts = 2.0 ** -np.arange(dyadic_K + 1, dtype=float)
    om = modulus_curve(f, r + ell, ts, p, rule, theta_grid)
    extra = sphere_sup_points(f, rule.dim) if p == np.inf else None
    return _norm(lambda X: as_values(f, X), p, rule, extra) + float(np.max(om / ts ** (r + alpha)))


def poly_dim_sphere(d: int, n: int) -> int:
    """``dim Pi_n(S^{d-1})``."""
    return comb(n + d - 1, d - 1) + (comb(n + d - 2, d - 1) if n >= 1 else 0)


__all__ = [
    "ZonalSpec", "zonal_eval", "ZonalOperator", "project_degree", "project_degree_poly", "vn_apply",
    "HarmonicExpansion", "best_l2_error", "kernel_degree_energies", "en_upper", "modulus_sphere",
    "modulus_curve", "kfunc_sphere_upper", "kfunc_sphere_curve", "frac_laplacian_l2", "sobolev_norm_sphere",
    "lipschitz_norm_sphere", "hnorm_sphere", "dij_values", "dij_handle", "compose_derivative",
    "rotation_jet", "graded_basis", "sphere_sup_points", "zonal_power_coefficients",
]
