"""Reproducing kernels, the operator ``V_n^mu`` and smoothness measures on ``B^d``."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial

import numpy as np
from scipy.special import eval_gegenbauer

from .balldomain import (BallRule, ball_mass, ball_rule, ball_sup_points, central_diff_phi, d_id1_tilde,
                         graded_ball_rule, lp_norm_ball, partial_values, richardson_partial)
from .expansions import ConsistencyError, Expansion
from .fnhandle import FnHandle, as_values, extend
from .orthocore import CutoffEta, kernel_coefficients, zonal_coefficients, zonal_sum
from .polycore import MultiPoly
from .sphereapprox import compose_derivative, dij_values, graded_basis, rotation_jet, sphere_sup_points
from .spheregeo import SphereRule, forward_diff, graded_sphere_rule, lp_norm, sphere_rule

_CHUNK_ENTRIES = 1_000_000


def _mu_to_m(mu: float) -> int:
    m = 2 * mu + 1
    if abs(m - 1) < 1e-12:
        return 1
    if abs(m - 2) < 1e-12:
        return 2
    raise ValueError(f"mu = {mu} not supported (need mu in {{0, 1/2}})")


def lift_nodes(m: int, degree: int):
    """Nodes ``c`` and weights for averaging ``g(<xi, eta>)`` over ``S^{m-1}``.

    ``m = 1``: the two points of ``S^0``.  ``m = 2``: Gauss-Chebyshev nodes,
    exact for polynomials in ``cos psi`` of degree ``<= degree``.
    """
    if m == 1:
        return np.array([1.0, -1.0]), np.array([0.5, 0.5])
    if m == 2:
        L = degree // 2 + 1
        c = np.cos((2 * np.arange(1, L + 1) - 1) * np.pi / (2 * L))
        return c, np.full(L, 1.0 / L)
    raise ValueError("m must be 1 or 2")


@dataclass(frozen=True)
class BallKernelSpec:
    """``K_n^mu = sum_{k <= 2n} eta(k/n) P_k^mu`` with ``mu = (m - 1)/2``."""

    n: int
    d: int
    m: int = 1
    eta: CutoffEta = field(default_factory=CutoffEta)

    def __post_init__(self):
        if self.m not in (1, 2):
            raise ValueError("m must be 1 or 2")
        if self.n < 1:
            raise ValueError("n must be >= 1")

    @property
    def mu(self) -> float:
        return (self.m - 1) / 2.0

    @property
    def lam(self) -> float:
        return (self.d + self.m - 2) / 2.0

    def coefficients(self) -> np.ndarray:
        return kernel_coefficients(self.n, self.eta)


def _phi_any(x: np.ndarray) -> np.ndarray:
    q = 1.0 - np.sum(x * x, axis=1)
    if np.all(q >= 0):
        return np.sqrt(q)
    return np.sqrt(q.astype(complex))


def ball_kernel_sum(coeffs, d: int, m: int, x, y, deriv: int = 0) -> np.ndarray:
    """``sum_k coeffs[k] P_k^mu(x, y)`` for all row pairs (``deriv``-th derivative in ``<x,y>``).

    ``P_k^mu(x, y)`` is the ``S^{m-1}`` average of ``Z_{k, d+m}(<x,y> + phi(x) phi(y) <xi, eta>)``.
    Outside the ball ``phi`` turns imaginary; the average is even in it, so the
    value stays real and is the polynomial continuation.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.atleast_2d(np.asarray(y, dtype=float))
    coeffs = np.asarray(coeffs, dtype=float)
    lam = (d + m - 2) / 2.0
    u = x @ y.T
    v = np.outer(_phi_any(x), _phi_any(y))
    c, w = lift_nodes(m, len(coeffs) - 1)
    out = 0.0
    for cl, wl in zip(c, w):
        out = out + wl * zonal_sum(coeffs, lam, u + cl * v, deriv)
    return np.real(out)


def pnmu_kernel(spec, n: int, x, y) -> np.ndarray | float:
    """``P_n^mu(x, y)``; ``spec`` is a :class:`BallKernelSpec` or a pair ``(d, m)``."""
    d, m = (spec.d, spec.m) if isinstance(spec, BallKernelSpec) else spec
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    for z in (x, y):
        if np.any(np.sum(np.atleast_2d(z) ** 2, axis=1) > 1 + 1e-12):
            raise ValueError("point outside the unit ball")
    e = np.zeros(n + 1)
    e[n] = 1.0
    single = x.ndim == 1 and y.ndim == 1
    out = ball_kernel_sum(e, d, m, x, y)
    return float(out[0, 0]) if single else out


def _sqrt_jet(q0, q1, r):
    """Derivatives at 0 of ``sqrt(q0 + q1 t - t^2)`` up to order ``r``."""
    s = [np.sqrt(q0)]
    qs = [q0, q1, -1.0]
    for n in range(1, r + 1):
        acc = qs[n] if n <= 2 else 0.0
        for k in range(1, n):
            acc = acc - s[k] * s[n - k]
        s.append(acc / (2.0 * s[0]))
    return [s[n] * factorial(n) for n in range(r + 1)]


class RidgeFit:
    """A polynomial of degree ``<= K`` on ``B^2`` in the ridge basis
    ``U_k(<x, xi_kj>)``, ``xi_kj = (cos(j pi/(k+1)), sin(j pi/(k+1)))``, ``j <= k <= K``.

    These functions span ``Pi_K`` on the disc, and ridge functions have
    trivial partial derivatives, so one fit (on a rule exact to degree
    ``2K``) gives every ``d_i^q`` at any number of points in ``O(K^2)`` each.
    """

    def __init__(self, fn, K: int, mu: float = 0.5):
        self.K = int(K)
        ks, angs = [], []
        for k in range(self.K + 1):
            for j in range(k + 1):
                ks.append(k)
                angs.append(j * np.pi / (k + 1))
        self.k = np.array(ks)
        self.xi = np.stack([np.cos(angs), np.sin(angs)], axis=1)
        rule = ball_rule(2, mu, 2 * self.K)
        sw = np.sqrt(rule.weights)
        A = self.basis(0, 0, rule.points) * sw[:, None]
        b = as_values(fn, rule.points) * sw
        self.coeffs, *_ = np.linalg.lstsq(A, b, rcond=None)
        self.fit_residual = float(np.abs(A @ self.coeffs - b).max() / max(np.abs(b).max(), 1e-300))

    def _profile(self, q: int, t: np.ndarray) -> np.ndarray:
        # q-th derivative of U_k at t = <x, xi>
        out = np.zeros_like(t)
        ok = self.k >= q
        kq = np.broadcast_to(self.k[ok] - q, t[:, ok].shape)
        out[:, ok] = eval_gegenbauer(kq, 1.0 + q, t[:, ok]) * (2.0 ** q * factorial(q))
        return out

    def basis(self, q: int, i: int, x) -> np.ndarray:
        """``d_i^q`` of every basis function at the rows of ``x``."""
        return self._profile(q, np.asarray(x, dtype=float) @ self.xi.T) * self.xi[:, i] ** q

    def dij(self, r: int, i: int, j: int, x) -> np.ndarray:
        """``D_{i,j}^r`` of the fitted polynomial; each ridge term rotates along ``<Q x, xi>``."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        out = np.empty(len(x))
        step = max(1, _CHUNK_ENTRIES // len(self.k))
        for a in range(0, len(x), step):
            xs = x[a:a + step]
            t = xs @ self.xi.T
            kp = [None] + [self._profile(q, t) for q in range(1, r + 1)]
            out[a:a + step] = compose_derivative(kp, rotation_jet(xs, self.xi, i, j, r), r) @ self.coeffs
        return out

    def partial(self, q: int, i: int, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        out = np.empty(len(x))
        step = max(1, _CHUNK_ENTRIES // len(self.k))
        for a in range(0, len(x), step):
            out[a:a + step] = self.basis(q, i, x[a:a + step]) @ self.coeffs
        return out


class BallKernelOperator:
    """``x -> a_mu sum_b w_b f(y_b) sum_k c_k P_k^mu(x, y_b)``."""

    def __init__(self, coeffs, m: int, rule: BallRule, values):
        self.coeffs = np.asarray(coeffs, dtype=float)
        self.m = m
        self.rule = rule
        self.dim = rule.dim
        if abs(rule.mu - (m - 1) / 2.0) > 1e-12:
            raise ValueError("rule weight does not match the kernel's mu")
        self.lam = (self.dim + m - 2) / 2.0
        self.values = as_values(values, rule.points)
        self.wf = rule.weights * self.values / ball_mass(rule.dim, rule.mu)
        self.phi_y = np.sqrt(np.clip(1.0 - np.sum(rule.points ** 2, axis=1), 0.0, None))
        self.lift = lift_nodes(m, len(self.coeffs) - 1 + 4)
        self._ridge_fit = None

    def _chunks(self, n):
        step = max(1, _CHUNK_ENTRIES // max(len(self.wf), 1))
        for s in range(0, n, step):
            yield slice(s, min(n, s + step))

    def __call__(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if self._ridge_fit:
            return self._ridge_fit.partial(0, 0, x)
        return self._kernel_values(x)

    def _kernel_values(self, x) -> np.ndarray:
        out = np.empty(x.shape[0])
        for sl in self._chunks(x.shape[0]):
            out[sl] = ball_kernel_sum(self.coeffs, self.dim, self.m, x[sl], self.rule.points) @ self.wf
        return out

    def use_ridge(self) -> bool:
        """Fit the ridge representation now (``d = 2``); worthwhile before many evaluations."""
        return self._ridge(0, force=True) is not None

    def _lift_sum(self, u, v, jet, r, orders=None):
        """Lift-averaged r-th derivative; with ``orders`` a list of all requested orders."""
        c, w = self.lift
        want = [r] if orders is None else list(orders)
        total = [0.0] * len(want)
        for cl, wl in zip(c, w):
            arg = u + cl * v
            kp = [None] + [zonal_sum(self.coeffs, self.lam, arg, deriv=q) for q in range(1, r + 1)]
            jt = jet(cl)
            for a, q in enumerate(want):
                total[a] = total[a] + wl * compose_derivative(kp, jt, q)
        out = [np.real(t) for t in total]
        return out[0] if orders is None else out

    def dij(self, r: int, i: int, j: int, x) -> np.ndarray:
        """Rotation derivative ``D_{i,j}^r`` (``phi(x)`` is rotation invariant)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if r == 0:
            return self(x)
        ridge = self._ridge(len(x))
        if ridge is not None:
            return ridge.dij(r, i, j, x)
        y = self.rule.points
        out = np.empty(x.shape[0])
        for sl in self._chunks(x.shape[0]):
            u = x[sl] @ y.T
            v = np.outer(_phi_any(x[sl]), self.phi_y)
            rj = rotation_jet(x[sl], y, i, j, r)
            out[sl] = self._lift_sum(u, v, lambda cl: rj, r) @ self.wf
        return out

    def _ridge(self, count: int, force: bool = False):
        """Ridge representation (``d = 2``).  The fit costs one kernel pass over
        about ``2 (K+1)^2`` nodes and is then reused by every derivative, so it
        is built once a request reaches half that size."""
        K = len(self.coeffs) - 1
        if self.dim != 2 or (self._ridge_fit is None and count < (K + 1) ** 2 and not force):
            return None
        if self._ridge_fit is None:
            fit = RidgeFit(self._kernel_values, K, self.rule.mu)
            self._ridge_fit = fit if fit.fit_residual < 1e-10 else False
        return self._ridge_fit or None

    def partial(self, r: int, i: int, x) -> np.ndarray:
        """``d^r/dx_i^r`` of the output.

        Along ``x + t e_i`` the kernel argument is
        ``<x,y> + t y_i + c phi(y) sqrt(phi(x)^2 - 2 t x_i - t^2)``, whose jet is
        exact while ``phi(x)^2 >= 1e-3``.  Closer to the sphere the jet of the
        square root loses accuracy, so Richardson central differences of the
        polynomial continuation (evaluated with imaginary ``phi``) are used.
        """
        if r == 0:
            return self(x)
        return self.partials(r, i, x)[r]

    def partials(self, rmax: int, i: int, x) -> dict:
        """``{j: d^j/dx_i^j output}`` for ``1 <= j <= rmax`` from one kernel pass."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        ridge = self._ridge(len(x))
        if ridge is not None:
            return {j: ridge.partial(j, i, x) for j in range(1, rmax + 1)}
        q0 = 1.0 - np.sum(x * x, axis=1)
        out = {j: np.empty(x.shape[0]) for j in range(1, rmax + 1)}
        inner = q0 >= 1e-3
        y = self.rule.points
        idx = np.flatnonzero(inner)
        for sl in self._chunks(len(idx)):
            rows = idx[sl]
            xs = x[rows]
            u = xs @ y.T
            pj = _sqrt_jet(q0[rows], -2.0 * xs[:, i], rmax)
            v = np.outer(pj[0], self.phi_y)
            yi = np.broadcast_to(y[:, i], u.shape)

            def jet(cl):
                du = [None]
                for q in range(1, rmax + 1):
                    term = cl * np.outer(pj[q], self.phi_y)
                    du.append(term + yi if q == 1 else term)
                return du

            vals = self._lift_sum(u, v, jet, rmax, orders=range(1, rmax + 1))
            for j, val in zip(range(1, rmax + 1), vals):
                out[j][rows] = val @ self.wf
        rest = np.flatnonzero(~inner)
        for j in range(1, rmax + 1):
            if len(rest):
                out[j][rest] = richardson_partial(self, i, j, x[rest], 1e-2)
        return out

    def handle(self, name: str) -> FnHandle:
        return FnHandle(self, self.dim, "ball", name, None, {"operator": self})


def vnmu_apply(f, spec: BallKernelSpec, rule: BallRule) -> FnHandle:
    """``V_n^mu f = a_mu int f(y) K_n^mu(., y) W_mu(y) dy`` by the rule."""
    if spec.d != rule.dim:
        raise ValueError("kernel and rule dimensions differ")
    op = BallKernelOperator(spec.coefficients(), spec.m, rule, f)
    return op.handle(f"V{spec.n}^mu[{getattr(f, 'name', 'f')}]")


def project_degree_ball(f, k: int, m: int, rule: BallRule) -> FnHandle:
    e = np.zeros(k + 1)
    e[k] = 1.0
    return BallKernelOperator(e, m, rule, f).handle(f"projB{k}")


# ---------------------------------------------------------------------------
# best approximation
# ---------------------------------------------------------------------------

def kernel_degree_energies_ball(f, N: int, m: int, rule: BallRule) -> np.ndarray:
    """``||proj_k f||^2`` (normalized measure) from the ``P_k^mu`` Gram matrix, ``k <= N``."""
    d = rule.dim
    a = 1.0 / ball_mass(d, rule.mu)
    wf = rule.weights * as_values(f, rule.points)
    g = rule.points @ rule.points.T
    ph = np.sqrt(np.clip(1.0 - np.sum(rule.points ** 2, axis=1), 0.0, None))
    v = np.outer(ph, ph)
    lam = (d + m - 2) / 2.0
    mult = zonal_coefficients(N, lam)
    out = np.zeros(N + 1)
    c, w = lift_nodes(m, N)
    for cl, wl in zip(c, w):
        t = g + cl * v
        p_prev = np.ones_like(t)
        out[0] += wl * (wf @ p_prev @ wf)
        if N >= 1:
            p_cur = (1.0 if lam == 0 else 2.0 * lam) * t
            out[1] += wl * mult[1] * (wf @ p_cur @ wf)
            for k in range(2, N + 1):
                if lam == 0:
                    p_next = 2.0 * t * p_cur - p_prev
                else:
                    p_next = (2.0 * (k + lam - 1.0) * t * p_cur - (k + 2.0 * lam - 2.0) * p_prev) / k
                p_prev, p_cur = p_cur, p_next
                out[k] += wl * mult[k] * (wf @ p_cur @ wf)
    # <proj_k f, f> in the normalized measure: a_mu^2 sum_ab w_a f_a w_b f_b P_k(y_a, y_b)
    return out * a * a


def best_l2_error_ball(f, n: int, rule: BallRule, N_max: int | None = None, method: str = "basis") -> float:
    """``E_n(f)_{2,mu}``: distance to ``Pi_n`` in ``L^2(a_mu W_mu)``.

    The ball convention excludes degrees ``<= n`` (the sphere one excludes
    ``<= n - 1``).
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    N_max = max(n + 1, N_max if N_max is not None else n + 1)
    mass = rule.total_mass
    if method == "basis":
        ex = Expansion.of(f, graded_basis(rule, N_max, domain="ball"))
        energy, total = ex.degree_sq / mass, ex.total_sq / mass
    elif method == "kernel":
        energy = kernel_degree_energies_ball(f, N_max, _mu_to_m(rule.mu), rule)
        total = float(np.dot(rule.weights, as_values(f, rule.points) ** 2)) / mass
    else:
        raise ValueError(f"unknown method {method!r}")
    if float(energy[: N_max + 1].sum()) > total * (1 + 1e-8) + 1e-14:
        raise ConsistencyError("degree energies exceed the total norm")
    rad = total - float(energy[: n + 1].sum())
    if rad < -1e-8 * max(total, 1.0):
        raise ConsistencyError(f"negative Parseval remainder {rad:.3e}")
    return float(np.sqrt(max(rad, 0.0)))


# ---------------------------------------------------------------------------
# moduli
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BallRules:
    """A weighted rule on ``B^d`` and the rule for the extension term:
    ``S^d`` when ``mu = 0``; ``B^{d+1}`` with ``W_0`` when ``mu = 1/2``."""

    base: BallRule
    lift: object

    @property
    def mu(self) -> float:
        return self.base.mu


def ball_rules(d: int, mu: float, degree: int, refine_at=None, lift_degree: int | None = None) -> BallRules:
    """Rules for the ball modulus.  ``refine_at`` (a boundary point of ``B^d``)
    switches to graded rules concentrated at that point and its lift;
    ``lift_degree`` (default ``degree``) sets the resolution of the lift rule."""
    m = _mu_to_m(mu)
    ld = degree if lift_degree is None else lift_degree
    if refine_at is None:
        base = ball_rule(d, mu, degree)
        lift = sphere_rule(d + 1, ld) if m == 1 else ball_rule(d + 1, 0.0, ld)
        return BallRules(base, lift)
    c = np.asarray(refine_at, dtype=float)
    c1 = np.append(c, 0.0)
    base = graded_ball_rule(d, mu, c, degree) if d > 1 else ball_rule(d, mu, degree)
    lift = graded_sphere_rule(d + 1, c1, ld) if m == 1 else graded_ball_rule(d + 1, 0.0, c1, ld)
    return BallRules(base, lift)


def _lift_norm(vals_fn, p, lift, extra):
    vals = vals_fn(lift.points)
    if p == np.inf and extra is not None:
        vals = np.concatenate([vals, vals_fn(extra)])
    return lp_norm(vals, lift.weights, p)


def _lift_extra(f, rules: BallRules):
    if not getattr(f, "meta", {}).get("singular_points"):
        return None
    ft = extend(f)
    if isinstance(rules.lift, SphereRule):
        return sphere_sup_points(ft, rules.lift.dim)
    return ball_sup_points(ft, rules.lift.dim)


def _pairs(d):
    return [(i, j) for i in range(d) for j in range(i + 1, d)]


def modulus_ball_curve(f, r: int, ts, p: float, rules: BallRules, theta_grid: int = 16) -> np.ndarray:
    """``omega_r(f, t)_{p,mu}`` for each ``t`` (pooled angle grid, running maximum)."""
    if r < 1:
        raise ValueError("r must be >= 1")
    ts = np.asarray(ts, dtype=float)
    if np.any(ts <= 0):
        raise ValueError("t must be positive")
    d = rules.base.dim
    thetas = np.unique(np.concatenate([t * np.arange(1, theta_grid + 1) / theta_grid for t in ts]))
    extra = ball_sup_points(f, d) if p == np.inf else None
    lextra = _lift_extra(f, rules) if p == np.inf else None

    def ftilde(Y):
        return as_values(f, Y[:, :d])

    best = np.zeros(len(thetas))
    for a, th in enumerate(thetas):
        v = 0.0
        for i, j in _pairs(d):
            v = max(v, lp_norm_ball(lambda X: forward_diff(f, r, i, j, th, X), p, rules.base, extra))
        for i in range(d):
            v = max(v, _lift_norm(lambda Y: forward_diff(ftilde, r, i, d, th, Y), p, rules.lift, lextra))
        best[a] = v
    run = np.maximum.accumulate(best)
    return run[np.searchsorted(thetas, ts * (1 + 1e-12), side="right") - 1]


def modulus_ball(f, r: int, t: float, p: float, mu: float, rules: BallRules, theta_grid: int = 16) -> float:
    """Rotation modulus on the ball, including the extended-function terms."""
    if abs(rules.mu - mu) > 1e-12:
        raise ValueError("rules were built for a different mu")
    return float(modulus_ball_curve(f, r, [t], p, rules, theta_grid)[0])


def hat_modulus_ball_curve(f, r: int, ts, p: float, rule: BallRule, h_grid: int = 16) -> np.ndarray:
    """Unweighted modulus built from rotation and ``phi``-scaled central differences."""
    ts = np.asarray(ts, dtype=float)
    d = rule.dim
    hs = np.unique(np.concatenate([t * np.arange(1, h_grid + 1) / h_grid for t in ts]))
    extra = ball_sup_points(f, d) if p == np.inf else None
    best = np.zeros(len(hs))
    for a, h in enumerate(hs):
        v = 0.0
        for i, j in _pairs(d):
            v = max(v, lp_norm_ball(lambda X: forward_diff(f, r, i, j, h, X), p, rule, extra))
        for i in range(d):
            v = max(v, lp_norm_ball(lambda X: central_diff_phi(f, r, i, h, X), p, rule, extra))
        best[a] = v
    run = np.maximum.accumulate(best)
    return run[np.searchsorted(hs, ts * (1 + 1e-12), side="right") - 1]


def hat_modulus_ball(f, r: int, t: float, p: float, rule: BallRule, h_grid: int = 16) -> float:
    """``sup_{0<h<=t}`` of the rotation and central-difference terms.  Negative
    ``h`` gives the same norms (the stencil is symmetric), so only ``h > 0`` is
    sampled."""
    return float(hat_modulus_ball_curve(f, r, [t], p, rule, h_grid)[0])


# ---------------------------------------------------------------------------
# K-functionals
# ---------------------------------------------------------------------------

def _ball_derivative_values(g, r, rules: BallRules, pts, lpts, hat: bool):
    """Values of every derivative term of the K-functional at ``pts`` / ``lpts``."""
    d = rules.base.dim
    rot = [dij_values(g, r, i, j, pts) for i, j in _pairs(d)]
    side = []
    for i in range(d):
        if hat:
            ph = np.sqrt(np.clip(1.0 - np.sum(pts * pts, axis=1), 0.0, None))
            side.append(ph ** r * partial_values(g, i, r, pts))
        else:
            side.append(d_id1_tilde(g, r, i, lpts))
    return rot, side


def kfunc_ball_curve(f, r: int, ts, p, rules: BallRules, degrees, hat: bool = False,
                     eta: CutoffEta | None = None):
    """K-functional upper bounds for every ``t`` in ``ts`` (``hat`` selects the
    ``phi^r d_i^r`` version).  Returns ``(values, infos)``, or a list of such
    pairs when ``p`` is a list."""
    degrees = list(degrees)
    if not degrees:
        raise ValueError("need at least one candidate degree")
    ps = list(p) if isinstance(p, (list, tuple)) else [p]
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    d = rules.base.dim
    m = _mu_to_m(rules.mu)
    extra = ball_sup_points(f, d) if np.inf in ps else None
    lextra = _lift_extra(f, rules) if (np.inf in ps and not hat) else None
    pts = rules.base.points if extra is None else np.concatenate([rules.base.points, extra])
    lpts = rules.lift.points if lextra is None else np.concatenate([rules.lift.points, lextra])
    nb, nl = len(rules.base.points), len(rules.lift.points)
    fvals = as_values(f, pts)
    cands = []
    for deg in degrees:
        g = vnmu_apply(fvals[:nb], BallKernelSpec(deg, d, m, eta or CutoffEta()), rules.base)
        g.meta["operator"].use_ridge()
        rot, side = _ball_derivative_values(g, r, rules, pts, lpts, hat)
        cands.append((deg, fvals - g(pts), rot, side))

    def bnorm(v, q):
        return lp_norm(v if q == np.inf else v[:nb], rules.base.weights, q)

    def lnorm(v, q):
        return lp_norm(v if q == np.inf else v[:nl], rules.lift.weights, q)

    results = []
    for q in ps:
        table = []
        for deg, diff, rot, side in cands:
            sn = max(bnorm(v, q) for v in side) if hat else max(lnorm(v, q) for v in side)
            table.append((deg, bnorm(diff, q), max((bnorm(v, q) for v in rot), default=0.0), sn))
        vals, infos = [], []
        for t in ts:
            deg, dist, rn, sn = min(table, key=lambda c: c[1] + t ** r * (c[2] + c[3]))
            vals.append(dist + t ** r * (rn + sn))
            infos.append({"m": deg, "distance": dist, "rotation": rn, "side": sn})
        results.append((np.array(vals), infos))
    return results if isinstance(p, (list, tuple)) else results[0]


def _kfunc(f, r, t, p, rules: BallRules, degrees, hat, eta):
    vals, infos = kfunc_ball_curve(f, r, [t], p, rules, degrees, hat, eta)
    return float(vals[0]), infos[0]


def kfunc_ball_upper(f, r: int, t: float, p: float, rules: BallRules, degrees, eta: CutoffEta | None = None):
    """Upper bound of ``K_r(f, t)_{p,mu}`` over the candidates ``V_m^mu f``."""
    return _kfunc(f, r, t, p, rules, degrees, False, eta)


def hat_kfunc_ball_upper(f, r: int, t: float, p: float, rules: BallRules, degrees, eta: CutoffEta | None = None):
    """Upper bound of the ``phi^r d_i^r`` K-functional over the candidates ``V_m^mu f``."""
    return _kfunc(f, r, t, p, rules, degrees, True, eta)


# ---------------------------------------------------------------------------
# norms
# ---------------------------------------------------------------------------

def sobolev_norm_ball(f, r: int, p: float, mu: float, rule: BallRule) -> float:
    """``||f|| + sum_{i<j} ||D_{i,j}^r f|| + sum_i ||phi^r d_i^r f||`` in ``L^p(W_mu)``."""
    if abs(rule.mu - mu) > 1e-12:
        raise ValueError("rule weight does not match mu")
    d = rule.dim
    extra = ball_sup_points(f, d) if p == np.inf else None
    total = lp_norm_ball(f, p, rule, extra)
    for i, j in _pairs(d):
        total += lp_norm_ball(lambda X: dij_values(f, r, i, j, X), p, rule, extra)
    for i in range(d):
        def fn(X, i=i):
            ph = np.sqrt(np.clip(1.0 - np.sum(X * X, axis=1), 0.0, None))
            return ph ** r * partial_values(f, i, r, X)
        total += lp_norm_ball(fn, p, rule, extra)
    return total


def lipschitz_norm_ball(f, r: int, alpha: float, ell: int, p: float, mu: float, rules: BallRules,
                        theta_grid=None) -> float:
    """``||f||`` plus sups of ``||Delta^ell_theta D^r f|| / theta^alpha`` over
    rotations inside ``B^d`` and in the ``(x_i, x_{d+1})`` planes of the extension."""
    from .sphereapprox import default_theta_grid

    if not 0 <= alpha < 1:
        raise ValueError("alpha must lie in [0, 1)")
    if abs(rules.mu - mu) > 1e-12:
        raise ValueError("rules were built for a different mu")
    thetas = default_theta_grid() if theta_grid is None else np.asarray(theta_grid, dtype=float)
    d = rules.base.dim
    extra = ball_sup_points(f, d) if p == np.inf else None
    lextra = _lift_extra(f, rules) if p == np.inf else None
    sup = 0.0
    for i, j in _pairs(d):
        def g(X, i=i, j=j):
            return dij_values(f, r, i, j, X) if r > 0 else as_values(f, X)
        for th in thetas:
            sup = max(sup, lp_norm_ball(lambda X: forward_diff(g, ell, i, j, th, X), p, rules.base, extra)
                      / th ** alpha)
    for i in range(d):
        def gt(Y, i=i):
            return d_id1_tilde(f, r, i, Y) if r > 0 else as_values(f, Y[:, :d])
        for th in thetas:
            sup = max(sup, _lift_norm(lambda Y: forward_diff(gt, ell, i, d, th, Y), p, rules.lift, lextra)
                      / th ** alpha)
    return lp_norm_ball(f, p, rules.base, extra) + sup


def hnorm_ball(f, r: int, alpha: float, ell: int, p: float, mu: float, rules: BallRules, dyadic_K: int = 6,
               theta_grid: int = 8) -> float:
    """``||f|| + max_{0<=k<=K} omega_{r+ell}(f, 2^-k)_{p,mu} / 2^{-k(r+alpha)}``."""
    if abs(rules.mu - mu) > 1e-12:
        raise ValueError("rules were built for a different mu")
    ts = 2.0 ** -np.arange(dyadic_K + 1, dtype=float)
    om = modulus_ball_curve(f, r + ell, ts, p, rules, theta_grid)
    extra = ball_sup_points(f, rules.base.dim) if p == np.inf else None
    return lp_norm_ball(f, p, rules.base, extra) + float(np.max(om / ts ** (r + alpha)))


def lift_to_sphere(f, d: int, m: int) -> FnHandle:
    """``F(x, x') = f(x)`` on ``S^{d+m-1}``."""
    poly = f.poly.embed(d + m) if getattr(f, "poly", None) is not None else None
    return FnHandle(lambda Y: as_values(f, np.asarray(Y)[:, :d]), d + m, "sphere", f"{getattr(f, 'name', 'f')}^",
                    poly, {})


__all__ = [
    "BallKernelSpec", "BallKernelOperator", "ball_kernel_sum", "pnmu_kernel", "vnmu_apply", "project_degree_ball",
    "best_l2_error_ball", "kernel_degree_energies_ball", "BallRules", "ball_rules", "modulus_ball",
    "modulus_ball_curve", "hat_modulus_ball", "hat_modulus_ball_curve", "kfunc_ball_upper",
    "hat_kfunc_ball_upper", "kfunc_ball_curve", "sobolev_norm_ball", "lipschitz_norm_ball", "hnorm_ball", "lift_to_sphere",
    "lift_nodes", "RidgeFit", "MultiPoly",
]
