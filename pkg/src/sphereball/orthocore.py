"""Gegenbauer polynomials, zonal kernels, the smooth cutoff and Gauss rules."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import betaln

MAX_DEGREE = 200


class QuadratureError(RuntimeError):
    """Node/weight construction failed."""


# ---------------------------------------------------------------------------
# Gegenbauer polynomials
# ---------------------------------------------------------------------------

def _check_t(t):
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1 + 1e-12):
        raise ValueError("argument outside [-1, 1]")
    return t


def gegenbauer_all(nmax: int, lam: float, t) -> np.ndarray:
    """``C_k^lam(t)`` for ``k = 0..nmax``, stacked along a new first axis.

    No range check on ``t``; kernels evaluated off the ball rely on this.
    """
    if nmax > MAX_DEGREE:
        raise ValueError(f"degree {nmax} exceeds cap {MAX_DEGREE}")
    t = np.asarray(t)
    out = np.empty((nmax + 1,) + t.shape, dtype=np.result_type(t, float))
    out[0] = 1.0
    if nmax >= 1:
        out[1] = 2.0 * lam * t
    for n in range(2, nmax + 1):
        out[n] = (2.0 * (n + lam - 1.0) * t * out[n - 1] - (n + 2.0 * lam - 2.0) * out[n - 2]) / n
    return out


def gegenbauer_eval(n: int, lam: float, t):
    """``C_n^lam(t)`` by the three-term recurrence, ``C_n^lam(1) = binom(n + 2 lam - 1, n)``."""
    if n < 0:
        raise ValueError("degree must be nonnegative")
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    t = _check_t(t)
    return gegenbauer_all(n, lam, t)[n]


def zonal_coefficients(nmax: int, lam: float) -> np.ndarray:
    """Multipliers turning ``C_k^lam`` into ``Z_k``: ``(k + lam)/lam`` (``2``/``1`` when ``lam = 0``)."""
    k = np.arange(nmax + 1, dtype=float)
    if lam == 0:
        c = np.full(nmax + 1, 2.0)
        c[0] = 1.0
        return c
    return (k + lam) / lam


def zonal_all(nmax: int, lam: float, t) -> np.ndarray:
    """Zonal harmonics ``Z_k(t)`` for ``k = 0..nmax``.

    For ``lam = 0`` (the circle) the limit ``Z_0 = 1``, ``Z_k = 2 T_k`` is used.
    """
    t = np.asarray(t)
    if lam == 0:
        out = np.empty((nmax + 1,) + t.shape, dtype=np.result_type(t, float))
        out[0] = 1.0
        if nmax >= 1:
            out[1] = t
        for k in range(2, nmax + 1):
            out[k] = 2.0 * t * out[k - 1] - out[k - 2]
        out[1:] *= 2.0
        return out
    c = zonal_coefficients(nmax, lam)
    return gegenbauer_all(nmax, lam, t) * c.reshape((-1,) + (1,) * t.ndim)


def zonal_sum(coeffs, lam: float, t, deriv: int = 0) -> np.ndarray:
    """``sum_k coeffs[k] * Z_k^{(deriv)}(t)`` without materialising every degree.

    Derivatives use ``d/dt C_k^lam = 2 lam C_{k-1}^{lam+1}`` (and
    ``d^m/dt^m T_k = k 2^{m-1} (m-1)! C_{k-m}^m`` on the circle).
    """
    coeffs = np.asarray(coeffs, dtype=float)
    nmax = len(coeffs) - 1
    t = np.asarray(t)
    if deriv and nmax < deriv:
        return np.zeros(t.shape)
    if lam == 0:
        base = np.ones(nmax + 1)
        base[1:] = 2.0
        if deriv == 0:
            mult = base
            inner_lam = 0.0
        else:
            k = np.arange(nmax + 1, dtype=float)
            mult = base * k * 2.0 ** (deriv - 1) * _fact(deriv - 1)
            inner_lam = float(deriv)
    else:
        mult = zonal_coefficients(nmax, lam)
        rising = 1.0
        for q in range(deriv):
            rising *= lam + q
        mult = mult * (2.0 ** deriv) * rising
        inner_lam = lam + deriv
    w = coeffs * mult
    return _clenshaw_gegenbauer(w[deriv:], inner_lam, t, chebyshev=(lam == 0 and deriv == 0))


def _fact(n: int) -> float:
    out = 1.0
    for k in range(2, n + 1):
        out *= k
    return out


def _clenshaw_gegenbauer(w, lam, t, chebyshev=False):
    """Evaluate ``sum_k w[k] P_k(t)`` with ``P_k = C_k^lam`` (or ``T_k``)."""
    n = len(w) - 1
    t = np.asarray(t)
    if n < 0:
        return np.zeros(t.shape)
    b1 = np.zeros(t.shape, dtype=np.result_type(t, float))
    b2 = np.zeros_like(b1)
    tmp = np.empty_like(b1)
    # P_{k+1} = a_k(t) P_k - c_k P_{k-1}; updated in place to avoid temporaries
    for k in range(n, 0, -1):
        if chebyshev:
            ak, c_next = 2.0, 1.0
        else:
            ak = 2.0 * (k + lam) / (k + 1)
            c_next = (k + 2.0 * lam) / (k + 2)
        np.multiply(t, b1, out=tmp)
        tmp *= ak
        b2 *= -c_next
        b2 += tmp
        b2 += w[k]
        b1, b2 = b2, b1
    if chebyshev:
        return w[0] + t * b1 - b2
    p1 = 2.0 * lam * t
    c1 = (2.0 * lam) / 2.0
    return w[0] + p1 * b1 - c1 * b2


# ---------------------------------------------------------------------------
# cutoff
# ---------------------------------------------------------------------------

def _h(u):
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    pos = u > 0
    out[pos] = np.exp(-1.0 / u[pos])
    return out


@dataclass(frozen=True)
class CutoffEta:
    """Smooth cutoff: 1 on ``[0, inner]``, 0 on ``[outer, inf)``, exp(-1/u) blend between."""

    inner: float = 1.0
    outer: float = 2.0

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        u = (x - self.inner) / (self.outer - self.inner)
        a = _h(1.0 - u)
        b = _h(u)
        with np.errstate(invalid="ignore"):
            out = np.where(u <= 0, 1.0, np.where(u >= 1, 0.0, a / np.where(a + b > 0, a + b, 1.0)))
        return out if out.ndim else float(out)


def eta_eval(eta: CutoffEta, x):
    if np.any(np.asarray(x) < 0):
        raise ValueError("cutoff argument must be nonnegative")
    return eta(x)


def kernel_coefficients(n: int, eta: CutoffEta | None = None) -> np.ndarray:
    """``eta(k/n)`` for ``k = 0..2n``."""
    if n < 1:
        raise ValueError("kernel degree n must be >= 1")
    eta = eta or CutoffEta()
    return np.asarray(eta(np.arange(2 * n + 1) / n), dtype=float)


def kernel_kn(n: int, lam: float, eta: CutoffEta | None, t):
    """``K_n(t) = sum_{k=0}^{2n} eta(k/n) Z_k(t)``."""
    t = _check_t(t)
    out = zonal_sum(kernel_coefficients(n, eta), lam, t)
    return out if np.ndim(out) else float(out)


# ---------------------------------------------------------------------------
# Gauss rules
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GaussRule1D:
    kind: str
    a: float
    b: float
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def exactness(self) -> int:
        return 2 * len(self.nodes) - 1

    @property
    def mass(self) -> float:
        return jacobi_mass(self.a, self.b)


def jacobi_mass(a: float, b: float) -> float:
    """``int_{-1}^1 (1-t)^a (1+t)^b dt``."""
    return float(np.exp((a + b + 1) * np.log(2.0) + betaln(a + 1, b + 1)))


def _jacobi_recurrence(n: int, a: float, b: float):
    k = np.arange(n, dtype=float)
    ab = a + b
    alpha = np.empty(n)
    beta = np.empty(max(n - 1, 0))
    alpha[0] = (b - a) / (ab + 2.0)
    if n > 1:
        kk = k[1:]
        alpha[1:] = (b * b - a * a) / ((2 * kk + ab) * (2 * kk + ab + 2))
        # off-diagonal^2 for k = 1..n-1
        j = np.arange(1, n, dtype=float)
        num = 4.0 * j * (j + a) * (j + b) * (j + ab)
        den = (2 * j + ab) ** 2 * (2 * j + ab + 1) * (2 * j + ab - 1)
        with np.errstate(divide="ignore", invalid="ignore"):
            bsq = num / den
        # j = 1 with a + b = -1 is a removable 0/0
        bsq[0] = 4.0 * (a + 1) * (b + 1) / ((ab + 2) ** 2 * (ab + 3))
        beta = np.sqrt(bsq)
    return alpha, beta


def gauss_rule(kind: str, npts: int, a: float = 0.0, b: float = 0.0) -> GaussRule1D:
    """Golub-Welsch Gauss rule for ``(1-t)^a (1+t)^b`` on ``[-1, 1]``.

    ``kind`` is ``"legendre"`` (forces ``a = b = 0``) or ``"jacobi"``.
    """
    if npts < 1:
        raise ValueError("need at least one node")
    if kind == "legendre":
        a = b = 0.0
    elif kind != "jacobi":
        raise ValueError(f"unknown rule kind {kind!r}")
    if a <= -1 or b <= -1:
        raise ValueError("Jacobi exponents must exceed -1")
    mass = jacobi_mass(a, b)
    alpha, beta = _jacobi_recurrence(npts, a, b)
    if npts == 1:
        nodes, vecs = alpha.copy(), np.ones((1, 1))
    else:
        try:
            nodes, vecs = eigh_tridiagonal(alpha, beta)
        except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
            raise QuadratureError(f"tridiagonal eigensolve failed for n={npts}, a={a}, b={b}") from exc
    weights = mass * vecs[0] ** 2
    if not np.all(np.isfinite(nodes)) or np.any(weights <= 0):
        raise QuadratureError(f"degenerate rule n={npts}, a={a}, b={b}")
    order = np.argsort(nodes)
    return GaussRule1D(kind, float(a), float(b), nodes[order], weights[order])
