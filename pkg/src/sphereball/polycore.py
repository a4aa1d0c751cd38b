"""Dense multivariate polynomials and the angular / ball differential operators.

A :class:`MultiPoly` stores a map ``exponent tuple -> float``.  All the
operators here (``D_{i,j}``, the Laplace-Beltrami operator, ``D_mu`` and
its diagonal pieces) map polynomials to polynomials exactly, up to float
round-off in the coefficients.

Indices are 0-based throughout: ``dij_poly(p, 0, 1)`` is the rotation
generator in the ``(x_1, x_2)`` plane.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import factorial
from typing import Iterable, Mapping

import numpy as np

Exponent = tuple[int, ...]


class DimensionError(ValueError):
    """Raised when operands live in different dimensions."""


def _check_pair(d: int, i: int, j: int) -> None:
    if i == j or not (0 <= i < d) or not (0 <= j < d):
        raise ValueError(f"invalid index pair ({i}, {j}) in dimension {d}")


@dataclass(frozen=True)
class MultiPoly:
    """Polynomial in ``dim`` real variables.

    ``coeffs`` maps exponent tuples to coefficients.  Coefficients whose
    magnitude is ``<= prune`` are dropped at construction (exact zero
    removal by default).
    """

    dim: int
    coeffs: Mapping[Exponent, float] = field(default_factory=dict)
    prune: float = 0.0

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be positive")
        clean = {}
        for e, c in self.coeffs.items():
            e = tuple(int(k) for k in e)
            if len(e) != self.dim or min(e, default=0) < 0:
                raise DimensionError(f"bad exponent {e} for dim {self.dim}")
            c = float(c)
            if abs(c) > self.prune:
                clean[e] = c
        object.__setattr__(self, "coeffs", clean)

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls, dim: int) -> "MultiPoly":
        return cls(dim, {})

    @classmethod
    def constant(cls, dim: int, value: float) -> "MultiPoly":
        return cls(dim, {(0,) * dim: value})

    @classmethod
    def monomial(cls, exponent: Iterable[int], coeff: float = 1.0) -> "MultiPoly":
        exponent = tuple(exponent)
        return cls(len(exponent), {exponent: coeff})

    @classmethod
    def variable(cls, dim: int, i: int) -> "MultiPoly":
        e = [0] * dim
        e[i] = 1
        return cls(dim, {tuple(e): 1.0})

    @classmethod
    def norm_squared(cls, dim: int) -> "MultiPoly":
        """``||x||^2`` as a polynomial."""
        out = {}
        for i in range(dim):
            e = [0] * dim
            e[i] = 2
            out[tuple(e)] = 1.0
        return cls(dim, out)

    # -- basic properties ---------------------------------------------
    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.coeffs), default=0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self.coeffs.values()), default=0.0)

    def homogeneous_part(self, k: int) -> "MultiPoly":
        return MultiPoly(self.dim, {e: c for e, c in self.coeffs.items() if sum(e) == k})

    def scale_argument(self, s: float) -> "MultiPoly":
        """Return ``x -> p(s x)``."""
        return MultiPoly(self.dim, {e: c * s ** sum(e) for e, c in self.coeffs.items()})

    def embed(self, dim: int) -> "MultiPoly":
        """View ``p`` as a polynomial in ``dim >= self.dim`` variables (trailing ones absent).

        This realises the trivial extension ``f~(x, x_{d+1}) = f(x)``.
        """
        if dim < self.dim:
            raise DimensionError("cannot embed into a smaller dimension")
        pad = (0,) * (dim - self.dim)
        return MultiPoly(dim, {e + pad: c for e, c in self.coeffs.items()})

    # -- arithmetic ----------------------------------------------------
    def _same_dim(self, other: "MultiPoly") -> None:
        if other.dim != self.dim:
            raise DimensionError(f"dimension mismatch {self.dim} vs {other.dim}")

    def __add__(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.constant(self.dim, other)
        self._same_dim(other)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0.0) + c
        return MultiPoly(self.dim, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.dim, {e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            other = float(other)
            return MultiPoly(self.dim, {e: c * other for e, c in self.coeffs.items()})
        self._same_dim(other)
        out: dict[Exponent, float] = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0.0) + c1 * c2
        return MultiPoly(self.dim, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = MultiPoly.constant(self.dim, 1.0)
        for _ in range(k):
            out = out * self
        return out

    # -- calculus ------------------------------------------------------
    def diff(self, i: int, order: int = 1) -> "MultiPoly":
        """Partial derivative ``d^order / dx_i^order``."""
        out = {}
        for e, c in self.coeffs.items():
            if e[i] < order:
                continue
            f = 1
            for k in range(order):
                f *= e[i] - k
            ne = list(e)
            ne[i] -= order
            ne = tuple(ne)
            out[ne] = out.get(ne, 0.0) + c * f
        return MultiPoly(self.dim, out)

    def mul_var(self, i: int, power: int = 1) -> "MultiPoly":
        """Multiply by ``x_i^power``."""
        out = {}
        for e, c in self.coeffs.items():
            ne = list(e)
            ne[i] += power
            out[tuple(ne)] = c
        return MultiPoly(self.dim, out)

    def euler(self) -> "MultiPoly":
        """``sum_i x_i d_i p`` (the degree operator)."""
        return MultiPoly(self.dim, {e: c * sum(e) for e, c in self.coeffs.items()})

    # -- evaluation ----------------------------------------------------
    def __call__(self, x) -> np.ndarray | float:
        return poly_eval(self, x)

    def allclose(self, other: "MultiPoly", atol: float = 1e-10) -> bool:
        return (self - other).max_abs_coeff() <= atol

    def __repr__(self) -> str:
        if not self.coeffs:
            return f"MultiPoly(dim={self.dim}, 0)"
        terms = []
        for e in sorted(self.coeffs, key=lambda e: (sum(e), e)):
            mono = "*".join(
                f"x{k + 1}" + (f"^{p}" if p > 1 else "") for k, p in enumerate(e) if p
            )
            terms.append(f"{self.coeffs[e]:+.6g}" + (f"*{mono}" if mono else ""))
        return f"MultiPoly(dim={self.dim}, {' '.join(terms)})"


@dataclass(frozen=True)
class LinearMap:
    """A ``d x d`` matrix acting as ``x -> M x``."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("LinearMap needs a square matrix")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def poly_eval(p: MultiPoly, x) -> np.ndarray | float:
    """Evaluate ``p`` at a point ``(d,)`` or at a batch of points ``(N, d)``."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = np.atleast_2d(x)
    if pts.shape[-1] != p.dim:
        raise DimensionError(f"point of dimension {pts.shape[-1]} for polynomial in {p.dim} variables")
    out = np.zeros(pts.shape[0])
    if p.coeffs:
        deg = max(max(e) for e in p.coeffs)
        powers = np.ones((deg + 1,) + pts.shape)
        for k in range(1, deg + 1):
            powers[k] = powers[k - 1] * pts
        cols = np.arange(p.dim)
        for e, c in p.coeffs.items():
            out += c * np.prod(powers[list(e), :, cols].T, axis=1)
    return float(out[0]) if single else out


def dij_poly(p: MultiPoly, i: int, j: int) -> MultiPoly:
    """``D_{i,j} p = x_j d_i p - x_i d_j p``.

    Swapping ``i`` and ``j`` flips the sign.
    """
    _check_pair(p.dim, i, j)
    return p.diff(i).mul_var(j) - p.diff(j).mul_var(i)


def dij_power(p: MultiPoly, i: int, j: int, r: int) -> MultiPoly:
    for _ in range(r):
        p = dij_poly(p, i, j)
    return p


def laplace_beltrami_poly(p: MultiPoly) -> MultiPoly:
    """``sum_{i<j} D_{i,j}^2 p``."""
    if p.dim < 2:
        raise DimensionError("Laplace-Beltrami needs d >= 2")
    out = MultiPoly.zero(p.dim)
    for i, j in itertools.combinations(range(p.dim), 2):
        out = out + dij_poly(dij_poly(p, i, j), i, j)
    return out


def laplace_beltrami_direct(p: MultiPoly) -> MultiPoly:
    """Laplace-Beltrami action written with Cartesian derivatives only.

    ``||x||^2 Lap p - sum_{k,l} x_k x_l d_k d_l p - (d-1) sum_k x_k d_k p``,
    which is the Laplacian of the degree-0 homogeneous extension restricted
    to the sphere.  Independent of the ``D_{i,j}`` route.
    """
    d = p.dim
    lap = MultiPoly.zero(d)
    for k in range(d):
        lap = lap + p.diff(k, 2)
    mixed = MultiPoly.zero(d)
    for k in range(d):
        for l in range(d):
            mixed = mixed + p.diff(k).diff(l).mul_var(k).mul_var(l)
    return MultiPoly.norm_squared(d) * lap - mixed - p.euler() * (d - 1)


def dmu_poly(p: MultiPoly, mu: float) -> MultiPoly:
    """The ball operator ``D_mu`` with its Cartesian coefficients."""
    d = p.dim
    out = MultiPoly.zero(d)
    for i in range(d):
        dii = p.diff(i, 2)
        out = out + dii - dii.mul_var(i, 2)
    for i, j in itertools.combinations(range(d), 2):
        out = out - p.diff(i).diff(j).mul_var(i).mul_var(j) * 2.0
    return out - p.euler() * (d + 2.0 * mu)


def dii_sq_poly(p: MultiPoly, i: int, mu: float) -> MultiPoly:
    """``(1 - ||x||^2) d_i^2 p - (2 mu + 1) x_i d_i p``."""
    if not 0 <= i < p.dim:
        raise ValueError(f"index {i} out of range for dimension {p.dim}")
    one_minus = MultiPoly.constant(p.dim, 1.0) - MultiPoly.norm_squared(p.dim)
    return one_minus * p.diff(i, 2) - p.diff(i).mul_var(i) * (2.0 * mu + 1.0)


def rot_compose(p: MultiPoly, q: LinearMap) -> MultiPoly:
    """Return ``x -> p(Q x)`` expanded in monomials."""
    if q.dim != p.dim:
        raise DimensionError("map and polynomial dimensions differ")
    d = p.dim
    rows = [MultiPoly(d, {tuple(int(k == l) for k in range(d)): q.matrix[m, l] for l in range(d)})
            for m in range(d)]
    out = MultiPoly.zero(d)
    cache: dict[tuple[int, int], MultiPoly] = {}
    for e, c in p.coeffs.items():
        term = MultiPoly.constant(d, c)
        for m, k in enumerate(e):
            if k:
                if (m, k) not in cache:
                    cache[(m, k)] = rows[m] ** k
                term = term * cache[(m, k)]
        out = out + term
    return out


def homogenize(p: MultiPoly, n: int) -> MultiPoly:
    """Multiply each term of degree ``n - 2k`` by ``||x||^{2k}``.

    The result agrees with ``p`` on the unit sphere.  Terms whose degree has
    the wrong parity or exceeds ``n`` raise ``ValueError``.
    """
    out = MultiPoly.zero(p.dim)
    nsq = MultiPoly.norm_squared(p.dim)
    for e, c in p.coeffs.items():
        gap = n - sum(e)
        if gap < 0 or gap % 2:
            raise ValueError(f"term {e} cannot be lifted to degree {n}")
        out = out + MultiPoly(p.dim, {e: c}) * nsq ** (gap // 2)
    return out


def all_exponents(dim: int, degree: int, exact: bool = False) -> list[Exponent]:
    """Exponents of total degree ``<= degree`` (or ``== degree`` if ``exact``)."""
    out = []
    lo = degree if exact else 0
    for k in range(lo, degree + 1):
        for combo in itertools.combinations_with_replacement(range(dim), k):
            e = [0] * dim
            for v in combo:
                e[v] += 1
            out.append(tuple(e))
    return out


def multinomial(e: Exponent) -> float:
    out = factorial(sum(e))
    for k in e:
        out //= factorial(k)
    return float(out)


def random_poly(dim: int, degree: int, rng: np.random.Generator) -> MultiPoly:
    """Polynomial with standard-normal coefficients on all monomials up to ``degree``."""
    exps = all_exponents(dim, degree)
    vals = rng.standard_normal(len(exps))
    return MultiPoly(dim, dict(zip(exps, vals)))
