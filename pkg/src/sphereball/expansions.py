"""Degree-graded orthonormal bases on a quadrature rule.

The basis is grown one degree at a time (a block Arnoldi process): the
candidates for degree ``k`` are ``x_i * q`` for every ``q`` in the degree
``k - 1`` block, orthogonalised twice against everything built so far and
truncated to the known block dimension.  On the sphere the degree-``k``
block spans ``H_k``; on the ball with weight ``W_mu`` it spans
``V_k(W_mu)``.  Orthonormality is with respect to the discrete inner
product of the rule, which equals the continuous one when the rule is
exact to twice the top degree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from .fnhandle import as_values


class ConsistencyError(ArithmeticError):
    """Parseval bookkeeping went negative beyond round-off."""


def harmonic_dim(d: int, k: int) -> int:
    """``dim H_k`` on ``S^{d-1}``."""
    if k < 0:
        return 0
    if d == 2:
        return 1 if k == 0 else 2
    return comb(k + d - 1, d - 1) - (comb(k + d - 3, d - 1) if k >= 2 else 0)


def ball_block_dim(d: int, k: int) -> int:
    """``dim V_k^d``: orthogonal polynomials of exact degree ``k`` on ``B^d``."""
    return comb(k + d - 1, d - 1)


class GradedBasis:
    """Discrete orthonormal basis of degree blocks ``0..max_degree`` on ``points``."""

    def __init__(self, points: np.ndarray, weights: np.ndarray, max_degree: int, domain: str):
        self.points = np.asarray(points, dtype=float)
        self.weights = np.asarray(weights, dtype=float)
        self.max_degree = int(max_degree)
        self.domain = domain
        d = self.points.shape[1]
        dim_of = harmonic_dim if domain == "sphere" else ball_block_dim
        self.block_dims = [dim_of(d, k) for k in range(self.max_degree + 1)]
        self._sw = np.sqrt(self.weights)
        self.blocks: list[np.ndarray] = []  # weighted, orthonormal columns
        self._build()

    def _build(self):
        sw = self._sw
        q0 = sw / np.linalg.norm(sw)
        self.blocks.append(q0[:, None])
        stack = q0[:, None]
        for k in range(1, self.max_degree + 1):
            prev = self.blocks[-1] / sw[:, None]
            cand = np.concatenate([self.points[:, [i]] * prev for i in range(self.points.shape[1])], axis=1)
            cand = cand * sw[:, None]
            for _ in range(2):
                cand = cand - stack @ (stack.T @ cand)
            u, s, _ = np.linalg.svd(cand, full_matrices=False)
            m = self.block_dims[k]
            if m > len(s) or s[m - 1] < 1e-9 * s[0]:
                raise ConsistencyError(
                    f"degree {k}: rule too coarse to resolve a block of dimension {m}"
                )
            blk = u[:, :m]
            self.blocks.append(blk)
            stack = np.concatenate([stack, blk], axis=1)

    def coefficients(self, values: np.ndarray) -> list[np.ndarray]:
        """Per-degree coefficient vectors of ``values`` (1-D or ``(N, F)``)."""
        wv = self._sw.reshape((-1,) + (1,) * (np.ndim(values) - 1)) * values
        return [b.T @ wv for b in self.blocks]

    def block_values(self, k: int, coeff: np.ndarray) -> np.ndarray:
        """Values at the nodes of the degree-``k`` component with the given coefficients."""
        return (self.blocks[k] @ coeff) / self._sw.reshape((-1,) + (1,) * (np.ndim(coeff) - 1))


@dataclass
class Expansion:
    """Per-degree energies of one function on a rule."""

    total_sq: float
    degree_sq: np.ndarray
    coeffs: list
    basis: GradedBasis
    wvals: np.ndarray | None = field(default=None, repr=False)  # sqrt(w) * values

    @classmethod
    def of(cls, f, basis: GradedBasis) -> "Expansion":
        vals = as_values(f, basis.points)
        c = basis.coefficients(vals)
        return cls(float(np.dot(basis.weights, vals * vals)), np.array([float(v @ v) for v in c]), c, basis,
                   basis._sw * vals)

    def tail(self, first_excluded: int, tol: float = 1e-8) -> float:
        """``sqrt(||f||^2 - sum_{k < first_excluded} ||proj_k f||^2)``.

        Evaluated as the norm of the residual vector, which avoids the
        sqrt(eps) floor of subtracting squared norms.
        """
        if first_excluded > len(self.degree_sq):
            raise ValueError(f"expansion only reaches degree {len(self.degree_sq) - 1}")
        rad = self.total_sq - float(self.degree_sq[:first_excluded].sum())
        if rad < -tol * max(self.total_sq, 1.0):
            raise ConsistencyError(f"negative Parseval remainder {rad:.3e}")
        res = self.wvals
        if res is None or res.ndim != 1:
            return float(np.sqrt(max(rad, 0.0)))
        res = res.copy()
        for k in range(first_excluded):
            res -= self.basis.blocks[k] @ self.coeffs[k]
        return float(np.linalg.norm(res))

    def component(self, k: int) -> np.ndarray:
        return self.basis.block_values(k, self.coeffs[k])
