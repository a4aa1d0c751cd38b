"""Test functions used by the scans, with what is known about each one."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..fnhandle import FnHandle
from ..polycore import MultiPoly

INF = float("inf")


@dataclass(frozen=True)
class CorpusEntry:
    """A named function with its domain and known-class metadata.

    ``smoothness`` maps ``"2"`` / ``"inf"`` to the exponent ``s`` for which
    ``omega_r(f, t)_p ~ t^s`` once ``r > s`` (``inf`` for ``C^infty`` data,
    ``None`` when no closed form is known).
    """

    name: str
    domain: str
    dim: int
    kind: str  # "poly" | "singular" | "smooth"
    build: Callable[[], FnHandle]
    smoothness: dict = field(default_factory=dict)
    description: str = ""
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.domain not in ("sphere", "ball"):
            raise ValueError(f"unknown domain {self.domain!r}")
        if self.kind not in ("poly", "singular", "smooth"):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.name.startswith("falpha"):
            a = self.params.get("alpha")
            if a is None or not 0.5 < a < 1.0:
                raise ValueError("f_alpha needs 1/2 < alpha < 1")

    def handle(self) -> FnHandle:
        return self.build()


def _poly(dim, terms) -> MultiPoly:
    return MultiPoly(dim, {tuple(e): float(c) for e, c in terms})


def _sphere_poly():
    p = _poly(3, [((2, 1, 0), 1.0), ((0, 0, 3), -0.5), ((1, 1, 1), 2.0), ((0, 1, 0), 1.0)])
    return FnHandle.from_poly(p, "sphere", "sphere_poly3")


def _abs_x3():
    return FnHandle(lambda X: np.abs(X[:, 2]), 3, "sphere", "abs_x3")


def _abs_x3_cubed():
    return FnHandle(lambda X: np.abs(X[:, 2]) ** 3, 3, "sphere", "abs_x3_cubed")


def _cap_bump(X):
    z = X[:, 2]
    out = np.zeros(len(z))
    m = z > 0
    out[m] = np.exp(1.0 - 1.0 / z[m])
    return out


def _sphere_bump():
    return FnHandle(_cap_bump, 3, "sphere", "cap_bump")


def _sphere_exp():
    return FnHandle(lambda X: np.exp(X[:, 0] + 0.5 * X[:, 1]), 3, "sphere", "exp_linear")


def _ball_poly():
    p = _poly(2, [((3, 1), 1.0), ((0, 2), -1.0), ((1, 0), 1.0)])
    return FnHandle.from_poly(p, "ball", "ball_poly4")


def falpha_handle(alpha: float = 0.75, x0=(1.0, 0.0)) -> FnHandle:
    """``(1 - |x|^2 + |x - x0|^2)^alpha`` for a boundary point ``x0``."""
    x0 = np.asarray(x0, dtype=float)
    if abs(np.linalg.norm(x0) - 1.0) > 1e-12:
        raise ValueError("x0 must lie on the unit sphere")

    def fn(X):
        base = 1.0 - np.sum(X * X, axis=1) + np.sum((X - x0) ** 2, axis=1)
        return np.clip(base, 0.0, None) ** alpha

    return FnHandle(fn, len(x0), "ball", f"falpha_{alpha:g}",
                    meta={"alpha": alpha, "singular_points": [x0.tolist()]})


def _pole_vals(X):
    return 1.0 / (1.5 - X[:, 0] - 0.5 * X[:, 1])


def _pole(domain, dim):
    return FnHandle(_pole_vals, dim, domain, f"pole_{domain}")


def _abs_x1_cubed():
    return FnHandle(lambda X: np.abs(X[:, 0]) ** 3, 2, "ball", "abs_x1_cubed")


def _ball_bump_vals(X):
    s = 1.0 - np.sum(X * X, axis=1)
    out = np.zeros(len(s))
    m = s > 0
    out[m] = np.exp(1.0 - 1.0 / s[m])
    return out


def _ball_bump():
    return FnHandle(_ball_bump_vals, 2, "ball", "ball_bump")


def _ball_exp():
    return FnHandle(lambda X: np.exp(X[:, 0]) * np.cos(X[:, 1]), 2, "ball", "exp_cos")


CORPUS: tuple[CorpusEntry, ...] = (
    CorpusEntry("sphere_poly3", "sphere", 3, "poly", _sphere_poly, {"2": INF, "inf": INF},
                "x1^2 x2 - x3^3/2 + 2 x1 x2 x3 + x2", {"degree": 3}),
    CorpusEntry("abs_x3", "sphere", 3, "singular", _abs_x3, {"2": 1.5, "inf": 1.0},
                "|x3|, a kink along the equator"),
    CorpusEntry("cap_bump", "sphere", 3, "smooth", _sphere_bump, {"2": INF, "inf": INF},
                "exp(1 - 1/x3) on the upper hemisphere, 0 below"),
    CorpusEntry("abs_x3_cubed", "sphere", 3, "singular", _abs_x3_cubed, {"2": 3.5, "inf": 3.0},
                "|x3|^3"),
    CorpusEntry("exp_linear", "sphere", 3, "smooth", _sphere_exp, {"2": INF, "inf": INF},
                "exp(x1 + x2/2)"),
    CorpusEntry("pole_sphere", "sphere", 3, "smooth", lambda: _pole("sphere", 3), {"2": INF, "inf": INF},
                "1/(3/2 - x1 - x2/2), analytic with geometric coefficient decay"),
    CorpusEntry("ball_poly4", "ball", 2, "poly", _ball_poly, {"2": INF, "inf": INF},
                "x1^3 x2 - x2^2 + x1", {"degree": 4}),
    CorpusEntry("falpha_0.75", "ball", 2, "singular", lambda: falpha_handle(0.75), {"2": None, "inf": 1.5},
                "(1 - |x|^2 + |x - e1|^2)^alpha = (2 - 2 x1)^alpha", {"alpha": 0.75}),
    CorpusEntry("ball_bump", "ball", 2, "smooth", _ball_bump, {"2": INF, "inf": INF},
                "exp(1 - 1/(1 - |x|^2))"),
    CorpusEntry("abs_x1_cubed", "ball", 2, "singular", _abs_x1_cubed, {"2": 3.5, "inf": 3.0},
                "|x1|^3, a third-order kink along a chord"),
    CorpusEntry("pole_ball", "ball", 2, "smooth", lambda: _pole("ball", 2), {"2": INF, "inf": INF},
                "1/(3/2 - x1 - x2/2), analytic with geometric coefficient decay"),
    CorpusEntry("exp_cos", "ball", 2, "smooth", _ball_exp, {"2": INF, "inf": INF},
                "exp(x1) cos(x2)"),
)

# the six-entry scan corpus: polynomials, |x3|, f_alpha and the bumps
SCAN_NAMES = ("sphere_poly3", "abs_x3", "cap_bump", "ball_poly4", "falpha_0.75", "ball_bump")


def corpus(names=None, domain: str | None = None) -> list[CorpusEntry]:
    """Entries in registry order, optionally filtered by name list and domain."""
    by_name = {e.name: e for e in CORPUS}
    if names is None:
        out = list(CORPUS)
    else:
        missing = [n for n in names if n not in by_name]
        if missing:
            raise KeyError(f"unknown corpus entries: {missing}")
        out = [by_name[n] for n in names]
    if domain is not None:
        out = [e for e in out if e.domain == domain]
    return out
