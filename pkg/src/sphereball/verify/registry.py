"""Suite registry: id -> defaults, the results each suite exercises, and its runner."""

from __future__ import annotations

import time
import traceback
from dataclasses import dataclass
from typing import Callable

from . import suites_bands as bands
from . import suites_identity as ident
from . import suites_norms as norms
from . import suites_scan as scan
from .config import ConfigError, SuiteSpec
from .report import VerifyReport

TOL_SLOPE = 0.2
TOL_SPREAD = 4.0


@dataclass(frozen=True)
class Suite:
    id: str
    covers: str
    defaults: dict
    runner: Callable


def _s(id, covers, runner, **defaults):
    return Suite(id, covers, defaults, runner)


SUITES: tuple[Suite, ...] = (
    _s("identity.eigen",
       "spherical harmonics are eigenfunctions of the Laplace-Beltrami operator; "
       "ball orthogonal polynomials are eigenfunctions of D_mu",
       ident.run_eigen, d=3, exactness=20, n_max=8, tol=1e-8,
       ball_mus=[0.0, 0.5], ball_exactness=16, ball_k_max=6, ball_tol=1e-6),
    _s("identity.decomp",
       "Laplace-Beltrami as the sum of squared rotation derivatives; D_mu as the sum of D^2_{i,j}, i <= j",
       ident.run_decomp, dims=[2, 3], degree_max=8, mus=[0.0, 0.5], tol=1e-10),
    _s("identity.parts",
       "integration by parts for D_{i,j} on the sphere",
       ident.run_parts, d=3, exactness=14, pairs=6, degree_max=6, tol=1e-9),
    _s("identity.commute",
       "V_n reproduces Pi_n and commutes with D_{i,j}^r (sphere and ball); ball kernel lifts to the sphere",
       ident.run_commute, d=3, exactness=24, n_max=8, repro_tol=1e-8, commute_degree=6, commute_ns=[4, 8],
       rs=[1, 2], commute_tol=1e-7, ball_mus=[0.0, 0.5], ball_exactness=24, lift_degree=4, lift_n=4),
    _s("identity.lemma46",
       "explicit formula for D^r_{i,d+1} of the trivial extension",
       ident.run_lemma46, points=200, degree_max=4, polys=6, r_max=3, tol=1e-8, smooth_entry="exp_cos",
       stencil_tol=1e-5),
    _s("identity.parity",
       "parity of D^r_{i,d+1} f~ in the last coordinate",
       ident.run_parity, points=200, degree=4, smooth_entry="exp_cos", r_max=3, tol=1e-8, stencil_tol=1e-5),
    _s("identity.prop48",
       "norm of D^r_{i,d+1} f~ as an integral over the ball with the radial factor; two-route agreement",
       ident.run_prop48, degree=4, smooth_entry="exp_cos", mus=[0.0, 0.5], r_max=3, degree_rule=24, tol=1e-6),
    _s("ineq.jackson.sphere",
       "Jackson inequality on the sphere: E_n(f) <= c omega_r(f, 1/n)",
       scan.run_jackson_sphere, exactness=64, basis_degree=32, ns=[4, 8, 16, 32], r=3, theta_grid=16,
       slope_tol=TOL_SLOPE, spread_tol=TOL_SPREAD, zero_tol=1e-10),
    _s("ineq.inverse.sphere",
       "inverse inequality on the sphere: omega_r(f, 1/n) <= c n^-r sum_k k^(r-1) E_(k-1)(f)",
       scan.run_inverse_sphere, exactness=64, basis_degree=32, ns=[4, 8, 16, 32], r=3, theta_grid=16,
       slope_tol=TOL_SLOPE, spread_tol=TOL_SPREAD, zero_tol=1e-10),
    _s("ineq.equiv.kmod",
       "modulus of smoothness and K-functional on the sphere are equivalent",
       bands.run_kmod, exactness=32, t_exp_min=1, t_exp_max=4, ps=[2.0, float("inf")], rs=[1, 2],
       candidates=[1, 2, 4, 8, 16], theta_grid=16, slope_tol=TOL_SLOPE, spread_tol=TOL_SPREAD,
       corpus_default=["abs_x3", "cap_bump", "abs_x3_cubed"]),
    _s("ineq.simul.sphere",
       "simultaneous approximation on the sphere: ||D^r(f - V_n f)|| <= c E_n(D^r f)",
       scan.run_simul_sphere, exactness=64, ns=[4, 8, 16], rs=[1, 2], slope_tol=TOL_SLOPE,
       corpus_default=["cap_bump", "pole_sphere"]),
    _s("ineq.jackson.ball",
       "Jackson and inverse inequalities on the ball for W_mu, mu in {0, 1/2}",
       scan.run_jackson_ball, mus=[0.0, 0.5], degree=66, basis_degree=33, refine_degree=64, ns=[4, 8, 16, 32],
       r=3, theta_grid=16, slope_tol=TOL_SLOPE, spread_tol=TOL_SPREAD, zero_tol=1e-10),
    _s("ineq.thm44",
       "the rotation K-functional and the phi-weighted K-functional agree for r = 1 and K_r <= c(hat K_r + "
       "t^r ||f||); norm of D_mu against the sum of D^2_{i,j} and the phi^2 d_i^2 bounds",
       bands.run_thm44, mus=[0.0, 0.5], degree=32, lift_degree=20, t_exp_min=2, t_exp_max=5, rs=[1, 2],
       candidates=[1, 2, 4, 8, 16], slope_tol=TOL_SLOPE, spread_tol=TOL_SPREAD,
       corpus_default=["falpha_0.75", "abs_x1_cubed", "ball_bump"], prop41_exactness=40,
       prop41_degrees=[2, 4, 8, 16]),
    _s("ineq.simul.ball",
       "simultaneous approximation on the ball through the extension; Sobolev bound for the extension terms; "
       "E_n <= c n^-r ||f||_{W^r}; the Chebyshev-weight bracket bound for E_2n",
       scan.run_simul_ball, mus=[0.0, 0.5], degree=64, lift_degree=36, ns=[4, 8, 16], rs=[1, 2],
       slope_tol=TOL_SLOPE, rate_slope_tol=0.15, corpus_default=["ball_bump", "pole_ball"]),
    _s("scan.falpha",
       "omega_r(f_alpha, t)_inf ~ t^(2 alpha) and the resulting best-approximation rate",
       scan.run_falpha, alpha=0.75, mus=[0.0, 0.5], r=2, degree=32, t_exp_min=3, t_exp_max=9, theta_grid=16,
       slope_window=[1.35, 1.65], ns=[4, 8, 16, 32], en_degree=66, slope_tol=TOL_SLOPE),
    _s("norms.lip.sphere",
       "Lipschitz space W^(r,alpha) equals H^(r+alpha) on the sphere with equivalent norms; best-approximation "
       "rate n^-(r+alpha); fractional Laplacian against rotation derivatives in L^2",
       norms.run_lip_sphere, exactness=32, levels=[2, 3, 4, 5, 6], theta_grid=8, basis_degree=16,
       ns=[4, 8, 16], rate_slope_tol=0.15, slope_tol=TOL_SLOPE, spread_tol=TOL_SPREAD,
       classes=["abs_x3/1/0.25/1", "abs_x3_cubed/1/0.5/1", "cap_bump/1/0.5/1"],
       laplace_entries=["sphere_poly3", "exp_linear", "cap_bump"], laplace_N=24),
    _s("norms.lip.ball",
       "Lipschitz space on the ball equals the modulus-defined space with equivalent norms",
       norms.run_lip_ball, mus=[0.0, 0.5], degree=32, lift_degree=20, levels=[2, 3, 4, 5, 6], theta_grid=8,
       slope_tol=TOL_SLOPE, spread_tol=TOL_SPREAD,
       classes=["abs_x1_cubed/1/0.5/1", "falpha_0.75/1/0.5/1", "ball_bump/1/0.5/1"]),
)

REGISTRY: dict[str, Suite] = {s.id: s for s in SUITES}


def suite_ids() -> list[str]:
    return [s.id for s in SUITES]


def run_suite(spec: SuiteSpec) -> VerifyReport:
    """Run one suite.  Numerical failures become a failed report, never an exception."""
    suite = REGISTRY.get(spec.suite)
    if suite is None:
        raise ConfigError(f"unknown suite {spec.suite!r}")
    resolution = {k: v for k, v in spec.params.items()}
    if spec.corpus is not None:
        resolution["corpus"] = list(spec.corpus)
    t0 = time.perf_counter()
    try:
        cases = suite.runner(spec)
        error = None
    except Exception as exc:  # recorded, not raised
        cases = []
        error = f"{type(exc).__name__}: {exc}\n" + traceback.format_exc(limit=4)
    elapsed = (time.perf_counter() - t0) * 1e3
    return VerifyReport(spec.suite, cases, resolution, spec.seed, elapsed, error)
