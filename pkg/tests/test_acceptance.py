"""Acceptance criteria 1-10, one summary line each."""

import json
import time

import numpy as np
import pytest
from scipy.special import roots_jacobi

from sphereball.balldomain import ball_rule
from sphereball.orthocore import gauss_rule
from sphereball.spheregeo import sphere_rule
from sphereball.verify import REGISTRY, make_spec, run_suite
from sphereball.verify.cli import main


def _run(ids):
    t0 = time.perf_counter()
    reps = [run_suite(make_spec(s, REGISTRY)) for s in ids]
    return reps, time.perf_counter() - t0


def _failed(reps):
    out = []
    for r in reps:
        if r.error:
            out.append(f"{r.suite}: error {r.error.splitlines()[0]}")
        out += [f"{r.suite}:{c.name} (slope={c.slope if c.slope is None else round(c.slope, 3)}, "
                f"c={c.fitted_c if c.fitted_c is None else round(c.fitted_c, 3)})" for c in r.cases if not c.passed]
    return out


def _check(record, number, title, reps, elapsed, limit, extra_ok=True, detail=""):
    bad = _failed(reps)
    ok = not bad and extra_ok and elapsed < limit and all(r.passed for r in reps)
    cases = sum(len(r.cases) for r in reps)
    msg = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}; {cases} cases, {elapsed:.1f}s (< {limit:g}s)"
    if detail:
        msg += f"; {detail}"
    if bad:
        msg += f"; {len(bad)} failing: " + "; ".join(bad[:8]) + (" ..." if len(bad) > 8 else "")
    record(msg)
    assert not bad, "\n".join(bad)
    assert extra_ok
    assert elapsed < limit


def _max_residual(reps, part=""):
    vals = [c.residual for r in reps for c in r.cases if c.residual is not None and part in c.name]
    return max(vals) if vals else float("nan")


def test_criterion_01_eigen(criterion_line):
    reps, dt = _run(["identity.eigen"])
    p = reps[0].resolution
    ok = p["d"] == 3 and p["n_max"] >= 8 and p["tol"] <= 1e-8
    _check(criterion_line, 1, "Laplace-Beltrami eigen identity, d=3, n<=8", reps, dt, 5, ok,
           f"max relative residual {_max_residual(reps):.2e} (tol 1e-8)")


def test_criterion_02_decomp(criterion_line):
    reps, dt = _run(["identity.decomp"])
    p = reps[0].resolution
    ok = p["degree_max"] >= 8 and set(p["mus"]) >= {0.0, 0.5} and p["tol"] <= 1e-10
    _check(criterion_line, 2, "decomposition identities, degree<=8, d<=3", reps, dt, 5, ok,
           f"max coefficient residual {_max_residual(reps):.2e} (tol 1e-10)")


def test_criterion_03_parts(criterion_line):
    reps, dt = _run(["identity.parts"])
    p = reps[0].resolution
    ok = p["exactness"] >= 14 and p["degree_max"] >= 6 and p["tol"] <= 1e-9
    _check(criterion_line, 3, "integration by parts on S^2", reps, dt, 5, ok,
           f"max normalised residual {_max_residual(reps):.2e} (tol 1e-9)")


def test_criterion_04_commute(criterion_line):
    reps, dt = _run(["identity.commute"])
    p = reps[0].resolution
    ok = p["n_max"] >= 8 and p["repro_tol"] <= 1e-8 and p["commute_tol"] <= 1e-7
    _check(criterion_line, 4, "reproduction and commutation of V_n", reps, dt, 30, ok,
           f"max reproduction residual {_max_residual(reps, 'reproduce'):.2e}, "
           f"max commutation residual {_max_residual(reps, 'commute'):.2e}")


def test_criterion_05_extension(criterion_line):
    reps, dt = _run(["identity.lemma46", "identity.parity", "identity.prop48"])
    p = reps[0].resolution
    ok = p["points"] >= 200 and p["degree_max"] >= 4 and p["r_max"] >= 3 and reps[2].resolution["tol"] <= 1e-6
    _check(criterion_line, 5, "extension derivative formula, parity, two-route norm", reps, dt, 20, ok)


def test_criterion_06_falpha(criterion_line):
    reps, dt = _run(["scan.falpha"])
    slopes = [c.slope for c in reps[0].cases if c.name.startswith("modulus-exponent")]
    ok = bool(slopes) and all(1.35 <= s <= 1.65 for s in slopes)
    _check(criterion_line, 6, "f_alpha modulus exponent, alpha=0.75, r=2, p=inf", reps, dt, 60, ok,
           "slopes " + ", ".join(f"{s:.3f}" for s in slopes) + " (window [1.35, 1.65], expected 1.5)")


def test_criterion_07_jackson_inverse(criterion_line):
    reps, dt = _run(["ineq.jackson.sphere", "ineq.inverse.sphere", "ineq.jackson.ball"])
    _check(criterion_line, 7, "Jackson and inverse scans, p=2, n in {4,8,16,32}", reps, dt, 300)


def test_criterion_08_simultaneous(criterion_line):
    reps, dt = _run(["ineq.simul.sphere", "ineq.simul.ball"])
    _check(criterion_line, 8, "simultaneous approximation, r in {1,2}, n in {4,8,16}", reps, dt, 180)


def test_criterion_09_bands(criterion_line):
    reps, dt = _run(["ineq.equiv.kmod", "ineq.thm44", "norms.lip.sphere", "norms.lip.ball"])
    fitted = [c for r in reps for c in r.cases if c.fitted_c is not None]
    two_sided = [c for c in fitted if c.slope is not None and not c.params.get("one_sided")]
    ok = bool(two_sided) and all(np.isfinite(c.fitted_c) for c in fitted)
    ok = ok and all(abs(c.slope) < 0.2 for c in two_sided)
    worst = max(abs(c.slope) for c in two_sided)
    _check(criterion_line, 9, "equivalence bands", reps, dt, 300, ok,
           f"{len(fitted)} fitted constants, all finite; {len(two_sided)} two-sided bands, "
           f"largest |band slope| {worst:.3f} (< 0.2)")


def test_criterion_10_foundations(criterion_line, tmp_path):
    t0 = time.perf_counter()
    problems = []
    sphere = sphere_rule(3, 20).weights.sum()
    if abs(sphere - 4 * np.pi) > 1e-10 * 4 * np.pi:
        problems.append(f"sphere mass {sphere!r}")
    disc = ball_rule(2, 0.0, 20).weights.sum()
    if abs(disc - 2 * np.pi) > 1e-10 * 2 * np.pi:
        problems.append(f"disc mass {disc!r}")
    for a, b in ((0.0, 0.0), (-0.5, -0.5), (0.5, 0.5), (-0.5, 1.0)):
        ref_t, ref_w = roots_jacobi(60, a, b)
        for n in (1, 4, 10):
            g = gauss_rule("jacobi", n, a, b)
            for k in range(g.exactness + 1):
                exact = float(ref_w @ ref_t ** k)
                if abs(g.weights @ g.nodes ** k - exact) > 1e-12 * max(1.0, abs(exact)):
                    problems.append(f"Gauss-Jacobi({a},{b}) n={n} degree {k}")
    ids = "identity.eigen,identity.parts,identity.lemma46,identity.parity"
    docs = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        assert main(["run", "--suite", ids, "--out", str(out), "--seed", "11", "--quiet"]) == 0
        docs.append((out / "report.json").read_bytes())
    if docs[0] != docs[1]:
        problems.append("report.json differs between identical runs")
    assert json.loads(docs[0])[0]["seed"] == 11
    dt = time.perf_counter() - t0
    ok = not problems and dt < 5
    criterion_line(f"[{'PASS' if ok else 'FAIL'}] criterion 10: quadrature masses, Gauss exactness, determinism; "
                   f"sphere mass err {abs(sphere - 4 * np.pi):.1e}, disc mass err {abs(disc - 2 * np.pi):.1e}, "
                   f"identical JSON: {docs[0] == docs[1]}, {dt:.1f}s (< 5s)" + (f"; {problems}" if problems else ""))
    assert not problems
    assert dt < 5
