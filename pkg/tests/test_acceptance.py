"""Acceptance criteria 1-13, one test per criterion at the stated tolerances.

The terminal summary prints one PASS/FAIL line per criterion (see conftest).
"""

import time

import numpy as np
import pytest

from hermcurv import gauduchon as gd
from hermcurv import models
from hermcurv.chern import (
    bianchi_residual,
    chern_package,
    liu_yang_residual,
    metric_trace,
    numeric_ricci_closedness,
)
from hermcurv.jets import evaluate_jet, finite_difference_jet, jet_difference

T_GRID = (-1.0, 0.0, 1.0 / 3.0, 0.5, 1.0, 2.0)
SPECS = {
    "hopf-n2": models.ModelSpec("hopf", n=2),
    "hopf-n3": models.ModelSpec("hopf", n=3),
    "hopf_lambda": models.ModelSpec("hopf_lambda", n=2, lam=-0.5),
    "iwasawa": models.ModelSpec("iwasawa", n=3),
    "fubini_study": models.ModelSpec("fubini_study", n=2),
    "random_poly-s0": models.ModelSpec("random_poly", n=2, seed=0),
    "random_poly-s1": models.ModelSpec("random_poly", n=3, seed=1),
    "random_poly-s2": models.ModelSpec("random_poly", n=2, seed=2),
}
SEED = 2024


def packages(spec, count=5, seed=SEED):
    f = models.builtin(spec)
    return [chern_package(f, p) for p in models.sample_points(spec, count, seed)]


@pytest.fixture(scope="module")
def grid():
    return {label: packages(spec) for label, spec in SPECS.items()}


def worst(values):
    return max(values, default=0.0)


def test_criterion_01_dual_route_curvature(grid):
    start = time.perf_counter()
    res = {}
    for label, pkgs in grid.items():
        res[label] = worst(
            gd.dual_route_residual(gd.direct_from_jet(t, pkg.jet), gd.curvature_closed_form(t, pkg))
            for pkg in pkgs
            for t in T_GRID
        )
    elapsed = time.perf_counter() - start
    print("dual-route residuals", res, f"{elapsed:.1f}s")
    assert max(res.values()) < 1e-8
    assert elapsed < 30.0


def test_criterion_02_hopf_ricci_flat_family():
    for n in (2, 3):
        for t in (-1.0, 0.0, 1.0 / 3.0, 0.5):
            lam = models.hopf_ricci_flat_lambda(t, n)
            pkgs = packages(models.ModelSpec("hopf_lambda", n=n, lam=lam), count=10)
            flat = worst(float(np.max(np.abs(gd.gauduchon_ricci(t, p).ricci1))) for p in pkgs)
            assert flat < 1e-8, (n, t, flat)
        for lam in (-0.8, -0.4, 0.3, 1.0, 2.0):
            for pkg in packages(models.ModelSpec("hopf_lambda", n=n, lam=lam)):
                z = pkg.point
                s = float(np.vdot(z, z).real)
                alpha = np.eye(n) / s - np.outer(z.conj(), z) / s**2
                for t in (-1.0, 0.0, 1.0 / 3.0, 0.5, 1.0):
                    expect = (n * (1 + lam) + (t - 1) * (n - 1)) / (1 + lam) * alpha
                    got = gd.gauduchon_ricci(t, pkg).ricci1
                    rel = np.max(np.abs(got - expect)) / np.max(np.abs(expect))
                    assert rel < 1e-6, (n, lam, t, rel)


def test_criterion_03_ricci_routes(grid):
    res = worst(
        gd.gauduchon_ricci(t, pkg, tol=None).worst_residual for pkgs in grid.values() for pkg in pkgs for t in T_GRID
    )
    print("three-route Ricci residual", res)
    assert res < 1e-7


def test_criterion_04_scalar_relations(grid):
    rel, lich = 0.0, 0.0
    for pkgs in grid.values():
        for pkg in pkgs:
            for t in T_GRID:
                scal, scal_tilde = gd.gauduchon_scalars(t, pkg, tol=None)
                traces = [metric_trace(r, pkg.g) for r in gd.gauduchon_ricci(t, pkg, tol=None).riccis]
                rel = max(rel, *(abs(tr - s) for tr, s in zip(traces, (scal, scal, scal_tilde, scal_tilde))))
            # at t = 0 the trace of ^0Ric1 equals the Chern altered scalar curvature
            r0 = gd.gauduchon_ricci(0.0, pkg, tol=None).ricci1
            lich = max(lich, abs(metric_trace(r0, pkg.g) - pkg.scal_tilde))
    print("scalar residuals", rel, lich)
    assert rel < 1e-8
    assert lich < 1e-8


def test_criterion_05_hsc_duality_and_monotonicity(grid):
    rng = np.random.default_rng(SEED)
    dual, mono, gap = 0.0, -np.inf, 0.0
    for pkgs in grid.values():
        for k in range(100):
            pkg = pkgs[k % len(pkgs)]
            n = pkg.n
            v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            t = float(rng.uniform(-2.0, 3.0))
            h = gd.hsc(t, pkg, v)
            dual = max(dual, abs(h - gd.hsc(2 - t, pkg, v)))
            mono = max(mono, h - gd.hsc(1.0, pkg, v))
            U, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
            lam = rng.standard_normal(n)
            gap = max(gap, gd.altered_hsc(t, pkg, U, lam, tol=None).residual)
    pkg = chern_package(models.builtin(SPECS["hopf-n2"]), [1.0, 0.0])
    strict = gd.altered_hsc(-1.0, pkg, np.eye(2), [1.0, 1.0]).gap
    print("duality", dual, "monotonicity excess", mono, "gap residual", gap, "strict gap", strict)
    assert dual < 1e-10
    assert mono <= 1e-10
    assert gap < 1e-8
    assert strict > 1e-4


def test_criterion_06_gauduchon_defining_property(grid):
    res = {"T11_b": 0.0, "B(T11_c)": 0.0, "B(T20-T11_c)": 0.0}
    for label in ("hopf-n2", "iwasawa"):
        for pkg in grid[label]:
            for t in (-1.0, 0.0, 1.0 / 3.0, 0.5, 1.0):
                d = gd.decomposition_from_jet(t, pkg.jet)
                for key in res:
                    res[key] = max(res[key], d.residuals[key])
    print("decomposition residuals", res)
    assert max(res.values()) < 1e-9


def test_criterion_07_balanced_t_independence(grid):
    ts = (-1.0, 0.0, 0.5, 1.0)
    spread = tau = heart = 0.0
    for pkg in grid["iwasawa"]:
        rs = [gd.gauduchon_ricci(t, pkg).ricci1 for t in ts]
        spread = max(spread, max(float(np.max(np.abs(r - rs[0]))) for r in rs))
        tau = max(tau, float(np.max(np.abs(pkg.tau))))
        heart = max(heart, float(np.max(np.abs(pkg.t_heart))))
    hopf_gap = min(
        float(np.max(np.abs(gd.gauduchon_ricci(0.0, p).ricci1 - gd.gauduchon_ricci(1.0, p).ricci1)))
        for p in grid["hopf-n2"]
    )
    print("iwasawa spread", spread, "tau", tau, "heart", heart, "hopf gap", hopf_gap)
    assert spread < 1e-9
    assert tau < 1e-10
    assert heart < 1e-10
    assert hopf_gap > 1e-2


def test_criterion_08_minimal_connection_vertex():
    for label in ("hopf-n2", "iwasawa"):
        spec = SPECS[label]
        f = models.builtin(spec)
        for p in models.sample_points(spec, 5, SEED):
            vertex = gd.torsion_norm_profile(f, p, (-1.0, -0.5, 0.0, 0.5, 1.0, 2.0)).vertex
            assert abs(vertex - 1.0 / 3.0) < 1e-3, (label, vertex)


def test_criterion_09_bianchi_and_closedness(grid):
    bianchi = worst(bianchi_residual(pkg) for pkgs in grid.values() for pkg in pkgs)
    closed = 0.0
    for label in ("hopf-n2", "hopf-n3", "random_poly-s0", "random_poly-s1"):
        spec = SPECS[label]
        f = models.builtin(spec)
        for p in models.sample_points(spec, 2, SEED):
            closed = max(closed, numeric_ricci_closedness(f, p))
    print("Bianchi", bianchi, "numeric d(Ric1)", closed)
    assert bianchi < 1e-8
    assert closed < 1e-5


def test_criterion_10_berger_averaging(grid):
    rng = np.random.default_rng(SEED)
    exact = 0.0
    for pkg in grid["hopf-n2"]:
        v = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        for t in T_GRID:
            for pairing in ("ric1", "ric2", "ric3", "ric4"):
                exact = max(exact, gd.berger_average(t, pkg, v, "exact", pairing=pairing).residual)
    assert exact < 1e-10
    pkg = grid["hopf-n2"][0]
    for t in (-1.0, 0.5):
        for pairing in ("ric1", "ric2", "ric3", "ric4"):
            mc = gd.berger_average(t, pkg, np.array([1.0, 0.5j]), "montecarlo", 100_000, SEED, pairing)
            # values are O(1/|z|^2); a 1e-12 absolute floor covers round-off when the spread is tiny
            assert mc.residual <= 3 * mc.stderr + 1e-12, (t, pairing, mc)


def test_criterion_11_liu_yang_identity():
    # literal statement: the (1,1)-form added back is the circle torsion form
    pkgs = []
    for k in range(10):
        spec = models.ModelSpec("random_poly", n=2 + k % 2, seed=SEED + k)
        pkgs += packages(spec, count=1, seed=k)
    res = worst(liu_yang_residual(pkg, torsion_form="circle") for pkg in pkgs)
    print("Liu-Yang residual with the circle form", res)
    assert res < 1e-8


def test_criterion_12_lck_scalar_identity():
    worst_res = 0.0
    for pkg in packages(SPECS["hopf-n2"], count=10):
        bismut = gd.gauduchon_ricci(-1.0, pkg).ricci1
        worst_res = max(worst_res, float(np.linalg.norm(bismut - pkg.ricci2 - (pkg.scal_tilde - pkg.scal) * pkg.g)))
    print("LCK residual", worst_res)
    assert worst_res < 1e-7


def test_criterion_13_jets_vs_finite_differences():
    specs = dict(SPECS, flat=models.ModelSpec("flat", n=2))
    res = {}
    for label, spec in specs.items():
        f = models.builtin(spec)
        res[label] = worst(
            jet_difference(evaluate_jet(f, p, 2), finite_difference_jet(f, p, 2))
            for p in models.sample_points(spec, 3, SEED)
        )
    print("jet vs FD", res)
    assert max(res.values()) < 1e-6
