"""Registered verification checks and the driver that runs them.

A suite is a function ``config -> list of tasks``; a task is a zero-argument
callable returning a :class:`Check`.  Tasks are independent, so the driver
may run them on a thread pool; the report is ordered by check id.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np

from . import gauduchon as gd
from . import models
from .chern import (
    LAMBDA_CONVENTION,
    bianchi_residual,
    calibrate_lambda_convention,
    curvature_symmetry_residual,
    form_exterior_derivative,
    hermitian_residual,
    liu_yang_residual,
    numeric_ricci_closedness,
    package_from_jet,
    ricci1_derivative,
    scalar_trace_residuals,
)
from .errors import ConfigError, HermcurvError
from .jets import evaluate_jet, finite_difference_jet, jet_difference
from .metric_dsl import field_from_source
from .report import Check, VerificationReport

T_GRID = (-1.0, 0.0, 1.0 / 3.0, 0.5, 1.0, 2.0)
RICCI_FLAT_TS = (-1.0, 0.0, 1.0 / 3.0, 0.5)
DECOMPOSITION_TS = (-1.0, 0.0, 1.0 / 3.0, 0.5, 1.0)
PROPORTIONALITY_LAMBDAS = (-0.8, -0.4, 0.3, 1.0, 2.0)
MC_FLOOR = 1e-12

# (label, spec) pairs used wherever a check runs "on every model"
MODEL_GRID = (
    ("hopf-n2", models.ModelSpec("hopf", n=2)),
    ("hopf-n3", models.ModelSpec("hopf", n=3)),
    ("hopf_lambda", models.ModelSpec("hopf_lambda", n=2, lam=-0.5)),
    ("iwasawa", models.ModelSpec("iwasawa", n=3)),
    ("fubini_study", models.ModelSpec("fubini_study", n=2)),
    ("random_poly-s0", models.ModelSpec("random_poly", n=2, seed=0)),
    ("random_poly-s1", models.ModelSpec("random_poly", n=3, seed=1)),
    ("random_poly-s2", models.ModelSpec("random_poly", n=2, seed=2)),
)


@dataclass(frozen=True)
class SuiteConfig:
    seed: int = 0
    tol_scale: float = 1.0
    points: int = 5
    workers: int = 1

    def __post_init__(self):
        if not (self.tol_scale > 0 and np.isfinite(self.tol_scale)):
            raise ConfigError("tolerance scale must be a positive number")
        if self.points < 1:
            raise ConfigError("points must be at least 1")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")

    def tol(self, base: float) -> float:
        return base * self.tol_scale


# -- shared evaluation helpers ----------------------------------------------------


@lru_cache(maxsize=64)
def _field(spec: models.ModelSpec):
    return models.builtin(spec)


@lru_cache(maxsize=256)
def _points(spec: models.ModelSpec, count: int, seed: int) -> tuple:
    return tuple(models.sample_points(spec, count, seed))


@lru_cache(maxsize=1024)
def _package(spec: models.ModelSpec, count: int, seed: int, k: int):
    p = _points(spec, count, seed)[k]
    return package_from_jet(evaluate_jet(_field(spec), p, 2))


def _packages(spec, count, seed):
    return [_package(spec, count, seed, k) for k in range(count)]


def _task(cfg, id, description, anchor, base_tol, fn, comparison="<="):
    """Wrap ``fn() -> residual`` (or ``(residual, detail)``) as a timed task."""
    tol = cfg.tol(base_tol) if comparison == "<=" else base_tol

    def run():
        start = time.perf_counter()
        try:
            out = fn()
            residual, detail = out if isinstance(out, tuple) else (out, "")
            chk = Check.evaluate(id, description, anchor, float(residual), tol, comparison, detail)
        except (HermcurvError, ArithmeticError, np.linalg.LinAlgError) as exc:
            chk = Check(id, description, anchor, None, tol, comparison, "fail", f"{type(exc).__name__}: {exc}")
        chk.seconds = time.perf_counter() - start
        return chk

    return run


# -- suites -----------------------------------------------------------------------------


def suite_dual_route(cfg: SuiteConfig) -> list:
    def worst(spec):
        out = 0.0
        for k, pkg in enumerate(_packages(spec, cfg.points, cfg.seed)):
            for t in T_GRID:
                direct = gd.direct_from_jet(t, pkg.jet)
                closed = gd.curvature_closed_form(t, pkg)
                out = max(out, gd.dual_route_residual(direct, closed))
        return out

    return [
        _task(
            cfg,
            f"dual-route/{label}",
            "A-tensor curvature vs closed-form Gauduchon curvature (R11 and R20)",
            "Gauduchon curvature formula",
            1e-8,
            lambda spec=spec: worst(spec),
        )
        for label, spec in MODEL_GRID
    ]


def _alpha(z) -> np.ndarray:
    s = float(np.vdot(z, z).real)
    return np.eye(len(z)) / s - np.outer(np.conj(z), z) / s**2


def suite_hopf_ricci_flat(cfg: SuiteConfig) -> list:
    tasks = []
    for n in (2, 3):
        base = models.ModelSpec("hopf", n=n)

        def flat(n=n, t=0.0):
            spec = models.ModelSpec("hopf_lambda", n=n, lam=models.hopf_ricci_flat_lambda(t, n))
            return max(
                float(np.max(np.abs(gd.gauduchon_ricci(t, pkg).ricci1)))
                for pkg in _packages(spec, 2 * cfg.points, cfg.seed)
            )

        for t in RICCI_FLAT_TS:
            tasks.append(
                _task(
                    cfg,
                    f"hopf-ricci-flat/n{n}/t={t:.4g}",
                    "max |^tRic1| of the Hopf metric at lambda*(t)",
                    "Hopf Ricci-flat family",
                    1e-8,
                    lambda n=n, t=t: flat(n, t),
                )
            )

        def proportional(n=n):
            worst = 0.0
            for lam in PROPORTIONALITY_LAMBDAS:
                spec = models.ModelSpec("hopf_lambda", n=n, lam=lam)
                for pkg in _packages(spec, cfg.points, cfg.seed):
                    for t in RICCI_FLAT_TS:
                        expect = (n * (1 + lam) + (t - 1) * (n - 1)) / (1 + lam) * _alpha(pkg.point)
                        got = gd.gauduchon_ricci(t, pkg).ricci1
                        worst = max(worst, float(np.max(np.abs(got - expect)) / np.max(np.abs(expect))))
            return worst

        def pinned(n=n):
            # omega_lambda - omega_0 = 4 lambda ^0Ric1(omega_0) holds iff ^0Ric1(omega_0) = alpha
            return max(
                float(np.max(np.abs(gd.gauduchon_ricci(0.0, pkg).ricci1 - _alpha(pkg.point))))
                for pkg in _packages(base, cfg.points, cfg.seed)
            )

        tasks.append(
            _task(
                cfg,
                f"hopf-ricci-flat/n{n}/proportionality",
                "relative error of ^tRic1 = ((n(1+l)+(t-1)(n-1))/(1+l)) alpha",
                "Hopf Ricci-flat family",
                1e-6,
                proportional,
            )
        )
        tasks.append(
            _task(
                cfg,
                f"hopf-ricci-flat/n{n}/family-pinning",
                "Lichnerowicz Ric1 of the standard metric equals alpha",
                "Hopf metric family",
                1e-9,
                pinned,
            )
        )
    return tasks


def suite_ricci_routes(cfg: SuiteConfig) -> list:
    def worst(spec):
        return max(
            gd.gauduchon_ricci(t, pkg, tol=None).worst_residual
            for pkg in _packages(spec, cfg.points, cfg.seed)
            for t in T_GRID
        )

    return [
        _task(
            cfg,
            f"ricci-routes/{label}",
            "traces of R11 vs Chern-Ricci relations vs P, Q torsion-form relations",
            "Gauduchon Ricci relations",
            1e-7,
            lambda spec=spec: worst(spec),
        )
        for label, spec in MODEL_GRID
    ]


def suite_scalars(cfg: SuiteConfig) -> list:
    def relations(spec):
        worst = 0.0
        for pkg in _packages(spec, cfg.points, cfg.seed):
            for t in T_GRID:
                scal, scal_tilde = gd.gauduchon_scalars(t, pkg, tol=None)
                ric = gd.gauduchon_ricci(t, pkg, tol=None)
                tr = [np.sum(pkg.g_inv * r).real for r in ric.riccis]
                worst = max(worst, abs(tr[0] - scal), abs(tr[1] - scal), abs(tr[2] - scal_tilde), abs(tr[3] - scal_tilde))
        return worst

    def lichnerowicz(spec):
        return max(abs(gd.gauduchon_scalars(0.0, pkg)[0] - pkg.scal_tilde) for pkg in _packages(spec, cfg.points, cfg.seed))

    def half(spec):
        worst = 0.0
        for pkg in _packages(spec, cfg.points, cfg.seed):
            s, st = gd.gauduchon_scalars(0.5, pkg)
            # the t = 1/2 coefficient is ((1 - t)/2)^2 = 1/16
            worst = max(worst, abs((s - st) - (pkg.normT2 + pkg.normTau2) / 16))
        return worst

    tasks = []
    for label, spec in MODEL_GRID:
        tasks.append(
            _task(cfg, f"scalars/{label}/relations", "scalar relations vs Ricci traces", "Gauduchon scalar curvatures", 1e-8,
                  lambda spec=spec: relations(spec))
        )
        tasks.append(
            _task(cfg, f"scalars/{label}/t=0", "^0Scal = Chern altered scalar curvature", "Gauduchon scalar curvatures",
                  1e-8, lambda spec=spec: lichnerowicz(spec))
        )
    hopf = MODEL_GRID[0][1]
    tasks.append(
        _task(cfg, "scalars/hopf-n2/t=1/2", "Scal - tilde-Scal = (|T|^2 + |tau|^2)/16 at t = 1/2",
              "Gauduchon scalar curvatures", 1e-10, lambda: half(hopf))
    )
    return tasks


def _hsc_samples(spec, cfg, triples: int):
    rng = np.random.default_rng(cfg.seed + 7919)
    pkgs = _packages(spec, cfg.points, cfg.seed)
    for k in range(triples):
        pkg = pkgs[k % len(pkgs)]
        v = rng.standard_normal(pkg.n) + 1j * rng.standard_normal(pkg.n)
        t = float(rng.uniform(-2.0, 3.0))
        yield pkg, v, t


def suite_hsc(cfg: SuiteConfig) -> list:
    triples = 20 * cfg.points

    def duality(spec):
        worst = 0.0
        for pkg, v, t in _hsc_samples(spec, cfg, triples):
            worst = max(worst, abs(gd.hsc(t, pkg, v) - gd.hsc(2 - t, pkg, v)))
        return worst

    def monotone(spec):
        # largest violation of hsc(t) <= hsc(1); pass when <= tol
        worst = -np.inf
        for pkg, v, t in _hsc_samples(spec, cfg, triples):
            worst = max(worst, gd.hsc(t, pkg, v) - gd.hsc(1.0, pkg, v))
        return max(worst, 0.0)

    def gap(spec):
        rng = np.random.default_rng(cfg.seed + 104729)
        worst = 0.0
        for pkg, _, t in _hsc_samples(spec, cfg, triples):
            q, _ = np.linalg.qr(rng.standard_normal((pkg.n, pkg.n)) + 1j * rng.standard_normal((pkg.n, pkg.n)))
            lam = rng.standard_normal(pkg.n)
            worst = max(worst, gd.altered_hsc(t, pkg, q, lam, tol=None).residual)
        return worst

    def signed(spec):
        # the inequality is asserted for lambda >= 0; mixed-sign failures are reported
        rng = np.random.default_rng(cfg.seed + 15485863)
        worst, found, most = 0.0, 0, 0.0
        for pkg, _, t in _hsc_samples(spec, cfg, triples):
            q, _ = np.linalg.qr(rng.standard_normal((pkg.n, pkg.n)) + 1j * rng.standard_normal((pkg.n, pkg.n)))
            lam = np.abs(rng.standard_normal(pkg.n))
            worst = max(worst, -gd.altered_hsc_gap(t, pkg, q, lam))
            bad = gd.altered_hsc_counterexamples(t, pkg, 4, rng)
            found += len(bad)
            most = min([most] + [g for _, _, g in bad])
        detail = f"mixed-sign lambda: {found} counterexamples, most negative gap {most:.3e}" if found else ""
        return worst, detail

    tasks = []
    for label, spec in MODEL_GRID:
        tasks += [
            _task(cfg, f"hsc/{label}/altered-inequality", "max(-gap, 0) over lambda >= 0",
                  "altered HSC monotonicity", 1e-12, lambda spec=spec: signed(spec)),
            _task(cfg, f"hsc/{label}/duality", "|hsc(t, v) - hsc(2 - t, v)|", "HSC duality", 1e-10,
                  lambda spec=spec: duality(spec)),
            _task(cfg, f"hsc/{label}/monotonicity", "max(hsc(t, v) - hsc(1, v), 0)", "HSC monotonicity", 1e-10,
                  lambda spec=spec: monotone(spec)),
            _task(cfg, f"hsc/{label}/altered-gap", "altered HSC vs Chern value minus predicted gap",
                  "altered HSC monotonicity", 1e-8, lambda spec=spec: gap(spec)),
        ]

    def strict():
        pkg = package_from_jet(evaluate_jet(_field(MODEL_GRID[0][1]), [1.0, 0.0], 2))
        return gd.altered_hsc(-1.0, pkg, np.eye(2), [1.0, 1.0]).gap

    tasks.append(
        _task(cfg, "hsc/hopf-n2/strict-gap", "altered HSC gap at t=-1, lambda=(1,1), z=(1,0)",
              "altered HSC monotonicity", 1e-4, strict, comparison=">=")
    )
    return tasks


def suite_torsion_decomposition(cfg: SuiteConfig) -> list:
    def residual(spec, key):
        return max(
            gd.decomposition_from_jet(t, pkg.jet).residuals[key]
            for pkg in _packages(spec, cfg.points, cfg.seed)
            for t in DECOMPOSITION_TS
        )

    tasks = []
    for label, spec in (MODEL_GRID[0], MODEL_GRID[3], MODEL_GRID[4]):
        for key, desc in (
            ("reassembly", "T20 + T11_b + T11_c reassembles the torsion"),
            ("T11_b", "norm of the Bianchi-kernel part of T11"),
            ("B(T11_c)", "B(T11_c) - ((t-1)/3) d^c omega"),
            ("B(T20-T11_c)", "B(T20 - T11_c) - (1/3) d^c omega"),
        ):
            tasks.append(
                _task(cfg, f"torsion-decomposition/{label}/{key}", desc, "Gauduchon defining property", 1e-9,
                      lambda spec=spec, key=key: residual(spec, key))
            )
    return tasks


def suite_balanced(cfg: SuiteConfig) -> list:
    iwa = MODEL_GRID[3][1]
    hopf = MODEL_GRID[0][1]
    ts = (-1.0, 0.0, 0.5, 1.0)

    def spread():
        worst = 0.0
        for pkg in _packages(iwa, cfg.points, cfg.seed):
            rs = [gd.gauduchon_ricci(t, pkg).ricci1 for t in ts]
            worst = max(worst, max(float(np.max(np.abs(r - rs[0]))) for r in rs))
        return worst

    def tau():
        return max(float(np.max(np.abs(pkg.tau))) for pkg in _packages(iwa, cfg.points, cfg.seed))

    def heart():
        return max(float(np.max(np.abs(pkg.t_heart))) for pkg in _packages(iwa, cfg.points, cfg.seed))

    def hopf_gap():
        return min(
            float(np.max(np.abs(gd.gauduchon_ricci(0.0, pkg).ricci1 - gd.gauduchon_ricci(1.0, pkg).ricci1)))
            for pkg in _packages(hopf, cfg.points, cfg.seed)
        )

    return [
        _task(cfg, "balanced/iwasawa/ric1-spread", "max difference of ^tRic1 over t", "balanced t-independence", 1e-9, spread),
        _task(cfg, "balanced/iwasawa/tau", "torsion 1-form of the Iwasawa metric", "balanced t-independence", 1e-10, tau),
        _task(cfg, "balanced/iwasawa/t-heart", "heart torsion form of the Iwasawa metric", "balanced t-independence", 1e-10,
              heart),
        _task(cfg, "balanced/hopf-n2/ric1-gap", "min over points of max|^0Ric1 - ^1Ric1|", "balanced t-independence",
              1e-2, hopf_gap, comparison=">="),
    ]


def suite_minimal_vertex(cfg: SuiteConfig) -> list:
    def worst(spec):
        f = _field(spec)
        return max(
            abs(gd.torsion_norm_profile(f, p, (-1.0, 0.0, 0.5, 1.0, 2.0)).vertex - 1.0 / 3.0)
            for p in _points(spec, cfg.points, cfg.seed)
        )

    return [
        _task(cfg, f"minimal-vertex/{label}", "|vertex of t -> |T(^t nabla)|^2 minus 1/3|", "minimal connection", 1e-3,
              lambda spec=spec: worst(spec))
        for label, spec in (MODEL_GRID[0], MODEL_GRID[3])
    ]


def suite_bianchi(cfg: SuiteConfig) -> list:
    tasks = [
        _task(cfg, f"bianchi/{label}", "Chern Bianchi identity for the torsion derivative", "Chern Bianchi identity", 1e-8,
              lambda spec=spec: max(bianchi_residual(pkg) for pkg in _packages(spec, cfg.points, cfg.seed)))
        for label, spec in MODEL_GRID
    ]
    for label, spec in (MODEL_GRID[0], MODEL_GRID[5]):
        f = _field(spec)

        def numeric(spec=spec, f=f):
            return max(numeric_ricci_closedness(f, p) for p in _points(spec, min(cfg.points, 3), cfg.seed))

        def exact(spec=spec, f=f):
            return max(
                form_exterior_derivative(ricci1_derivative(evaluate_jet(f, p, 3)))
                for p in _points(spec, cfg.points, cfg.seed)
            )

        tasks.append(_task(cfg, f"closedness/{label}/numeric", "central-difference d(Chern Ric1)",
                           "closedness of Chern Ric1", 1e-5, numeric))
        tasks.append(_task(cfg, f"closedness/{label}/exact", "order-3 jet d(Chern Ric1)", "closedness of Chern Ric1",
                           1e-8, exact))
    return tasks


def suite_berger(cfg: SuiteConfig) -> list:
    spec = MODEL_GRID[0][1]
    tasks = []
    for pairing in ("ric1", "ric2", "ric3", "ric4"):
        def exact(pairing=pairing):
            rng = np.random.default_rng(cfg.seed + 31)
            worst = 0.0
            for pkg in _packages(spec, cfg.points, cfg.seed):
                v = rng.standard_normal(2) + 1j * rng.standard_normal(2)
                for t in T_GRID:
                    worst = max(worst, gd.berger_average(t, pkg, v, "exact", pairing=pairing).residual)
            return worst

        def mc(pairing=pairing):
            pkg = _package(spec, cfg.points, cfg.seed, 0)
            v = np.array([1.0, 0.5j])
            res = gd.berger_average(-1.0, pkg, v, "montecarlo", 100_000, cfg.seed, pairing)
            bound = 3 * res.stderr + MC_FLOOR
            return res.residual / bound, f"residual {res.residual:.3e}, 3 SE {3 * res.stderr:.3e}"

        tasks.append(_task(cfg, f"berger/hopf-n2/{pairing}/exact", "frame average of bisectional curvature vs Ricci",
                           "Berger averaging", 1e-10, exact))
        tasks.append(_task(cfg, f"berger/hopf-n2/{pairing}/montecarlo",
                           "Monte Carlo residual in units of 3 standard errors (+1e-12 floor)", "Berger averaging",
                           1.0, mc))
    return tasks


def _random_metric_packages(cfg: SuiteConfig, count: int = 10) -> list:
    out = []
    for k in range(count):
        spec = models.ModelSpec("random_poly", n=2 + k % 2, seed=cfg.seed + 1000 + k)
        out.append(_package(spec, 1, cfg.seed + k, 0))
    return out


def suite_liu_yang(cfg: SuiteConfig) -> list:
    def calibration():
        kappa, fit = calibrate_lambda_convention(_random_metric_packages(cfg))
        return abs(kappa - 1.0), f"kappa = {kappa:.15g} for frozen convention {LAMBDA_CONVENTION}, fit residual {fit:.2e}"

    def identity():
        return max(liu_yang_residual(pkg) for pkg in _random_metric_packages(cfg))

    return [
        _task(cfg, "liu-yang/calibration", "fitted Lambda factor minus the frozen convention", "Lambda convention", 1e-8,
              calibration),
        _task(cfg, "liu-yang/identity", "Ric2 - Ric1 + Lambda(ddbar omega) + (P+Q) - T^diamond on 10 random metrics",
              "second vs first Chern Ricci", 1e-8, identity),
    ]


def suite_lck(cfg: SuiteConfig) -> list:
    spec = MODEL_GRID[0][1]

    def residual():
        worst = 0.0
        for pkg in _packages(spec, 2 * cfg.points, cfg.seed):
            b = gd.gauduchon_ricci(-1.0, pkg).ricci1
            worst = max(worst, float(np.linalg.norm(b - pkg.ricci2 - (pkg.scal_tilde - pkg.scal) * pkg.g)))
        return worst

    return [_task(cfg, "lck/hopf-n2", "Bismut Ric1 - Chern Ric2 - (tilde-Scal - Scal) g", "LCK surface scalar identity",
                  1e-7, residual)]


def suite_jets(cfg: SuiteConfig) -> list:
    def worst(spec):
        f = _field(spec)
        out = 0.0
        for p in _points(spec, min(cfg.points, 3), cfg.seed):
            out = max(out, jet_difference(evaluate_jet(f, p, 2), finite_difference_jet(f, p, 2)))
        return out

    return [
        _task(cfg, f"jets/{label}", "exact jet vs central differences, orders 0-2", "Wirtinger jets", 1e-6,
              lambda spec=spec: worst(spec))
        for label, spec in MODEL_GRID
    ]


def suite_kahler(cfg: SuiteConfig) -> list:
    specs = (("flat", models.ModelSpec("flat", n=2)), ("fubini_study", models.ModelSpec("fubini_study", n=2)))

    def detectors(pkg):
        torsion = float(np.max(np.abs(pkg.torsion_coord)))
        domega = float(np.max(np.abs(pkg.d_omega)))
        spread = max(float(np.max(np.abs(r - pkg.ricci1))) for r in pkg.riccis)
        return torsion, domega, spread

    tasks = []
    for label, spec in specs:
        tasks.append(
            _task(cfg, f"kahler/{label}", "max of |T|, |d omega| and Ricci spread", "Kaehler detectors", 1e-10,
                  lambda spec=spec: max(max(detectors(pkg)) for pkg in _packages(spec, cfg.points, cfg.seed)))
        )
        tasks.append(
            _task(cfg, f"kahler/{label}/t-independence", "max |^tR11 - Chern R| over the t grid", "Kaehler detectors", 1e-10,
                  lambda spec=spec: max(
                      float(np.max(np.abs(gd.curvature_closed_form(t, pkg).R11 - pkg.R)))
                      for pkg in _packages(spec, cfg.points, cfg.seed) for t in T_GRID))
        )
    for label, spec in (MODEL_GRID[0], MODEL_GRID[3], MODEL_GRID[5]):
        tasks.append(
            _task(cfg, f"kahler/{label}/non-kahler", "min over points of min(|T|, |d omega|)", "Kaehler detectors", 1e-6,
                  lambda spec=spec: min(min(detectors(pkg)[:2]) for pkg in _packages(spec, cfg.points, cfg.seed)),
                  comparison=">=")
        )
    # the Iwasawa metric is Chern-flat, so its Riccis coincide although it is not Kaehler
    for label, spec in (MODEL_GRID[0], MODEL_GRID[5]):
        tasks.append(
            _task(cfg, f"kahler/{label}/ricci-spread", "min over points of the Ricci spread", "Kaehler detectors", 1e-6,
                  lambda spec=spec: min(detectors(pkg)[2] for pkg in _packages(spec, cfg.points, cfg.seed)),
                  comparison=">=")
        )
    return tasks


def suite_invariants(cfg: SuiteConfig) -> list:
    def worst(spec):
        out = 0.0
        for pkg in _packages(spec, cfg.points, cfg.seed):
            r1, r2, r3, r4 = pkg.riccis
            # Ric3 and Ric4 are conjugate transposes of each other, not Hermitian
            out = max(out, curvature_symmetry_residual(pkg.R), hermitian_residual(r1), hermitian_residual(r2))
            out = max(out, float(np.max(np.abs(r4 - r3.conj().T))))
            out = max(out, *scalar_trace_residuals(pkg))
        return out

    return [
        _task(cfg, f"invariants/{label}", "conjugate symmetry of R, Hermitian Ric1/Ric2, Ric4 = Ric3^H, trace agreement",
              "Chern curvature symmetries", 1e-9, lambda spec=spec: worst(spec))
        for label, spec in MODEL_GRID
    ]


def suite_dsl(cfg: SuiteConfig) -> list:
    def worst(spec):
        f = _field(spec)
        g = field_from_source(models.dsl_rendering(spec), domain=f.domain)
        return max(jet_difference(evaluate_jet(f, p, 2), evaluate_jet(g, p, 2)) for p in _points(spec, cfg.points, cfg.seed))

    return [
        _task(cfg, f"dsl-roundtrip/{label}", "analytic jets vs metric-language rendering", "model catalog", 1e-12,
              lambda spec=spec: worst(spec))
        for label, spec in MODEL_GRID[:5]
    ]


SUITES = {
    "kahler": suite_kahler,
    "hopf-ricci-flat": suite_hopf_ricci_flat,
    "dual-route": suite_dual_route,
    "ricci-routes": suite_ricci_routes,
    "scalars": suite_scalars,
    "hsc": suite_hsc,
    "torsion-decomposition": suite_torsion_decomposition,
    "balanced": suite_balanced,
    "minimal-vertex": suite_minimal_vertex,
    "bianchi": suite_bianchi,
    "berger": suite_berger,
    "liu-yang": suite_liu_yang,
    "lck": suite_lck,
    "jets": suite_jets,
    "invariants": suite_invariants,
    "dsl-roundtrip": suite_dsl,
}


def run_verification_suite(names="all", config: SuiteConfig | None = None) -> VerificationReport:
    """Run the named suites (a name, a list of names, or ``"all"``)."""
    cfg = SuiteConfig() if config is None else config
    if isinstance(names, str):
        names = list(SUITES) if names == "all" else [names]
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ConfigError(f"unknown suite(s) {unknown}; choose from {sorted(SUITES)} or 'all'")
    tasks = [task for name in names for task in SUITES[name](cfg)]
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            checks = list(pool.map(lambda f: f(), tasks))
    else:
        checks = [f() for f in tasks]
    echo = {"suites": list(names), **asdict(cfg)}
    echo.pop("workers")
    return VerificationReport(config=echo, checks=sorted(checks, key=lambda c: c.id))
