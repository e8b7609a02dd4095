import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hermcurv import _kernels, models
from hermcurv.errors import InvalidParameter, NonPositiveDefinite, PointOutsideChart
from hermcurv.jets import (
    MetricField,
    conjugation_residual,
    evaluate_jet,
    finite_difference_jet,
    jet_difference,
    symmetry_residual,
    taylor_metric_jet,
    taylor_space,
)
from hermcurv.metric_dsl import field_from_source

from strategies import seeds

ALL = [
    models.ModelSpec("flat", n=2),
    models.ModelSpec("hopf", n=2),
    models.ModelSpec("hopf_lambda", n=3, lam=0.7),
    models.ModelSpec("iwasawa", n=3),
    models.ModelSpec("fubini_study", n=3),
    models.ModelSpec("random_poly", n=2, seed=5),
]


def _rand(space, rng):
    return rng.standard_normal(space.size) + 1j * rng.standard_normal(space.size)


@given(seeds, st.integers(1, 6), st.integers(0, 3))
def test_kernels_agree(seed, nvars, order):
    rng = np.random.default_rng(seed)
    sp = taylor_space(nvars, order)
    a, b = _rand(sp, rng), _rand(sp, rng)
    ref = _kernels.python_mul(a, b, sp.I, sp.J, sp.K, sp.size)
    assert np.allclose(sp.mul(a, b), ref, atol=1e-12)
    if _kernels.compiled_mul is not None:
        assert np.allclose(_kernels.compiled_mul(a, b, sp.I, sp.J, sp.K, sp.size), ref, atol=1e-12)
        A = np.stack([a, b])
        assert np.allclose(
            _kernels.compiled_mul_many(A, A, sp.I, sp.J, sp.K, sp.size),
            _kernels.python_mul_many(A, A, sp.I, sp.J, sp.K, sp.size),
            atol=1e-12,
        )


def test_backend_is_reported():
    assert _kernels.BACKEND in ("compiled", "python")


@given(seeds)
def test_jet_algebra(seed):
    rng = np.random.default_rng(seed)
    sp = taylor_space(3, 3)
    x = sp.variable(0, 0.3 + 0.2j) * 0.7 + sp.variable(1, -0.1) + 2.0
    y = sp.variable(2, 0.5j) + 1.5
    assert np.allclose((x * y / y).c, x.c, atol=1e-10)
    assert np.allclose(x.log().exp().c, x.c, atol=1e-10)
    assert np.allclose((x**3).c, (x * x * x).c, atol=1e-10)
    assert np.allclose((x ** -2 * x**2).c, sp.constant(1.0).c, atol=1e-10)
    assert np.allclose((x - x).c, 0)
    assert np.allclose((1 / x).c, x.reciprocal().c)
    c = complex(rng.standard_normal(), rng.standard_normal())
    assert np.allclose((x * c).c, (c * x).c)
    assert np.allclose(x.conj().conj().c, x.c)


def test_jet_power_requires_integer():
    sp = taylor_space(1, 2)
    with pytest.raises(TypeError):
        sp.variable(0, 1.0) ** 0.5


def test_quadratic_entry_second_derivative():
    f = field_from_source("dim 2\ng[1,1] = 1 + z_1*zb_1\n")
    jet = evaluate_jet(f, [0.3 - 0.2j, 0.1j], 2)
    # d/dz_1 d/dzbar_1 g_{1 1bar} = 1
    assert abs(jet.d2[0, 2, 0, 0] - 1.0) < 1e-8
    assert abs(jet.d1[0, 0, 0] - np.conj(0.3 - 0.2j)) < 1e-12


@pytest.mark.parametrize("spec", ALL, ids=lambda s: s.name)
def test_jet_invariants(spec):
    f = models.builtin(spec)
    for p in models.sample_points(spec, 2, 3):
        jet = evaluate_jet(f, p, 3)
        assert conjugation_residual(jet) < 1e-10
        assert symmetry_residual(jet) < 1e-10
        assert jet_difference(jet, finite_difference_jet(f, p, 2)) < 1e-6
        assert jet_difference(jet, finite_difference_jet(f, p, 3)) < 1e-4


@pytest.mark.parametrize("spec", ALL, ids=lambda s: s.name)
def test_analytic_and_dsl_jets_agree(spec):
    f = models.builtin(spec)
    g = field_from_source(models.dsl_rendering(spec), domain=f.domain)
    for p in models.sample_points(spec, 2, 8):
        assert jet_difference(evaluate_jet(f, p, 3), evaluate_jet(g, p, 3)) < 1e-10


def test_truncate_and_order_checks():
    f = models.builtin(ALL[1])
    jet = evaluate_jet(f, [1.0, 0.5j], 3)
    low = jet.truncate(1)
    assert low.order == 1 and np.allclose(low.d1, jet.d1)
    with pytest.raises(InvalidParameter):
        low.d(2)
    with pytest.raises(InvalidParameter):
        low.truncate(2)
    with pytest.raises(InvalidParameter):
        evaluate_jet(f, [1.0, 0.0], 4)
    with pytest.raises(InvalidParameter):
        finite_difference_jet(f, [1.0, 0.0], 2, step=-1.0)


def test_chart_and_positivity_errors():
    hopf = models.builtin(ALL[1])
    with pytest.raises(PointOutsideChart):
        evaluate_jet(hopf, [0.0, 0.0], 1)
    with pytest.raises(PointOutsideChart):
        evaluate_jet(hopf, [1.0], 1)
    with pytest.raises(PointOutsideChart):
        evaluate_jet(hopf, [np.nan, 1.0], 1)
    bad = field_from_source("dim 2\ng[1,1] = 1 - z_1*zb_1\n")
    with pytest.raises(NonPositiveDefinite):
        evaluate_jet(bad, [2.0, 0.0], 1)


def test_taylor_metric_jet_matches_finite_differences():
    def table(z, zb):
        return {(0, 0): 2 + z[0] * zb[0] * z[1] * zb[1], (0, 1): 0.3 * zb[0] * z[1] ** 2}

    f = MetricField("poly", 2, lambda p, k: taylor_metric_jet(table, 2, p, k))
    p = [0.4 + 0.1j, -0.2 + 0.3j]
    assert jet_difference(evaluate_jet(f, p, 2), finite_difference_jet(f, p, 2)) < 1e-7
