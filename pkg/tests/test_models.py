import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hermcurv import gauduchon as gd
from hermcurv import models
from hermcurv.chern import chern_package
from hermcurv.errors import InvalidParameter, OutOfRange


def _alpha(z):
    s = np.vdot(z, z).real
    return np.eye(len(z)) / s - np.outer(z.conj(), z) / s**2


@pytest.mark.parametrize("n", [2, 3, 4])
def test_hopf_family_is_pinned_to_lichnerowicz_ricci(n):
    # omega_lambda = omega_0 + 4 lambda ^0Ric1(omega_0), for several lambda
    base = models.builtin(models.ModelSpec("hopf", n=n))
    for p in models.sample_points(models.ModelSpec("hopf", n=n), 4, 1):
        ric0 = gd.gauduchon_ricci(0.0, chern_package(base, p)).ricci1
        assert np.allclose(ric0, _alpha(p), atol=1e-10)
        for lam in (-0.5, 0.3, 1.7):
            g_lam = chern_package(models.builtin(models.ModelSpec("hopf_lambda", n=n, lam=lam)), p).g
            assert np.allclose(g_lam, chern_package(base, p).g + 4 * lam * ric0, atol=1e-10)


@given(st.floats(-5.0, 0.99), st.integers(2, 5))
def test_lambda_star_formula(t, n):
    lam = models.hopf_ricci_flat_lambda(t, n)
    assert lam == pytest.approx((t * (1 - n) - 1) / n)
    assert lam > -1


@pytest.mark.parametrize("t", [1.0, 1.5, 3.0])
def test_lambda_star_out_of_range(t):
    with pytest.raises(OutOfRange):
        models.hopf_ricci_flat_lambda(t, 2)


def test_lambda_star_rejects_bad_input():
    with pytest.raises(InvalidParameter):
        models.hopf_ricci_flat_lambda(0.0, 1)
    with pytest.raises(InvalidParameter):
        models.hopf_ricci_flat_lambda(np.inf, 2)


@pytest.mark.parametrize(
    "spec",
    [
        models.ModelSpec("nope"),
        models.ModelSpec("hopf", n=1),
        models.ModelSpec("iwasawa", n=2),
        models.ModelSpec("hopf_lambda", n=2, lam=-1.0),
        models.ModelSpec("random_poly", n=2, amplitude=0.0),
        models.ModelSpec("flat", n=0),
        models.ModelSpec("flat", n=7),
    ],
)
def test_invalid_specs(spec):
    with pytest.raises(InvalidParameter):
        models.builtin(spec)


@pytest.mark.parametrize("name", models.MODEL_NAMES)
def test_sample_points_are_deterministic_and_in_chart(name):
    spec = models.ModelSpec(name, n=3)
    a = models.sample_points(spec, 6, 42)
    b = models.sample_points(spec, 6, 42)
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    f = models.builtin(spec)
    for p in a:
        assert f.domain(p)
        assert np.all(np.linalg.eigvalsh(chern_package(f, p).g) > 0)


def test_flat_metric_has_no_curvature():
    pkg = chern_package(models.model("flat", n=3), [0.2, -0.1j, 1.0])
    assert np.max(np.abs(pkg.R)) == 0 and np.max(np.abs(pkg.torsion_coord)) == 0


def test_iwasawa_metric_entries():
    z = np.array([0.3 + 0.1j, 0.2, -0.5j])
    g = chern_package(models.model("iwasawa"), z).g
    z1 = z[0]
    expect = np.array([[1, 0, 0], [0, 1 + abs(z1) ** 2, -z1], [0, -np.conj(z1), 1]])
    assert np.allclose(g, expect)


def test_random_poly_depends_on_seed():
    p = [0.3, 0.2j]
    a = chern_package(models.model("random_poly", n=2, seed=0), p).g
    b = chern_package(models.model("random_poly", n=2, seed=1), p).g
    assert not np.allclose(a, b)
