"""Built-in metric catalog.

Analytic jets are used for flat space, Fubini--Study, the Hopf metric and its
lambda-family, and the Iwasawa metric; ``random_poly`` is rendered to the
metric language and evaluated in jet arithmetic.

The radial models all have the shape ``g_{i jbar} = F(s) delta_ij +
H(s) zbar_i z_j`` with ``s = |z|^2``.  Their Wirtinger derivatives follow from
treating ``w = (z, zbar)`` as independent variables: ``ds/dw = (zbar, z)``,
``d2s/dw2 = [[0, I], [I, 0]]``, Faa di Bruno for ``F(s)`` and the Leibniz rule
for the product with ``zbar_i z_j``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter, OutOfRange
from .jets import MetricField, MetricJet
from .metric_dsl import field_from_source

MODEL_NAMES = ("flat", "fubini_study", "hopf", "hopf_lambda", "iwasawa", "random_poly")
HOPF_RADIUS = (0.2, 5.0)


@dataclass(frozen=True)
class ModelSpec:
    name: str
    n: int = 2
    lam: float = 0.0
    degree: int = 2
    amplitude: float = 0.3
    seed: int = 0


def hopf_family_coefficients(lam: float) -> tuple:
    """``(c1, c2)`` in ``g = (4/s)(c1 delta + c2 zbar_i z_j / s)``.

    Pinned against ``omega_0 + 4 lam * Ric1(^0 nabla, omega_0)`` by a
    regression test.
    """
    return 1.0 + lam, -lam


# -- derivative helpers -------------------------------------------------------


def _subsets(m):
    for r in range(m + 1):
        for s in itertools.combinations(range(m), r):
            yield s


def _leibniz(phi: list, p: list, m: int) -> np.ndarray:
    """Order-``m`` derivative of ``phi * p`` from the derivative lists."""
    letters = "abc"[:m]
    total = 0
    for s in _subsets(m):
        rest = [k for k in range(m) if k not in s]
        ls = "".join(letters[k] for k in s)
        lr = "".join(letters[k] for k in rest)
        term = np.einsum(f"{ls},{lr}xy->{letters}xy", phi[len(s)], p[len(rest)])
        total = total + term
    return total


def _radial_scalar(fd: list, sigma: np.ndarray, jmat: np.ndarray, order: int) -> list:
    """Derivatives of F(s) given F, F', F'', F''' at s."""
    out = [np.asarray(fd[0], dtype=complex)]
    if order >= 1:
        out.append(fd[1] * sigma)
    if order >= 2:
        out.append(fd[2] * np.einsum("a,b->ab", sigma, sigma) + fd[1] * jmat)
    if order >= 3:
        js = np.einsum("ab,c->abc", jmat, sigma)
        out.append(
            fd[3] * np.einsum("a,b,c->abc", sigma, sigma, sigma)
            + fd[2] * (js + np.transpose(js, (0, 2, 1)) + np.transpose(js, (2, 0, 1)))
        )
    return out


def _radial_jet(z: np.ndarray, order: int, fder: list, hder: list) -> MetricJet:
    n = z.shape[0]
    zb = z.conj()
    sigma = np.concatenate([zb, z])
    jmat = np.block([[np.zeros((n, n)), np.eye(n)], [np.eye(n), np.zeros((n, n))]])
    eye = np.eye(n, dtype=complex)
    fs = _radial_scalar(fder, sigma, jmat, order)
    hs = _radial_scalar(hder, sigma, jmat, order)
    # p_ij = zbar_i z_j and its derivatives; direction a < n is z_a, a >= n is zbar_{a-n}
    eu = np.zeros((2 * n, n))
    eu[n:, :] = np.eye(n)
    ev = np.zeros((2 * n, n))
    ev[:n, :] = np.eye(n)
    p = [np.outer(zb, z)]
    p.append(np.einsum("ai,j->aij", eu, z) + np.einsum("i,aj->aij", zb, ev))
    p2 = np.einsum("ai,bj->abij", eu, ev)
    p.append(p2 + np.transpose(p2, (1, 0, 2, 3)))
    p.append(np.zeros((2 * n,) * 3 + (n, n)))
    delta = [eye] + [np.zeros((2 * n,) * m + (n, n)) for m in range(1, 4)]
    g = fs[0] * eye + hs[0] * p[0]
    derivs = tuple(_leibniz(fs, delta, m) + _leibniz(hs, p, m) for m in range(1, order + 1))
    return MetricJet(n, order, g, derivs, z)


def _power_derivs(c: float, shift: float, power: int, s: float) -> list:
    """c * (shift + s)^(-power) and its first three s-derivatives."""
    x = shift + s
    out = []
    coef = c
    for k in range(4):
        out.append(coef * x ** (-power - k))
        coef *= -(power + k)
    return out


# -- model fields -------------------------------------------------------------


def flat_field(n: int) -> MetricField:
    def evaluator(z, order):
        zero = tuple(np.zeros((2 * n,) * m + (n, n), dtype=complex) for m in range(1, order + 1))
        return MetricJet(n, order, np.eye(n, dtype=complex), zero, z)

    return MetricField(f"flat(n={n})", n, evaluator, analytic=True, dsl_source=flat_source(n))


def flat_source(n: int) -> str:
    return f"dim {n}\n"


def hopf_lambda_field(n: int, lam: float) -> MetricField:
    c1, c2 = hopf_family_coefficients(lam)

    def evaluator(z, order):
        s = float(np.vdot(z, z).real)
        return _radial_jet(z, order, _power_derivs(4 * c1, 0.0, 1, s), _power_derivs(4 * c2, 0.0, 2, s))

    name = f"hopf(n={n})" if lam == 0 else f"hopf_lambda(n={n}, lambda={lam:g})"
    return MetricField(
        name, n, evaluator, domain=_punctured, analytic=True, dsl_source=hopf_source(n, lam)
    )


def _punctured(z) -> bool:
    return bool(np.linalg.norm(z) > 0)


def _vars(n: int, prefix: str) -> str:
    return ",".join(f"{prefix}_{k}" for k in range(1, n + 1))


def hopf_source(n: int, lam: float = 0.0) -> str:
    c1, c2 = hopf_family_coefficients(lam)
    s = f"abs2({_vars(n, 'z')})"
    lines = [f"# Hopf metric family, lambda = {lam!r}", f"dim {n}"]
    for i in range(1, n + 1):
        for j in range(i, n + 1):
            terms = []
            if i == j:
                terms.append(f"4*({c1!r})/{s}")
            if c2 != 0:
                terms.append(f"4*({c2!r})*zb_{i}*z_{j}/{s}^2")
            if terms:
                lines.append(f"g[{i},{j}] = " + " + ".join(terms))
            elif i != j:
                lines.append(f"g[{i},{j}] = 0")
    return "\n".join(lines) + "\n"


def fubini_study_field(n: int) -> MetricField:
    def evaluator(z, order):
        s = float(np.vdot(z, z).real)
        return _radial_jet(z, order, _power_derivs(1.0, 1.0, 1, s), _power_derivs(-1.0, 1.0, 2, s))

    return MetricField(
        f"fubini_study(n={n})", n, evaluator, analytic=True, dsl_source=fubini_study_source(n)
    )


def fubini_study_source(n: int) -> str:
    s = f"(1+abs2({_vars(n, 'z')}))"
    lines = ["# Fubini-Study metric on the affine chart", f"dim {n}"]
    for i in range(1, n + 1):
        for j in range(i, n + 1):
            off = f"zb_{i}*z_{j}/{s}^2"
            lines.append(f"g[{i},{j}] = " + (f"1/{s} - {off}" if i == j else f"-{off}"))
    return "\n".join(lines) + "\n"


def iwasawa_field() -> MetricField:
    """Metric with coframe dz1, dz2, dz3 - z1 dz2."""
    n = 3

    def evaluator(z, order):
        z1 = z[0]
        g = np.eye(3, dtype=complex)
        g[1, 1] = 1 + abs(z1) ** 2
        g[1, 2] = -z1
        g[2, 1] = -np.conj(z1)
        derivs = []
        if order >= 1:
            d1 = np.zeros((6, 3, 3), dtype=complex)
            d1[0, 1, 1] = np.conj(z1)  # d/dz1
            d1[3, 1, 1] = z1  # d/dzbar1
            d1[0, 1, 2] = -1.0
            d1[3, 2, 1] = -1.0
            derivs.append(d1)
        if order >= 2:
            d2 = np.zeros((6, 6, 3, 3), dtype=complex)
            d2[0, 3, 1, 1] = d2[3, 0, 1, 1] = 1.0
            derivs.append(d2)
        if order >= 3:
            derivs.append(np.zeros((6,) * 3 + (3, 3), dtype=complex))
        return MetricJet(n, order, g, tuple(derivs), z)

    return MetricField("iwasawa", n, evaluator, analytic=True, dsl_source=iwasawa_source())


def iwasawa_source() -> str:
    return "# Iwasawa metric, coframe dz1, dz2, dz3 - z1 dz2\ndim 3\ng[2,2] = 1 + z_1*zb_1\ng[2,3] = -z_1\n"


def _complex_literal(c: complex) -> str:
    re_, im = float(c.real), float(c.imag)
    sign = "-" if im < 0 or (im == 0 and str(im).startswith("-")) else "+"
    return f"({re_!r}{sign}{abs(im)!r}j)"


def random_poly_source(n: int, degree: int = 2, amplitude: float = 0.3, seed: int = 0) -> str:
    """Metric text for ``g = I + F^H F`` with a seeded polynomial matrix F."""
    rng = np.random.default_rng(seed)
    monos = []
    for deg in range(degree + 1):
        monos.extend(itertools.combinations_with_replacement(range(2 * n), deg))

    def mono_text(m, conj):
        parts = []
        for v in m:
            hol = v < n
            if conj:
                hol = not hol
            parts.append(f"{'z' if hol else 'zb'}_{v % n + 1}")
        return "*".join(parts)

    coeffs = amplitude * (rng.standard_normal((n, n, len(monos))) + 1j * rng.standard_normal((n, n, len(monos)))) / np.sqrt(2)

    def poly(a, b, conj):
        terms = []
        for c, m in zip(coeffs[a, b], monos):
            c = np.conj(c) if conj else c
            mt = mono_text(m, conj)
            terms.append(_complex_literal(c) + (f"*{mt}" if mt else ""))
        return "(" + " + ".join(terms) + ")"

    lines = [f"# random polynomial metric g = I + F^H F (degree {degree}, amplitude {amplitude!r}, seed {seed})", f"dim {n}"]
    for i in range(n):
        for j in range(i, n):
            # g_{i jbar} = delta_ij + sum_m conj(F_mi) F_mj
            body = " + ".join(f"{poly(m, i, True)}*{poly(m, j, False)}" for m in range(n))
            lead = "1 + " if i == j else ""
            lines.append(f"g[{i + 1},{j + 1}] = {lead}{body}")
    return "\n".join(lines) + "\n"


def random_poly_field(n: int, degree: int = 2, amplitude: float = 0.3, seed: int = 0) -> MetricField:
    src = random_poly_source(n, degree, amplitude, seed)
    return field_from_source(src, name=f"random_poly(n={n}, degree={degree}, seed={seed})")


def validate_spec(spec: ModelSpec) -> ModelSpec:
    if spec.name not in MODEL_NAMES:
        raise InvalidParameter(f"unknown model {spec.name!r}; choose from {', '.join(MODEL_NAMES)}")
    if not isinstance(spec.n, (int, np.integer)) or spec.n < 1:
        raise InvalidParameter("n must be a positive integer")
    if spec.n > 6:
        raise InvalidParameter("n must be at most 6")
    if spec.name in ("hopf", "hopf_lambda") and spec.n < 2:
        raise InvalidParameter("the Hopf models need n >= 2")
    if spec.name == "iwasawa" and spec.n != 3:
        raise InvalidParameter("the Iwasawa model has n = 3")
    if spec.name == "hopf_lambda" and not (np.isfinite(spec.lam) and spec.lam > -1):
        raise InvalidParameter("hopf_lambda needs lambda > -1")
    if spec.name == "random_poly":
        if spec.degree < 0:
            raise InvalidParameter("degree must be nonnegative")
        if not spec.amplitude > 0:
            raise InvalidParameter("amplitude must be positive")
    return spec


def builtin(spec: ModelSpec) -> MetricField:
    spec = validate_spec(spec)
    if spec.name == "flat":
        return flat_field(spec.n)
    if spec.name == "fubini_study":
        return fubini_study_field(spec.n)
    if spec.name == "hopf":
        return hopf_lambda_field(spec.n, 0.0)
    if spec.name == "hopf_lambda":
        return hopf_lambda_field(spec.n, float(spec.lam))
    if spec.name == "iwasawa":
        return iwasawa_field()
    return random_poly_field(spec.n, spec.degree, spec.amplitude, spec.seed)


def model(name: str, **params) -> MetricField:
    if name == "iwasawa":
        params.setdefault("n", 3)
    return builtin(ModelSpec(name, **params))


def dsl_rendering(spec: ModelSpec) -> str:
    """Metric-language text describing the same metric as ``builtin(spec)``."""
    spec = validate_spec(spec)
    if spec.name == "flat":
        return flat_source(spec.n)
    if spec.name == "fubini_study":
        return fubini_study_source(spec.n)
    if spec.name in ("hopf", "hopf_lambda"):
        return hopf_source(spec.n, spec.lam if spec.name == "hopf_lambda" else 0.0)
    if spec.name == "iwasawa":
        return iwasawa_source()
    return random_poly_source(spec.n, spec.degree, spec.amplitude, spec.seed)


def hopf_ricci_flat_lambda(t: float, n: int) -> float:
    """lambda* = (t(1-n) - 1)/n, for which ^tRic1 of omega_lambda vanishes."""
    if n < 2:
        raise InvalidParameter("n must be at least 2")
    if not np.isfinite(t):
        raise InvalidParameter("t must be finite")
    lam = (t * (1 - n) - 1) / n
    if lam <= -1:
        raise OutOfRange(f"lambda* = {lam:g} <= -1: no positive-definite metric for t = {t:g}")
    return lam


def sample_points(spec: ModelSpec, count: int, seed: int) -> list:
    """Deterministic points inside the chart of the model."""
    spec = validate_spec(spec)
    if count < 1:
        raise InvalidParameter("count must be at least 1")
    rng = np.random.default_rng(seed)
    n = spec.n
    pts = []
    for _ in range(count):
        w = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        w /= np.linalg.norm(w)
        if spec.name in ("hopf", "hopf_lambda"):
            lo, hi = np.log(HOPF_RADIUS[0]), np.log(HOPF_RADIUS[1])
            r = np.exp(rng.uniform(lo, hi))
        elif spec.name == "random_poly":
            r = rng.uniform(0.0, 1.0)
        else:
            r = rng.uniform(0.0, 1.5)
        pts.append(r * w)
    return pts
