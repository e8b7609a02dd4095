"""Metric jets: values and mixed Wirtinger derivatives of a metric at a point.

Derivatives are propagated by truncated multivariate Taylor arithmetic over
the 2n real coordinates ``(x_1..x_n, y_1..y_n)``, ``z_k = x_k + i y_k``, and
then assembled into Wirtinger form.  A central-difference jet is kept as an
independent oracle.

Derivative layout
-----------------
``MetricJet.derivs[m - 1]`` has shape ``(2n,) * m + (n, n)``.  A direction
index ``a < n`` means ``d/dz_a`` and ``a >= n`` means ``d/dzbar_{a-n}``; the
trailing pair is ``(i, j)`` of ``g_{i jbar}``.
"""

from __future__ import annotations

import cmath
import functools
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from . import _kernels
from .errors import InvalidParameter, NonPositiveDefinite, PointOutsideChart

MAX_ORDER = 3
DEFAULT_FD_STEP = 1e-4
DEFAULT_FD_STEP_THIRD = 5e-4


# ---------------------------------------------------------------------------
# truncated Taylor algebra


class TaylorSpace:
    """Monomial bookkeeping for polynomials in ``nvars`` variables, degree <= ``order``."""

    def __init__(self, nvars: int, order: int):
        self.nvars = nvars
        self.order = order
        monos = []
        for deg in range(order + 1):
            for combo in itertools.combinations_with_replacement(range(nvars), deg):
                e = [0] * nvars
                for v in combo:
                    e[v] += 1
                monos.append(tuple(e))
        self.monomials = monos
        self.index = {m: k for k, m in enumerate(monos)}
        self.size = len(monos)
        self.degree = np.array([sum(m) for m in monos])
        I, J, K = [], [], []
        for i, mi in enumerate(monos):
            for j, mj in enumerate(monos):
                if self.degree[i] + self.degree[j] > order:
                    continue
                I.append(i)
                J.append(j)
                K.append(self.index[tuple(a + b for a, b in zip(mi, mj))])
        self.I = np.array(I, dtype=np.intp)
        self.J = np.array(J, dtype=np.intp)
        self.K = np.array(K, dtype=np.intp)
        # derivative read-out: d^m f / dx_{r1}..dx_{rm} = alpha! * c_alpha
        self.deriv_index = []
        self.deriv_factor = []
        for m in range(1, order + 1):
            idx = np.empty((nvars,) * m, dtype=np.intp)
            fac = np.empty((nvars,) * m)
            for tup in itertools.product(range(nvars), repeat=m):
                e = [0] * nvars
                for v in tup:
                    e[v] += 1
                idx[tup] = self.index[tuple(e)]
                fac[tup] = math.prod(math.factorial(k) for k in e)
            self.deriv_index.append(idx)
            self.deriv_factor.append(fac)

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return _kernels.truncated_mul(a, b, self.I, self.J, self.K, self.size)

    def variable(self, k: int, value: complex) -> "Jet":
        c = np.zeros(self.size, dtype=complex)
        c[0] = value
        if self.order >= 1:
            c[1 + k] = 1.0
        return Jet(self, c)

    def constant(self, value: complex) -> "Jet":
        c = np.zeros(self.size, dtype=complex)
        c[0] = value
        return Jet(self, c)


@functools.lru_cache(maxsize=None)
def taylor_space(nvars: int, order: int) -> TaylorSpace:
    return TaylorSpace(nvars, order)


def _compose(a: "Jet", coeffs) -> "Jet":
    """Evaluate ``sum_k coeffs[k] h^k`` with ``h = a - a(0)`` (Horner)."""
    sp = a.space
    h = a.c.copy()
    h[0] = 0.0
    out = np.zeros(sp.size, dtype=complex)
    out[0] = coeffs[-1]
    for ck in reversed(coeffs[:-1]):
        out = sp.mul(out, h)
        out[0] += ck
    return Jet(sp, out)


class Jet:
    """Truncated Taylor polynomial with complex coefficients."""

    __slots__ = ("space", "c")

    def __init__(self, space: TaylorSpace, c: np.ndarray):
        self.space = space
        self.c = c

    @property
    def value(self) -> complex:
        return complex(self.c[0])

    def _coerce(self, other):
        if isinstance(other, Jet):
            return other.c
        return None

    def __add__(self, other):
        oc = self._coerce(other)
        if oc is not None:
            return Jet(self.space, self.c + oc)
        c = self.c.copy()
        c[0] += other
        return Jet(self.space, c)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.space, -self.c)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        oc = self._coerce(other)
        if oc is not None:
            return Jet(self.space, self.space.mul(self.c, oc))
        return Jet(self.space, self.c * other)

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet":
        a0 = self.c[0]
        if a0 == 0:
            raise ZeroDivisionError("reciprocal of a jet with zero value")
        K = self.space.order
        return _compose(self, [(-1) ** k / a0 ** (k + 1) for k in range(K + 1)])

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return Jet(self.space, self.c / other)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        if not isinstance(p, (int, np.integer)):
            raise TypeError("jets support integer powers only")
        p = int(p)
        if p < 0:
            return self.reciprocal() ** (-p)
        result = self.space.constant(1.0)
        base = self
        while p:
            if p & 1:
                result = result * base
            p >>= 1
            if p:
                base = base * base
        return result

    def conj(self) -> "Jet":
        # valid because the expansion variables are real coordinates
        return Jet(self.space, self.c.conj())

    def exp(self) -> "Jet":
        e0 = cmath.exp(self.c[0])
        return _compose(self, [e0 / math.factorial(k) for k in range(self.space.order + 1)])

    def log(self) -> "Jet":
        a0 = self.c[0]
        coeffs = [cmath.log(a0)] + [
            (-1) ** (k + 1) / (k * a0**k) for k in range(1, self.space.order + 1)
        ]
        return _compose(self, coeffs)


def jet_exp(x):
    return x.exp() if isinstance(x, Jet) else cmath.exp(x)


def jet_log(x):
    return x.log() if isinstance(x, Jet) else cmath.log(x)


def jet_conj(x):
    return x.conj() if isinstance(x, Jet) else complex(x).conjugate()


# ---------------------------------------------------------------------------
# metric jets


@dataclass(frozen=True)
class ChartPoint:
    coords: np.ndarray

    def __post_init__(self):
        c = np.array(self.coords, dtype=complex).ravel()
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)


def as_point(p, n: int | None = None) -> np.ndarray:
    if isinstance(p, ChartPoint):
        p = p.coords
    z = np.array(p, dtype=complex).ravel()
    if n is not None and z.shape != (n,):
        raise PointOutsideChart(f"expected {n} coordinates, got {z.shape[0]}")
    if not np.all(np.isfinite(z)):
        raise PointOutsideChart("point has non-finite coordinates")
    return z


@dataclass(frozen=True)
class MetricJet:
    n: int
    order: int
    g: np.ndarray
    derivs: tuple = ()
    point: np.ndarray | None = None

    def d(self, m: int) -> np.ndarray:
        if not 1 <= m <= self.order:
            raise InvalidParameter(f"jet of order {self.order} has no order-{m} derivatives")
        return self.derivs[m - 1]

    @property
    def d1(self):
        return self.d(1)

    @property
    def d2(self):
        return self.d(2)

    @property
    def d3(self):
        return self.d(3)

    def truncate(self, order: int) -> "MetricJet":
        if order > self.order:
            raise InvalidParameter("cannot raise the order of a jet")
        return MetricJet(self.n, order, self.g, self.derivs[:order], self.point)


def _flip(n: int) -> np.ndarray:
    return np.concatenate([np.arange(n, 2 * n), np.arange(n)])


def conjugation_residual(jet: MetricJet) -> float:
    """Max of |D_{a..}g_{i jbar} - conj(D_{abar..}g_{j ibar})| over all blocks."""
    n = jet.n
    res = float(np.max(np.abs(jet.g - jet.g.conj().T)))
    flip = _flip(n)
    for m in range(1, jet.order + 1):
        d = jet.d(m)
        other = d[np.ix_(*([flip] * m))] if m > 0 else d
        other = np.swapaxes(other, -1, -2).conj()
        res = max(res, float(np.max(np.abs(d - other))))
    return res


def symmetry_residual(jet: MetricJet) -> float:
    """Max asymmetry of derivative blocks under reordering of directions."""
    res = 0.0
    for m in range(2, jet.order + 1):
        d = jet.d(m)
        for perm in itertools.permutations(range(m)):
            res = max(res, float(np.max(np.abs(d - np.transpose(d, perm + (m, m + 1))))))
    return res


def wirtinger_matrix(n: int) -> np.ndarray:
    """``W[r, a]``: d/dw_a = sum_r W[r, a] d/dr over real coordinates r."""
    w = np.zeros((2 * n, 2 * n), dtype=complex)
    for a in range(n):
        w[a, a] = 0.5
        w[n + a, a] = -0.5j
        w[a, n + a] = 0.5
        w[n + a, n + a] = 0.5j
    return w


def real_to_wirtinger(d_real: np.ndarray, m: int, n: int) -> np.ndarray:
    """Apply the Wirtinger change of directions to the first ``m`` axes."""
    w = wirtinger_matrix(n)
    out = d_real
    for ax in range(m):
        out = np.moveaxis(np.tensordot(out, w, axes=([ax], [0])), -1, ax)
    return out


def jet_from_taylor(coeffs: np.ndarray, space: TaylorSpace, n: int, order: int, point=None) -> MetricJet:
    """Assemble a MetricJet from Taylor coefficients ``coeffs[i, j, :]``."""
    g = coeffs[:, :, 0].copy()
    derivs = []
    for m in range(1, order + 1):
        idx = space.deriv_index[m - 1]
        fac = space.deriv_factor[m - 1]
        dr = coeffs[:, :, idx] * fac  # (n, n, (2n,)*m)
        dr = np.moveaxis(dr, (0, 1), (-2, -1))
        derivs.append(real_to_wirtinger(dr, m, n))
    return MetricJet(n, order, g, tuple(derivs), point)


def taylor_metric_jet(entries: Callable, n: int, point, order: int) -> MetricJet:
    """Jet of a metric whose upper-triangle entries are computed in jet arithmetic.

    ``entries(z, zb)`` receives lists of coordinate jets and returns a mapping
    ``{(i, j): value}`` for ``i <= j`` (0-based); missing entries are
    ``delta_ij``.  The lower triangle is the conjugate swap.
    """
    z0 = as_point(point, n)
    space = taylor_space(2 * n, order)
    x = [space.variable(k, z0[k].real) for k in range(n)]
    y = [space.variable(n + k, z0[k].imag) for k in range(n)]
    z = [x[k] + 1j * y[k] for k in range(n)]
    zb = [x[k] - 1j * y[k] for k in range(n)]
    vals: Mapping = entries(z, zb)
    coeffs = np.zeros((n, n, space.size), dtype=complex)
    for i in range(n):
        coeffs[i, i, 0] = 1.0
    for (i, j), v in vals.items():
        c = v.c if isinstance(v, Jet) else np.concatenate([[v], np.zeros(space.size - 1)])
        if i == j:
            c = 0.5 * (c + c.conj())
        coeffs[i, j] = c
        if i != j:
            coeffs[j, i] = c.conj()
    return jet_from_taylor(coeffs, space, n, order, z0)


def _always(_z) -> bool:
    return True


@dataclass(frozen=True)
class MetricField:
    """A Hermitian metric on one chart.

    ``evaluator(z, order)`` returns a MetricJet; it must be pure so fields can
    be shared across threads.
    """

    name: str
    n: int
    evaluator: Callable[[np.ndarray, int], MetricJet] = field(repr=False)
    domain: Callable[[np.ndarray], bool] = field(default=_always, repr=False)
    analytic: bool = False
    dsl_source: str | None = field(default=None, repr=False)


def check_positive_definite(g: np.ndarray) -> None:
    try:
        np.linalg.cholesky(0.5 * (g + g.conj().T))
    except np.linalg.LinAlgError as exc:
        raise NonPositiveDefinite("metric is not positive-definite at this point") from exc


def _checked_point(field_: MetricField, p) -> np.ndarray:
    z = as_point(p, field_.n)
    if not field_.domain(z):
        raise PointOutsideChart(f"point {z} is outside the chart of {field_.name}")
    return z


def evaluate_jet(field_: MetricField, p, order: int) -> MetricJet:
    if order not in range(MAX_ORDER + 1):
        raise InvalidParameter(f"jet order must be 0..{MAX_ORDER}, got {order}")
    z = _checked_point(field_, p)
    jet = field_.evaluator(z, order)
    check_positive_definite(jet.g)
    return jet


def default_step(p, step: float = DEFAULT_FD_STEP) -> float:
    return step * max(1.0, float(np.linalg.norm(as_point(p))))


# 1-D central stencils (offset -> weight) for d, d^2, d^3; all O(h^2)
_STENCILS = {
    1: {-1: -0.5, 1: 0.5},
    2: {-1: 1.0, 0: -2.0, 1: 1.0},
    3: {-2: -0.5, -1: 1.0, 1: -1.0, 2: 0.5},
}


def finite_difference_jet(
    field_: MetricField, p, order: int, step: float | None = None, third_order_step: float | None = None
) -> MetricJet:
    """Central-difference estimate of the same Wirtinger derivatives.

    ``step`` is the absolute real-coordinate step for orders 1 and 2
    (default ``1e-4 * max(1, |p|)``).  Third derivatives divide by h^3, so they
    use the coarser ``third_order_step`` (default ``5e-4 * max(1, |p|)``) to
    keep round-off below the O(h^2) truncation error.
    """
    if order not in (1, 2, 3):
        raise InvalidParameter("finite-difference order must be 1, 2 or 3")
    n = field_.n
    z0 = _checked_point(field_, p)
    r0 = np.concatenate([z0.real, z0.imag])
    h12 = default_step(z0) if step is None else float(step)
    h3 = default_step(z0, DEFAULT_FD_STEP_THIRD) if third_order_step is None else float(third_order_step)
    if h12 <= 0 or h3 <= 0:
        raise InvalidParameter("step must be positive")

    cache: dict = {}

    def value(offsets: tuple, h: float) -> np.ndarray:
        key = (offsets, h)
        if key not in cache:
            r = r0.copy()
            for var, off in offsets:
                r[var] += off * h
            zp = r[:n] + 1j * r[n:]
            cache[key] = evaluate_jet(field_, zp, 0).g
        return cache[key]

    g0 = value((), h12)
    derivs = []
    for m in range(1, order + 1):
        h = h3 if m == 3 else h12
        dr = np.zeros((2 * n,) * m + (n, n), dtype=complex)
        for combo in itertools.combinations_with_replacement(range(2 * n), m):
            mult: dict = {}
            for v in combo:
                mult[v] = mult.get(v, 0) + 1
            axes = [list(_STENCILS[k].items()) for k in mult.values()]
            total = np.zeros((n, n), dtype=complex)
            for choice in itertools.product(*axes):
                wgt = 1.0
                offs = []
                for var, (off, w) in zip(mult.keys(), choice):
                    wgt *= w
                    if off:
                        offs.append((var, off))
                total = total + wgt * value(tuple(sorted(offs)), h)
            total = total / h**m
            for perm in set(itertools.permutations(combo)):
                dr[perm] = total
        derivs.append(real_to_wirtinger(dr, m, n))
    return MetricJet(n, order, g0, tuple(derivs), z0)


def numeric_field_derivative(f: Callable, p, step: float | None = None) -> np.ndarray:
    """First Wirtinger derivatives of every component of a tensor field.

    ``f(z)`` returns an array (or LabeledTensor); the result has a leading
    axis of length 2n: ``d/dz_a`` for ``a < n`` and ``d/dzbar_{a-n}`` after.
    """
    z0 = as_point(p)
    n = z0.shape[0]
    h = default_step(z0) if step is None else float(step)

    def ev(z):
        v = f(z)
        return np.asarray(getattr(v, "data", v), dtype=complex)

    out = []
    dx, dy = [], []
    for a in range(n):
        e = np.zeros(n, dtype=complex)
        e[a] = h
        dx.append((ev(z0 + e) - ev(z0 - e)) / (2 * h))
        dy.append((ev(z0 + 1j * e) - ev(z0 - 1j * e)) / (2 * h))
    for a in range(n):
        out.append(0.5 * (dx[a] - 1j * dy[a]))
    for a in range(n):
        out.append(0.5 * (dx[a] + 1j * dy[a]))
    return np.stack(out)


def jet_difference(a: MetricJet, b: MetricJet) -> float:
    """Max relative disagreement of two jets, block by block.

    Each block is compared against ``max(1, max|block|)`` so that entries of
    order one are judged absolutely and large blocks relatively.
    """
    order = min(a.order, b.order)
    blocks = [(a.g, b.g)] + [(a.d(m), b.d(m)) for m in range(1, order + 1)]
    worst = 0.0
    for x, y in blocks:
        scale = max(1.0, float(np.max(np.abs(x), initial=0.0)))
        worst = max(worst, float(np.max(np.abs(x - y), initial=0.0)) / scale)
    return worst
