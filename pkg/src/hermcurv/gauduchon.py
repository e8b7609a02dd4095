"""The Gauduchon line of Hermitian connections.

``^t nabla = t * Chern + (1 - t) * Lichnerowicz``.  Throughout, ``c = (1-t)/2``
and the CR-torsion is stored lowered in coordinates as
``Al[i, j, k] = A_{ibar j kbar} = c * conj(T_{i k jbar})`` with ``T_{i j lbar}``
the lowered Chern torsion.

Curvature layouts follow the Chern module: ``R11[i, j, k, l] = R_{i jbar k
lbar}`` and ``R20[i, j, k, l] = R_{i j k lbar}``, coordinate frame; the
``*_frame`` views are in the package's unitary frame.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize

from .chern import (
    CURVATURE_LABELS,
    CurvaturePackage,
    coordinate_form,
    lowered_torsion,
    metric_trace,
    package_from_jet,
    real_three_form,
    ricci_traces,
)
from .errors import ConsistencyFailure, DegenerateFit, IncompatibleIndices, InvalidParameter, ZeroVector
from .jets import MetricField, MetricJet, evaluate_jet
from .tensorcore import (
    ANTI_DOWN,
    HOL_DOWN,
    HOL_UP,
    UNITARY,
    FrameMatrix,
    LabeledTensor,
    inverse_metric_tensor,
    to_coordinate_frame,
    to_unitary_frame,
    unitary_frame,
)

R20_LABELS = (HOL_DOWN, HOL_DOWN, HOL_DOWN, ANTI_DOWN)
A_LABELS = (HOL_UP, ANTI_DOWN, HOL_DOWN)

RICCI_TOL = 1e-7
SCALAR_TOL = 1e-8
GAP_TOL = 1e-8

PRESETS = {
    "chern": 1.0,
    "lichnerowicz": 0.0,
    "bismut": -1.0,
    "minimal": 1.0 / 3.0,
    "hermitian_conformal": 0.5,
}


@dataclass(frozen=True)
class GauduchonParams:
    t: float

    def __post_init__(self):
        if not np.isfinite(self.t):
            raise InvalidParameter(f"Gauduchon parameter must be finite, got {self.t}")
        object.__setattr__(self, "t", float(self.t))

    @classmethod
    def preset(cls, name: str) -> "GauduchonParams":
        try:
            return cls(PRESETS[name])
        except KeyError:
            raise InvalidParameter(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None

    @property
    def c(self) -> float:
        return 0.5 * (1.0 - self.t)


def _t(t) -> float:
    return t.t if isinstance(t, GauduchonParams) else GauduchonParams(t).t


# -- CR-torsion and connection coefficients -------------------------------------


def a_tensor(t, t_frame: np.ndarray, frame: FrameMatrix | None = None):
    """``A[k, i, j] = A^k_{ibar j} = c * conj(T^j_{ik})`` in the unitary frame.

    With ``frame`` given, also returns the coordinate-frame version.
    """
    c = 0.5 * (1.0 - _t(t))
    a = c * np.transpose(np.asarray(t_frame).conj(), (2, 1, 0))
    if frame is None:
        return a
    coord = to_coordinate_frame(LabeledTensor(a.shape[0], A_LABELS, a, UNITARY), frame).data
    return a, np.array(coord)


def lowered_a_tensor(t, jet: MetricJet) -> np.ndarray:
    """``Al[i, j, k] = A_{ibar j kbar}`` in coordinates."""
    c = 0.5 * (1.0 - _t(t))
    return c * np.transpose(lowered_torsion(jet), (0, 2, 1)).conj()


def connection_coefficients(t, jet: MetricJet):
    """``(hol, anti)`` with ``nabla_p d_k = hol[q, p, k] d_q`` and
    ``nabla_pbar d_k = anti[q, p, k] d_q``."""
    t = _t(t)
    c = 0.5 * (1.0 - t)
    n = jet.n
    H = inverse_metric_tensor(jet.g)
    gam = np.einsum("kl,ijl->kij", H, jet.d1[:n])
    tor = gam - np.transpose(gam, (0, 2, 1))
    hol = gam - c * tor
    anti = np.einsum("qm,pkm->qpk", H, lowered_a_tensor(t, jet))
    return hol, anti


# -- curvature ------------------------------------------------------------------


@dataclass(frozen=True)
class GauduchonCurvature:
    t: float
    R11: np.ndarray
    R20: np.ndarray
    g: np.ndarray
    frame: FrameMatrix
    route: str
    ricci1: np.ndarray = field(init=False)
    ricci2: np.ndarray = field(init=False)
    ricci3: np.ndarray = field(init=False)
    ricci4: np.ndarray = field(init=False)
    scal: float = field(init=False)
    scal_tilde: float = field(init=False)

    def __post_init__(self):
        r = ricci_traces(self.R11, self.g)
        for name, val in zip(("ricci1", "ricci2", "ricci3", "ricci4"), r):
            object.__setattr__(self, name, val)
        object.__setattr__(self, "scal", float(metric_trace(r[0], self.g).real))
        object.__setattr__(self, "scal_tilde", float(metric_trace(r[2], self.g).real))

    @property
    def n(self) -> int:
        return self.g.shape[0]

    @property
    def riccis(self) -> tuple:
        return (self.ricci1, self.ricci2, self.ricci3, self.ricci4)

    @property
    def R11_frame(self) -> np.ndarray:
        return np.array(to_unitary_frame(LabeledTensor(self.n, CURVATURE_LABELS, self.R11), self.frame).data)

    @property
    def R20_frame(self) -> np.ndarray:
        return np.array(to_unitary_frame(LabeledTensor(self.n, R20_LABELS, self.R20), self.frame).data)


def direct_from_jet(t, jet: MetricJet, chern_R: np.ndarray | None = None) -> GauduchonCurvature:
    """Curvature of ``^t nabla`` as Chern curvature plus A-tensor corrections.

    ``Theta(u, vbar) = R^c + (nabla_u A)_vbar - conj-adjoint terms +
    [A*, A]``; the (2,0) part collects ``nabla A*``, ``[A*, A*]`` and the
    torsion term.  ``nabla A`` is the Chern covariant derivative of the A-field,
    obtained from the order-2 jet.
    """
    t = _t(t)
    if jet.order < 2:
        raise IncompatibleIndices(f"need a jet of order >= 2, got {jet.order}")
    c = 0.5 * (1.0 - t)
    n = jet.n
    H = inverse_metric_tensor(jet.g)
    gam = np.einsum("kl,ijl->kij", H, jet.d1[:n])
    tor = gam - np.transpose(gam, (0, 2, 1))
    if chern_R is None:
        chern_R = -jet.d2[:n, n:] + np.einsum("pq,ikq,jpl->ijkl", H, jet.d1[:n], jet.d1[n:])
    al = lowered_a_tensor(t, jet)
    alc = al.conj()
    gbar = gam.conj()

    # nA_hol[p, a, b, c] = nabla_p A_{abar b cbar}
    d = jet.d2[n:, :n]  # [p, a, x, y] = d_pbar d_a g_{x ybar}
    da = c * (np.einsum("pacb->pabc", d) - np.einsum("pcab->pabc", d)).conj()
    nA_hol = da - np.einsum("qpb,aqc->pabc", gam, al)
    # nA_anti[p, a, b, c] = nabla_pbar A_{abar b cbar}
    d = jet.d2[:n, :n]
    da = c * (np.einsum("pacb->pabc", d) - np.einsum("pcab->pabc", d)).conj()
    nA_anti = da - np.einsum("qpa,qbc->pabc", gbar, al) - np.einsum("qpc,abq->pabc", gbar, al)

    r11 = (
        chern_R
        + nA_hol
        + np.transpose(nA_hol, (1, 0, 3, 2)).conj()
        - np.einsum("rm,jkm,ilr->ijkl", H, al, alc)
        + np.einsum("rm,imk,jrl->ijkl", H, alc, al)
    )
    r20 = (
        -np.einsum("ijlk->ijkl", nA_anti).conj()
        + np.einsum("jilk->ijkl", nA_anti).conj()
        + np.einsum("rm,jmk,ilr->ijkl", H, alc, alc)
        - np.einsum("rm,imk,jlr->ijkl", H, alc, alc)
        - np.einsum("rij,rlk->ijkl", tor, alc)
    )
    return GauduchonCurvature(t, r11, r20, jet.g, unitary_frame(jet.g), "direct")


def curvature_direct(t, field_: MetricField, point, order: int = 2) -> GauduchonCurvature:
    return direct_from_jet(t, evaluate_jet(field_, point, max(2, order)))


def curvature_closed_form(t, pkg: CurvaturePackage) -> GauduchonCurvature:
    """Curvature of ``^t nabla`` from Chern curvature, torsion and its derivative.

    In the unitary frame::

        R11 = t R + c (R_{k jbar i lbar} + R_{i lbar k jbar})
              + c^2 (T^r_{ik} conj T^r_{jl} - T^l_{ir} conj T^k_{jr})
        R20 = c (T^l_{ik,j} - T^l_{jk,i}) + c^2 (T^r_{jk} T^l_{ir} - T^r_{ik} T^l_{jr})
              - c T^r_{ij} T^l_{rk}
    """
    t = _t(t)
    c = 0.5 * (1.0 - t)
    R = pkg.R_frame
    T = pkg.torsion_frame
    Tc = T.conj()
    r11 = (
        t * R
        + c * (np.einsum("kjil->ijkl", R) + np.einsum("ilkj->ijkl", R))
        + c * c * (np.einsum("rik,rjl->ijkl", T, Tc) - np.einsum("lir,kjr->ijkl", T, Tc))
    )
    nt = pkg.nabla_t_hol_frame  # [l, i, k, j] = T^l_{ik,j}
    r20 = (
        c * (np.einsum("likj->ijkl", nt) - np.einsum("ljki->ijkl", nt))
        + c * c * (np.einsum("rjk,lir->ijkl", T, T) - np.einsum("rik,ljr->ijkl", T, T))
        - c * np.einsum("rij,lrk->ijkl", T, T)
    )
    n = pkg.n
    r11c = to_coordinate_frame(LabeledTensor(n, CURVATURE_LABELS, r11, UNITARY), pkg.frame).data
    r20c = to_coordinate_frame(LabeledTensor(n, R20_LABELS, r20, UNITARY), pkg.frame).data
    return GauduchonCurvature(t, np.array(r11c), np.array(r20c), pkg.g, pkg.frame, "closed_form")


def dual_route_residual(direct: GauduchonCurvature, closed: GauduchonCurvature) -> float:
    """Componentwise max difference over R11 and R20 (unitary frame)."""
    r11 = np.max(np.abs(direct.R11_frame - closed.R11_frame))
    iu = np.triu_indices(direct.n, 1)
    r20 = np.max(np.abs(direct.R20_frame[iu] - closed.R20_frame[iu]), initial=0.0)
    return float(max(r11, r20))


# -- Ricci and scalar curvatures ------------------------------------------------------


@dataclass(frozen=True)
class GauduchonRicci:
    t: float
    ricci1: np.ndarray
    ricci2: np.ndarray
    ricci3: np.ndarray
    ricci4: np.ndarray
    residuals: dict

    @property
    def riccis(self) -> tuple:
        return (self.ricci1, self.ricci2, self.ricci3, self.ricci4)

    @property
    def worst_residual(self) -> float:
        return max(self.residuals.values())


def ricci_from_chern_riccis(t, pkg: CurvaturePackage) -> tuple:
    """Four Riccis from the Chern Riccis and frame torsion sums."""
    t = _t(t)
    c = 0.5 * (1.0 - t)
    T = pkg.torsion_frame
    Tc = T.conj()
    c1, c2, c3, c4 = (pkg.ricci_frame(k) for k in (1, 2, 3, 4))
    q2 = np.einsum("rik,ril->kl", T, Tc) - np.einsum("lir,kir->kl", T, Tc)
    q3 = np.einsum("rik,rkl->il", T, Tc) - np.einsum("lir,kkr->il", T, Tc)
    q4 = np.einsum("rik,rji->kj", T, Tc) - np.einsum("iir,kjr->kj", T, Tc)
    out = (
        t * c1 + c * (c3 + c4),
        t * c2 + c * (c3 + c4) + c * c * q2,
        t * c3 + c * (c1 + c2) + c * c * q3,
        t * c4 + c * (c1 + c2) + c * c * q4,
    )
    return tuple(coordinate_form(r, pkg.frame) for r in out)


def ricci_from_forms(t, pkg: CurvaturePackage) -> tuple:
    """Four Riccis from ``P``, ``Q`` and the torsion (1,1)-forms."""
    t = _t(t)
    c = 0.5 * (1.0 - t)
    dia = coordinate_form(pkg.t_diamond, pkg.frame)
    cir = coordinate_form(pkg.t_circle, pkg.frame)
    heart = coordinate_form(pkg.t_heart, pkg.frame)
    heart_bar = coordinate_form(pkg.t_heart.conj().T, pkg.frame)
    pq = pkg.P + pkg.Q
    r1, r2, r3, r4 = pkg.riccis
    return (
        r1 - c * pq,
        t * r2 + (1 - t) * r1 - c * pq + c * c * (dia - cir),
        t * r3 + c * (r1 + r2) - c * c * (dia + heart),
        t * r4 + c * (r1 + r2) - c * c * (dia + heart_bar),
    )


def gauduchon_ricci(
    t, pkg: CurvaturePackage, curvature: GauduchonCurvature | None = None, tol: float | None = RICCI_TOL
) -> GauduchonRicci:
    """Riccis of ``^t nabla`` by three routes; returns the trace route.

    Raises ConsistencyFailure when any pairwise residual exceeds ``tol``
    (pass ``tol=None`` to only report).
    """
    t = _t(t)
    curv = curvature_closed_form(t, pkg) if curvature is None else curvature
    a = curv.riccis
    b = ricci_from_chern_riccis(t, pkg)
    c = ricci_from_forms(t, pkg)
    res = {}
    for name, x, y in (("trace-vs-chern", a, b), ("trace-vs-forms", a, c), ("chern-vs-forms", b, c)):
        res[name] = float(max(np.max(np.abs(p - q)) for p, q in zip(x, y)))
    worst = max(res.values())
    if tol is not None and worst > tol:
        raise ConsistencyFailure(f"Ricci routes disagree at t={t}: {res}", worst)
    return GauduchonRicci(t, *a, residuals=res)


def gauduchon_scalars(t, pkg: CurvaturePackage, tol: float | None = SCALAR_TOL) -> tuple:
    """``(^t Scal, ^t tilde-Scal)`` from the Chern scalars; cross-checked
    against traces of the Ricci forms."""
    t = _t(t)
    c = 0.5 * (1.0 - t)
    scal = t * pkg.scal + (1 - t) * pkg.scal_tilde
    scal_tilde = t * pkg.scal_tilde + (1 - t) * pkg.scal - c * c * (pkg.normT2 + pkg.normTau2)
    if tol is not None:
        ric = gauduchon_ricci(t, pkg, tol=None)
        traces = [metric_trace(r, pkg.g) for r in ric.riccis]
        res = max(
            abs(traces[0] - scal), abs(traces[1] - scal), abs(traces[2] - scal_tilde), abs(traces[3] - scal_tilde)
        )
        if res > tol * max(1.0, abs(scal), abs(scal_tilde)):
            raise ConsistencyFailure(f"scalar relations fail at t={t}", float(res))
    return float(scal), float(scal_tilde)


# -- sectional curvatures ---------------------------------------------------------------


def _curv(t, pkg, curvature):
    return curvature_closed_form(t, pkg) if curvature is None else curvature


def hsc(t, pkg: CurvaturePackage, v, curvature: GauduchonCurvature | None = None) -> float:
    """Holomorphic sectional curvature ``R(v, vbar, v, vbar) / |v|^4``."""
    v = np.asarray(v, dtype=complex)
    norm2 = float(np.real(v @ pkg.g @ v.conj()))
    if not np.any(v) or norm2 <= 0:
        raise ZeroVector("hsc needs a nonzero direction")
    R = _curv(t, pkg, curvature).R11
    val = np.einsum("ijkl,i,j,k,l->", R, v, v.conj(), v, v.conj())
    return float(val.real / norm2**2)


def _rotated(pkg: CurvaturePackage, U, lam):
    lam = np.asarray(lam, dtype=float)
    if not np.any(lam):
        raise ZeroVector("lambda must be nonzero")
    U = np.asarray(U, dtype=complex)
    if np.max(np.abs(U.conj().T @ U - np.eye(pkg.n))) > 1e-10:
        raise InvalidParameter("rotation is not unitary")
    return FrameMatrix(pkg.frame.columns @ U), lam


def _frame_curvature(R11: np.ndarray, frame: FrameMatrix) -> np.ndarray:
    return np.array(to_unitary_frame(LabeledTensor(R11.shape[0], CURVATURE_LABELS, R11), frame).data)


def rbc(t, pkg: CurvaturePackage, U, lam, curvature: GauduchonCurvature | None = None) -> float:
    """Real bisectional curvature ``sum R_{a abar c cbar} lam_a lam_c / |lam|^2``."""
    frame, lam = _rotated(pkg, U, lam)
    Rf = _frame_curvature(_curv(t, pkg, curvature).R11, frame)
    q = np.einsum("aacc->ac", Rf).real
    return float(lam @ q @ lam / (lam @ lam))


def altered_rbc(t, pkg: CurvaturePackage, U, lam, curvature: GauduchonCurvature | None = None) -> float:
    """Altered version with ``R_{a cbar c abar}``."""
    frame, lam = _rotated(pkg, U, lam)
    Rf = _frame_curvature(_curv(t, pkg, curvature).R11, frame)
    q = np.einsum("acca->ac", Rf).real
    return float(lam @ q @ lam / (lam @ lam))


@dataclass(frozen=True)
class AlteredHsc:
    value: float
    chern_value: float
    gap: float
    residual: float


def altered_hsc_gap(t, pkg: CurvaturePackage, U, lam) -> float:
    """Predicted ``tilde-HSC(1) - tilde-HSC(t)`` from the torsion in the rotated frame."""
    t = _t(t)
    frame, lam = _rotated(pkg, U, lam)
    T = np.array(to_unitary_frame(LabeledTensor(pkg.n, (HOL_UP, HOL_DOWN, HOL_DOWN), pkg.torsion_coord), frame).data)
    diag = np.einsum("iiq->iq", T)
    form = np.einsum("iq,kq->ik", diag, diag.conj()) + np.einsum("kiq,kiq->ik", T, T.conj())
    return float((t - 1) ** 2 / 4 * np.real(lam @ form @ lam) / (lam @ lam))


def altered_hsc(t, pkg: CurvaturePackage, U, lam, tol: float | None = GAP_TOL) -> AlteredHsc:
    """Altered HSC along ``(U, lam)`` with the monotonicity gap checked."""
    t = _t(t)
    value = rbc(t, pkg, U, lam) + altered_rbc(t, pkg, U, lam)
    chern_value = rbc(1.0, pkg, U, lam) + altered_rbc(1.0, pkg, U, lam)
    gap = altered_hsc_gap(t, pkg, U, lam)
    residual = abs(value - (chern_value - gap))
    if tol is not None and residual > tol * max(1.0, abs(chern_value)):
        raise ConsistencyFailure(f"altered HSC gap mismatch at t={t}", residual)
    return AlteredHsc(value, chern_value, gap, residual)


def altered_hsc_counterexamples(t, pkg: CurvaturePackage, samples: int, rng: np.random.Generator, tol: float = 1e-12):
    """Sample random unitary ``U`` and mixed-sign ``lam`` and keep those with a negative gap.

    For nonnegative ``lam`` every term of the gap is nonnegative; with mixed
    signs the second quadratic form can win, so ``tilde-HSC(t) > tilde-HSC(1)``
    is possible.  Returns ``(U, lam, gap)`` triples.
    """
    out = []
    n = pkg.n
    for _ in range(samples):
        U, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
        lam = rng.standard_normal(n)
        if np.all(lam >= 0) or np.all(lam <= 0):
            continue
        g = altered_hsc_gap(t, pkg, U, lam)
        if g < -tol:
            out.append((U, lam, g))
    return out


def random_unit_vectors(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform on the unit sphere of C^n via normalized complex Gaussians."""
    w = rng.standard_normal((count, n)) + 1j * rng.standard_normal((count, n))
    return w / np.linalg.norm(w, axis=1, keepdims=True)


@dataclass(frozen=True)
class HscExtrema:
    minimum: float
    maximum: float
    argmin: tuple
    argmax: tuple


def hsc_extrema(
    t, field_: MetricField, points, directions: int = 64, seed: int = 0, refine: bool = True
) -> HscExtrema:
    """Sampled HSC extrema over ``points`` and unit directions.

    Each point gets ``directions`` random frame directions; the best ones are
    polished by a local search on the direction sphere.  These are estimates,
    not certified bounds.
    """
    t = _t(t)
    rng = np.random.default_rng(seed)
    best_lo = (np.inf, None)
    best_hi = (-np.inf, None)
    for p in points:
        pkg = package_from_jet(evaluate_jet(field_, p, 2))
        curv = curvature_closed_form(t, pkg)
        Rf = curv.R11_frame
        n = pkg.n

        def f(x, Rf=Rf, n=n):
            w = x[:n] + 1j * x[n:]
            return float(np.einsum("ijkl,i,j,k,l->", Rf, w, w.conj(), w, w.conj()).real / np.vdot(w, w).real ** 2)

        ws = random_unit_vectors(n, directions, rng)
        vals = np.array([f(np.concatenate([w.real, w.imag])) for w in ws])
        lo_x = np.concatenate([ws[vals.argmin()].real, ws[vals.argmin()].imag])
        hi_x = np.concatenate([ws[vals.argmax()].real, ws[vals.argmax()].imag])
        lo, hi = vals.min(), vals.max()
        if refine:
            r = minimize(f, lo_x, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-14})
            if r.fun < lo:
                lo, lo_x = r.fun, r.x
            r = minimize(lambda x: -f(x), hi_x, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-14})
            if -r.fun > hi:
                hi, hi_x = -r.fun, r.x
        to_coord = lambda x: tuple(complex(u) for u in pkg.frame.columns @ (x[:n] + 1j * x[n:]))  # noqa: E731
        if lo < best_lo[0]:
            best_lo = (float(lo), (tuple(complex(u) for u in np.asarray(p)), to_coord(lo_x)))
        if hi > best_hi[0]:
            best_hi = (float(hi), (tuple(complex(u) for u in np.asarray(p)), to_coord(hi_x)))
    return HscExtrema(best_lo[0], best_hi[0], best_lo[1], best_hi[1])


# -- torsion of the full connection ---------------------------------------------------------


def full_torsion(t, jet: MetricJet) -> np.ndarray:
    """Torsion of ``^t nabla`` on the complexified basis ``(d_1..d_n, d_1bar..d_nbar)``.

    ``TC[c, a, b]`` is the ``c`` component of ``T(e_a, e_b)``.
    """
    n = jet.n
    hol, anti = connection_coefficients(t, jet)
    tc = np.zeros((2 * n,) * 3, dtype=complex)
    hh = hol - np.transpose(hol, (0, 2, 1))
    tc[:n, :n, :n] = hh
    tc[n:, n:, n:] = hh.conj()
    # T(d_p, d_kbar) = nabla_p d_kbar - nabla_kbar d_p
    tc[n:, :n, n:] = anti.conj()
    tc[:n, :n, n:] = -np.transpose(anti, (0, 2, 1))
    tc[:, n:, :n] = -np.transpose(tc[:, :n, n:], (0, 2, 1))
    return tc


def _complex_frame(frame: FrameMatrix) -> np.ndarray:
    e = frame.columns
    n = e.shape[0]
    f = np.zeros((2 * n, 2 * n), dtype=complex)
    f[:n, :n] = e
    f[n:, n:] = e.conj()
    return f


def frame_three_form(form: np.ndarray, frame: FrameMatrix) -> np.ndarray:
    f = _complex_frame(frame)
    return np.einsum("abc,ax,by,cz->xyz", form, f, f, f)


def frame_vector_two_form(tc: np.ndarray, frame: FrameMatrix) -> np.ndarray:
    f = _complex_frame(frame)
    return np.einsum("cab,dc,ax,by->dxy", tc, np.linalg.inv(f), f, f)


def _pairing(n: int) -> np.ndarray:
    s = np.zeros((2 * n, 2 * n))
    s[:n, n:] = np.eye(n)
    s[n:, :n] = np.eye(n)
    return s


def bianchi_projector(alpha: np.ndarray) -> np.ndarray:
    """``B(alpha)(u, v, w) = (g(alpha(u,v), w) + cyclic) / 3`` in a unitary frame."""
    n = alpha.shape[0] // 2
    low = np.einsum("cab,cd->abd", alpha, _pairing(n))
    return (low + np.transpose(low, (1, 2, 0)) + np.transpose(low, (2, 0, 1))) / 3.0


def _embed11(v: np.ndarray, n: int) -> np.ndarray:
    """Coefficients ``v[c, a, b]`` on ``(e_a, ebar_b)`` to a full 2-form."""
    x = np.zeros((2 * n,) * 3, dtype=complex)
    x[:, :n, n:] = v
    x[:, n:, :n] = -np.transpose(v, (0, 2, 1))
    return x


@lru_cache(maxsize=None)
def _kernel_projector(n: int) -> np.ndarray:
    """Orthogonal projector onto ``ker B`` within the (1,1) part."""
    dim = 2 * n * n * n
    cols = []
    for k in range(dim):
        e = np.zeros(dim, dtype=complex)
        e[k] = 1.0
        cols.append(bianchi_projector(_embed11(e.reshape(2 * n, n, n), n)).ravel())
    mat = np.array(cols).T
    _, s, vh = np.linalg.svd(mat)
    rank = int(np.sum(s > 1e-12 * s[0]))
    kern = vh[rank:].conj().T
    proj = kern @ kern.conj().T
    proj.setflags(write=False)
    return proj


@dataclass(frozen=True)
class TorsionDecomposition:
    t: float
    full: np.ndarray
    T20: np.ndarray
    T11_b: np.ndarray
    T11_c: np.ndarray
    B_T11_c: np.ndarray
    B_T20_minus_T11_c: np.ndarray
    dc_omega: np.ndarray

    @property
    def reassembly_residual(self) -> float:
        return float(np.max(np.abs(self.T20 + self.T11_b + self.T11_c - self.full)))

    @property
    def kernel_norm(self) -> float:
        return float(np.linalg.norm(self.T11_b))

    @property
    def complement_residual(self) -> float:
        return float(np.linalg.norm(self.B_T11_c - (self.t - 1) / 3 * self.dc_omega))

    @property
    def type20_residual(self) -> float:
        return float(np.linalg.norm(self.B_T20_minus_T11_c - self.dc_omega / 3))

    @property
    def residuals(self) -> dict:
        return {
            "reassembly": self.reassembly_residual,
            "T11_b": self.kernel_norm,
            "B(T11_c)": self.complement_residual,
            "B(T20-T11_c)": self.type20_residual,
        }


def decomposition_from_jet(t, jet: MetricJet) -> TorsionDecomposition:
    t = _t(t)
    n = jet.n
    frame = unitary_frame(jet.g)
    full = frame_vector_two_form(full_torsion(t, jet), frame)
    t20 = np.zeros_like(full)
    t20[:, :n, :n] = full[:, :n, :n]
    t20[:, n:, n:] = full[:, n:, n:]
    v = full[:, :n, n:].ravel()
    proj = _kernel_projector(n)
    vb = proj @ v
    t11_b = _embed11(vb.reshape(2 * n, n, n), n)
    t11_c = _embed11((v - vb).reshape(2 * n, n, n), n)
    dc = frame_three_form(real_three_form(lowered_torsion(jet)), frame)
    return TorsionDecomposition(
        t=t,
        full=full,
        T20=t20,
        T11_b=t11_b,
        T11_c=t11_c,
        B_T11_c=bianchi_projector(t11_c),
        B_T20_minus_T11_c=bianchi_projector(t20 - t11_c),
        dc_omega=dc,
    )


def torsion_type_decomposition(t, field_: MetricField, point) -> TorsionDecomposition:
    return decomposition_from_jet(t, evaluate_jet(field_, point, 1))


def torsion_norm(t, jet: MetricJet) -> float:
    """``|T(^t nabla)|^2`` summed over a unitary basis of the complexified bundle."""
    full = frame_vector_two_form(full_torsion(t, jet), unitary_frame(jet.g))
    return float(np.sum(np.abs(full) ** 2))


@dataclass(frozen=True)
class NormProfile:
    ts: np.ndarray
    norms: np.ndarray
    coefficients: np.ndarray  # highest degree first
    vertex: float


def torsion_norm_profile(field_: MetricField, point, ts) -> NormProfile:
    ts = np.asarray(sorted(set(float(x) for x in ts)))
    if ts.size < 3:
        raise InvalidParameter("need at least three distinct t values")
    jet = evaluate_jet(field_, point, 1)
    norms = np.array([torsion_norm(t, jet) for t in ts])
    if np.max(np.abs(norms - norms[0])) <= 1e-12 * max(1.0, np.max(np.abs(norms))):
        raise DegenerateFit("torsion norm does not depend on t (the metric is Kaehler here)")
    coef = np.polyfit(ts, norms, 2)
    if coef[0] <= 0:
        raise DegenerateFit("torsion norm profile is not convex")
    return NormProfile(ts, norms, coef, float(-coef[1] / (2 * coef[0])))


# -- Berger averaging -------------------------------------------------------------------------


@dataclass(frozen=True)
class BergerAverage:
    average: float
    reference: float
    residual: float
    stderr: float


_PAIRINGS = ("ric1", "ric2", "ric3", "ric4")


def _bisectional(Rf: np.ndarray, v: np.ndarray, w: np.ndarray, pairing: str) -> np.ndarray:
    """HBC or its altered version, frame components; ``w`` may be a batch."""
    vc, wc = v.conj(), w.conj()
    if pairing == "ric1":  # R(v, vbar, w, wbar)
        return np.einsum("ijkl,i,j,...k,...l->...", Rf, v, vc, w, wc)
    if pairing == "ric2":  # R(w, wbar, v, vbar)
        return np.einsum("ijkl,...i,...j,k,l->...", Rf, w, wc, v, vc)
    if pairing == "ric3":  # R(v, wbar, w, vbar)
        return np.einsum("ijkl,i,...j,...k,l->...", Rf, v, wc, w, vc)
    return np.einsum("ijkl,...i,j,k,...l->...", Rf, w, vc, v, wc)  # R(w, vbar, v, wbar)


def berger_average(
    t,
    pkg: CurvaturePackage,
    v,
    mode: str = "exact",
    samples: int = 100_000,
    seed: int = 0,
    pairing: str = "ric1",
    curvature: GauduchonCurvature | None = None,
) -> BergerAverage:
    """Sphere average of a bisectional curvature against its Ricci trace.

    ``pairing`` selects the averaged slot: ``ric1``/``ric2`` average
    ``HBC(v, w)`` over ``w`` or ``v`` respectively, ``ric3``/``ric4`` the
    altered version.  The reference is ``Ric(v, vbar) / (n |v|^2)``.
    """
    if pairing not in _PAIRINGS:
        raise InvalidParameter(f"pairing must be one of {_PAIRINGS}")
    if mode not in ("exact", "montecarlo"):
        raise InvalidParameter("mode must be 'exact' or 'montecarlo'")
    v = np.asarray(v, dtype=complex)
    if not np.any(v):
        raise ZeroVector("berger_average needs a nonzero vector")
    curv = _curv(t, pkg, curvature)
    n = pkg.n
    vf = pkg.frame.inverse @ v
    norm2 = float(np.vdot(vf, vf).real)
    ric = curv.riccis[_PAIRINGS.index(pairing)]
    reference = float(np.real(v @ ric @ v.conj()) / (n * norm2))
    Rf = curv.R11_frame
    if mode == "exact":
        vals = _bisectional(Rf, vf, np.eye(n, dtype=complex), pairing).real / norm2
        avg = float(vals.sum() / n)
        return BergerAverage(avg, reference, abs(avg - reference), 0.0)
    rng = np.random.default_rng(seed)
    w = random_unit_vectors(n, samples, rng)
    vals = _bisectional(Rf, vf, w, pairing).real / norm2
    avg = float(vals.mean())
    se = float(vals.std(ddof=1) / np.sqrt(samples))
    return BergerAverage(avg, reference, abs(avg - reference), se)
