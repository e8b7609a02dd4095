"""Chern connection data at a point.

Array layouts (coordinate frame unless the name says otherwise)::

    gamma[k, i, j]        Gamma^k_{ij} = g^{k lbar} d_i g_{j lbar}
    torsion[k, i, j]      T^k_{ij} = Gamma^k_{ij} - Gamma^k_{ji}
    nabla_t_hol[l, i, k, j]   T^l_{ik,j}
    nabla_t_anti[k, i, j, l]  T^k_{ij,lbar}
    R[i, j, k, l]         R_{i jbar k lbar}
    ricci*[a, b]          component matrices of (1,1)-forms, entry (a, bbar)

``H[k, l] = g^{k lbar}`` denotes the inverse metric tensor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IncompatibleIndices
from .jets import MetricField, MetricJet, evaluate_jet, numeric_field_derivative
from .tensorcore import (
    ANTI_DOWN,
    HOL_DOWN,
    HOL_UP,
    UNITARY,
    FrameMatrix,
    LabeledTensor,
    contract,
    inverse_metric,
    inverse_metric_tensor,
    to_coordinate_frame,
    to_unitary_frame,
    unitary_frame,
)

# Sign/normalization of the (2,2) -> (1,1) contraction.  With
#   M_{b dbar} = g^{a cbar} (d_a d_cbar g_{b dbar} - d_a d_dbar g_{b cbar}
#                            - d_b d_cbar g_{a dbar} + d_b d_dbar g_{a cbar}),
# the component matrix of sqrt(-1) Lambda(d dbar omega) is LAMBDA_CONVENTION * M.
# Fixed by calibrate_lambda_convention on random metrics; see the regression test.
LAMBDA_CONVENTION = 1.0

RICCI_LABELS = (HOL_DOWN, ANTI_DOWN)
CURVATURE_LABELS = (HOL_DOWN, ANTI_DOWN, HOL_DOWN, ANTI_DOWN)
TORSION_LABELS = (HOL_UP, HOL_DOWN, HOL_DOWN)


def _require(jet: MetricJet, order: int) -> None:
    if jet.order < order:
        raise IncompatibleIndices(f"need a jet of order >= {order}, got {jet.order}")


def inverse_metric_derivative(jet: MetricJet, H: np.ndarray | None = None) -> np.ndarray:
    """``dH[a, k, l] = d_a g^{k lbar}`` for all 2n Wirtinger directions."""
    _require(jet, 1)
    H = inverse_metric_tensor(jet.g) if H is None else H
    return -np.einsum("ka,xba,bl->xkl", H, jet.d1, H)


def chern_connection(jet: MetricJet) -> np.ndarray:
    _require(jet, 1)
    n = jet.n
    H = inverse_metric_tensor(jet.g)
    return np.einsum("kl,ijl->kij", H, jet.d1[:n])


def lowered_torsion(jet: MetricJet) -> np.ndarray:
    """``T_{i j lbar} = d_i g_{j lbar} - d_j g_{i lbar}``; needs no inverse."""
    _require(jet, 1)
    d = jet.d1[: jet.n]
    return d - np.transpose(d, (1, 0, 2))


def chern_torsion(jet: MetricJet, frame: FrameMatrix | None = None):
    """``(T_coord, T_frame)`` with ``T[k, i, j] = T^k_{ij}``."""
    gam = chern_connection(jet)
    tc = gam - np.transpose(gam, (0, 2, 1))
    frame = unitary_frame(jet.g) if frame is None else frame
    tf = to_unitary_frame(LabeledTensor(jet.n, TORSION_LABELS, tc), frame).data
    return tc, np.array(tf)


def christoffel_derivative(jet: MetricJet) -> np.ndarray:
    """``dGam[a, k, i, j] = d_a Gamma^k_{ij}`` for all 2n directions."""
    _require(jet, 2)
    n = jet.n
    H = inverse_metric_tensor(jet.g)
    dH = inverse_metric_derivative(jet, H)
    return np.einsum("akl,ijl->akij", dH, jet.d1[:n]) + np.einsum("kl,aijl->akij", H, jet.d2[:, :n])


def torsion_covariant_derivative(jet: MetricJet):
    """Chern covariant derivatives of the torsion, coordinate frame.

    Returns ``(nabla_t_hol[l, i, k, j] = T^l_{ik,j}, nabla_t_anti[k, i, j, l]
    = T^k_{ij,lbar})``.  In antiholomorphic directions the Chern connection
    acts trivially on (1,0) indices, so the second is a plain derivative.
    """
    n = jet.n
    gam = chern_connection(jet)
    tc = gam - np.transpose(gam, (0, 2, 1))
    dgam = christoffel_derivative(jet)
    dt = dgam - np.transpose(dgam, (0, 1, 3, 2))
    hol = (
        dt[:n]
        + np.einsum("lpq,qik->plik", gam, tc)
        - np.einsum("qpi,lqk->plik", gam, tc)
        - np.einsum("qpk,liq->plik", gam, tc)
    )
    nabla_hol = np.transpose(hol, (1, 2, 3, 0))
    nabla_anti = np.transpose(dt[n:], (1, 2, 3, 0))
    return nabla_hol, nabla_anti


def chern_curvature(jet: MetricJet) -> np.ndarray:
    _require(jet, 2)
    n = jet.n
    H = inverse_metric_tensor(jet.g)
    mixed = jet.d2[:n, n:]  # [i, j] = d_i d_jbar
    return -mixed + np.einsum("pq,ikq,jpl->ijkl", H, jet.d1[:n], jet.d1[n:])


def ricci_traces(R: np.ndarray, g: np.ndarray):
    """The four metric traces of a (1,1) curvature tensor ``R[i, j, k, l]``."""
    n = g.shape[0]
    rt = LabeledTensor(n, CURVATURE_LABELS, R)
    ginv = inverse_metric(g)
    ric1 = contract(rt, 2, 3, ginv).data
    ric2 = contract(rt, 0, 1, ginv).data
    ric3 = contract(rt, 2, 1, ginv).data
    ric4 = contract(rt, 0, 3, ginv).data.T
    return tuple(np.array(r) for r in (ric1, ric2, ric3, ric4))


def metric_trace(form: np.ndarray, g: np.ndarray) -> complex:
    """``g^{i jbar} form_{i jbar}``."""
    return complex(np.sum(inverse_metric_tensor(g) * form))


def torsion_quadratics(t_frame) -> dict:
    """Quadratic torsion invariants from the unitary-frame torsion ``T^k_{ij}``."""
    if isinstance(t_frame, LabeledTensor):
        if t_frame.frame != UNITARY:
            raise IncompatibleIndices("torsion_quadratics needs unitary-frame torsion")
        t_frame = t_frame.data
    T = np.asarray(t_frame)
    trace_first = np.einsum("kkq->q", T)  # sum_k T^k_{kq}
    tau = np.einsum("kik->i", T)
    return {
        "t_diamond": np.einsum("kiq,kjq->ij", T, T.conj()),
        "t_circle": np.einsum("jsp,isp->ij", T, T.conj()),
        "t_heart": np.einsum("jiq,q->ij", T, trace_first.conj()),
        "tau": tau,
        "normT2": float(np.sum(np.abs(T) ** 2)),
        "normTau2": float(np.sum(np.abs(tau) ** 2)),
    }


def real_three_form(c21: np.ndarray) -> np.ndarray:
    """Full antisymmetric array of a real 3-form from its (2,1) components.

    ``c21[i, j, k]`` is the value on ``(d_i, d_j, d_kbar)``; the (1,2) part
    is its conjugate.  Indices run over ``(d_1..d_n, d_1bar..d_nbar)``.
    """
    n = c21.shape[0]
    x = np.zeros((2 * n,) * 3, dtype=complex)
    x[:n, :n, n:] = c21
    x[n:, n:, :n] = c21.conj()
    perms = {(0, 1, 2): 1, (1, 2, 0): 1, (2, 0, 1): 1, (1, 0, 2): -1, (0, 2, 1): -1, (2, 1, 0): -1}
    return 0.5 * sum(s * np.transpose(x, p) for p, s in perms.items())


def omega_derivative_forms(jet: MetricJet) -> dict:
    """Derivative forms of ``omega = i g_{k lbar} dz^k ^ dzbar^l``.

    Three-forms are full antisymmetric arrays on the complexified coordinate
    basis, evaluated with the determinant convention.  ``ddbar_omega[a, b, c,
    d]`` is the value of the (2,2)-form on ``(d_a, d_b, d_cbar, d_dbar)``.
    """
    _require(jet, 2)
    n = jet.n
    tl = lowered_torsion(jet)
    d_omega = real_three_form(1j * tl)
    dc_omega = real_three_form(tl)
    m = jet.d2[:n, n:]  # m[a, c, b, d] = d_a d_cbar g_{b dbar}
    bracket = (
        np.einsum("acbd->abcd", m)
        - np.einsum("adbc->abcd", m)
        - np.einsum("bcad->abcd", m)
        + np.einsum("bdac->abcd", m)
    )
    ddbar = -1j * bracket
    H = inverse_metric_tensor(jet.g)
    lam = LAMBDA_CONVENTION * np.einsum("ac,abcd->bd", H, bracket)
    return {"d_omega": d_omega, "dc_omega": dc_omega, "ddbar_omega": ddbar, "lambda_ddbar_omega": lam}


def frame_form(form: np.ndarray, frame: FrameMatrix) -> np.ndarray:
    """Coordinate (1,1)-form components to the unitary frame."""
    return np.array(to_unitary_frame(LabeledTensor(form.shape[0], RICCI_LABELS, form), frame).data)


def coordinate_form(form: np.ndarray, frame: FrameMatrix) -> np.ndarray:
    lt = LabeledTensor(form.shape[0], RICCI_LABELS, form, UNITARY)
    return np.array(to_coordinate_frame(lt, frame).data)


@dataclass(frozen=True)
class CurvaturePackage:
    point: np.ndarray
    n: int
    jet: MetricJet
    g: np.ndarray
    g_inv: np.ndarray  # H[k, l] = g^{k lbar}
    frame: FrameMatrix
    gamma: np.ndarray
    torsion_coord: np.ndarray
    torsion_frame: np.ndarray
    nabla_t_hol: np.ndarray
    nabla_t_anti: np.ndarray
    nabla_t_hol_frame: np.ndarray
    nabla_t_anti_frame: np.ndarray
    R: np.ndarray
    R_frame: np.ndarray
    ricci1: np.ndarray
    ricci2: np.ndarray
    ricci3: np.ndarray
    ricci4: np.ndarray
    scal: float
    scal_tilde: float
    tau: np.ndarray
    normT2: float
    normTau2: float
    t_diamond: np.ndarray
    t_circle: np.ndarray
    t_heart: np.ndarray
    d_omega: np.ndarray
    dc_omega: np.ndarray
    ddbar_omega: np.ndarray
    lambda_ddbar_omega: np.ndarray
    P: np.ndarray
    Q: np.ndarray

    def ricci_frame(self, which: int) -> np.ndarray:
        return frame_form((self.ricci1, self.ricci2, self.ricci3, self.ricci4)[which - 1], self.frame)

    @property
    def riccis(self) -> tuple:
        return (self.ricci1, self.ricci2, self.ricci3, self.ricci4)


def package_from_jet(jet: MetricJet) -> CurvaturePackage:
    """Assemble every Chern quantity from an order >= 2 jet."""
    _require(jet, 2)
    n = jet.n
    g = jet.g
    H = inverse_metric_tensor(g)
    frame = unitary_frame(g)
    gam = chern_connection(jet)
    tc, tf = chern_torsion(jet, frame)
    nh, na = torsion_covariant_derivative(jet)
    nh_f = to_unitary_frame(LabeledTensor(n, (HOL_UP, HOL_DOWN, HOL_DOWN, HOL_DOWN), nh), frame).data
    na_f = to_unitary_frame(LabeledTensor(n, (HOL_UP, HOL_DOWN, HOL_DOWN, ANTI_DOWN), na), frame).data
    R = chern_curvature(jet)
    R_f = to_unitary_frame(LabeledTensor(n, CURVATURE_LABELS, R), frame).data
    r1, r2, r3, r4 = ricci_traces(R, g)
    quad = torsion_quadratics(tf)
    forms = omega_derivative_forms(jet)
    return CurvaturePackage(
        point=jet.point,
        n=n,
        jet=jet,
        g=g,
        g_inv=H,
        frame=frame,
        gamma=gam,
        torsion_coord=tc,
        torsion_frame=tf,
        nabla_t_hol=nh,
        nabla_t_anti=na,
        nabla_t_hol_frame=np.array(nh_f),
        nabla_t_anti_frame=np.array(na_f),
        R=R,
        R_frame=np.array(R_f),
        ricci1=r1,
        ricci2=r2,
        ricci3=r3,
        ricci4=r4,
        scal=float(metric_trace(r1, g).real),
        scal_tilde=float(metric_trace(r3, g).real),
        tau=quad["tau"],
        normT2=quad["normT2"],
        normTau2=quad["normTau2"],
        t_diamond=quad["t_diamond"],
        t_circle=quad["t_circle"],
        t_heart=quad["t_heart"],
        d_omega=forms["d_omega"],
        dc_omega=forms["dc_omega"],
        ddbar_omega=forms["ddbar_omega"],
        lambda_ddbar_omega=forms["lambda_ddbar_omega"],
        P=r1 - r3,
        Q=r1 - r4,
    )


def chern_package(field: MetricField, point, order: int = 2) -> CurvaturePackage:
    return package_from_jet(evaluate_jet(field, point, max(2, order)))


# -- diagnostics ----------------------------------------------------------------


def hermitian_residual(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T)))


def curvature_symmetry_residual(R: np.ndarray) -> float:
    """``max |R_{i jbar k lbar} - conj(R_{j ibar l kbar})|``."""
    return float(np.max(np.abs(R - np.transpose(R, (1, 0, 3, 2)).conj())))


def scalar_trace_residuals(pkg: CurvaturePackage) -> tuple:
    """(|tr Ric1 - tr Ric2|, |tr Ric3 - tr Ric4|)."""
    t = [metric_trace(r, pkg.g) for r in pkg.riccis]
    return abs(t[0] - t[1]), abs(t[2] - t[3])


def bianchi_residual(pkg: CurvaturePackage) -> float:
    """``max |T^k_{ji,lbar} - (R_{i lbar j}^k - R_{j lbar i}^k)|``."""
    rup = np.einsum("iljm,km->iljk", pkg.R, pkg.g_inv)
    lhs = np.transpose(pkg.nabla_t_anti, (0, 1, 2, 3))  # [k, j, i, l]
    rhs = np.einsum("iljk->kjil", rup) - np.einsum("jlik->kjil", rup)
    return float(np.max(np.abs(lhs - rhs)))


def _quadratic_term(pkg: CurvaturePackage, torsion_form: str) -> np.ndarray:
    if torsion_form not in ("diamond", "circle"):
        raise ValueError(f"torsion_form must be 'diamond' or 'circle', got {torsion_form!r}")
    quad = pkg.t_diamond if torsion_form == "diamond" else pkg.t_circle
    return coordinate_form(quad, pkg.frame)


def liu_yang_residual(pkg: CurvaturePackage, torsion_form: str = "diamond") -> float:
    """Residual of Ric2 = Ric1 - sqrt(-1) Lambda(d dbar omega) - (P + Q) + X.

    ``X`` is the torsion (1,1)-form named by ``torsion_form``.  The identity
    holds exactly with ``"diamond"``; ``"circle"`` is kept so the other
    reading can be evaluated and reported.
    """
    quad = _quadratic_term(pkg, torsion_form)
    res = pkg.ricci2 - (pkg.ricci1 - pkg.lambda_ddbar_omega - (pkg.P + pkg.Q) + quad)
    return float(np.max(np.abs(res)))


def calibrate_lambda_convention(packages, torsion_form: str = "diamond") -> tuple:
    """Least-squares factor kappa with Ric1 - Ric2 - (P+Q) + X = kappa * M.

    ``M`` is the raw contraction defined next to LAMBDA_CONVENTION.  Returns
    ``(kappa, worst residual after fitting)``.
    """
    xs, ms = [], []
    for pkg in packages:
        quad = _quadratic_term(pkg, torsion_form)
        xs.append((pkg.ricci1 - pkg.ricci2 - (pkg.P + pkg.Q) + quad).ravel())
        ms.append((pkg.lambda_ddbar_omega / LAMBDA_CONVENTION).ravel())
    x = np.concatenate(xs)
    m = np.concatenate(ms)
    kappa = float(np.real(np.vdot(m, x)) / np.real(np.vdot(m, m)))
    return kappa, float(np.max(np.abs(x - kappa * m)))


def ricci1_derivative(jet: MetricJet) -> np.ndarray:
    """Exact ``d_a Ric1_{i jbar}`` for all 2n directions from an order-3 jet."""
    _require(jet, 3)
    n = jet.n
    H = inverse_metric_tensor(jet.g)
    dH = inverse_metric_derivative(jet, H)
    d1h, d1a = jet.d1[:n], jet.d1[n:]
    d2h = jet.d2[:, :n]  # [a, i, ...] = d_a d_i
    d2a = jet.d2[:, n:]  # [a, j, ...] = d_a d_jbar
    R = chern_curvature(jet)
    dR = (
        -jet.d3[:, :n, n:]
        + np.einsum("apq,ikq,jpl->aijkl", dH, d1h, d1a)
        + np.einsum("pq,aikq,jpl->aijkl", H, d2h, d1a)
        + np.einsum("pq,ikq,ajpl->aijkl", H, d1h, d2a)
    )
    return np.einsum("akl,ijkl->aij", dH, R) + np.einsum("kl,aijkl->aij", H, dR)


def form_exterior_derivative(dform: np.ndarray) -> float:
    """Largest component of d of a (1,1)-form from its Wirtinger derivatives.

    ``dform[a, i, j] = d_a rho_{i jbar}``; the (2,1) part is ``d_p rho_{i jbar}
    - d_i rho_{p jbar}`` and the (1,2) part ``d_qbar rho_{i jbar} - d_jbar
    rho_{i qbar}``.
    """
    n = dform.shape[1]
    hol = dform[:n]
    anti = dform[n:]
    p21 = hol - np.transpose(hol, (1, 0, 2))
    p12 = anti - np.transpose(anti, (2, 1, 0))
    return float(max(np.max(np.abs(p21)), np.max(np.abs(p12))))


def ricci_field(field: MetricField, which: int = 1):
    """Callable ``z -> Chern Ric^(which)`` (coordinate components)."""

    def f(z):
        return chern_package(field, z).riccis[which - 1]

    return f


CLOSEDNESS_STEP = 1e-5


def numeric_ricci_closedness(field: MetricField, point, step: float | None = None) -> float:
    """Largest component of d(Chern Ric1) by central differences of the Ric1 field.

    Ric1 already holds second derivatives of g, so it varies on the scale
    |z| for the conformally flat models; the default step is
    ``1e-5 * max(|z|, 0.1)``.
    """
    if step is None:
        step = CLOSEDNESS_STEP * max(float(np.linalg.norm(np.asarray(point))), 0.1)
    return form_exterior_derivative(numeric_field_derivative(ricci_field(field, 1), point, step))
