"""Labeled complex tensors, Hermitian inverses and canonical unitary frames.

Index conventions
-----------------
A metric value is stored as the matrix ``G[i, j] = g_{i jbar}``.  Hermitian
means ``G[j, i] = conj(G[i, j])``.  The inverse metric tensor ``g^{k lbar}``
is characterised by ``sum_l g^{k lbar} g_{j lbar} = delta_kj``; as a matrix
indexed ``[k, l]`` it equals ``inv(G).T``.

A frame is a matrix ``E`` whose columns are ``e_a = sum_i E[i, a] d/dz_i``.
It is unitary when ``g(e_a, conj(e_b)) = delta_ab``, i.e.
``E.T @ G @ conj(E) = I`` (equivalently ``E^H conj(G) E = I``; for a real
metric this is the familiar ``E^H G E = I``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import solve_triangular

from .errors import IncompatibleIndices, SingularMetric

HOL_UP = "hol-up"
HOL_DOWN = "hol-down"
ANTI_DOWN = "antihol-down"
ANTI_UP = "antihol-up"
LABELS = (HOL_UP, HOL_DOWN, ANTI_DOWN, ANTI_UP)

COORDINATE = "coordinate"
UNITARY = "unitary"

_DUAL = {HOL_UP: HOL_DOWN, HOL_DOWN: HOL_UP, ANTI_UP: ANTI_DOWN, ANTI_DOWN: ANTI_UP}
# contracting a lower index against the metric turns its type over
_LOWER_PARTNER = {HOL_DOWN: ANTI_DOWN, ANTI_DOWN: HOL_DOWN}
_LETTERS = "abcdefghijklmnopqrstuvwxyz"


@dataclass(frozen=True)
class LabeledTensor:
    """Dense complex tensor with one variance label per index."""

    n: int
    labels: tuple
    data: np.ndarray
    frame: str = COORDINATE

    def __post_init__(self):
        labels = tuple(self.labels)
        for lab in labels:
            if lab not in LABELS:
                raise IncompatibleIndices(f"unknown index label {lab!r}")
        if self.frame not in (COORDINATE, UNITARY):
            raise IncompatibleIndices(f"unknown frame {self.frame!r}")
        data = np.array(self.data, dtype=complex)
        if data.shape != (self.n,) * len(labels):
            raise IncompatibleIndices(
                f"data shape {data.shape} does not match n={self.n}, rank={len(labels)}"
            )
        data.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "data", data)

    @property
    def rank(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class HermitianMatrix:
    """Conjugate-symmetric matrix ``entries[i, j] = h_{i jbar}``."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise IncompatibleIndices(f"not a square matrix: shape {m.shape}")
        scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
        if np.max(np.abs(m - m.conj().T), initial=0.0) > 1e-12 * scale:
            raise IncompatibleIndices("matrix is not conjugate-symmetric")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class FrameMatrix:
    """Columns are frame vectors in coordinate components."""

    columns: np.ndarray

    def __post_init__(self):
        m = np.array(self.columns, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "columns", m)

    @property
    def n(self) -> int:
        return self.columns.shape[0]

    @property
    def inverse(self) -> np.ndarray:
        return np.linalg.inv(self.columns)


def _as_matrix(g) -> np.ndarray:
    if isinstance(g, HermitianMatrix):
        return g.entries
    return np.asarray(g, dtype=complex)


def hermitian_inverse(g) -> HermitianMatrix:
    """Matrix inverse of a positive-definite Hermitian matrix.

    The factorization doubles as the positivity test.  The returned matrix
    ``Ginv`` satisfies ``G @ Ginv = I``; the inverse metric tensor is
    ``g^{k lbar} = Ginv[l, k]``.
    """
    m = _as_matrix(g)
    try:
        chol = np.linalg.cholesky(m)
    except np.linalg.LinAlgError as exc:
        raise SingularMetric("metric is not positive-definite") from exc
    n = m.shape[0]
    linv = solve_triangular(chol, np.eye(n), lower=True)
    inv = linv.conj().T @ linv
    return HermitianMatrix(0.5 * (inv + inv.conj().T))


def inverse_metric_tensor(g) -> np.ndarray:
    """``H[k, l] = g^{k lbar}``."""
    return hermitian_inverse(g).entries.T.copy()


def unitary_frame(g) -> FrameMatrix:
    """Canonical unitary frame: lower-triangular with positive diagonal.

    Writing ``G = U U^H`` with ``U`` upper-triangular (a Cholesky
    factorization taken in reversed index order), the frame is
    ``E = inv(U).T``.
    """
    m = _as_matrix(g)
    n = m.shape[0]
    rev = m[::-1, ::-1]
    try:
        low = np.linalg.cholesky(rev)
    except np.linalg.LinAlgError as exc:
        raise SingularMetric("metric is not positive-definite") from exc
    upper = low[::-1, ::-1]
    uinv = solve_triangular(upper, np.eye(n, dtype=complex), lower=False)
    return FrameMatrix(np.tril(uinv.T))


def frame_residual(g, frame: FrameMatrix) -> float:
    """Max deviation of ``g(e_a, conj(e_b))`` from the identity."""
    e = frame.columns
    m = _as_matrix(g)
    return float(np.max(np.abs(e.T @ m @ e.conj() - np.eye(m.shape[0]))))


def _check_pos(t: LabeledTensor, pos: int) -> int:
    if not -t.rank <= pos < t.rank:
        raise IncompatibleIndices(f"index position {pos} out of range for rank {t.rank}")
    return pos % t.rank


def contract(t: LabeledTensor, a: int, b: int, metric: LabeledTensor | None = None) -> LabeledTensor:
    """Trace over index positions ``a`` and ``b``.

    Without ``metric`` the two labels must be a dual pair.  With ``metric``
    a mixed-variance trace is formed: two lower indices of opposite type are
    contracted against an inverse metric labeled (hol-up, antihol-up), two
    upper indices against a metric labeled (hol-down, antihol-down).
    """
    a, b = _check_pos(t, a), _check_pos(t, b)
    if a == b:
        raise IncompatibleIndices("cannot contract an index with itself")
    la, lb = t.labels[a], t.labels[b]
    keep = [k for k in range(t.rank) if k not in (a, b)]
    letters = list(_LETTERS[: t.rank])
    out = "".join(letters[k] for k in keep)
    new_labels = tuple(t.labels[k] for k in keep)
    if metric is None:
        if _DUAL[la] != lb:
            raise IncompatibleIndices(f"labels {la} and {lb} are not a dual pair")
        letters[b] = letters[a]
        spec = "".join(letters) + "->" + out
        return LabeledTensor(t.n, new_labels, np.einsum(spec, t.data), t.frame)
    if metric.n != t.n or metric.rank != 2:
        raise IncompatibleIndices("metric factor must be a rank-2 tensor of matching size")
    if metric.frame != t.frame:
        raise IncompatibleIndices("metric factor and tensor are in different frames")
    want = {HOL_DOWN: HOL_UP, ANTI_DOWN: ANTI_UP, HOL_UP: HOL_DOWN, ANTI_UP: ANTI_DOWN}
    pair = (want[la], want[lb])
    if {la, lb} not in ({HOL_DOWN, ANTI_DOWN}, {HOL_UP, ANTI_UP}):
        raise IncompatibleIndices(f"metric contraction needs opposite-type indices, got {la}, {lb}")
    if metric.labels == pair:
        mdata = metric.data
    elif metric.labels == pair[::-1]:
        mdata = metric.data.T
    else:
        raise IncompatibleIndices(f"metric labels {metric.labels} do not match {pair}")
    ma, mb = letters[a], letters[b]
    spec = "".join(letters) + f",{ma}{mb}->" + out
    return LabeledTensor(t.n, new_labels, np.einsum(spec, t.data, mdata), t.frame)


def change_variance(t: LabeledTensor, pos: int, metric: LabeledTensor) -> LabeledTensor:
    """Raise or lower one index with ``g_{i jbar}`` or ``g^{i jbar}``.

    Lowering a hol-up index yields an antihol-down one (``T_{lbar} =
    g_{k lbar} T^k``); raising reverses this.
    """
    pos = _check_pos(t, pos)
    lab = t.labels[pos]
    if lab in (HOL_UP, ANTI_UP):
        need = (HOL_DOWN, ANTI_DOWN)
        new = ANTI_DOWN if lab == HOL_UP else HOL_DOWN
    else:
        need = (HOL_UP, ANTI_UP)
        new = ANTI_UP if lab == HOL_DOWN else HOL_UP
    if metric.labels != need or metric.n != t.n or metric.frame != t.frame:
        raise IncompatibleIndices(f"metric labeled {metric.labels} cannot move a {lab} index")
    m = metric.data if lab in (HOL_UP, HOL_DOWN) else metric.data.T
    moved = np.moveaxis(np.tensordot(t.data, m, axes=([pos], [0])), -1, pos)
    labels = list(t.labels)
    labels[pos] = new
    return LabeledTensor(t.n, tuple(labels), moved, t.frame)


def _transform(t: LabeledTensor, mats: dict, frame: str) -> LabeledTensor:
    data = t.data
    for pos, lab in enumerate(t.labels):
        data = np.moveaxis(np.tensordot(data, mats[lab], axes=([pos], [0])), -1, pos)
    return LabeledTensor(t.n, t.labels, data, frame)


def to_unitary_frame(t: LabeledTensor, frame: FrameMatrix) -> LabeledTensor:
    """Express a coordinate-frame tensor in the frame ``E``."""
    if t.frame != COORDINATE:
        raise IncompatibleIndices("tensor is not in the coordinate frame")
    if frame.n != t.n:
        raise IncompatibleIndices("frame size does not match tensor")
    e = frame.columns
    einv = frame.inverse
    mats = {HOL_DOWN: e, ANTI_DOWN: e.conj(), HOL_UP: einv.T, ANTI_UP: einv.conj().T}
    return _transform(t, mats, UNITARY)


def to_coordinate_frame(t: LabeledTensor, frame: FrameMatrix) -> LabeledTensor:
    """Inverse of :func:`to_unitary_frame`."""
    if t.frame != UNITARY:
        raise IncompatibleIndices("tensor is not in a unitary frame")
    if frame.n != t.n:
        raise IncompatibleIndices("frame size does not match tensor")
    e = frame.columns
    einv = frame.inverse
    mats = {HOL_DOWN: einv, ANTI_DOWN: einv.conj(), HOL_UP: e.T, ANTI_UP: e.conj().T}
    return _transform(t, mats, COORDINATE)


def metric_tensor(g) -> LabeledTensor:
    m = _as_matrix(g)
    return LabeledTensor(m.shape[0], (HOL_DOWN, ANTI_DOWN), m)


def inverse_metric(g) -> LabeledTensor:
    m = _as_matrix(g)
    return LabeledTensor(m.shape[0], (HOL_UP, ANTI_UP), inverse_metric_tensor(m))


def labeled(data, labels: Sequence[str], frame: str = COORDINATE) -> LabeledTensor:
    data = np.asarray(data, dtype=complex)
    return LabeledTensor(data.shape[0] if data.ndim else 1, tuple(labels), data, frame)
