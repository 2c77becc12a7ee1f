"""Two-by-two Peirce structure of a halving projection.

A projection ``p`` with ``c(p) = c(1 - p) = 1`` splits every element into four
corners ``x_ij = p_i x p_j`` (``p_1 = p``, ``p_2 = 1 - p``).  This module holds
the corner bookkeeping plus the lemma-level steps of the decomposition:

* :func:`lemma1_witness` -- the explicit element behind the cancellation
  ``x S_12 = 0 => x = 0``;
* :func:`lemma3_normalize` -- the inner correction making ``L(p)`` central;
* :func:`lemma4_check` -- off-diagonal corners are invariant;
* :func:`lemma5_split` -- on diagonal corners ``L = d + z`` with ``z`` central.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg

from .algebra import (
    AlgebraElement,
    StarAlgebra,
    _range_basis,
    block_ranks,
    center_distance,
    central_support,
    from_coords,
    identity,
    norm,
    partial_isometry_between,
    projection_defect,
    adjoint,
)
from .exceptions import FrameError, NotLieDerivationError, PreconditionError
from .linmap import LinearOperatorOnAlgebra, ResidualReport, _report, apply, inner_derivation

__all__ = [
    "PeirceFrame",
    "PeirceSplit",
    "make_frame",
    "peirce_split",
    "corner_residual",
    "in_corner",
    "lemma1_witness",
    "lemma3_normalize",
    "lemma4_check",
    "lemma5_split",
    "lemma5_residual",
    "corner_swap_operator",
]

#: Relative tolerance for corner membership.
CORNER_TOL = 1e-9


class PeirceFrame:
    """Projection ``p1`` and its complement ``p2 = 1 - p1``.

    Use :func:`make_frame` to build a validated frame.
    """

    def __init__(self, p1: AlgebraElement, ranks: list[int]):
        self.p1 = p1
        self.p2 = identity(p1.algebra) - p1
        self.ranks = tuple(ranks)

    @property
    def algebra(self) -> StarAlgebra:
        return self.p1.algebra

    def projection(self, i: int) -> AlgebraElement:
        if i not in (1, 2):
            raise ValueError(f"corner index must be 1 or 2, got {i}")
        return self.p1 if i == 1 else self.p2

    @cached_property
    def compressions(self) -> dict[tuple[int, int], np.ndarray]:
        """Coordinate matrices of ``x -> p_i x p_j``."""
        out = {}
        for i in (1, 2):
            for j in (1, 2):
                P, Q = self.projection(i), self.projection(j)
                # row-major vec(P X Q) = (P kron Q^T) vec(X)
                mats = [np.kron(bp, bq.T) for bp, bq in zip(P.blocks, Q.blocks)]
                out[i, j] = scipy.linalg.block_diag(*mats)
        return out

    def to_dict(self) -> dict:
        return {"ranks": list(self.ranks)}

    def __repr__(self):
        return f"PeirceFrame({list(self.algebra.block_dims)}, ranks={list(self.ranks)})"


@dataclass(frozen=True)
class PeirceSplit:
    x11: AlgebraElement
    x12: AlgebraElement
    x21: AlgebraElement
    x22: AlgebraElement

    def corner(self, i: int, j: int) -> AlgebraElement:
        return {(1, 1): self.x11, (1, 2): self.x12, (2, 1): self.x21, (2, 2): self.x22}[i, j]

    def reconstruct(self) -> AlgebraElement:
        return self.x11 + self.x12 + self.x21 + self.x22


def make_frame(p: AlgebraElement, tol: float = 1e-9) -> PeirceFrame:
    """Validate ``p`` as a halving projection and wrap it in a frame.

    Requires ``p`` to be a projection, ``c(p) = c(1 - p) = 1`` and blockwise
    ``rank p <= rank(1 - p)``.
    """
    if projection_defect(p) > tol * (1.0 + norm(p)):
        raise FrameError("frame projection is not a projection")
    q = identity(p.algebra) - p
    if not all(c == 1.0 for c in central_support(p, tol).coefficients):
        raise FrameError("central support of p is not the unit")
    if not all(c == 1.0 for c in central_support(q, tol).coefficients):
        raise FrameError("central support of 1 - p is not the unit")
    r1, r2 = block_ranks(p, tol), block_ranks(q, tol)
    if any(a > b for a, b in zip(r1, r2)):
        raise FrameError(f"p is not subequivalent to 1 - p (ranks {r1} vs {r2})")
    return PeirceFrame(p, r1)


def peirce_split(x: AlgebraElement, frame: PeirceFrame) -> PeirceSplit:
    p1, p2 = frame.p1, frame.p2
    return PeirceSplit(p1 @ x @ p1, p1 @ x @ p2, p2 @ x @ p1, p2 @ x @ p2)


def corner_residual(x: AlgebraElement, i: int, j: int, frame: PeirceFrame) -> float:
    """``||x - p_i x p_j||``."""
    return norm(x - frame.projection(i) @ x @ frame.projection(j))


def in_corner(x: AlgebraElement, i: int, j: int, frame: PeirceFrame, tol: float = CORNER_TOL) -> bool:
    return corner_residual(x, i, j, frame) <= tol * (1.0 + norm(x))


def _sub_projection(p2: AlgebraElement, ranks) -> AlgebraElement:
    """Leading sub-projection of ``p2`` with the given block ranks."""
    blocks = []
    for b, r2, r in zip(p2.blocks, block_ranks(p2), ranks):
        v = _range_basis(b, r2)[:, :r]
        blocks.append(v @ v.conj().T)
    return AlgebraElement(p2.algebra, blocks)


def lemma1_witness(x: AlgebraElement, frame: PeirceFrame) -> tuple[AlgebraElement, AlgebraElement]:
    """Return ``(y, u)`` with ``y = p1 u* q1 p2`` in ``S_12`` and ``x = x y u``.

    Here ``q1 <= p2`` is the leading sub-projection equivalent to ``p1`` and
    ``u`` the partial isometry with ``u* u = p1``, ``u u* = q1``.  The identity
    needs only ``x p1 = x``, so ``x`` may lie in ``S_11`` or ``S_21``; it shows
    that ``x S_12 = 0`` forces ``x = 0``.
    """
    if norm(x - x @ frame.p1) > CORNER_TOL * (1.0 + norm(x)):
        raise PreconditionError("lemma1_witness needs x = x p1 (x in S_11 or S_21)")
    q1 = _sub_projection(frame.p2, frame.ranks)
    u = partial_isometry_between(frame.p1, q1)
    y = frame.p1 @ adjoint(u) @ q1 @ frame.p2
    return y, u


def lemma3_normalize(
    L: LinearOperatorOnAlgebra, frame: PeirceFrame, tol: float = 1e-9
) -> tuple[AlgebraElement, AlgebraElement, LinearOperatorOnAlgebra]:
    """Write ``L(p1) = [p1, a] + z`` and return ``(a, z, L + D_a)``.

    ``a = x12 - x21`` and ``z = x11 + x22`` from the corners of ``L(p1)``; the
    returned operator maps ``p1`` to the central element ``z``.
    """
    s = peirce_split(apply(L, frame.p1), frame)
    a = s.x12 - s.x21
    z = s.x11 + s.x22
    defect = center_distance(z) / (1.0 + L.norm)
    if defect > tol:
        raise NotLieDerivationError(
            f"diagonal corners of L(p) are not central (defect {defect:.3e})",
            stage="lemma3",
            residual=defect,
        )
    return a, z, L + inner_derivation(a)


def _check_normalized(L1: LinearOperatorOnAlgebra, frame: PeirceFrame, tol: float):
    defect = center_distance(apply(L1, frame.p1)) / (1.0 + L1.norm)
    if defect > tol:
        raise PreconditionError(f"L1(p1) is not central (defect {defect:.3e}); run lemma3_normalize first")


def _column_report(cols: np.ndarray, scale: float, tol: float) -> ResidualReport:
    if cols.size == 0:
        return _report(0.0, None, tol)
    dist = np.linalg.norm(cols, axis=0)
    c = int(np.argmax(dist))
    return _report(dist[c] / scale, (c, c), tol)


def lemma4_check(L1: LinearOperatorOnAlgebra, frame: PeirceFrame, tol: float = 1e-9) -> ResidualReport:
    """Worst leakage ``||L1(x) - p_i L1(x) p_j||`` over spanning sets of ``S_12`` and ``S_21``.

    The spanning sets are the compressions ``p_i e_c p_j`` of all matrix
    units; the witness ``(c, c)`` names the unit.
    """
    _check_normalized(L1, frame, tol)
    P = frame.compressions
    eye = np.eye(L1.algebra.coord_dim)
    worst = _report(0.0, None, tol)
    for ij in ((1, 2), (2, 1)):
        leak = (eye - P[ij]) @ L1.matrix @ P[ij]
        rep = _column_report(leak, 1.0 + L1.norm, tol)
        if rep.max_residual > worst.max_residual:
            worst = rep
    return worst


def _z_recovery_matrix(frame: PeirceFrame, i: int) -> np.ndarray:
    """Coordinates of ``y -> sum_k tr_k(p_j y p_j) / tr_k(p_j) z_k`` (``j != i``)."""
    A = frame.algebra
    j = 2 if i == 1 else 1
    pj = frame.projection(j)
    denom = np.array([np.trace(b).real for b in pj.blocks])
    diag = A.diagonal_coords
    blocks = A.block_of_coord[diag]
    n = A.coord_dim
    T = np.zeros((n, n))
    # row: diagonal unit of block k receives tr_k(.) / tr_k(p_j)
    same = blocks[:, None] == blocks[None, :]
    T[np.ix_(diag, diag)] = same / denom[blocks][:, None]
    return T @ frame.compressions[j, j]


def lemma5_split(
    L1: LinearOperatorOnAlgebra, x: AlgebraElement, i: int, frame: PeirceFrame, tol: float = 1e-9
) -> tuple[AlgebraElement, AlgebraElement]:
    """Split ``L1(x) = d + z`` with ``d`` in ``S_ii`` and ``z`` central, for ``x`` in ``S_ii``.

    ``z`` has block coefficients ``tr_k(p_j L1(x) p_j) / tr_k(p_j)``, ``j != i``.
    """
    if not in_corner(x, i, i, frame):
        raise PreconditionError(f"x does not lie in S_{i}{i}")
    y = apply(L1, x)
    z = from_coords(frame.algebra, _z_recovery_matrix(frame, i) @ y.coords)
    d = y - z
    defect = corner_residual(d, i, i, frame) / ((1.0 + L1.norm) * (1.0 + norm(x)))
    if defect > tol:
        raise NotLieDerivationError(
            f"L1(x) - z leaves S_{i}{i} (defect {defect:.3e})", stage="lemma5", residual=defect
        )
    return d, z


def lemma5_matrices(L1: LinearOperatorOnAlgebra, frame: PeirceFrame) -> dict[int, tuple[np.ndarray, np.ndarray]]:
    """Coordinate matrices of ``x -> d(x_ii)`` and ``x -> z(x_ii)`` for ``i = 1, 2``."""
    out = {}
    for i in (1, 2):
        Pii = frame.compressions[i, i]
        Z = _z_recovery_matrix(frame, i) @ L1.matrix @ Pii
        out[i] = (L1.matrix @ Pii - Z, Z)
    return out


def lemma5_residual(L1: LinearOperatorOnAlgebra, frame: PeirceFrame, tol: float = 1e-9) -> ResidualReport:
    """Worst corner defect of ``d(p_i e_c p_i)`` over all units ``e_c`` and ``i = 1, 2``."""
    n = L1.algebra.coord_dim
    eye = np.eye(n)
    worst = _report(0.0, None, tol)
    for i, (dmat, _) in lemma5_matrices(L1, frame).items():
        leak = (eye - frame.compressions[i, i]) @ dmat
        rep = _column_report(leak, 1.0 + L1.norm, tol)
        if rep.max_residual > worst.max_residual:
            worst = rep
    return worst


def corner_swap_operator(frame: PeirceFrame) -> LinearOperatorOnAlgebra:
    """Deliberately corrupted map: transpose the off-diagonal corners, kill the rest.

    For a diagonal frame it swaps ``S_12`` and ``S_21`` while sending ``p1`` to
    0, so it passes the normalization step and must be caught by
    :func:`lemma4_check`.
    """
    A = frame.algebra
    n = A.coord_dim
    # transpose of matrix units inside each block
    perm = np.array([A.coord(k, j, i) for k, i, j in A.unit_index])
    T = np.eye(n)[perm]
    P = frame.compressions
    return LinearOperatorOnAlgebra(A, T @ (P[1, 2] + P[2, 1]))
