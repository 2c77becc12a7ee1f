"""Complex-linear maps on a finite-dimensional *-algebra.

A map ``L: A -> A`` is stored as a dense ``coord_dim x coord_dim`` matrix acting
on matrix-unit coordinates.  The residual functions check the three defining
identities (Lie derivation, associative derivation, center-valued trace) on
every pair of matrix units, which by bilinearity controls them on all of
``A x A``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from . import _kernels
from .algebra import (
    AlgebraElement,
    CentralDescriptor,
    StarAlgebra,
    center_basis,
    commutator,
    from_coords,
    make_algebra,
    norm,
)
from .exceptions import AlgebraMismatchError, InvalidSpecError, NotInnerError

__all__ = [
    "LinearOperatorOnAlgebra",
    "ResidualReport",
    "LieSample",
    "zero_operator",
    "identity_operator",
    "apply",
    "lie_residual",
    "leibniz_residual",
    "trace_residual",
    "inner_derivation",
    "inner_derivation_matrix",
    "trace_from_weights",
    "trace_weights",
    "lie_derivation_space",
    "nullspace",
    "sample_lie_derivation",
    "solve_inner",
    "trace_free",
    "verify_identity_3_2",
    "central_multiplication",
]

#: Singular values below ``NULLSPACE_RTOL * s_max`` count as zero.
NULLSPACE_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class LinearOperatorOnAlgebra:
    """Linear map ``A -> A`` in matrix-unit coordinates."""

    algebra: StarAlgebra
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=np.complex128)
        dim = self.algebra.coord_dim
        if mat.shape != (dim, dim):
            raise AlgebraMismatchError(f"operator matrix of shape {mat.shape}, expected ({dim}, {dim})")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    def __call__(self, x: AlgebraElement) -> AlgebraElement:
        return apply(self, x)

    def _check(self, other):
        if not isinstance(other, LinearOperatorOnAlgebra) or other.algebra != self.algebra:
            raise AlgebraMismatchError("operators act on different algebras")

    def __add__(self, other):
        self._check(other)
        return LinearOperatorOnAlgebra(self.algebra, self.matrix + other.matrix)

    def __sub__(self, other):
        self._check(other)
        return LinearOperatorOnAlgebra(self.algebra, self.matrix - other.matrix)

    def __neg__(self):
        return LinearOperatorOnAlgebra(self.algebra, -self.matrix)

    def __mul__(self, c):
        return LinearOperatorOnAlgebra(self.algebra, c * self.matrix)

    __rmul__ = __mul__

    def __matmul__(self, other):
        """Composition ``(self @ other)(x) = self(other(x))``."""
        self._check(other)
        return LinearOperatorOnAlgebra(self.algebra, self.matrix @ other.matrix)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix))


@dataclass(frozen=True)
class ResidualReport:
    max_residual: float
    witness: Optional[tuple[int, int]]
    passed: bool
    tolerance: float

    def __bool__(self):
        return self.passed

    def to_dict(self) -> dict:
        return {
            "max_residual": self.max_residual,
            "witness": None if self.witness is None else list(self.witness),
            "passed": self.passed,
            "tolerance": self.tolerance,
        }


def _report(value: float, witness, tol: float) -> ResidualReport:
    return ResidualReport(float(value), witness, bool(value <= tol), float(tol))


def _argmax_report(defects: np.ndarray, scale: float, tol: float) -> ResidualReport:
    if defects.size == 0:
        return _report(0.0, None, tol)
    a, b = np.unravel_index(int(np.argmax(defects)), defects.shape)
    return _report(defects[a, b] / scale, (int(a), int(b)), tol)


def zero_operator(A: StarAlgebra) -> LinearOperatorOnAlgebra:
    return LinearOperatorOnAlgebra(A, np.zeros((A.coord_dim, A.coord_dim)))


def identity_operator(A: StarAlgebra) -> LinearOperatorOnAlgebra:
    return LinearOperatorOnAlgebra(A, np.eye(A.coord_dim))


def apply(L: LinearOperatorOnAlgebra, x: AlgebraElement) -> AlgebraElement:
    if x.algebra != L.algebra:
        raise AlgebraMismatchError(f"operator on {L.algebra} applied to element of {x.algebra}")
    return from_coords(L.algebra, L.matrix @ x.coords)


def lie_residual(L: LinearOperatorOnAlgebra, tol: float = 1e-9) -> ResidualReport:
    """Worst ``||L([e_a,e_b]) - [L e_a, e_b] - [e_a, L e_b]|| / (1 + ||L||)``."""
    d = _kernels.pair_defects(L.matrix, L.algebra.product_table, True)
    return _argmax_report(d, 1.0 + L.norm, tol)


def leibniz_residual(D: LinearOperatorOnAlgebra, tol: float = 1e-9) -> ResidualReport:
    """Worst ``||D(e_a e_b) - D(e_a) e_b - e_a D(e_b)|| / (1 + ||D||)``."""
    d = _kernels.pair_defects(D.matrix, D.algebra.product_table, False)
    return _argmax_report(d, 1.0 + D.norm, tol)


def _center_projector(A: StarAlgebra) -> np.ndarray:
    """Orthogonal projector onto ``Z(A)`` in coordinates."""
    P = np.zeros((A.coord_dim, A.coord_dim))
    diag = A.diagonal_coords
    blocks = A.block_of_coord[diag]
    same = blocks[:, None] == blocks[None, :]
    dims = np.array(A.block_dims, dtype=float)[blocks]
    P[np.ix_(diag, diag)] = same / dims[:, None]
    return P


def trace_residual(E: LinearOperatorOnAlgebra, tol: float = 1e-9) -> ResidualReport:
    """Worst of the tracial defect ``||E(e_a e_b) - E(e_b e_a)||`` and the
    distance of ``E(e_a)`` from the center, both divided by ``1 + ||E||``.

    A centrality witness is reported as the pair ``(a, a)``.
    """
    A = E.algebra
    scale = 1.0 + E.norm
    comm = _argmax_report(_kernels.commutator_defects(E.matrix, A.product_table), scale, tol)
    off_center = E.matrix - _center_projector(A) @ E.matrix
    dist = np.linalg.norm(off_center, axis=0)
    a = int(np.argmax(dist))
    central = _report(dist[a] / scale, (a, a), tol)
    return comm if comm.max_residual >= central.max_residual else central


def inner_derivation_matrix(A: StarAlgebra) -> np.ndarray:
    """``(coord_dim^2, coord_dim)`` matrix sending coords of ``a`` to ``vec(D_a)``."""
    return _inner_matrix(A.block_dims).copy()


@lru_cache(maxsize=64)
def _inner_matrix(block_dims: tuple[int, ...]) -> np.ndarray:
    A = make_algebra(block_dims)
    n = A.coord_dim
    prod = A.product_table
    # D_a matrix entry [c, b] = sum_u a_u ([e_u, e_b])_c
    K = np.zeros((n, n, n))
    u, b = np.nonzero(prod >= 0)
    K[u, b, prod[u, b]] += 1.0
    K[b, u, prod[u, b]] -= 1.0
    # vec row-major over (c, b) -> index c * n + b
    out = K.transpose(2, 1, 0).reshape(n * n, n)
    out.setflags(write=False)
    return out


def inner_derivation(a: AlgebraElement) -> LinearOperatorOnAlgebra:
    """The inner derivation ``D_a(x) = [a, x]``."""
    A = a.algebra
    n = A.coord_dim
    return LinearOperatorOnAlgebra(A, (_inner_matrix(A.block_dims) @ a.coords).reshape(n, n))


def _weights_array(A: StarAlgebra, weights) -> np.ndarray:
    weights = list(weights)
    m = A.num_blocks
    if len(weights) != m:
        raise AlgebraMismatchError(f"expected {m} weights (one per block), got {len(weights)}")
    rows = []
    for w in weights:
        if isinstance(w, CentralDescriptor):
            if w.algebra != A:
                raise AlgebraMismatchError("weight lives in a different algebra")
            rows.append(w.array)
        else:
            row = np.asarray(w, dtype=np.complex128)
            if row.shape != (m,):
                raise AlgebraMismatchError(f"weight of shape {row.shape}, expected ({m},)")
            rows.append(row)
    return np.array(rows, dtype=np.complex128).reshape(m, m)


def trace_from_weights(A: StarAlgebra, weights: Sequence) -> LinearOperatorOnAlgebra:
    """Center-valued trace ``E(x) = sum_k tr_k(x) w_k``.

    ``weights[k]`` is the central element ``w_k`` (a :class:`CentralDescriptor`
    or a length-m coefficient vector).  Every center-valued trace on ``A`` has
    this form.
    """
    W = _weights_array(A, weights)
    n = A.coord_dim
    mat = np.zeros((n, n), dtype=np.complex128)
    diag = A.diagonal_coords
    blocks = A.block_of_coord[diag]
    # column of e_ii in block k is the coordinate vector of w_k
    for col, k in zip(diag, blocks):
        for row, l in zip(diag, blocks):
            mat[row, col] = W[k, l]
    return LinearOperatorOnAlgebra(A, mat)


def trace_weights(E: LinearOperatorOnAlgebra) -> list[CentralDescriptor]:
    """Recover ``w_k = E(z_k) / n_k`` for a center-valued trace ``E``."""
    A = E.algebra
    out = []
    for k, z in enumerate(center_basis(A)):
        val = apply(E, z.to_element())
        coeffs = [np.trace(b) / n for b, n in zip(val.blocks, A.block_dims)]
        out.append(CentralDescriptor(A, tuple(c / A.block_dims[k] for c in coeffs)))
    return out


def central_multiplication(z: CentralDescriptor) -> np.ndarray:
    """Diagonal coordinate matrix of ``x -> z x`` for central ``z``."""
    A = z.algebra
    return np.diag(z.array[A.block_of_coord])


def nullspace(M: np.ndarray, rtol: float = NULLSPACE_RTOL) -> np.ndarray:
    """Orthonormal basis (columns) of ``ker M`` by SVD thresholding at ``rtol * s_max``."""
    M = np.asarray(M)
    if M.shape[0] == 0:
        return np.eye(M.shape[1], dtype=M.dtype)
    return scipy.linalg.null_space(M, rcond=rtol)


@lru_cache(maxsize=32)
def _lie_space_basis(block_dims: tuple[int, ...]) -> np.ndarray:
    A = make_algebra(block_dims)
    T = _kernels.lie_constraints(A.product_table)
    T = T[np.any(T != 0, axis=1)]
    basis = nullspace(T)
    basis.setflags(write=False)
    return basis


def lie_derivation_space(A: StarAlgebra) -> list[LinearOperatorOnAlgebra]:
    """Basis of the space of all Lie derivations on ``A``.

    Computed as the numerical kernel of the Lie identity written out on every
    pair of matrix units; independent of the decomposition machinery.
    """
    n = A.coord_dim
    basis = _lie_space_basis(A.block_dims)
    return [LinearOperatorOnAlgebra(A, basis[:, i].reshape(n, n)) for i in range(basis.shape[1])]


def trace_free(a: AlgebraElement) -> AlgebraElement:
    """Remove the central part: subtract ``(tr_k(a) / n_k) 1`` in every block."""
    return AlgebraElement(
        a.algebra, [b - np.trace(b) / b.shape[0] * np.eye(b.shape[0]) for b in a.blocks]
    )


@dataclass(frozen=True, eq=False)
class LieSample:
    """A seeded Lie derivation and, in ground-truth mode, its generators."""

    operator: LinearOperatorOnAlgebra
    a: Optional[AlgebraElement] = None
    weights: Optional[np.ndarray] = None
    mode: str = "groundtruth"
    seed: int = 0


def _complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def sample_lie_derivation(A: StarAlgebra, seed: int, mode: str = "groundtruth") -> LieSample:
    """Seeded random Lie derivation.

    ``groundtruth`` returns ``D_a + E`` with a random per-block trace-free ``a``
    and random weights ``W`` (``E(x) = sum_k tr_k(x) sum_l W[k, l] z_l``), keeping
    the generators.  ``nullspace`` returns a random combination of the
    :func:`lie_derivation_space` basis.  Draws come from numpy's PCG64 generator
    seeded with ``seed``.
    """
    rng = np.random.default_rng(seed)
    if mode == "groundtruth":
        a = trace_free(from_coords(A, _complex_normal(rng, A.coord_dim)))
        W = _complex_normal(rng, (A.num_blocks, A.num_blocks))
        L = inner_derivation(a) + trace_from_weights(A, W)
        return LieSample(L, a, W, mode, seed)
    if mode == "nullspace":
        basis = _lie_space_basis(A.block_dims)
        coeffs = _complex_normal(rng, basis.shape[1])
        n = A.coord_dim
        return LieSample(LinearOperatorOnAlgebra(A, (basis @ coeffs).reshape(n, n)), None, None, mode, seed)
    raise InvalidSpecError(f"unknown sampling mode {mode!r}; use 'groundtruth' or 'nullspace'")


def solve_inner(D: LinearOperatorOnAlgebra, tol: float = 1e-8) -> AlgebraElement:
    """Trace-free ``a`` with ``D = D_a``, by least squares over all basis elements.

    Raises :class:`NotInnerError` when ``||D_a - D|| > tol * (1 + ||D||)``.
    """
    A = D.algebra
    K = _inner_matrix(A.block_dims)
    rhs = D.matrix.reshape(-1)
    sol, *_ = np.linalg.lstsq(K, rhs, rcond=None)
    a = trace_free(from_coords(A, sol))
    resid = float(np.linalg.norm(K @ a.coords - rhs))
    if resid > tol * (1.0 + D.norm):
        raise NotInnerError(
            f"map is not an inner derivation: ||D_a - D|| = {resid:.3e}", residual=resid
        )
    return a


def verify_identity_3_2(
    L: LinearOperatorOnAlgebra, p: AlgebraElement, x: AlgebraElement, tol: float = 1e-9
) -> ResidualReport:
    """Residual of the projection identity every Lie derivation satisfies.

    With ``l = L(p)``, ``W = p l + l p + p l p - l`` and ``V = p l + l p - l``
    the identity reads ``x W - W x = 3 p x V - 3 V x p``.  The defect is divided
    by ``(1 + ||L||)(1 + ||x||)``.
    """
    lp = apply(L, p)
    W = p @ lp + lp @ p + p @ lp @ p - lp
    V = p @ lp + lp @ p - lp
    lhs = commutator(x, W)
    rhs = 3.0 * (p @ x @ V) - 3.0 * (V @ x @ p)
    return _report(norm(lhs - rhs) / ((1.0 + L.norm) * (1.0 + norm(x))), None, tol)
