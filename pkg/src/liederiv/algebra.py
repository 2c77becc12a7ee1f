"""Finite-dimensional *-algebras as direct sums of full complex matrix blocks.

An algebra ``A = Mat(n_1) + ... + Mat(n_m)`` is described by its block sizes.
Elements are stored blockwise; linear maps (see :mod:`liederiv.linmap`) act on
the matrix-unit coordinates, ordered block by block and row-major inside each
block.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .exceptions import (
    AlgebraMismatchError,
    CommutativeSummandError,
    EquivalenceError,
    InvalidSpecError,
    PreconditionError,
)

__all__ = [
    "StarAlgebra",
    "AlgebraElement",
    "CentralDescriptor",
    "make_algebra",
    "zeros",
    "identity",
    "matrix_unit",
    "from_coords",
    "random_element",
    "random_unitary",
    "random_projection",
    "mul",
    "add",
    "sub",
    "scale",
    "adjoint",
    "commutator",
    "norm",
    "block_traces",
    "central_part",
    "center_distance",
    "projection_defect",
    "is_projection",
    "block_ranks",
    "center_basis",
    "central_support",
    "halving_projection",
    "partial_isometry_between",
    "split_commutative",
    "subalgebra",
]

#: Tolerance for identities that hold exactly on exactly representable inputs.
EXACT_TOL = 1e-12


@dataclass(frozen=True, eq=True)
class StarAlgebra:
    """Direct sum of full matrix algebras ``Mat(n_k, C)``."""

    block_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(n) for n in self.block_dims)
        if not dims:
            raise InvalidSpecError("an algebra needs at least one block")
        if any(n < 1 for n in dims):
            raise InvalidSpecError(f"block dimensions must be positive, got {dims}")
        object.__setattr__(self, "block_dims", dims)

    @property
    def num_blocks(self) -> int:
        return len(self.block_dims)

    @property
    def coord_dim(self) -> int:
        return sum(n * n for n in self.block_dims)

    @cached_property
    def offsets(self) -> np.ndarray:
        """Start of each block in the coordinate vector (length m + 1)."""
        return np.concatenate([[0], np.cumsum([n * n for n in self.block_dims])]).astype(np.int64)

    @cached_property
    def unit_index(self) -> np.ndarray:
        """``(coord_dim, 3)`` table of ``(block, row, col)`` for every matrix unit."""
        rows = []
        for k, n in enumerate(self.block_dims):
            for i in range(n):
                for j in range(n):
                    rows.append((k, i, j))
        table = np.array(rows, dtype=np.int64).reshape(-1, 3)
        table.setflags(write=False)
        return table

    @cached_property
    def product_table(self) -> np.ndarray:
        """``prod[a, b]`` is the index of ``e_a e_b``, or -1 when the product is zero."""
        dim = self.coord_dim
        prod = np.full((dim, dim), -1, dtype=np.int64)
        for k, n in enumerate(self.block_dims):
            off = int(self.offsets[k])
            for i in range(n):
                for j in range(n):
                    for l in range(n):
                        prod[off + i * n + j, off + j * n + l] = off + i * n + l
        prod.setflags(write=False)
        return prod

    @cached_property
    def block_of_coord(self) -> np.ndarray:
        out = self.unit_index[:, 0].copy()
        out.setflags(write=False)
        return out

    @cached_property
    def diagonal_coords(self) -> np.ndarray:
        """Coordinates of the diagonal units ``e_ii`` of every block."""
        idx = self.unit_index
        out = np.flatnonzero(idx[:, 1] == idx[:, 2])
        out.setflags(write=False)
        return out

    def coord(self, block: int, row: int, col: int) -> int:
        n = self.block_dims[block]
        if not (0 <= row < n and 0 <= col < n):
            raise InvalidSpecError(f"unit ({row}, {col}) outside block {block} of size {n}")
        return int(self.offsets[block]) + row * n + col

    def to_dict(self) -> dict:
        return {"blocks": list(self.block_dims)}

    def __repr__(self):
        return f"StarAlgebra({list(self.block_dims)})"


def make_algebra(block_dims: Sequence[int]) -> StarAlgebra:
    """Build the algebra ``Mat(n_1) + ... + Mat(n_m)``."""
    try:
        dims = tuple(block_dims)
    except TypeError as exc:
        raise InvalidSpecError(f"block dimensions must be a sequence, got {block_dims!r}") from exc
    for n in dims:
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
            raise InvalidSpecError(f"block dimensions must be integers, got {n!r}")
    return StarAlgebra(dims)


class AlgebraElement:
    """Immutable block-diagonal complex matrix.

    Supports ``+``, ``-``, scalar ``*`` and the algebra product ``@``.
    """

    __slots__ = ("algebra", "blocks")

    def __init__(self, algebra: StarAlgebra, blocks):
        blocks = tuple(np.array(b, dtype=np.complex128) for b in blocks)
        if len(blocks) != algebra.num_blocks:
            raise AlgebraMismatchError(
                f"expected {algebra.num_blocks} blocks, got {len(blocks)}"
            )
        for b, n in zip(blocks, algebra.block_dims):
            if b.shape != (n, n):
                raise AlgebraMismatchError(f"block of shape {b.shape} where ({n}, {n}) was expected")
            b.setflags(write=False)
        object.__setattr__(self, "algebra", algebra)
        object.__setattr__(self, "blocks", blocks)

    def __setattr__(self, name, value):
        raise AttributeError("AlgebraElement is immutable")

    @property
    def coords(self) -> np.ndarray:
        return np.concatenate([b.ravel() for b in self.blocks])

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __neg__(self):
        return scale(-1.0, self)

    def __mul__(self, c):
        if isinstance(c, AlgebraElement):
            return NotImplemented
        return scale(c, self)

    __rmul__ = __mul__

    def __matmul__(self, other):
        return mul(self, other)

    def __repr__(self):
        return f"AlgebraElement({list(self.algebra.block_dims)}, blocks={[b.tolist() for b in self.blocks]})"


@dataclass(frozen=True)
class CentralDescriptor:
    """Central element ``sum_k c_k 1_k`` given by one coefficient per block."""

    algebra: StarAlgebra
    coefficients: tuple[complex, ...]

    def __post_init__(self):
        coeffs = tuple(complex(c) for c in self.coefficients)
        if len(coeffs) != self.algebra.num_blocks:
            raise AlgebraMismatchError(
                f"expected {self.algebra.num_blocks} coefficients, got {len(coeffs)}"
            )
        object.__setattr__(self, "coefficients", coeffs)

    def to_element(self) -> AlgebraElement:
        return AlgebraElement(
            self.algebra,
            [c * np.eye(n) for c, n in zip(self.coefficients, self.algebra.block_dims)],
        )

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coefficients, dtype=np.complex128)


def _check_same(x: AlgebraElement, y: AlgebraElement):
    if x.algebra != y.algebra:
        raise AlgebraMismatchError(f"elements of {x.algebra} and {y.algebra} cannot be combined")


def zeros(A: StarAlgebra) -> AlgebraElement:
    return AlgebraElement(A, [np.zeros((n, n)) for n in A.block_dims])


def identity(A: StarAlgebra) -> AlgebraElement:
    return AlgebraElement(A, [np.eye(n) for n in A.block_dims])


def matrix_unit(A: StarAlgebra, block: int, row: int, col: int) -> AlgebraElement:
    """The matrix unit ``e_{row,col}`` of the given block (0-based indices)."""
    v = np.zeros(A.coord_dim, dtype=np.complex128)
    v[A.coord(block, row, col)] = 1.0
    return from_coords(A, v)


def from_coords(A: StarAlgebra, v) -> AlgebraElement:
    v = np.asarray(v, dtype=np.complex128)
    if v.shape != (A.coord_dim,):
        raise AlgebraMismatchError(f"coordinate vector of shape {v.shape}, expected ({A.coord_dim},)")
    off = A.offsets
    return AlgebraElement(
        A, [v[off[k]:off[k + 1]].reshape(n, n) for k, n in enumerate(A.block_dims)]
    )


def random_element(A: StarAlgebra, rng: np.random.Generator) -> AlgebraElement:
    """Element with independent standard complex Gaussian entries."""
    dim = A.coord_dim
    return from_coords(A, rng.standard_normal(dim) + 1j * rng.standard_normal(dim))


def random_unitary(A: StarAlgebra, rng: np.random.Generator) -> AlgebraElement:
    """Haar-distributed unitary in every block (QR of a Gaussian matrix)."""
    blocks = []
    for n in A.block_dims:
        q, r = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
        d = np.diag(r)
        blocks.append(q * (d / np.abs(d)))
    return AlgebraElement(A, blocks)


def random_projection(A: StarAlgebra, rng: np.random.Generator, ranks=None) -> AlgebraElement:
    """``u diag(1..1, 0..0) u*`` with a random unitary ``u``; ranks random unless given."""
    if ranks is None:
        ranks = [int(rng.integers(0, n + 1)) for n in A.block_dims]
    u = random_unitary(A, rng)
    blocks = []
    for ub, n, r in zip(u.blocks, A.block_dims, ranks):
        v = ub[:, :r]
        blocks.append(v @ v.conj().T)
    return AlgebraElement(A, blocks)


def mul(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    _check_same(x, y)
    return AlgebraElement(x.algebra, [a @ b for a, b in zip(x.blocks, y.blocks)])


def add(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    _check_same(x, y)
    return AlgebraElement(x.algebra, [a + b for a, b in zip(x.blocks, y.blocks)])


def sub(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    _check_same(x, y)
    return AlgebraElement(x.algebra, [a - b for a, b in zip(x.blocks, y.blocks)])


def scale(c: complex, x: AlgebraElement) -> AlgebraElement:
    return AlgebraElement(x.algebra, [c * a for a in x.blocks])


def adjoint(x: AlgebraElement) -> AlgebraElement:
    return AlgebraElement(x.algebra, [a.conj().T for a in x.blocks])


def commutator(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    """``[x, y] = xy - yx``."""
    _check_same(x, y)
    return AlgebraElement(x.algebra, [a @ b - b @ a for a, b in zip(x.blocks, y.blocks)])


def norm(x: AlgebraElement) -> float:
    """Frobenius norm over all blocks."""
    return float(np.sqrt(sum(np.sum(np.abs(b) ** 2) for b in x.blocks)))


def block_traces(x: AlgebraElement) -> np.ndarray:
    return np.array([np.trace(b) for b in x.blocks], dtype=np.complex128)


def central_part(x: AlgebraElement) -> CentralDescriptor:
    """Orthogonal projection of ``x`` onto the center: ``tr_k(x) / n_k`` per block."""
    return CentralDescriptor(x.algebra, tuple(block_traces(x) / np.array(x.algebra.block_dims)))


def center_distance(x: AlgebraElement) -> float:
    """Frobenius distance from ``x`` to the center ``Z(A)``."""
    return norm(x - central_part(x).to_element())


def projection_defect(p: AlgebraElement) -> float:
    """``max(||p^2 - p||, ||p* - p||)``."""
    return max(norm(p @ p - p), norm(adjoint(p) - p))


def is_projection(p: AlgebraElement, tol: float = 1e-9) -> bool:
    return projection_defect(p) <= tol * (1.0 + norm(p))


def _require_projection(p: AlgebraElement, tol: float, what: str = "input"):
    defect = projection_defect(p)
    if defect > tol * (1.0 + norm(p)):
        raise PreconditionError(f"{what} is not a projection (defect {defect:.3e})")


def block_ranks(p: AlgebraElement, tol: float = 1e-9) -> list[int]:
    """Per-block ranks of a projection (its block traces, rounded)."""
    _require_projection(p, tol)
    return [int(round(t.real)) for t in block_traces(p)]


def center_basis(A: StarAlgebra) -> list[CentralDescriptor]:
    """The block identities ``z_k``; they span ``Z(A)`` and sum to the unit."""
    m = A.num_blocks
    return [CentralDescriptor(A, tuple(1.0 if l == k else 0.0 for l in range(m))) for k in range(m)]


def central_support(p: AlgebraElement, tol: float = 1e-9) -> CentralDescriptor:
    """Smallest central projection ``c`` with ``c p = p``."""
    _require_projection(p, tol)
    scale_ = tol * (1.0 + norm(p))
    return CentralDescriptor(
        p.algebra, tuple(1.0 if np.linalg.norm(b) > scale_ else 0.0 for b in p.blocks)
    )


def halving_projection(A: StarAlgebra) -> AlgebraElement:
    """Projection onto the leading ``floor(n_k / 2)`` basis vectors of every block.

    The result ``p`` satisfies ``c(p) = c(1 - p) = 1`` and ``p <= 1 - p`` in the
    Murray-von Neumann order.
    """
    bad = [k for k, n in enumerate(A.block_dims) if n < 2]
    if bad:
        raise CommutativeSummandError(
            f"blocks {bad} of {A} are one-dimensional; split the commutative summand first"
        )
    return AlgebraElement(
        A, [np.diag([1.0] * (n // 2) + [0.0] * (n - n // 2)) for n in A.block_dims]
    )


def _range_basis(block: np.ndarray, rank: int) -> np.ndarray:
    """Orthonormal basis (as columns) for the range of a projection block."""
    n = block.shape[0]
    diag = np.diag(block)
    if np.allclose(block, np.diag(diag), atol=EXACT_TOL) and np.allclose(
        diag, np.round(diag.real), atol=EXACT_TOL
    ):
        cols = np.flatnonzero(np.round(diag.real) == 1.0)
        return np.eye(n, dtype=np.complex128)[:, cols]
    w, v = np.linalg.eigh((block + block.conj().T) / 2)
    return v[:, np.argsort(w)[::-1][:rank]]


def partial_isometry_between(p: AlgebraElement, q: AlgebraElement, tol: float = 1e-9) -> AlgebraElement:
    """Partial isometry ``u`` with ``u* u = p`` and ``u u* = q``.

    Built per block by sending the range basis of ``p`` onto that of ``q``; for
    diagonal projections this is a sum of matrix units.
    """
    _check_same(p, q)
    rp, rq = block_ranks(p, tol), block_ranks(q, tol)
    if rp != rq:
        raise EquivalenceError(f"block ranks {rp} and {rq} differ; p and q are not equivalent")
    blocks = []
    for bp, bq, r in zip(p.blocks, q.blocks, rp):
        vp, vq = _range_basis(bp, r), _range_basis(bq, r)
        blocks.append(vq @ vp.conj().T)
    return AlgebraElement(p.algebra, blocks)


def split_commutative(A: StarAlgebra) -> tuple[CentralDescriptor, CentralDescriptor]:
    """Central projections ``(z0, z1)``: ``z0 A`` is commutative, ``z1 A`` has no commutative summand."""
    z0 = tuple(1.0 if n == 1 else 0.0 for n in A.block_dims)
    z1 = tuple(1.0 - c for c in z0)
    return CentralDescriptor(A, z0), CentralDescriptor(A, z1)


def subalgebra(A: StarAlgebra, blocks: Sequence[int]) -> tuple[StarAlgebra, np.ndarray]:
    """The summand made of the listed blocks and its coordinate embedding into ``A``.

    Returns ``(B, idx)`` where ``idx[c]`` is the ``A``-coordinate of the ``c``-th
    matrix unit of ``B``.
    """
    blocks = list(blocks)
    B = make_algebra([A.block_dims[k] for k in blocks])
    off = A.offsets
    idx = np.concatenate(
        [np.arange(off[k], off[k + 1]) for k in blocks] or [np.zeros(0, dtype=np.int64)]
    ).astype(np.int64)
    return B, idx
