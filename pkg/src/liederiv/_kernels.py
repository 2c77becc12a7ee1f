"""Hot loops over pairs of matrix units.

Every residual in the package is a maximum over all pairs ``(e_a, e_b)`` of
matrix units, and the Lie-identity constraint system has one row per triple
``(a, b, c)``.  Both are evaluated here from the integer product table
``prod[a, b]`` (index of ``e_a e_b`` or -1).

Two interchangeable backends exist:

* ``numba`` -- ``@njit`` loops that exploit the sparsity of the product table;
* ``numpy`` -- dense structure-constant tensors contracted with ``einsum``.

The numba path is used when numba imports and ``LIEDERIV_DISABLE_NUMBA`` is
unset (or ``0``); :func:`use_backend` switches temporarily.
"""
from __future__ import annotations

import contextlib
import os

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False


def _env_disabled() -> bool:
    return os.environ.get("LIEDERIV_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")


BACKEND = "numba" if HAVE_NUMBA and not _env_disabled() else "numpy"


def get_backend() -> str:
    return BACKEND


@contextlib.contextmanager
def use_backend(name: str):
    """Temporarily select ``"numba"`` or ``"numpy"``."""
    global BACKEND
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    previous, BACKEND = BACKEND, name
    try:
        yield
    finally:
        BACKEND = previous


# --------------------------------------------------------------------------
# numpy backend
# --------------------------------------------------------------------------

def structure_tensor(prod: np.ndarray) -> np.ndarray:
    """Dense ``C[a, b, c] = 1`` iff ``e_a e_b = e_c``."""
    n = prod.shape[0]
    C = np.zeros((n, n, n))
    a, b = np.nonzero(prod >= 0)
    C[a, b, prod[a, b]] = 1.0
    return C


def _np_pair_defects(M, prod, lie):
    C = structure_tensor(prod)
    S = C - C.transpose(1, 0, 2) if lie else C
    # defect[a, b, c] = M(S(a, b))_c - (M e_a * e_b)_c - (e_a * M e_b)_c
    lhs = np.einsum("abd,cd->abc", S, M)
    t1 = np.einsum("da,dbc->abc", M, S)
    t2 = np.einsum("db,adc->abc", M, S)
    return np.sqrt(np.sum(np.abs(lhs - t1 - t2) ** 2, axis=2))


def _np_commutator_defects(M, prod):
    C = structure_tensor(prod)
    K = C - C.transpose(1, 0, 2)
    d = np.einsum("abd,cd->abc", K, M)
    return np.sqrt(np.sum(np.abs(d) ** 2, axis=2))


def _np_lie_constraints(prod):
    n = prod.shape[0]
    C = structure_tensor(prod)
    K = C - C.transpose(1, 0, 2)
    eye = np.eye(n)
    # unknown x = vec(L) row-major: x[r * n + s] = L[r, s]
    T = np.einsum("abs,rc->abcrs", K, eye)
    T -= np.einsum("rbc,sa->abcrs", K, eye)
    T -= np.einsum("arc,sb->abcrs", K, eye)
    return T.reshape(n ** 3, n * n)


# --------------------------------------------------------------------------
# numba backend
# --------------------------------------------------------------------------

if HAVE_NUMBA:

    @numba.njit(cache=True)
    def _nb_pair_defects(M, prod, lie):
        n = prod.shape[0]
        out = np.zeros((n, n))
        buf = np.zeros(n, dtype=np.complex128)
        for a in range(n):
            for b in range(n):
                buf[:] = 0.0
                ab = prod[a, b]
                if ab >= 0:
                    buf += M[:, ab]
                if lie:
                    ba = prod[b, a]
                    if ba >= 0:
                        buf -= M[:, ba]
                for d in range(n):
                    # (M e_a) e_b  and  e_a (M e_b)
                    c = prod[d, b]
                    if c >= 0:
                        buf[c] -= M[d, a]
                    c = prod[a, d]
                    if c >= 0:
                        buf[c] -= M[d, b]
                    if lie:
                        # - e_b (M e_a)  and  - (M e_b) e_a
                        c = prod[b, d]
                        if c >= 0:
                            buf[c] += M[d, a]
                        c = prod[d, a]
                        if c >= 0:
                            buf[c] += M[d, b]
                s = 0.0
                for c in range(n):
                    s += buf[c].real ** 2 + buf[c].imag ** 2
                out[a, b] = np.sqrt(s)
        return out

    @numba.njit(cache=True)
    def _nb_commutator_defects(M, prod):
        n = prod.shape[0]
        out = np.zeros((n, n))
        for a in range(n):
            for b in range(n):
                ab = prod[a, b]
                ba = prod[b, a]
                s = 0.0
                for c in range(n):
                    v = 0.0 + 0.0j
                    if ab >= 0:
                        v += M[c, ab]
                    if ba >= 0:
                        v -= M[c, ba]
                    s += v.real ** 2 + v.imag ** 2
                out[a, b] = np.sqrt(s)
        return out

    @numba.njit(cache=True)
    def _nb_lie_constraints(prod):
        n = prod.shape[0]
        T = np.zeros((n * n * n, n * n))
        for a in range(n):
            for b in range(n):
                base = (a * n + b) * n
                ab = prod[a, b]
                ba = prod[b, a]
                for c in range(n):
                    if ab >= 0:
                        T[base + c, c * n + ab] += 1.0
                    if ba >= 0:
                        T[base + c, c * n + ba] -= 1.0
                for d in range(n):
                    # [L e_a, e_b] contributes L[d, a] at c = d*b and -L[d, a] at c = b*d
                    c = prod[d, b]
                    if c >= 0:
                        T[base + c, d * n + a] -= 1.0
                    c = prod[b, d]
                    if c >= 0:
                        T[base + c, d * n + a] += 1.0
                    # [e_a, L e_b] contributes L[d, b] at c = a*d and -L[d, b] at c = d*a
                    c = prod[a, d]
                    if c >= 0:
                        T[base + c, d * n + b] -= 1.0
                    c = prod[d, a]
                    if c >= 0:
                        T[base + c, d * n + b] += 1.0
        return T


# --------------------------------------------------------------------------
# dispatch
# --------------------------------------------------------------------------

def pair_defects(M: np.ndarray, prod: np.ndarray, lie: bool) -> np.ndarray:
    """Norms of the Lie (``lie=True``) or Leibniz defect of ``M`` on every unit pair."""
    M = np.ascontiguousarray(M, dtype=np.complex128)
    if BACKEND == "numba":
        return _nb_pair_defects(M, prod, lie)
    return _np_pair_defects(M, prod, lie)


def commutator_defects(M: np.ndarray, prod: np.ndarray) -> np.ndarray:
    """Norms of ``M(e_a e_b) - M(e_b e_a)`` on every unit pair."""
    M = np.ascontiguousarray(M, dtype=np.complex128)
    if BACKEND == "numba":
        return _nb_commutator_defects(M, prod)
    return _np_commutator_defects(M, prod)


def lie_constraints(prod: np.ndarray) -> np.ndarray:
    """Real ``(n^3, n^2)`` matrix whose kernel is the space of Lie derivations.

    Row ``(a*n + b)*n + c`` is the ``c``-th coordinate of the Lie defect on the
    pair ``(e_a, e_b)``; column ``r*n + s`` is the operator entry ``L[r, s]``.
    """
    if BACKEND == "numba":
        return _nb_lie_constraints(prod)
    return _np_lie_constraints(prod)
