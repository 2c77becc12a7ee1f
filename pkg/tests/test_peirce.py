import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from liederiv.algebra import (
    center_distance,
    halving_projection,
    identity,
    make_algebra,
    matrix_unit,
    norm,
    random_element,
    zeros,
)
from liederiv.exceptions import FrameError, NotLieDerivationError, PreconditionError
from liederiv.linmap import (
    LinearOperatorOnAlgebra,
    apply,
    identity_operator,
    inner_derivation,
    sample_lie_derivation,
    trace_from_weights,
    zero_operator,
)
from liederiv.peirce import (
    corner_swap_operator,
    in_corner,
    lemma1_witness,
    lemma3_normalize,
    lemma4_check,
    lemma5_residual,
    lemma5_split,
    make_frame,
    peirce_split,
)

nc_dims_st = st.lists(st.integers(2, 4), min_size=1, max_size=3)
seed_st = st.integers(0, 2**32 - 1)
prop = settings(max_examples=30, deadline=None)


def close(x, y, tol=1e-12):
    return norm(x - y) <= tol


def mat2_frame():
    A = make_algebra([2])
    e = {(i, j): matrix_unit(A, 0, i, j) for i in range(2) for j in range(2)}
    return A, e, make_frame(e[0, 0])


def test_make_frame_rejects():
    A = make_algebra([2, 2])
    with pytest.raises(FrameError):
        make_frame(matrix_unit(A, 0, 0, 0))  # zero in the second block
    B = make_algebra([3])
    with pytest.raises(FrameError):
        make_frame(matrix_unit(B, 0, 0, 0) + matrix_unit(B, 0, 1, 1))  # p > 1 - p
    with pytest.raises(FrameError):
        make_frame(matrix_unit(B, 0, 0, 1))  # not a projection


# --- splitting ------------------------------------------------------------

def test_peirce_split_examples():
    A, e, f = mat2_frame()
    s = peirce_split(e[0, 1], f)
    assert close(s.x12, e[0, 1]) and norm(s.x11) == norm(s.x21) == norm(s.x22) == 0
    s = peirce_split(e[0, 0], f)
    assert close(s.x11, e[0, 0]) and norm(s.x12 + s.x21 + s.x22) == 0
    s = peirce_split(identity(A), f)
    assert close(s.x11, f.p1) and close(s.x22, f.p2) and norm(s.x12) == norm(s.x21) == 0


@prop
@given(nc_dims_st, seed_st)
def test_split_reconstructs_and_corners_multiply(dims, seed):
    A = make_algebra(dims)
    f = make_frame(halving_projection(A))
    rng = np.random.default_rng(seed)
    x, y = random_element(A, rng), random_element(A, rng)
    sx, sy = peirce_split(x, f), peirce_split(y, f)
    assert close(sx.reconstruct(), x, 1e-12)
    for i in (1, 2):
        for j in (1, 2):
            assert in_corner(sx.corner(i, j), i, j, f)
            for k in (1, 2):
                assert in_corner(sx.corner(i, j) @ sy.corner(j, k), i, k, f)
    # S_ij S_kl = 0 for j != k
    assert norm(sx.x12 @ sy.x12) <= 1e-12


# --- Lemma 1 --------------------------------------------------------------

def test_lemma1_examples():
    A, e, f = mat2_frame()
    y, u = lemma1_witness(e[0, 0], f)
    assert close(u, e[1, 0]) and close(y, e[0, 1])
    assert norm(e[0, 0] - e[0, 0] @ y @ u) == 0
    y, u = lemma1_witness(zeros(A), f)
    assert norm(zeros(A) @ y @ u) == 0
    with pytest.raises(PreconditionError):
        lemma1_witness(e[1, 1], f)


@prop
@given(nc_dims_st, seed_st)
def test_lemma1_random(dims, seed):
    A = make_algebra(dims)
    f = make_frame(halving_projection(A))
    x = f.p1 @ random_element(A, np.random.default_rng(seed)) @ f.p1
    y, u = lemma1_witness(x, f)
    assert in_corner(y, 1, 2, f)
    assert norm(x - x @ y @ u) <= 1e-12 * (1 + norm(x))


# --- Lemma 3 --------------------------------------------------------------

def test_lemma3_examples():
    A, e, f = mat2_frame()
    a, z, L1 = lemma3_normalize(inner_derivation(e[0, 1]), f)
    assert close(a, -e[0, 1]) and norm(z) == 0 and L1.norm <= 1e-15
    E = trace_from_weights(A, [[0.7 - 0.2j]])
    a, z, L1 = lemma3_normalize(E, f)
    assert norm(a) == 0 and close(z, apply(E, f.p1)) and np.array_equal(L1.matrix, E.matrix)
    a, z, L1 = lemma3_normalize(zero_operator(A), f)
    assert norm(a) == norm(z) == L1.norm == 0


def test_lemma3_rejects_identity():
    A, e, f = mat2_frame()
    with pytest.raises(NotLieDerivationError) as info:
        lemma3_normalize(identity_operator(A), f)
    assert info.value.stage == "lemma3"


@prop
@given(nc_dims_st, seed_st)
def test_lemma3_identity(dims, seed):
    A = make_algebra(dims)
    f = make_frame(halving_projection(A))
    L = sample_lie_derivation(A, seed).operator
    a, z, L1 = lemma3_normalize(L, f)
    lp = apply(L, f.p1)
    assert norm(lp - (f.p1 @ a - a @ f.p1) - z) <= 1e-10 * (1 + L.norm)
    assert center_distance(apply(L1, f.p1)) <= 1e-10 * (1 + L.norm)


# --- Lemma 4 --------------------------------------------------------------

def test_lemma4_examples():
    A, e, f = mat2_frame()
    assert lemma4_check(zero_operator(A), f).max_residual == 0
    bad = corner_swap_operator(f)
    # by hand: e12 -> e21, e21 -> e12, diagonal -> 0
    expect = np.zeros((4, 4))
    expect[2, 1] = expect[1, 2] = 1
    np.testing.assert_array_equal(bad.matrix, expect)
    rep = lemma4_check(bad, f)
    assert not rep.passed and rep.witness is not None


def test_lemma4_needs_normalized_input():
    A, e, f = mat2_frame()
    with pytest.raises(PreconditionError):
        lemma4_check(inner_derivation(e[0, 1]), f)


@prop
@given(nc_dims_st, seed_st)
def test_lemma4_on_samples(dims, seed):
    A = make_algebra(dims)
    f = make_frame(halving_projection(A))
    _, _, L1 = lemma3_normalize(sample_lie_derivation(A, seed).operator, f)
    assert lemma4_check(L1, f).max_residual <= 1e-10


# --- Lemma 5 --------------------------------------------------------------

def test_lemma5_examples():
    A, e, f = mat2_frame()
    E = trace_from_weights(A, [[1.0]])
    d, z = lemma5_split(E, e[0, 0], 1, f)
    assert norm(d) <= 1e-15 and close(z, identity(A))
    d, z = lemma5_split(zero_operator(A), e[0, 0], 1, f)
    assert norm(d) == norm(z) == 0
    _, _, L1 = lemma3_normalize(inner_derivation(e[0, 1]), f)
    d, z = lemma5_split(L1, e[0, 0], 1, f)
    assert norm(d) <= 1e-15 and norm(z) <= 1e-15
    with pytest.raises(PreconditionError):
        lemma5_split(E, e[0, 1], 1, f)


def test_lemma5_stage_error():
    """On Mat(4) with p = e11 + e22, e12 -> e13 leaves S_11."""
    A = make_algebra([4])
    f = make_frame(matrix_unit(A, 0, 0, 0) + matrix_unit(A, 0, 1, 1))
    M = np.zeros((16, 16))
    M[A.coord(0, 0, 2), A.coord(0, 0, 1)] = 1
    L = LinearOperatorOnAlgebra(A, M)
    with pytest.raises(NotLieDerivationError) as info:
        lemma5_split(L, matrix_unit(A, 0, 0, 1), 1, f)
    assert info.value.stage == "lemma5"
    assert not lemma5_residual(L, f).passed


@prop
@given(nc_dims_st, seed_st, st.complex_numbers(max_magnitude=10), st.complex_numbers(max_magnitude=10))
def test_lemma5_linear(dims, seed, s, t):
    A = make_algebra(dims)
    f = make_frame(halving_projection(A))
    rng = np.random.default_rng(seed)
    _, _, L1 = lemma3_normalize(sample_lie_derivation(A, seed).operator, f)
    for i, p in ((1, f.p1), (2, f.p2)):
        x, y = p @ random_element(A, rng) @ p, p @ random_element(A, rng) @ p
        dx, zx = lemma5_split(L1, x, i, f)
        dy, zy = lemma5_split(L1, y, i, f)
        d, z = lemma5_split(L1, s * x + t * y, i, f)
        scale = (1 + L1.norm) * (1 + abs(s) + abs(t)) * (1 + norm(x) + norm(y))
        assert norm(d - s * dx - t * dy) <= 1e-10 * scale
        assert norm(z - s * zx - t * zy) <= 1e-10 * scale
        assert in_corner(d, i, i, f) and center_distance(z) <= 1e-10 * scale
