import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from liederiv.algebra import (
    CentralDescriptor,
    center_basis,
    commutator,
    identity,
    make_algebra,
    matrix_unit,
    norm,
    random_element,
    random_projection,
    zeros,
)
from liederiv.exceptions import InvalidSpecError, NotInnerError
from liederiv.linmap import (
    LinearOperatorOnAlgebra,
    apply,
    identity_operator,
    inner_derivation,
    leibniz_residual,
    lie_derivation_space,
    lie_residual,
    sample_lie_derivation,
    solve_inner,
    trace_free,
    trace_from_weights,
    trace_residual,
    verify_identity_3_2,
    zero_operator,
)

import oracles

dims_st = st.lists(st.integers(1, 3), min_size=1, max_size=3)
seed_st = st.integers(0, 2**32 - 1)
prop = settings(max_examples=30, deadline=None)

# Frozen from the exact GF(p) rank oracle (tests/oracles.py); re-derived below.
LIE_DIMS = {(1,): 1, (2,): 4, (3,): 9, (2, 1): 7, (1, 1): 4, (2, 2): 10, (2, 3): 15, (1, 1, 1): 9}


def mat2():
    A = make_algebra([2])
    e = {(i, j): matrix_unit(A, 0, i, j) for i in range(2) for j in range(2)}
    return A, e


def close(x, y, tol=1e-12):
    return norm(x - y) <= tol


# --- apply / inner derivation --------------------------------------------

def test_apply_examples():
    A, e = mat2()
    assert close(apply(zero_operator(A), e[0, 1]), zeros(A))
    assert close(apply(identity_operator(A), e[0, 1]), e[0, 1])
    assert close(apply(inner_derivation(e[0, 1]), e[0, 0]), -e[0, 1])
    assert close(apply(inner_derivation(e[0, 1]), e[1, 1]), e[0, 1])


def test_inner_derivation_trivia():
    A = make_algebra([2, 3])
    assert inner_derivation(identity(A)).norm == 0
    assert inner_derivation(center_basis(A)[1].to_element()).norm == 0
    assert inner_derivation(zeros(A)).norm == 0


@prop
@given(dims_st, seed_st)
def test_inner_derivation_matches_dense(dims, seed):
    A = make_algebra(dims)
    rng = np.random.default_rng(seed)
    a, x = random_element(A, rng), random_element(A, rng)
    Da, xd = oracles.to_dense(dims, a.coords), oracles.to_dense(dims, x.coords)
    expect = oracles.to_coords(dims, Da @ xd - xd @ Da)
    np.testing.assert_allclose(apply(inner_derivation(a), x).coords, expect, atol=1e-12)


# --- residuals ------------------------------------------------------------

def test_lie_residual_examples():
    A, e = mat2()
    rng = np.random.default_rng(0)
    assert lie_residual(inner_derivation(random_element(A, rng))).max_residual <= 1e-12
    rep = lie_residual(identity_operator(A))
    assert not rep.passed and rep.max_residual > 0
    # the raw defect on (e11, e12) is ||[e11, e12]|| = 1
    I = np.eye(4)
    L = lambda X: oracles.dense_apply([2], I, X)
    x, y = oracles.dense_unit([2], 0, 0, 0), oracles.dense_unit([2], 0, 0, 1)
    defect = L(x @ y - y @ x) - (L(x) @ y - y @ L(x)) - (x @ L(y) - L(y) @ x)
    assert np.linalg.norm(defect) == pytest.approx(1.0)
    assert lie_residual(identity_operator(make_algebra([1, 1]))).max_residual == 0


def test_leibniz_residual_examples():
    A, e = mat2()
    assert leibniz_residual(inner_derivation(e[0, 1] + 2j * e[1, 0])).max_residual <= 1e-12
    assert leibniz_residual(zero_operator(A)).max_residual == 0
    E = trace_from_weights(A, [[1.0]])
    rep = leibniz_residual(E)
    assert not rep.passed
    # E(e11 e11) - 2 E(e11) e11 = I - 2 e11, norm sqrt 2
    assert oracles.leibniz_defect([2], E.matrix) == pytest.approx(np.sqrt(2))


def test_trace_residual_examples():
    A = make_algebra([2, 3])
    E = trace_from_weights(A, np.array([[1.0, 2.0], [0.5j, -1.0]]))
    assert trace_residual(E).max_residual <= 1e-14
    B, e = mat2()
    assert not trace_residual(inner_derivation(e[0, 1])).passed
    assert trace_residual(zero_operator(B)).max_residual == 0


@prop
@given(dims_st, seed_st)
def test_residuals_agree_with_dense_oracle(dims, seed):
    A = make_algebra(dims)
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((A.coord_dim,) * 2)
    L = LinearOperatorOnAlgebra(A, M)
    scale = 1 + np.linalg.norm(M)
    assert lie_residual(L).max_residual == pytest.approx(oracles.lie_defect(dims, M) / scale, abs=1e-12)
    assert leibniz_residual(L).max_residual == pytest.approx(oracles.leibniz_defect(dims, M) / scale, abs=1e-12)


# --- traces ---------------------------------------------------------------

def test_trace_from_weights_examples():
    A, _ = mat2()
    assert trace_from_weights(A, [[0.0]]).norm == 0
    E = trace_from_weights(A, [CentralDescriptor(A, (0.5,))])
    assert close(apply(E, identity(A)), identity(A))


@prop
@given(dims_st, seed_st)
def test_traces_kill_commutators(dims, seed):
    A = make_algebra(dims)
    rng = np.random.default_rng(seed)
    m = len(dims)
    E = trace_from_weights(A, rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m)))
    x, y = random_element(A, rng), random_element(A, rng)
    assert norm(apply(E, commutator(x, y))) <= 1e-10 * (1 + E.norm)


# --- Lie-derivation space -------------------------------------------------

@pytest.mark.parametrize("dims", [(1,), (2,), (2, 1), (1, 1)])
def test_frozen_dims_match_exact_oracle(dims):
    assert oracles.lie_space_dim_exact(list(dims)) == LIE_DIMS[dims]


@pytest.mark.parametrize("dims", sorted(LIE_DIMS))
def test_lie_space_dimension(dims):
    space = lie_derivation_space(make_algebra(dims))
    assert len(space) == LIE_DIMS[dims]
    for L in space:
        assert lie_residual(L).max_residual <= 1e-10


def test_nullspace_sample_on_2_3():
    L = sample_lie_derivation(make_algebra([2, 3]), 11, "nullspace").operator
    assert lie_residual(L).max_residual <= 1e-9


@prop
@given(dims_st, seed_st)
def test_groundtruth_sample(dims, seed):
    A = make_algebra(dims)
    s = sample_lie_derivation(A, seed)
    assert lie_residual(s.operator).max_residual <= 1e-10
    again = sample_lie_derivation(A, seed)
    assert np.array_equal(s.operator.matrix, again.operator.matrix)


def test_unknown_mode():
    with pytest.raises(InvalidSpecError):
        sample_lie_derivation(make_algebra([2]), 0, "bogus")


# --- solve_inner ----------------------------------------------------------

def test_solve_inner_examples():
    A, e = mat2()
    assert close(solve_inner(inner_derivation(e[0, 1])), e[0, 1], 1e-12)
    assert close(solve_inner(zero_operator(A)), zeros(A))
    a = solve_inner(inner_derivation(e[0, 0]))
    assert close(a, e[0, 0] - 0.5 * identity(A), 1e-12)


def test_solve_inner_rejects_trace_map():
    A, _ = mat2()
    with pytest.raises(NotInnerError) as info:
        solve_inner(trace_from_weights(A, [[1.0]]))
    assert info.value.residual > 0


@prop
@given(dims_st, seed_st)
def test_solve_inner_inverts_inner_derivation(dims, seed):
    A = make_algebra(dims)
    a = trace_free(random_element(A, np.random.default_rng(seed)))
    assert close(solve_inner(inner_derivation(a)), a, 1e-9 * (1 + norm(a)))


# --- projection identity --------------------------------------------------

def test_identity_3_2_examples():
    A3 = make_algebra([3])
    rng = np.random.default_rng(5)
    p, x = random_projection(A3, rng), random_element(A3, rng)
    assert verify_identity_3_2(zero_operator(A3), p, x).max_residual == 0
    L = inner_derivation(random_element(A3, rng))
    assert verify_identity_3_2(L, p, x).max_residual <= 1e-10
    A, e = mat2()
    assert verify_identity_3_2(identity_operator(A), e[0, 0], e[0, 1]).max_residual > 1e-3


def test_identity_3_2_identity_map_by_hand():
    """Independent evaluation with plain 2x2 matrices: l = p, W = 2p, V = p."""
    p = np.array([[1, 0], [0, 0]], dtype=complex)
    x = np.array([[0, 1], [0, 0]], dtype=complex)
    W, V = 2 * p, p
    lhs = x @ W - W @ x
    rhs = 3 * p @ x @ V - 3 * V @ x @ p
    # lhs = 2[x, p] = -2 e12, rhs = 3pxp - 3pxp = 0
    assert np.linalg.norm(lhs - rhs) == pytest.approx(2.0)


@prop
@given(dims_st, seed_st)
def test_identity_3_2_holds_for_samples(dims, seed):
    A = make_algebra(dims)
    rng = np.random.default_rng(seed)
    L = sample_lie_derivation(A, seed).operator
    p = random_projection(A, rng)
    assert verify_identity_3_2(L, p, random_element(A, rng)).max_residual <= 1e-10
