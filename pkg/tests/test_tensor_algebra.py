import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ellipticll import tensor_algebra as ta

NS = [2, 3, 4, 5]


def rand(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


@pytest.mark.parametrize("N", NS)
def test_basis_trace_orthogonality(N):
    T, Td = ta.basis_stack(N)
    gram = np.einsum("aij,bji->ab", T, Td)
    np.testing.assert_allclose(gram, N * np.eye(N * N), atol=1e-12)
    np.testing.assert_allclose(T[0], np.eye(N), atol=1e-15)


@pytest.mark.parametrize("N", NS)
def test_dual_is_inverse(N):
    for a in ta.basis_indices(N):
        np.testing.assert_allclose(ta.basis_t(a, N) @ ta.dual_basis_t(a, N), np.eye(N), atol=1e-12)


@pytest.mark.parametrize("N", NS)
def test_clock_shift_and_product_rule(N):
    q1, q2 = ta._clock_shift(N)
    w = np.exp(2j * np.pi / N)
    np.testing.assert_allclose(q2 @ q1, w * q1 @ q2, atol=1e-12)
    # T_a T_b is a unimodular multiple of T_{a+b}
    for a in ta.basis_indices(N):
        for b in ta.basis_indices(N):
            prod = ta.basis_t(a, N) @ ta.basis_t(b, N)
            target = ta.basis_t((a[0] + b[0], a[1] + b[1]), N)
            ratio = np.trace(prod @ np.linalg.inv(target)) / N
            assert abs(abs(ratio) - 1) < 1e-12
            np.testing.assert_allclose(prod, ratio * target, atol=1e-12)


@pytest.mark.parametrize("N", NS)
def test_permutation_expansion(N):
    P = sum(np.kron(ta.basis_t(a, N), ta.dual_basis_t(a, N)) for a in ta.basis_indices(N)) / N
    np.testing.assert_allclose(P, ta.permutation(N), atol=1e-12)
    np.testing.assert_allclose(ta.kron_stack(N).sum(0) / N, ta.permutation(N), atol=1e-12)
    rng = np.random.default_rng(N)
    A, B = rand(rng, N, N), rand(rng, N, N)
    np.testing.assert_allclose(P @ np.kron(A, B) @ P, np.kron(B, A), atol=1e-12)


@pytest.mark.parametrize("N", NS)
def test_component_round_trip(N):
    rng = np.random.default_rng(7)
    S = rand(rng, N, N)
    comp = ta.components(S)
    np.testing.assert_allclose(ta.from_components(comp, N), S, atol=1e-12)
    batch = rand(rng, 5, N, N)
    np.testing.assert_allclose(ta.from_components(ta.component_vector(batch), N), batch, atol=1e-12)
    assert abs(comp[(0, 0)] - np.trace(S) / N) < 1e-13


def test_embed_and_slots():
    N = 2
    rng = np.random.default_rng(1)
    A, B, C = rand(rng, N, N), rand(rng, N, N), rand(rng, N, N)
    I = np.eye(N)
    np.testing.assert_allclose(ta.embed(np.kron(A, B), (1, 3), 3, N), np.kron(np.kron(A, I), B))
    np.testing.assert_allclose(ta.embed(np.kron(A, B), (2, 3), 3, N), np.kron(I, np.kron(A, B)))
    np.testing.assert_allclose(ta.embed(np.kron(A, B), (3, 1), 3, N), np.kron(np.kron(B, I), A))
    np.testing.assert_allclose(ta.swap12(np.kron(A, B), N), np.kron(B, A))
    abc = np.kron(np.kron(A, B), C)
    np.testing.assert_allclose(ta.permute_slots(abc, (2, 0, 1), N), np.kron(np.kron(B, C), A))
    with pytest.raises(ValueError):
        ta.embed(np.kron(A, B), (1, 1), 3, N)
    with pytest.raises(ValueError):
        ta.arity_of(np.eye(6), 4)


def test_partial_trace():
    N = 3
    rng = np.random.default_rng(2)
    A, B, S = rand(rng, N, N), rand(rng, N, N), rand(rng, N, N)
    out = ta.partial_trace(np.kron(A, B), (2,), S, N)
    np.testing.assert_allclose(out, A * np.trace(B @ S), atol=1e-12)
    out1 = ta.partial_trace(np.kron(A, B), (1,), S, N)
    np.testing.assert_allclose(out1, B * np.trace(A @ S), atol=1e-12)
    C = rand(rng, N, N)
    out23 = ta.partial_trace(np.kron(np.kron(A, B), C), (2, 3), np.kron(S, S), N)
    np.testing.assert_allclose(out23, A * np.trace(B @ S) * np.trace(C @ S), atol=1e-10)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), N=st.sampled_from([2, 3, 4]))
def test_permute_slots_is_a_group_action(seed, N):
    rng = np.random.default_rng(seed)
    op = rand(rng, N ** 3, N ** 3)
    p = list(rng.permutation(3))
    q = list(rng.permutation(3))
    composed = [q[p[i]] for i in range(3)]
    lhs = ta.permute_slots(ta.permute_slots(op, p, N), q, N)
    np.testing.assert_allclose(lhs, ta.permute_slots(op, composed, N), atol=1e-12)
