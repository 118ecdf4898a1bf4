"""Dense linear algebra on Mat(N) and its 2- and 3-fold tensor powers.

Operators on the k-fold tensor power are plain ``(N**k, N**k)`` complex
arrays in the row-major Kronecker convention, so ``np.kron(A, B)`` is
``A (x) B``.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import product

import numpy as np


def canonical_index(a, N: int) -> tuple[int, int]:
    return (int(a[0]) % N, int(a[1]) % N)


def basis_indices(N: int) -> list[tuple[int, int]]:
    """All a in Z_N x Z_N in lexicographic order, (0, 0) first."""
    return list(product(range(N), range(N)))


@lru_cache(maxsize=None)
def _clock_shift(N: int) -> tuple[np.ndarray, np.ndarray]:
    q1 = np.diag(np.exp(2j * np.pi * np.arange(1, N + 1) / N))
    q2 = np.roll(np.eye(N, dtype=complex), 1, axis=1)
    return q1, q2


def _raw_basis(a1: int, a2: int, N: int) -> np.ndarray:
    q1, q2 = _clock_shift(N)
    phase = np.exp(1j * np.pi * a1 * a2 / N)
    return phase * np.linalg.matrix_power(q1, a1 % N) @ np.linalg.matrix_power(q2, a2 % N)


def basis_t(a, N: int) -> np.ndarray:
    """T_a = exp(pi i a1 a2 / N) Q1^a1 Q2^a2 for the canonical representative of a."""
    a1, a2 = canonical_index(a, N)
    return _raw_basis(a1, a2, N)


def dual_basis_t(a, N: int) -> np.ndarray:
    """T_{-a}, taken with the literal negative (-a1, -a2) of the canonical a.

    This equals the inverse of ``basis_t(a, N)``, so tr(T_a T_{-a}) = N for every
    N.  Reducing -a modulo N instead flips the sign for some a when N is even.
    """
    a1, a2 = canonical_index(a, N)
    return _raw_basis(-a1, -a2, N)


@lru_cache(maxsize=None)
def basis_stack(N: int) -> tuple[np.ndarray, np.ndarray]:
    """Stacked (T_a, T_{-a}) over ``basis_indices(N)``, each of shape (N*N, N, N)."""
    idx = basis_indices(N)
    t = np.stack([basis_t(a, N) for a in idx])
    td = np.stack([dual_basis_t(a, N) for a in idx])
    t.setflags(write=False)
    td.setflags(write=False)
    return t, td


@lru_cache(maxsize=None)
def kron_stack(N: int) -> np.ndarray:
    """Stacked T_a (x) T_{-a}, shape (N*N, N*N, N*N)."""
    t, td = basis_stack(N)
    out = np.einsum("aij,akl->aikjl", t, td).reshape(N * N, N * N, N * N)
    out.setflags(write=False)
    return out


def components(S: np.ndarray) -> dict[tuple[int, int], complex]:
    """Coefficients S_a = tr(S T_{-a}) / N of S = sum_a S_a T_a."""
    S = np.asarray(S)
    N = S.shape[0]
    vec = component_vector(S)
    return {a: complex(v) for a, v in zip(basis_indices(N), vec)}


def component_vector(S: np.ndarray) -> np.ndarray:
    """``components`` as an array ordered like ``basis_indices``; batched over leading axes."""
    S = np.asarray(S)
    N = S.shape[-1]
    _, td = basis_stack(N)
    return np.einsum("...ij,aji->...a", S, td) / N


def from_components(comp, N: int) -> np.ndarray:
    """Inverse of ``components``: accepts the dict or the ordered vector."""
    t, _ = basis_stack(N)
    if isinstance(comp, dict):
        vec = np.zeros(N * N, dtype=complex)
        for i, a in enumerate(basis_indices(N)):
            vec[i] = comp.get(a, 0.0)
    else:
        vec = np.asarray(comp)
    return np.einsum("...a,aij->...ij", vec, t)


@lru_cache(maxsize=None)
def _permutation(N: int) -> np.ndarray:
    P = np.zeros((N * N, N * N), dtype=complex)
    for i in range(N):
        for j in range(N):
            P[i * N + j, j * N + i] = 1.0
    P.setflags(write=False)
    return P


def permutation(N: int) -> np.ndarray:
    """P_12 = sum_ij E_ij (x) E_ji."""
    return _permutation(N).copy()


def arity_of(op: np.ndarray, N: int) -> int:
    dim = op.shape[0]
    k = int(round(np.log(dim) / np.log(N)))
    if N ** k != dim or op.shape != (dim, dim):
        raise ValueError(f"operator of shape {op.shape} is not on a tensor power of C^{N}")
    return k


def permute_slots(op: np.ndarray, order, N: int) -> np.ndarray:
    """Relabel tensor slots: slot i of ``op`` moves to slot ``order[i]`` (0-based)."""
    k = len(order)
    t = np.asarray(op).reshape((N,) * (2 * k))
    inv = np.argsort(order)
    axes = list(inv) + [k + i for i in inv]
    return t.transpose(axes).reshape(N ** k, N ** k)


def embed(op: np.ndarray, slots, arity: int, N: int) -> np.ndarray:
    """Place an operator acting on ``len(slots)`` factors into the given 1-based slots.

    ``embed(r, (1, 3), 3, N)`` is r_13; ``embed(r, (2, 1), 2, N)`` is r_21.
    Remaining slots carry the identity.
    """
    slots = tuple(int(s) for s in slots)
    k = len(slots)
    if len(set(slots)) != k or not all(1 <= s <= arity for s in slots):
        raise ValueError(f"invalid slots {slots} for arity {arity}")
    if arity_of(op, N) != k:
        raise ValueError(f"operator arity does not match {k} slots")
    full = np.kron(op, np.eye(N ** (arity - k), dtype=complex))
    rest = [s for s in range(1, arity + 1) if s not in slots]
    order = [s - 1 for s in slots + tuple(rest)]
    return permute_slots(full, order, N)


def swap12(op: np.ndarray, N: int) -> np.ndarray:
    """op_21 = P op_12 P."""
    return permute_slots(op, (1, 0), N)


def partial_trace(op: np.ndarray, traced_slots, weight: np.ndarray, N: int) -> np.ndarray:
    """tr over ``traced_slots`` of op multiplied on the right by ``weight`` in those slots.

    ``partial_trace(r, (2,), S, N)`` is tr_2(r_12 (1 (x) S)).  The weight acts on
    ``len(traced_slots)`` factors (for two slots pass e.g. ``np.kron(A, B)``).
    """
    k = arity_of(op, N)
    traced = tuple(int(s) for s in traced_slots)
    if arity_of(np.asarray(weight), N) != len(traced):
        raise ValueError("weight arity does not match traced slots")
    prod = op @ embed(np.asarray(weight, dtype=complex), traced, k, N)
    keep = [s for s in range(1, k + 1) if s not in traced]
    # bring kept slots to the front, traced ones to the back
    order = [0] * k
    for pos, s in enumerate(keep + list(traced)):
        order[s - 1] = pos
    t = permute_slots(prod, order, N)
    nk, nt = N ** len(keep), N ** len(traced)
    return np.trace(t.reshape(nk, nt, nk, nt), axis1=1, axis2=3)


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def sup_norm(a) -> float:
    """Entrywise max norm."""
    return float(np.max(np.abs(a)))
