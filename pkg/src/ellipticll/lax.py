"""Lax matrices for the elliptic top and the U-V pair of the Landau-Lifshitz field.

Matrix arguments may carry leading batch axes (a grid of N x N matrices);
every map here is applied entrywise along them.
"""
from __future__ import annotations

import numpy as np

from .fields import SpinField, spectral_derivative
from .rmatrix import RMatrixFamily
from .tensor_algebra import commutator, partial_trace, sup_norm


class ConstraintError(ValueError):
    """Input matrix violates S^2 = c S or the rank-one requirement."""


def _comm(a, b):
    return a @ b - b @ a


def _trace(a):
    return np.trace(a, axis1=-2, axis2=-1)


def check_constraint(S, c, tol: float = 1e-8) -> float:
    S = np.asarray(S)
    res = float(np.max(np.abs(S @ S - c * S)))
    if res > tol:
        raise ConstraintError(f"||S^2 - c S|| = {res:.3e} exceeds {tol:.1e}")
    return res


def check_rank_one(S, tol: float = 1e-8) -> None:
    sv = np.linalg.svd(np.asarray(S), compute_uv=False)
    ratio = np.max(sv[..., 1] / sv[..., 0])
    if ratio > tol:
        raise ConstraintError(f"S is not rank one: s2/s1 = {ratio:.3e}")


# Lax matrices of the top

def lax_l(S, z, fam: RMatrixFamily):
    """L(S, z) = (1/N) tr_2(r_12(z) (1 (x) S)), via components: sum_a r_a(z) S_a T_a."""
    return fam.apply(fam.classical_coeffs(z), S)


def lax_l_trace(S, z, fam: RMatrixFamily):
    return partial_trace(fam.classical_r(z), (2,), S, fam.N) / fam.N


def lax_l_dz(S, z, fam: RMatrixFamily):
    """z-derivative of L(S, z) from analytic derivatives of the coefficients."""
    return fam.apply(fam.classical_coeffs_dz(z), S)


def lax_m(S, z, fam: RMatrixFamily):
    """M(S, z) = (1/N) tr_2(m_12(z) (1 (x) S))."""
    return fam.apply(fam.m_coeffs(z), S)


def lax_m_trace(S, z, fam: RMatrixFamily):
    return partial_trace(fam.m_matrix(z), (2,), S, fam.N) / fam.N


def top_rhs(S, fam: RMatrixFamily):
    """dS/dt = [S, J(S)]."""
    return _comm(S, fam.j_map(S))


def check_lax_top(S, z, fam: RMatrixFamily) -> float:
    """sup-norm of [L(S,z), M(S,z)] - L([S, J(S)], z)."""
    L = lax_l(S, z, fam)
    M = lax_m(S, z, fam)
    return sup_norm(commutator(L, M) - lax_l(top_rhs(S, fam), z, fam))


# U-V pair of the field theory

def t_matrix(S, dS, c):
    """T = -[S, dS] / c^2, the solution of -dS = [S, T] when S^2 = c S."""
    if c is None or abs(c) < 1e-10:
        raise ConstraintError(f"constraint constant must be nonzero, got {c!r}")
    return -_comm(S, dS) / c ** 2


def u_field(S, z, fam: RMatrixFamily):
    return lax_l(S, z, fam)


def v1_field(S, z, fam: RMatrixFamily, c):
    """V1 = -c dL(S)/dz + L(S E(S) + E(S) S)."""
    ES = fam.e_map(S)
    return -c * lax_l_dz(S, z, fam) + lax_l(S @ ES + ES @ S, z, fam)


def v1_alternative(S, z, fam: RMatrixFamily):
    """V1 written as L(S)^2 - 2 s0 M(S) - tr_12(m_12(0) S (x) S) / N^2, valid on S^2 = c S.

    The scalar term carries 1/N^2: each partial trace of a slot paired with
    L(., z) = (1/N) tr(...) contributes one factor 1/N.
    """
    N = fam.N
    S = np.asarray(S)
    L = lax_l(S, z, fam)
    s0 = np.asarray(_trace(S) / N)[..., None, None]
    scalar = np.asarray(m0_pairing(S, S, fam) / N ** 2)[..., None, None]
    return L @ L - 2 * s0 * lax_m(S, z, fam) - scalar * np.eye(N)


def m0_pairing(A, B, fam: RMatrixFamily):
    """tr_{12}(m_12(0) (A (x) B)) = N tr(J(B) A)."""
    return fam.N * _trace(fam.j_map(np.asarray(B)) @ np.asarray(A))


def v_field(S, dS, z, fam: RMatrixFamily, c, tol: float = 1e-8):
    """V = V1 + V2 with V2 = -c L(T, z)."""
    check_constraint(S, c, tol)
    return v1_field(S, z, fam, c) - c * lax_l(t_matrix(S, dS, c), z, fam)


def ll_rhs_general(S, dS, ddS, fam: RMatrixFamily, c, tol: float | None = 1e-8):
    """dS/dt of the higher rank Landau-Lifshitz equation for S^2 = c S (any rank).

    The zero-curvature condition holds at every rank, but for rank >= 2 this
    right-hand side is not tangent to S^2 = c S (the symmetrized term
    (S E(S) + E(S) S)' does not reduce to a commutator), so a time-stepped
    solution leaves the constraint surface immediately.
    """
    if tol is not None:
        check_constraint(S, c, tol)
    N = fam.N
    E = fam.e_map
    ES, EdS = E(S), E(dS)
    s0 = _trace(S) / N
    comm_s_ds = _comm(S, dS)
    if np.ndim(s0):
        s0 = s0[..., None, None]
    out = _comm(S, ddS) / c
    out = out + dS @ ES + S @ EdS + EdS @ S + ES @ dS
    out = out + 2 * s0 * _comm(S, fam.j_map(S))
    out = out - _comm(S, E(comm_s_ds)) / c - _comm(ES, comm_s_ds) / c
    return out


def ll_rhs_rank1(S, dS, ddS, fam: RMatrixFamily, c=None, tol: float | None = 1e-8):
    """(1/c)[S, S''] + (2c/N)[S, J(S)] - 2[S, E(S')] with c = tr S."""
    S = np.asarray(S)
    if tol is not None:
        check_rank_one(S, tol)
    if c is None:
        c = _trace(S)
        if np.ndim(c):
            c = c[..., None, None]
    N = fam.N
    return _comm(S, ddS) / c + (2 * c / N) * _comm(S, fam.j_map(S)) \
        - 2 * _comm(S, fam.e_map(dS))


def rank_one_identity_parts(S, dS, fam: RMatrixFamily, c):
    """Left and right sides of the rank-one identity reducing the general equation."""
    E = fam.e_map
    ES, EdS = E(S), E(dS)
    comm_s_ds = _comm(S, dS)
    d_sym = dS @ ES + S @ EdS + EdS @ S + ES @ dS
    lhs = c * d_sym + _comm(E(comm_s_ds), S) + _comm(comm_s_ds, ES)
    rhs = 2 * c * _comm(EdS, S)
    return lhs, rhs


def check_rank_one_identity(S, dS, fam: RMatrixFamily, c=None, check_rank: bool = True) -> float:
    """sup-norm of c d(SE(S)+E(S)S) + [E([S,S']),S] + [[S,S'],E(S)] - 2c[E(S'),S]."""
    S = np.asarray(S)
    if check_rank:
        check_rank_one(S)
    if c is None:
        c = _trace(S)
        if np.ndim(c):
            c = c[..., None, None]
    lhs, rhs = rank_one_identity_parts(S, dS, fam, c)
    return sup_norm(lhs - rhs)


def zs_residual(field: SpinField, dtS, z, fam: RMatrixFamily) -> float:
    """max over the grid of ||dU/dt - dV/dx + [U, V]|| for U = L(S, z), V = V1 + V2."""
    S = field.values
    c = field.c
    dS = spectral_derivative(S, 1)
    U = lax_l(S, z, fam)
    dtU = lax_l(np.asarray(dtS), z, fam)
    V = v_field(S, dS, z, fam, c)
    dxV = spectral_derivative(V, 1)
    return sup_norm(dtU - dxV + _comm(U, V))
