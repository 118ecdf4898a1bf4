"""N = 2 cross-checks against the XYZ Landau-Lifshitz Lax pair in Pauli form.

Dictionary between the T_a basis and Pauli matrices for N = 2:
T_(0,1) = sigma_1, T_(1,1) = sigma_2, T_(1,0) = -sigma_3, and the lattice
point of index a is the half period omega_k of the matching sigma_k.
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import expm

from . import special_functions as sf
from .fields import SpinField, grid, random_complex, spectral_derivative
from .lax import lax_l, lax_l_dz, v_field
from .rmatrix import RMatrixFamily
from .tensor_algebra import commutator, sup_norm

SIGMA = np.array([
    [[1, 0], [0, 1]],
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)


def pauli_components(S) -> np.ndarray:
    """(S_0, S_1, S_2, S_3) with S = sum_k S_k sigma_k."""
    return np.einsum("...ij,kji->...k", np.asarray(S), SIGMA) / 2


def anisotropy_dictionary(S, ctx) -> np.ndarray:
    """sum_k J_k S_k sigma_k with J_k = p(omega_k)."""
    comps = pauli_components(S)
    J = [sf.weierstrass_p(w, ctx) for w in sf.half_periods(ctx)]
    return sum(J[k - 1] * comps[..., k, None, None] * SIGMA[k] for k in (1, 2, 3))


def sklyanin_r(z, ctx) -> np.ndarray:
    """sigma_0 (x) sigma_0 E1(z) + sum_k sigma_k (x) sigma_k varphi_k(z)."""
    out = np.kron(SIGMA[0], SIGMA[0]) * sf.e1(z, ctx)
    for k in (1, 2, 3):
        out = out + np.kron(SIGMA[k], SIGMA[k]) * sf.phi_k(k, z, ctx)
    return out


def sklyanin_u(S, z, ctx) -> np.ndarray:
    """sigma_0 S_0 E1(z) + sum_k sigma_k S_k varphi_k(z)."""
    comps = pauli_components(S)
    out = SIGMA[0] * comps[0] * sf.e1(z, ctx)
    for k in (1, 2, 3):
        out = out + SIGMA[k] * comps[k] * sf.phi_k(k, z, ctx)
    return out


def sklyanin_v(S, W, z, ctx) -> np.ndarray:
    """Traceless Sklyanin V: sum_k S_k sigma_k varphi_1 varphi_2 varphi_3 / varphi_k + sum_k W_k sigma_k varphi_k."""
    s = pauli_components(S)
    w = pauli_components(W)
    phis = [sf.phi_k(k, z, ctx) for k in (1, 2, 3)]
    prod = phis[0] * phis[1] * phis[2]
    return sum(SIGMA[k] * (s[..., k, None, None] * prod / phis[k - 1]
                           + w[..., k, None, None] * phis[k - 1]) for k in (1, 2, 3))


def traceless_field(M: int, lam, rng, scale: float = 0.3) -> np.ndarray:
    """S(x) = lam g(x) sigma_3 g(x)^-1, so S^2 = lam^2 at every node."""
    A = random_complex(rng, (2, 2))
    B = random_complex(rng, (2, 2))
    A *= scale / np.linalg.norm(A, 2)
    B *= scale / np.linalg.norm(B, 2)
    out = np.empty((M, 2, 2), dtype=complex)
    for j, x in enumerate(grid(M)):
        g = expm(A * np.cos(x) + B * np.sin(x))
        out[j] = lam * g @ SIGMA[3] @ np.linalg.inv(g)
    return out


def sklyanin_checks(ctx, rng, n_z: int = 5, M: int = 64) -> dict[str, float]:
    """Named residuals of the N = 2 reduction; every value should be near zero."""
    if ctx.N != 2:
        raise ValueError("the Sklyanin reduction needs N = 2")
    fam = RMatrixFamily(ctx)
    zs = [complex(rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4) * ctx.tau.imag)
          for _ in range(n_z)]
    zs = [z for z in zs if abs(z) > 0.05] or [0.23 + 0.11j]
    out = {}
    out["r_matrix_pauli"] = max(sup_norm(fam.classical_r(z) - sklyanin_r(z, ctx)) for z in zs)
    out["r0_vanishes"] = sup_norm(fam.r0())
    S = random_complex(rng, (2, 2))
    out["lax_u_pauli"] = max(sup_norm(lax_l(S, z, fam) - sklyanin_u(S, z, ctx)) for z in zs)
    # J(S) = p_shift S - sum_k p(omega_k) S_k sigma_k  (scalar part only in S_0)
    S0 = S - np.trace(S) / 2 * np.eye(2)
    out["anisotropy_dictionary"] = sup_norm(
        commutator(S0, fam.j_map(S0)) + commutator(S0, anisotropy_dictionary(S0, ctx)))
    z0 = zs[0]
    out["phi_squares"] = float(max(
        abs(sf.phi_k(k, z0, ctx) ** 2 - sf.weierstrass_p(z0, ctx) + sf.weierstrass_p(w, ctx))
        for k, w in zip((1, 2, 3), sf.half_periods(ctx))))
    # traceless field with S^2 = lam^2, solution T = [S, S'] / (4 lam^2) of S' = [S, T]
    lam = 0.6 + 0.2j
    St = traceless_field(M, lam, rng)
    dSt = spectral_derivative(St, 1)
    T = commutator_batch(St, dSt) / (4 * lam ** 2)
    out["t_solution"] = sup_norm(dSt - commutator_batch(St, T))
    # rank-one field S = c/2 + traceless part: general V equals c times the Sklyanin V
    c = 2 * lam
    S1 = c / 2 * np.eye(2) + St
    field = SpinField(S1, c)
    dS1 = spectral_derivative(S1, 1)
    res = 0.0
    for z in zs:
        V = v_field(field.values, dS1, z, fam, c) / c
        T_intro = commutator_batch(S1, dS1) / c ** 2
        res = max(res, sup_norm(V - (-lax_l_dz(S1, z, fam) + lax_l(T_intro, z, fam))))
        Vt = V - np.trace(V, axis1=1, axis2=2)[:, None, None] / 2 * np.eye(2)
        res = max(res, sup_norm(Vt - sklyanin_v(S1, T_intro, z, ctx)))
    out["v_reconstruction"] = res
    return out


def commutator_batch(a, b):
    return a @ b - b @ a
