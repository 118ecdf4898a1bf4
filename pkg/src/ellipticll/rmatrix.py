"""Elliptic Baxter-Belavin R-matrix, its classical expansion and the maps E, J.

Every operator here has the shape ``sum_a c_a(...) T_a (x) T_{-a}`` with a
scalar coefficient per basis index, so the family works with coefficient
vectors (ordered like :func:`tensor_algebra.basis_indices`) and assembles
dense operators only when asked.
"""
from __future__ import annotations

from functools import cached_property

import numpy as np

from . import special_functions as sf
from .special_functions import EllipticContext, NearPoleError
from .tensor_algebra import (basis_indices, basis_stack, canonical_index, kron_stack,
                             partial_trace, component_vector, from_components)


class RMatrixFamily:
    """All R-matrix data for a fixed rank and modulus.

    Lattice constants are computed lazily and cached; the family is read-only
    after construction.  ``weights`` scales the coefficient of each basis
    index in every assembled operator (all ones unless perturbed, which is
    only meant for negative controls).
    """

    def __init__(self, ctx: EllipticContext, weights=None):
        self.ctx = ctx
        self.N = ctx.N
        self.indices = basis_indices(self.N)
        a = np.array(self.indices)
        self.a2 = a[:, 1].astype(float)
        self.lattice = (a[:, 0] + a[:, 1] * ctx.tau) / self.N
        self.weights = np.ones(self.N ** 2, dtype=complex) if weights is None \
            else np.asarray(weights, dtype=complex)

    def __repr__(self):
        return f"RMatrixFamily(N={self.N}, tau={self.ctx.tau!r})"

    def perturbed(self, a, factor: complex) -> "RMatrixFamily":
        """Copy of the family with the coefficient of index ``a`` scaled by ``factor``."""
        w = self.weights.copy()
        w[self.indices.index(canonical_index(a, self.N))] *= factor
        return RMatrixFamily(self.ctx, w)

    @property
    def T(self) -> np.ndarray:
        return basis_stack(self.N)[0]

    @property
    def T_dual(self) -> np.ndarray:
        return basis_stack(self.N)[1]

    # lattice constants (index 0 is a placeholder for a = (0, 0))

    @cached_property
    def lattice_e1(self) -> np.ndarray:
        out = np.zeros(self.N ** 2, dtype=complex)
        out[1:] = sf.e1(self.lattice[1:], self.ctx)
        return out

    @cached_property
    def lattice_e2(self) -> np.ndarray:
        out = np.zeros(self.N ** 2, dtype=complex)
        out[1:] = sf.e2(self.lattice[1:], self.ctx)
        return out

    @cached_property
    def lattice_p(self) -> np.ndarray:
        out = np.zeros(self.N ** 2, dtype=complex)
        out[1:] = sf.weierstrass_p(self.lattice[1:], self.ctx)
        return out

    # coefficient vectors

    def _exp(self, z):
        return np.exp(2j * np.pi * self.a2 * z / self.N)

    def _phi(self, z, u):
        try:
            return sf.kronecker_phi(z, u, self.ctx)
        except NearPoleError as err:
            bad = self._offending(z, u)
            raise NearPoleError(f"{err.argument} (basis index {bad})", err.value,
                                err.magnitude) from err

    def _offending(self, z, u):
        u = np.broadcast_to(np.asarray(u, dtype=complex), self.lattice.shape)
        dist = np.minimum(sf.lattice_distance(u, self.ctx),
                          sf.lattice_distance(u + z, self.ctx))
        return self.indices[int(np.argmin(dist))]

    def quantum_coeffs(self, hbar, z) -> np.ndarray:
        z = complex(z)
        return self._exp(z) * self._phi(z, self.lattice + hbar)

    def classical_coeffs(self, z) -> np.ndarray:
        z = complex(z)
        out = np.empty(self.N ** 2, dtype=complex)
        out[0] = sf.e1(z, self.ctx)
        out[1:] = self._exp(z)[1:] * self._phi(z, self.lattice[1:])
        return out

    def classical_coeffs_dz(self, z) -> np.ndarray:
        z = complex(z)
        out = np.empty(self.N ** 2, dtype=complex)
        out[0] = -sf.e2(z, self.ctx)
        u = self.lattice[1:]
        k = 2j * np.pi * self.a2[1:] / self.N
        phi = self._phi(z, u)
        out[1:] = self._exp(z)[1:] * phi * (k + sf.e1(z + u, self.ctx) - sf.e1(z, self.ctx))
        return out

    def m_coeffs(self, z) -> np.ndarray:
        z = complex(z)
        out = np.empty(self.N ** 2, dtype=complex)
        out[0] = sf.rho(z, self.ctx)
        u = self.lattice[1:]
        if abs(z) < 1e-12:
            out[1:] = -self.lattice_e2[1:]
            return out
        out[1:] = self._exp(z)[1:] * sf.kronecker_f(z, u, self.ctx)
        return out

    def m_coeffs_dz(self, z) -> np.ndarray:
        z = complex(z)
        out = np.empty(self.N ** 2, dtype=complex)
        out[0] = sf.rho_dz(z, self.ctx)
        u = self.lattice[1:]
        k = 2j * np.pi * self.a2[1:] / self.N
        f = sf.kronecker_f(z, u, self.ctx)
        fz = sf.kronecker_f_dz(z, u, self.ctx)
        out[1:] = self._exp(z)[1:] * (k * f + fz)
        return out

    @cached_property
    def r0_coeffs(self) -> np.ndarray:
        out = 2j * np.pi * self.a2 / self.N + self.lattice_e1
        out[0] = 0.0
        return out

    @cached_property
    def m0_coeffs(self) -> np.ndarray:
        out = -self.lattice_e2.copy()
        out[0] = self.ctx.p_shift
        return out

    # dense operators on C^N (x) C^N

    def assemble(self, coeffs) -> np.ndarray:
        return np.tensordot(np.asarray(coeffs) * self.weights, kron_stack(self.N), axes=1)

    def quantum_r(self, hbar, z) -> np.ndarray:
        """R^hbar_12(z) = sum_a T_a (x) T_{-a} exp(2 pi i a2 z / N) phi(z, omega_a + hbar)."""
        return self.assemble(self.quantum_coeffs(hbar, z))

    def classical_r(self, z) -> np.ndarray:
        return self.assemble(self.classical_coeffs(z))

    def classical_r_dz(self, z) -> np.ndarray:
        return self.assemble(self.classical_coeffs_dz(z))

    def m_matrix(self, z) -> np.ndarray:
        return self.assemble(self.m_coeffs(z))

    def m_matrix_dz(self, z) -> np.ndarray:
        return self.assemble(self.m_coeffs_dz(z))

    def r0(self) -> np.ndarray:
        return self.assemble(self.r0_coeffs)

    def m0(self) -> np.ndarray:
        return self.assemble(self.m0_coeffs)

    # linear maps on Mat(N)

    def apply(self, coeffs, A) -> np.ndarray:
        """sum_a c_a A_a T_a, i.e. (1/N) tr_2(X_12 (1 (x) A)) for X = sum_a c_a T_a (x) T_{-a}.

        Works on a single matrix or a batch of shape (..., N, N).
        """
        return from_components(np.asarray(coeffs) * self.weights * component_vector(A), self.N)

    def e_map(self, A) -> np.ndarray:
        """E(A) = sum_{a != 0} T_a A_a (2 pi i a2 / N + E1(omega_a))."""
        return self.apply(self.r0_coeffs, A)

    def e_map_trace(self, A) -> np.ndarray:
        """E(A) through the partial trace (1/N) tr_2(r0_12 (1 (x) A))."""
        return partial_trace(self.r0(), (2,), A, self.N) / self.N

    def j_map(self, S) -> np.ndarray:
        """J(S) = M(S, 0): theta'''(0)/(3 theta'(0)) S_0 - sum_{a != 0} T_a S_a E2(omega_a)."""
        return self.apply(self.m0_coeffs, S)

    def j_map_trace(self, S) -> np.ndarray:
        """J(S) through the partial trace (1/N) tr_2(m_12(0) (1 (x) S))."""
        return partial_trace(self.m0(), (2,), S, self.N) / self.N

    def j_map_weierstrass(self, S) -> np.ndarray:
        """J(S) in the form theta'''(0)/(3 theta'(0)) S - sum_{a != 0} T_a S_a p(omega_a)."""
        coeffs = -self.lattice_p.copy()
        coeffs[0] = 0.0
        return self.ctx.p_shift * np.asarray(S) + self.apply(coeffs, S)

    @cached_property
    def e_matrix(self) -> np.ndarray:
        """E as an (N*N, N*N) matrix acting on row-major flattened matrices."""
        return self._as_matrix(self.e_map)

    @cached_property
    def j_matrix(self) -> np.ndarray:
        return self._as_matrix(self.j_map)

    def _as_matrix(self, fn) -> np.ndarray:
        N = self.N
        basis = np.eye(N * N, dtype=complex).reshape(N * N, N, N)
        return fn(basis).reshape(N * N, N * N).T
