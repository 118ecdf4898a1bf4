"""Periodic matrix fields on the circle and constrained initial data."""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import expm


@dataclass(frozen=True)
class SpinField:
    """Samples S(x_j), x_j = 2 pi j / M, of a matrix field with S^2 = c S."""

    values: np.ndarray  # (M, N, N)
    c: complex
    t: float = 0.0
    step_count: int = 0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.ndim != 3 or v.shape[1] != v.shape[2]:
            raise ValueError(f"field values must have shape (M, N, N), got {v.shape}")
        M = v.shape[0]
        if M < 8 or M & (M - 1):
            raise ValueError(f"grid size must be a power of two >= 8, got {M}")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "c", complex(self.c))

    @property
    def M(self) -> int:
        return self.values.shape[0]

    @property
    def N(self) -> int:
        return self.values.shape[1]

    @property
    def dx(self) -> float:
        return 2 * np.pi / self.M

    @property
    def x(self) -> np.ndarray:
        return grid(self.M)

    def with_values(self, values, **kw) -> "SpinField":
        return replace(self, values=values, **kw)


def grid(M: int) -> np.ndarray:
    return 2 * np.pi * np.arange(M) / M


def spectral_derivative(values, order: int = 1) -> np.ndarray:
    """Fourier differentiation along axis 0 of periodic samples on [0, 2 pi)."""
    if isinstance(values, SpinField):
        values = values.values
    values = np.asarray(values)
    M = values.shape[0]
    if M < 8:
        raise ValueError("spectral differentiation needs M >= 8")
    k = np.fft.fftfreq(M, d=1.0 / M)
    if order % 2 == 1 and M % 2 == 0:
        k[M // 2] = 0.0
    mult = (1j * k) ** order
    shape = (M,) + (1,) * (values.ndim - 1)
    return np.fft.ifft(mult.reshape(shape) * np.fft.fft(values, axis=0), axis=0)


def constraint_residual(values, c) -> float:
    """max over the grid of ||S^2 - c S||_sup."""
    v = np.asarray(values)
    return float(np.max(np.abs(v @ v - c * v)))


def rank_one_matrix(xi, psi, c) -> np.ndarray:
    """c xi psi / (psi . xi): rank one with S^2 = c S and tr S = c."""
    xi = np.asarray(xi, dtype=complex)
    psi = np.asarray(psi, dtype=complex)
    pairing = psi @ xi
    if abs(pairing) < 1e-12:
        raise ValueError("psi . xi must be nonzero")
    return c * np.outer(xi, psi) / pairing


def random_complex(rng, shape, scale=1.0) -> np.ndarray:
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_projector(N: int, rank: int, rng, spread: float = 0.3) -> np.ndarray:
    """Oblique idempotent of the given rank, V diag(1..1, 0..0) V^-1 with V near identity."""
    if not 1 <= rank < N:
        raise ValueError(f"rank must be in [1, {N - 1}], got {rank}")
    V = np.eye(N) + random_complex(rng, (N, N), spread / np.sqrt(N))
    D = np.diag([1.0] * rank + [0.0] * (N - rank))
    return V @ D @ np.linalg.inv(V)


def random_spin_matrix(N: int, c, rng, rank: int = 1) -> np.ndarray:
    return c * random_projector(N, rank, rng)


def constrained_field(N: int, M: int, c, rng, rank: int = 1, scale: float = 0.3,
                      constant: bool = False) -> SpinField:
    """S(x) = c g(x) P0 g(x)^-1 with g(x) = exp(A cos x + B sin x), ||A||, ||B|| <= scale.

    Eigenvalues are 0 and c at every node, so S^2 = c S holds to rounding.  With
    ``rank=1`` and ``c`` given, tr S = c as required for the rank-one equation.
    """
    P0 = random_projector(N, rank, rng)
    if constant:
        values = np.broadcast_to(c * P0, (M, N, N)).copy()
        return SpinField(values, c)
    A = random_complex(rng, (N, N))
    B = random_complex(rng, (N, N))
    A *= scale / np.linalg.norm(A, 2)
    B *= scale / np.linalg.norm(B, 2)
    x = grid(M)
    values = np.empty((M, N, N), dtype=complex)
    for j, xj in enumerate(x):
        g = expm(A * np.cos(xj) + B * np.sin(xj))
        values[j] = c * g @ P0 @ np.linalg.inv(g)
    return SpinField(values, c)
