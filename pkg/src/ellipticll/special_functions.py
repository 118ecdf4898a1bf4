"""Odd Jacobi theta function and the elliptic functions built from it.

All functions accept scalars or numpy arrays for the complex arguments and
broadcast in the usual way.  The theta series is

    theta(z) = -sum_k exp(pi i tau (k + 1/2)^2 + 2 pi i (z + 1/2)(k + 1/2))

which coincides with ``mpmath.jtheta(1, pi z, exp(pi i tau))``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np


class PrecisionError(ArithmeticError):
    """Theta series did not converge within ``series_cap`` terms."""


class NearPoleError(ArithmeticError):
    """An argument sits too close to a zero of theta appearing in a denominator."""

    def __init__(self, argument: str, value, magnitude: float):
        self.argument = argument
        self.value = value
        self.magnitude = magnitude
        super().__init__(
            f"near pole: |theta({argument})| = {magnitude:.3e} at {argument} = {value!r}"
        )


@dataclass(frozen=True)
class EllipticContext:
    """Rank, modulus and series controls shared by every evaluation.

    Parameters
    ----------
    N : int
        Rank of the matrix algebra, ``N >= 2``.
    tau : complex
        Modulus of the elliptic curve, ``Im(tau) > 0``.
    series_tol : float
        Relative term-magnitude cutoff for the theta series.
    series_cap : int
        Maximal number of summation indices on each side of the window.
    """

    N: int = 2
    tau: complex = 1j
    series_tol: float = 1e-14
    series_cap: int = 200

    def __post_init__(self):
        object.__setattr__(self, "tau", complex(self.tau))
        if int(self.N) != self.N or self.N < 2:
            raise ValueError(f"rank N must be an integer >= 2, got {self.N!r}")
        if not self.tau.imag > 0:
            raise ValueError(f"Im(tau) must be positive, got tau={self.tau!r}")
        if not 0 < self.series_tol <= 1e-8:
            raise ValueError(f"series_tol must lie in (0, 1e-8], got {self.series_tol!r}")
        if self.series_cap < 50:
            raise ValueError(f"series_cap must be >= 50, got {self.series_cap!r}")

    @cached_property
    def dtheta0(self) -> complex:
        """theta'(0)."""
        return complex(theta_derivative(0.0, 1, self))

    @cached_property
    def d3theta0(self) -> complex:
        """theta'''(0)."""
        return complex(theta_derivative(0.0, 3, self))

    @cached_property
    def p_shift(self) -> complex:
        """theta'''(0) / (3 theta'(0)), the constant relating E2 and the Weierstrass p."""
        return self.d3theta0 / (3.0 * self.dtheta0)

    @property
    def pole_threshold(self) -> float:
        return 1e3 * self.series_tol

    def replace(self, **changes) -> "EllipticContext":
        fields = dict(N=self.N, tau=self.tau, series_tol=self.series_tol,
                      series_cap=self.series_cap)
        fields.update(changes)
        return EllipticContext(**fields)


def _theta_series(z, order: int, ctx: EllipticContext):
    z = np.asarray(z, dtype=complex)
    tau = ctx.tau
    total = np.zeros_like(z)
    # terms can grow before they decay when |Im z| is comparable to Im tau
    n_min = int(math.ceil(float(np.max(np.abs(z.imag), initial=0.0)) / tau.imag)) + 1
    for n in range(ctx.series_cap + 1):
        m = n + 0.5
        pos = np.exp(1j * np.pi * tau * m * m + 2j * np.pi * (z + 0.5) * m)
        neg = np.exp(1j * np.pi * tau * m * m - 2j * np.pi * (z + 0.5) * m)
        if order:
            factor = (2j * np.pi * m) ** order
            pos = pos * factor
            neg = neg * ((-1) ** order) * factor
        total = total + pos + neg
        if n >= n_min and np.all(np.abs(pos) + np.abs(neg) < ctx.series_tol * (1.0 + np.abs(total))):
            return -total
    raise PrecisionError(
        f"theta series (order {order}) not converged after {ctx.series_cap} terms, tau={tau!r}"
    )


def theta(z, ctx: EllipticContext):
    """Odd theta function theta(z | tau)."""
    return _theta_series(z, 0, ctx)


def theta_derivative(z, order: int, ctx: EllipticContext):
    """Term-wise differentiated theta series, ``order`` in {1, 2, 3}."""
    if order not in (1, 2, 3):
        raise ValueError(f"order must be 1, 2 or 3, got {order!r}")
    return _theta_series(z, order, ctx)


def _guarded_theta(z, name: str, ctx: EllipticContext):
    t = theta(z, ctx)
    small = np.abs(t) < ctx.pole_threshold
    if np.any(small):
        bad = np.asarray(z)[small] if np.ndim(z) else z
        raise NearPoleError(name, bad, float(np.min(np.abs(t))))
    return t


def kronecker_phi(z, u, ctx: EllipticContext):
    """Kronecker function theta'(0) theta(z + u) / (theta(z) theta(u))."""
    z = np.asarray(z, dtype=complex)
    u = np.asarray(u, dtype=complex)
    tz = _guarded_theta(z, "z", ctx)
    tu = _guarded_theta(u, "u", ctx)
    return ctx.dtheta0 * theta(z + u, ctx) / (tz * tu)


def e1(z, ctx: EllipticContext):
    """E1(z) = theta'(z) / theta(z)."""
    t = _guarded_theta(z, "z", ctx)
    return theta_derivative(z, 1, ctx) / t


def e2(z, ctx: EllipticContext):
    """E2(z) = -E1'(z) = E1(z)^2 - theta''(z)/theta(z)."""
    t = _guarded_theta(z, "z", ctx)
    d1 = theta_derivative(z, 1, ctx) / t
    d2 = theta_derivative(z, 2, ctx) / t
    return d1 * d1 - d2


def weierstrass_p(z, ctx: EllipticContext):
    """Weierstrass p-function, E2(z) + theta'''(0) / (3 theta'(0))."""
    return e2(z, ctx) + ctx.p_shift


def rho(z, ctx: EllipticContext):
    """rho(z) = (E1(z)^2 - p(z)) / 2.

    Evaluated as (theta''(z)/theta(z) - theta'''(0)/(3 theta'(0))) / 2, which is
    the same function without the cancellation of the double poles, so it stays
    accurate as z -> 0 (where it tends to theta'''(0)/(3 theta'(0))).
    """
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-8
    if np.any(small):
        # removable point: theta''/theta -> theta'''(0)/theta'(0)
        safe = np.where(small, 0.5, z)
        out = _rho_regular(safe, ctx)
        return np.where(small, ctx.p_shift, out)
    return _rho_regular(z, ctx)


def _rho_regular(z, ctx):
    t = _guarded_theta(z, "z", ctx)
    return 0.5 * (theta_derivative(z, 2, ctx) / t - ctx.p_shift)


def rho_dz(z, ctx: EllipticContext):
    """z-derivative of rho, (theta'''/theta - (theta''/theta) E1) / 2."""
    t = _guarded_theta(z, "z", ctx)
    d1 = theta_derivative(z, 1, ctx) / t
    d2 = theta_derivative(z, 2, ctx) / t
    d3 = theta_derivative(z, 3, ctx) / t
    return 0.5 * (d3 - d2 * d1)


def kronecker_f(z, u, ctx: EllipticContext):
    """u-derivative of the Kronecker function, phi(z, u) (E1(z + u) - E1(u))."""
    return kronecker_phi(z, u, ctx) * (e1(np.asarray(z) + np.asarray(u), ctx) - e1(u, ctx))


def kronecker_phi_dz(z, u, ctx: EllipticContext):
    """z-derivative of the Kronecker function, phi(z, u) (E1(z + u) - E1(z))."""
    z = np.asarray(z, dtype=complex)
    return kronecker_phi(z, u, ctx) * (e1(z + u, ctx) - e1(z, ctx))


def kronecker_f_dz(z, u, ctx: EllipticContext):
    """Mixed derivative d/dz d/du phi(z, u)."""
    z = np.asarray(z, dtype=complex)
    u = np.asarray(u, dtype=complex)
    phi = kronecker_phi(z, u, ctx)
    e1_zu = e1(z + u, ctx)
    return phi * ((e1_zu - e1(z, ctx)) * (e1_zu - e1(u, ctx)) - e2(z + u, ctx))


def phi_k(k: int, z, ctx: EllipticContext):
    """The three N = 2 functions varphi_1, varphi_2, varphi_3 of the XYZ Lax pair."""
    z = np.asarray(z, dtype=complex)
    tau = ctx.tau
    if k == 1:
        return np.exp(1j * np.pi * z) * kronecker_phi(z, tau / 2, ctx)
    if k == 2:
        return np.exp(1j * np.pi * z) * kronecker_phi(z, (1 + tau) / 2, ctx)
    if k == 3:
        return kronecker_phi(z, 0.5, ctx)
    raise ValueError(f"k must be 1, 2 or 3, got {k!r}")


def half_periods(ctx: EllipticContext) -> tuple[complex, complex, complex]:
    """(omega_1, omega_2, omega_3) = (tau/2, (1+tau)/2, 1/2)."""
    tau = ctx.tau
    return tau / 2, (1 + tau) / 2, 0.5


def lattice_distance(w, ctx: EllipticContext):
    """Distance from w to the nearest point of Z + tau Z."""
    w = np.asarray(w, dtype=complex)
    tau = ctx.tau
    n = np.round(w.imag / tau.imag)
    best = np.full(w.shape, np.inf)
    for dn in (-1, 0, 1):
        shifted = w - (n + dn) * tau
        best = np.minimum(best, np.abs(shifted - np.round(shifted.real)))
    return best


def phi_trig(hbar, z):
    """Trigonometric normalization function pi cot(pi z) + pi cot(pi hbar)."""
    return np.pi / np.tan(np.pi * np.asarray(z)) + np.pi / np.tan(np.pi * np.asarray(hbar))


def phi_rat(hbar, z):
    """Rational normalization function 1/hbar + 1/z."""
    return 1.0 / np.asarray(hbar) + 1.0 / np.asarray(z)
