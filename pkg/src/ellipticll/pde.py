"""Pseudo-spectral RK4 integration of the Landau-Lifshitz field with S^2 = c S.

The right-hand sides are holomorphic in S, so the flow can be followed along
any ray ``t -> t * time_direction`` of complex time.  Along the real axis the
complex equation is ill-posed: the exchange term linearizes to
``-k^2 ad_P`` and ``ad_P`` has real eigenvalues +-1 on the tangent space, so
half the Fourier modes grow like ``exp(k^2 t)``.  Along the imaginary axis
these modes only rotate.  ``EvolutionConfig.time_direction`` defaults to
``1j`` for that reason; conserved quantities are conserved along every ray.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np

from .fields import SpinField, constraint_residual, spectral_derivative
from .lax import ll_rhs_general, ll_rhs_rank1, zs_residual
from .rmatrix import RMatrixFamily

log = logging.getLogger(__name__)


class NumericalAbort(RuntimeError):
    """Constraint drift or projection failure during time stepping."""


class ProjectionError(NumericalAbort):
    """Newton-Schulz idempotent iteration did not converge."""


@dataclass(frozen=True)
class EvolutionConfig:
    dt: float = 1e-4
    t_end: float = 1.0
    projection_cadence: int = 1
    constraint_tol: float = 1e-8
    diagnostics_cadence: int = 100
    equation: str = "rank1"
    time_direction: complex = 1j
    zs_z: complex | None = None

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt!r}")
        if self.t_end < 0:
            raise ValueError(f"t_end must be non-negative, got {self.t_end!r}")
        if self.projection_cadence < 1 or self.diagnostics_cadence < 1:
            raise ValueError("cadences must be >= 1")
        if self.equation not in ("rank1", "general"):
            raise ValueError(f"equation must be 'rank1' or 'general', got {self.equation!r}")
        if abs(abs(complex(self.time_direction)) - 1) > 1e-12:
            raise ValueError("time_direction must have unit modulus")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    def check_stability(self, M: int, c: complex) -> bool:
        """Warn when dt exceeds the explicit RK4 bound for the exchange term.

        With S = c P the exchange term is c [P, P''] and the flow of P is
        independent of c, so the fastest rate is ~k_max^2 = (pi / dx)^2.
        """
        dx = 2 * np.pi / M
        limit = 0.25 * dx * dx
        if self.dt > limit:
            warnings.warn(f"dt={self.dt:.2e} exceeds the RK4 stability estimate {limit:.2e} "
                          f"for M={M}", RuntimeWarning, stacklevel=2)
            return False
        return True


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    H: complex
    trS: complex
    constraint_max: float
    spectrum_drift: float
    zs_residual: float | None = None

    def as_row(self) -> list:
        zs = "" if self.zs_residual is None else repr(self.zs_residual)
        return [repr(self.t), repr(self.H.real), repr(self.H.imag), repr(self.trS.real),
                repr(self.trS.imag), repr(self.constraint_max), repr(self.spectrum_drift), zs]


CSV_COLUMNS = ["t", "H_re", "H_im", "trS_re", "trS_im", "constraint_max",
               "spectrum_drift", "zs_residual"]


def newton_schulz_idempotent(P, tol: float = 1e-13, max_iter: int = 8):
    """Iterate P <- 3P^2 - 2P^3 to the nearby idempotent. Returns (P, iterations)."""
    P = np.asarray(P, dtype=complex)
    scale = 1.0 + float(np.max(np.abs(P)))
    for it in range(max_iter + 1):
        P2 = P @ P
        err = float(np.max(np.abs(P2 - P)))
        if err < tol * scale * scale:
            return P, it
        if it == max_iter or not np.isfinite(err):
            break
        P = 3 * P2 - 2 * P2 @ P
    raise ProjectionError(f"Newton-Schulz projection did not converge: ||P^2 - P|| = {err:.3e} "
                          "(eigenvalues near 1/2?)")


def project_constraint(S, c, tol: float = 1e-13, max_iter: int = 8):
    """Nearest S with S^2 = c S obtained from the idempotent iteration on S / c."""
    if abs(c) < 1e-12:
        raise ValueError("constraint constant must be nonzero")
    P, _ = newton_schulz_idempotent(np.asarray(S) / c, tol, max_iter)
    return c * P


def field_rhs(values, c, fam: RMatrixFamily, equation: str = "rank1"):
    dS = spectral_derivative(values, 1)
    ddS = spectral_derivative(values, 2)
    if equation == "rank1":
        return ll_rhs_rank1(values, dS, ddS, fam, c=c, tol=None)
    return ll_rhs_general(values, dS, ddS, fam, c, tol=None)


def step(field: SpinField, cfg: EvolutionConfig, fam: RMatrixFamily) -> SpinField:
    """One RK4 step of size ``cfg.dt`` along ``cfg.time_direction``."""
    h = cfg.dt * complex(cfg.time_direction)
    S, c = field.values, field.c

    def f(x):
        return field_rhs(x, c, fam, cfg.equation)

    k1 = f(S)
    k2 = f(S + 0.5 * h * k1)
    k3 = f(S + 0.5 * h * k2)
    k4 = f(S + h * k3)
    new = S + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
    count = field.step_count + 1
    drift = constraint_residual(new, c)
    if drift > 100 * cfg.constraint_tol:
        raise NumericalAbort(f"constraint drift {drift:.3e} at step {count} "
                             f"(t={field.t + cfg.dt:.6g}) exceeds 100 x {cfg.constraint_tol:.1e}")
    if count % cfg.projection_cadence == 0:
        new = project_constraint(new, c)
    return field.with_values(new, t=field.t + cfg.dt, step_count=count)


def hamiltonian_density(values, c, fam: RMatrixFamily, dS=None):
    """(c/N) tr(S J(S)) - tr(S' S') / (2c) + tr(S' E(S)) at every node."""
    N = values.shape[-1]
    if dS is None:
        dS = spectral_derivative(values, 1)
    tr = lambda a: np.trace(a, axis1=-2, axis2=-1)
    return (c / N) * tr(values @ fam.j_map(values)) - tr(dS @ dS) / (2 * c) \
        + tr(dS @ fam.e_map(values))


def hamiltonian(field: SpinField, fam: RMatrixFamily) -> complex:
    """Spectral (trapezoidal) quadrature of the Hamiltonian density over the circle."""
    return complex(field.dx * np.sum(hamiltonian_density(field.values, field.c, fam)))


def spectrum_drift(values, c) -> float:
    """max over nodes and eigenvalues of the distance to the nearer of {0, c}."""
    ev = np.linalg.eigvals(np.asarray(values))
    return float(np.max(np.minimum(np.abs(ev), np.abs(ev - c))))


def conserved_report(field: SpinField, fam: RMatrixFamily, equation: str = "rank1",
                     zs_z=None) -> DiagnosticsRecord:
    values, c = field.values, field.c
    zs = None
    if zs_z is not None:
        zs = zs_residual(field, field_rhs(values, c, fam, equation), zs_z, fam)
    return DiagnosticsRecord(
        t=float(field.t),
        H=hamiltonian(field, fam),
        trS=complex(np.mean(np.trace(values, axis1=1, axis2=2))),
        constraint_max=constraint_residual(values, c),
        spectrum_drift=spectrum_drift(values, c),
        zs_residual=zs,
    )


def evolve(field: SpinField, cfg: EvolutionConfig, fam: RMatrixFamily, on_record=None):
    """Integrate to ``cfg.t_end``; returns the final field and the diagnostics stream."""
    cfg.check_stability(field.M, field.c)
    records = []

    def emit(f):
        rec = conserved_report(f, fam, cfg.equation, cfg.zs_z)
        records.append(rec)
        if on_record is not None:
            on_record(rec)

    emit(field)
    n = cfg.n_steps
    for i in range(1, n + 1):
        field = step(field, cfg, fam)
        if i % cfg.diagnostics_cadence == 0 or i == n:
            emit(field)
    return field, records


def fd_hamiltonian_density(values, c, fam: RMatrixFamily):
    """Hamiltonian density with second-order central differences for S'."""
    M = values.shape[0]
    dx = 2 * np.pi / M
    dS = (np.roll(values, -1, axis=0) - np.roll(values, 1, axis=0)) / (2 * dx)
    return hamiltonian_density(values, c, fam, dS=dS)


def poisson_flow(field: SpinField, fam: RMatrixFamily, h: float = 1e-5):
    """[S_k, grad_k H / dx] from central-difference gradients of the discrete Hamiltonian.

    The discrete bracket is {S_ij(x_k), S_lm(x_k)} = (S_lj d_im - S_im d_lj) / dx.
    """
    if not 1e-7 <= h <= 1e-3:
        raise ValueError(f"finite-difference step must lie in [1e-7, 1e-3], got {h!r}")
    values, c = field.values, field.c
    M, N = field.M, field.N
    grad = np.zeros_like(values)
    # nodes 4 apart have disjoint three-point stencils
    for r in range(4):
        nodes = np.arange(r, M, 4)
        for i in range(N):
            for j in range(N):
                plus = values.copy()
                minus = values.copy()
                plus[nodes, i, j] += h
                minus[nodes, i, j] -= h
                diff = fd_hamiltonian_density(plus, c, fam) - fd_hamiltonian_density(minus, c, fam)
                local = np.roll(diff, 1) + diff + np.roll(diff, -1)
                grad[nodes, i, j] = field.dx * local[nodes] / (2 * h)
    G = np.swapaxes(grad, 1, 2) / field.dx
    return values @ G - G @ values


def poisson_gradient_check(field: SpinField, fam: RMatrixFamily, h: float = 1e-5) -> float:
    """sup over the grid of the gap between the Poisson flow of H and the rank-one rhs."""
    values = field.values
    dS = spectral_derivative(values, 1)
    ddS = spectral_derivative(values, 2)
    target = ll_rhs_rank1(values, dS, ddS, fam, c=field.c, tol=None)
    return float(np.max(np.abs(poisson_flow(field, fam, h) - target)))


def convergence_orders(residuals, Ms) -> list[float]:
    """Observed orders log(r_i / r_{i+1}) / log(M_{i+1} / M_i)."""
    return [float(np.log(residuals[i] / residuals[i + 1]) / np.log(Ms[i + 1] / Ms[i]))
            for i in range(len(Ms) - 1)]
