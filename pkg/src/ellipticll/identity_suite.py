"""Randomized residual checks of the R-matrix identities.

Each check draws seeded sample points, evaluates the entrywise max norm of
``lhs - rhs`` on the 3-fold (or 2-fold) tensor space and collects a
:class:`CheckReport`.  Samples whose arguments fall within the exclusion
radius of a pole are redrawn; the number of redraws is logged.
"""
from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .rmatrix import RMatrixFamily
from .special_functions import kronecker_phi, lattice_distance
from .tensor_algebra import commutator as comm, embed, permutation, sup_norm, swap12

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SamplePlan:
    """Seeded sampling of spectral (z-like) and Planck (hbar-like) variables.

    z-like values are uniform in Re in [-z_box, z_box], Im in [-z_box, z_box] * Im(tau);
    hbar-like values uniform in the annulus hbar_min <= |hbar| <= hbar_box.
    """

    seed: int = 0
    count: int = 20
    z_box: float = 0.4
    hbar_box: float = 0.3
    hbar_min: float = 1e-3
    exclusion: float = 0.05
    max_redraws: int = 10_000

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("sample count must be >= 1")
        if not self.exclusion > 0:
            raise ValueError("exclusion radius must be positive")
        if not 0 < self.hbar_min < self.hbar_box:
            raise ValueError("need 0 < hbar_min < hbar_box")


@dataclass
class CheckReport:
    name: str
    N: int
    tau: complex
    samples: list = field(repr=False)
    residuals: list = field(repr=False)
    max_residual: float
    mean_residual: float
    tolerance: float
    passed: bool
    wall_time: float = 0.0
    redraws: int = 0

    def as_dict(self) -> dict:
        """Serializable summary; wall time is left out so reports are reproducible."""
        return {
            "name": self.name,
            "N": self.N,
            "tau": [self.tau.real, self.tau.imag],
            "n_samples": len(self.samples),
            "max_residual": self.max_residual,
            "mean_residual": self.mean_residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


class _Sampler:
    def __init__(self, fam: RMatrixFamily, plan: SamplePlan):
        self.fam = fam
        self.plan = plan
        self.rng = np.random.default_rng(plan.seed)
        self.tau = fam.ctx.tau

    def z(self):
        b = self.plan.z_box
        return complex(self.rng.uniform(-b, b), self.rng.uniform(-b, b) * self.tau.imag)

    def hbar(self):
        lo, hi = self.plan.hbar_min, self.plan.hbar_box
        r = np.sqrt(self.rng.uniform(lo ** 2, hi ** 2))
        return complex(r * np.exp(2j * np.pi * self.rng.uniform()))

    def clear(self, points) -> bool:
        return bool(np.all(lattice_distance(np.asarray(points), self.fam.ctx) >= self.plan.exclusion))


# pole bookkeeping: arguments that must stay away from Z + tau Z

def _quantum_args(fam, hbar, z):
    u = fam.lattice + hbar
    return [z, *u, *(u + z)]


def _classical_args(fam, z):
    u = fam.lattice[1:]
    return [z, *(u + z)]


# residual functions: (fam, sample dict) -> operator

def _r3(fam, hbar, z, slots):
    return embed(fam.quantum_r(hbar, z), slots, 3, fam.N)


def _c3(fam, z, slots):
    return embed(fam.classical_r(z), slots, 3, fam.N)


def _m3(fam, z, slots):
    return embed(fam.m_matrix(z), slots, 3, fam.N)


def qybe_residual(fam, s):
    h, z1, z2, z3 = s["hbar"], s["z1"], s["z2"], s["z3"]
    R12, R13, R23 = _r3(fam, h, z1 - z2, (1, 2)), _r3(fam, h, z1 - z3, (1, 3)), \
        _r3(fam, h, z2 - z3, (2, 3))
    return R12 @ R13 @ R23 - R23 @ R13 @ R12


def unitarity_residual(fam, s):
    h, z, N = s["hbar"], s["z"], fam.N
    lhs = fam.quantum_r(h, z) @ swap12(fam.quantum_r(h, -z), N)
    scalar = N * N * kronecker_phi(N * h, z, fam.ctx) * kronecker_phi(N * h, -z, fam.ctx)
    return lhs - scalar * np.eye(N * N)


def skew_residual(fam, s):
    h, z = s["hbar"], s["z"]
    return fam.quantum_r(h, z) + swap12(fam.quantum_r(-h, -z), fam.N)


def aybe_residual(fam, s):
    h, e, z1, z2, z3 = s["hbar"], s["eta"], s["z1"], s["z2"], s["z3"]
    lhs = _r3(fam, h, z1 - z2, (1, 2)) @ _r3(fam, e, z2 - z3, (2, 3))
    rhs = _r3(fam, e, z1 - z3, (1, 3)) @ _r3(fam, h - e, z1 - z2, (1, 2)) \
        + _r3(fam, e - h, z2 - z3, (2, 3)) @ _r3(fam, h, z1 - z3, (1, 3))
    return lhs - rhs


def cybe_residual(fam, s):
    z1, z2, z3 = s["z1"], s["z2"], s["z3"]
    r12, r13, r23 = _c3(fam, z1 - z2, (1, 2)), _c3(fam, z1 - z3, (1, 3)), _c3(fam, z2 - z3, (2, 3))
    return comm(r12, r13) + comm(r12, r23) + comm(r13, r23)


def mr_limit_residual(fam, s):
    z1, z2 = s["z1"], s["z2"]
    lhs = comm(_m3(fam, z1, (1, 3)) + _m3(fam, z2, (2, 3)), _c3(fam, z1 - z2, (1, 2)))
    rhs = comm(_m3(fam, z1 - z2, (1, 2)) + _m3(fam, z1, (1, 3)), _c3(fam, z2, (2, 3)))
    return lhs - rhs


def _p23(fam):
    return embed(permutation(fam.N), (2, 3), 3, fam.N)


def m_r0_exchange_residual(fam, s, with_r0: bool = True):
    """[m13, r12] = [r12, m0_23] - N [m'12, P23] + [m12 + m13, r0_23]."""
    z, N = s["z"], fam.N
    m12, m13 = _m3(fam, z, (1, 2)), _m3(fam, z, (1, 3))
    r12 = _c3(fam, z, (1, 2))
    m0_23 = embed(fam.m0(), (2, 3), 3, N)
    dm12 = embed(fam.m_matrix_dz(z), (1, 2), 3, N)
    rhs = comm(r12, m0_23) - comm(dm12, N * _p23(fam))
    if with_r0:
        r0_23 = embed(fam.r0(), (2, 3), 3, N)
        rhs = rhs + comm(m12, r0_23) + comm(m13, r0_23)
    return comm(m13, r12) - rhs


def classical_aybe_residual(fam, s):
    """r12(z) r13(z+w) - r23(w) r12(z) + r13(z+w) r23(w) = m12(z) + m23(w) + m13(z+w)."""
    z, w = s["z"], s["w"]
    r12, r13, r23 = _c3(fam, z, (1, 2)), _c3(fam, z + w, (1, 3)), _c3(fam, w, (2, 3))
    lhs = r12 @ r13 - r23 @ r12 + r13 @ r23
    return lhs - (_m3(fam, z, (1, 2)) + _m3(fam, w, (2, 3)) + _m3(fam, z + w, (1, 3)))


def coincident_rr_residual(fam, s):
    """r12(z) r13(z) expressed through r0, m0, m and N r'13 P23 at coincident arguments."""
    z, N = s["z"], fam.N
    r12, r13 = _c3(fam, z, (1, 2)), _c3(fam, z, (1, 3))
    r0_23 = embed(fam.r0(), (2, 3), 3, N)
    m0_23 = embed(fam.m0(), (2, 3), 3, N)
    dr13 = embed(fam.classical_r_dz(z), (1, 3), 3, N)
    rhs = r0_23 @ r12 - r13 @ r0_23 - N * dr13 @ _p23(fam) \
        + _m3(fam, z, (1, 2)) + m0_23 + _m3(fam, z, (1, 3))
    return r12 @ r13 - rhs


def fourier_residual(fam, s):
    h, z, N = s["hbar"], s["z"], fam.N
    return fam.quantum_r(h, z) @ permutation(N) - fam.quantum_r(z / N, N * h)


# sample generators: sampler -> (sample dict, pole arguments)

def _gen_qybe(sp):
    h, z1, z2, z3 = sp.hbar(), sp.z(), sp.z(), sp.z()
    f = sp.fam
    args = [h] + _quantum_args(f, h, z1 - z2) + _quantum_args(f, h, z1 - z3) \
        + _quantum_args(f, h, z2 - z3)
    return dict(hbar=h, z1=z1, z2=z2, z3=z3), args


def _gen_hz(sp):
    h, z = sp.hbar(), sp.z()
    f = sp.fam
    args = [h, f.N * h] + _quantum_args(f, h, z) + _quantum_args(f, h, -z) \
        + _quantum_args(f, -h, -z) + [f.N * h + z, f.N * h - z]
    return dict(hbar=h, z=z), args


def _gen_fourier(sp):
    s, args = _gen_hz(sp)
    f = sp.fam
    return s, args + _quantum_args(f, s["z"] / f.N, f.N * s["hbar"]) + [s["z"]]


def _gen_aybe(sp):
    h, e, z1, z2, z3 = sp.hbar(), sp.hbar(), sp.z(), sp.z(), sp.z()
    f = sp.fam
    args = [h, e, h - e]
    for hb, z in ((h, z1 - z2), (e, z2 - z3), (e, z1 - z3), (h - e, z1 - z2),
                  (e - h, z2 - z3), (h, z1 - z3)):
        args += _quantum_args(f, hb, z)
    return dict(hbar=h, eta=e, z1=z1, z2=z2, z3=z3), args


def _gen_z3(sp):
    z1, z2, z3 = sp.z(), sp.z(), sp.z()
    f = sp.fam
    args = _classical_args(f, z1 - z2) + _classical_args(f, z1 - z3) + _classical_args(f, z2 - z3)
    return dict(z1=z1, z2=z2, z3=z3), args


def _gen_z2(sp):
    z1, z2 = sp.z(), sp.z()
    f = sp.fam
    args = _classical_args(f, z1 - z2) + _classical_args(f, z1) + _classical_args(f, z2)
    return dict(z1=z1, z2=z2), args


def _gen_z(sp):
    z = sp.z()
    return dict(z=z), _classical_args(sp.fam, z)


def _gen_zw(sp):
    z, w = sp.z(), sp.z()
    f = sp.fam
    args = _classical_args(f, z) + _classical_args(f, w) + _classical_args(f, z + w)
    return dict(z=z, w=w), args


CHECKS = {
    "qybe": (qybe_residual, _gen_qybe),
    "unitarity": (unitarity_residual, _gen_hz),
    "skew": (skew_residual, _gen_hz),
    "aybe": (aybe_residual, _gen_aybe),
    "cybe": (cybe_residual, _gen_z3),
    "mr_limit": (mr_limit_residual, _gen_z2),
    "m_r0_exchange": (m_r0_exchange_residual, _gen_z),
    "classical_aybe": (classical_aybe_residual, _gen_zw),
    "coincident_rr": (coincident_rr_residual, _gen_z),
    "fourier": (fourier_residual, _gen_fourier),
}


def draw_samples(fam: RMatrixFamily, plan: SamplePlan, generator) -> tuple[list, int]:
    """``plan.count`` samples clear of poles, and the number of rejected draws."""
    sp = _Sampler(fam, plan)
    samples, redraws = [], 0
    while len(samples) < plan.count:
        s, args = generator(sp)
        if sp.clear(args):
            samples.append(s)
        else:
            redraws += 1
            if redraws > plan.max_redraws:
                raise RuntimeError("sample plan rejects too many draws; shrink the exclusion radius")
    return samples, redraws


def run_check(name: str, fam: RMatrixFamily, plan: SamplePlan, tol: float = 1e-8,
              residual=None) -> CheckReport:
    """Evaluate one named identity on the plan's samples.

    ``residual`` overrides the residual function (used for negative controls).
    """
    base_residual, generator = CHECKS[name]
    residual = residual or base_residual
    t0 = time.perf_counter()
    samples, redraws = draw_samples(fam, plan, generator)
    if redraws:
        log.info("%s: resampled %d draws near poles", name, redraws)
    values = [sup_norm(residual(fam, s)) for s in samples]
    mx = float(np.max(values))
    return CheckReport(
        name=name, N=fam.N, tau=fam.ctx.tau, samples=samples, residuals=values,
        max_residual=mx, mean_residual=float(np.mean(values)), tolerance=tol,
        passed=bool(mx <= tol), wall_time=time.perf_counter() - t0, redraws=redraws,
    )


def check_qybe(fam, plan, tol=1e-8):
    return run_check("qybe", fam, plan, tol)


def check_unitarity(fam, plan, tol=1e-8):
    return run_check("unitarity", fam, plan, tol)


def check_skew(fam, plan, tol=1e-8):
    return run_check("skew", fam, plan, tol)


def check_aybe(fam, plan, tol=1e-8):
    return run_check("aybe", fam, plan, tol)


def check_cybe(fam, plan, tol=1e-8):
    return run_check("cybe", fam, plan, tol)


def check_mr_limit(fam, plan, tol=1e-8):
    return run_check("mr_limit", fam, plan, tol)


def check_m_r0_exchange(fam, plan, tol=1e-8):
    return run_check("m_r0_exchange", fam, plan, tol)


def check_classical_aybe(fam, plan, tol=1e-8):
    return run_check("classical_aybe", fam, plan, tol)


def check_coincident_rr(fam, plan, tol=1e-8):
    return run_check("coincident_rr", fam, plan, tol)


def check_fourier(fam, plan, tol=1e-8):
    return run_check("fourier", fam, plan, tol)


def run_suite(fam: RMatrixFamily, plan: SamplePlan, selection=None, tol: float = 1e-8,
              workers: int = 1) -> list[CheckReport]:
    """Run the selected checks (all when ``selection`` is None) in registry order."""
    names = list(CHECKS) if selection is None else [n for n in CHECKS if n in set(selection)]
    unknown = set(selection or ()) - set(CHECKS)
    if unknown:
        raise KeyError(f"unknown checks: {sorted(unknown)}")
    if workers > 1 and len(names) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda n: run_check(n, fam, plan, tol), names))
    return [run_check(n, fam, plan, tol) for n in names]


def suite_passed(reports) -> bool:
    return all(r.passed for r in reports)
