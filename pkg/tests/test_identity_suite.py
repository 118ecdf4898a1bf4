import json

import numpy as np
import pytest

from ellipticll import identity_suite as ids
from ellipticll.rmatrix import RMatrixFamily
from ellipticll.special_functions import EllipticContext, kronecker_phi
from ellipticll.tensor_algebra import commutator as comm, permutation, swap12

CASES = [(N, tau) for N in (2, 3, 4) for tau in (1j, 0.3 + 0.8j)]
PLAN = ids.SamplePlan(seed=11, count=6)


def family(N, tau=1j):
    return RMatrixFamily(EllipticContext(N=N, tau=tau))


@pytest.mark.parametrize("N,tau", CASES)
def test_every_identity_holds(N, tau):
    reports = ids.run_suite(family(N, tau), PLAN)
    assert [r.name for r in reports] == list(ids.CHECKS)
    for r in reports:
        assert r.passed, f"{r.name}: {r.max_residual:.2e}"
        assert len(r.residuals) == PLAN.count


def test_selection_and_unknown_names():
    fam = family(2)
    reports = ids.run_suite(fam, PLAN, selection=["cybe", "qybe"])
    assert [r.name for r in reports] == ["qybe", "cybe"]
    with pytest.raises(KeyError):
        ids.run_suite(fam, PLAN, selection=["nope"])


def test_reports_are_seed_deterministic_and_worker_independent():
    fam = family(3, 0.3 + 0.8j)
    a = [r.as_dict() for r in ids.run_suite(fam, PLAN)]
    b = [r.as_dict() for r in ids.run_suite(fam, PLAN, workers=4)]
    assert json.dumps(a) == json.dumps(b)
    c = [r.as_dict() for r in ids.run_suite(fam, ids.SamplePlan(seed=12, count=6))]
    assert json.dumps(a) != json.dumps(c)


def test_samples_avoid_poles():
    fam = family(4)
    plan = ids.SamplePlan(seed=0, count=20, exclusion=0.08)
    report = ids.run_check("aybe", fam, plan)
    assert report.redraws > 0
    assert report.passed
    with pytest.raises(RuntimeError, match="exclusion"):
        ids.run_check("aybe", fam, ids.SamplePlan(seed=0, count=20, exclusion=0.13))


def test_sample_plan_validation():
    with pytest.raises(ValueError):
        ids.SamplePlan(count=0)
    with pytest.raises(ValueError):
        ids.SamplePlan(exclusion=0.0)


# negative controls: each broken variant must be caught with a large residual

@pytest.mark.parametrize("N", [2, 3])
def test_perturbed_coefficient_breaks_qybe(N):
    fam = family(N).perturbed((1, 1), 1.01)
    report = ids.run_check("qybe", fam, PLAN)
    assert not report.passed and report.max_residual > 1e-4


# for N = 2 the full transpose coincides with the slot swap, so only N >= 3 is a control
@pytest.mark.parametrize("N", [3, 4])
def test_plain_transpose_breaks_skew(N):
    def residual(fam, s):
        return fam.quantum_r(s["hbar"], s["z"]) + fam.quantum_r(-s["hbar"], -s["z"]).T

    report = ids.run_check("skew", family(N), PLAN, residual=residual)
    assert not report.passed and report.max_residual > 1e-3


@pytest.mark.parametrize("N", [2, 3])
def test_shuffled_slots_break_cybe(N):
    # spectral arguments of r_13 and r_23 exchanged
    def residual(fam, s):
        z1, z2, z3 = s["z1"], s["z2"], s["z3"]
        r12 = ids._c3(fam, z1 - z2, (1, 2))
        r13, r23 = ids._c3(fam, z2 - z3, (1, 3)), ids._c3(fam, z1 - z3, (2, 3))
        return comm(r12, r13) + comm(r12, r23) + comm(r13, r23)

    report = ids.run_check("cybe", family(N), PLAN, residual=residual)
    assert not report.passed and report.max_residual > 1e-3


@pytest.mark.parametrize("N", [2, 3, 4])
def test_dropping_r0_breaks_m_r0_exchange_except_n2(N):
    report = ids.run_check("m_r0_exchange", family(N), PLAN,
                           residual=lambda f, s: ids.m_r0_exchange_residual(f, s, with_r0=False))
    if N == 2:
        # r0 vanishes identically for N = 2, so the term is invisible
        assert report.passed
    else:
        assert not report.passed and report.max_residual > 1e-3


@pytest.mark.parametrize("N", [2, 3])
def test_missing_permutation_breaks_fourier(N):
    def residual(fam, s):
        return fam.quantum_r(s["hbar"], s["z"]) - fam.quantum_r(s["z"] / N, N * s["hbar"])

    report = ids.run_check("fourier", family(N), PLAN, residual=residual)
    assert not report.passed and report.max_residual > 1e-3


def test_wrong_unitarity_normalization_is_caught():
    def residual(fam, s):
        h, z, N = s["hbar"], s["z"], fam.N
        lhs = fam.quantum_r(h, z) @ swap12(fam.quantum_r(h, -z), N)
        # missing the N^2 factor
        scalar = kronecker_phi(N * h, z, fam.ctx) * kronecker_phi(N * h, -z, fam.ctx)
        return lhs - scalar * np.eye(N * N)

    report = ids.run_check("unitarity", family(3), PLAN, residual=residual)
    assert not report.passed


def test_as_dict_schema():
    r = ids.run_check("skew", family(2), ids.SamplePlan(count=2))
    d = r.as_dict()
    assert set(d) == {"name", "N", "tau", "n_samples", "max_residual", "mean_residual",
                      "tolerance", "pass"}
    assert d["tau"] == [0.0, 1.0] and d["n_samples"] == 2
    assert permutation(2).shape == (4, 4)


def test_hbar_samples_stay_in_annulus():
    sp = ids._Sampler(RMatrixFamily(EllipticContext(N=3)), ids.SamplePlan(seed=1))
    mods = np.abs([sp.hbar() for _ in range(2000)])
    assert mods.min() >= 1e-3 and mods.max() <= 0.3
