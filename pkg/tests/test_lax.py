import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ellipticll import lax
from ellipticll.fields import (constrained_field, random_spin_matrix,
                               rank_one_matrix, spectral_derivative)
from ellipticll.rmatrix import RMatrixFamily
from ellipticll.special_functions import EllipticContext
from ellipticll.tensor_algebra import sup_norm


def family(N, tau=1j):
    return RMatrixFamily(EllipticContext(N=N, tau=tau))


def zpoints(rng, n, tau=1j):
    return [complex(rng.uniform(0.05, 0.45), rng.uniform(0.05, 0.45) * tau.imag) for _ in range(n)]


def derivs(field):
    return spectral_derivative(field.values, 1), spectral_derivative(field.values, 2)


@pytest.mark.parametrize("N", [2, 3, 4])
@pytest.mark.parametrize("tau", [1j, 0.3 + 0.8j])
def test_lax_l_forms_agree(N, tau):
    fam = family(N, tau)
    rng = np.random.default_rng(N)
    S = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
    for z in zpoints(rng, 3, tau):
        np.testing.assert_allclose(lax.lax_l(S, z, fam), lax.lax_l_trace(S, z, fam), atol=1e-11)
        np.testing.assert_allclose(lax.lax_m(S, z, fam), lax.lax_m_trace(S, z, fam), atol=1e-11)
        h = 1e-4
        fd = (lax.lax_l(S, z + h, fam) - lax.lax_l(S, z - h, fam)) / (2 * h)
        ref = lax.lax_l_dz(S, z, fam)
        assert sup_norm(fd - ref) < 1e-6 * (1 + sup_norm(ref))


@pytest.mark.parametrize("N", [2, 3, 4])
def test_top_lax_equation(N):
    fam = family(N, 0.3 + 0.8j)
    rng = np.random.default_rng(10 + N)
    worst = 0.0
    for _ in range(10):
        S = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
        for z in zpoints(rng, 10, fam.ctx.tau):
            worst = max(worst, lax.check_lax_top(S, z, fam))
    assert worst < 1e-9


def test_top_lax_fails_with_wrong_inertia():
    fam = family(3)
    rng = np.random.default_rng(0)
    S = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    z = 0.2 + 0.3j
    L, M = lax.lax_l(S, z, fam), lax.lax_m(S, z, fam)
    wrong = lax.lax_l(lax._comm(S, 1.05 * fam.j_map(S)), z, fam)
    assert sup_norm(lax._comm(L, M) - wrong) > 1e-3


@pytest.mark.parametrize("N", [2, 3, 4, 5])
def test_rank_one_identity(N):
    fam = family(N)
    rng = np.random.default_rng(20 + N)
    worst = 0.0
    for _ in range(10):
        c = complex(rng.uniform(0.5, 1.5), rng.uniform(-0.5, 0.5))
        field = constrained_field(N, 64, c, rng, scale=0.3)
        dS, _ = derivs(field)
        worst = max(worst, lax.check_rank_one_identity(field.values, dS, fam))
    assert worst < 1e-8


@pytest.mark.parametrize("N", [3, 4])
def test_rank_one_identity_fails_for_rank_two(N):
    fam = family(N)
    field = constrained_field(N, 64, 1.0, np.random.default_rng(3), rank=2, scale=0.3)
    dS, _ = derivs(field)
    with pytest.raises(lax.ConstraintError):
        lax.check_rank_one_identity(field.values, dS, fam)
    assert lax.check_rank_one_identity(field.values, dS, fam, c=1.0, check_rank=False) > 1e-3


@pytest.mark.parametrize("N", [2, 3, 4])
def test_t_matrix_and_v1_forms(N):
    fam = family(N, 0.3 + 0.8j)
    rng = np.random.default_rng(30 + N)
    c = 0.8 + 0.3j
    field = constrained_field(N, 32, c, rng, scale=0.3)
    S = field.values
    dS, _ = derivs(field)
    T = lax.t_matrix(S, dS, c)
    assert sup_norm(-dS - lax._comm(S, T)) < 1e-10
    for z in zpoints(rng, 3, fam.ctx.tau):
        np.testing.assert_allclose(lax.v1_field(S, z, fam, c), lax.v1_alternative(S, z, fam),
                                   atol=1e-10)


@pytest.mark.parametrize("N", [2, 3, 4])
def test_rank_one_equation_matches_general(N):
    fam = family(N)
    field = constrained_field(N, 64, 1.2 - 0.1j, np.random.default_rng(40 + N), scale=0.3)
    dS, ddS = derivs(field)
    a = lax.ll_rhs_rank1(field.values, dS, ddS, fam)
    b = lax.ll_rhs_general(field.values, dS, ddS, fam, field.c)
    assert sup_norm(a - b) < 1e-9 * (1 + sup_norm(a))


@pytest.mark.parametrize("N", [2, 3])
def test_zero_curvature_rank_one(N):
    fam = family(N)
    rng = np.random.default_rng(50 + N)
    field = constrained_field(N, 128, 1.0, rng, scale=0.3)
    dS, ddS = derivs(field)
    dtS = lax.ll_rhs_rank1(field.values, dS, ddS, fam)
    for z in zpoints(rng, 5):
        assert lax.zs_residual(field, dtS, z, fam) < 1e-6


def test_zero_curvature_rank_two_general_equation():
    fam = family(4)
    rng = np.random.default_rng(60)
    field = constrained_field(4, 128, 1.0, rng, rank=2, scale=0.3)
    dS, ddS = derivs(field)
    dtS = lax.ll_rhs_general(field.values, dS, ddS, fam, field.c)
    for z in zpoints(rng, 5):
        assert lax.zs_residual(field, dtS, z, fam) < 1e-6
    # the rank-one right-hand side is not a solution here
    wrong = lax.ll_rhs_rank1(field.values, dS, ddS, fam, c=field.c, tol=None)
    assert lax.zs_residual(field, wrong, zpoints(rng, 1)[0], fam) > 1e-3


def test_constraint_errors():
    fam = family(2)
    S = np.array([[1.0, 2.0], [0.0, 3.0]], dtype=complex)
    with pytest.raises(lax.ConstraintError):
        lax.check_constraint(S, 1.0)
    with pytest.raises(lax.ConstraintError):
        lax.check_rank_one(np.eye(2))
    with pytest.raises(lax.ConstraintError):
        lax.t_matrix(S, S, 0.0)
    with pytest.raises(lax.ConstraintError):
        lax.v_field(np.broadcast_to(S, (8, 2, 2)), S, 0.2, fam, 1.0)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2 ** 31), N=st.sampled_from([2, 3, 4]))
def test_rank_one_matrices_satisfy_constraint(seed, N):
    rng = np.random.default_rng(seed)
    xi = rng.standard_normal(N) + 1j * rng.standard_normal(N)
    psi = rng.standard_normal(N) + 1j * rng.standard_normal(N)
    c = complex(rng.uniform(0.5, 2), rng.uniform(-1, 1))
    if abs(psi @ xi) < 0.1:
        return
    S = rank_one_matrix(xi, psi, c)
    assert abs(np.trace(S) - c) < 1e-10
    lax.check_constraint(S, c, 1e-9 * (1 + sup_norm(S) ** 2))
    P = random_spin_matrix(N, c, rng)
    lax.check_rank_one(P, 1e-8)
