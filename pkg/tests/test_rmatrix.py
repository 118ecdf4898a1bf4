import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ellipticll import special_functions as sf
from ellipticll import tensor_algebra as ta
from ellipticll.rmatrix import RMatrixFamily

CASES = [(N, tau) for N in (2, 3, 4) for tau in (1j, 0.3 + 0.8j)]


@pytest.fixture(params=CASES, ids=[f"N={n},tau={t}" for n, t in CASES])
def fam(request):
    N, tau = request.param
    return RMatrixFamily(sf.EllipticContext(N=N, tau=tau))


def rand(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def test_quantum_r_matches_explicit_sum(fam):
    hbar, z = 0.13 - 0.04j, 0.21 + 0.17j
    N = fam.N
    ref = np.zeros((N * N, N * N), dtype=complex)
    for a in ta.basis_indices(N):
        w = (a[0] + a[1] * fam.ctx.tau) / N
        coef = np.exp(2j * np.pi * a[1] * z / N) * sf.kronecker_phi(z, w + hbar, fam.ctx)
        ref += coef * np.kron(ta.basis_t(a, N), ta.dual_basis_t(a, N))
    np.testing.assert_allclose(fam.quantum_r(hbar, z), ref, atol=1e-11)


@pytest.mark.parametrize("z", [0.21 + 0.17j, -0.33 + 0.08j])
def test_classical_expansion_is_second_order(fam, z):
    I = np.eye(fam.N ** 2)

    def res(h):
        return ta.sup_norm(fam.quantum_r(h, z) - I / h - fam.classical_r(z) - h * fam.m_matrix(z))

    ratio = res(1e-2) / res(5e-3)
    assert 3.5 <= ratio <= 4.5


def _richardson(f, z, h=1e-3):
    d = lambda h: (f(z + h) - f(z - h)) / (2 * h)
    return (4 * d(h / 2) - d(h)) / 3


def test_z_derivatives_by_finite_differences(fam):
    z = 0.19 + 0.11j
    for exact, f in ((fam.classical_r_dz, fam.classical_r), (fam.m_matrix_dz, fam.m_matrix)):
        ref = exact(z)
        assert ta.sup_norm(ref - _richardson(f, z)) < 1e-8 * (1 + ta.sup_norm(ref))


def test_r0_and_m0_are_regular_parts(fam):
    z = 1e-5
    # r(z) - N P / z -> r0, m(z) -> m0 as z -> 0
    P = ta.permutation(fam.N)
    np.testing.assert_allclose(fam.classical_r(z) - fam.N * P / z, fam.r0(), atol=1e-3)
    np.testing.assert_allclose(fam.m_matrix(1e-7), fam.m0(), atol=1e-5)
    assert abs(fam.r0_coeffs[0]) == 0


def test_maps_agree_with_partial_traces(fam):
    rng = np.random.default_rng(3)
    A = rand(rng, fam.N, fam.N)
    np.testing.assert_allclose(fam.e_map(A), fam.e_map_trace(A), atol=1e-11)
    np.testing.assert_allclose(fam.j_map(A), fam.j_map_trace(A), atol=1e-11)
    np.testing.assert_allclose(fam.j_map(A), fam.j_map_weierstrass(A), atol=1e-10)
    z = 0.27 - 0.09j
    np.testing.assert_allclose(fam.apply(fam.classical_coeffs(z), A),
                               ta.partial_trace(fam.classical_r(z), (2,), A, fam.N) / fam.N,
                               atol=1e-11)


def test_map_matrices_and_batching(fam):
    rng = np.random.default_rng(4)
    batch = rand(rng, 6, fam.N, fam.N)
    out = fam.e_map(batch)
    for k in range(6):
        np.testing.assert_allclose(out[k], fam.e_map(batch[k]), atol=1e-13)
    flat = (fam.e_matrix @ batch[0].reshape(-1)).reshape(fam.N, fam.N)
    np.testing.assert_allclose(flat, fam.e_map(batch[0]), atol=1e-12)


def test_e_map_kills_identity_and_j_is_symmetric(fam):
    N = fam.N
    np.testing.assert_allclose(fam.e_map(np.eye(N)), 0, atol=1e-13)
    rng = np.random.default_rng(5)
    A, B = rand(rng, N, N), rand(rng, N, N)
    # tr(A J(B)) = tr(J(A) B) because m0 is symmetric under slot exchange
    assert abs(np.trace(A @ fam.j_map(B)) - np.trace(fam.j_map(A) @ B)) < 1e-10


def test_perturbed_family_differs_only_in_one_index(fam):
    p = fam.perturbed((1, 0), 1.01)
    z = 0.2 + 0.1j
    diff = p.classical_r(z) - fam.classical_r(z)
    i = fam.indices.index((1, 0))
    expected = 0.01 * fam.classical_coeffs(z)[i] * ta.kron_stack(fam.N)[i]
    np.testing.assert_allclose(diff, expected, atol=1e-12)


def test_near_pole_names_index():
    fam = RMatrixFamily(sf.EllipticContext(N=2, tau=1j))
    # hbar = -omega_(1,0) puts index (1,0) on a pole
    with pytest.raises(sf.NearPoleError, match=r"\(1, 0\)"):
        fam.quantum_r(-0.5, 0.2)


@settings(max_examples=25, deadline=None)
@given(x=st.floats(-0.4, 0.4), y=st.floats(-0.4, 0.4), N=st.sampled_from([2, 3]))
def test_r_is_skew(x, y, N):
    fam = RMatrixFamily(sf.EllipticContext(N=N, tau=0.3 + 0.8j))
    z = complex(x, 0.8 * y)
    if abs(z) < 0.05:
        return
    np.testing.assert_allclose(fam.classical_r(z), -ta.swap12(fam.classical_r(-z), N), atol=1e-9)
