import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given
from hypothesis import strategies as st

from spinshape.fields import CASE1, FrameVectors, ModelParams
from spinshape.numerics import (
    BandedSymmetricOperator,
    Grid,
    SpinorField,
    bound_spectrum,
    count_below,
    discretize_direct,
    discretize_factorized,
    eigen_lowest,
    eigenvalues_in,
    eigenvalues_lowest,
    inner_product,
    laplacian_dirichlet,
    lowering_operator,
    sample,
)
from spinshape.numerics.grid import GridMismatchError


def random_operator(rng, n):
    diag = rng.standard_normal((n, 2, 2))
    diag = diag + diag.transpose(0, 2, 1)
    off = rng.standard_normal((n - 1, 2, 2))
    return BandedSymmetricOperator(diag, off)


def test_grid_geometry():
    g = Grid.box(10.0, 999)
    assert g.spacing == pytest.approx(0.02)
    assert g.nodes[0] == pytest.approx(-10 + 0.02)
    np.testing.assert_array_equal(g.nodes, -g.nodes[::-1])
    np.testing.assert_array_equal(g.links, g.dual().nodes)
    assert g.dual().extended() == g
    assert g.half_width == pytest.approx(10.0)
    with pytest.raises(ValueError):
        Grid.box(1.0, 8)


def test_field_shape_and_inner_product():
    g = Grid.box(5, 99)
    with pytest.raises(GridMismatchError):
        SpinorField(np.zeros((98, 2)), g)
    psi = sample(lambda z: np.stack([np.exp(-z**2), 1j * np.exp(-z**2)], axis=1), g)
    # h sum 2 exp(-2 z^2) against sqrt(2 pi)
    assert inner_product(psi, psi).real == pytest.approx(np.sqrt(2 * np.pi) / 2 * 2, rel=1e-10)
    with pytest.raises(GridMismatchError):
        inner_product(psi, sample(lambda z: np.ones((len(z), 2)), g.dual()))


def test_two_by_two_example():
    op = BandedSymmetricOperator(np.array([[[2.0, 1.0], [1.0, 2.0]]]), np.zeros((0, 2, 2)))
    np.testing.assert_allclose(eigenvalues_lowest(op, 2), [1.0, 3.0], atol=1e-14)
    pairs = eigen_lowest(op, 2)
    assert pairs.converged.all()
    assert count_below(op, 2.0) == 1


def test_dirichlet_laplacian_exact():
    L, N = 10.0, 999
    g = Grid.box(L, N)
    h = g.spacing
    vals = eigenvalues_lowest(laplacian_dirichlet(g), 20)
    m = np.arange(1, 11)
    exact = np.repeat((2 / h**2) * (1 - np.cos(m * np.pi * h / (2 * L))), 2)
    np.testing.assert_allclose(vals, exact, rtol=0, atol=1e-12 * (4 / h**2))


def test_factorized_free_case_is_neumann():
    g = Grid.box(10.0, 400)
    op = discretize_factorized(ModelParams(1e-300, 0.0, 0.0), g)
    vals = eigenvalues_lowest(op, 10)
    m = np.arange(5)
    exact = np.repeat((2 / g.spacing**2) * (1 - np.cos(m * np.pi / g.points)), 2)
    np.testing.assert_allclose(vals, exact, atol=1e-10)


@pytest.mark.parametrize("seed", range(4))
def test_eigenvalues_match_lapack(seed):
    rng = np.random.default_rng(seed)
    op = random_operator(rng, 30)
    ref = sla.eigh(op.to_dense(), eigvals_only=True)
    got = eigenvalues_lowest(op, 12, tol=1e-15)
    scale = op.norm_bound()
    np.testing.assert_allclose(got, ref[:12], atol=1e-13 * scale)
    band = sla.eig_banded(op.to_banded(), lower=True, eigvals_only=True)
    np.testing.assert_allclose(band, ref, atol=1e-12 * scale)
    pairs = eigen_lowest(op, 6)
    for val, vec in pairs:
        assert np.linalg.norm(op.to_dense() @ vec - val * vec) < 1e-10 * scale


def test_eigen_rejects_complex():
    diag = np.zeros((3, 2, 2), dtype=complex)
    diag[:, 0, 1], diag[:, 1, 0] = 1j, -1j
    op = BandedSymmetricOperator(diag, np.zeros((2, 2, 2), dtype=complex))
    with pytest.raises(ValueError):
        eigenvalues_lowest(op, 1)


def test_count_below_sylvester():
    rng = np.random.default_rng(7)
    op = random_operator(rng, 25)
    ref = np.linalg.eigvalsh(op.to_dense())
    for sigma in (-3.0, 0.0, 0.7, 4.0):
        assert count_below(op, sigma) == np.count_nonzero(ref < sigma)
    assert len(eigenvalues_in(op, 0.0)) == np.count_nonzero(ref < 0)


@given(st.floats(0.6, 5.0), st.floats(-4, 4), st.floats(-3, 3))
def test_factorized_hamiltonians_are_psd_and_symmetric(gamma, beta, lam):
    g = Grid.box(6.0, 40)
    for which in ("minus", "plus"):
        H = discretize_factorized(ModelParams(gamma, beta, lam), g, which)
        assert H.symmetry_defect() == 0.0
        dense = H.to_dense()
        np.testing.assert_array_equal(dense, dense.T)
        assert np.linalg.eigvalsh(dense).min() > -1e-12 * H.norm_bound()


@given(st.floats(0.6, 5.0), st.floats(-4, 4), st.floats(-3, 3), st.integers(0, 2**31))
def test_lowering_adjointness(gamma, beta, lam, seed):
    g = Grid.box(6.0, 40)
    A = lowering_operator(ModelParams(gamma, beta, lam), g)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((g.points, 2))
    y = rng.standard_normal((g.points - 1, 2))
    lhs = np.vdot(y, A.apply(x))
    rhs = np.vdot(A.apply_adjoint(y), x)
    assert abs(lhs - rhs) <= 1e-12 * (1 + abs(lhs))


def test_factorized_products():
    g = Grid.box(6.0, 50)
    A = lowering_operator(ModelParams(2.0, 0.5, 1.0), g)
    S = A.to_sparse().toarray()
    np.testing.assert_allclose(A.minus().to_dense(), S.T @ S, atol=1e-9)
    np.testing.assert_allclose(A.plus().to_dense(), S @ S.T, atol=1e-9)


def test_complex_frame_operator_is_hermitian():
    g = Grid.box(5.0, 30)
    H = discretize_factorized(ModelParams(2.0, 0.5, 1.0), g, frame=FrameVectors((0, 0, 1), (0, 1, 0)))
    assert not H.is_real
    dense = H.to_dense()
    np.testing.assert_allclose(dense, dense.conj().T, atol=1e-12)


def test_direct_scalar_limit():
    g = Grid.box(20.0, 2000)
    op = discretize_direct(ModelParams(2.0, 0.0, 0.0), g)
    vals = eigenvalues_in(op, 4.0)
    np.testing.assert_allclose(vals, [0, 0, 3, 3], atol=3e-3)


def test_case1_pairs():
    g = Grid.box(12.0, 1200)
    vals = eigenvalues_lowest(discretize_factorized(ModelParams(1.0, 1.0, 1.0), g, family=CASE1), 6)
    np.testing.assert_allclose(vals, [0, 0, 2, 2, 4, 4], atol=2e-3)


def test_second_order_convergence():
    p = ModelParams(2.5, 1.0, 1.0)
    errs = []
    for h in (0.04, 0.02, 0.01):
        g = Grid(h, int(round(40 / h)) - 1)
        vals = eigenvalues_lowest(discretize_factorized(p, g), 4)
        errs.append(abs(vals[2] - 32 / 9))
    slopes = np.diff(np.log(errs)) / np.diff(np.log([0.04, 0.02, 0.01]))
    assert np.all(np.abs(slopes - 2.0) < 0.2), slopes


def test_bound_spectrum_kernel_and_walls():
    g = Grid.box(20.0, 2000)
    bs = bound_spectrum(discretize_factorized(ModelParams(2.5, 1.0, 1.0), g), 4.0)
    assert bs.kernel_dimension() == 2
    assert len(bs.bound_values) == 4
    # broken case: H- still has a 2-dim kernel, but it sits on the walls
    broken = bound_spectrum(discretize_factorized(ModelParams(0.5, 2.0, 1.0), g), 0.0, extra=2)
    assert broken.raw_kernel_dimension() == 2
    assert broken.kernel_dimension() == 0


def test_worker_count_does_not_change_results():
    op = discretize_factorized(ModelParams(2.5, 1.0, 1.0), Grid.box(20.0, 2000))
    np.testing.assert_array_equal(eigenvalues_lowest(op, 8, workers=1), eigenvalues_lowest(op, 8, workers=4))
