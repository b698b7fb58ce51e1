import numpy as np
import pytest
from pydantic import ValidationError

from src.algebra import (
    bracket,
    build_spin_basis,
    casimir,
    casimirs,
    coordinates,
    eigenbasis_build,
    hamiltonian,
    inner,
    laplacian_apply,
    laplacian_blocks_apply,
    laplacian_spectrum,
    momentum,
    norm,
    norm_sq,
    poisson_solve,
    project_eigenspace_1,
    real_eigenspace_basis,
    su_basis,
    validate_element,
)
from src.exceptions import DimensionMismatchError, InvalidDimensionError, InvalidElementError

LEVI_CIVITA = {(0, 1, 2): 1, (1, 2, 0): 1, (2, 0, 1): 1}


def _dense_laplacian(basis) -> np.ndarray:
    n = basis.n
    columns = []
    for j in range(n):
        for k in range(n):
            E = np.zeros((n, n), dtype=complex)
            E[j, k] = 1.0
            columns.append(laplacian_apply(basis, E).ravel())
    return np.array(columns).T


class TestSpinBasis:
    @pytest.mark.parametrize("n", [2, 3, 4, 8, 16, 32, 64])
    def test_structure_constants(self, n):
        basis = build_spin_basis(n)
        X = basis.X
        for (i, j, k), sign in LEVI_CIVITA.items():
            assert np.max(np.abs(bracket(X[i], X[j]) - sign * basis.hbar * X[k])) <= 1e-12
        gram = np.array([[inner(a, b).real for b in X] for a in X])
        np.testing.assert_allclose(gram, np.eye(3) / 3, atol=1e-12)

    @pytest.mark.parametrize("n", [2, 5, 16])
    def test_spin_casimir_is_minus_identity(self, n):
        X = build_spin_basis(n).X
        np.testing.assert_allclose(sum(A @ A for A in X), -np.eye(n), atol=1e-12)

    def test_hbar(self):
        basis = build_spin_basis(5)
        assert basis.hbar == pytest.approx(2 / np.sqrt(24))

    def test_generators_are_skew_hermitian_and_traceless(self, bases):
        for X in bases[6].X:
            validate_element(X, 6)

    @pytest.mark.parametrize("n", [1, 0, -3])
    def test_rejects_small_dimension(self, n):
        with pytest.raises(InvalidDimensionError):
            build_spin_basis(n)

    def test_rejects_non_integer_dimension(self):
        with pytest.raises(InvalidDimensionError):
            build_spin_basis(2.5)

    def test_is_frozen(self, bases):
        basis = bases[3]
        with pytest.raises(ValidationError):
            basis.hbar = 1.0
        with pytest.raises(ValidationError):
            basis.blocks[1].k = 0


class TestValidation:
    def test_accepts_su_element(self, rng, random_su):
        W = random_su(rng, 5)
        assert validate_element(W, 5) is not None

    def test_rejects_hermitian(self):
        with pytest.raises(InvalidElementError):
            validate_element(np.diag([1.0, -1.0]).astype(complex))

    def test_rejects_trace(self):
        with pytest.raises(InvalidElementError):
            validate_element(1j * np.eye(3))

    def test_u_n_allowed_without_trace_check(self):
        validate_element(1j * np.eye(3), traceless=False)

    def test_rejects_nan(self):
        W = np.zeros((2, 2), dtype=complex)
        W[0, 1] = np.nan
        with pytest.raises(InvalidElementError):
            validate_element(W)

    def test_dimension_mismatch(self, rng, random_su):
        with pytest.raises(DimensionMismatchError):
            validate_element(random_su(rng, 4), 5)
        with pytest.raises(DimensionMismatchError):
            inner(np.zeros((2, 2)), np.zeros((3, 3)))


class TestLaplacian:
    @pytest.mark.parametrize("n", range(2, 9))
    def test_dense_spectrum(self, n):
        basis = build_spin_basis(n)
        eigenvalues = np.sort(np.linalg.eigvals(_dense_laplacian(basis)).real)
        expected = np.sort(np.concatenate([np.full(2 * l + 1, -l * (l + 1.0)) for l in range(n)]))
        np.testing.assert_allclose(eigenvalues, expected, atol=1e-9)

    def test_block_apply_matches_brackets(self, bases, rng, random_su):
        basis = bases[8]
        W = random_su(rng, 8)
        direct = laplacian_apply(basis, W)
        assert norm(laplacian_blocks_apply(basis, W) - direct) <= 1e-10 * norm(direct)

    def test_spectrum_levels(self, bases):
        levels = laplacian_spectrum(bases[6])
        assert [l for l, _, _ in levels] == list(range(1, 6))
        for l, value, multiplicity in levels:
            assert value == pytest.approx(-l * (l + 1), abs=1e-9)
            assert multiplicity == 2 * l + 1

    def test_two_by_two_blocks(self, bases):
        blocks = bases[2].blocks
        np.testing.assert_allclose(blocks[0].dense(), [[-1.0, 1.0], [1.0, -1.0]])
        np.testing.assert_allclose(blocks[1].diag, [-2.0])


class TestPoisson:
    @pytest.mark.parametrize("n", [2, 3, 4, 16, 64])
    def test_round_trip(self, n, rng, random_su):
        basis = build_spin_basis(n)
        W = random_su(rng, n)
        P = poisson_solve(basis, W)
        assert norm(laplacian_apply(basis, P) - W) <= 1e-10 * norm(W)
        validate_element(P, n)

    @pytest.mark.parametrize("n", [2, 5, 16])
    def test_matches_eigenbasis_solve(self, n, bases, rng, random_su):
        basis = bases[n]
        W = random_su(rng, n)
        expected = np.zeros((n, n), dtype=complex)
        for entry in eigenbasis_build(basis):
            expected += inner(entry.T, W) * entry.T / (-entry.l * (entry.l + 1))
        assert norm(poisson_solve(basis, W) - expected) <= 1e-10 * norm(expected)

    def test_zero(self, bases):
        assert norm(poisson_solve(bases[4], np.zeros((4, 4), dtype=complex))) == 0.0

    def test_x3_is_first_eigenvector(self, bases):
        basis = bases[8]
        X3 = basis.X[2]
        np.testing.assert_allclose(poisson_solve(basis, X3), -X3 / 2, atol=1e-13)


class TestEigenbasis:
    def test_orthonormal_and_eigen(self, bases):
        basis = bases[6]
        entries = eigenbasis_build(basis)
        assert len(entries) == 6**2 - 1
        gram = np.array([[inner(a.T, b.T) for b in entries] for a in entries])
        np.testing.assert_allclose(gram, np.eye(len(entries)), atol=1e-12)
        for entry in entries:
            residual = laplacian_apply(basis, entry.T) + entry.l * (entry.l + 1) * entry.T
            assert norm(residual) <= 1e-10 * entry.l * (entry.l + 1)

    def test_ordering_and_multiplicity(self, bases):
        entries = eigenbasis_build(bases[5])
        keys = [(e.l, e.m) for e in entries]
        assert keys == sorted(keys)
        for l in range(1, 5):
            assert sorted(m for ll, m in keys if ll == l) == list(range(-l, l + 1))

    def test_phase_convention(self, bases):
        for entry in eigenbasis_build(bases[5]):
            flat = entry.T.ravel()
            lead = flat[np.flatnonzero(np.abs(flat) > 1e-12)[0]]
            assert lead.imag > 0
            assert abs(lead.real) <= 1e-12

    def test_l_max(self, bases):
        entries = eigenbasis_build(bases[6], l_max=2)
        assert {e.l for e in entries} == {1, 2}
        with pytest.raises(InvalidDimensionError):
            eigenbasis_build(bases[6], l_max=6)

    def test_real_basis(self, bases):
        basis = bases[6]
        elements = real_eigenspace_basis(basis, 3)
        assert len(elements) == 7
        for E in elements:
            validate_element(E, 6)
            assert norm(laplacian_apply(basis, E) + 12 * E) <= 1e-10
        gram = np.array([[inner(a, b).real for b in elements] for a in elements])
        np.testing.assert_allclose(gram, np.eye(7), atol=1e-12)


class TestProjectionAndInvariants:
    def test_projection_of_generators(self, bases):
        basis = bases[5]
        a, projected = project_eigenspace_1(basis, basis.X[2])
        np.testing.assert_allclose(a, [0.0, 0.0, 1.0], atol=1e-12)
        np.testing.assert_allclose(projected, basis.X[2], atol=1e-12)

    def test_projection_drops_higher_degrees(self, bases):
        basis = bases[5]
        T20 = real_eigenspace_basis(basis, 2)[2]
        W = 2 * basis.X[0] - basis.X[1] + T20
        a, projected = project_eigenspace_1(basis, W)
        np.testing.assert_allclose(a, [2.0, -1.0, 0.0], atol=1e-12)
        assert norm(projected - (2 * basis.X[0] - basis.X[1])) <= 1e-12

    def test_casimirs(self, rng, random_su):
        W = random_su(rng, 6, scale=1.3)
        values = casimirs(W, 5)
        assert values[0] == pytest.approx(norm_sq(W), rel=1e-12)
        for k in range(2, 6):
            assert values[k - 2] == pytest.approx(casimir(W, k), rel=1e-10, abs=1e-12)
        assert casimir(W, 1) == pytest.approx(0.0, abs=1e-12)

    def test_momentum_and_energy_of_x3(self, bases):
        basis = bases[8]
        np.testing.assert_allclose(momentum(basis, basis.X[2]), [0.0, 0.0, 1 / 3], atol=1e-12)
        assert hamiltonian(basis, basis.X[2]) == pytest.approx(-1 / 12, rel=1e-12)

    def test_su_basis(self):
        n = 4
        E = su_basis(n)
        assert E.shape == (n**2 - 1, n, n)
        gram = coordinates(E, E)
        np.testing.assert_allclose(gram, np.eye(n**2 - 1), atol=1e-12)
        for element in E:
            validate_element(element, n)

    def test_coordinates_reconstruct(self, rng, random_su):
        E = su_basis(5)
        W = random_su(rng, 5)
        rebuilt = np.tensordot(coordinates(E, W), E, axes=1)
        np.testing.assert_allclose(rebuilt, W, atol=1e-12)
