import logging
import math

import numpy as np
import pytest

from src.algebra import (
    casimirs,
    laplacian_apply,
    norm,
    project_eigenspace_1,
    real_eigenspace_basis,
)
from src.certifier import functional_derivative_bound
from src.exceptions import (
    DivergenceError,
    InvalidDimensionError,
    InvalidElementError,
    SingularJacobianError,
    SteadyStateError,
)
from src.models import CommonSpectrum, Provenance, ProvenanceKind, RigidityConclusion, SteadyState
from src.steady import (
    align_first_eigenspace,
    eigen_state,
    newton_functional_state,
    rigidity_report,
    rotation_matrix,
    so3_rotate,
    steady_residuals,
    validate_steady,
    zonal_state,
)

LOADED = Provenance(kind=ProvenanceKind.LOADED)


class TestZonalState:
    def test_laplacian_relation(self, bases, rng, zonal_profile):
        basis = bases[8]
        d = zonal_profile(rng, 8)
        state = zonal_state(basis, d)
        np.testing.assert_allclose(np.diag(state.P0), 1j * d, atol=1e-14)
        assert norm(laplacian_apply(basis, state.P0) - state.W0) <= 1e-12
        assert state.provenance.kind == ProvenanceKind.ZONAL
        assert state.commutator_residual <= 1e-12

    def test_rejects_trace(self, bases):
        with pytest.raises(InvalidElementError):
            zonal_state(bases[3], np.array([1.0, 0.0, 0.0]))

    def test_rejects_length(self, bases):
        with pytest.raises(InvalidDimensionError):
            zonal_state(bases[3], np.zeros(4))

    def test_zero_profile(self, bases):
        state = zonal_state(bases[4], np.zeros(4))
        assert norm(state.W0) == 0.0


class TestEigenState:
    def test_first_eigenspace_is_x3(self, bases):
        basis = bases[6]
        X3 = basis.X[2]
        state = eigen_state(basis, 1)
        # T_{1,0} = ±√3·X3, afhankelijk van de fase
        assert min(norm(state.P0 - np.sqrt(3) * X3), norm(state.P0 + np.sqrt(3) * X3)) <= 1e-12
        assert norm(state.W0 + 2 * state.P0) <= 1e-12

    def test_explicit_coefficients(self, bases, rng):
        basis = bases[5]
        coeffs = rng.standard_normal(5)
        state = eigen_state(basis, 2, coeffs)
        expected = np.tensordot(coeffs, np.stack(real_eigenspace_basis(basis, 2)), axes=1)
        np.testing.assert_allclose(state.P0, expected, atol=1e-13)
        assert norm(state.W0 + 6 * state.P0) <= 1e-12
        assert state.provenance.l == 2

    @pytest.mark.parametrize("l", [0, 5])
    def test_rejects_degree(self, bases, l):
        with pytest.raises(InvalidDimensionError):
            eigen_state(bases[5], l)

    def test_rejects_coefficient_count(self, bases):
        with pytest.raises(InvalidDimensionError):
            eigen_state(bases[5], 2, np.ones(3))


class TestValidateSteady:
    def test_rejects_non_steady_pair(self, bases):
        basis = bases[4]
        with pytest.raises(SteadyStateError):
            validate_steady(basis, basis.X[0], basis.X[1], LOADED)

    def test_rejects_wrong_laplacian(self, bases):
        basis = bases[4]
        with pytest.raises(SteadyStateError) as info:
            validate_steady(basis, basis.X[2], basis.X[2], LOADED)
        assert info.value.laplacian_residual > 0.1

    def test_zero_pair_residuals(self, bases):
        zero = np.zeros((3, 3), dtype=complex)
        assert steady_residuals(bases[3], zero, zero) == (0.0, 0.0)


class TestNewtonFunctional:
    def test_linear_f_with_shift(self, bases, rng, zonal_profile):
        basis = bases[8]
        d_init = np.real(np.diag(-1j * basis.X[2])) + 0.01 * zonal_profile(rng, 8)
        state = newton_functional_state(basis, [0.3, -2.0], d_init)
        assert state.provenance.kind == ProvenanceKind.NEWTON
        assert state.provenance.shift == pytest.approx(0.3, abs=1e-12)
        assert norm(state.W0 + 2 * state.P0) <= 1e-9 * norm(state.W0)
        p, w = state.spectrum.p, state.spectrum.w
        np.testing.assert_allclose(w, 0.3 - 2 * p - state.provenance.shift, atol=1e-9)

    def test_minus_identity_converges_to_zero(self, bases, rng, zonal_profile):
        state = newton_functional_state(bases[6], [0.0, -1.0], zonal_profile(rng, 6))
        assert norm(state.P0) <= 1e-12

    def test_cubic_f(self, bases):
        state = newton_functional_state(bases[2], [0.0, -1.625, 0.0, -0.5], np.array([1.0, -1.0]))
        a = math.sqrt(0.75)
        np.testing.assert_allclose(np.diag(state.P0).imag, [a, -a], atol=1e-10)
        assert state.provenance.iterations > 0

    def test_singular_jacobian(self, bases):
        with pytest.raises(SingularJacobianError):
            newton_functional_state(bases[2], [0.0, -1.625, 0.0, -0.5], np.array([0.5, -0.5]))

    def test_divergence_when_out_of_iterations(self, bases):
        with pytest.raises(DivergenceError) as info:
            newton_functional_state(bases[2], [0.0, -1.625, 0.0, -0.5], np.array([1.0, -1.0]), max_iter=0)
        assert info.value.last_residual > 0

    def test_rejects_initial_length(self, bases):
        with pytest.raises(InvalidDimensionError):
            newton_functional_state(bases[3], [0.0, -1.0], np.zeros(2))


class TestRotation:
    def test_rotation_matrix_is_orthogonal(self, rng):
        R = rotation_matrix(rng.standard_normal(3))
        np.testing.assert_allclose(R @ R.T, np.eye(3), atol=1e-12)
        assert np.linalg.det(R) == pytest.approx(1.0)

    def test_action_matches_classical_rotation(self, bases, rng):
        basis = bases[5]
        rho = rng.standard_normal(3)
        a = rng.standard_normal(3)
        W = np.tensordot(a, basis.X, axes=1)
        rotated = so3_rotate(basis, rho, W)
        b, _ = project_eigenspace_1(basis, rotated)
        np.testing.assert_allclose(b, rotation_matrix(rho) @ a, atol=1e-10)

    def test_commutes_with_laplacian_and_casimirs(self, bases, rng, random_su):
        basis = bases[6]
        rho = rng.standard_normal(3)
        W = random_su(rng, 6)
        rotated = so3_rotate(basis, rho, W)
        lhs = laplacian_apply(basis, rotated)
        rhs = so3_rotate(basis, rho, laplacian_apply(basis, W))
        assert norm(lhs - rhs) <= 1e-10 * norm(rhs)
        np.testing.assert_allclose(casimirs(rotated, 4), casimirs(W, 4), rtol=1e-10, atol=1e-13)

    def test_alignment(self, bases, rng, random_su):
        basis = bases[6]
        W = random_su(rng, 6)
        _, aligned = align_first_eigenspace(basis, W)
        b, _ = project_eigenspace_1(basis, aligned)
        assert np.linalg.norm(b[:2]) <= 1e-10 * np.linalg.norm(b)
        assert b[2] > 0

    def test_alignment_antiparallel(self, bases):
        basis = bases[4]
        rho, aligned = align_first_eigenspace(basis, -basis.X[2])
        np.testing.assert_allclose(rho, [np.pi, 0.0, 0.0])
        assert norm(aligned - basis.X[2]) <= 1e-12

    def test_alignment_without_first_component(self, bases, caplog):
        basis = bases[5]
        W = real_eigenspace_basis(basis, 2)[0]
        with caplog.at_level(logging.WARNING):
            rho, aligned = align_first_eigenspace(basis, W)
        np.testing.assert_array_equal(rho, np.zeros(3))
        np.testing.assert_array_equal(aligned, W)
        assert "ℙ1 W is nul" in caplog.text


class TestRigidity:
    def test_mixed_state_is_diagonal_after_alignment(self, basis16, rng, mixed_state):
        state = mixed_state(basis16)
        for _ in range(20):
            rho = rng.standard_normal(3)
            W0 = so3_rotate(basis16, rho, state.W0)
            P0 = so3_rotate(basis16, rho, state.P0)
            rotated = validate_steady(basis16, W0, P0, LOADED)
            report = rigidity_report(basis16, rotated)
            assert -6 < report.L < -2
            assert report.conclusion == RigidityConclusion.DIAGONAL_CONFIRMED
            assert report.offdiag_residual <= 1e-8
            assert report.energy_identity_residual <= 1e-8

    def test_first_eigenstate(self, bases):
        report = rigidity_report(bases[8], eigen_state(bases[8], 1))
        assert report.L == pytest.approx(-2.0)
        assert report.conclusion == RigidityConclusion.DIAGONAL_CONFIRMED
        assert report.x3_commutator_residual <= 1e-10

    def test_second_eigenstate_is_out_of_range(self, bases, rng):
        state = eigen_state(bases[6], 2, rng.standard_normal(5))
        report = rigidity_report(bases[6], state)
        assert report.conclusion == RigidityConclusion.NOT_APPLICABLE

    @pytest.mark.parametrize(
        "f", [[0.0], [0.0, -1.0], [0.0, -1.5], [0.0, -1.9, 0.0, -0.01]], ids=["nul", "-x", "-1.5x", "kubisch"]
    )
    def test_functional_states_with_slope_above_minus_two_vanish(self, basis16, f):
        for seed in range(20):
            d_init = 0.25 * np.random.default_rng(seed).standard_normal(16)
            d_init -= d_init.mean()
            state = newton_functional_state(basis16, f, d_init)
            p = np.diag(state.P0).imag
            assert functional_derivative_bound(f, np.concatenate([d_init, p])) > -2
            assert norm(state.W0) <= 1e-8

    def test_functional_state_with_steep_slope_can_be_nonzero(self, basis16, cubic_state):
        state = cubic_state(basis16)
        assert norm(state.W0) > 1.0
        assert functional_derivative_bound(state.provenance.f, np.diag(state.P0).imag) < -2
        report = rigidity_report(basis16, state)
        assert -6 < report.L < -2
        assert report.conclusion == RigidityConclusion.DIAGONAL_CONFIRMED

    def test_zero_state(self, bases):
        report = rigidity_report(bases[4], zonal_state(bases[4], np.zeros(4)))
        assert report.L == math.inf
        assert report.conclusion == RigidityConclusion.ZERO_CONFIRMED

    def test_violation_is_reported(self, bases, caplog):
        basis = bases[3]
        X3 = basis.X[2]
        p = np.array([-1.0, 0.0, 1.0])
        fake = SteadyState.model_construct(
            W0=X3,
            P0=X3,
            spectrum=CommonSpectrum(n=3, Lambda=np.eye(3, dtype=complex), p=p, w=-p),
            commutator_residual=0.0,
            laplacian_residual=0.0,
            provenance=LOADED,
        )
        with caplog.at_level(logging.ERROR):
            report = rigidity_report(basis, fake)
        assert report.conclusion == RigidityConclusion.VIOLATION
        assert "Rigiditeit geschonden" in caplog.text
