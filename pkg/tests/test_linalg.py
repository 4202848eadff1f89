import numpy as np
import pytest
from scipy.linalg import expm, logm
from scipy.optimize import minimize

from cohthermo.config import Tolerances
from cohthermo.ensembles import random_density_matrix, random_hermitian, random_pure_state, random_unitary
from cohthermo.errors import InvalidObservableError, InvalidStateError, InvariantError, ParameterError, ShapeError
from cohthermo.linalg import (
    SpectralDecomposition,
    check_basis,
    check_density_matrix,
    check_observable,
    clamp_nonnegative,
    coherence,
    dephase,
    diagonal_entropy,
    free_energy,
    log_thermal_populations,
    populations,
    relative_entropy,
    shannon_entropy,
    spectral_decompose,
    thermal_decomposition,
    thermal_populations,
    thermal_state,
    trace_distance,
    von_neumann_entropy,
)

from conftest import PLUS, SX, SZ

Z = np.eye(2)


class TestValidation:
    def test_observable_rejects_non_hermitian(self):
        with pytest.raises(InvalidObservableError):
            check_observable([[0, 1], [0, 0]])

    def test_observable_rejects_non_square(self):
        with pytest.raises(ShapeError):
            check_observable(np.zeros((2, 3)))

    def test_state_checks(self):
        with pytest.raises(InvalidStateError):
            check_density_matrix(np.diag([0.6, 0.6]))
        with pytest.raises(InvalidStateError):
            check_density_matrix(np.diag([1.2, -0.2]))
        check_density_matrix(np.diag([1.0 + 1e-11, -1e-11]) / (1.0))  # within noise

    def test_basis_check(self, rng):
        check_basis(random_unitary(5, rng))
        with pytest.raises(ShapeError):
            check_basis(np.ones((2, 2)))


class TestSpectral:
    def test_identity(self):
        sd = spectral_decompose(np.eye(3))
        np.testing.assert_allclose(sd.eigenvalues, [1, 1, 1])
        np.testing.assert_allclose(sd.eigenvectors, np.eye(3))

    def test_pauli_x(self):
        sd = spectral_decompose(SX)
        np.testing.assert_allclose(sd.eigenvalues, [-1, 1])
        minus = np.array([1, -1]) / np.sqrt(2)
        plus = np.array([1, 1]) / np.sqrt(2)
        assert abs(abs(np.vdot(minus, sd.eigenvectors[:, 0])) - 1) < 1e-12
        assert abs(abs(np.vdot(plus, sd.eigenvectors[:, 1])) - 1) < 1e-12

    def test_reconstruction_and_phase(self, rng):
        H = random_hermitian(8, rng)
        sd = spectral_decompose(H)
        assert np.max(np.abs(sd.reconstruct() - H)) < 1e-10
        V = sd.eigenvectors
        assert np.max(np.abs(V.conj().T @ V - np.eye(8))) < 1e-10
        assert np.all(np.diff(sd.eigenvalues) >= 0)
        piv = V[np.argmax(np.abs(V), axis=0), np.arange(8)]
        assert np.all(np.abs(piv.imag) < 1e-14) and np.all(piv.real > 0)

    def test_deterministic(self, rng):
        H = random_hermitian(6, rng)
        a, b = spectral_decompose(H), spectral_decompose(H.copy())
        assert np.array_equal(a.eigenvectors, b.eigenvectors)

    def test_function(self, rng):
        H = random_hermitian(4, rng)
        np.testing.assert_allclose(spectral_decompose(H).function(lambda w: np.exp(-1j * w)), expm(-1j * H), atol=1e-12)


class TestThermal:
    def test_beta_zero(self, rng):
        np.testing.assert_allclose(thermal_state(random_hermitian(3, rng), 0.0), np.eye(3) / 3)

    def test_two_level_populations(self):
        rho = thermal_state(np.diag([-1.0, 1.0]), 1.0)
        e2 = np.exp(2.0)
        np.testing.assert_allclose(np.diag(rho).real, [e2 / (e2 + 1), 1 / (e2 + 1)], atol=1e-14)
        assert abs(rho[0, 0].real - 0.880797) < 1e-6

    def test_rotated_basis(self):
        rho = thermal_state(0.7 * SX, 1.3)
        p = populations(rho, spectral_decompose(SX))
        w = np.exp(1.3 * 0.7)
        np.testing.assert_allclose(p, [w / (w + 1 / w), (1 / w) / (w + 1 / w)], atol=1e-14)
        assert abs(rho[0, 1]) > 0.1

    def test_commutes_with_h(self, rng):
        H = random_hermitian(6, rng)
        rho = thermal_state(H, 2.0)
        assert np.max(np.abs(rho @ H - H @ rho)) < 1e-10
        np.testing.assert_allclose(rho, expm(-2.0 * H) / np.trace(expm(-2.0 * H)), atol=1e-12)

    def test_negative_beta(self):
        with pytest.raises(ParameterError):
            thermal_state(SZ, -1.0)
        with pytest.raises(ParameterError):
            thermal_state(SZ, np.inf)

    def test_free_energy(self):
        assert abs(free_energy(np.zeros((2, 2)), 1.0) + np.log(2)) < 1e-14
        assert abs(free_energy([[3.5]], 0.3) - 3.5) < 1e-14
        assert abs(free_energy(np.diag([0.0, 2.0]), 1.0) + np.log1p(np.exp(-2))) < 1e-14
        assert abs(free_energy(np.diag([0.0, 2.0]), 1.0) + 0.126928) < 1e-6
        with pytest.raises(ParameterError):
            free_energy(SZ, 0.0)

    def test_free_energy_overflow_safe(self):
        assert np.isfinite(free_energy(np.diag([-1e4, 1e4]), 10.0))

    def test_log_populations(self):
        e = np.arange(50.0)
        lp = log_thermal_populations(e, 20.0)
        assert np.all(np.isfinite(lp))
        np.testing.assert_allclose(np.exp(lp), thermal_populations(e, 20.0), rtol=1e-12, atol=0)

    def test_thermal_decomposition(self, rng):
        H = random_hermitian(5, rng)
        np.testing.assert_allclose(thermal_decomposition(H, 0.8).reconstruct(), thermal_state(H, 0.8), atol=1e-13)


class TestEntropy:
    def test_pure_zero(self, rng):
        assert abs(von_neumann_entropy(random_pure_state(5, rng))) < 1e-12

    def test_maximally_mixed(self):
        assert abs(von_neumann_entropy(np.eye(2) / 2) - np.log(2)) < 1e-14

    def test_gibbs_entropy(self):
        e2 = np.exp(2.0)
        p = np.array([e2, 1.0]) / (e2 + 1)
        s = von_neumann_entropy(thermal_state(np.diag([-1.0, 1.0]), 1.0))
        assert abs(s + np.sum(p * np.log(p))) < 1e-14
        assert abs(s - 0.365334) < 1e-6

    def test_unitary_invariance(self, rng):
        for _ in range(10):
            rho, U = random_density_matrix(6, rng), random_unitary(6, rng)
            assert abs(von_neumann_entropy(U @ rho @ U.conj().T) - von_neumann_entropy(rho)) < 1e-10

    def test_shannon_floor(self):
        assert shannon_entropy([1.0, 1e-16]) == 0.0

    def test_clamp(self):
        assert clamp_nonnegative(-5e-12) == 0.0
        with pytest.raises(InvariantError):
            clamp_nonnegative(-1e-9)


class TestRelativeEntropy:
    def test_self_zero(self, rng):
        rho = random_density_matrix(5, rng)
        assert relative_entropy(rho, rho) < 1e-11

    def test_pure_vs_mixed(self):
        assert abs(relative_entropy(np.diag([1.0, 0.0]), np.eye(2) / 2) - np.log(2)) < 1e-14

    def test_support_mismatch(self):
        assert relative_entropy(np.eye(2) / 2, np.diag([1.0, 0.0])) == np.inf

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            relative_entropy(np.eye(2) / 2, np.eye(3) / 3)

    def test_matrix_log_oracle(self, rng):
        for _ in range(5):
            a, b = random_density_matrix(4, rng), random_density_matrix(4, rng)
            ref = np.trace(a @ (logm(a) - logm(b))).real
            assert abs(relative_entropy(a, b) - ref) < 1e-10

    def test_spectral_sigma(self, rng):
        a, H = random_density_matrix(4, rng), random_hermitian(4, rng)
        assert abs(relative_entropy(a, thermal_decomposition(H, 1.5)) - relative_entropy(a, thermal_state(H, 1.5))) < 1e-10

    def test_nonneg_and_zero_iff_equal(self, rng):
        a, b = random_density_matrix(3, rng), random_density_matrix(3, rng)
        assert relative_entropy(a, b) > 1e-6

    def test_pythagorean(self, rng):
        for _ in range(10):
            rho = random_density_matrix(5, rng)
            B = random_unitary(5, rng)
            sigma = (B * rng.dirichlet(np.ones(5))) @ B.conj().T
            lhs = relative_entropy(rho, sigma)
            rhs = coherence(rho, B) + relative_entropy(dephase(rho, B), sigma)
            assert abs(lhs - rhs) < 1e-10


class TestDephaseCoherence:
    def test_diagonal_unchanged(self):
        rho = np.diag([0.3, 0.7]).astype(complex)
        np.testing.assert_allclose(dephase(rho, Z), rho)
        assert coherence(rho, Z) == 0.0

    def test_plus_state(self):
        np.testing.assert_allclose(dephase(PLUS, Z), np.eye(2) / 2, atol=1e-15)
        assert abs(coherence(PLUS, Z) - np.log(2)) < 1e-12

    def test_idempotent_trace_preserving(self, rng):
        rho, B = random_density_matrix(6, rng), random_unitary(6, rng)
        d1 = dephase(rho, B)
        assert np.max(np.abs(dephase(d1, B) - d1)) < 1e-12
        assert abs(np.trace(d1) - 1) < 1e-12
        np.testing.assert_allclose(populations(d1, B), populations(rho, B), atol=1e-14)
        inner = B.conj().T @ d1 @ B
        assert np.max(np.abs(inner - np.diag(np.diag(inner)))) < 1e-12

    def test_diagonal_entropy(self, rng):
        rho = random_density_matrix(4, rng)
        assert abs(diagonal_entropy(rho, Z if rho.shape[0] == 2 else np.eye(4)) - shannon_entropy(np.diag(rho).real)) < 1e-14

    def test_minimisation_oracle(self, rng):
        """C equals the smallest relative entropy to any basis-diagonal state."""
        rho = random_density_matrix(4, rng)
        B = np.eye(4)

        def f(x):
            q = np.exp(x - x.max())
            return relative_entropy(rho, np.diag(q / q.sum()))

        best = min(
            (minimize(f, x0, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 20000})
             for x0 in (np.zeros(4), rng.normal(size=4))),
            key=lambda r: r.fun,
        )
        assert abs(best.fun - coherence(rho, B)) < 1e-6
        assert best.fun >= coherence(rho, B) - 1e-12

    def test_trace_distance(self):
        assert abs(trace_distance(np.diag([1.0, 0.0]), np.diag([0.0, 1.0])) - 2.0) < 1e-14


def test_spectral_decomposition_type():
    sd = SpectralDecomposition(np.array([0.25, 0.75]), np.eye(2))
    assert sd.dim == 2
    np.testing.assert_allclose(sd.reconstruct(), np.diag([0.25, 0.75]))


def test_custom_tolerances():
    loose = Tolerances(herm=1e-3)
    check_observable([[0, 1 + 1e-4], [1, 0]], loose)
