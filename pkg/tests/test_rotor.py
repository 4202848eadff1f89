
import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import jv

from cohthermo.errors import ParameterError, TruncationError, TruncationWarning
from cohthermo.fluctuation import exact_expectations
from cohthermo.models.rotor import (
    RotorParams,
    apply_kick_angle,
    bessel_bandwidth,
    kick_coefficients,
    rotor_distribution,
    rotor_floquet_operator,
    rotor_free_operator,
    rotor_kick_operator,
    rotor_kick_operator_angle,
    rotor_run,
    saturation_statistics,
    thermal_cutoff,
)


def quad_entry(k, d):
    re = quad(lambda th: np.cos(-k * np.cos(th) - d * th), 0, 2 * np.pi, limit=200, epsabs=1e-12)[0]
    im = quad(lambda th: np.sin(-k * np.cos(th) - d * th), 0, 2 * np.pi, limit=200, epsabs=1e-12)[0]
    return (re + 1j * im) / (2 * np.pi)


class TestKick:
    def test_k_zero_identity(self):
        np.testing.assert_array_equal(rotor_kick_operator(0.0, 5), np.eye(11))

    def test_quadrature_oracle(self):
        k, N = 3.7, 24
        K = rotor_kick_operator(k, N)
        for n, m in [(0, 0), (3, 1), (-2, 5), (10, -4), (-12, 12), (N, 0)]:
            assert abs(K[n + N, m + N] - quad_entry(k, n - m)) < 1e-10

    def test_toeplitz_structure(self):
        K = rotor_kick_operator(2.5, 20)
        for d in range(-5, 6):
            diag = np.diagonal(K, -d)[:30]
            assert np.max(np.abs(diag - diag[0])) < 1e-15

    def test_unitary(self):
        K = rotor_kick_operator(9.5, 64)
        assert np.max(np.abs(K.conj().T @ K - np.eye(129))) < 1e-12
        np.testing.assert_allclose(np.linalg.norm(K, axis=0), 1, atol=1e-10)

    def test_bandwidth(self):
        b = bessel_bandwidth(9.5)
        assert abs(jv(b + 1, 9.5)) < 1e-14 and abs(jv(b, 9.5)) >= 1e-14
        assert bessel_bandwidth(0.0) == 0

    def test_truncation_error(self):
        with pytest.raises(TruncationError):
            rotor_kick_operator(9.5, 10)
        with pytest.raises(ParameterError):
            rotor_kick_operator(1.0, 0)

    def test_coefficients(self):
        c = kick_coefficients(1.3, 3)
        assert abs(c[3] - jv(0, 1.3)) < 1e-15
        assert abs(c[4] - (-1j) * jv(1, 1.3)) < 1e-15

    def test_angle_route(self, rng):
        N = 40
        psi = rng.normal(size=(3, 81)) + 1j * rng.normal(size=(3, 81))
        K = rotor_kick_operator(4.0, N)
        np.testing.assert_allclose(apply_kick_angle(psi, 4.0, N), psi @ K.T, atol=1e-12)
        assert np.max(np.abs(rotor_kick_operator_angle(4.0, N) - K)) < 1e-12


class TestFree:
    def test_values(self):
        f = rotor_free_operator(0.25, 4)
        assert f[4] == 1
        assert abs(f[6] - np.exp(-0.5j)) < 1e-15
        np.testing.assert_array_equal(rotor_free_operator(0.0, 4), np.ones(9))

    def test_floquet_unitary(self):
        U = rotor_floquet_operator(9.5, 0.25, 64)
        assert np.max(np.abs(U.conj().T @ U - np.eye(129))) < 1e-9


def test_thermal_cutoff():
    N = thermal_cutoff(10.0)
    n = np.arange(-40, 41)
    w = np.exp(-5.0 * n * n)
    w /= w.sum()
    assert w[np.abs(n) > N].sum() < 1e-12
    assert w[np.abs(n) > N - 1].sum() >= 1e-12


class TestRun:
    def test_k_zero(self):
        run = rotor_run(RotorParams(k=0.0, n_kicks=20))
        for d in run:
            assert abs(d.avg_work) < 1e-12 and d.coherence == 0 and d.s_irr == 0 and d.ratio == 0

    def test_cold_first_kick(self):
        # only n = 0 occupied: energy after one kick is sum n^2 J_n^2 / 2 = k^2 / 4
        run = rotor_run(RotorParams(k=1.0, beta=200.0, n_kicks=1))
        assert abs(run[1].energy - 0.25) < 1e-12
        run = rotor_run(RotorParams(k=6.0, beta=200.0, n_kicks=1))
        assert abs(run[1].energy - 9.0) < 1e-10

    def test_bessel_sum_energy_thermal(self):
        # a kick adds k^2 / 4 to the mean energy of any momentum-diagonal state
        run = rotor_run(RotorParams(k=2.0, beta=0.5, n_kicks=1))
        assert abs(run[1].avg_work - 1.0) < 1e-10

    def test_invariants(self):
        run = rotor_run(RotorParams(k=5.0, beta=5.0, n_kicks=300))
        r = run.column("ratio")
        assert np.all((r >= 0) & (r <= 1))
        assert np.all(run.column("avg_work") >= -1e-10)
        assert np.all(run.column("boundary_weight") < 1e-8)
        assert not run.truncation_warning
        np.testing.assert_allclose(run.column("s_irr"), 5.0 * run.column("avg_work"), rtol=1e-12, atol=1e-12)

    @pytest.mark.parametrize("method", ["angle", "dense"])
    def test_kick_methods_agree(self, method):
        p = RotorParams(k=4.0, beta=2.0, n_kicks=50, n_cutoff=64)
        a = rotor_run(p, "toeplitz")
        b = rotor_run(p, method)
        np.testing.assert_allclose(a.column("energy"), b.column("energy"), rtol=1e-10)
        np.testing.assert_allclose(a.column("coherence"), b.column("coherence"), atol=1e-10)

    def test_truncation_warning_and_error(self):
        p = RotorParams(k=3.0, beta=1.0, n_kicks=400, n_cutoff=bessel_bandwidth(3.0) + 2)
        with pytest.warns(TruncationWarning):
            run = rotor_run(p)
        assert run.truncation_warning
        with pytest.raises(TruncationError):
            rotor_run(p, on_truncation="raise")

    def test_auto_cutoff_grows(self):
        run = rotor_run(RotorParams(k=6.0, beta=1.0, n_kicks=400))
        assert run.n_cutoff > 20 and not run.truncation_warning

    def test_bad_method(self):
        with pytest.raises(ParameterError):
            rotor_run(RotorParams(n_kicks=2), "fft")

    def test_fixed_n_convergence(self):
        p = RotorParams(k=5.0, beta=5.0, n_kicks=200)
        a = rotor_run(p)
        b = rotor_run(RotorParams(k=5.0, beta=5.0, n_kicks=200, n_cutoff=4 * a.n_cutoff))
        assert abs(a[-1].energy - b[-1].energy) < 1e-6 * a[-1].energy


class TestSaturation:
    class D:
        def __init__(self, i, v):
            self.kick_index = i
            self.coherence = self.ratio = self.avg_work = v
            self.mean_momentum = 0.0
            self.mean_momentum_sq = 4.0

    def test_constant_series(self):
        s = saturation_statistics([self.D(i, 2.5) for i in range(400)], 100)
        assert s.mean_C == 2.5 and s.std_C == 0 and s.xi_p == 2.0 and s.n_points == 300

    def test_k_zero_run(self):
        run = rotor_run(RotorParams(k=0.0, n_kicks=200))
        s = saturation_statistics(run, 50)
        assert s.mean_C == s.mean_ratio == 0 and abs(s.mean_work) < 1e-12

    def test_window_too_short(self):
        with pytest.raises(ParameterError):
            saturation_statistics([self.D(i, 1.0) for i in range(150)], 100)
        with pytest.raises(ParameterError):
            saturation_statistics([self.D(i, 1.0) for i in range(150)], 10, 500)


def test_rotor_distribution_matches_run():
    p = RotorParams(k=5.0, beta=4.0, n_kicks=100)
    run = rotor_run(p)
    e = exact_expectations(rotor_distribution(p, run.n_cutoff))
    assert abs(e.mean_s - run[-1].s_irr) < 1e-10 * max(1.0, run[-1].s_irr)
    assert abs(e.mean_c - run[-1].coherence) < 1e-10
    for v in (e.exp_neg_s, e.exp_neg_p, e.exp_neg_c):
        assert abs(v - 1) < 1e-10
