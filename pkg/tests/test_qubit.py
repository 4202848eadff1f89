import numpy as np
import pytest

from cohthermo.errors import ParameterError
from cohthermo.models.qubit import (
    QubitProtocolParams,
    cyclic_qubit_protocol,
    qubit_final_report,
    qubit_initial_state,
    qubit_long_time_limit,
    qubit_protocol,
    qubit_trajectory,
)

from conftest import SX, SY


def test_endpoints():
    p = qubit_protocol(QubitProtocolParams(omega_i=1.3, omega_f=2.6, tau=4.0))
    np.testing.assert_allclose(p.initial, 1.3 * SX, atol=1e-15)
    np.testing.assert_allclose(p.final, 2.6 * SY, atol=1e-15)


def test_spectrum():
    params = QubitProtocolParams(tau=2.0)
    p = qubit_protocol(params)
    for t in np.linspace(0, 2.0, 7):
        w = np.linalg.eigvalsh(p.hamiltonian_at(t))
        om = 1.0 + t / 2.0
        np.testing.assert_allclose(w, [-om, om], atol=1e-14)
    mid = np.linalg.eigvalsh(p.hamiltonian_at(1.0))
    assert abs(mid[1] - mid[0] - 2 * 1.5) < 1e-14


def test_params_validated():
    with pytest.raises(ParameterError):
        QubitProtocolParams(tau=0.0)
    with pytest.raises(ParameterError):
        QubitProtocolParams(beta_i=-1.0)


def test_cyclic_returns():
    p = cyclic_qubit_protocol(QubitProtocolParams(omega_f=3.0, tau=1.5))
    assert np.array_equal(p.final, p.initial)
    peak = p.hamiltonian_at(0.75)
    np.testing.assert_allclose(np.linalg.eigvalsh(peak), [-3, 3], atol=1e-14)


def test_initial_state_thermal():
    rho = qubit_initial_state(QubitProtocolParams(beta_i=1.0))
    w = np.linalg.eigvalsh(rho)
    np.testing.assert_allclose(w, np.array([1, np.e**2]) / (1 + np.e**2), atol=1e-14)


def test_trajectory():
    traj = qubit_trajectory(QubitProtocolParams(tau=2.0), 4)
    assert len(traj) == 5
    assert traj[0].s_irr == 0
    assert traj[-1].non_adiabaticity is not None and traj[1].non_adiabaticity is None


def test_fig1_morphology():
    taus = [0.5, 2.0, 8.0, 32.0]
    reps = [qubit_final_report(QubitProtocolParams(tau=t)) for t in taus]
    C = [r.coherence for r in reps]
    assert C[-1] < 0.1 * C[0]
    assert C[2] < C[0] and C[3] < C[1]
    lim = qubit_long_time_limit(QubitProtocolParams())
    assert lim > 0
    assert abs(reps[-1].s_irr - lim) < 0.05 * lim
