import numpy as np
import pytest

from cohthermo.dynamics import DrivingProtocol, constant_protocol, propagate, transition_matrix
from cohthermo.ensembles import random_hermitian, random_protocol
from cohthermo.errors import PreconditionError
from cohthermo.linalg import (
    coherence,
    diagonal_entropy,
    free_energy,
    populations,
    relative_entropy,
    spectral_decompose,
    thermal_state,
)
from cohthermo.models.qubit import (
    QubitProtocolParams,
    qubit_final_report,
    qubit_initial_state,
    qubit_protocol,
)
from cohthermo.thermo import (
    ThermoReport,
    average_work,
    average_work_from_populations,
    check_thermal,
    irreversible_report,
    non_adiabaticity_report,
    population_divergence,
    report_from_state,
    report_trajectory,
)

from conftest import SX, SZ


def _assert_invariants(r: ThermoReport, beta):
    assert abs(r.s_irr - beta * r.w_irr) < 1e-10
    assert abs(r.s_irr - r.coherence - r.pop_mismatch_B) < 1e-10
    assert abs(r.s_irr_work - r.s_irr_relent) < 1e-9
    for v in (r.s_irr, r.coherence, r.pop_mismatch_B):
        assert v >= 0
    if r.non_adiabaticity is not None:
        assert abs(r.non_adiabaticity - r.coherence - r.pop_mismatch_A) < 1e-10
        assert r.non_adiabaticity >= 0 and r.pop_mismatch_A >= 0


def test_work_no_evolution(rng):
    H = random_hermitian(3, rng)
    rho = thermal_state(H, 1.0)
    assert average_work(rho, H, rho, H) == pytest.approx(0, abs=1e-15)


def test_work_sudden_quench(rng):
    Hi, Hf = random_hermitian(4, rng), random_hermitian(4, rng)
    rho = thermal_state(Hi, 0.5)
    assert abs(average_work(rho, Hi, rho, Hf) - np.trace((Hf - Hi) @ rho).real) < 1e-14


def test_work_population_form():
    params = QubitProtocolParams(tau=1.0, beta_i=2.0)
    p, rho0 = qubit_protocol(params), qubit_initial_state(params)
    U = propagate(p, 0.0, 1.0)
    rho_t = U @ rho0 @ U.conj().T
    sdi, sdf = spectral_decompose(p.initial), spectral_decompose(p.final)
    P = transition_matrix(U, sdi, sdf)
    r0 = populations(rho0, sdi)
    ref = float((r0 @ P) @ sdf.eigenvalues - r0 @ sdi.eigenvalues)
    assert abs(average_work(rho0, p.initial, rho_t, p.final) - ref) < 1e-10
    assert abs(average_work_from_populations(rho0, sdi, rho_t, sdf) - ref) < 1e-10


def test_population_divergence():
    assert population_divergence([0.5, 0.5], [0.5, 0.5]) == 0.0
    assert population_divergence([0.5, 0.5], [1.0, 0.0]) == np.inf
    assert abs(population_divergence([1.0, 0.0], [0.5, 0.5]) - np.log(2)) < 1e-15


def test_check_thermal():
    check_thermal(thermal_state(SZ, 1.0), SZ, 1.0)
    with pytest.raises(PreconditionError):
        check_thermal(thermal_state(SZ, 1.0), SZ, 2.0)


def test_t_zero_all_zero(rng):
    p = random_protocol(3, rng)
    rho0 = thermal_state(p.initial, 1.4)
    r = irreversible_report(rho0, p, 1.4, 0.0)
    for name in ("avg_work", "delta_F", "w_irr", "s_irr", "coherence", "pop_mismatch_B"):
        assert abs(getattr(r, name)) < 1e-12


def test_non_thermal_rejected(rng):
    p = random_protocol(2, rng)
    with pytest.raises(PreconditionError):
        irreversible_report(np.eye(2) / 2, p, 1.0, p.duration)


@pytest.mark.parametrize("d", [2, 5, 9, 16])
def test_random_protocol_identities(rng, d):
    for _ in range(3):
        beta = float(rng.uniform(0.1, 5.0))
        p = random_protocol(d, rng)
        rho0 = thermal_state(p.initial, beta)
        for r in report_trajectory(rho0, p, beta, 3, 128):
            _assert_invariants(r, beta)


def test_intermediate_free_energy(rng):
    p = random_protocol(3, rng)
    rho0 = thermal_state(p.initial, 0.9)
    t = 0.4 * p.duration
    r = irreversible_report(rho0, p, 0.9, t, steps=256)
    assert abs(r.delta_F - (free_energy(p.hamiltonian_at(t), 0.9) - free_energy(p.initial, 0.9))) < 1e-12


def test_diagonal_entropy_production(rng):
    p = random_protocol(5, rng)
    beta = 1.3
    rho0 = thermal_state(p.initial, beta)
    U = propagate(p, 0.0, p.duration, 256)
    rho = U @ rho0 @ U.conj().T
    sdi, sdf = spectral_decompose(p.initial), spectral_decompose(p.final)
    r = report_from_state(rho0, rho, p.initial, p.final, beta, p.duration)
    assert abs(r.coherence - (diagonal_entropy(rho, sdf) - diagonal_entropy(rho0, sdi))) < 1e-10


def test_constant_protocol_report(rng):
    H = random_hermitian(4, rng)
    rho0 = thermal_state(H, 2.0)
    r = non_adiabaticity_report(rho0, constant_protocol(H, 1.0), 2.0)
    for name in ("avg_work", "s_irr", "coherence", "pop_mismatch_B", "non_adiabaticity", "pop_mismatch_A"):
        assert abs(getattr(r, name)) < 1e-10


def test_cyclic_equalities():
    r = qubit_final_report(QubitProtocolParams(omega_f=3.0, tau=2.5), cyclic=True)
    assert abs(r.non_adiabaticity - r.s_irr) < 1e-10
    assert abs(r.delta_F) < 1e-14


def test_sudden_limit():
    params = QubitProtocolParams(tau=1e-3)
    r = qubit_final_report(params)
    p = qubit_protocol(params)
    rho0 = qubit_initial_state(params)
    sdf = spectral_decompose(p.final)
    from cohthermo.dynamics import adiabatic_state

    ref = relative_entropy(rho0, adiabatic_state(rho0, p.initial, p.final))
    assert r.non_adiabaticity > 0.1
    assert abs(r.non_adiabaticity - ref) < 1e-3
    assert abs(r.coherence - coherence(rho0, sdf)) < 1e-3


def test_adiabatic_limit():
    assert qubit_final_report(QubitProtocolParams(tau=200.0)).non_adiabaticity < 1e-4


def test_crossing_flag_in_report():
    H0 = SZ + 0.0 * SX
    p = DrivingProtocol(2.0, lambda t: (1.0 - t) * H0, batch=lambda ts: (1.0 - np.asarray(ts))[:, None, None] * H0)
    rho0 = thermal_state(H0, 1.0)
    with pytest.warns(Warning):
        r = non_adiabaticity_report(rho0, p, 1.0, steps=64)
    assert r.crossing_warning


def test_report_fields():
    names = ThermoReport.field_names()
    assert names[:7] == ["t", "avg_work", "delta_F", "w_irr", "s_irr", "coherence", "pop_mismatch_B"]
    r = qubit_final_report(QubitProtocolParams())
    assert set(r.as_dict()) == set(names)
