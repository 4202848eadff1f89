"""The two concrete systems: a driven qubit and the quantum kicked rotor."""
from .qubit import (
    QubitProtocolParams,
    cyclic_qubit_protocol,
    qubit_final_report,
    qubit_initial_state,
    qubit_long_time_limit,
    qubit_protocol,
    qubit_trajectory,
)
from .rotor import (
    RotorDiagnostics,
    RotorParams,
    RotorRun,
    SaturationStats,
    apply_kick_angle,
    rotor_distribution,
    rotor_floquet_operator,
    rotor_free_operator,
    rotor_kick_operator,
    rotor_kick_operator_angle,
    rotor_propagator,
    rotor_run,
    saturation_statistics,
)
