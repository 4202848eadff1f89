"""Driven qubit: a rotating transverse field with a linearly ramped strength.

``H(t) = omega(t) [sx cos phi(t) + sy sin phi(t)]`` with
``phi(t) = pi t / (2 tau)`` and ``omega(t) = omega_i (1 - t/tau) + omega_f t/tau``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..config import DEFAULT_TOL, Tolerances
from ..dynamics import DrivingProtocol, adiabatic_state
from ..errors import ParameterError
from ..linalg import relative_entropy, thermal_state
from ..thermo import ThermoReport, non_adiabaticity_report, report_trajectory

__all__ = [
    "QubitProtocolParams",
    "qubit_protocol",
    "cyclic_qubit_protocol",
    "qubit_initial_state",
    "qubit_final_report",
    "qubit_trajectory",
    "qubit_long_time_limit",
]


@dataclass(frozen=True)
class QubitProtocolParams:
    omega_i: float = 1.0
    omega_f: float = 2.0
    tau: float = 1.0
    beta_i: float = 1.0

    def __post_init__(self):
        for name in ("omega_i", "omega_f", "tau", "beta_i"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ParameterError(f"{name} must be positive and finite, got {v!r}")


def _field(omega: np.ndarray, phi: np.ndarray) -> np.ndarray:
    omega = np.asarray(omega, dtype=float)
    H = np.zeros(omega.shape + (2, 2), dtype=np.complex128)
    H[..., 0, 1] = omega * np.exp(-1j * phi)
    H[..., 1, 0] = omega * np.exp(1j * phi)
    return H


def qubit_protocol(params: QubitProtocolParams) -> DrivingProtocol:
    wi, wf, tau = params.omega_i, params.omega_f, params.tau

    def batch(ts):
        s = np.asarray(ts, dtype=float) / tau
        return _field(wi * (1 - s) + wf * s, 0.5 * np.pi * s)

    return DrivingProtocol(
        tau,
        lambda t: batch(np.float64(t)),
        f"qubit(omega_i={wi:g}, omega_f={wf:g}, tau={tau:g})",
        batch=batch,
    )


def cyclic_qubit_protocol(params: QubitProtocolParams) -> DrivingProtocol:
    """Closed-loop variant: strength and angle follow ``sin(pi t / tau)`` and
    return to their initial values, so ``H(tau) = H(0) = omega_i sx``.

    The peak strength is ``omega_f`` and the peak angle is ``pi / 2``.
    """
    wi, wf, tau = params.omega_i, params.omega_f, params.tau

    def batch(ts):
        bump = np.sin(np.pi * np.asarray(ts, dtype=float) / tau)
        return _field(wi + (wf - wi) * bump, 0.5 * np.pi * bump)

    def at(t):
        if t == tau:  # sin(pi) is 1.2e-16, not 0
            return batch(np.float64(0.0))
        return batch(np.float64(t))

    return DrivingProtocol(tau, at, f"cyclic-qubit(omega_i={wi:g}, omega_f={wf:g}, tau={tau:g})", batch=batch)


def qubit_initial_state(params: QubitProtocolParams) -> np.ndarray:
    return thermal_state(_field(params.omega_i, 0.0), params.beta_i)


def qubit_final_report(
    params: QubitProtocolParams,
    cyclic: bool = False,
    steps: Optional[int] = None,
    tol: Tolerances = DEFAULT_TOL,
) -> ThermoReport:
    proto = cyclic_qubit_protocol(params) if cyclic else qubit_protocol(params)
    return non_adiabaticity_report(qubit_initial_state(params), proto, params.beta_i, steps, tol)


def qubit_trajectory(
    params: QubitProtocolParams,
    samples: int,
    steps_per_sample: Optional[int] = None,
    tol: Tolerances = DEFAULT_TOL,
) -> list[ThermoReport]:
    return report_trajectory(qubit_initial_state(params), qubit_protocol(params), params.beta_i, samples, steps_per_sample, tol)


def qubit_long_time_limit(params: QubitProtocolParams) -> float:
    """``D(rho_A || rho_B)``: the irreversible entropy left when ``tau -> inf``."""
    proto = qubit_protocol(params)
    rho0 = qubit_initial_state(params)
    rho_A = adiabatic_state(rho0, proto.initial, proto.final)
    return relative_entropy(rho_A, thermal_state(proto.final, params.beta_i))
