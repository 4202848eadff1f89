"""Work, irreversible entropy and its coherence/population split, and the
non-adiabaticity parameter."""
from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass, fields
from typing import Optional

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .dynamics import DrivingProtocol, adiabatic_decomposition, evolve_state, propagate
from .errors import InvariantError, LevelCrossingWarning, PreconditionError, ShapeError
from .linalg import (
    SpectralDecomposition,
    check_observable,
    clamp_nonnegative,
    coherence,
    free_energy,
    populations,
    relative_entropy,
    shannon_entropy,
    spectral_decompose,
    thermal_decomposition,
    thermal_state,
)

__all__ = [
    "ThermoReport",
    "average_work",
    "average_work_from_populations",
    "population_divergence",
    "check_thermal",
    "report_from_state",
    "irreversible_report",
    "non_adiabaticity_report",
    "report_trajectory",
]


@dataclass(frozen=True)
class ThermoReport:
    """Scalar functionals of the driven state at time ``t``.

    ``s_irr_work`` and ``s_irr_relent`` are the two independently computed
    values of the irreversible entropy, ``beta*(<w> - dF)`` and
    ``D(rho_t || rho_B)``; ``s_irr`` equals the first.  The adiabatic
    fields are only filled at the final time.
    """

    t: float
    avg_work: float
    delta_F: float
    w_irr: float
    s_irr: float
    coherence: float
    pop_mismatch_B: float
    non_adiabaticity: Optional[float] = None
    pop_mismatch_A: Optional[float] = None
    s_irr_work: float = 0.0
    s_irr_relent: float = 0.0
    crossing_warning: bool = False

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]


def average_work(rho0, H_i, rho_t, H_t) -> float:
    """``Tr{H_t rho_t} - Tr{H_i rho0}``."""
    arrs = [np.asarray(a) for a in (rho0, H_i, rho_t, H_t)]
    if len({a.shape for a in arrs}) != 1:
        raise ShapeError("average_work: all matrices must share one shape")
    r0, Hi, rt, Ht = arrs
    return float(np.trace(Ht @ rt).real - np.trace(Hi @ r0).real)


def average_work_from_populations(rho0, sd_i: SpectralDecomposition, rho_t, sd_t: SpectralDecomposition) -> float:
    """Same quantity written through eigen-populations, for cross-checks."""
    return float(
        populations(rho_t, sd_t) @ sd_t.eigenvalues - populations(rho0, sd_i) @ sd_i.eigenvalues
    )


def population_divergence(p, q, tol: Tolerances = DEFAULT_TOL, log_q=None) -> float:
    """Classical KL divergence ``sum p ln(p/q)``; ``inf`` on support mismatch.

    With exact ``log_q`` only zero entries of ``q`` are treated as null.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if log_q is None:
        null = q < tol.eig_floor
        log_q = np.log(np.where(null, 1.0, q))
    else:
        log_q = np.asarray(log_q, dtype=float)
        null = ~np.isfinite(log_q)
    if np.any(p[null] > tol.support):
        return float("inf")
    # every populated level enters the cross term: deep in a Gibbs tail
    # ln q is large enough that sub-floor populations still matter
    cross = float(np.sum(p[~null] * log_q[~null]))
    d = -shannon_entropy(p, tol) - cross
    return clamp_nonnegative(d, "population divergence", tol)


def check_thermal(rho0, H_i, beta_i: float, tol: Tolerances = DEFAULT_TOL) -> None:
    ref = thermal_state(H_i, beta_i, tol)
    dev = np.max(np.abs(np.asarray(rho0) - ref))
    if dev > tol.thermal:
        raise PreconditionError(
            f"initial state is not the Gibbs state of H(0) at beta={beta_i} (max dev {dev:.2e})"
        )


def report_from_state(
    rho0,
    rho_t,
    H_i,
    H_t,
    beta_i: float,
    t: float,
    rho_A=None,
    crossing_warning: bool = False,
    tol: Tolerances = DEFAULT_TOL,
) -> ThermoReport:
    """Assemble a :class:`ThermoReport` from an already evolved state.

    Both routes to the irreversible entropy are computed and must agree to
    ``tol.thermal``; the decomposition identities must hold to
    ``10 * tol.diagonal``.  Violations raise :class:`InvariantError`.
    """
    sd_i = spectral_decompose(H_i, tol)
    sd_t = spectral_decompose(H_t, tol)
    w = average_work(rho0, H_i, rho_t, H_t)
    dF = free_energy(sd_t, beta_i) - free_energy(sd_i, beta_i)
    s_work = beta_i * (w - dF)
    rho_B = thermal_decomposition(sd_t, beta_i, tol)
    s_rel = relative_entropy(rho_t, rho_B, tol)
    if abs(s_work - s_rel) > tol.thermal:
        raise InvariantError(
            f"t={t}: beta*(w - dF) = {s_work!r} but D(rho_t||rho_B) = {s_rel!r}"
        )
    s_irr = clamp_nonnegative(s_work, "S_irr", tol)
    c = coherence(rho_t, sd_t, tol)
    p_t = populations(rho_t, sd_t)
    pop_B = population_divergence(p_t, rho_B.eigenvalues, tol, rho_B.log_eigenvalues)
    if abs(s_irr - c - pop_B) > 10 * tol.diagonal:
        raise InvariantError(f"t={t}: S_irr - C - D_B = {s_irr - c - pop_B:.3e}")

    A = pop_A = None
    if rho_A is not None:
        if not isinstance(rho_A, SpectralDecomposition):
            rho_A = SpectralDecomposition(populations(rho_A, sd_t), sd_t.eigenvectors)
        A = relative_entropy(rho_t, rho_A, tol)
        pop_A = population_divergence(p_t, rho_A.eigenvalues, tol)
        if np.isfinite(A) and abs(A - c - pop_A) > 10 * tol.diagonal:
            raise InvariantError(f"t={t}: A - C - D_A = {A - c - pop_A:.3e}")
    return ThermoReport(
        t=float(t),
        avg_work=w,
        delta_F=dF,
        w_irr=w - dF,
        s_irr=s_irr,
        coherence=c,
        pop_mismatch_B=pop_B,
        non_adiabaticity=A,
        pop_mismatch_A=pop_A,
        s_irr_work=s_work,
        s_irr_relent=s_rel,
        crossing_warning=crossing_warning,
    )


def _adiabatic(rho0, protocol: DrivingProtocol, tol: Tolerances):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", LevelCrossingWarning)
        rho_A = adiabatic_decomposition(rho0, protocol.initial, protocol.final, protocol, tol)
    flagged = any(issubclass(w.category, LevelCrossingWarning) for w in caught)
    if flagged:
        warnings.warn("level crossing detected; adiabatic reference is ill-defined", LevelCrossingWarning, stacklevel=3)
    return rho_A, flagged


def irreversible_report(
    rho0,
    protocol: DrivingProtocol,
    beta_i: float,
    t: float,
    steps: Optional[int] = None,
    tol: Tolerances = DEFAULT_TOL,
) -> ThermoReport:
    """Irreversible entropy split at time ``t`` for a Gibbs-initialised drive."""
    H_i = protocol.initial
    check_thermal(rho0, H_i, beta_i, tol)
    U = propagate(protocol, 0.0, t, steps, tol)
    rho_t = U @ np.asarray(rho0) @ U.conj().T
    H_t = check_observable(protocol.hamiltonian_at(t), tol)
    return report_from_state(rho0, rho_t, H_i, H_t, beta_i, t, tol=tol)


def non_adiabaticity_report(
    rho0,
    protocol: DrivingProtocol,
    beta_i: float,
    steps: Optional[int] = None,
    tol: Tolerances = DEFAULT_TOL,
) -> ThermoReport:
    """Final-time report including ``A = D(rho_tau || rho_A)`` and its split."""
    H_i = protocol.initial
    check_thermal(rho0, H_i, beta_i, tol)
    rho_A, flagged = _adiabatic(rho0, protocol, tol)
    U = propagate(protocol, 0.0, protocol.duration, steps, tol)
    rho_t = U @ np.asarray(rho0) @ U.conj().T
    return report_from_state(
        rho0, rho_t, H_i, protocol.final, beta_i, protocol.duration, rho_A, flagged, tol
    )


def report_trajectory(
    rho0,
    protocol: DrivingProtocol,
    beta_i: float,
    samples: int,
    steps_per_sample: Optional[int] = None,
    tol: Tolerances = DEFAULT_TOL,
) -> list[ThermoReport]:
    """Reports at ``samples + 1`` uniform times; the last one carries ``A``."""
    H_i = protocol.initial
    check_thermal(rho0, H_i, beta_i, tol)
    rho_A, flagged = _adiabatic(rho0, protocol, tol)
    traj = evolve_state(rho0, protocol, samples, steps_per_sample, tol)
    out = []
    for k, (t, rho_t, H_t) in enumerate(traj):
        last = k == len(traj) - 1
        out.append(
            report_from_state(
                rho0, rho_t, H_i, H_t, beta_i, t,
                rho_A if last else None, flagged and last, tol,
            )
        )
    return out
