"""Numerical tolerances shared by every module.

All checks read from a :class:`Tolerances` record so that property tests
can tighten or loosen a single knob.  ``DEFAULT_TOL`` holds the values the
library uses unless a caller passes its own record.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class Tolerances:
    herm: float = 1e-12            # max |A - A^dagger| elementwise
    trace: float = 1e-12
    psd: float = -1e-10            # smallest eigenvalue allowed for a state
    eig_floor: float = 1e-14       # eigenvalues below contribute 0 ln 0 = 0
    support: float = 1e-12         # rho weight on sigma's null space => +inf
    unitary: float = 1e-9
    basis: float = 1e-10
    clamp: float = 1e-11           # entropy-like values in [-clamp, 0) -> 0
    diagonal: float = 1e-10        # off-diagonal allowed for "diagonal" states
    thermal: float = 1e-9          # rho0 vs Gibbs state
    stochastic: float = 1e-10      # row/column sums of transition matrices
    step_doubling: float = 1e-9    # ||U_N - U_2N||_max target
    max_substeps: int = 2**20
    crossing_gap: float = 1e-9
    fluctuation: float = 1e-10     # exhaustive <exp(-x)> vs 1
    transition_floor: float = 1e-24  # P[n, m] below this is a roundoff branch
    rotor_boundary: float = 1e-8
    rotor_trajectory_weight: float = 1e-14
    rotor_thermal_tail: float = 1e-12
    rotor_bessel_tail: float = 1e-14

    def as_dict(self) -> dict:
        return asdict(self)


DEFAULT_TOL = Tolerances()
