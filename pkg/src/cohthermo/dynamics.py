"""Driving protocols, midpoint propagators, transition matrices and the
adiabatic reference state."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import (
    InvariantError,
    LevelCrossingWarning,
    ParameterError,
    PreconditionError,
    ShapeError,
)
from .linalg import SpectralDecomposition, as_basis, check_observable, spectral_decompose

__all__ = [
    "DrivingProtocol",
    "constant_protocol",
    "propagate",
    "propagate_fixed",
    "nearest_unitary",
    "evolve_state",
    "transition_matrix",
    "adiabatic_state",
    "adiabatic_decomposition",
    "find_level_crossings",
]

_CHUNK = 4096


@dataclass(frozen=True)
class DrivingProtocol:
    """A schedule ``t -> H(t)`` on ``[0, duration]``.

    ``batch`` may supply a vectorised version of ``hamiltonian_at`` that
    maps an array of times to a stacked ``(n, d, d)`` array; it must agree
    with ``hamiltonian_at`` pointwise.
    """

    duration: float
    hamiltonian_at: Callable[[float], np.ndarray]
    label: str = ""
    batch: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, repr=False)

    def __post_init__(self):
        if not (np.isfinite(self.duration) and self.duration > 0):
            raise ParameterError(f"protocol duration must be > 0, got {self.duration!r}")

    @property
    def dim(self) -> int:
        return np.shape(self.hamiltonian_at(0.0))[0]

    def hamiltonians(self, ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        if self.batch is not None:
            return np.asarray(self.batch(ts), dtype=np.complex128)
        return np.array([self.hamiltonian_at(t) for t in ts], dtype=np.complex128)

    @property
    def initial(self) -> np.ndarray:
        return check_observable(self.hamiltonian_at(0.0))

    @property
    def final(self) -> np.ndarray:
        return check_observable(self.hamiltonian_at(self.duration))


def constant_protocol(H, duration: float, label: str = "constant") -> DrivingProtocol:
    H = check_observable(H)
    H.setflags(write=False)
    return DrivingProtocol(
        duration,
        lambda t: H,
        label,
        batch=lambda ts: np.broadcast_to(H, (len(ts),) + H.shape),
    )


def _step_exponentials(Hs: np.ndarray, dt: float) -> np.ndarray:
    Hs = 0.5 * (Hs + np.conj(np.swapaxes(Hs, -1, -2)))
    w, V = np.linalg.eigh(Hs)
    return (V * np.exp(-1j * dt * w)[:, None, :]) @ np.conj(np.swapaxes(V, -1, -2))


def _ordered_product(F: np.ndarray) -> np.ndarray:
    """``F[n-1] @ ... @ F[1] @ F[0]`` by pairwise reduction."""
    while F.shape[0] > 1:
        if F.shape[0] % 2:
            F = np.concatenate([F, np.eye(F.shape[1], dtype=F.dtype)[None]], axis=0)
        F = F[1::2] @ F[0::2]
    return F[0]


def nearest_unitary(U: np.ndarray) -> np.ndarray:
    W, _, Vh = np.linalg.svd(U)
    return W @ Vh


def propagate_fixed(protocol: DrivingProtocol, t0: float, t1: float, steps: int) -> np.ndarray:
    """Midpoint product ``prod_j exp(-i H(t_j + dt/2) dt)`` with a fixed step count.

    Rounding in long products drifts off the unitary group (about 1e-11
    after 2^16 steps); the result is replaced by its polar factor, which
    moves it by the same amount and restores unitarity to machine precision.
    """
    dt = (t1 - t0) / steps
    d = protocol.dim
    U = np.eye(d, dtype=np.complex128)
    for start in range(0, steps, _CHUNK):
        j = np.arange(start, min(start + _CHUNK, steps))
        F = _step_exponentials(protocol.hamiltonians(t0 + (j + 0.5) * dt), dt)
        U = _ordered_product(F) @ U
    return nearest_unitary(U) if steps > 1 else U


def propagate(
    protocol: DrivingProtocol,
    t0: float,
    t1: float,
    steps: Optional[int] = None,
    tol: Tolerances = DEFAULT_TOL,
) -> np.ndarray:
    """Unitary propagator from ``t0`` to ``t1``.

    With ``steps=None`` the step count is doubled, starting from 8, until
    successive propagators agree to ``tol.step_doubling`` (max elementwise)
    or ``tol.max_substeps`` is reached, in which case the finest result is
    returned with a ``RuntimeWarning``.
    """
    if not (0.0 <= t0 <= t1 <= protocol.duration * (1 + 1e-12)):
        raise ParameterError(f"invalid interval [{t0}, {t1}] for duration {protocol.duration}")
    if t1 == t0:
        return np.eye(protocol.dim, dtype=np.complex128)
    if steps is not None:
        if steps < 1:
            raise ParameterError("steps must be >= 1")
        return propagate_fixed(protocol, t0, t1, int(steps))
    n = 8
    U = propagate_fixed(protocol, t0, t1, n)
    while True:
        n *= 2
        U2 = propagate_fixed(protocol, t0, t1, n)
        err = np.max(np.abs(U2 - U))
        U = U2
        if err < tol.step_doubling:
            return U
        if 2 * n > tol.max_substeps:
            warnings.warn(
                f"step doubling stopped at {n} substeps with residual {err:.2e}",
                RuntimeWarning,
                stacklevel=2,
            )
            return U


def evolve_state(
    rho0,
    protocol: DrivingProtocol,
    samples: int,
    steps_per_sample: Optional[int] = None,
    tol: Tolerances = DEFAULT_TOL,
):
    """Sample ``rho_t = U(t,0) rho0 U(t,0)^+`` at ``samples + 1`` uniform times.

    Returns a list of ``(t, rho_t, H(t))`` including ``t = 0`` and
    ``t = duration``.
    """
    rho = np.array(rho0, dtype=np.complex128)
    if rho.shape != (protocol.dim, protocol.dim):
        raise ShapeError(f"state shape {rho.shape} does not match protocol dim {protocol.dim}")
    if samples < 1:
        raise ParameterError("samples must be >= 1")
    ts = np.linspace(0.0, protocol.duration, samples + 1)
    out = [(0.0, rho, protocol.hamiltonian_at(0.0))]
    for a, b in zip(ts[:-1], ts[1:]):
        U = propagate(protocol, a, b, steps_per_sample, tol)
        rho = U @ rho @ U.conj().T
        rho = 0.5 * (rho + rho.conj().T)
        out.append((float(b), rho, protocol.hamiltonian_at(b)))
    return out


def transition_matrix(U, basis_i, basis_f, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """``P[m, n] = |<n_f| U |m_i>|^2``; rows are initial levels."""
    U = np.asarray(U, dtype=np.complex128)
    Bi, Bf = as_basis(basis_i), as_basis(basis_f)
    if not (U.shape == Bi.shape == Bf.shape):
        raise ShapeError(f"shape mismatch: U {U.shape}, bases {Bi.shape}, {Bf.shape}")
    A = Bf.conj().T @ U @ Bi  # A[n, m] = <n_f|U|m_i>
    P = np.abs(A.T) ** 2
    dev = max(np.max(np.abs(P.sum(axis=0) - 1)), np.max(np.abs(P.sum(axis=1) - 1)))
    if dev > tol.stochastic:
        raise InvariantError(f"transition matrix not doubly stochastic (residual {dev:.2e})")
    return P


def find_level_crossings(protocol: DrivingProtocol, samples: int = 257, tol: Tolerances = DEFAULT_TOL):
    """Adjacent level pairs whose gap closes somewhere but is open at ``t = 0``.

    Degeneracies present for the whole protocol are not crossings.
    Returns a list of ``(t, n)`` with ``n`` the lower level index.
    """
    ts = np.linspace(0.0, protocol.duration, samples)
    Hs = protocol.hamiltonians(ts)
    w = np.linalg.eigvalsh(0.5 * (Hs + np.conj(np.swapaxes(Hs, -1, -2))))
    gaps = np.diff(w, axis=1)
    closed = gaps < tol.crossing_gap
    hits = closed & ~closed[0][None, :]
    return [(float(ts[i]), int(n)) for i, n in zip(*np.nonzero(hits))]


def adiabatic_state(
    rho0,
    H_i,
    H_f,
    protocol: Optional[DrivingProtocol] = None,
    tol: Tolerances = DEFAULT_TOL,
) -> np.ndarray:
    """Transition-less image of ``rho0``: the n-th initial population moved
    onto the n-th final eigenvector (both ascending).

    When ``protocol`` is given it is scanned for level crossings and a
    :class:`LevelCrossingWarning` is emitted if any is found.
    """
    sd = adiabatic_decomposition(rho0, H_i, H_f, protocol, tol)
    rho_A = sd.reconstruct()
    return 0.5 * (rho_A + rho_A.conj().T)


def adiabatic_decomposition(
    rho0,
    H_i,
    H_f,
    protocol: Optional[DrivingProtocol] = None,
    tol: Tolerances = DEFAULT_TOL,
) -> SpectralDecomposition:
    """:func:`adiabatic_state` in spectral form (populations, final eigenvectors)."""
    sdi, sdf = spectral_decompose(H_i, tol), spectral_decompose(H_f, tol)
    rho0 = np.asarray(rho0, dtype=np.complex128)
    if rho0.shape != (sdi.dim, sdi.dim) or sdf.dim != sdi.dim:
        raise ShapeError("dimension mismatch between state and Hamiltonians")
    R = sdi.eigenvectors.conj().T @ rho0 @ sdi.eigenvectors
    off = np.max(np.abs(R - np.diag(np.diag(R))))
    if off > tol.diagonal:
        raise PreconditionError(f"initial state not diagonal in the H_i eigenbasis (off-diagonal {off:.2e})")
    p = np.diag(R).real
    if protocol is not None:
        crossings = find_level_crossings(protocol, tol=tol)
        if crossings:
            warnings.warn(
                f"level crossing near t = {crossings[0][0]:.6g} (levels {crossings[0][1]}, {crossings[0][1] + 1})",
                LevelCrossingWarning,
                stacklevel=2,
            )
    return SpectralDecomposition(p, sdf.eigenvectors)
