"""Dense Hermitian linear algebra, thermal states, entropies and coherence.

States and observables are plain complex ``numpy`` arrays; the ``check_*``
helpers validate them against :mod:`cohthermo.config` tolerances and
return a contiguous ``complex128`` copy.  A basis is any unitary matrix
whose columns are the basis vectors; a :class:`SpectralDecomposition` can
be passed wherever a basis is expected.

Units: hbar = k_B = 1, entropies in nats.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import logsumexp

from .config import DEFAULT_TOL, Tolerances
from .errors import (
    InvalidObservableError,
    InvalidStateError,
    InvariantError,
    ParameterError,
    ShapeError,
)

__all__ = [
    "SpectralDecomposition",
    "check_observable",
    "check_density_matrix",
    "check_basis",
    "as_basis",
    "spectral_decompose",
    "thermal_state",
    "thermal_decomposition",
    "thermal_populations",
    "log_thermal_populations",
    "free_energy",
    "von_neumann_entropy",
    "shannon_entropy",
    "relative_entropy",
    "populations",
    "dephase",
    "coherence",
    "diagonal_entropy",
    "trace_distance",
    "clamp_nonnegative",
]


def _square(a, what: str) -> np.ndarray:
    m = np.array(a, dtype=np.complex128, copy=True)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise ShapeError(f"{what} must be a non-empty square matrix, got shape {m.shape}")
    return m


def check_observable(H, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Return ``H`` as a complex array after checking it is Hermitian."""
    m = _square(H, "observable")
    dev = np.max(np.abs(m - m.conj().T))
    if dev > tol.herm:
        raise InvalidObservableError(f"observable not Hermitian: max|H - H^+| = {dev:.3e}")
    return m


def check_density_matrix(rho, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Return ``rho`` as a complex array after checking the state invariants.

    Hermitian within ``tol.herm``, unit trace within ``tol.trace`` and no
    eigenvalue below ``tol.psd``.
    """
    m = _square(rho, "density matrix")
    dev = np.max(np.abs(m - m.conj().T))
    if dev > tol.herm:
        raise InvalidStateError(f"state not Hermitian: max|rho - rho^+| = {dev:.3e}")
    tr = np.trace(m).real
    if abs(tr - 1.0) > tol.trace:
        raise InvalidStateError(f"state trace is {tr!r}, expected 1")
    lo = np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0]
    if lo < tol.psd:
        raise InvalidStateError(f"state has negative eigenvalue {lo:.3e}")
    return m


def check_basis(B, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    m = _square(B, "basis")
    dev = np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0])))
    if dev > tol.basis:
        raise ShapeError(f"basis is not orthonormal (residual {dev:.3e})")
    return m


@dataclass(frozen=True)
class SpectralDecomposition:
    """Ascending eigenvalues and the matching eigenvector columns.

    In each column the entry of largest modulus is real and non-negative,
    which makes the output a deterministic function of the input.  States
    whose spectrum is known in closed form (Gibbs states) may also carry
    exact ``log_eigenvalues``, which relative entropies then use instead of
    ``log(eigenvalues)``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    log_eigenvalues: Optional[np.ndarray] = field(default=None, compare=False)

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def basis(self) -> np.ndarray:
        return self.eigenvectors

    def reconstruct(self) -> np.ndarray:
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.conj().T

    def function(self, f) -> np.ndarray:
        """Apply a scalar function to the spectrum: ``V f(lambda) V^+``."""
        V = self.eigenvectors
        return (V * f(self.eigenvalues)) @ V.conj().T


def as_basis(basis) -> np.ndarray:
    if isinstance(basis, SpectralDecomposition):
        return basis.eigenvectors
    return np.asarray(basis, dtype=np.complex128)


def _fix_phases(V: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(V), axis=0)
    pivot = V[idx, np.arange(V.shape[1])]
    return V * (np.abs(pivot) / pivot)


def spectral_decompose(H, tol: Tolerances = DEFAULT_TOL) -> SpectralDecomposition:
    m = check_observable(H, tol)
    w, V = np.linalg.eigh(0.5 * (m + m.conj().T))
    V = _fix_phases(V)
    w.setflags(write=False)
    V.setflags(write=False)
    return SpectralDecomposition(w, V)


def _decomp(H, tol: Tolerances) -> SpectralDecomposition:
    if isinstance(H, SpectralDecomposition):
        return H
    return spectral_decompose(H, tol)


def _check_beta(beta, allow_zero: bool) -> float:
    b = float(beta)
    if not np.isfinite(b) or b < 0 or (b == 0 and not allow_zero):
        cond = ">= 0" if allow_zero else "> 0"
        raise ParameterError(f"inverse temperature must be finite and {cond}, got {beta!r}")
    return b


def thermal_populations(energies, beta: float) -> np.ndarray:
    """Gibbs weights ``exp(-beta e) / Z`` of a list of energies."""
    e = np.asarray(energies, dtype=float)
    b = _check_beta(beta, allow_zero=True)
    logw = -b * (e - e.min())
    return np.exp(logw - logsumexp(logw))


def log_thermal_populations(energies, beta: float) -> np.ndarray:
    """Logarithms of :func:`thermal_populations`, free of underflow."""
    e = np.asarray(energies, dtype=float)
    b = _check_beta(beta, allow_zero=True)
    logw = -b * (e - e.min())
    return logw - logsumexp(logw)


def thermal_decomposition(H, beta: float, tol: Tolerances = DEFAULT_TOL) -> SpectralDecomposition:
    """Gibbs state in spectral form: Gibbs weights on the eigenvectors of ``H``."""
    sd = _decomp(H, tol)
    return SpectralDecomposition(
        thermal_populations(sd.eigenvalues, beta),
        sd.eigenvectors,
        log_thermal_populations(sd.eigenvalues, beta),
    )


def thermal_state(H, beta: float, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Gibbs state ``exp(-beta H) / Z``; ``beta = 0`` gives ``I/d``."""
    b = _check_beta(beta, allow_zero=True)
    sd = _decomp(H, tol)
    if b == 0.0:
        return np.eye(sd.dim, dtype=np.complex128) / sd.dim
    p = thermal_populations(sd.eigenvalues, b)
    rho = (sd.eigenvectors * p) @ sd.eigenvectors.conj().T
    return 0.5 * (rho + rho.conj().T)


def free_energy(H, beta: float, tol: Tolerances = DEFAULT_TOL) -> float:
    """``F = -ln Z / beta`` evaluated with a max-shifted log-sum-exp."""
    b = _check_beta(beta, allow_zero=False)
    e = _decomp(H, tol).eigenvalues
    return float(-logsumexp(-b * e) / b)


def shannon_entropy(p, tol: Tolerances = DEFAULT_TOL) -> float:
    p = np.asarray(p, dtype=float)
    p = p[p > tol.eig_floor]
    return float(-np.sum(p * np.log(p)))


def von_neumann_entropy(rho, tol: Tolerances = DEFAULT_TOL) -> float:
    m = np.asarray(rho, dtype=np.complex128)
    return shannon_entropy(np.linalg.eigvalsh(0.5 * (m + m.conj().T)), tol)


def clamp_nonnegative(x: float, what: str = "value", tol: Tolerances = DEFAULT_TOL) -> float:
    """Map rounding noise in ``[-tol.clamp, 0)`` to 0 and reject anything lower."""
    if x < 0:
        if x < -tol.clamp:
            raise InvariantError(f"{what} = {x:.3e} is negative beyond tolerance")
        return 0.0
    return float(x)


def relative_entropy(rho, sigma, tol: Tolerances = DEFAULT_TOL) -> float:
    """Quantum relative entropy ``D(rho||sigma)`` in nats.

    Returns ``inf`` when ``rho`` puts more than ``tol.support`` weight on
    eigenvectors of ``sigma`` whose eigenvalue is below ``tol.eig_floor``.
    ``sigma`` may be given in spectral form; this avoids the loss of
    relative precision that diagonalising a state with tiny eigenvalues
    incurs, and is how the thermal and adiabatic references are passed.
    If it carries exact ``log_eigenvalues`` only eigenvalues that are
    exactly zero count as null, so deep Gibbs tails stay finite.
    """
    a = np.asarray(rho, dtype=np.complex128)
    log_q = None
    if isinstance(sigma, SpectralDecomposition):
        q, B = sigma.eigenvalues, sigma.eigenvectors
        log_q = sigma.log_eigenvalues
    else:
        s = np.asarray(sigma, dtype=np.complex128)
        if s.shape != a.shape:
            raise ShapeError(f"shape mismatch: {a.shape} vs {s.shape}")
        q, B = np.linalg.eigh(0.5 * (s + s.conj().T))
    if a.ndim != 2 or a.shape != B.shape:
        raise ShapeError(f"shape mismatch: {a.shape} vs {B.shape}")
    p = np.linalg.eigvalsh(0.5 * (a + a.conj().T))
    # weight of rho on each eigenvector of sigma, taken straight from the
    # matrix so tiny weights keep their relative precision
    w = np.einsum("ij,ik,kj->j", B.conj(), a, B).real
    if log_q is None:
        null = q < tol.eig_floor
        log_q = np.log(np.where(null, 1.0, q))
    else:
        null = ~np.isfinite(log_q)
    if np.any(w[null] > tol.support):
        return float("inf")
    keep = p > tol.eig_floor
    d = np.sum(p[keep] * np.log(p[keep])) - np.sum(w[~null] * log_q[~null])
    return clamp_nonnegative(float(d), "relative entropy", tol)


def populations(rho, basis) -> np.ndarray:
    """Diagonal of ``rho`` in the given basis, as real probabilities."""
    B = as_basis(basis)
    r = np.asarray(rho, dtype=np.complex128)
    if r.shape != B.shape:
        raise ShapeError(f"state {r.shape} and basis {B.shape} differ in dimension")
    return np.einsum("in,ij,jn->n", B.conj(), r, B).real


def dephase(rho, basis) -> np.ndarray:
    """Remove every coherence of ``rho`` in ``basis``, keeping the populations."""
    B = as_basis(basis)
    p = populations(rho, B)
    out = (B * p) @ B.conj().T
    return 0.5 * (out + out.conj().T)


def diagonal_entropy(rho, basis, tol: Tolerances = DEFAULT_TOL) -> float:
    return shannon_entropy(populations(rho, basis), tol)


def coherence(rho, basis, tol: Tolerances = DEFAULT_TOL) -> float:
    """Relative entropy of coherence ``S(dephase(rho)) - S(rho)``."""
    c = diagonal_entropy(rho, basis, tol) - von_neumann_entropy(rho, tol)
    return clamp_nonnegative(c, "coherence", tol)


def trace_distance(rho, sigma) -> float:
    """Trace norm ``||rho - sigma||_1`` (no factor 1/2)."""
    d = np.asarray(rho) - np.asarray(sigma)
    return float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (d + d.conj().T)))))
