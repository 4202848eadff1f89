"""Random matrices and random driving protocols for property checks."""
from __future__ import annotations

import numpy as np

from .dynamics import DrivingProtocol


def random_hermitian(d: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """GUE sample normalised so the spectrum has width of order ``scale``."""
    X = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return scale * (X + X.conj().T) / (2 * np.sqrt(2 * d))


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR with the phase fix of Mezzadri."""
    Z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    ph = np.diag(R) / np.abs(np.diag(R))
    return Q * ph


def random_density_matrix(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Hilbert-Schmidt random state (full rank unless ``rank`` is given)."""
    r = d if rank is None else rank
    G = rng.normal(size=(d, r)) + 1j * rng.normal(size=(d, r))
    rho = G @ G.conj().T
    rho = rho / np.trace(rho).real
    return 0.5 * (rho + rho.conj().T)


def random_pure_state(d: int, rng: np.random.Generator) -> np.ndarray:
    return random_density_matrix(d, rng, rank=1)


def random_protocol(d: int, rng: np.random.Generator, duration: float | None = None) -> DrivingProtocol:
    """``H(t) = (1 - s) A + s B + sin(pi s) C`` with ``s = t / duration``.

    ``A``, ``B``, ``C`` are independent GUE samples, so the endpoints and the
    path are all generic.
    """
    A, B, C = (random_hermitian(d, rng, scale=2.0) for _ in range(3))
    tau = float(rng.uniform(0.5, 3.0)) if duration is None else float(duration)

    def batch(ts):
        s = (np.asarray(ts, dtype=float) / tau)[..., None, None]
        return (1 - s) * A + s * B + np.sin(np.pi * s) * C

    return DrivingProtocol(tau, lambda t: batch(np.float64(t)), f"random(d={d})", batch=batch)
