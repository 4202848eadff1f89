"""Pure numpy versions of the rotor kernels in ``_kernels.pyx``."""
import numpy as np


def floquet_step(psi, coeffs, phases, out=None):
    psi = np.asarray(psi, dtype=np.complex128)
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    L = psi.shape[-1]
    b = (coeffs.shape[0] - 1) // 2
    if coeffs.shape[0] % 2 == 0 or coeffs.shape[0] > L:
        raise ValueError("coefficient band must have odd length <= lattice size")
    if np.shape(phases) != (L,):
        raise ValueError("phase vector length must match the lattice")
    acc = np.zeros_like(psi)
    for d in range(-b, b + 1):
        acc += coeffs[d + b] * np.roll(psi, d, axis=-1)
    acc *= phases
    if out is None:
        return acc
    out[...] = acc
    return out


def mixture_populations(psi, weights, out=None):
    psi = np.asarray(psi, dtype=np.complex128)
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape[0] != psi.shape[0]:
        raise ValueError("one weight per trajectory required")
    pops = weights @ (psi.real**2 + psi.imag**2)
    if out is None:
        return pops
    out[...] = pops
    return out
