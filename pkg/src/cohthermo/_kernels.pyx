# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled rotor kernels.  Same signatures as ``_kernels_py``."""
import numpy as np


cdef inline void _axpy(double* acc, const double* src, double cr, double ci,
                       Py_ssize_t count) noexcept nogil:
    # acc[i] += c * src[i] on interleaved (re, im) storage
    cdef Py_ssize_t i
    cdef double pr, pi
    for i in range(count):
        pr = src[2 * i]
        pi = src[2 * i + 1]
        acc[2 * i] += cr * pr - ci * pi
        acc[2 * i + 1] += cr * pi + ci * pr


cdef void _band_row(const double* row, const double* coeffs, double* dest,
                    const double* phases, Py_ssize_t L, Py_ssize_t b) noexcept nogil:
    cdef Py_ssize_t n, k, d
    cdef double cr, ci, ar, ai
    for n in range(2 * L):
        dest[n] = 0.0
    for k in range(2 * b + 1):
        d = k - b  # dest[n] += c_d * row[(n - d) mod L]
        cr = coeffs[2 * k]
        ci = coeffs[2 * k + 1]
        if d >= 0:
            _axpy(dest + 2 * d, row, cr, ci, L - d)
            _axpy(dest, row + 2 * (L - d), cr, ci, d)
        else:
            _axpy(dest, row - 2 * d, cr, ci, L + d)
            _axpy(dest + 2 * (L + d), row, cr, ci, -d)
    for n in range(L):
        cr = phases[2 * n]
        ci = phases[2 * n + 1]
        ar = dest[2 * n]
        ai = dest[2 * n + 1]
        dest[2 * n] = cr * ar - ci * ai
        dest[2 * n + 1] = cr * ai + ci * ar


def floquet_step(psi, coeffs, phases, out=None):
    """One rotor period on a batch of momentum-space wave functions.

    ``out[j, n] = phases[n] * sum_d coeffs[d + b] * psi[j, (n - d) mod L]``
    for ``d`` in ``[-b, b]``: a banded circulant kick followed by the
    diagonal free evolution.
    """
    cdef const double complex[:, ::1] P = np.ascontiguousarray(psi, dtype=np.complex128)
    cdef const double complex[::1] C = np.ascontiguousarray(coeffs, dtype=np.complex128)
    cdef const double complex[::1] F = np.ascontiguousarray(phases, dtype=np.complex128)
    cdef Py_ssize_t M = P.shape[0]
    cdef Py_ssize_t L = P.shape[1]
    cdef Py_ssize_t b = (C.shape[0] - 1) // 2
    if C.shape[0] % 2 == 0 or C.shape[0] > L:
        raise ValueError("coefficient band must have odd length <= lattice size")
    if F.shape[0] != L:
        raise ValueError("phase vector length must match the lattice")
    if out is None:
        out = np.empty((M, L), dtype=np.complex128)
    cdef double complex[:, ::1] O = out
    cdef Py_ssize_t j
    if M == 0:
        return out
    with nogil:
        for j in range(M):
            _band_row(<const double*> &P[j, 0], <const double*> &C[0], <double*> &O[j, 0],
                      <const double*> &F[0], L, b)
    return out


def mixture_populations(psi, weights, out=None):
    """``out[n] = sum_j weights[j] * |psi[j, n]|^2``."""
    cdef const double complex[:, ::1] P = np.ascontiguousarray(psi, dtype=np.complex128)
    cdef const double[::1] W = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t M = P.shape[0]
    cdef Py_ssize_t L = P.shape[1]
    if W.shape[0] != M:
        raise ValueError("one weight per trajectory required")
    if out is None:
        out = np.empty(L, dtype=np.float64)
    cdef double[::1] O = out
    cdef Py_ssize_t j, n
    cdef double w, re, im
    with nogil:
        for n in range(L):
            O[n] = 0.0
        for j in range(M):
            w = W[j]
            for n in range(L):
                re = P[j, n].real
                im = P[j, n].imag
                O[n] = O[n] + w * (re * re + im * im)
    return out
