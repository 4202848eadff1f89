"""Quantum kicked rotor: the standard quantum map on a truncated momentum lattice.

The momentum basis ``n = -N..N`` is treated as periodic (``L = 2N + 1``
sites), which is exactly the space sampled by an ``L``-point angle grid.
As long as the state never reaches the lattice edge (monitored through
``boundary_weight``) this is indistinguishable from the infinite rotor,
and it keeps the truncated kick operator exactly unitary.

The initial Gibbs state is diagonal in momentum, so it is evolved as a
weighted ensemble of momentum eigenstates rather than as a dense matrix.
Its von Neumann entropy is then constant and the coherence in the
momentum basis is the Shannon entropy of the mixture's momentum
distribution minus that constant.
"""
from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass, fields
from typing import Optional

import numpy as np
from scipy.special import jv

from .. import kernels
from ..config import DEFAULT_TOL, Tolerances
from ..dynamics import nearest_unitary
from ..errors import InvariantError, ParameterError, TruncationError, TruncationWarning
from ..fluctuation import TwoPointDistribution, build_distribution
from ..linalg import free_energy, log_thermal_populations, shannon_entropy, thermal_populations

__all__ = [
    "RotorParams",
    "RotorDiagnostics",
    "RotorRun",
    "bessel_bandwidth",
    "kick_coefficients",
    "rotor_kick_operator",
    "rotor_kick_operator_angle",
    "rotor_free_operator",
    "rotor_floquet_operator",
    "rotor_propagator",
    "rotor_distribution",
    "apply_kick_angle",
    "thermal_cutoff",
    "rotor_run",
    "saturation_statistics",
    "SaturationStats",
]

KICK_METHODS = ("toeplitz", "angle", "dense")


@dataclass(frozen=True)
class RotorParams:
    """Kick strength ``k``, period ``T``, inverse temperature ``beta``.

    ``n_cutoff=None`` selects the lattice size automatically.
    """

    k: float = 9.5
    T: float = 0.25
    beta: float = 10.0
    n_cutoff: Optional[int] = None
    n_kicks: int = 6000

    def __post_init__(self):
        if not (np.isfinite(self.k) and self.k >= 0):
            raise ParameterError(f"k must be finite and >= 0, got {self.k!r}")
        if not (np.isfinite(self.T) and self.T >= 0):
            raise ParameterError(f"T must be finite and >= 0, got {self.T!r}")
        if not (np.isfinite(self.beta) and self.beta > 0):
            raise ParameterError(f"beta must be finite and > 0, got {self.beta!r}")
        if self.n_cutoff is not None and self.n_cutoff < 1:
            raise ParameterError("n_cutoff must be >= 1")
        if self.n_kicks < 1:
            raise ParameterError("n_kicks must be >= 1")


@dataclass(frozen=True)
class RotorDiagnostics:
    kick_index: int
    energy: float
    avg_work: float
    coherence: float
    s_irr: float
    ratio: float
    xi_p: float
    boundary_weight: float
    mean_momentum: float
    mean_momentum_sq: float

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]


@dataclass
class RotorRun:
    """Diagnostics of a completed run plus the lattice it ended on."""

    params: RotorParams
    n_cutoff: int
    diagnostics: list
    truncation_warning: bool = False
    kick_method: str = "toeplitz"
    backend: str = kernels.BACKEND

    def __iter__(self):
        return iter(self.diagnostics)

    def __len__(self):
        return len(self.diagnostics)

    def __getitem__(self, i):
        return self.diagnostics[i]

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(d, name) for d in self.diagnostics])


# -- operators -----------------------------------------------------------

def bessel_bandwidth(k: float, tail: float = DEFAULT_TOL.rotor_bessel_tail) -> int:
    """Smallest ``b`` with ``|J_nu(k)| < tail`` for every ``|nu| > b``."""
    if k == 0:
        return 0
    nu = np.arange(0, int(2 * k + 60) + 1)
    big = np.nonzero(np.abs(jv(nu, k)) >= tail)[0]
    b = int(big[-1])
    # |J_nu(k)| decays monotonically once nu > k
    while abs(jv(b + 1, k)) >= tail or b + 1 <= k:
        b += 1
    return b


def kick_coefficients(k: float, b: int) -> np.ndarray:
    """``(-i)^d J_d(k)`` for ``d = -b..b``."""
    d = np.arange(-b, b + 1)
    return (-1j) ** (d % 4) * jv(d, k)


def _check_bandwidth(k: float, N: int, tol: Tolerances) -> int:
    b = bessel_bandwidth(k, tol.rotor_bessel_tail)
    if b >= N:
        raise TruncationError(
            f"N={N} too small for kick strength k={k}: Bessel coefficients exceed "
            f"{tol.rotor_bessel_tail:g} up to |nu|={b}"
        )
    return b


def rotor_kick_operator(k: float, N: int, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Dense kick operator ``<n|exp(-i k cos theta)|m>`` on the periodic lattice.

    Entry ``(n, m)`` is ``(-i)^d J_d(k)`` with ``d = n - m`` wrapped into
    ``[-N, N]``; this is a circulant (hence Toeplitz) matrix.
    """
    if N < 1:
        raise ParameterError("N must be >= 1")
    _check_bandwidth(k, N, tol)
    L = 2 * N + 1
    col = kick_coefficients(k, N)  # d = -N..N
    i = np.arange(L)
    d = (i[:, None] - i[None, :] + N) % L  # index into col
    return col[d]


def _angle_grid(N: int) -> np.ndarray:
    L = 2 * N + 1
    return 2 * np.pi * np.arange(L) / L


def apply_kick_angle(psi: np.ndarray, k: float, N: int) -> np.ndarray:
    """Kick applied through the angle representation (last axis = momentum)."""
    V = np.exp(-1j * k * np.cos(_angle_grid(N)))
    g = np.fft.ifft(np.fft.ifftshift(psi, axes=-1), axis=-1)
    return np.fft.fftshift(np.fft.fft(g * V, axis=-1), axes=-1)


def rotor_kick_operator_angle(k: float, N: int) -> np.ndarray:
    """Dense kick operator assembled column by column from the angle-grid route."""
    L = 2 * N + 1
    return apply_kick_angle(np.eye(L, dtype=np.complex128), k, N).T


def rotor_free_operator(T: float, N: int) -> np.ndarray:
    """Diagonal of ``exp(-i T p^2 / 2)`` for ``n = -N..N``."""
    n = np.arange(-N, N + 1, dtype=float)
    return np.exp(-0.5j * T * n * n)


def rotor_floquet_operator(k: float, T: float, N: int, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """One period, kick first: ``diag(exp(-i T n^2 / 2)) @ K``."""
    return rotor_free_operator(T, N)[:, None] * rotor_kick_operator(k, N, tol)


def rotor_propagator(params: RotorParams, N: int, n_kicks: Optional[int] = None,
                     tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Dense ``U^tau`` on the ``2N + 1`` lattice, by repeated squaring.

    Every product is projected back onto the unitary group.  Plain squaring
    lets the unitarity residual grow to ~1e-12 over thousands of kicks, and
    energies of order ``N^2`` amplify that into ~1e-8 errors in the work.
    """
    kicks = params.n_kicks if n_kicks is None else n_kicks
    base = nearest_unitary(rotor_floquet_operator(params.k, params.T, N, tol))
    out = np.eye(2 * N + 1, dtype=np.complex128)
    while kicks:
        if kicks & 1:
            out = nearest_unitary(out @ base)
        kicks >>= 1
        if kicks:
            base = nearest_unitary(base @ base)
    return out


def rotor_distribution(params: RotorParams, N: int, n_kicks: Optional[int] = None,
                       tol: Tolerances = DEFAULT_TOL) -> TwoPointDistribution:
    """Two-point measurement statistics of ``H0 = p^2/2`` after ``n_kicks``.

    Every lattice momentum is propagated (dense ``U^tau``), so the tables are
    exhaustive; the Hamiltonian is the same at both ends, so ``F_B = F_i``
    and the reference state is the initial Gibbs state.
    """
    U = rotor_propagator(params, N, n_kicks, tol)
    P = np.abs(U.T) ** 2  # P[n, m] = |<m|U^tau|n>|^2
    e = 0.5 * np.arange(-N, N + 1, dtype=float) ** 2
    g = thermal_populations(e, params.beta)
    lg = log_thermal_populations(e, params.beta)
    F = free_energy(np.diag(e), params.beta)
    return build_distribution(g, P, e, e, params.beta, F, F, g @ P, g,
                              log_rho0=lg, log_rho_B=lg, tol=tol)


# -- initial state ---------------------------------------------------------

def thermal_cutoff(beta: float, tail: float = DEFAULT_TOL.rotor_thermal_tail) -> int:
    """Smallest ``N`` whose Gibbs weight outside ``[-N, N]`` is below ``tail``."""
    nmax = int(np.ceil(np.sqrt(2 * 80 / beta))) + 2
    n = np.arange(-nmax, nmax + 1)
    logw = -0.5 * beta * n * n
    w = np.exp(logw - logw.max())
    w /= w.sum()
    for N in range(0, nmax + 1):
        if w[np.abs(n) > N].sum() < tail:
            return max(N, 1)
    return nmax


def _initial_ensemble(beta: float, N: int, tol: Tolerances):
    n = np.arange(-N, N + 1)
    logw = -0.5 * beta * n.astype(float) ** 2
    w = np.exp(logw - logw.max())
    w /= w.sum()
    keep = w > tol.rotor_trajectory_weight
    weights = w[keep] / w[keep].sum()
    return n[keep], weights


# -- time evolution --------------------------------------------------------

class _Breach(Exception):
    pass


def _edge_width(N: int, b: int) -> int:
    return min(N, max(b, N // 16, 1))


def _simulate(params: RotorParams, N: int, method: str, stop_on_breach: bool, tol: Tolerances, backend):
    L = 2 * N + 1
    b = _check_bandwidth(params.k, N, tol)
    n_vals = np.arange(-N, N + 1, dtype=float)
    n_sq = n_vals**2
    edge = np.abs(n_vals) > N - _edge_width(N, b)

    n0, weights = _initial_ensemble(params.beta, N, tol)
    M = len(n0)
    psi = np.zeros((M, L), dtype=np.complex128)
    psi[np.arange(M), n0 + N] = 1.0
    out = np.empty_like(psi)
    S0 = shannon_entropy(weights, tol)
    pops0 = np.zeros(L)
    pops0[n0 + N] = weights
    E0 = 0.5 * float(pops0 @ n_sq)
    beta = params.beta

    free = rotor_free_operator(params.T, N)
    if method == "toeplitz":
        coeffs = kick_coefficients(params.k, b)
    elif method == "dense":
        K = (free[:, None] * rotor_kick_operator(params.k, N, tol)).T.copy()
    elif method == "angle":
        Vk = np.exp(-1j * params.k * np.cos(_angle_grid(N)))
    else:
        raise ParameterError(f"unknown kick method {method!r}; expected one of {KICK_METHODS}")

    diags = []
    pops = pops0
    breached = False
    for kick in range(params.n_kicks + 1):
        if kick > 0:
            if method == "toeplitz":
                backend.floquet_step(psi, coeffs, free, out)
                psi, out = out, psi
            elif method == "dense":
                psi = psi @ K
            else:
                g = np.fft.ifft(np.fft.ifftshift(psi, axes=-1), axis=-1)
                psi = free * np.fft.fftshift(np.fft.fft(g * Vk, axis=-1), axes=-1)
            pops = backend.mixture_populations(psi, weights)
        mean_n = float(pops @ n_vals)
        mean_n2 = float(pops @ n_sq)
        energy = 0.5 * mean_n2
        work = energy - E0
        s_irr = beta * work
        coh = shannon_entropy(pops, tol) - S0
        if s_irr < -tol.clamp * max(1.0, beta * E0) or coh < -tol.clamp:
            raise InvariantError(f"kick {kick}: negative S_irr={s_irr:.3e} or C={coh:.3e}")
        s_irr = max(s_irr, 0.0)
        coh = max(coh, 0.0)
        if s_irr > 1e-12:
            ratio = coh / s_irr
            if ratio > 1 + 1e-9:
                raise InvariantError(f"kick {kick}: C/S_irr = {ratio!r} exceeds 1")
            ratio = min(ratio, 1.0)
        else:
            ratio = 0.0
        bw = float(pops[edge].sum())
        if bw > tol.rotor_boundary:
            if stop_on_breach:
                raise _Breach(kick)
            breached = True
        diags.append(
            RotorDiagnostics(
                kick_index=kick,
                energy=energy,
                avg_work=work,
                coherence=coh,
                s_irr=s_irr,
                ratio=ratio,
                xi_p=float(np.sqrt(max(mean_n2 - mean_n**2, 0.0))),
                boundary_weight=bw,
                mean_momentum=mean_n,
                mean_momentum_sq=mean_n2,
            )
        )
    return diags, breached


def initial_cutoff(params: RotorParams, tol: Tolerances = DEFAULT_TOL) -> int:
    """Starting lattice for automatic selection: thermal tail rule, widened
    so the kick band and the edge monitor both fit."""
    N = thermal_cutoff(params.beta, tol.rotor_thermal_tail)
    b = bessel_bandwidth(params.k, tol.rotor_bessel_tail)
    return max(N, 2 * b + 1, 16)


def rotor_run(
    params: RotorParams,
    kick_method: str = "toeplitz",
    on_truncation: str = "warn",
    n_max: int = 8192,
    backend: Optional[str] = None,
    tol: Tolerances = DEFAULT_TOL,
) -> RotorRun:
    """Kick the thermal rotor ``params.n_kicks`` times and record diagnostics.

    The returned run holds one :class:`RotorDiagnostics` per kick index
    ``0..n_kicks`` (index 0 is the initial state).  With automatic lattice
    selection the cutoff is doubled and the run restarted whenever the
    edge population exceeds ``tol.rotor_boundary``.  A fixed cutoff that is
    breached emits a :class:`TruncationWarning`, or raises
    :class:`TruncationError` when ``on_truncation="raise"``.
    """
    if kick_method not in KICK_METHODS:
        raise ParameterError(f"unknown kick method {kick_method!r}; expected one of {KICK_METHODS}")
    if on_truncation not in ("warn", "raise"):
        raise ParameterError("on_truncation must be 'warn' or 'raise'")
    impl = kernels._impl if backend is None else kernels.load_backend(backend)
    name = kernels.BACKEND if backend is None else backend

    if params.n_cutoff is not None:
        N = params.n_cutoff
        msg = f"rotor state reached the edge of the N={N} lattice (weight > {tol.rotor_boundary:g})"
        try:
            diags, breached = _simulate(params, N, kick_method, on_truncation == "raise", tol, impl)
        except _Breach as exc:
            raise TruncationError(f"{msg} at kick {exc.args[0]}") from None
        if breached:
            warnings.warn(msg, TruncationWarning, stacklevel=2)
        return RotorRun(params, N, diags, breached, kick_method, name)

    N = initial_cutoff(params, tol)
    while True:
        try:
            diags, _ = _simulate(params, N, kick_method, True, tol, impl)
            return RotorRun(params, N, diags, False, kick_method, name)
        except _Breach:
            if 2 * N > n_max:
                msg = f"lattice cutoff would exceed n_max={n_max}"
                if on_truncation == "raise":
                    raise TruncationError(msg) from None
                warnings.warn(msg, TruncationWarning, stacklevel=2)
                diags, _ = _simulate(params, N, kick_method, False, tol, impl)
                return RotorRun(params, N, diags, True, kick_method, name)
            N *= 2


# -- long-time averages ----------------------------------------------------

@dataclass(frozen=True)
class SaturationStats:
    mean_C: float
    std_C: float
    mean_ratio: float
    std_ratio: float
    mean_work: float
    std_work: float
    xi_p: float
    n_points: int

    def as_dict(self) -> dict:
        return asdict(self)


def saturation_statistics(diags, window_start: int = 3000, window_end: Optional[int] = None) -> SaturationStats:
    """Means and standard deviations over kicks ``window_start..window_end``.

    ``xi_p`` is the standard deviation of the window-averaged momentum
    distribution, obtained from the window means of the first two moments.
    """
    diags = list(diags)
    if window_end is None:
        window_end = diags[-1].kick_index
    sel = [d for d in diags if window_start <= d.kick_index <= window_end]
    if window_end > diags[-1].kick_index or window_start < 0:
        raise ParameterError("window extends beyond the run")
    if len(sel) < 100:
        raise ParameterError(f"window holds {len(sel)} kicks; at least 100 required")
    col = lambda name: np.array([getattr(d, name) for d in sel])
    C, r, w = col("coherence"), col("ratio"), col("avg_work")
    m1, m2 = col("mean_momentum").mean(), col("mean_momentum_sq").mean()
    return SaturationStats(
        mean_C=float(C.mean()),
        std_C=float(C.std()),
        mean_ratio=float(r.mean()),
        std_ratio=float(r.std()),
        mean_work=float(w.mean()),
        std_work=float(w.std()),
        xi_p=float(np.sqrt(max(m2 - m1 * m1, 0.0))),
        n_points=len(sel),
    )
