"""Two-point energy measurement statistics and integral fluctuation relations.

For a process started in a diagonal state, measuring the energy before
(outcome n) and after (outcome m) the drive yields the joint probability
``rho_nn(0) P[n, m]``.  Three per-outcome variables are attached to it:

* ``s`` -- stochastic irreversible entropy, ``beta_i (e_f - e_i - (F_B - F_i))``
* ``p`` -- population mismatch, ``ln rho_mm(tau) - ln rho_B,mm``
* ``c = s - p`` -- the coherence part.
"""
from __future__ import annotations

import csv
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .dynamics import transition_matrix
from .errors import ConsistencyError, ParameterError, ShapeError, SupportError
from scipy.special import logsumexp

from .linalg import (
    free_energy,
    log_thermal_populations,
    populations,
    spectral_decompose,
    thermal_populations,
)

__all__ = [
    "RNG_ALGORITHM",
    "TwoPointDistribution",
    "Expectations",
    "SampleEstimate",
    "build_distribution",
    "distribution_from_process",
    "exact_expectations",
    "sample",
    "histogram",
    "write_histogram_csv",
]

RNG_ALGORITHM = f"numpy.random.PCG64 (numpy {np.__version__})"


@dataclass(frozen=True)
class TwoPointDistribution:
    """Outcome table of a two-point energy measurement.

    Probabilities are held as logarithms so that outcomes whose weight
    underflows (deep Gibbs tails) still enter the exponential averages,
    where ``prob * exp(-s)`` can be of order one.  ``log_rho_final`` is the
    log of the marginal of the stored outcomes over ``n``, which keeps the
    ``p`` identities exact.
    """

    n: np.ndarray
    m: np.ndarray
    log_prob: np.ndarray
    e_i: np.ndarray
    e_f: np.ndarray
    beta_i: float
    F_i: float
    F_B: float
    rho_final_diag: np.ndarray
    rho_B_diag: np.ndarray
    log_rho_final: np.ndarray
    log_rho_B: np.ndarray

    @property
    def prob(self) -> np.ndarray:
        return np.exp(self.log_prob)

    @property
    def s(self) -> np.ndarray:
        return self.beta_i * ((self.e_f - self.e_i) - (self.F_B - self.F_i))

    @property
    def p(self) -> np.ndarray:
        return self.log_rho_final[self.m] - self.log_rho_B[self.m]

    @property
    def c(self) -> np.ndarray:
        return self.s - self.p

    def __len__(self) -> int:
        return self.log_prob.shape[0]


@dataclass(frozen=True)
class Expectations:
    mean_s: float
    mean_p: float
    mean_c: float
    exp_neg_s: float
    exp_neg_p: float
    exp_neg_c: float

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class SampleEstimate:
    estimates: Expectations
    standard_errors: Expectations
    n_samples: int
    seed: int
    rng: str = RNG_ALGORITHM


def _log(x: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(np.clip(x, 0.0, None))


def build_distribution(
    rho0_populations,
    P,
    spectra_i,
    spectra_f,
    beta_i: float,
    F_i: float,
    F_B: float,
    rho_final_diag,
    rho_B_diag,
    log_rho0=None,
    log_rho_B=None,
    tol: Tolerances = DEFAULT_TOL,
) -> TwoPointDistribution:
    """Tabulate every outcome ``(n, m)`` of non-zero probability.

    ``P[n, m]`` is the probability of ending in final level ``m`` from
    initial level ``n``.  Transitions with ``P[n, m] <= tol.transition_floor``
    are rounding residue of forbidden branches and are dropped; small joint
    probabilities that come from small initial populations are kept.  The
    floor sits far below any physical transition so that, weighted by large
    energies, the discarded mass stays negligible.  Exact logarithms of the
    initial and reference populations may be passed as ``log_rho0`` and
    ``log_rho_B``; otherwise they are taken from the linear values.
    """
    r0 = np.asarray(rho0_populations, dtype=float)
    P = np.asarray(P, dtype=float)
    ei = np.asarray(spectra_i, dtype=float)
    ef = np.asarray(spectra_f, dtype=float)
    rf = np.asarray(rho_final_diag, dtype=float)
    rB = np.asarray(rho_B_diag, dtype=float)
    d_i, d_f = P.shape if P.ndim == 2 else (-1, -1)
    if not (r0.shape == ei.shape == (d_i,) and rf.shape == ef.shape == rB.shape == (d_f,)):
        raise ShapeError("build_distribution: inconsistent dimensions")
    if np.any(r0 < -tol.support) or np.any(P < -tol.support):
        raise ConsistencyError("negative probabilities in input")
    dev = np.max(np.abs(r0 @ P - rf))
    if dev > tol.stochastic:
        raise ConsistencyError(f"final populations disagree with rho0 @ P (max dev {dev:.2e})")
    if abs(rB.sum() - 1.0) > tol.stochastic:
        raise ConsistencyError("reference populations do not sum to 1")
    lr0 = _log(r0) if log_rho0 is None else np.asarray(log_rho0, dtype=float)
    lrB = _log(rB) if log_rho_B is None else np.asarray(log_rho_B, dtype=float)

    log_joint = lr0[:, None] + _log(np.where(P > tol.transition_floor, P, 0.0))
    n, m = np.nonzero(log_joint > -np.inf)
    lp = log_joint[n, m]
    if n.size == 0:
        raise ConsistencyError("distribution carries no probability")
    if np.any(~np.isfinite(lrB[m])):
        raise SupportError("outcome lands on a zero reference population")
    lrf = np.full(d_f, -np.inf)
    order = np.argsort(m, kind="stable")
    ms, lps = m[order], lp[order]
    bounds = np.flatnonzero(np.diff(ms)) + 1
    for grp_m, grp in zip(ms[np.r_[0, bounds]], np.split(lps, bounds)):
        lrf[grp_m] = logsumexp(grp)
    for a in (n, m, lp, lrf):
        a.setflags(write=False)
    return TwoPointDistribution(
        n=n, m=m, log_prob=lp, e_i=ei[n], e_f=ef[m],
        beta_i=float(beta_i), F_i=float(F_i), F_B=float(F_B),
        rho_final_diag=rf, rho_B_diag=rB, log_rho_final=lrf, log_rho_B=lrB,
    )


def distribution_from_process(rho0, U, H_i, H_f, beta_i: float, tol: Tolerances = DEFAULT_TOL) -> TwoPointDistribution:
    """Distribution for ``rho0`` driven by ``U`` from ``H_i`` to ``H_f``.

    When ``rho0`` is the Gibbs state of ``H_i`` its populations are taken
    from the exact Gibbs weights.
    """
    sd_i, sd_f = spectral_decompose(H_i, tol), spectral_decompose(H_f, tol)
    P = transition_matrix(U, sd_i, sd_f, tol)
    r0 = np.clip(populations(rho0, sd_i), 0.0, None)
    log_r0 = None
    gibbs = thermal_populations(sd_i.eigenvalues, beta_i)
    if np.max(np.abs(r0 - gibbs)) <= tol.thermal:
        # read back off a matrix, small populations lose relative precision
        r0 = gibbs
        log_r0 = log_thermal_populations(sd_i.eigenvalues, beta_i)
    U = np.asarray(U)
    rho_t = U @ np.asarray(rho0) @ U.conj().T
    rf = r0 @ P
    dev = np.max(np.abs(rf - populations(rho_t, sd_f)))
    if dev > tol.stochastic:
        raise ConsistencyError(f"rho0 is not diagonal in the H_i basis (marginal mismatch {dev:.2e})")
    return build_distribution(
        r0, P, sd_i.eigenvalues, sd_f.eigenvalues, beta_i,
        free_energy(sd_i, beta_i), free_energy(sd_f, beta_i),
        rf, thermal_populations(sd_f.eigenvalues, beta_i),
        log_rho0=log_r0, log_rho_B=log_thermal_populations(sd_f.eigenvalues, beta_i), tol=tol,
    )


def exact_expectations(dist: TwoPointDistribution) -> Expectations:
    """Exhaustive averages; exponential ones are summed in log space."""
    w, lw = dist.prob, dist.log_prob
    s, p = dist.s, dist.p
    c = s - p
    return Expectations(
        mean_s=float(w @ s),
        mean_p=float(w @ p),
        mean_c=float(w @ c),
        exp_neg_s=float(np.exp(logsumexp(lw - s))),
        exp_neg_p=float(np.exp(logsumexp(lw - p))),
        exp_neg_c=float(np.exp(logsumexp(lw - c))),
    )


def sample(dist: TwoPointDistribution, n_samples: int, seed: int) -> SampleEstimate:
    """Monte Carlo estimates from i.i.d. draws by inverse-CDF lookup.

    The generator is PCG64 seeded with ``seed``; identical seeds give
    bit-identical results.
    """
    if n_samples < 1:
        raise ParameterError("n_samples must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    cdf = np.cumsum(np.exp(dist.log_prob - dist.log_prob.max()))
    cdf /= cdf[-1]
    idx = np.searchsorted(cdf, rng.random(n_samples), side="right")
    idx = np.minimum(idx, len(cdf) - 1)
    s, p = dist.s[idx], dist.p[idx]
    c = s - p
    cols = [s, p, c, np.exp(-s), np.exp(-p), np.exp(-c)]
    means = [float(x.mean()) for x in cols]
    ddof = 1 if n_samples > 1 else 0
    errs = [float(x.std(ddof=ddof) / np.sqrt(n_samples)) for x in cols]
    return SampleEstimate(Expectations(*means), Expectations(*errs), n_samples, seed)


def histogram(dist: TwoPointDistribution, decimals: int = 12) -> list[tuple[str, float, float]]:
    """Probability mass of each distinct value of ``s``, ``p`` and ``c``.

    Values equal after rounding to ``decimals`` places are merged.
    """
    rows = []
    for name, vals in (("s", dist.s), ("p", dist.p), ("c", dist.c)):
        keys = np.round(vals, decimals) + 0.0  # drop negative zeros
        uniq, inv = np.unique(keys, return_inverse=True)
        mass = np.bincount(inv, weights=dist.prob, minlength=len(uniq))
        keep = mass > 0
        rows.extend((name, float(v), float(w)) for v, w in zip(uniq[keep], mass[keep]))
    return rows


def write_histogram_csv(dist: TwoPointDistribution, path) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        fh.write("# schema=1\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["variable", "value", "probability"])
        for name, v, p in histogram(dist):
            w.writerow([name, repr(v), repr(p)])
    return path
