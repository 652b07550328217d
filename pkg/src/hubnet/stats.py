"""Statistical diagnostics for hub fluctuation traces.

Covers the frequency of large fluctuations and its exponential decay fit,
window maxima, Gaussianity checks with explicit Berry-Esseen correction
bands, Monte-Carlo bad-set volumes against the Hoeffding bound, and
ergodic-average checks for decoupled orbits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import stats as sps

from . import _kernels
from .dynamics import MapFamily, StationaryMeasure

__all__ = [
    "FrequencyRecord",
    "DecayFit",
    "WindowMaxRecord",
    "GaussianCheck",
    "large_fluct_frequency",
    "exp_decay_fit",
    "window_max",
    "gaussian_check",
    "bad_set_volume",
    "ks_distance",
    "empirical_measure_check",
]


# ---------------------------------------------------------------------------
# frequencies and decay fits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FrequencyRecord:
    """Frequency of |xi| > epsilon over a window of length T."""

    epsilon: float
    T: int
    count: int

    @property
    def rho(self) -> float:
        return self.count / self.T


def large_fluct_frequency(trace: np.ndarray, epsilon: float) -> FrequencyRecord:
    trace = np.asarray(trace, dtype=np.float64)
    if trace.size == 0:
        raise ValueError("empty fluctuation trace")
    if epsilon <= 0.0:
        raise ValueError("threshold must be positive")
    count = int(np.sum(np.abs(trace) > epsilon))
    return FrequencyRecord(epsilon=float(epsilon), T=trace.size, count=count)


@dataclass(frozen=True)
class DecayFit:
    """Least-squares exponential fit rho(L) = A exp(-gamma L)."""

    A: float
    gamma: float
    r2: float
    n_points: int


def exp_decay_fit(points: Sequence[tuple]) -> DecayFit:
    """Line fit on (L, log rho); zero frequencies are dropped first."""
    pts = [(float(L), float(r)) for L, r in points if r > 0.0]
    if len(pts) < 3:
        raise ValueError("need at least 3 points with positive frequency")
    L = np.array([p[0] for p in pts])
    y = np.log(np.array([p[1] for p in pts]))
    slope, intercept = np.polyfit(L, y, 1)
    resid = y - (slope * L + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - float(np.sum(resid ** 2)) / ss_tot
    return DecayFit(A=math.exp(intercept), gamma=-float(slope), r2=r2, n_points=len(pts))


# ---------------------------------------------------------------------------
# window maxima
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WindowMaxRecord:
    start: int
    length: int
    max_abs: float
    threshold: float

    @property
    def exceeds(self) -> bool:
        return self.max_abs > self.threshold


def window_max(trace: np.ndarray, window: int, kappa: float, L_eff: float,
               alpha: float) -> list:
    """Per-window maxima of |xi| against the threshold 3 L^(-kappa) alpha.

    The exponent must lie in (0, 1/2); a trailing partial window is dropped.
    """
    if not (0.0 < kappa < 0.5):
        raise ValueError("kappa must lie in (0, 1/2)")
    if window < 1:
        raise ValueError("window length must be >= 1")
    trace = np.abs(np.asarray(trace, dtype=np.float64))
    thr = 3.0 * L_eff ** (-kappa) * alpha
    out = []
    for start in range(0, trace.size - window + 1, window):
        m = float(trace[start:start + window].max())
        out.append(WindowMaxRecord(start=start, length=window, max_abs=m, threshold=thr))
    return out


# ---------------------------------------------------------------------------
# Gaussianity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GaussianCheck:
    """One-sample normality check with Berry-Esseen correction bands.

    The model is Normal(0, alpha^2/(2 L_eff)); the empirical CDF is checked
    at sample points against [F(s - c1) - c2, F(s + c1) + c2] with
    c1 = 36 alpha^2 / L and c2 = 8 / sqrt(L).
    """

    variance_model: float
    c1: float
    c2: float
    ks_stat: float
    band_violations: int
    n: int


def ks_distance(sample: np.ndarray, cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """Two-sided Kolmogorov distance between the empirical CDF and ``cdf``."""
    s = np.sort(np.asarray(sample, dtype=np.float64))
    if s.size == 0:
        raise ValueError("empty sample")
    n = s.size
    f = np.asarray(cdf(s), dtype=np.float64)
    hi = np.arange(1, n + 1) / n - f
    lo = f - np.arange(0, n) / n
    return float(max(hi.max(), lo.max()))


def gaussian_check(sample: np.ndarray, L_eff: float, alpha: float) -> GaussianCheck:
    sample = np.asarray(sample, dtype=np.float64)
    if sample.size < 100:
        raise ValueError("need at least 100 samples")
    var = alpha ** 2 / (2.0 * L_eff)
    sd = math.sqrt(var)
    c1 = 36.0 * alpha ** 2 / L_eff
    c2 = 8.0 / math.sqrt(L_eff)
    model = sps.norm(loc=0.0, scale=sd)
    ks = ks_distance(sample, model.cdf)
    s = np.sort(sample)
    n = s.size
    upper = model.cdf(s + c1) + c2
    lower = model.cdf(s - c1) - c2
    ecdf_hi = np.arange(1, n + 1) / n
    ecdf_lo = np.arange(0, n) / n
    violations = int(np.sum((ecdf_hi > upper) | (ecdf_lo < lower)))
    return GaussianCheck(variance_model=var, c1=c1, c2=c2, ks_stat=ks,
                         band_violations=violations, n=n)


# ---------------------------------------------------------------------------
# bad-set volumes
# ---------------------------------------------------------------------------

def bad_set_volume(phi: Callable[[np.ndarray], np.ndarray], sup_phi: float,
                   L: int, epsilon: float, trials: int, seed: int):
    """Monte-Carlo volume of the bad set for iid Uniform[0,1) coordinates.

    Estimates P(|(1/L) sum phi(X_j) - mean| > epsilon) and returns
    (estimate, hoeffding_bound, stderr) with bound 2 exp(-L eps^2 / (2 sup^2)).
    The mean of phi is computed by quadrature once.
    """
    if trials < 10_000:
        raise ValueError("need at least 10^4 trials")
    mean = StationaryMeasure.lebesgue().mean(phi)
    rng = np.random.default_rng(seed)
    hits = 0
    # chunked so L * chunk stays within a few hundred MB
    chunk = max(1, min(trials, int(2e7) // L))
    done = 0
    while done < trials:
        b = min(chunk, trials - done)
        x = rng.random((b, L))
        avg = phi(x).mean(axis=1)
        hits += int(np.sum(np.abs(avg - mean) > epsilon))
        done += b
    est = hits / trials
    bound = 2.0 * math.exp(-L * epsilon ** 2 / (2.0 * sup_phi ** 2))
    stderr = math.sqrt(max(est * (1.0 - est), 1.0 / trials) / trials)
    return est, bound, stderr


# ---------------------------------------------------------------------------
# ergodic averages
# ---------------------------------------------------------------------------

def empirical_measure_check(family: MapFamily, seed: int, node: int,
                            phi: Callable[[np.ndarray], np.ndarray],
                            T: int, x0: float = 0.0) -> float:
    """|Birkhoff average of phi along one decoupled orbit - integral of phi|.

    Uses the compiled orbit kernel when the family is the standard tent
    contraction quadruple; otherwise iterates in Python.
    """
    if family.contraction_rate is None:
        raise ValueError("typicality check requires a contraction family")
    mean = StationaryMeasure.lebesgue().mean(phi)
    cum = np.cumsum(np.full(family.nsymbols, 1.0 / family.nsymbols))
    cum[-1] = 1.0
    use_kernel = False
    if family.nsymbols == 4:
        # the compiled orbit hard-codes the tent quadruple; verify on a grid
        # before trusting it for an arbitrary 4-symbol family
        probe = np.arange(16) / 16.0
        use_kernel = all(
            np.allclose(family.eval(s, probe),
                        [_kernels.tent_map(float(p), s) for p in probe],
                        atol=0.0, rtol=0.0)
            for s in range(4)
        )
    if use_kernel:
        orbit = _kernels.random_orbit(np.uint64(seed), np.uint64(node),
                                      float(x0), T, cum)
        avg = float(np.mean(phi(orbit[:T])))
    else:
        from .noise import NoiseOracle
        oracle = NoiseOracle(seed)
        x = float(x0)
        acc = 0.0
        for t in range(T):
            acc += float(phi(np.float64(x)))
            x = float(family.eval(oracle.symbol_at(node, t), x))
        avg = acc / T
    return abs(avg - mean)
