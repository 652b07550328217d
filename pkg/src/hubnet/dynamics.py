"""Node dynamics, couplings, and mean-field reduced maps on the circle.

The circle is [0,1) with wrap-around distance.  A :class:`MapFamily` holds
one evaluable circle map per noise symbol; a :class:`Coupling` is a real
pairwise interaction with declared norm bounds.  Averaging the coupling's
second argument against a stationary measure of the node dynamics yields the
one-dimensional :class:`ReducedMap` that approximates hub behaviour.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate, optimize

__all__ = [
    "wrap01",
    "circle_dist",
    "circle_signed_diff",
    "MapFamily",
    "Coupling",
    "StationaryMeasure",
    "ReducedMap",
    "FixedPoint",
    "FixedPointReport",
    "FourierTable",
    "coupling_mean",
    "reduced_fixed_points",
    "trapping_region",
    "stationary_sampler",
    "fourier_coeffs",
]

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# circle helpers
# ---------------------------------------------------------------------------

def wrap01(v):
    """Map reals to [0,1) as v - floor(v)."""
    return v - np.floor(v)


def circle_dist(a, b):
    """Wrap-around distance on [0,1); always in [0, 1/2]."""
    d = np.abs(np.asarray(a, dtype=np.float64) - b)
    d = np.where(d > 0.5, 1.0 - d, d)
    if d.ndim == 0:
        return float(d)
    return d


def circle_signed_diff(a, b):
    """Signed circle difference a - b mapped to (-1/2, 1/2]."""
    d = wrap01(np.asarray(a, dtype=np.float64) - b)
    d = np.where(d > 0.5, d - 1.0, d)
    if d.ndim == 0:
        return float(d)
    return d


# ---------------------------------------------------------------------------
# map families
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MapFamily:
    """Finite family of circle maps indexed by noise symbol.

    ``branches(symbol, x)`` must accept numpy arrays for both arguments and
    return values already wrapped to [0,1).  ``contraction_rate`` is the
    uniform rate lambda when the family is contracting (None otherwise).
    """

    branches: Callable[[np.ndarray, np.ndarray], np.ndarray]
    nsymbols: int
    contraction_rate: Optional[float] = None

    def eval(self, symbol, x):
        sym = np.asarray(symbol)
        if np.any(sym < 0) or np.any(sym >= self.nsymbols):
            raise ValueError(f"symbol out of range [0, {self.nsymbols})")
        return self.branches(sym, np.asarray(x, dtype=np.float64))

    @staticmethod
    def tent_contractions() -> "MapFamily":
        """Four tent-shaped 1/2-contractions with offsets 0, 1/4, 1/2, 3/4.

        Their iid iteration has Lebesgue on [0,1) as unique stationary
        measure.
        """

        def _eval(sym, x):
            base = np.where(x <= 0.5, 0.5 * x, 0.5 * (1.0 - x))
            return wrap01(base + 0.25 * sym)

        return MapFamily(branches=_eval, nsymbols=4, contraction_rate=0.5)

    @staticmethod
    def single(fn: Callable, contraction_rate: Optional[float] = None) -> "MapFamily":
        """Degenerate one-symbol family, handy in tests."""
        return MapFamily(
            branches=lambda sym, x: fn(np.asarray(x, dtype=np.float64)),
            nsymbols=1,
            contraction_rate=contraction_rate,
        )

    def check_contraction(self, grid: int = 200, rtol: float = 1e-12) -> float:
        """Largest observed d(f(x),f(y))/d(x,y) over a grid; raises if it
        exceeds the declared rate."""
        if self.contraction_rate is None:
            raise ValueError("family declares no contraction rate")
        xs = np.linspace(0.0, 1.0, grid, endpoint=False)
        X, Y = np.meshgrid(xs, xs)
        mask = circle_dist(X, Y) > 0
        worst = 0.0
        for s in range(self.nsymbols):
            fx = self.eval(s, X)
            fy = self.eval(s, Y)
            ratio = circle_dist(fx, fy)[mask] / circle_dist(X, Y)[mask]
            worst = max(worst, float(ratio.max()))
        if worst > self.contraction_rate * (1.0 + rtol):
            raise ValueError(
                f"measured contraction ratio {worst} exceeds declared "
                f"{self.contraction_rate}"
            )
        return worst


# ---------------------------------------------------------------------------
# couplings
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Coupling:
    """Pairwise interaction h_s(x, y) with author-declared norm bounds.

    ``sup_norm`` bounds |h|, ``lip_norm`` the per-variable Lipschitz
    constant, ``c4_norm`` the C^4 norm (largest sup-norm among partial
    derivatives up to total order 4).  The bounds are audited on grids, not
    derived symbolically.

    When the coupling is separable, h_s(x, y) = u(y) + v(x) + c(s), the
    ``u``/``v``/``c`` callables enable O(N + E) aggregated stepping.
    """

    evaluator: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]
    nsymbols: int
    sup_norm: float
    lip_norm: float
    c4_norm: float
    u: Optional[Callable] = None
    v: Optional[Callable] = None
    c: Optional[Callable] = None

    @property
    def separable(self) -> bool:
        return self.u is not None and self.v is not None and self.c is not None

    def eval(self, symbol, x, y):
        sym = np.asarray(symbol)
        if np.any(sym < 0) or np.any(sym >= self.nsymbols):
            raise ValueError(f"symbol out of range [0, {self.nsymbols})")
        return self.evaluator(sym, np.asarray(x, np.float64), np.asarray(y, np.float64))

    @staticmethod
    def sine_exchange() -> "Coupling":
        """h_s(x, y) = sin(2 pi y) - sin(2 pi x) - s/3.6, s = 0..3.

        sup |h| = 2 + 3/3.6 = 17/6; per-variable Lipschitz constant 2 pi;
        C^4 norm dominated by the fourth derivative (2 pi)^4.
        """

        def _eval(sym, x, y):
            return np.sin(TWO_PI * y) - np.sin(TWO_PI * x) - sym / 3.6

        return Coupling(
            evaluator=_eval,
            nsymbols=4,
            sup_norm=17.0 / 6.0,
            lip_norm=TWO_PI,
            c4_norm=TWO_PI ** 4 + 17.0 / 6.0,
            u=lambda y: np.sin(TWO_PI * y),
            v=lambda x: -np.sin(TWO_PI * x),
            c=lambda sym: -np.asarray(sym, np.float64) / 3.6,
        )

    def audit(self, grid: int = 400, tol: float = 1e-9) -> None:
        """Grid check of the declared sup and Lipschitz bounds."""
        xs = np.linspace(0.0, 1.0, grid, endpoint=False)
        X, Y = np.meshgrid(xs, xs)
        step = 1.0 / grid
        for s in range(self.nsymbols):
            H = self.eval(s, X, Y)
            if float(np.abs(H).max()) > self.sup_norm + tol:
                raise ValueError(f"sup bound violated for symbol {s}")
            gx = np.abs(np.diff(H, axis=1)) / step
            gy = np.abs(np.diff(H, axis=0)) / step
            measured = max(float(gx.max()), float(gy.max()))
            if measured > self.lip_norm + tol:
                raise ValueError(f"Lipschitz bound violated for symbol {s}")
            if self.separable:
                sep = self.u(Y) + self.v(X) + self.c(np.asarray(s))
                if float(np.abs(H - sep).max()) > 1e-12:
                    raise ValueError(f"separable parts disagree for symbol {s}")


# ---------------------------------------------------------------------------
# stationary measures
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StationaryMeasure:
    """Either the analytic Lebesgue measure on [0,1) or an empirical sample."""

    samples: Optional[np.ndarray] = None

    @property
    def is_lebesgue(self) -> bool:
        return self.samples is None

    @staticmethod
    def lebesgue() -> "StationaryMeasure":
        return StationaryMeasure(samples=None)

    @staticmethod
    def empirical(samples: Sequence[float]) -> "StationaryMeasure":
        arr = np.asarray(samples, dtype=np.float64)
        if arr.size == 0:
            raise ValueError("empirical measure needs at least one sample")
        return StationaryMeasure(samples=arr)

    def mean(self, fn: Callable[[np.ndarray], np.ndarray]) -> float:
        """Integral of ``fn`` against the measure (adaptive quadrature for
        Lebesgue, sample average otherwise)."""
        if self.is_lebesgue:
            val, _ = integrate.quad(fn, 0.0, 1.0, epsabs=1e-12, limit=200)
            return val
        return float(np.mean(fn(self.samples)))


def coupling_mean(coupling: Coupling, symbol, z, measure: StationaryMeasure):
    """Average of h_s(z, .) in its second argument against the measure.

    Vectorized over ``z`` for separable couplings; scalar quadrature
    otherwise.
    """
    if coupling.separable:
        u_bar = measure.mean(coupling.u)
        out = u_bar + coupling.v(np.asarray(z, np.float64)) + coupling.c(np.asarray(symbol))
        if np.ndim(out) == 0:
            return float(out)
        return out
    z = float(z)
    return measure.mean(lambda y: coupling.eval(symbol, z, y))


# ---------------------------------------------------------------------------
# reduced maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReducedMap:
    """One-dimensional mean-field approximation of a hub.

    Evaluates f_s(z) + alpha_eff * mean_y h_s(z, y) mod 1.  For a hub of
    degree k with star-like index nu, ``alpha_eff`` is alpha * nu * k /
    max_degree; for the star it is alpha itself.
    """

    family: MapFamily
    coupling: Coupling
    alpha_eff: float
    measure: StationaryMeasure = field(default_factory=StationaryMeasure.lebesgue)

    def eval(self, symbol, z):
        base = self.family.eval(symbol, z)
        if self.alpha_eff == 0.0:
            return base
        return wrap01(base + self.alpha_eff * coupling_mean(self.coupling, symbol, z, self.measure))


@dataclass(frozen=True)
class FixedPoint:
    z: float
    derivative: float
    stable: Optional[bool]  # None when |derivative| is within 1e-6 of 1


@dataclass(frozen=True)
class FixedPointReport:
    fixed_points: tuple
    trapping_region: Optional[tuple]


def _displacement(rm: ReducedMap, symbol: int, z):
    return circle_signed_diff(rm.eval(symbol, z), z)


def reduced_fixed_points(
    rm: ReducedMap, symbol: int, grid: int = 10_000, tol: float = 1e-10
) -> FixedPointReport:
    """All fixed points of z -> rm(z) for one symbol.

    Sign changes of the circle displacement on a grid are refined by
    bisection; stability comes from a centered finite-difference derivative.
    Grid cells whose endpoint displacements straddle the +-1/2 wrap are not
    roots and are skipped.
    """
    zs = np.linspace(0.0, 1.0, grid, endpoint=False)
    disp = _displacement(rm, symbol, zs)
    points = []
    for i in range(grid):
        j = (i + 1) % grid
        a, b = disp[i], disp[j]
        if a == 0.0:
            points.append(float(zs[i]))
            continue
        if a * b < 0.0 and abs(a) + abs(b) < 0.5:
            lo, hi = float(zs[i]), float(zs[i]) + 1.0 / grid
            root = optimize.brentq(
                lambda z: _displacement(rm, symbol, wrap01(np.float64(z))),
                lo,
                hi,
                xtol=tol,
            )
            points.append(wrap01(np.float64(root)))
    fps = []
    h = 1e-6
    for z in points:
        d = circle_signed_diff(
            rm.eval(symbol, wrap01(np.float64(z + h))),
            rm.eval(symbol, wrap01(np.float64(z - h))),
        ) / (2.0 * h)
        if abs(abs(d) - 1.0) <= 1e-6:
            stable = None
        else:
            stable = bool(abs(d) < 1.0)
        fps.append(FixedPoint(z=float(z), derivative=float(d), stable=stable))
    trap = None
    stable_fps = [fp for fp in fps if fp.stable]
    if stable_fps:
        trap = trapping_region(rm, anchor=stable_fps[0].z)
    return FixedPointReport(fixed_points=tuple(fps), trapping_region=trap)


def _max_abs_derivative(rm: ReducedMap, zs: np.ndarray) -> np.ndarray:
    h = 1e-6
    worst = np.zeros_like(zs)
    for s in range(rm.family.nsymbols):
        d = circle_signed_diff(rm.eval(s, wrap01(zs + h)), rm.eval(s, wrap01(zs - h))) / (2 * h)
        worst = np.maximum(worst, np.abs(d))
    return worst


def trapping_region(
    rm: ReducedMap, anchor: float, grid: int = 10_000, samples: int = 10_000
) -> Optional[tuple]:
    """Maximal interval around ``anchor`` that is uniformly contracting and
    forward-invariant under every symbol branch.

    Contraction means |derivative| < 1 on the whole interval (checked on the
    scan grid); invariance is verified by dense sampling.  Returns (z-, z+)
    as an arc on the circle, or None.
    """
    zs = np.arange(grid) / grid
    ok = _max_abs_derivative(rm, zs) < 1.0
    i0 = int(round(anchor * grid)) % grid
    if not ok[i0]:
        return None
    if ok.all():
        lo_i, hi_i = 0, grid - 1
    else:
        lo_i = i0
        while ok[(lo_i - 1) % grid] and (lo_i - 1) % grid != i0:
            lo_i = (lo_i - 1) % grid
        hi_i = i0
        while ok[(hi_i + 1) % grid] and (hi_i + 1) % grid != i0:
            hi_i = (hi_i + 1) % grid

    def _invariant(lo: float, hi: float) -> bool:
        pts = wrap01(lo + (wrap01(hi - lo) if hi != lo else 1.0) * np.arange(samples) / samples)
        span = wrap01(hi - lo)
        for s in range(rm.family.nsymbols):
            img = wrap01(rm.eval(s, pts) - lo)
            if np.any(img > span):
                return False
        return True

    lo = lo_i / grid
    hi = hi_i / grid
    # shrink toward the anchor until forward invariance holds
    step = 1.0 / grid
    for _ in range(grid):
        if wrap01(hi - lo) < 2 * step:
            return None
        if _invariant(lo, hi):
            return (float(lo), float(hi))
        if circle_dist(lo, anchor) > circle_dist(hi, anchor):
            lo = wrap01(lo + step)
        else:
            hi = wrap01(hi - step)
    return None


# ---------------------------------------------------------------------------
# stationary sampling via the coding map
# ---------------------------------------------------------------------------

def stationary_sampler(
    family: MapFamily,
    oracle,
    depth: int,
    count: int,
    anchor: float = 0.0,
) -> StationaryMeasure:
    """Empirical stationary measure from truncated backward compositions.

    Sample s is f_{w(s,0)} o f_{w(s,1)} o ... o f_{w(s,depth-1)}(anchor)
    with a fresh noise word per sample, so the truncation error against the
    exact backward limit is at most lambda^depth * diam/2.
    """
    if family.contraction_rate is None or family.contraction_rate >= 1.0:
        raise ValueError("stationary sampling requires a uniform contraction family")
    x = np.full(count, anchor, dtype=np.float64)
    nodes = np.arange(count, dtype=np.uint64)
    for d in range(depth - 1, -1, -1):
        sym = oracle.symbol(nodes, d)
        x = family.eval(sym, x)
    return StationaryMeasure.empirical(x)


# ---------------------------------------------------------------------------
# Fourier tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FourierTable:
    """Fourier coefficients a[(n1, n2)] of a coupling branch, |n| <= cap."""

    mode_cap: int
    coeffs: np.ndarray  # shape (2*cap+1, 2*cap+1), index [n1+cap, n2+cap]

    def coeff(self, n1: int, n2: int) -> complex:
        cap = self.mode_cap
        if abs(n1) > cap or abs(n2) > cap:
            raise IndexError("mode outside table")
        return complex(self.coeffs[n1 + cap, n2 + cap])

    def reconstruct(self, x, y):
        """Evaluate the truncated Fourier series at (x, y)."""
        cap = self.mode_cap
        x = np.asarray(x, np.float64)
        y = np.asarray(y, np.float64)
        out = np.zeros(np.broadcast(x, y).shape, dtype=np.complex128)
        for n1 in range(-cap, cap + 1):
            for n2 in range(-cap, cap + 1):
                a = self.coeffs[n1 + cap, n2 + cap]
                if a != 0.0:
                    out = out + a * np.exp(2j * math.pi * (n1 * x + n2 * y))
        return out.real if out.ndim else float(out.real)

    def to_csv(self, path: str) -> None:
        cap = self.mode_cap
        lines = ["n1,n2,re,im"]
        for n1 in range(-cap, cap + 1):
            for n2 in range(-cap, cap + 1):
                a = self.coeffs[n1 + cap, n2 + cap]
                lines.append(f"{n1},{n2},{a.real:.17g},{a.imag:.17g}")
        with open(path, "w", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")


def fourier_coeffs(coupling: Coupling, symbol: int, mode_cap: int) -> FourierTable:
    """Coefficients by FFT on a 16*mode_cap periodic grid, with the decay
    inequalities of smooth functions checked against the declared C^4 norm.
    """
    if mode_cap < 1:
        raise ValueError("mode_cap must be >= 1")
    n = 16 * mode_cap
    xs = np.arange(n) / n
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    H = coupling.eval(symbol, X, Y)
    A = np.fft.fft2(H) / (n * n)
    cap = mode_cap
    table = np.zeros((2 * cap + 1, 2 * cap + 1), dtype=np.complex128)
    for n1 in range(-cap, cap + 1):
        for n2 in range(-cap, cap + 1):
            table[n1 + cap, n2 + cap] = A[n1 % n, n2 % n]
    # decay audit: (2 pi)^(m1+m2) |n1|^m1 |n2|^m2 |a| <= C4 norm
    tol = 1e-6
    for n1 in range(-cap, cap + 1):
        for n2 in range(-cap, cap + 1):
            a = abs(table[n1 + cap, n2 + cap])
            for m1 in range(5):
                for m2 in range(5 - m1):
                    bound = (TWO_PI ** (m1 + m2)) * (abs(n1) ** m1) * (abs(n2) ** m2) * a
                    if bound > coupling.c4_norm + tol:
                        raise ValueError(
                            f"declared C4 norm {coupling.c4_norm} inconsistent with "
                            f"measured coefficient at mode ({n1},{n2})"
                        )
    return FourierTable(mode_cap=cap, coeffs=table)
