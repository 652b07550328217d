"""Counter-based noise source.

Every node draws one symbol from a finite alphabet at every time step.  The
draw is a pure function of ``(seed, node, time)``: a keyed 64-bit mixing
function produces a uniform variate which is pushed through the inverse CDF
of the alphabet weights.  Because any (node, time) cell is addressable in
O(1), a coupled run and its decoupled companion consume bit-identical noise,
and simulations are reproducible regardless of evaluation order or thread
count.
"""

from __future__ import annotations

import numpy as np

__all__ = ["NoiseOracle", "mix64", "derive_seed"]

# splitmix64 finalizer constants
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
# distinct odd multipliers keying the node and time coordinates
_KNODE = np.uint64(0x9E3779B97F4A7C15)
_KTIME = np.uint64(0xD1B54A32D192ED03)
# domain tags for derived substreams
_TAG_DERIVE = np.uint64(0x8CB92BA72F3D8DD7)
_TAG_INIT = np.uint64(0x2545F4914F6CDD1D)

_INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53


def mix64(z):
    """splitmix64 finalizer: full-avalanche bijection on uint64."""
    z = np.uint64(z) if np.isscalar(z) else z
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def derive_seed(seed, tag) -> int:
    """Derive an independent substream seed, e.g. one per Monte-Carlo trial."""
    s = np.uint64(seed & 0xFFFFFFFFFFFFFFFF)
    t = np.uint64(int(tag) & 0xFFFFFFFFFFFFFFFF)
    with np.errstate(over="ignore"):
        return int(mix64(mix64(s + _TAG_DERIVE) + _KNODE * t))


class NoiseOracle:
    """Addressable iid symbol source over nodes and time steps.

    Parameters
    ----------
    seed : int
        64-bit stream key.
    weights : sequence of float, optional
        Alphabet weights; non-negative, summing to 1 within 1e-12.
        Default is the uniform 4-symbol alphabet.
    """

    def __init__(self, seed: int, weights=(0.25, 0.25, 0.25, 0.25)):
        w = np.asarray(weights, dtype=np.float64)
        if w.ndim != 1 or w.size < 1:
            raise ValueError("weights must be a non-empty 1-d sequence")
        if np.any(w < 0.0):
            raise ValueError("weights must be non-negative")
        if abs(float(w.sum()) - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1 (got {w.sum()!r})")
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self.weights = w
        # Inverse CDF: symbol s covers [cum[s-1], cum[s]).  Zero-weight
        # symbols collapse their interval, so ties resolve to the lower index.
        cum = np.cumsum(w)
        cum[-1] = 1.0
        self.cum = cum

    @property
    def nsymbols(self) -> int:
        return self.weights.size

    # -- raw uniforms ----------------------------------------------------

    def _mix(self, node, time):
        s = np.uint64(self.seed)
        node = np.asarray(node, dtype=np.uint64)
        time = np.asarray(time, dtype=np.uint64)
        with np.errstate(over="ignore"):
            inner = mix64(s + _KNODE * node)
            return mix64(inner + _KTIME * time)

    def uniform(self, node, time):
        """Uniform [0,1) variate(s), pure in (seed, node, time)."""
        return (self._mix(node, time) >> np.uint64(11)).astype(np.float64) * _INV_2_53

    # -- symbols ---------------------------------------------------------

    def symbol(self, node, time):
        """Symbol(s) for the given node/time coordinates (broadcasting)."""
        u = self.uniform(node, time)
        return np.minimum(
            np.searchsorted(self.cum, u, side="right"), self.nsymbols - 1
        ).astype(np.int64)

    def symbol_at(self, node: int, time: int) -> int:
        """Scalar convenience wrapper around :meth:`symbol`."""
        if node < 0 or time < 0:
            raise ValueError("node and time must be non-negative")
        return int(self.symbol(node, time))

    def symbols(self, time: int, n: int) -> np.ndarray:
        """Symbols of all ``n`` nodes at one time step."""
        return self.symbol(np.arange(n, dtype=np.uint64), time)

    # -- derived streams -------------------------------------------------

    def uniform_states(self, n: int) -> np.ndarray:
        """Initial conditions: n iid Uniform[0,1) values from a dedicated
        substream of the seed (disjoint from the symbol stream)."""
        s = np.uint64(self.seed) ^ _TAG_INIT
        node = np.arange(n, dtype=np.uint64)
        with np.errstate(over="ignore"):
            z = mix64(mix64(s + _KNODE * node) + _TAG_DERIVE)
        return (z >> np.uint64(11)).astype(np.float64) * _INV_2_53

    def subseed(self, tag: int) -> int:
        """Seed of an independent derived stream (per trial, per worker...)."""
        return derive_seed(self.seed, tag)
