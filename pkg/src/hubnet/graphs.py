"""Chung-Lu power-law graphs and star-like structure analysis.

A graph is stored as a symmetric compressed-sparse-row structure.  The
Chung-Lu sampler connects each pair {i, j} independently with probability
min(1, w_i w_j / sum_k w_k); the default generator uses sorted-weight skip
sampling so million-node instances take seconds, with a naive O(n^2)
reference sampler retained for cross-validation at small n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

from . import _kernels
from .noise import NoiseOracle

__all__ = [
    "ChungLuParams",
    "WeightSequence",
    "Graph",
    "StarLikeReport",
    "expected_weights",
    "sample_chung_lu",
    "giant_component",
    "star_like_report",
    "degree_concentration",
    "hub_scales",
]


# ---------------------------------------------------------------------------
# weights
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChungLuParams:
    """Power-law expected-degree parameters: ``beta`` is the exponent,
    ``mean_w`` the average and ``max_w`` the largest expected degree."""

    n: int
    beta: float
    mean_w: float
    max_w: float

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need at least two nodes")
        if self.beta <= 2.0:
            raise ValueError("power-law exponent must exceed 2")
        if not (0.0 < self.mean_w <= self.max_w <= self.n):
            raise ValueError("require 0 < mean_w <= max_w <= n")


@dataclass(frozen=True)
class WeightSequence:
    """Non-increasing positive expected degrees w_1 >= ... >= w_n."""

    w: np.ndarray

    def __post_init__(self):
        w = self.w
        if w.ndim != 1 or w.size < 2:
            raise ValueError("weight sequence must be 1-d with n >= 2")
        if np.any(np.diff(w) > 1e-12):
            raise ValueError("weights must be non-increasing")
        if np.any(w < 0.0):
            raise ValueError("weights must be non-negative")

    @property
    def n(self) -> int:
        return self.w.size

    @property
    def total(self) -> float:
        return float(self.w.sum())

    @property
    def max_w(self) -> float:
        return float(self.w[0])

    def all_probs_valid(self) -> bool:
        """True when max_w^2 < sum w, i.e. no edge probability needs capping."""
        return self.max_w ** 2 < self.total


def expected_weights(params: ChungLuParams) -> WeightSequence:
    """Power-law expected degree sequence.

    w_i = ((b-2)/(b-1)) w n^{1/(b-1)} [n ((w(b-2))/(m(b-1)))^{b-1} + i - 1]^{-1/(b-1)}
    with b the exponent, w the mean and m the largest expected degree; the
    bracket collapses at i = 1 so that w_1 = m exactly.
    """
    n, b, w, m = params.n, params.beta, params.mean_w, params.max_w
    i0 = n * (w * (b - 2.0) / (m * (b - 1.0))) ** (b - 1.0)
    idx = np.arange(n, dtype=np.float64)
    weights = ((b - 2.0) / (b - 1.0)) * w * n ** (1.0 / (b - 1.0)) * (i0 + idx) ** (
        -1.0 / (b - 1.0)
    )
    weights[0] = m  # exact by construction; avoids roundoff in the bracket
    return WeightSequence(w=weights)


def hub_scales(params: ChungLuParams) -> tuple[int, int]:
    """Default (hub, low-degree) scales Delta = 0.9 m and delta = m^(2/3),
    matching the reference instance (m = 1000 -> Delta = 900, delta = 100)."""
    return int(round(0.9 * params.max_w)), int(round(params.max_w ** (2.0 / 3.0)))


# ---------------------------------------------------------------------------
# graphs
# ---------------------------------------------------------------------------

class Graph:
    """Undirected simple graph in CSR form (symmetric, zero diagonal)."""

    def __init__(self, n: int, indptr: np.ndarray, indices: np.ndarray):
        self.n = int(n)
        self.indptr = indptr
        self.indices = indices
        self.degrees = np.diff(indptr).astype(np.int64)

    @property
    def n_edges(self) -> int:
        return self.indices.size // 2

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.n else 0

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def csr(self, dtype=np.float64) -> sp.csr_matrix:
        data = np.ones(self.indices.size, dtype=dtype)
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    # -- constructors ----------------------------------------------------

    @staticmethod
    def from_edges(n: int, src: np.ndarray, dst: np.ndarray) -> "Graph":
        """Build from an i < j edge list; symmetrizes and validates."""
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        if np.any(src == dst):
            raise ValueError("self-loops are not allowed")
        if src.size and (src.min() < 0 or max(src.max(), dst.max()) >= n):
            raise ValueError("edge endpoint out of range")
        a = np.concatenate([src, dst])
        b = np.concatenate([dst, src])
        order = np.lexsort((b, a))
        a, b = a[order], b[order]
        if a.size:
            dup = (np.diff(a) == 0) & (np.diff(b) == 0)
            if np.any(dup):
                keep = np.concatenate([[True], ~dup])
                a, b = a[keep], b[keep]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, a + 1, 1)
        indptr = np.cumsum(indptr)
        return Graph(n, indptr, b)

    @staticmethod
    def star(leaves: int) -> "Graph":
        """Hub (node 0) connected to ``leaves`` degree-one nodes."""
        hub = np.zeros(leaves, dtype=np.int64)
        leaf = np.arange(1, leaves + 1, dtype=np.int64)
        return Graph.from_edges(leaves + 1, hub, leaf)

    @staticmethod
    def complete(n: int) -> "Graph":
        iu = np.triu_indices(n, k=1)
        return Graph.from_edges(n, iu[0], iu[1])

    # -- file format -----------------------------------------------------

    def save(self, path: str) -> None:
        """Text format: header "n m" then m lines "i j" with 0-based i < j."""
        mask = np.repeat(np.arange(self.n), self.degrees) < self.indices
        srcs = np.repeat(np.arange(self.n), self.degrees)[mask]
        dsts = self.indices[mask]
        with open(path, "w", newline="\n") as fh:
            fh.write(f"{self.n} {srcs.size}\n")
            for i, j in zip(srcs, dsts):
                fh.write(f"{i} {j}\n")

    @staticmethod
    def load(path: str) -> "Graph":
        with open(path) as fh:
            header = fh.readline().split()
            if len(header) != 2:
                raise ValueError("bad graph header, expected 'n m'")
            n, m = int(header[0]), int(header[1])
            src = np.empty(m, dtype=np.int64)
            dst = np.empty(m, dtype=np.int64)
            for k in range(m):
                parts = fh.readline().split()
                i, j = int(parts[0]), int(parts[1])
                if i == j:
                    raise ValueError(f"self-loop at line {k + 2}")
                if not i < j:
                    raise ValueError(f"expected i < j at line {k + 2}")
                src[k], dst[k] = i, j
        return Graph.from_edges(n, src, dst)

    def edge_set(self) -> set:
        mask = np.repeat(np.arange(self.n), self.degrees) < self.indices
        srcs = np.repeat(np.arange(self.n), self.degrees)[mask]
        return set(zip(srcs.tolist(), self.indices[mask].tolist()))


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def sample_chung_lu(weights: WeightSequence, seed: int, method: str = "skip") -> Graph:
    """Sample a Chung-Lu graph from the weight sequence.

    ``method="skip"`` is the O(n + E) geometric-skip sampler; ``"naive"``
    is the direct O(n^2) Bernoulli sweep (limited to n <= 2000), kept as a
    cross-validation oracle.  Edge probabilities are capped at 1 when
    w_i w_j exceeds the total weight.
    """
    w = weights.w
    if method == "skip":
        src, dst = _kernels.chung_lu_edges(w, np.uint64(int(seed) & 0xFFFFFFFFFFFFFFFF))
        return Graph.from_edges(weights.n, src, dst)
    if method == "naive":
        n = weights.n
        if n > 2000:
            raise ValueError("naive sampler is limited to n <= 2000")
        S = weights.total
        oracle = NoiseOracle(seed)
        src, dst = [], []
        for i in range(n - 1):
            # same per-source counter-based stream as the skip sampler would
            # use, but consumed pairwise; seeds match only in distribution.
            us = oracle.uniform(np.full(n - 1 - i, i, dtype=np.uint64),
                                np.arange(i + 1, n, dtype=np.uint64))
            probs = np.minimum(w[i] * w[i + 1:] / S, 1.0)
            hit = us < probs
            js = np.nonzero(hit)[0] + i + 1
            src.extend([i] * js.size)
            dst.extend(js.tolist())
        return Graph.from_edges(n, np.array(src, dtype=np.int64), np.array(dst, dtype=np.int64))
    raise ValueError(f"unknown method {method!r}")


def giant_component(g: Graph) -> tuple[Graph, np.ndarray]:
    """Induced subgraph on the largest connected component.

    Returns (subgraph, index_map) where index_map[old] = new index or -1.
    Ties between equal-sized components go to the one containing the lowest
    original node index.
    """
    if g.n == 0:
        return g, np.empty(0, dtype=np.int64)
    ncomp, labels = csgraph.connected_components(g.csr(dtype=np.int8), directed=False)
    sizes = np.bincount(labels, minlength=ncomp)
    best = int(np.argmax(sizes))  # argmax tie -> lowest label -> lowest index
    keep = labels == best
    index_map = np.full(g.n, -1, dtype=np.int64)
    index_map[keep] = np.arange(int(keep.sum()))
    mask = np.repeat(np.arange(g.n), g.degrees) < g.indices
    srcs = np.repeat(np.arange(g.n), g.degrees)[mask]
    dsts = g.indices[mask]
    emask = keep[srcs] & keep[dsts]
    sub = Graph.from_edges(int(keep.sum()), index_map[srcs[emask]], index_map[dsts[emask]])
    return sub, index_map


# ---------------------------------------------------------------------------
# star-like classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StarLikeReport:
    """Hub / low-degree classification at scales (Delta, delta).

    ``nu_i[h]`` is the fraction of hub h's neighbors that are low degree;
    ``nu`` is the minimum over hubs (1.0, flagged, when there are none).
    """

    hub_scale: int
    ldn_scale: int
    hubs: np.ndarray
    ldns: np.ndarray
    nu_i: np.ndarray
    no_hubs: bool

    @property
    def n_hubs(self) -> int:
        return self.hubs.size

    @property
    def n_ldns(self) -> int:
        return self.ldns.size

    @property
    def nu(self) -> float:
        return 1.0 if self.no_hubs else float(self.nu_i.min())

    def nu_of(self, node: int) -> float:
        pos = np.searchsorted(self.hubs, node)
        if pos >= self.hubs.size or self.hubs[pos] != node:
            raise ValueError(f"node {node} is not a hub at scale {self.hub_scale}")
        return float(self.nu_i[pos])


def star_like_report(g: Graph, hub_scale: int, ldn_scale: int) -> StarLikeReport:
    """Classify hubs (degree >= Delta) and low-degree nodes (degree <= delta)
    and compute per-hub star-like indices."""
    if not (1 <= ldn_scale < hub_scale <= max(g.max_degree, 1)):
        raise ValueError("require 1 <= delta < Delta <= max degree")
    is_ldn = g.degrees <= ldn_scale
    hubs = np.nonzero(g.degrees >= hub_scale)[0]
    ldns = np.nonzero(is_ldn)[0]
    nu_i = np.empty(hubs.size, dtype=np.float64)
    for k, h in enumerate(hubs):
        nbrs = g.neighbors(h)
        nu_i[k] = float(is_ldn[nbrs].sum()) / nbrs.size
    return StarLikeReport(
        hub_scale=int(hub_scale),
        ldn_scale=int(ldn_scale),
        hubs=hubs,
        ldns=ldns,
        nu_i=nu_i,
        no_hubs=hubs.size == 0,
    )


def star_like_csv(g: Graph, report: StarLikeReport, path: str) -> None:
    is_hub = np.zeros(g.n, dtype=bool)
    is_hub[report.hubs] = True
    is_ldn = np.zeros(g.n, dtype=bool)
    is_ldn[report.ldns] = True
    nu_map = {int(h): report.nu_i[k] for k, h in enumerate(report.hubs)}
    with open(path, "w", newline="\n") as fh:
        fh.write("node,degree,is_hub,is_ldn,nu_i\n")
        for i in range(g.n):
            nu = f"{nu_map[i]:.17g}" if i in nu_map else ""
            fh.write(f"{i},{g.degrees[i]},{int(is_hub[i])},{int(is_ldn[i])},{nu}\n")


def degree_concentration(g: Graph, weights: WeightSequence):
    """Fraction of nodes with |k_i - w_i| <= 2 (sqrt(w_i log n) + log n).

    Returns (fraction, worst_node) where worst_node maximizes the excess
    over the bound (or -1 when every node satisfies it).
    """
    if g.n != weights.n:
        raise ValueError("graph and weight sequence disagree on n")
    logn = math.log(g.n)
    bound = 2.0 * (np.sqrt(weights.w * logn) + logn)
    dev = np.abs(g.degrees - weights.w)
    ok = dev <= bound
    frac = float(ok.mean())
    worst = int(np.argmax(dev - bound)) if not ok.all() else -1
    return frac, worst
