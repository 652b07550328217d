"""Numba kernels for the performance-critical inner loops.

The 64-bit mixing functions mirror :mod:`hubnet.noise` operation for
operation so that kernel-generated noise is bit-identical to the vectorized
numpy path.  Star-network stepping is O(N) per step via the separable form
of the sine-exchange coupling.
"""

from __future__ import annotations

import numba as nb
import numpy as np
from numba import njit

_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_KNODE = np.uint64(0x9E3779B97F4A7C15)
_KTIME = np.uint64(0xD1B54A32D192ED03)
_TAG_DERIVE = np.uint64(0x8CB92BA72F3D8DD7)
_TAG_INIT = np.uint64(0x2545F4914F6CDD1D)
_INV_2_53 = 1.0 / 9007199254740992.0
_TWO_PI = 2.0 * np.pi


@njit(nb.uint64(nb.uint64), cache=True, inline="always")
def mix64(z):
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


@njit(nb.float64(nb.uint64, nb.uint64, nb.uint64), cache=True, inline="always")
def uniform(seed, node, time):
    inner = mix64(seed + _KNODE * node)
    z = mix64(inner + _KTIME * time)
    return np.float64(z >> np.uint64(11)) * _INV_2_53


@njit(nb.float64(nb.uint64, nb.uint64), cache=True, inline="always")
def init_uniform(seed, node):
    s = seed ^ _TAG_INIT
    z = mix64(mix64(s + _KNODE * node) + _TAG_DERIVE)
    return np.float64(z >> np.uint64(11)) * _INV_2_53


@njit(nb.uint64(nb.uint64, nb.uint64), cache=True, inline="always")
def derive_seed(seed, tag):
    return mix64(mix64(seed + _TAG_DERIVE) + _KNODE * tag)


@njit(nb.int64(nb.float64[:], nb.float64), cache=True, inline="always")
def symbol_from_uniform(cum, u):
    for s in range(cum.shape[0]):
        if u < cum[s]:
            return s
    return cum.shape[0] - 1


@njit(nb.int64(nb.uint64, nb.uint64, nb.uint64, nb.float64[:]), cache=True, inline="always")
def symbol(seed, node, time, cum):
    return symbol_from_uniform(cum, uniform(seed, node, time))


@njit(nb.float64(nb.float64, nb.int64), cache=True, inline="always")
def tent_map(x, sym):
    if x <= 0.5:
        base = 0.5 * x
    else:
        base = 0.5 * (1.0 - x)
    y = base + 0.25 * sym
    return y - np.floor(y)


@njit(nb.float64(nb.float64), cache=True, inline="always")
def wrap01(v):
    return v - np.floor(v)


# ---------------------------------------------------------------------------
# star network: hub = node 0, low-degree nodes = 1..L
# ---------------------------------------------------------------------------

@njit(cache=True)
def star_init(seed, n):
    seed = np.uint64(seed)
    x = np.empty(n, dtype=np.float64)
    for i in range(n):
        x[i] = init_uniform(seed, np.uint64(i))
    return x


@njit(cache=True)
def star_run(seed, L, alpha, steps, transient, cum, x):
    """Iterate the star for `steps` steps from state ``x`` (length L+1).

    Returns (z_trace, xi_trace): hub states z^t for t = transient..steps and
    fluctuations xi^t = (alpha/L) sum_j sin(2 pi x_j^t) for the same t.
    The state array is updated in place (double-buffered internally).
    """
    n = L + 1
    seed = np.uint64(seed)
    nrec = steps - transient + 1
    z_trace = np.empty(nrec, dtype=np.float64)
    xi_trace = np.empty(nrec, dtype=np.float64)
    xnew = np.empty(n, dtype=np.float64)
    sins = np.empty(n, dtype=np.float64)
    for t in range(steps):
        z = x[0]
        sinz = np.sin(_TWO_PI * z)
        ssum = 0.0
        for j in range(1, n):
            sins[j] = np.sin(_TWO_PI * x[j])
            ssum += sins[j]
        if t >= transient:
            z_trace[t - transient] = z
            xi_trace[t - transient] = alpha / L * ssum
        s_hub = symbol(seed, np.uint64(0), np.uint64(t), cum)
        xnew[0] = wrap01(
            tent_map(z, s_hub)
            + alpha / L * (ssum + L * (-sinz - s_hub / 3.6))
        )
        for j in range(1, n):
            s_j = symbol(seed, np.uint64(j), np.uint64(t), cum)
            hval = sinz - sins[j] - s_j / 3.6
            xnew[j] = wrap01(tent_map(x[j], s_j) + alpha / L * hval)
        x[:] = xnew
    z = x[0]
    ssum = 0.0
    for j in range(1, n):
        ssum += np.sin(_TWO_PI * x[j])
    z_trace[nrec - 1] = z
    xi_trace[nrec - 1] = alpha / L * ssum
    return z_trace, xi_trace


@njit(cache=True, parallel=True)
def star_terminal_fluctuations(seed, L, alpha, steps, trials, cum):
    """Terminal fluctuation xi^T for `trials` independent initial conditions.

    Each trial runs on its own derived noise stream; trial outputs occupy
    disjoint slots, so the result is deterministic for any thread count.
    """
    out = np.empty(trials, dtype=np.float64)
    for tr in nb.prange(trials):
        sub = derive_seed(np.uint64(seed), np.uint64(tr))
        x = star_init(sub, L + 1)
        _, xi = star_run(sub, L, alpha, steps, steps, cum, x)
        out[tr] = xi[0]
    return out


@njit(cache=True)
def star_shadowing(seed, L, alpha, steps, cum):
    """Coupled vs decoupled star from one initial state and noise stream.

    Returns the per-low-degree-node sup circle distance over all steps.
    """
    n = L + 1
    seed = np.uint64(seed)
    x = star_init(seed, n)
    y = x.copy()
    sup = np.zeros(n, dtype=np.float64)
    xnew = np.empty(n, dtype=np.float64)
    ynew = np.empty(n, dtype=np.float64)
    sins = np.empty(n, dtype=np.float64)
    for t in range(steps):
        z = x[0]
        sinz = np.sin(_TWO_PI * z)
        ssum = 0.0
        for j in range(1, n):
            sins[j] = np.sin(_TWO_PI * x[j])
            ssum += sins[j]
        s_hub = symbol(seed, np.uint64(0), np.uint64(t), cum)
        xnew[0] = wrap01(tent_map(z, s_hub) + alpha / L * (ssum + L * (-sinz - s_hub / 3.6)))
        ynew[0] = tent_map(y[0], s_hub)
        for j in range(1, n):
            s_j = symbol(seed, np.uint64(j), np.uint64(t), cum)
            hval = sinz - sins[j] - s_j / 3.6
            xnew[j] = wrap01(tent_map(x[j], s_j) + alpha / L * hval)
            ynew[j] = tent_map(y[j], s_j)
        x[:] = xnew
        y[:] = ynew
        for j in range(n):
            d = abs(x[j] - y[j])
            if d > 0.5:
                d = 1.0 - d
            if d > sup[j]:
                sup[j] = d
    return sup


@njit(cache=True)
def random_orbit(seed, node, x0, steps, cum):
    """Decoupled tent-family orbit of one node; returns the full trajectory."""
    seed = np.uint64(seed)
    traj = np.empty(steps + 1, dtype=np.float64)
    traj[0] = x0
    x = x0
    for t in range(steps):
        s = symbol(seed, np.uint64(node), np.uint64(t), cum)
        x = tent_map(x, s)
        traj[t + 1] = x
    return traj


# ---------------------------------------------------------------------------
# Chung-Lu sampling (Miller-Hagberg skip sampling over sorted weights)
# ---------------------------------------------------------------------------

@njit(cache=True)
def chung_lu_edges(w, seed):
    """Edge list of a Chung-Lu graph in expected O(n + E) time.

    Weights must be non-increasing.  Pair {i, j} (i < j) is included with
    probability min(1, w_i w_j / S).  Randomness is counter-based per source
    node, so the edge set is a pure function of (weights, seed).
    """
    n = w.shape[0]
    S = 0.0
    for i in range(n):
        S += w[i]
    cap = max(16, int(S) + 8 * int(np.sqrt(S) + 64.0))
    src = np.empty(cap, dtype=np.int64)
    dst = np.empty(cap, dtype=np.int64)
    cnt = 0
    seed = np.uint64(seed)
    for i in range(n - 1):
        if w[i] <= 0.0:
            break
        node_key = np.uint64(i)
        ctr = np.uint64(0)
        v = i + 1
        p = w[i] * w[v] / S
        if p > 1.0:
            p = 1.0
        while v < n and p > 0.0:
            if p < 1.0:
                r = uniform(seed, node_key, ctr)
                ctr += np.uint64(1)
                if r <= 0.0:
                    r = _INV_2_53
                skip = int(np.log(r) / np.log(1.0 - p))
                v += skip
            if v < n:
                q = w[i] * w[v] / S
                if q > 1.0:
                    q = 1.0
                r = uniform(seed, node_key, ctr)
                ctr += np.uint64(1)
                if r < q / p:
                    if cnt == cap:
                        cap = cap * 2
                        src2 = np.empty(cap, dtype=np.int64)
                        dst2 = np.empty(cap, dtype=np.int64)
                        src2[:cnt] = src[:cnt]
                        dst2[:cnt] = dst[:cnt]
                        src = src2
                        dst = dst2
                    src[cnt] = i
                    dst[cnt] = v
                    cnt += 1
                p = q
                v += 1
    return src[:cnt].copy(), dst[:cnt].copy()
