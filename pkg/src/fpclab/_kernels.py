"""Numba inner loops: xoshiro256++ streams, Metropolis sweeps, Wolff clusters.

All kernels are nopython, nogil, and cached.  RNG state is a uint64[4]
array mutated in place; every uint64 operation wraps modulo 2^64, which
is exactly the xoshiro arithmetic.  Kernels never allocate; callers own
all buffers, which keeps replica runs independent and thread-safe.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_U11 = np.uint64(11)
_U17 = np.uint64(17)
_U23 = np.uint64(23)
_U45 = np.uint64(45)
_U64 = np.uint64(64)
_DNORM = 1.0 / 9007199254740992.0  # 2^-53: top 53 bits to a double in [0,1)


@njit(cache=True, nogil=True)
def _next_double(s):
    """xoshiro256++ step; returns a uniform double in [0, 1)."""
    s0 = s[0]
    s1 = s[1]
    s2 = s[2]
    s3 = s[3]
    x = s0 + s3
    out = ((x << _U23) | (x >> (_U64 - _U23))) + s0
    t = s1 << _U17
    s2 ^= s0
    s3 ^= s1
    s1 ^= s2
    s0 ^= s3
    s2 ^= t
    s3 = (s3 << _U45) | (s3 >> (_U64 - _U45))
    s[0] = s0
    s[1] = s1
    s[2] = s2
    s[3] = s3
    return np.float64(out >> _U11) * _DNORM


@njit(cache=True, nogil=True)
def random_signs_kernel(values, state):
    """Fill values with fair +-1 draws from the stream (hot start)."""
    for j in range(values.size):
        if _next_double(state) < 0.5:
            values[j] = 1
        else:
            values[j] = -1


@njit(cache=True, nogil=True)
def metropolis_sweep_kernel(values, sigma, ks, spin_ints, spin_ptr, perm, state):
    """One sweep: one attempted flip per spin, in a fresh random order.

    A deterministic spin order is not ergodic here: ties (zero net local
    field) are accepted with probability one, and on uniform-coupling
    models the resulting domain-wall cascades trap the post-sweep states
    in a strict subset of configurations.  Reshuffling the attempt order
    each sweep restores irreducibility while keeping one attempt per spin
    and the min(1, exp(-dK)) acceptance rule.

    sigma caches the product of values over each interaction support and
    is kept consistent incrementally.  Returns the number of accepted
    flips.  Zero-coupling models accept every flip.
    """
    n = values.size
    for i in range(n - 1, 0, -1):
        j = int(_next_double(state) * (i + 1))
        if j > i:
            j = i
        tmp = perm[i]
        perm[i] = perm[j]
        perm[j] = tmp
    accepted = 0
    for idx in range(n):
        j = perm[idx]
        delta = 0.0
        for p in range(spin_ptr[j], spin_ptr[j + 1]):
            b = spin_ints[p]
            delta += ks[b] * sigma[b]
        dlog = -2.0 * delta
        ok = dlog >= 0.0
        if not ok:
            ok = _next_double(state) < np.exp(dlog)
        if ok:
            values[j] = -values[j]
            for p in range(spin_ptr[j], spin_ptr[j + 1]):
                b = spin_ints[p]
                sigma[b] = -sigma[b]
            accepted += 1
    return accepted


@njit(cache=True, nogil=True)
def _measure(values, sigma, js, out_m, out_e, idx):
    n = values.size
    total = 0
    for j in range(n):
        total += values[j]
    e = 0.0
    for b in range(js.size):
        e += js[b] * sigma[b]
    out_m[idx] = total / n
    out_e[idx] = -e / n


@njit(cache=True, nogil=True)
def metropolis_run_kernel(values, sigma, ks, js, spin_ints, spin_ptr, perm,
                          burn_in, measurements, stride, state, out_m, out_e):
    """Burn-in sweeps, then `measurements` records taken every `stride`
    sweeps: per-spin magnetization and energy -sum(J_B sigma_B)/n."""
    for _ in range(burn_in):
        metropolis_sweep_kernel(values, sigma, ks, spin_ints, spin_ptr, perm, state)
    for i in range(measurements):
        for _ in range(stride):
            metropolis_sweep_kernel(values, sigma, ks, spin_ints, spin_ptr, perm, state)
        _measure(values, sigma, js, out_m, out_e, i)


@njit(cache=True, nogil=True)
def wolff_update_kernel(values, nbr_spin, nbr_bond, nbr_ptr, p_add, state, stack):
    """One Wolff cluster update on a 2-body model; returns cluster size.

    Spins are flipped as they join, so the values[v] == old test doubles
    as the visited check while still letting failed bonds retry through
    other neighbors.
    """
    n = values.size
    seed = int(_next_double(state) * n)
    if seed >= n:
        seed = n - 1
    old = values[seed]
    values[seed] = -old
    stack[0] = seed
    top = 1
    size = 0
    while top > 0:
        top -= 1
        u = stack[top]
        size += 1
        for p in range(nbr_ptr[u], nbr_ptr[u + 1]):
            v = nbr_spin[p]
            if values[v] == old:
                if _next_double(state) < p_add[nbr_bond[p]]:
                    values[v] = -old
                    stack[top] = v
                    top += 1
    return size


@njit(cache=True, nogil=True)
def wolff_run_kernel(values, nbr_spin, nbr_bond, nbr_ptr, p_add,
                     js, bond_u, bond_v,
                     burn_in, measurements, stride, state, out_m, out_e, stack):
    """Burn-in cluster updates, then records every `stride` updates."""
    n = values.size
    for _ in range(burn_in):
        wolff_update_kernel(values, nbr_spin, nbr_bond, nbr_ptr, p_add, state, stack)
    for i in range(measurements):
        for _ in range(stride):
            wolff_update_kernel(values, nbr_spin, nbr_bond, nbr_ptr, p_add, state, stack)
        total = 0
        for j in range(n):
            total += values[j]
        e = 0.0
        for b in range(js.size):
            e += js[b] * values[bond_u[b]] * values[bond_v[b]]
        out_m[i] = total / n
        out_e[i] = -e / n
