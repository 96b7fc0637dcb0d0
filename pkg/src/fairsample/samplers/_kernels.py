"""Compiled inner loops.  Spins are int8 +/-1 arrays indexed by bit position.

Every entry point reseeds numba's generator from an explicit ``seed`` so a
call is a pure function of its arguments.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def seed_numba(seed):
    np.random.seed(seed)


@njit(cache=True)
def energy(s, nbr, nbrJ, deg, h):
    e = 0.0
    for i in range(s.shape[0]):
        acc = 0.0
        for k in range(deg[i]):
            j = nbr[i, k]
            if j > i:
                acc += nbrJ[i, k] * s[j]
        e -= s[i] * acc + h[i] * s[i]
    return e


@njit(cache=True)
def local_field(s, i, nbr, nbrJ, deg, h):
    acc = h[i]
    for k in range(deg[i]):
        acc += nbrJ[i, k] * s[nbr[i, k]]
    return acc


@njit(cache=True)
def metropolis_sweep(s, nbr, nbrJ, deg, h, beta):
    """One sequential single-spin-flip sweep; returns the energy change."""
    de_total = 0.0
    for i in range(s.shape[0]):
        de = 2.0 * s[i] * local_field(s, i, nbr, nbrJ, deg, h)
        if de <= 0.0 or np.random.random() < np.exp(-beta * de):
            s[i] = -s[i]
            de_total += de
    return de_total


@njit(cache=True)
def anneal(s, nbr, nbrJ, deg, h, betas, sweeps_per_temp, seed, best):
    """Metropolis annealing along ``betas``; copies the lowest-energy state seen into ``best``."""
    np.random.seed(seed)
    e = energy(s, nbr, nbrJ, deg, h)
    best[:] = s
    best_e = e
    for b in range(betas.shape[0]):
        for _ in range(sweeps_per_temp):
            e += metropolis_sweep(s, nbr, nbrJ, deg, h, betas[b])
            if e < best_e:
                best_e = e
                best[:] = s
    return best_e


@njit(cache=True)
def houdayer_move(a, b, nbr, nbrJ, deg, h, stack, mark, members):
    """Flip one random connected cluster of opposite-overlap sites in both replicas.

    ``stack``, ``mark`` and ``members`` are length-n scratch buffers.
    Returns ``(dE_a, dE_b, cluster_size)``.
    """
    n = a.shape[0]
    cand = 0
    for i in range(n):
        if a[i] != b[i]:
            cand += 1
    if cand == 0:
        return 0.0, 0.0, 0
    pick = np.random.randint(cand)
    start = -1
    for i in range(n):
        if a[i] != b[i]:
            if pick == 0:
                start = i
                break
            pick -= 1
    top = 0
    size = 0
    stack[top] = start
    top += 1
    mark[start] = True
    while top > 0:
        top -= 1
        i = stack[top]
        members[size] = i
        size += 1
        for k in range(deg[i]):
            j = nbr[i, k]
            if not mark[j] and a[j] != b[j]:
                mark[j] = True
                stack[top] = j
                top += 1
    da = 0.0
    db = 0.0
    for m in range(size):
        i = members[m]
        fa = h[i]
        fb = h[i]
        for k in range(deg[i]):
            j = nbr[i, k]
            if not mark[j]:
                fa += nbrJ[i, k] * a[j]
                fb += nbrJ[i, k] * b[j]
        da += 2.0 * a[i] * fa
        db += 2.0 * b[i] * fb
    for m in range(size):
        i = members[m]
        a[i] = -a[i]
        b[i] = -b[i]
        mark[i] = False
    return da, db, size


@njit(cache=True)
def pt_sweeps(S, E, betas, n_ica, cluster, nsweeps, nbr, nbrJ, deg, h, seed,
              rec_S, rec_E, chain_min, stats):
    """Parallel tempering with isoenergetic cluster moves.

    ``S[r, k]`` is the replica of chain ``r`` currently at temperature slot
    ``k`` (slot 0 coldest).  Per sweep: Metropolis on every replica, one
    cluster move per chain pair (0,1), (2,3), ... at each of the ``n_ica``
    coldest slots (skipped unless ``cluster``), then neighbour exchanges within each chain.  After each
    sweep the slot-0 replicas are copied into ``rec_S[t]`` / ``rec_E[t]``
    and ``chain_min`` tracks the lowest energy over the ``n_ica`` coldest
    slots.  ``stats[0/1/2, k]`` accumulate exchange attempts, summed
    acceptance probabilities and acceptances for the pair (k, k+1).
    """
    np.random.seed(seed)
    R, T, n = S.shape
    stack = np.empty(n, dtype=np.int64)
    mark = np.zeros(n, dtype=np.bool_)
    members = np.empty(n, dtype=np.int64)
    for t in range(nsweeps):
        for r in range(R):
            for k in range(T):
                E[r, k] += metropolis_sweep(S[r, k], nbr, nbrJ, deg, h, betas[k])
        for k in range(n_ica if cluster else 0):
            for r in range(0, R - 1, 2):
                da, db, _ = houdayer_move(S[r, k], S[r + 1, k], nbr, nbrJ, deg, h, stack, mark, members)
                E[r, k] += da
                E[r + 1, k] += db
        for r in range(R):
            for k in range(T - 1):
                x = (betas[k] - betas[k + 1]) * (E[r, k] - E[r, k + 1])
                p = 1.0 if x >= 0.0 else np.exp(x)
                stats[0, k] += 1.0
                stats[1, k] += p
                if x >= 0.0 or np.random.random() < p:
                    for i in range(n):
                        tmp = S[r, k, i]
                        S[r, k, i] = S[r, k + 1, i]
                        S[r, k + 1, i] = tmp
                    tmp_e = E[r, k]
                    E[r, k] = E[r, k + 1]
                    E[r, k + 1] = tmp_e
                    stats[2, k] += 1.0
        for r in range(R):
            for k in range(n_ica):
                if E[r, k] < chain_min[r]:
                    chain_min[r] = E[r, k]
            rec_S[t, r] = S[r, 0]
            rec_E[t, r] = E[r, 0]


@njit(cache=True)
def sqa_reads(nreads, P, nbr, nbrJ, deg, h, scale, temperature, jperp, seed, out, out_e):
    """Path-integral annealing, ``nreads`` independent runs.

    Slice energy is ``scale * H / P`` plus ``-jperp[t] * s_k s_{k+1}``
    between neighbouring slices (periodic), sampled at ``temperature``.  The
    lowest-energy slice of the final state is written to ``out[r]`` and its
    unscaled energy to ``out_e[r]``.
    """
    np.random.seed(seed)
    n = out.shape[1]
    S = np.empty((P, n), dtype=np.int8)
    inv_t = 1.0 / temperature
    w = scale / P
    for r in range(nreads):
        for k in range(P):
            for i in range(n):
                S[k, i] = 1 if np.random.random() < 0.5 else -1
        for t in range(jperp.shape[0]):
            jp = jperp[t]
            for k in range(P):
                up = (k + 1) % P
                dn = (k - 1 + P) % P
                for i in range(n):
                    si = S[k, i]
                    de = 2.0 * si * local_field(S[k], i, nbr, nbrJ, deg, h) * w
                    if P > 1:
                        de += 2.0 * jp * si * (S[up, i] + S[dn, i])
                    if de <= 0.0 or np.random.random() < np.exp(-de * inv_t):
                        S[k, i] = -si
        best_k = 0
        best_e = energy(S[0], nbr, nbrJ, deg, h)
        for k in range(1, P):
            e = energy(S[k], nbr, nbrJ, deg, h)
            if e < best_e:
                best_e = e
                best_k = k
        out[r] = S[best_k]
        out_e[r] = best_e
