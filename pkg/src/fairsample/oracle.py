"""Exact ground states: Gray-code brute force and a row-by-row frontier DP.

The frontier DP sweeps cell rows top to bottom.  Its state is the 4c
left-side qubits of the current row (the ones wired to the next row).  For a
fixed row state the right-side qubits form a chain along the row and are
minimised out exactly; the vertical wires are absorbed one bit at a time.
Every table entry carries (minimum energy, number of minimisers).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .chimera import LEFT, RIGHT, qubit_index
from .instances import Instance, OracleInfeasible
from .ising import ENERGY_TOL, SpinConfig, energy

BRUTE_FORCE_MAX_N = 28
FRONTIER_MAX_C = 4
DEFAULT_CAP = 1 << 16

_INF = np.int64(1) << 50
_COUNT_LIMIT = float(1 << 62)


@dataclass(frozen=True)
class GroundStateSet:
    """Minimum energy and the minimising configurations in canonical order.

    ``status`` is ``"ok"`` when ``configs`` holds all ``count`` minimisers
    and ``"overflow"`` when only the count is known.
    """

    min_energy: int | float
    configs: tuple[SpinConfig, ...]
    count: int
    exact: bool = True
    status: str = "ok"

    def __len__(self):
        return self.count

    def index(self) -> dict[SpinConfig, int]:
        return {cfg: k for k, cfg in enumerate(self.configs)}


@njit(cache=True)
def _gray_scan(n, nbr, nbrJ, deg, h, tol, cap):
    s = -np.ones(n, dtype=np.int64)
    e0 = nbrJ[0, 0] * 0
    for i in range(n):
        for k in range(deg[i]):
            j = nbr[i, k]
            if j > i:
                e0 -= nbrJ[i, k] * s[i] * s[j]
        e0 -= h[i] * s[i]
    e = e0
    best = e0
    found = np.zeros(cap, dtype=np.int64)
    count = 1
    code = 0
    found[0] = 0
    total = np.int64(1) << n
    for it in range(1, total):
        b = 0
        x = it
        while (x & 1) == 0:
            x >>= 1
            b += 1
        local = h[b]
        for k in range(deg[b]):
            local += nbrJ[b, k] * s[nbr[b, k]]
        e += 2 * s[b] * local
        s[b] = -s[b]
        code ^= np.int64(1) << b
        if e < best - tol:
            best = e
            count = 1
            found[0] = code
        elif e <= best + tol:
            if count < cap:
                found[count] = code
            count += 1
    return best, count, found


def brute_force_enumerate(instance, max_n: int = BRUTE_FORCE_MAX_N,
                          cap: int = DEFAULT_CAP) -> GroundStateSet:
    """Scan all ``2^N`` configurations; works for base and noisy instances."""
    arr = instance.arrays
    n = arr.n
    if n > max_n:
        raise OracleInfeasible(f"brute force limited to N <= {max_n}, got {n}")
    if n == 0:
        return GroundStateSet(0, (SpinConfig(0, 0),), 1)
    tol = 0 if arr.integer else ENERGY_TOL
    best, count, found = _gray_scan(n, arr.nbr, arr.nbrJ, arr.deg, arr.h, tol, cap)
    best = int(best) if arr.integer else float(best)
    if count > cap:
        return GroundStateSet(best, (), int(count), True, "overflow")
    configs = tuple(sorted(SpinConfig(int(b), n) for b in found[:count]))
    if not arr.integer:
        # the running minimum may have drifted by < tol; re-evaluate exactly
        es = [energy(instance, cfg) for cfg in configs]
        best = min(es)
        configs = tuple(cfg for cfg, e in zip(configs, es) if e <= best + ENERGY_TOL)
    return GroundStateSet(best, configs, len(configs) if not arr.integer else int(count))


# ---------------------------------------------------------------- frontier DP

def _bits_to_spins(nbits: int) -> np.ndarray:
    idx = np.arange(1 << nbits)
    return (2 * ((idx[:, None] >> np.arange(nbits)) & 1) - 1).astype(np.int64)


def _checked(counts: np.ndarray, estimate: np.ndarray) -> np.ndarray:
    if estimate.size and estimate.max() >= _COUNT_LIMIT:
        raise OverflowError("ground-state count exceeds 64-bit range")
    return counts


def _minplus(e: np.ndarray, n: np.ndarray, axis: int):
    """Min over ``axis`` with tie counts summed; infinite entries carry zero count."""
    m = e.min(axis=axis)
    tie = e == np.expand_dims(m, axis)
    cnt = np.where(tie, n, 0)
    total = cnt.sum(axis=axis)
    _checked(total, np.where(tie, n, 0).astype(np.float64).sum(axis=axis))
    m = np.minimum(m, _INF)
    total = np.where(m >= _INF, 0, total)
    return m, total


class _Rows:
    """Per-row coupling tables of a base instance on a c x c Chimera graph."""

    def __init__(self, instance: Instance):
        g = instance.graph
        c = g.c
        self.c = c
        self.nbits = 4 * c
        J = instance.couplings
        active = set(g.active_qubits)

        def coupling(a, b):
            return J.get((min(a, b), max(a, b)), 0)

        s4 = _bits_to_spins(4)            # (16, 4)
        self.s4 = s4
        self.intra = np.zeros((c, c, 16, 16), dtype=np.int64)   # [row, col, left, right]
        self.horiz = np.zeros((c, c, 16, 16), dtype=np.int64)   # [row, col, right(col-1), right(col)]
        self.vert = np.zeros((c, self.nbits), dtype=np.int64)   # [row, bit] coupling to row-1
        self.left_ok = np.ones((c, c, 16), dtype=bool)
        self.right_ok = np.ones((c, c, 16), dtype=bool)
        for r in range(c):
            for k in range(c):
                Jlr = np.array([[coupling(qubit_index(c, r, k, LEFT, a), qubit_index(c, r, k, RIGHT, b))
                                 for b in range(4)] for a in range(4)])
                self.intra[r, k] = -np.einsum("xa,ab,yb->xy", s4, Jlr, s4)
                if k > 0:
                    Jh = np.array([coupling(qubit_index(c, r, k - 1, RIGHT, p), qubit_index(c, r, k, RIGHT, p))
                                   for p in range(4)])
                    self.horiz[r, k] = -np.einsum("xp,p,yp->xy", s4, Jh, s4)
                if r > 0:
                    for p in range(4):
                        self.vert[r, 4 * k + p] = coupling(qubit_index(c, r - 1, k, LEFT, p),
                                                           qubit_index(c, r, k, LEFT, p))
                for side, ok in ((LEFT, self.left_ok), (RIGHT, self.right_ok)):
                    for p in range(4):
                        if qubit_index(c, r, k, side, p) not in active:
                            # inactive qubits are pinned to +1
                            ok[r, k] &= s4[:, p] == 1

    def right_chain(self, r: int):
        """For every row state L: min over right qubits of row energy, and its multiplicity.

        Arrays are indexed with ``L = sum_k L_k * 16**k``.
        """
        c = self.c
        pen = np.where(self.right_ok[r], 0, _INF)          # (c, 16)
        # f over axes (L_k, ..., L_0, b)
        f = self.intra[r, 0] + pen[0][None, :]
        f = np.where(self.left_ok[r, 0][:, None], f, _INF)
        cnt = np.where(f < _INF, 1, 0).astype(np.int64)
        for k in range(1, c):
            e = f[..., :, None] + self.horiz[r, k]          # (..., b', b)
            f, cnt = _minplus(e, cnt[..., :, None], axis=-2)
            add = self.intra[r, k] + pen[k][None, :]
            add = np.where(self.left_ok[r, k][:, None], add, _INF)   # (L_k, b)
            shape = (16,) + (1,) * (f.ndim - 1) + (16,)
            f = np.minimum(f[None, ...] + add.reshape(shape), _INF)
            cnt = np.broadcast_to(cnt[None, ...], f.shape).copy()
            cnt[f >= _INF] = 0
        e, n = _minplus(f, cnt, axis=-1)
        return e.reshape(-1), n.reshape(-1)

    def vertical(self, r: int, T: np.ndarray, C: np.ndarray):
        """min_P T[P] + V_r(P, L) over previous row states P, for all L."""
        nb = self.nbits
        T = T.reshape((2,) * nb)
        C = C.reshape((2,) * nb)
        sp = np.array([-1, 1])
        for bit in range(nb):
            ax = nb - 1 - bit                               # C-order: last axis is bit 0
            w = -self.vert[r, bit] * np.outer(sp, sp)       # [p, l]
            Tm = np.moveaxis(T, ax, -1)[..., :, None] + w
            Cm = np.moveaxis(C, ax, -1)[..., :, None]
            Tn, Cn = _minplus(Tm, np.broadcast_to(Cm, Tm.shape), axis=-2)
            T = np.moveaxis(Tn, -1, ax)
            C = np.moveaxis(Cn, -1, ax)
        return T.reshape(-1), C.reshape(-1)


def _frontier_tables(instance):
    if not isinstance(instance, Instance):
        raise TypeError("frontier DP needs an integer base instance; use brute force for noisy ones")
    c = instance.graph.c
    if c > FRONTIER_MAX_C:
        raise OracleInfeasible(f"frontier DP limited to c <= {FRONTIER_MAX_C}, got c={c}")
    rows = _Rows(instance)
    tables = []
    for r in range(c):
        R, Rc = rows.right_chain(r)
        if r == 0:
            T, C = R, Rc
        else:
            T, C = rows.vertical(r, *tables[-1][:2])
            T = np.minimum(T + R, _INF)
            C = _checked(C * Rc, C.astype(np.float64) * Rc)
            C = np.where(T >= _INF, 0, C)
        tables.append((T, C, R))
    return rows, tables


def frontier_count(instance) -> tuple[int, int]:
    """Exact ``(min_energy, N_GS)`` for base instances with ``c <= 4``."""
    _, tables = _frontier_tables(instance)
    T, C, _ = tables[-1]
    m = T.min()
    return int(m), int(C[T == m].sum())


def frontier_enumerate(instance, cap: int = DEFAULT_CAP) -> GroundStateSet:
    """All minimisers via traceback through the frontier tables.

    If ``N_GS > cap`` the result carries only the count, with status ``"overflow"``.
    """
    rows, tables = _frontier_tables(instance)
    c, nb = rows.c, rows.nbits
    T, C, _ = tables[-1]
    m = int(T.min())
    count = int(C[T == m].sum())
    if count > cap:
        return GroundStateSet(m, (), count, True, "overflow")
    spins_nb = _bits_to_spins(nb)
    g = instance.graph
    full = 8 * c * c

    def right_options(r, L):
        """All right-qubit assignments (per cell 4-bit states) minimising row r given L."""
        Ls = [(L >> (4 * k)) & 15 for k in range(c)]
        pen = np.where(rows.right_ok[r], 0, _INF)
        f = [rows.intra[r, 0, Ls[0]] + pen[0]]
        for k in range(1, c):
            prev = f[-1][:, None] + rows.horiz[r, k]
            f.append(prev.min(axis=0) + rows.intra[r, k, Ls[k]] + pen[k])
        best = f[-1].min()
        out = []

        def back(k, b, target, tail):
            if k == 0:
                if f[0][b] == target:
                    out.append([b] + tail)
                return
            add = rows.intra[r, k, Ls[k]][b] + pen[k][b]
            for bp in range(16):
                if f[k - 1][bp] + rows.horiz[r, k, bp, b] + add == target:
                    back(k - 1, bp, target - add - rows.horiz[r, k, bp, b], [b] + tail)

        for b in np.flatnonzero(f[-1] == best):
            back(c - 1, int(b), best, [])
        return out

    def assemble(Ls, Rs):
        s = np.ones(full, dtype=np.int8)
        for r in range(c):
            for k in range(c):
                for p in range(4):
                    s[qubit_index(c, r, k, LEFT, p)] = 1 if (Ls[r] >> (4 * k + p)) & 1 else -1
                    s[qubit_index(c, r, k, RIGHT, p)] = 1 if (Rs[r][k] >> p) & 1 else -1
        return SpinConfig.from_spins(s[list(g.active_qubits)])

    found = set()

    def descend(r, L, Ls_tail):
        Ls = [L] + Ls_tail
        if r == 0:
            for combo in _product([right_options(rr, Ls[rr]) for rr in range(c)]):
                found.add(assemble(Ls, combo))
            return
        Tp, _, _ = tables[r - 1]
        w = -rows.vert[r] * spins_nb[L]                     # per bit
        tot = Tp + spins_nb @ w
        best = tot.min()
        for P in np.flatnonzero(tot == best):
            descend(r - 1, int(P), Ls)

    for L in np.flatnonzero(T == m):
        descend(c - 1, int(L), [])
    configs = tuple(sorted(found))
    if len(configs) != count:
        raise AssertionError(f"traceback found {len(configs)} configs, count says {count}")
    return GroundStateSet(m, configs, count)


def _product(options):
    if not options:
        yield []
        return
    for head in options[0]:
        for rest in _product(options[1:]):
            yield [head] + rest


def exact_ground_states(instance, cap: int = DEFAULT_CAP) -> GroundStateSet:
    """Best feasible exact oracle: frontier DP for base instances, else brute force."""
    if isinstance(instance, Instance) and instance.graph.c <= FRONTIER_MAX_C:
        return frontier_enumerate(instance, cap)
    return brute_force_enumerate(instance, cap=cap)
