"""Chimera topology: a c x c grid of K4,4 unit cells.

Qubit indexing is fixed as::

    q = 8 * (row * c + col) + 4 * side + position

with ``side`` 0 (left) or 1 (right) and ``position`` in 0..3.  Left-side
qubits carry the vertical inter-cell wires (cell (r, k) to cell (r + 1, k)),
right-side qubits carry the horizontal ones (cell (r, k) to cell (r, k + 1)).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

import numpy as np

LEFT, RIGHT = 0, 1


def qubit_index(c: int, row: int, col: int, side: int, pos: int) -> int:
    return 8 * (row * c + col) + 4 * side + pos


def qubit_coords(c: int, q: int) -> tuple[int, int, int, int]:
    """Inverse of :func:`qubit_index`: ``(row, col, side, pos)``."""
    cell, rem = divmod(q, 8)
    row, col = divmod(cell, c)
    side, pos = divmod(rem, 4)
    return row, col, side, pos


def full_couplers(c: int) -> list[tuple[int, int]]:
    """All couplers of a defect-free Chimera graph, as sorted pairs."""
    edges = []
    for row in range(c):
        for col in range(c):
            for a in range(4):
                for b in range(4):
                    edges.append((qubit_index(c, row, col, LEFT, a),
                                  qubit_index(c, row, col, RIGHT, b)))
            for p in range(4):
                if row + 1 < c:
                    edges.append((qubit_index(c, row, col, LEFT, p),
                                  qubit_index(c, row + 1, col, LEFT, p)))
                if col + 1 < c:
                    edges.append((qubit_index(c, row, col, RIGHT, p),
                                  qubit_index(c, row, col + 1, RIGHT, p)))
    return sorted(edges)


def is_chimera_coupler(c: int, i: int, j: int) -> bool:
    if i == j or not (0 <= i < 8 * c * c and 0 <= j < 8 * c * c):
        return False
    ri, ci, si, pi = qubit_coords(c, i)
    rj, cj, sj, pj = qubit_coords(c, j)
    if (ri, ci) == (rj, cj):
        return si != sj
    if si != sj or pi != pj:
        return False
    if si == LEFT:
        return ci == cj and abs(ri - rj) == 1
    return ri == rj and abs(ci - cj) == 1


@dataclass(frozen=True)
class ChimeraGraph:
    """Immutable Chimera graph with its defects removed.

    ``active_qubits`` is sorted; ``active_couplers`` holds sorted ``(i, j)``
    pairs with ``i < j``, itself sorted.
    """

    c: int
    active_qubits: tuple[int, ...]
    active_couplers: tuple[tuple[int, int], ...]
    defect_qubits: tuple[int, ...] = ()
    defect_couplers: tuple[tuple[int, int], ...] = ()
    _adj: dict = field(default=None, repr=False, compare=False, hash=False)

    def __post_init__(self):
        active = set(self.active_qubits)
        adj = {q: [] for q in self.active_qubits}
        for i, j in self.active_couplers:
            if i not in active or j not in active:
                raise ValueError(f"coupler ({i}, {j}) touches an inactive qubit")
            if not is_chimera_coupler(self.c, i, j):
                raise ValueError(f"({i}, {j}) is not a Chimera coupler for c={self.c}")
            adj[i].append(j)
            adj[j].append(i)
        for q, nb in adj.items():
            if len(nb) > 6:
                raise ValueError(f"qubit {q} has degree {len(nb)} > 6")
            nb.sort()
        object.__setattr__(self, "_adj", {q: tuple(nb) for q, nb in adj.items()})

    @property
    def num_qubits(self) -> int:
        """Number of active qubits."""
        return len(self.active_qubits)

    @property
    def size(self) -> int:
        """Nominal lattice size N = 8 c^2, defects included."""
        return 8 * self.c * self.c

    @cached_property
    def position(self) -> dict[int, int]:
        """Map qubit index -> position in ``active_qubits`` (bit position in configs)."""
        return {q: k for k, q in enumerate(self.active_qubits)}

    @cached_property
    def coupler_array(self) -> np.ndarray:
        """Couplers as an ``(m, 2)`` array of qubit indices."""
        return np.array(self.active_couplers, dtype=np.int64).reshape(-1, 2)

    def is_active(self, q: int) -> bool:
        return q in self._adj

    def neighbors(self, q: int) -> list[int]:
        return neighbors(self, q)

    def degree(self, q: int) -> int:
        return len(self._adj[q])


def build_chimera(c: int, defect_qubits: Iterable[int] = (),
                  defect_couplers: Iterable[tuple[int, int]] = ()) -> ChimeraGraph:
    """Build a Chimera graph with ``8 c^2`` nominal qubits.

    Inoperable qubits drop all their incident couplers.  Out-of-range or
    non-Chimera defect entries raise ``ValueError`` naming the entry.
    """
    if int(c) != c or c < 1:
        raise ValueError(f"c must be a positive integer, got {c!r}")
    c = int(c)
    n = 8 * c * c
    dq = sorted(set(int(q) for q in defect_qubits))
    for q in dq:
        if not 0 <= q < n:
            raise ValueError(f"defect qubit {q} out of range [0, {n})")
    dc = set()
    for pair in defect_couplers:
        i, j = sorted(int(x) for x in pair)
        if not is_chimera_coupler(c, i, j):
            raise ValueError(f"defect coupler ({i}, {j}) is not a Chimera coupler for c={c}")
        dc.add((i, j))
    dead = set(dq)
    qubits = tuple(q for q in range(n) if q not in dead)
    couplers = tuple(e for e in full_couplers(c)
                     if e not in dc and e[0] not in dead and e[1] not in dead)
    return ChimeraGraph(c, qubits, couplers, tuple(dq), tuple(sorted(dc)))


def neighbors(graph: ChimeraGraph, q: int) -> list[int]:
    """Active neighbours of ``q`` in ascending index order."""
    try:
        return list(graph._adj[q])
    except KeyError:
        raise ValueError(f"qubit {q} is not active") from None
