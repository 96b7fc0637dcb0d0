"""Spin configurations and energies of H = -sum J_ij s_i s_j - sum h_i s_i.

Base instances are integer-valued and every energy on that path is an exact
Python/NumPy integer.  Noisy instances are real-valued; energies that agree to
within :data:`ENERGY_TOL` are treated as equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .chimera import ChimeraGraph

ENERGY_TOL = 1e-9
MAX_DEGREE = 6


@dataclass(frozen=True, order=True)
class SpinConfig:
    """Bit-packed +/-1 assignment to the active qubits of a graph.

    Bit ``k`` of ``bits`` is the spin of ``graph.active_qubits[k]`` (1 means
    +1).  Ordering by ``bits`` is the canonical configuration order.
    """

    bits: int
    n: int

    def __post_init__(self):
        if self.bits < 0 or self.bits >> self.n:
            raise ValueError(f"bits do not fit in {self.n} spins")

    @classmethod
    def from_spins(cls, spins) -> "SpinConfig":
        s = np.asarray(spins)
        if s.ndim != 1 or not np.all(np.abs(s) == 1):
            raise ValueError("spins must be a 1-d array of +/-1")
        packed = np.packbits(s > 0, bitorder="little")
        return cls(int.from_bytes(packed.tobytes(), "little"), len(s))

    def spins(self) -> np.ndarray:
        nbytes = (self.n + 7) // 8
        raw = np.frombuffer(self.bits.to_bytes(nbytes, "little"), dtype=np.uint8)
        b = np.unpackbits(raw, bitorder="little", count=self.n)
        return (2 * b.astype(np.int8) - 1)

    def to_hex(self) -> str:
        """``"<n>:<hex>"`` with the packed bits big-endian, zero padded."""
        width = max(1, (self.n + 3) // 4)
        return f"{self.n}:{self.bits:0{width}x}"

    @classmethod
    def from_hex(cls, text: str) -> "SpinConfig":
        n, _, digits = text.strip().partition(":")
        if not digits:
            raise ValueError(f"malformed config {text!r}")
        return cls(int(digits, 16), int(n))

    def flip(self, k: int) -> "SpinConfig":
        """Flip the spin at bit position ``k``."""
        return SpinConfig(self.bits ^ (1 << k), self.n)


def global_flip(config: SpinConfig) -> SpinConfig:
    return SpinConfig(config.bits ^ ((1 << config.n) - 1), config.n)


@dataclass(frozen=True, eq=False)
class IsingArrays:
    """Flat array form of a Hamiltonian, indexed by bit position."""

    n: int
    ei: np.ndarray
    ej: np.ndarray
    J: np.ndarray
    h: np.ndarray
    nbr: np.ndarray
    nbrJ: np.ndarray
    deg: np.ndarray
    integer: bool

    @classmethod
    def build(cls, graph: ChimeraGraph, couplings: Mapping[tuple[int, int], float],
              fields: Mapping[int, float] | None = None, integer: bool = True):
        pos = graph.position
        n = graph.num_qubits
        dtype = np.int64 if integer else np.float64
        m = len(graph.active_couplers)
        ei = np.empty(m, dtype=np.int64)
        ej = np.empty(m, dtype=np.int64)
        J = np.empty(m, dtype=dtype)
        nbr = np.full((n, MAX_DEGREE), -1, dtype=np.int64)
        nbrJ = np.zeros((n, MAX_DEGREE), dtype=dtype)
        deg = np.zeros(n, dtype=np.int64)
        for e, (i, j) in enumerate(graph.active_couplers):
            a, b = pos[i], pos[j]
            ei[e], ej[e], J[e] = a, b, couplings[(i, j)]
            nbr[a, deg[a]], nbrJ[a, deg[a]] = b, J[e]
            nbr[b, deg[b]], nbrJ[b, deg[b]] = a, J[e]
            deg[a] += 1
            deg[b] += 1
        h = np.zeros(n, dtype=dtype)
        if fields:
            for q, v in fields.items():
                h[pos[q]] = v
        for arr in (ei, ej, J, h, nbr, nbrJ, deg):
            arr.setflags(write=False)
        return cls(n, ei, ej, J, h, nbr, nbrJ, deg, integer)

    def energy_of(self, spins: np.ndarray):
        """Energy of one ``(n,)`` or many ``(k, n)`` spin vectors."""
        s = np.asarray(spins, dtype=self.J.dtype)
        e = -(s[..., self.ei] * s[..., self.ej]) @ self.J - s @ self.h
        if self.integer and np.ndim(e) == 0:
            return int(e)
        return e if np.ndim(e) else float(e)


def _check(instance, config: SpinConfig):
    if config.n != instance.graph.num_qubits:
        raise ValueError(
            f"config has {config.n} spins, graph has {instance.graph.num_qubits} active qubits")


def energy(instance, config: SpinConfig):
    """Energy of ``config``; ``int`` for base instances, ``float`` for noisy ones."""
    _check(instance, config)
    return instance.arrays.energy_of(config.spins())


def delta_energy(instance, config: SpinConfig, q: int):
    """Energy change from flipping qubit ``q`` (a graph qubit index)."""
    _check(instance, config)
    try:
        k = instance.graph.position[q]
    except KeyError:
        raise ValueError(f"qubit {q} is not active") from None
    arr = instance.arrays
    s = config.spins().astype(arr.J.dtype)
    d = arr.deg[k]
    local = s[arr.nbr[k, :d]] @ arr.nbrJ[k, :d] + arr.h[k]
    out = 2 * s[k] * local
    return int(out) if arr.integer else float(out)


def energies_equal(a, b, integer: bool) -> bool:
    return a == b if integer else abs(a - b) <= ENERGY_TOL
