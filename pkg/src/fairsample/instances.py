"""Benchmark instance generation: Sidon-set couplings, free-spin elimination,
degeneracy filtering, Gaussian noise and gauge transformations."""

from __future__ import annotations

import hashlib
import itertools
import logging
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Callable, Mapping

import numpy as np

from .chimera import ChimeraGraph, neighbors
from .ising import IsingArrays, SpinConfig

log = logging.getLogger(__name__)

SIDON_MAGNITUDES = (5, 6, 7)
SIDON_VALUES = (-7, -6, -5, 5, 6, 7)
LOCAL_ATTEMPTS = 100
RESTARTS = 100
SCANS = 10


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


@dataclass(frozen=True)
class Instance:
    """Integer couplings on the active couplers of a Chimera graph, no fields."""

    graph: ChimeraGraph
    couplings: Mapping[tuple[int, int], int]
    seed: int | None = None
    meta: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        if set(self.couplings) != set(self.graph.active_couplers):
            raise ValueError("couplings must cover exactly the active couplers")

    @cached_property
    def arrays(self) -> IsingArrays:
        return IsingArrays.build(self.graph, self.couplings, integer=True)

    @property
    def integer(self) -> bool:
        return True

    @property
    def base(self) -> "Instance":
        return self

    def coupling_values(self) -> np.ndarray:
        return np.array([self.couplings[e] for e in self.graph.active_couplers], dtype=np.int64)

    @cached_property
    def content_hash(self) -> str:
        """SHA-256 over the Hamiltonian (graph, defects, couplings); metadata excluded."""
        g = self.graph
        lines = [f"c {g.c}",
                 "defect_qubits " + " ".join(map(str, g.defect_qubits)),
                 "defect_couplers " + " ".join(f"{i}-{j}" for i, j in g.defect_couplers)]
        lines += [f"{i} {j} {self.couplings[(i, j)]}" for i, j in g.active_couplers]
        return hashlib.sha256("\n".join(lines).encode()).hexdigest()


@dataclass(frozen=True)
class NoisyInstance:
    """A base instance plus Gaussian coupler perturbations and local fields."""

    base: Instance
    coupler_noise: Mapping[tuple[int, int], float]
    field_noise: Mapping[int, float]
    sigma_J: float = 0.0
    sigma_h: float = 0.0
    seed: int | None = None

    @property
    def graph(self) -> ChimeraGraph:
        return self.base.graph

    @property
    def integer(self) -> bool:
        return False

    @property
    def couplings(self) -> dict[tuple[int, int], float]:
        return {e: self.base.couplings[e] + self.coupler_noise[e] for e in self.graph.active_couplers}

    @property
    def fields(self) -> dict[int, float]:
        return dict(self.field_noise)

    @cached_property
    def arrays(self) -> IsingArrays:
        return IsingArrays.build(self.graph, self.couplings, self.fields, integer=False)

    @cached_property
    def content_hash(self) -> str:
        lines = [f"base {self.base.content_hash}"]
        lines += [f"J {i} {j} {self.coupler_noise[(i, j)]!r}" for i, j in self.graph.active_couplers]
        lines += [f"h {q} {self.field_noise[q]!r}" for q in self.graph.active_qubits]
        return hashlib.sha256("\n".join(lines).encode()).hexdigest()


@dataclass(frozen=True)
class GaugeVector:
    """Gauge signs, one per active qubit in ``graph.active_qubits`` order."""

    graph: ChimeraGraph
    signs: tuple[int, ...]

    def __post_init__(self):
        if len(self.signs) != self.graph.num_qubits or any(e not in (1, -1) for e in self.signs):
            raise ValueError("gauge needs one +/-1 sign per active qubit")

    def __getitem__(self, q: int) -> int:
        return self.signs[self.graph.position[q]]

    @property
    def mask(self) -> int:
        """Bit mask of the qubits whose spin the gauge inverts."""
        return sum(1 << k for k, e in enumerate(self.signs) if e < 0)


def draw_couplings(graph: ChimeraGraph, seed=None) -> Instance:
    """Assign every active coupler a value drawn uniformly from {+-5, +-6, +-7}.

    ``seed`` may be an int (recorded on the instance) or a Generator.
    """
    rng = _rng(seed)
    vals = rng.choice(SIDON_VALUES, size=len(graph.active_couplers))
    couplings = {e: int(v) for e, v in zip(graph.active_couplers, vals)}
    return Instance(graph, couplings, seed if isinstance(seed, (int, np.integer)) else None)


@lru_cache(maxsize=None)
def admits_zero_field(magnitudes: tuple[int, ...]) -> bool:
    """True if some choice of signs makes ``sum(+-m)`` vanish."""
    if not magnitudes:
        return True
    if sum(magnitudes) % 2:
        return False
    for signs in itertools.product((1, -1), repeat=len(magnitudes) - 1):
        if magnitudes[0] + sum(s * m for s, m in zip(signs, magnitudes[1:])) == 0:
            return True
    return False


def free_spin_qubits(instance: Instance) -> list[int]:
    """Qubits for which some neighbour configuration yields zero local field."""
    g = instance.graph
    bad = []
    for q in g.active_qubits:
        mags = tuple(sorted(abs(instance.couplings[tuple(sorted((q, j)))]) for j in neighbors(g, q)))
        if admits_zero_field(mags):
            bad.append(q)
    return bad


class FreeSpinEliminationError(RuntimeError):
    """Raised when repair and restarts are exhausted; caller should redraw from scratch."""


def eliminate_free_spins(instance: Instance, seed=None, max_restarts: int = RESTARTS,
                         local_attempts: int = LOCAL_ATTEMPTS) -> Instance:
    """Reshuffle coupling magnitudes until no qubit can ever see a zero local field.

    A qubit whose incident magnitudes sum to an odd number can never see a
    zero field, so repairs work on parity: starting from a failing qubit, one
    incident coupler (chosen at random, never straight back along the edge
    just used) gets a magnitude of the opposite parity, which also flips the
    parity at the far end.  The walk continues from the far end until it
    lands on a passing qubit.  Signs are never touched.  A walk longer than
    ``local_attempts`` steps, or failures left after ``SCANS`` passes over the
    lattice, redraw the whole instance.  Repair statistics land in
    ``meta["repairs"]`` and ``meta["restarts"]``.
    """
    rng = _rng(seed)
    g = instance.graph
    for q in g.active_qubits:
        if g.degree(q) == 0:
            raise FreeSpinEliminationError(f"qubit {q} has no active couplers")
    incident = {q: [(tuple(sorted((q, j))), j) for j in neighbors(g, q)] for q in g.active_qubits}
    couplings = dict(instance.couplings)
    repairs = 0

    def fails(q):
        return admits_zero_field(tuple(sorted(abs(couplings[e]) for e, _ in incident[q])))

    for restart in range(max_restarts + 1):
        if restart:
            vals = rng.choice(SIDON_VALUES, size=len(g.active_couplers))
            couplings = {e: int(v) for e, v in zip(g.active_couplers, vals)}
        ok = True
        for _ in range(SCANS):
            bad = [q for q in g.active_qubits if fails(q)]
            if not bad:
                meta = dict(instance.meta, repairs=repairs, restarts=restart)
                return Instance(g, couplings, instance.seed, meta)
            for q in bad:
                cur, prev, steps = q, None, 0
                while fails(cur):
                    if steps == local_attempts:
                        ok = False
                        break
                    options = [(e, j) for e, j in incident[cur] if j != prev] or incident[cur]
                    e, j = options[rng.integers(len(options))]
                    mag = 6 if abs(couplings[e]) % 2 else int(rng.choice((5, 7)))
                    couplings[e] = mag if couplings[e] > 0 else -mag
                    prev, cur = cur, j
                    steps += 1
                    repairs += 1
                if not ok:
                    break
            if not ok:
                break
    raise FreeSpinEliminationError(
        f"free spins persist after {max_restarts} restarts ({repairs} local repairs)")


@dataclass(frozen=True)
class DegeneracyVerdict:
    accepted: bool
    n_gs: int | None
    k: int | None
    status: str  # "exact", "heuristic" or "uncounted"


def degeneracy_exponent(n_gs: int) -> int | None:
    """``k`` if ``n_gs == 3 * 2**k`` with ``k >= 1``, else None."""
    if n_gs < 6 or n_gs % 3:
        return None
    m = n_gs // 3
    if m & (m - 1):
        return None
    return m.bit_length() - 1


class OracleInfeasible(RuntimeError):
    """The requested oracle cannot handle an instance of this size."""


def filter_degeneracy(instance: Instance, oracle: Callable | None = None) -> DegeneracyVerdict:
    """Accept iff the ground-state count is ``3 * 2**k`` for integer ``k >= 1``.

    ``oracle(instance)`` returns either an int count or an object with
    ``count`` and ``exact`` attributes; the exact frontier counter is the
    default.  An :class:`OracleInfeasible` from the oracle yields status
    ``"uncounted"``.
    """
    if oracle is None:
        from .oracle import frontier_count
        oracle = frontier_count
    try:
        res = oracle(instance)
    except OracleInfeasible:
        return DegeneracyVerdict(False, None, None, "uncounted")
    if isinstance(res, tuple):
        n_gs, exact = int(res[1]), True
    elif isinstance(res, (int, np.integer)):
        n_gs, exact = int(res), True
    else:
        n_gs, exact = int(res.count), bool(res.exact)
    k = degeneracy_exponent(n_gs)
    return DegeneracyVerdict(k is not None, n_gs, k, "exact" if exact else "heuristic")


def apply_noise(instance: Instance, sigma_J: float, sigma_h: float, seed=None) -> NoisyInstance:
    """Zero-mean Gaussian perturbations: std ``sigma_J`` per coupler, ``sigma_h`` per qubit."""
    if sigma_J < 0 or sigma_h < 0:
        raise ValueError("noise standard deviations must be non-negative")
    rng = _rng(seed)
    g = instance.graph
    dJ = rng.normal(0.0, sigma_J, size=len(g.active_couplers)) if sigma_J > 0 else np.zeros(len(g.active_couplers))
    dh = rng.normal(0.0, sigma_h, size=g.num_qubits) if sigma_h > 0 else np.zeros(g.num_qubits)
    return NoisyInstance(
        instance,
        {e: float(v) for e, v in zip(g.active_couplers, dJ)},
        {q: float(v) for q, v in zip(g.active_qubits, dh)},
        float(sigma_J), float(sigma_h),
        seed if isinstance(seed, (int, np.integer)) else None)


def random_gauge(graph: ChimeraGraph, seed=None) -> GaugeVector:
    rng = _rng(seed)
    return GaugeVector(graph, tuple(int(x) for x in rng.choice((-1, 1), size=graph.num_qubits)))


def apply_gauge(instance, gauge: GaugeVector):
    """J_ij -> e_i e_j J_ij (and h_i -> e_i h_i for noisy instances)."""
    if gauge.graph != instance.graph:
        raise ValueError("gauge and instance are defined on different graphs")
    if isinstance(instance, NoisyInstance):
        return NoisyInstance(
            apply_gauge(instance.base, gauge),
            {(i, j): gauge[i] * gauge[j] * v for (i, j), v in instance.coupler_noise.items()},
            {q: gauge[q] * v for q, v in instance.field_noise.items()},
            instance.sigma_J, instance.sigma_h, instance.seed)
    couplings = {(i, j): gauge[i] * gauge[j] * v for (i, j), v in instance.couplings.items()}
    return Instance(instance.graph, couplings, instance.seed, dict(instance.meta))


def ungauge_config(config: SpinConfig, gauge: GaugeVector) -> SpinConfig:
    """s_i -> e_i s_i; maps a gauged-frame config back to the base frame (and vice versa)."""
    if config.n != gauge.graph.num_qubits:
        raise ValueError("gauge and config sizes differ")
    return SpinConfig(config.bits ^ gauge.mask, config.n)
