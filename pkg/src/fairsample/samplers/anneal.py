"""Classical simulated annealing, the baseline sampler."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .records import SampleRecord, child_seed, exact_energy, kernel_arrays, params_hash, spins_to_config


def simulated_annealing(instance, schedule, sweeps_per_temp: int = 1, rng=None) -> SampleRecord:
    """Metropolis sweeps down a strictly decreasing temperature ``schedule``.

    Returns the lowest-energy configuration seen during the run.
    """
    temps = np.asarray(schedule, dtype=np.float64)
    if temps.size == 0:
        raise ValueError("empty temperature schedule")
    if np.any(temps <= 0) or np.any(np.diff(temps) >= 0):
        raise ValueError("schedule must be positive and strictly decreasing")
    rng = np.random.default_rng(rng)
    seed = child_seed(rng)
    nbr, nbrJ, deg, h = kernel_arrays(instance)
    n = instance.graph.num_qubits
    s = np.where(rng.random(n) < 0.5, 1, -1).astype(np.int8)
    best = np.empty_like(s)
    _kernels.anneal(s, nbr, nbrJ, deg, h, 1.0 / temps, int(sweeps_per_temp), seed, best)
    cfg = spins_to_config(best)
    p = {"schedule": temps.tolist(), "sweeps_per_temp": int(sweeps_per_temp)}
    return SampleRecord("sa", params_hash(p), 0, cfg, exact_energy(instance, cfg),
                        int(temps.size * sweeps_per_temp), seed)


@dataclass(frozen=True)
class SASampler:
    """Geometric schedule from ``t_start`` to ``t_end`` over ``steps`` temperatures."""

    t_start: float = 3.0
    t_end: float = 0.1
    steps: int = 100
    sweeps_per_temp: int = 1
    name: str = "sa"

    @property
    def schedule(self) -> np.ndarray:
        return np.geomspace(self.t_start, self.t_end, self.steps)

    @property
    def sweep_budget(self) -> int:
        return self.steps * self.sweeps_per_temp

    def sample(self, instance, reads: int, rng) -> list[SampleRecord]:
        rng = np.random.default_rng(rng)
        return [simulated_annealing(instance, self.schedule, self.sweeps_per_temp, rng)
                for _ in range(reads)]
