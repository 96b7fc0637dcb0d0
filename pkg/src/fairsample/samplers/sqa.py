"""Simulated quantum annealing: discrete-time path-integral Monte Carlo.

``trotter_slices`` copies of the classical system are coupled ferromagnetically
along imaginary time with strength

    J_perp(G) = -(T / 2) ln tanh(G / (P T))

while the transverse field G is lowered along the schedule at fixed T.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .records import SampleRecord, child_seed, exact_energy, kernel_arrays, params_hash, spins_to_config

# sweep-budget presets echoing the 20 us / 200 us annealing-time comparison
SWEEP_PRESETS = {"t20": 1, "t200": 10}


@dataclass(frozen=True)
class SqaParams:
    """``gamma_schedule`` is spread evenly over ``sweeps``; None means linear 3.0 -> 0.01.

    With ``normalize`` the classical Hamiltonian is divided by max |J| before
    annealing, the way hardware rescales problems into its coupler range.
    """

    trotter_slices: int = 32
    sweeps: int = 256
    temperature: float = 0.1
    gamma_schedule: tuple[float, ...] | None = None
    normalize: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.trotter_slices < 1 or self.sweeps < 1:
            raise ValueError("trotter_slices and sweeps must be positive")
        if not self.temperature > 0:
            raise ValueError("temperature must be positive")
        g = self.gammas()
        if np.any(g <= 0) or np.any(np.diff(g) > 0):
            raise ValueError("transverse field schedule must be positive and non-increasing")
        if g[-1] > 1e-2 * g[0]:
            raise ValueError("final transverse field must be <= 1% of the initial one")

    def gammas(self) -> np.ndarray:
        if self.gamma_schedule is None:
            return np.linspace(3.0, 0.01, self.sweeps)
        return np.asarray(self.gamma_schedule, dtype=np.float64)

    def per_sweep_gammas(self) -> np.ndarray:
        g = self.gammas()
        idx = (np.arange(self.sweeps) * len(g)) // self.sweeps
        return g[idx]

    def slice_coupling(self) -> np.ndarray:
        P, T = self.trotter_slices, self.temperature
        return -0.5 * T * np.log(np.tanh(self.per_sweep_gammas() / (P * T)))

    def with_budget(self, factor: int) -> "SqaParams":
        """Same schedule shape stretched over ``factor`` times the sweeps."""
        return replace(self, sweeps=self.sweeps * factor)


def _sqa_batch(instance, params: SqaParams, reads: int, seed: int):
    nbr, nbrJ, deg, h = kernel_arrays(instance)
    scale = 1.0
    if params.normalize:
        top = max(np.abs(nbrJ).max(initial=0.0), np.abs(h).max(initial=0.0))
        scale = 1.0 / top if top > 0 else 1.0
    n = instance.graph.num_qubits
    out = np.empty((reads, n), dtype=np.int8)
    out_e = np.empty(reads)
    _kernels.sqa_reads(reads, params.trotter_slices, nbr, nbrJ, deg, h, scale,
                       params.temperature, params.slice_coupling(), seed, out, out_e)
    return out


def sqa_sample(instance, params: SqaParams, rng=None) -> SampleRecord:
    """One annealing run; returns the best slice of the final path."""
    rng = np.random.default_rng(rng)
    seed = child_seed(rng)
    (s,) = _sqa_batch(instance, params, 1, seed)
    cfg = spins_to_config(s)
    return SampleRecord("sqa", params_hash(params), 0, cfg, exact_energy(instance, cfg), params.sweeps, seed)


@dataclass(frozen=True)
class SQASampler:
    params: SqaParams
    name: str = "sqa"

    @property
    def sweep_budget(self) -> int:
        return self.params.sweeps

    def sample(self, instance, reads: int, rng) -> list[SampleRecord]:
        rng = np.random.default_rng(rng)
        seed = child_seed(rng)
        ph = params_hash(self.params)
        return [SampleRecord(self.name, ph, 0, cfg, exact_energy(instance, cfg), self.params.sweeps, seed)
                for cfg in map(spins_to_config, _sqa_batch(instance, self.params, reads, seed))]
