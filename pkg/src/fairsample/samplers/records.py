from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, is_dataclass

import numpy as np

from ..ising import SpinConfig


@dataclass(frozen=True)
class SampleRecord:
    sampler_id: str
    params_hash: str
    gauge_id: int
    config: SpinConfig
    energy: int | float
    sweep_budget: int
    seed: int

    def to_json(self) -> dict:
        return {"sampler": self.sampler_id, "params": self.params_hash, "gauge": self.gauge_id,
                "config": self.config.to_hex(), "energy": self.energy,
                "sweeps": self.sweep_budget, "seed": self.seed}

    @classmethod
    def from_json(cls, d: dict) -> "SampleRecord":
        return cls(d["sampler"], d["params"], int(d["gauge"]), SpinConfig.from_hex(d["config"]),
                   d["energy"], int(d["sweeps"]), int(d["seed"]))


def params_hash(params) -> str:
    """Short stable hash of a parameter dataclass (or any JSON-able object)."""
    data = asdict(params) if is_dataclass(params) else params
    text = json.dumps(data, sort_keys=True, default=list)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def child_seed(rng: np.random.Generator) -> int:
    """Draw a 63-bit seed for a compiled kernel from ``rng``."""
    return int(rng.integers(0, 2**63 - 1))


def kernel_arrays(instance):
    """(nbr, nbrJ, deg, h) as the float arrays the kernels expect."""
    a = instance.arrays
    return a.nbr, a.nbrJ.astype(np.float64), a.deg, a.h.astype(np.float64)


def spins_to_config(s) -> SpinConfig:
    return SpinConfig.from_spins(np.asarray(s))


def exact_energy(instance, config: SpinConfig):
    from ..ising import energy
    return energy(instance, config)
