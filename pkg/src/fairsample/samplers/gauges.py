from __future__ import annotations

import numpy as np

from ..instances import apply_gauge, random_gauge, ungauge_config
from ..ising import energy
from .records import SampleRecord


def run_with_gauges(instance, sampler, gauges: int, reads_per_gauge: int, rng=None,
                    identity_first: bool = False) -> list[SampleRecord]:
    """Sample ``reads_per_gauge`` times under each of ``gauges`` random gauges.

    Every configuration is mapped back to the original frame and its energy
    re-evaluated on ``instance`` before it is recorded.  With
    ``identity_first`` gauge 0 is the identity.
    """
    if gauges < 1 or reads_per_gauge < 1:
        raise ValueError("gauge and read counts must be positive")
    rng = np.random.default_rng(rng)
    g_graph = instance.graph
    out = []
    for gid in range(gauges):
        if identity_first and gid == 0:
            gauge = None
        else:
            gauge = random_gauge(g_graph, rng)
        target = instance if gauge is None else apply_gauge(instance, gauge)
        for rec in sampler.sample(target, reads_per_gauge, rng):
            cfg = rec.config if gauge is None else ungauge_config(rec.config, gauge)
            out.append(SampleRecord(rec.sampler_id, rec.params_hash, gid, cfg,
                                    energy(instance, cfg), rec.sweep_budget, rec.seed))
    return out
