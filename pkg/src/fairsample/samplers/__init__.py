"""Stochastic samplers: simulated annealing, PT with isoenergetic cluster moves, SQA."""

from .anneal import SASampler, simulated_annealing
from .gauges import run_with_gauges
from .records import SampleRecord, params_hash
from .sqa import SWEEP_PRESETS, SQASampler, SqaParams, sqa_sample
from .tempering import (DESK_PT, TABLE_I, TABLE_I_INSTANCES, ICAResult, ICASampler, PTParams, PTState,
                        ica_enumerate, ica_run, ica_sample, isoenergetic_cluster_move, pt_sweep)

__all__ = [
    "SASampler", "simulated_annealing", "run_with_gauges", "SampleRecord", "params_hash",
    "SWEEP_PRESETS", "SQASampler", "DESK_PT", "SqaParams", "sqa_sample", "TABLE_I", "TABLE_I_INSTANCES",
    "ICAResult", "ICASampler", "PTParams", "PTState", "ica_enumerate", "ica_run", "ica_sample",
    "isoenergetic_cluster_move", "pt_sweep",
]
