"""Fair-sampling benchmarks for degenerate Ising spin glasses on Chimera graphs."""

from .chimera import ChimeraGraph, build_chimera, neighbors
from .fairness import (FairnessReport, HitHistogram, bootstrap_ci, compare_runs, fairness_report,
                       min_solutions_filter, rank_histogram, tally, theta_max, uniform_baseline)
from .instances import (GaugeVector, Instance, NoisyInstance, apply_gauge, apply_noise,
                        draw_couplings, eliminate_free_spins, filter_degeneracy, random_gauge,
                        ungauge_config)
from .ising import SpinConfig, delta_energy, energy, global_flip
from .oracle import GroundStateSet, brute_force_enumerate, exact_ground_states, frontier_enumerate

__all__ = [
    "ChimeraGraph", "build_chimera", "neighbors", "FairnessReport", "HitHistogram", "bootstrap_ci",
    "compare_runs", "fairness_report", "min_solutions_filter", "rank_histogram", "tally",
    "theta_max", "uniform_baseline", "GaugeVector", "Instance", "NoisyInstance", "apply_gauge",
    "apply_noise", "draw_couplings", "eliminate_free_spins", "filter_degeneracy", "random_gauge",
    "ungauge_config", "SpinConfig", "delta_energy", "energy", "global_flip", "GroundStateSet",
    "brute_force_enumerate", "exact_ground_states", "frontier_enumerate",
]
