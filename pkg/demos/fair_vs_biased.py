"""Sample one degenerate instance with ICA and SQA and compare the rank histograms.

Run: python3 demos/fair_vs_biased.py [c] [seed]
"""

import sys

import numpy as np

from fairsample import build_chimera, draw_couplings, eliminate_free_spins, fairness_report, filter_degeneracy, tally
from fairsample.oracle import frontier_enumerate
from fairsample.samplers import DESK_PT, SQASampler, SqaParams, ica_enumerate, run_with_gauges
from fairsample.fairness import rank_histogram


def first_accepted(c, seed):
    g = build_chimera(c)
    while True:
        inst = eliminate_free_spins(draw_couplings(g, seed), seed)
        if filter_degeneracy(inst).accepted:
            return inst, seed
        seed += 1


def show(name, rep):
    h = rep.histogram
    print(f"{name}: {h.total} ground-state hits, theta_max {rep.theta_max:.3f} "
          f"ci [{rep.ci[0]:.3f}, {rep.ci[1]:.3f}], uniform baseline ci [{rep.baseline.ci[0]:.3f}, {rep.baseline.ci[1]:.3f}]")
    top = h.counts.max()
    for x, n in zip(h.normalized_rank, h.counts):
        print(f"  {x:5.3f} {n:6d} " + "#" * int(40 * n / top))


def main():
    c = int(sys.argv[1]) if len(sys.argv) > 1 else 2
    inst, seed = first_accepted(c, int(sys.argv[2]) if len(sys.argv) > 2 else 0)
    gs = frontier_enumerate(inst)
    print(f"c={c} seed={seed}: N={inst.graph.num_qubits}, E_min={gs.min_energy}, N_GS={gs.count}")

    res = ica_enumerate(inst, DESK_PT)
    print(f"ICA {res.status} after {res.sweeps} sweeps")
    ica = fairness_report(rank_histogram(res.hit_counts(), sampler_id="ica"), rng=0)
    show("ICA", ica)

    recs = run_with_gauges(inst, SQASampler(SqaParams()), 10, 20, np.random.default_rng(seed))
    show("SQA", fairness_report(tally(recs, gs, sampler_id="sqa"), rng=0))


if __name__ == "__main__":
    main()
