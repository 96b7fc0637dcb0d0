"""Command-line workflow: gen -> count -> sample -> analyze, plus noise.

Every per-item seed is derived from ``--seed`` and a stable key (attempt
index or content hash), so output bytes do not depend on ``--workers``.
"""

from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from . import io
from .chimera import build_chimera
from .fairness import (BOOTSTRAP_RESAMPLES, MIN_SOLUTIONS, compare_runs, fairness_report,
                       min_solutions_filter, tally)
from .instances import (FreeSpinEliminationError, NoisyInstance, OracleInfeasible, apply_noise,
                        degeneracy_exponent, draw_couplings, eliminate_free_spins, filter_degeneracy)
from .oracle import BRUTE_FORCE_MAX_N, FRONTIER_MAX_C, brute_force_enumerate, frontier_enumerate
from .samplers import DESK_PT, SWEEP_PRESETS, ICASampler, SASampler, SQASampler, SqaParams, run_with_gauges
from .samplers.tempering import ica_enumerate

log = logging.getLogger("fairsample")


def derive_seed(master: int, *keys: int) -> int:
    """Independent 63-bit seed for the item named by ``keys``."""
    state = np.random.SeedSequence([master, *keys]).generate_state(2, np.uint64)
    return int(state[0] >> np.uint64(1))


def hash_key(h: str) -> int:
    return int(h[:15], 16)


def _map(fn, items, workers: int):
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _usage(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return 2


# ------------------------------------------------------------------------ gen

def _gen_attempt(job):
    c, seed, ica_b = job
    g = build_chimera(c)
    try:
        inst = eliminate_free_spins(draw_couplings(g, seed), seed)
    except FreeSpinEliminationError:
        return None, "free-spin", None
    if c <= FRONTIER_MAX_C:
        verdict = filter_degeneracy(inst)
        flag = "exact-counted"
    else:
        res = ica_enumerate(inst, replace(DESK_PT, b=ica_b, seed=seed))
        if not res.converged:
            return None, "unconverged", None
        verdict = filter_degeneracy(inst, lambda _: res.ground_states)
        flag = "heuristic-counted"
    if not verdict.accepted:
        return None, "rejected", verdict.n_gs
    meta = dict(inst.meta, k=verdict.k, n_gs=verdict.n_gs, flags=(flag,))
    return type(inst)(inst.graph, inst.couplings, inst.seed, meta), "accepted", verdict.n_gs


def cmd_gen(args) -> int:
    if args.c < 1 or args.count < 1:
        return _usage("--c and --count must be positive")
    out = Path(args.out)
    budget = args.max_attempts or 200 * args.count + 200
    batch = max(8, 4 * args.workers)
    accepted, tried = [], 0
    stats = {"attempts": 0, "accepted": 0, "rejected": 0, "free-spin": 0, "unconverged": 0}
    n_gs_seen: dict[str, int] = {}
    while len(accepted) < args.count and tried < budget:
        jobs = [(args.c, derive_seed(args.seed, args.c, i), args.ica_b)
                for i in range(tried, min(tried + batch, budget))]
        tried += len(jobs)
        for inst, status, n_gs in _map(_gen_attempt, jobs, args.workers):
            if len(accepted) >= args.count:
                break
            stats["attempts"] += 1
            stats[status] += 1
            if n_gs is not None:
                n_gs_seen[str(n_gs)] = n_gs_seen.get(str(n_gs), 0) + 1
            if inst is not None:
                accepted.append(inst)
    stats["n_gs_histogram"] = dict(sorted(n_gs_seen.items(), key=lambda kv: int(kv[0])))
    entries = []
    for idx, inst in enumerate(accepted):
        name = f"c{args.c}-{idx:04d}.inst"
        io.write_instance(out / name, inst)
        entries.append({"file": name, "hash": inst.content_hash, "seed": inst.seed,
                        "k": inst.meta["k"], "n_gs": inst.meta["n_gs"], "flags": list(inst.meta["flags"])})
    man = io.ExperimentManifest(
        sizes=[args.c], n_sa=args.count, master_seed=args.seed, instances=entries,
        pt=asdict(DESK_PT), sqa=asdict(SqaParams()), sa=asdict(SASampler()),
        gauges=100, reads_per_gauge=1000,
        noise_grid=[[f * 5, f * 5] for f in (0.0, 0.05, 0.1)], stats=stats)
    io.write_manifest(out / f"manifest-c{args.c}.json", man)
    print(f"gen c={args.c}: accepted {stats['accepted']} of {stats['attempts']} attempts "
          f"(rejected {stats['rejected']}, free-spin failures {stats['free-spin']}, "
          f"unconverged {stats['unconverged']}); N_GS seen {stats['n_gs_histogram']}")
    if not accepted:
        return 1
    return 0 if len(accepted) == args.count else 1


# ---------------------------------------------------------------------- count

def _count_one(job):
    path, out, seed, ica_b = job
    ham = io.read_hamiltonian(path)
    base = ham.base
    if isinstance(ham, NoisyInstance) or ham.graph.c > FRONTIER_MAX_C:
        if ham.graph.num_qubits <= BRUTE_FORCE_MAX_N:
            gs = brute_force_enumerate(ham)
        elif isinstance(ham, NoisyInstance):
            raise OracleInfeasible("noisy instances can only be counted by brute force (N <= 28)")
        else:
            res = ica_enumerate(ham, replace(DESK_PT, b=ica_b, seed=seed))
            if not res.converged:
                raise OracleInfeasible(f"heuristic count did not converge ({res.status})")
            gs = res.ground_states
    else:
        gs = frontier_enumerate(ham)
    target = Path(out) / (Path(path).stem + ".gs")
    io.write_ground_states(target, gs, ham.content_hash if isinstance(ham, NoisyInstance) else base.content_hash)
    return f"{path}: E_min {gs.min_energy}, N_GS {gs.count} ({'exact' if gs.exact else 'heuristic'}) -> {target}"


def cmd_count(args) -> int:
    jobs = []
    for p in args.instances:
        try:
            h = io.read_hamiltonian(p).content_hash
        except (io.FormatError, OSError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        jobs.append((p, args.out, derive_seed(args.seed, hash_key(h)), args.ica_b))
    try:
        for line in _map(_count_one, jobs, args.workers):
            print(line)
    except OracleInfeasible as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


# --------------------------------------------------------------------- sample

def make_sampler(args):
    factor = SWEEP_PRESETS[args.sweep_budget]
    if args.sampler == "sqa":
        p = SqaParams(trotter_slices=args.slices, sweeps=args.sweeps, temperature=args.temperature)
        return SQASampler(p.with_budget(factor))
    if args.sampler == "ica":
        # equilibrium sampler: the budget preset does not apply
        return ICASampler(replace(DESK_PT, b=args.ica_b))
    if args.sampler == "sa":
        return SASampler(steps=args.sa_steps * factor)
    raise ValueError(f"unknown sampler {args.sampler!r}")


def _sample_one(job):
    path, args, seed = job
    ham = io.read_hamiltonian(path)
    sampler = make_sampler(args)
    recs = run_with_gauges(ham, sampler, args.gauges, args.reads, seed)
    params = asdict(sampler.params) if hasattr(sampler, "params") else asdict(sampler)
    header = {"instance": ham.base.content_hash, "hamiltonian": ham.content_hash,
              "source": Path(path).name, "sampler": args.sampler, "params": params,
              "sweep_budget": args.sweep_budget, "gauges": args.gauges, "reads": args.reads,
              "seed": seed}
    if isinstance(sampler, ICASampler):
        header["ica_status"] = sampler.statuses
    target = Path(args.out) / f"{Path(path).stem}.{args.sampler}.{args.sweep_budget}.jsonl"
    io.write_records(target, header, recs)
    e_min = min(r.energy for r in recs)
    at_min = sum(1 for r in recs if r.energy == e_min)
    line = f"{path}: {len(recs)} records -> {target}; lowest energy {e_min} hit {at_min / len(recs):.4f}"
    if isinstance(sampler, ICASampler):
        bad = sum(s != "converged" for s in sampler.statuses)
        line += f"; ica {'converged' if not bad else f'{bad} unconverged gauge runs'}"
    return line


def cmd_sample(args) -> int:
    if args.sampler not in ("sa", "sqa", "ica"):
        return _usage(f"unknown sampler {args.sampler!r} (choose sa, sqa or ica)")
    if args.gauges < 1 or args.reads < 1:
        return _usage("--gauges and --reads must be positive")
    jobs = []
    for p in args.instances:
        try:
            h = io.read_hamiltonian(p).content_hash
        except (io.FormatError, OSError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        jobs.append((p, args, derive_seed(args.seed, hash_key(h))))
    for line in _map(_sample_one, jobs, args.workers):
        print(line)
    return 0


# -------------------------------------------------------------------- analyze

def _load_ground_states(paths):
    table = {}
    for p in paths:
        gs, h = io.read_ground_states(p)
        table[h] = gs
    return table


def _analyze_one(job):
    path, gs_table, args = job
    head, recs = io.read_records(path)
    h = head.get("instance")
    if h not in gs_table:
        raise io.FormatError(f"{path}: instance hash {str(h)[:12]} matches no ground-state file")
    gs = gs_table[h]
    hist = tally(recs, gs, instance_id=h[:12], sampler_id=head.get("sampler", ""))
    rng = np.random.default_rng(derive_seed(args.seed, hash_key(h), len(recs)))
    n = gs.configs[0].n if gs.configs else 0
    rep = fairness_report(hist, args.bootstrap, rng, args.baseline_trials, n)
    return Path(path).stem, rep


def _run_reports(paths, gs_table, args):
    out = _map(_analyze_one, [(p, gs_table, args) for p in paths], args.workers)
    kept = min_solutions_filter([r for _, r in out], args.floor)
    keep_ids = {id(r) for r in kept}
    return [(name, r) for name, r in out if id(r) in keep_ids], len(out) - len(kept)


def cmd_analyze(args) -> int:
    if args.bootstrap < 1000:
        return _usage("--bootstrap must be at least 1000")
    try:
        gs_table = _load_ground_states(args.ground_states)
        run_a, dropped = _run_reports(args.records, gs_table, args)
        run_b, dropped_b = ([], 0)
        if args.compare:
            run_b, dropped_b = _run_reports(args.compare, gs_table, args)
    except io.FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    out = Path(args.out)
    rows = [dict(r.row(), records=name) for name, r in run_a + run_b]
    io.write_atomic(out / "report.tsv", io.format_report_table(rows))
    for name, r in run_a + run_b:
        io.write_atomic(out / "ranks" / f"{name}.csv", io.format_rank_csv(r.histogram))
    print(f"analyze: {len(run_a) + len(run_b)} reports (dropped {dropped + dropped_b} below "
          f"{args.floor} ground-state hits) -> {out / 'report.tsv'}")
    if args.compare:
        cmp = compare_runs([r for _, r in run_a], [r for _, r in run_b])
        io.write_atomic(out / "comparison.tsv", io.format_comparison(cmp))
        print(f"compare: {len(cmp)} paired instances -> {out / 'comparison.tsv'}")
    for name, r in run_a + run_b:
        base = f"baseline ci [{r.baseline.ci[0]:.4f}, {r.baseline.ci[1]:.4f}]" if r.baseline else "no hits"
        print(f"  {name}: N_GS {r.n_gs} hits {r.total} theta_max {r.theta_max:.4f} "
              f"ci [{r.ci[0]:.4f}, {r.ci[1]:.4f}] {base}")
    return 0


# ---------------------------------------------------------------------- noise

def cmd_noise(args) -> int:
    if args.sigma_j < 0 or args.sigma_h < 0:
        return _usage("noise standard deviations must be non-negative")
    for p in args.instances:
        try:
            inst = io.read_instance(p)
        except (io.FormatError, OSError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        seed = derive_seed(args.seed, hash_key(inst.content_hash))
        noisy = apply_noise(inst, args.sigma_j, args.sigma_h, seed)
        target = Path(args.out) / f"{Path(p).stem}.sJ{args.sigma_j:g}-sh{args.sigma_h:g}.noisy"
        io.write_noisy(target, noisy)
        print(f"{p}: sigma_J {args.sigma_j:g} sigma_h {args.sigma_h:g} -> {target}")
    return 0


# ----------------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    def globals_(suppress):
        # subcommands repeat the global flags without defaults so a value
        # given before the subcommand is not overwritten
        d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
        p = argparse.ArgumentParser(add_help=False)
        p.add_argument("--seed", type=int, default=d(0), help="master seed")
        p.add_argument("--workers", type=int, default=d(1), help="processes across instances")
        p.add_argument("--out", default=d("out"), help="output directory")
        p.add_argument("-v", "--verbose", action="store_true", default=d(False))
        return p

    common = globals_(True)
    ap = argparse.ArgumentParser(prog="fairsample", parents=[globals_(False)],
                                 description="Fair-sampling benchmarks on Chimera spin glasses.")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="generate filtered instances")
    g.add_argument("--c", type=int, required=True, help="lattice side (N = 8 c^2)")
    g.add_argument("--count", type=int, required=True, help="accepted instances wanted")
    g.add_argument("--max-attempts", type=int, default=0, help="draw budget (default 200*count+200)")
    g.add_argument("--ica-b", type=int, default=DESK_PT.b, help="log2 sweeps for heuristic counting (c > 4)")
    g.set_defaults(fn=cmd_gen)

    c = sub.add_parser("count", parents=[common], help="enumerate ground states")
    c.add_argument("instances", nargs="+")
    c.add_argument("--ica-b", type=int, default=DESK_PT.b)
    c.set_defaults(fn=cmd_count)

    s = sub.add_parser("sample", parents=[common], help="draw gauged samples")
    s.add_argument("instances", nargs="+")
    s.add_argument("--sampler", required=True, help="sa, sqa or ica")
    s.add_argument("--gauges", type=int, default=10)
    s.add_argument("--reads", type=int, default=100, help="reads per gauge")
    s.add_argument("--sweep-budget", choices=sorted(SWEEP_PRESETS), default="t20",
                   help="sqa/sa budget preset; t200 is ten times t20")
    s.add_argument("--sweeps", type=int, default=SqaParams.sweeps, help="SQA sweeps at t20")
    s.add_argument("--slices", type=int, default=SqaParams.trotter_slices)
    s.add_argument("--temperature", type=float, default=SqaParams.temperature)
    s.add_argument("--ica-b", type=int, default=DESK_PT.b)
    s.add_argument("--sa-steps", type=int, default=SASampler.steps)
    s.set_defaults(fn=cmd_sample)

    a = sub.add_parser("analyze", parents=[common], help="fairness reports")
    a.add_argument("records", nargs="+")
    a.add_argument("--ground-states", nargs="+", required=True)
    a.add_argument("--compare", nargs="+", help="second run, paired by instance")
    a.add_argument("--floor", type=int, default=MIN_SOLUTIONS)
    a.add_argument("--bootstrap", type=int, default=BOOTSTRAP_RESAMPLES)
    a.add_argument("--baseline-trials", type=int, default=2000)
    a.set_defaults(fn=cmd_analyze)

    n = sub.add_parser("noise", parents=[common], help="perturb couplers and fields")
    n.add_argument("instances", nargs="+")
    n.add_argument("--sigma-j", type=float, required=True)
    n.add_argument("--sigma-h", type=float, required=True)
    n.set_defaults(fn=cmd_noise)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
