"""Text file formats: instances, noisy instances, ground-state sets, sample
records and fairness reports.  All writes are atomic (temp file + rename)."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .chimera import build_chimera
from .instances import Instance, NoisyInstance
from .ising import SpinConfig
from .oracle import GroundStateSet
from .samplers.records import SampleRecord

INSTANCE_MAGIC = "fairsample-instance"
NOISY_MAGIC = "fairsample-noisy"
GS_MAGIC = "fairsample-groundstates"
RECORDS_MAGIC = "fairsample-records"
MANIFEST_MAGIC = "fairsample-manifest"
VERSION = 1


class FormatError(ValueError):
    """Malformed input file; the message names the file and line."""


def write_atomic(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _header(lines, path, magic):
    """Parse ``key value...`` lines up to the first data line; returns (dict, data_start)."""
    if not lines or lines[0].split() != [magic, str(VERSION)]:
        raise FormatError(f"{path}:1: expected '{magic} {VERSION}'")
    head = {}
    for n, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if not parts or not parts[0][0].isalpha():
            return head, n - 1
        head[parts[0]] = parts[1:]
    return head, len(lines)


def _int(value, path, n):
    try:
        return int(value)
    except ValueError:
        raise FormatError(f"{path}:{n}: expected an integer, got {value!r}") from None


def _float(value, path, n):
    try:
        return float(value)
    except ValueError:
        raise FormatError(f"{path}:{n}: expected a number, got {value!r}") from None


def _graph_header(g) -> list[str]:
    return [f"c {g.c}",
            "defect_qubits" + "".join(f" {q}" for q in g.defect_qubits),
            "defect_couplers" + "".join(f" {i}-{j}" for i, j in g.defect_couplers)]


def _graph_from_header(head, path):
    try:
        c = int(head["c"][0])
        dq = [int(x) for x in head.get("defect_qubits", [])]
        dc = [tuple(int(v) for v in x.split("-")) for x in head.get("defect_couplers", [])]
        return build_chimera(c, dq, dc)
    except (KeyError, IndexError, ValueError) as exc:
        raise FormatError(f"{path}: bad graph header: {exc}") from None


# ------------------------------------------------------------------ instances

def format_instance(inst: Instance) -> str:
    m = inst.meta
    lines = [f"{INSTANCE_MAGIC} {VERSION}", *_graph_header(inst.graph),
             f"seed {'' if inst.seed is None else inst.seed}".rstrip(),
             f"k {'' if m.get('k') is None else m['k']}".rstrip(),
             f"n_gs {'' if m.get('n_gs') is None else m['n_gs']}".rstrip(),
             "flags" + "".join(f" {f}" for f in m.get("flags", ())),
             f"hash {inst.content_hash}",
             f"couplers {len(inst.graph.active_couplers)}"]
    lines += [f"{i} {j} {inst.couplings[(i, j)]}" for i, j in inst.graph.active_couplers]
    return "\n".join(lines) + "\n"


def write_instance(path, inst: Instance) -> None:
    write_atomic(path, format_instance(inst))


def read_instance(path) -> Instance:
    lines = Path(path).read_text().splitlines()
    head, start = _header(lines, path, INSTANCE_MAGIC)
    g = _graph_from_header(head, path)
    couplings = {}
    for n in range(start + 1, len(lines) + 1):
        parts = lines[n - 1].split()
        if not parts:
            continue
        if len(parts) != 3:
            raise FormatError(f"{path}:{n}: expected 'i j J', got {lines[n - 1]!r}")
        i, j, v = (_int(x, path, n) for x in parts)
        couplings[(min(i, j), max(i, j))] = v
    declared = head.get("couplers")
    if declared and int(declared[0]) != len(couplings):
        raise FormatError(f"{path}: header declares {declared[0]} couplers, found {len(couplings)}")
    meta = {"flags": tuple(head.get("flags", []))}
    if head.get("k"):
        meta["k"] = int(head["k"][0])
    if head.get("n_gs"):
        meta["n_gs"] = int(head["n_gs"][0])
    seed = int(head["seed"][0]) if head.get("seed") else None
    try:
        inst = Instance(g, couplings, seed, meta)
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None
    if head.get("hash") and head["hash"][0] != inst.content_hash:
        raise FormatError(f"{path}: content hash mismatch")
    return inst


def format_noisy(noisy: NoisyInstance) -> str:
    base = noisy.base
    lines = [f"{NOISY_MAGIC} {VERSION}", *_graph_header(base.graph),
             f"base {base.content_hash}",
             f"sigma_J {noisy.sigma_J!r}", f"sigma_h {noisy.sigma_h!r}",
             f"seed {'' if noisy.seed is None else noisy.seed}".rstrip(),
             f"hash {noisy.content_hash}"]
    lines += [f"J {i} {j} {base.couplings[(i, j)]} {noisy.coupler_noise[(i, j)]!r}"
              for i, j in base.graph.active_couplers]
    lines += [f"h {q} {noisy.field_noise[q]!r}" for q in base.graph.active_qubits]
    return "\n".join(lines) + "\n"


def write_noisy(path, noisy: NoisyInstance) -> None:
    write_atomic(path, format_noisy(noisy))


def read_noisy(path) -> NoisyInstance:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0].split() != [NOISY_MAGIC, str(VERSION)]:
        raise FormatError(f"{path}:1: expected '{NOISY_MAGIC} {VERSION}'")
    head, J, dJ, h = {}, {}, {}, {}
    for n, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "J":
            if len(parts) != 5:
                raise FormatError(f"{path}:{n}: expected 'J i j J dJ'")
            i, j = sorted((_int(parts[1], path, n), _int(parts[2], path, n)))
            J[(i, j)] = _int(parts[3], path, n)
            dJ[(i, j)] = _float(parts[4], path, n)
        elif parts[0] == "h":
            if len(parts) != 3:
                raise FormatError(f"{path}:{n}: expected 'h q value'")
            h[_int(parts[1], path, n)] = _float(parts[2], path, n)
        else:
            head[parts[0]] = parts[1:]
    g = _graph_from_header(head, path)
    try:
        base = Instance(g, J)
        seed = int(head["seed"][0]) if head.get("seed") else None
        noisy = NoisyInstance(base, dJ, h, float(head["sigma_J"][0]), float(head["sigma_h"][0]), seed)
    except (KeyError, IndexError, ValueError) as exc:
        raise FormatError(f"{path}: {exc}") from None
    if head.get("base") and head["base"][0] != base.content_hash:
        raise FormatError(f"{path}: base hash mismatch")
    if set(h) != set(g.active_qubits):
        raise FormatError(f"{path}: field lines must cover every active qubit")
    if head.get("hash") and head["hash"][0] != noisy.content_hash:
        raise FormatError(f"{path}: content hash mismatch")
    return noisy


def read_hamiltonian(path):
    """Read either an instance or a noisy-instance file."""
    with open(path) as fh:
        first = fh.readline().split()
    if first and first[0] == NOISY_MAGIC:
        return read_noisy(path)
    return read_instance(path)


# ------------------------------------------------------------- ground states

def format_ground_states(gs: GroundStateSet, instance_hash: str) -> str:
    lines = [f"{GS_MAGIC} {VERSION}", f"instance {instance_hash}", f"min_energy {gs.min_energy}",
             f"n_gs {gs.count}", f"exact {int(gs.exact)}", f"status {gs.status}"]
    lines += [cfg.to_hex() for cfg in gs.configs]
    return "\n".join(lines) + "\n"


def write_ground_states(path, gs: GroundStateSet, instance_hash: str) -> None:
    write_atomic(path, format_ground_states(gs, instance_hash))


def read_ground_states(path) -> tuple[GroundStateSet, str]:
    """Returns the set and the hash of the instance it belongs to."""
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0].split() != [GS_MAGIC, str(VERSION)]:
        raise FormatError(f"{path}:1: expected '{GS_MAGIC} {VERSION}'")
    head, configs = {}, []
    for n, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if not parts:
            continue
        if ":" in parts[0]:
            try:
                configs.append(SpinConfig.from_hex(parts[0]))
            except ValueError:
                raise FormatError(f"{path}:{n}: bad config {parts[0]!r}") from None
        else:
            head[parts[0]] = parts[1:]
    try:
        e = head["min_energy"][0]
        min_e = int(e) if e.lstrip("-").isdigit() else float(e)
        gs = GroundStateSet(min_e, tuple(sorted(configs)), int(head["n_gs"][0]),
                            bool(int(head["exact"][0])), head.get("status", ["ok"])[0])
        return gs, head["instance"][0]
    except (KeyError, IndexError, ValueError) as exc:
        raise FormatError(f"{path}: bad header: {exc}") from None


# ------------------------------------------------------------------- records

def format_records(header: dict, records) -> str:
    head = {"format": RECORDS_MAGIC, "version": VERSION, **header}
    out = [json.dumps(head, sort_keys=True)]
    out += [json.dumps(r.to_json(), sort_keys=True) for r in records]
    return "\n".join(out) + "\n"


def write_records(path, header: dict, records) -> None:
    write_atomic(path, format_records(header, records))


def read_records(path) -> tuple[dict, list[SampleRecord]]:
    lines = Path(path).read_text().splitlines()
    try:
        head = json.loads(lines[0])
    except (IndexError, json.JSONDecodeError):
        raise FormatError(f"{path}:1: missing records header") from None
    if head.get("format") != RECORDS_MAGIC:
        raise FormatError(f"{path}:1: not a records file")
    recs = []
    for n, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            recs.append(SampleRecord.from_json(json.loads(line)))
        except (json.JSONDecodeError, KeyError, ValueError) as exc:
            raise FormatError(f"{path}:{n}: bad record: {exc}") from None
    return head, recs


# ------------------------------------------------------------------- reports

REPORT_COLUMNS = ["records", "instance", "N", "N_GS", "sampler", "total", "theta_max", "ci_low", "ci_high",
                  "baseline", "baseline_low", "baseline_high", "excited_rate"]


def _fmt(v):
    return f"{v:.6f}" if isinstance(v, float) else str(v)


def format_report_table(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, delimiter="\t", lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for row in rows:
        w.writerow([_fmt(row[c]) for c in REPORT_COLUMNS])
    return buf.getvalue()


def format_rank_csv(hist) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["rank_over_ngs", "count"])
    for x, cnt in zip(hist.normalized_rank, hist.counts):
        w.writerow([f"{x:.6f}", int(cnt)])
    return buf.getvalue()


def format_comparison(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, delimiter="\t", lineterminator="\n")
    w.writerow(["instance", "theta_a", "ci_a_low", "ci_a_high", "theta_b", "ci_b_low", "ci_b_high"])
    for r in rows:
        w.writerow([r.instance_id, *(f"{v:.6f}" for v in (r.theta_a, *r.ci_a, r.theta_b, *r.ci_b))])
    return buf.getvalue()


# ------------------------------------------------------------------ manifest

@dataclass
class ExperimentManifest:
    """Everything needed to rerun an experiment: sizes, seeds, parameters and artifacts.

    ``instances`` holds one dict per instance file with at least ``file``
    (relative to the manifest) and ``hash``.
    """

    sizes: list
    n_sa: int
    master_seed: int
    instances: list = field(default_factory=list)
    pt: dict = field(default_factory=dict)
    sqa: dict = field(default_factory=dict)
    sa: dict = field(default_factory=dict)
    gauges: int = 1
    reads_per_gauge: int = 1
    noise_grid: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    def to_text(self) -> str:
        return json.dumps({"format": MANIFEST_MAGIC, "version": VERSION, **asdict(self)},
                          indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_text(cls, text: str, path="manifest") -> "ExperimentManifest":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}:{exc.lineno}: {exc.msg}") from None
        if d.pop("format", None) != MANIFEST_MAGIC or d.pop("version", None) != VERSION:
            raise FormatError(f"{path}: not a version {VERSION} manifest")
        return cls(**d)

    def verify(self, root) -> None:
        """Every listed instance file exists and still has its recorded hash."""
        for entry in self.instances:
            f = Path(root) / entry["file"]
            if not f.exists():
                raise FileNotFoundError(f"manifest lists missing file {f}")
            got = read_hamiltonian(f).content_hash
            if got != entry["hash"]:
                raise FormatError(f"{f}: hash {got[:12]} differs from manifest {entry['hash'][:12]}")


def write_manifest(path, manifest: ExperimentManifest) -> None:
    write_atomic(path, manifest.to_text())


def read_manifest(path) -> ExperimentManifest:
    return ExperimentManifest.from_text(Path(path).read_text(), path)
