"""Accuracy of a disambiguation against ground truth, and experiment runs."""

from __future__ import annotations

import csv
import io
import json
import statistics
from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, NamedTuple, TextIO

from .core import Dataset, Partition
from .disambiguation import Method, author_count, choose_by_ratio, count_ratio, disambiguate
from .errors import InsufficientDataError, MissingTruthError
from .simulator import SimulationConfig, preset, simulate


@dataclass(frozen=True)
class ContaminationReport:
    """How many true individuals a partition split, merged, or both."""

    n_individuals: int
    n_split: int
    n_merge_affected: int
    n_compromised: int
    rate_percent: float


def _check_inputs(ds: Dataset, p: Partition) -> None:
    if not ds.is_simulated:
        raise MissingTruthError("contamination needs a simulated dataset with true author ids")
    if len(p) == 0:
        raise ValueError("partition is empty")
    if len(p) != len(ds) or any(occ.record_id not in p.assignment for occ in ds.occurrences):
        raise ValueError("partition does not cover every record of the dataset exactly once")


def _report(individuals: set[int], split: set[int], merged: set[int]) -> ContaminationReport:
    compromised = split | merged
    n = len(individuals)
    return ContaminationReport(n, len(split), len(merged), len(compromised), 100.0 * len(compromised) / n)


def contamination(ds: Dataset, p: Partition) -> ContaminationReport:
    """Percentage of true individuals whose identity is compromised.

    An individual is split when its occurrences fall into two or more
    clusters, and merge-affected when any of its clusters also holds
    another individual. Either way it counts once as compromised.
    """
    _check_inputs(ds, p)
    clusters_of: dict[int, set[int]] = {}
    members_of: dict[int, set[int]] = {}
    for occ in ds.occurrences:
        cid = p.assignment[occ.record_id]
        clusters_of.setdefault(occ.true_author_id, set()).add(cid)
        members_of.setdefault(cid, set()).add(occ.true_author_id)
    split = {i for i, cs in clusters_of.items() if len(cs) > 1}
    merged: set[int] = set()
    for members in members_of.values():
        if len(members) > 1:
            merged |= members
    return _report(set(clusters_of), split, merged)


def brute_force_contamination(ds: Dataset, p: Partition) -> ContaminationReport:
    """Same metric by explicit comparison of every pair of records.

    Quadratic; meant as an independent check on small inputs.
    """
    _check_inputs(ds, p)
    occs = ds.occurrences
    split: set[int] = set()
    merged: set[int] = set()
    for a in range(len(occs)):
        ia = occs[a].true_author_id
        ca = p.assignment[occs[a].record_id]
        for b in range(a + 1, len(occs)):
            ib = occs[b].true_author_id
            same_cluster = ca == p.assignment[occs[b].record_id]
            if ia == ib and not same_cluster:
                split.add(ia)
            elif ia != ib and same_cluster:
                merged.add(ia)
                merged.add(ib)
    return _report({o.true_author_id for o in occs}, split, merged)


class TopKOverlap(NamedTuple):
    selected_k: int
    n_matching: int
    true_k: int


def _top_with_ties(counts: Mapping[int, int], k: int) -> list[int]:
    ranked = sorted(counts, key=lambda key: (-counts[key], key))
    cutoff = counts[ranked[k - 1]]
    return [key for key in ranked if counts[key] >= cutoff]


def top_k_overlap(ds: Dataset, p: Partition, k: int) -> TopKOverlap:
    """Compare the k most productive authors with the k most productive individuals.

    Both lists grow to include everything tied with the k-th entry. A
    cluster is credited to its majority individual (lowest id on ties);
    ``n_matching`` counts distinct true-top individuals credited this way.
    """
    _check_inputs(ds, p)
    if k < 1:
        raise ValueError("k must be >= 1")
    cluster_sizes = Counter(p.assignment.values())
    pubs = Counter(occ.true_author_id for occ in ds.occurrences)
    if k > len(cluster_sizes) or k > len(pubs):
        raise IndexError(f"k={k} exceeds {len(cluster_sizes)} clusters or {len(pubs)} individuals")
    top_clusters = _top_with_ties(cluster_sizes, k)
    true_top = set(_top_with_ties(pubs, k))

    wanted = set(top_clusters)
    composition: dict[int, Counter[int]] = {cid: Counter() for cid in wanted}
    for occ in ds.occurrences:
        cid = p.assignment[occ.record_id]
        if cid in wanted:
            composition[cid][occ.true_author_id] += 1
    credited = set()
    for cid in top_clusters:
        comp = composition[cid]
        majority = min(comp, key=lambda i: (-comp[i], i))
        if majority in true_top:
            credited.add(majority)
    return TopKOverlap(len(top_clusters), len(credited), len(true_top))


# -- experiments -----------------------------------------------------------


@dataclass(frozen=True)
class ReplicateResult:
    preset: str
    replicate: int
    seed: int
    n_occurrences: int
    reports: dict[str, ContaminationReport]
    author_counts: dict[str, int]
    selected: str
    ratio: float

    def to_json(self) -> dict[str, Any]:
        out = asdict(self)
        out["reports"] = {m: asdict(r) for m, r in self.reports.items()}
        return out


@dataclass(frozen=True)
class CellSummary:
    mean: float
    std: float
    n: int


@dataclass(frozen=True)
class ExperimentResult:
    presets: tuple[str, ...]
    methods: tuple[Method, ...]
    replicates: tuple[ReplicateResult, ...]
    base_seed: int
    configs: dict[str, dict[str, Any]] = field(default_factory=dict)

    def rates(self, preset_name: str, method: Method | str) -> list[float]:
        m = str(Method(method))
        return [r.reports[m].rate_percent for r in self.replicates if r.preset == preset_name]

    def cell(self, preset_name: str, method: Method | str) -> CellSummary:
        rates = self.rates(preset_name, method)
        if not rates:
            raise KeyError((preset_name, str(method)))
        std = statistics.stdev(rates) if len(rates) > 1 else 0.0
        return CellSummary(statistics.fmean(rates), std, len(rates))

    def selections(self, preset_name: str) -> list[str]:
        return [r.selected for r in self.replicates if r.preset == preset_name]

    def matrix_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["preset", *(str(m) for m in self.methods)])
        for name in self.presets:
            row = [name]
            for m in self.methods:
                c = self.cell(name, m)
                row.append(f"{c.mean:.2f}±{c.std:.2f}")
            writer.writerow(row)
        return buf.getvalue()

    def long_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["preset", "method", "replicate", "rate"])
        for r in self.replicates:
            for m in self.methods:
                writer.writerow([r.preset, str(m), r.replicate, repr(r.reports[str(m)].rate_percent)])
        return buf.getvalue()

    def to_json(self) -> dict[str, Any]:
        summary = {
            name: {str(m): asdict(self.cell(name, m)) for m in self.methods} for name in self.presets
        }
        return {
            "base_seed": self.base_seed,
            "presets": list(self.presets),
            "methods": [str(m) for m in self.methods],
            "summary": summary,
            "replicates": [r.to_json() for r in self.replicates],
            "configs": self.configs,
        }

    def write_json(self, stream: TextIO) -> None:
        json.dump(self.to_json(), stream, indent=2, sort_keys=True, allow_nan=True)
        stream.write("\n")


def replicate_seed(base_seed: int, replicate: int) -> int:
    return base_seed ^ replicate


def run_replicate(label: str, cfg: SimulationConfig, methods: Sequence[Method], replicate: int, seed: int) -> ReplicateResult:
    cfg = cfg.with_overrides({"seed": seed})
    ds = simulate(cfg)
    needed = {Method.FIRST_INITIAL, Method.ALL_INITIALS, *methods}
    partitions = {m: disambiguate(ds, m) for m in Method if m in needed}
    counts = {str(m): author_count(p) for m, p in partitions.items()}
    ratio = count_ratio(counts["first_initial"], counts["all_initials"])
    reports = {str(m): contamination(ds, partitions[m]) for m in methods}
    return ReplicateResult(label, replicate, seed, len(ds), reports, counts, str(choose_by_ratio(ratio)), ratio)


def _run_replicate_json(args: tuple[str, dict[str, Any], list[str], int, int]) -> ReplicateResult:
    label, cfg_json, methods, replicate, seed = args
    return run_replicate(label, SimulationConfig.from_json(cfg_json), [Method(m) for m in methods], replicate, seed)


def resolve_presets(
    presets: Sequence[str] | Mapping[str, SimulationConfig],
    overrides: Mapping[str, Any] | None = None,
) -> dict[str, SimulationConfig]:
    if isinstance(presets, Mapping):
        configs = dict(presets)
    else:
        configs = {name: preset(name) for name in presets}
    if overrides:
        configs = {name: cfg.with_overrides(overrides) for name, cfg in configs.items()}
    return configs


def run_experiment(
    presets: Sequence[str] | Mapping[str, SimulationConfig],
    methods: Iterable[Method | str] = tuple(Method),
    replicates: int = 10,
    base_seed: int = 0,
    overrides: Mapping[str, Any] | None = None,
    workers: int = 1,
) -> ExperimentResult:
    """Simulate each preset ``replicates`` times and score every method.

    Replicate ``i`` of every preset is generated with seed ``base_seed ^ i``.
    With ``workers > 1`` replicates run in separate processes; results are
    ordered by (preset, replicate) either way.
    """
    if replicates < 1:
        raise InsufficientDataError("replicates must be >= 1")
    method_list = tuple(Method(m) for m in methods)
    configs = resolve_presets(presets, overrides)
    tasks = [
        (label, cfg.to_json(), [str(m) for m in method_list], i, replicate_seed(base_seed, i))
        for label, cfg in configs.items()
        for i in range(replicates)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_replicate_json, tasks))
    else:
        results = [_run_replicate_json(t) for t in tasks]
    return ExperimentResult(
        tuple(configs),
        method_list,
        tuple(results),
        base_seed,
        {label: {**cfg.to_json(), "seed": None} for label, cfg in configs.items()},
    )


def summary_rows(result: ExperimentResult) -> list[dict[str, Any]]:
    rows = []
    for name in result.presets:
        for m in result.methods:
            c = result.cell(name, m)
            rows.append({"preset": name, "method": str(m), "mean": c.mean, "std": c.std, "n": c.n})
    return rows

