"""Benchmark harness: hyperparameter sweeps, scenario sweeps, head-to-head stats.

Cells vary one scenario factor at a time (initial charge level, tool
placement policy, user preference) against a fixed baseline, mirroring a
bar-per-factor comparison. Per-cell seeds derive from (experiment seed, cell
index, pair index, repetition), independent of scheduling order, so reruns
with the same spec and seed reproduce identical plan costs.
"""
from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .aco import AcoParams, run_aco
from .errors import EmobilityError
from .exact import exact_optimum
from .graph import Mode, ReducedGraphFactory, load_graph
from .plans import Leg, Plan, validate_plan
from .qlearning import QParams, extract_policy_path, train
from .scenario import UserPreference, distribute_tools, load_scenario, sample_od_pairs
from .seeding import int_seed
from .space import ActionSpace
from .synth import grid_network, grid_scenario_document

# Comparison-cell planner settings unless the experiment overrides them: a
# fast colony against fully trained value iteration, step-capped for
# hub-level graphs where optimal plans stay short.
BENCH_ACO = {"n_ants": 64, "n_iterations": 10, "step_cap": 24}
BENCH_QL = {"n_episodes": 2000, "step_cap": 60, "eval_every": 0}

REFERENCE_NOTES = (
    "reference targets (large urban map, for orientation only):",
    "aco n_ants=1600 -> mean cost ~4500 s, exec < 2 s",
    "qlearning n_episodes=2000 -> mean cost ~2100 s, exec ~20 s",
)


@dataclass(frozen=True)
class ExperimentSpec:
    experiment_id: str = "experiment"
    grid_n: int = 16
    grid_spacing_m: float = 250.0
    n_hubs: int = 20
    n_od_pairs: int = 100
    soc_levels: tuple = (50.0, 100.0)
    distributions: tuple = ("Fixed", "Random")
    preferences: tuple = ()  # tuples of mode names; default all + no-ECar
    baseline_soc: float = 100.0
    baseline_distribution: str = "Fixed"
    repetitions: int = 1
    seed: int = 0
    aco: dict = field(default_factory=dict)
    qlearning: dict = field(default_factory=dict)
    workers: int = 1

    def __post_init__(self):
        if self.n_od_pairs < 1:
            raise ValueError("n_od_pairs must be >= 1")
        for name in ("soc_levels", "distributions", "preferences"):
            if getattr(self, name) is None:
                raise ValueError(f"{name} must be a list")

    @classmethod
    def from_dict(cls, raw):
        raw = dict(raw or {})
        grid = raw.pop("grid", {})
        if grid:
            raw.setdefault("grid_n", grid.get("n", 16))
            raw.setdefault("grid_spacing_m", grid.get("spacing_m", 250.0))
        baseline = raw.pop("baseline", {})
        if baseline:
            raw.setdefault("baseline_soc", baseline.get("soc", 100.0))
            raw.setdefault("baseline_distribution", baseline.get("distribution", "Fixed"))
        known = {f for f in cls.__dataclass_fields__}
        spec = {k: v for k, v in raw.items() if k in known}
        for name in ("soc_levels", "distributions"):
            if name in spec:
                spec[name] = tuple(spec[name])
        if "preferences" in spec:
            spec["preferences"] = tuple(tuple(p) for p in spec["preferences"])
        return cls(**spec)

    def preference_cells(self):
        if self.preferences:
            return self.preferences
        all_modes = tuple(m.value for m in Mode)
        return (all_modes, tuple(m.value for m in Mode if m is not Mode.ECar))


@dataclass
class RunRecord:
    experiment_id: str
    variant: str
    origin: str
    destination: str
    planner: str
    plan_cost: float | None
    exec_time_s: float
    seed: int
    valid: bool
    legs: list

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, line):
        return cls(**json.loads(line))


def _legs_payload(plan):
    return [[leg.src, leg.dst, leg.mode.value, leg.time_s, leg.dist_m] for leg in plan.legs]


def plan_from_legs_payload(legs):
    return Plan.from_legs(Leg(s, d, Mode(m), t, dist) for s, d, m, t, dist in legs)


def _cells(spec):
    cells = []
    for soc in spec.soc_levels:
        cells.append(("soc", soc))
    for dist in spec.distributions:
        cells.append(("distribution", dist))
    for pref in spec.preference_cells():
        cells.append(("preference", pref))
    return cells


def _variant_label(factor, value):
    if factor == "preference":
        return f"preference={'+'.join(value)}"
    return f"{factor}={value}"


def _cell_scenario(spec, g, base_sc, factor, value):
    soc = spec.baseline_soc
    policy = spec.baseline_distribution
    pref = spec.preference_cells()[0]
    if factor == "soc":
        soc = value
    elif factor == "distribution":
        policy = value
    elif factor == "preference":
        pref = value
    sc = distribute_tools(base_sc, policy, int_seed(spec.seed, 8, 0 if policy == "Fixed" else 1), soc=soc)
    return replace(sc, preference=UserPreference.of(Mode(m) for m in pref))


def _run_one(planner, reduced, sc, space, seed, aco_overrides, ql_overrides):
    """(plan, cost, exec seconds, valid) for one planner on one pair."""
    start = time.perf_counter()
    plan = None
    try:
        if planner == "aco":
            params = AcoParams.from_dict({**BENCH_ACO, **aco_overrides}, seed=seed)
            plan = run_aco(reduced, sc, params, space=space).plan
        elif planner == "qlearning":
            params = QParams.from_dict({**BENCH_QL, **ql_overrides}, seed=seed)
            result = train(reduced, sc, params, space=space)
            plan = extract_policy_path(result.qtable, reduced, sc, space=space).plan
        elif planner == "oracle":
            plan = exact_optimum(reduced, sc).plan
        else:
            raise ValueError(f"unknown planner {planner!r}")
    except EmobilityError:
        plan = None
    elapsed = time.perf_counter() - start
    if plan is None:
        return None, None, elapsed, False
    valid = not validate_plan(plan, reduced, sc)
    return plan, plan.total_time_s if valid else None, elapsed, valid


def _run_cell(spec, cell_index, factor, value, pairs):
    net = grid_network(spec.grid_n, spec.grid_spacing_m)
    g = load_graph(net)
    base_sc = load_scenario(grid_scenario_document(net, spec.n_hubs, seed=spec.seed), g)
    sc = _cell_scenario(spec, g, base_sc, factor, value)
    hub_nodes = [h.node for h in sc.hubs]
    factory = ReducedGraphFactory(sc.graph)
    variant = _variant_label(factor, value)

    records = []
    for pair_index, (origin, dest) in enumerate(pairs):
        reduced = factory.build(origin, dest, hub_nodes)
        space = ActionSpace(reduced, sc)
        for rep in range(max(1, spec.repetitions)):
            for planner_id, planner in enumerate(("aco", "qlearning")):
                seed = int_seed(spec.seed, 7, cell_index, pair_index, rep, planner_id)
                plan, cost, elapsed, valid = _run_one(
                    planner, reduced, sc, space, seed, spec.aco, spec.qlearning
                )
                records.append(
                    RunRecord(
                        experiment_id=spec.experiment_id,
                        variant=variant,
                        origin=origin,
                        destination=dest,
                        planner=planner,
                        plan_cost=cost,
                        exec_time_s=elapsed,
                        seed=seed,
                        valid=valid,
                        legs=_legs_payload(plan) if plan is not None and valid else [],
                    )
                )
    return records


@dataclass
class CellSummary:
    variant: str
    n: int  # valid pair comparisons
    n_invalid: int
    ql_better_frac: float
    tie_frac: float
    aco_better_frac: float
    mean_cost_ql: float
    mean_cost_aco: float
    mean_exec_ql: float
    mean_exec_aco: float


@dataclass
class ComparisonSummary:
    experiment_id: str
    cells: list  # of CellSummary
    records: list  # of RunRecord


def summarize_cell(variant, records):
    by_pair = {}
    for rec in records:
        if rec.variant != variant:
            continue
        by_pair.setdefault((rec.origin, rec.destination), {})[rec.planner] = rec
    ql_b = tie = aco_b = invalid = 0
    cost_ql, cost_aco, exec_ql, exec_aco = [], [], [], []
    for pair, by_planner in sorted(by_pair.items()):
        aco_rec, ql_rec = by_planner.get("aco"), by_planner.get("qlearning")
        if aco_rec is not None:
            exec_aco.append(aco_rec.exec_time_s)
        if ql_rec is not None:
            exec_ql.append(ql_rec.exec_time_s)
        if aco_rec is None or ql_rec is None or not (aco_rec.valid and ql_rec.valid):
            invalid += 1
            continue
        cost_aco.append(aco_rec.plan_cost)
        cost_ql.append(ql_rec.plan_cost)
        if ql_rec.plan_cost < aco_rec.plan_cost:
            ql_b += 1
        elif ql_rec.plan_cost > aco_rec.plan_cost:
            aco_b += 1
        else:
            tie += 1
    n = ql_b + tie + aco_b
    frac = lambda k: k / n if n else 0.0
    mean = lambda xs: float(np.mean(xs)) if xs else float("nan")
    return CellSummary(
        variant=variant,
        n=n,
        n_invalid=invalid,
        ql_better_frac=frac(ql_b),
        tie_frac=frac(tie),
        aco_better_frac=frac(aco_b),
        mean_cost_ql=mean(cost_ql),
        mean_cost_aco=mean(cost_aco),
        mean_exec_ql=mean(exec_ql),
        mean_exec_aco=mean(exec_aco),
    )


def run_comparison(spec, progress=None):
    """Head-to-head comparison across all scenario cells.

    Both planners answer every (origin, destination) pair in every cell; the
    summary reports the fraction of pairs each planner wins plus ties, with
    invalid runs excluded from fractions but counted.
    """
    g = load_graph(grid_network(spec.grid_n, spec.grid_spacing_m))
    pairs = sample_od_pairs(g, spec.n_od_pairs, int_seed(spec.seed, 9))
    cells = _cells(spec)

    all_records = []
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            futures = [
                pool.submit(_run_cell, spec, i, factor, value, pairs)
                for i, (factor, value) in enumerate(cells)
            ]
            for i, fut in enumerate(futures):
                all_records.extend(fut.result())
                if progress:
                    progress(f"cell {i + 1}/{len(cells)} done")
    else:
        for i, (factor, value) in enumerate(cells):
            all_records.extend(_run_cell(spec, i, factor, value, pairs))
            if progress:
                progress(f"cell {i + 1}/{len(cells)} done")

    summaries = [summarize_cell(_variant_label(f, v), all_records) for f, v in cells]
    return ComparisonSummary(spec.experiment_id, summaries, all_records)


@dataclass
class SweepRow:
    planner: str
    setting: int  # ant count or episode count
    mean_cost: float
    std_cost: float
    mean_exec_s: float
    std_exec_s: float
    n: int


def sweep_hyperparams(reduced, sc, ant_counts, episode_counts, repetitions=30, seed=0,
                      aco_overrides=None, ql_overrides=None, progress=None):
    """Cost/time trade-off sweep on one fixed (origin, destination) pair."""
    space = ActionSpace(reduced, sc)
    rows = []
    for setting in ant_counts:
        costs, execs = [], []
        for rep in range(repetitions):
            params = AcoParams.from_dict(aco_overrides or {}, n_ants=setting,
                                         seed=int_seed(seed, 10, setting, rep))
            start = time.perf_counter()
            try:
                result = run_aco(reduced, sc, params, space=space)
                costs.append(result.cost)
            except EmobilityError:
                pass
            execs.append(time.perf_counter() - start)
        rows.append(_sweep_row("aco", setting, costs, execs))
        if progress:
            progress(f"aco n_ants={setting} done")
    for setting in episode_counts:
        costs, execs = [], []
        for rep in range(repetitions):
            params = QParams.from_dict(ql_overrides or {}, n_episodes=setting,
                                       seed=int_seed(seed, 11, setting, rep))
            start = time.perf_counter()
            result = train(reduced, sc, params, space=space)
            rollout = extract_policy_path(result.qtable, reduced, sc, space=space)
            if rollout.plan is not None:
                costs.append(rollout.cost)
            execs.append(time.perf_counter() - start)
        rows.append(_sweep_row("qlearning", setting, costs, execs))
        if progress:
            progress(f"qlearning n_episodes={setting} done")
    return rows


def _sweep_row(planner, setting, costs, execs):
    mean = lambda xs: float(np.mean(xs)) if xs else float("nan")
    std = lambda xs: float(np.std(xs)) if xs else float("nan")
    return SweepRow(planner, setting, mean(costs), std(costs), mean(execs), std(execs), len(costs))


def _fresh_path(out_dir, stem, suffix):
    """Next non-clobbering path: stem.suffix, then stem-<timestamp>[.k].suffix."""
    base = out_dir / f"{stem}{suffix}"
    if not base.exists():
        return base
    stamp = time.strftime("%Y%m%d-%H%M%S")
    for k in range(1000):
        tag = f"-{stamp}" if k == 0 else f"-{stamp}.{k}"
        candidate = out_dir / f"{stem}{tag}{suffix}"
        if not candidate.exists():
            return candidate
    raise RuntimeError(f"cannot find a fresh name for {stem}{suffix}")


def persist_results(records, out_dir, summaries=None):
    """Append-only persistence: JSONL of run records plus a CSV summary.

    Never overwrites: reruns land in timestamp-suffixed files.
    """
    from pathlib import Path

    if not records:
        raise ValueError("records must be nonempty")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    records_path = _fresh_path(out_dir, "records", ".jsonl")
    with records_path.open("x") as fh:
        for rec in records:
            fh.write(rec.to_json() + "\n")

    summary_path = None
    if summaries is not None:
        summary_path = _fresh_path(out_dir, "summary", ".csv")
        with summary_path.open("x", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["variant", "n", "ql_better_frac", "tie_frac",
                 "mean_cost_ql", "mean_cost_aco", "mean_exec_ql", "mean_exec_aco"]
            )
            for cell in summaries:
                writer.writerow(
                    [cell.variant, cell.n, cell.ql_better_frac, cell.tie_frac,
                     cell.mean_cost_ql, cell.mean_cost_aco, cell.mean_exec_ql, cell.mean_exec_aco]
                )
    return records_path, summary_path


def persist_sweep(rows, out_dir):
    """One trace_<planner>.csv per planner, reference targets as comment lines."""
    from pathlib import Path

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for planner in ("aco", "qlearning"):
        mine = [r for r in rows if r.planner == planner]
        if not mine:
            continue
        path = _fresh_path(out_dir, f"trace_{planner}", ".csv")
        with path.open("x", newline="") as fh:
            for note in REFERENCE_NOTES:
                fh.write(f"# {note}\n")
            writer = csv.writer(fh)
            writer.writerow(["setting", "mean_cost", "std_cost", "mean_exec_s", "std_exec_s", "n"])
            for row in mine:
                writer.writerow([row.setting, row.mean_cost, row.std_cost,
                                 row.mean_exec_s, row.std_exec_s, row.n])
        paths.append(path)
    return paths
