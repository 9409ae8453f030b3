"""Command line entry points: route queries, benchmarks, sweeps, the server."""
from __future__ import annotations

import json
from pathlib import Path

import click

from .aco import AcoParams, run_aco
from .bundle import load_bundle_file
from .errors import EmobilityError
from .exact import exact_optimum
from .graph import build_reduced_graph
from .harness import (
    ExperimentSpec,
    persist_results,
    persist_sweep,
    run_comparison,
    sweep_hyperparams,
)
from .qlearning import QParams, extract_policy_path, train


@click.group()
def main():
    """Shared E-mobility routing engine and emulation platform."""


def _plan_lines(plan):
    if not plan.legs:
        return ["  (already at destination)"]
    return [
        f"  {leg.src} -> {leg.dst}  {leg.mode.value:<8} {leg.time_s:9.1f} s  {leg.dist_m:9.1f} m"
        for leg in plan.legs
    ]


@main.command()
@click.option("--scenario", "scenario_path", required=True, type=click.Path(exists=True))
@click.option("--from", "origin", required=True)
@click.option("--to", "dest", required=True)
@click.option("--planner", type=click.Choice(["aco", "q", "oracle"]), default="aco")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--oracle", "with_oracle", is_flag=True, help="Also print the exact reference cost.")
@click.option("--json", "as_json", is_flag=True)
def route(scenario_path, origin, dest, planner, seed, with_oracle, as_json):
    """Plan one trip on a scenario bundle."""
    bundle = load_bundle_file(scenario_path)
    sc = bundle.scenario
    reduced = build_reduced_graph(sc.graph, origin, dest, [h.node for h in sc.hubs])
    try:
        if planner == "aco":
            result = run_aco(reduced, sc, AcoParams.from_dict(bundle.aco, seed=seed))
            plan, cost = result.plan, result.cost
        elif planner == "q":
            trained = train(reduced, sc, QParams.from_dict(bundle.qlearning, seed=seed))
            rollout = extract_policy_path(trained.qtable, reduced, sc)
            if rollout.plan is None:
                raise EmobilityError(f"greedy policy found no path ({rollout.reason})")
            plan, cost = rollout.plan, rollout.cost
        else:
            exact = exact_optimum(reduced, sc)
            plan, cost = exact.plan, exact.cost
    except EmobilityError as exc:
        raise click.ClickException(str(exc)) from exc

    oracle_cost = exact_optimum(reduced, sc).cost if with_oracle and planner != "oracle" else None
    if as_json:
        payload = {
            "planner": planner,
            "total_time_s": cost,
            "legs": [[l.src, l.dst, l.mode.value, l.time_s, l.dist_m] for l in plan.legs],
        }
        if oracle_cost is not None:
            payload["oracle_cost"] = oracle_cost
        click.echo(json.dumps(payload, indent=2))
        return
    click.echo(f"{planner}: total {cost:.1f} s")
    for line in _plan_lines(plan):
        click.echo(line)
    if oracle_cost is not None:
        click.echo(f"oracle reference: {oracle_cost:.1f} s")


@main.command()
@click.option("--spec", "spec_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--workers", type=int, default=None)
def bench(spec_path, out_dir, workers):
    """Run the scenario-cell comparison described by a spec file."""
    raw = json.loads(Path(spec_path).read_text())
    if workers is not None:
        raw["workers"] = workers
    spec = ExperimentSpec.from_dict(raw)
    summary = run_comparison(spec, progress=lambda msg: click.echo(msg, err=True))
    records_path, summary_path = persist_results(summary.records, out_dir, summary.cells)
    click.echo(f"records: {records_path}")
    click.echo(f"summary: {summary_path}")
    for cell in summary.cells:
        click.echo(
            f"{cell.variant}: n={cell.n} ql_better={cell.ql_better_frac:.3f} "
            f"tie={cell.tie_frac:.3f} aco_better={cell.aco_better_frac:.3f} "
            f"(invalid pairs: {cell.n_invalid})"
        )


@main.command()
@click.option("--spec", "spec_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", default=".", type=click.Path())
def sweep(spec_path, out_dir):
    """Hyperparameter sweep (ants / episodes vs cost and execution time)."""
    raw = json.loads(Path(spec_path).read_text())
    spec_dir = Path(spec_path).parent
    scenario_ref = raw["scenario"]
    if isinstance(scenario_ref, str):
        path = Path(scenario_ref)
        bundle = load_bundle_file(path if path.is_absolute() else spec_dir / path)
    else:
        from .bundle import load_bundle

        bundle = load_bundle(scenario_ref, base_dir=spec_dir)
    sc = bundle.scenario
    reduced = build_reduced_graph(sc.graph, raw["from"], raw["to"], [h.node for h in sc.hubs])
    rows = sweep_hyperparams(
        reduced,
        sc,
        ant_counts=raw.get("ants", [10, 100, 400, 1600]),
        episode_counts=raw.get("episodes", [100, 500, 2000]),
        repetitions=int(raw.get("repetitions", 30)),
        seed=int(raw.get("seed", 0)),
        aco_overrides=raw.get("aco"),
        ql_overrides=raw.get("qlearning"),
        progress=lambda msg: click.echo(msg, err=True),
    )
    for path in persist_sweep(rows, out_dir):
        click.echo(f"trace: {path}")
    for row in rows:
        click.echo(
            f"{row.planner} setting={row.setting}: cost {row.mean_cost:.1f} +/- {row.std_cost:.1f}, "
            f"exec {row.mean_exec_s * 1e3:.1f} +/- {row.std_exec_s * 1e3:.1f} ms (n={row.n})"
        )


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--scenario-dir", type=click.Path(exists=True), default=None)
@click.option("--static-dir", type=click.Path(exists=True), default=None)
def serve(host, port, scenario_dir, static_dir):
    """Run the HTTP service (optionally serving the web UI build)."""
    import uvicorn

    from .server import create_app

    app = create_app(scenario_dir=scenario_dir, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")


if __name__ == "__main__":
    main()
