"""Experiment driver: scenario generation, solving, sweeps, reports, validation.

Emits plot-ready CSVs rather than figures.  Results CSV columns are
stable: hour,method,problem,status,objective,min_ue_mbps,
activated_frontends,p_total_w,eta_mbps_per_w,runtime_s.
Exit codes: 0 ok, 1 validation failure, 2 input error.
"""

from __future__ import annotations

import csv
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import click

from . import heuristics, milp, oracle
from .capacity import default_table, load_table
from .energy import energy_efficiency, total_power
from .errors import EmptyResults, IabError, ParseError
from .graph import Commodity, load_graph, save_graph
from .heuristics import PruneParams, SearchOptions
from .problem import (
    ContinuousPower,
    DiscretePower,
    FixedPower,
    ProblemInstance,
    default_power_levels,
    load_solution,
    save_solution,
    solution_payload,
)
from .scenario import config_from_json, generate, load_profile_csv

RESULT_COLUMNS = [
    "hour",
    "method",
    "problem",
    "status",
    "objective",
    "min_ue_mbps",
    "activated_frontends",
    "p_total_w",
    "eta_mbps_per_w",
    "runtime_s",
]

METHODS = ("local-search", "selective-reduction", "exact")
PROBLEMS = ("throughput", "energy")

# Fraction of the final objective an iterate must reach to count as
# "near final" in evolution reports.
NEAR_FINAL_FRACTION = 0.01


@click.group()
def main():
    """Access/backhaul tree optimization experiments."""


def _fail(message: str, code: int = 2):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _power_mode(name: str, p_max_mw: float, levels: int):
    if name == "fixed-max":
        return None  # resolved per graph once frontends are known
    if name == "continuous":
        return ContinuousPower()
    if name == "discrete":
        return DiscretePower(default_power_levels(p_max_mw, levels))
    raise ValueError(f"unknown power mode {name!r}")


def _build_instance(graph, config, demand_mbps, power_mode_name, levels, mcs_table):
    table = load_table(mcs_table) if mcs_table else default_table(
        config.radio.bandwidth_mhz, config.radio.mimo_layers
    )
    donor = graph.donor.id
    commodities = tuple(
        Commodity(i, donor, ue.id, demand_mbps) for i, ue in enumerate(graph.ues)
    )
    mode = _power_mode(power_mode_name, config.radio.p_max_mw, levels)
    if mode is None:
        mode = FixedPower({n.id: config.radio.p_max_mw for n in graph.frontends})
    return ProblemInstance(
        graph=graph,
        commodities=commodities,
        radio=config.radio,
        power_model=config.power_model,
        capacity_table=table,
        power_mode=mode,
    )


def _run_method(instance, method, problem, options, prune):
    """Returns (solution, state-or-None)."""
    if method == "local-search":
        if problem == "throughput":
            return heuristics.local_search_throughput(instance, options)
        return heuristics.local_search_energy(instance, options)
    if method == "selective-reduction":
        solution, _k = heuristics.selective_reduction(instance, prune, problem, options)
        return solution, None
    # exact
    if problem == "throughput":
        built = milp.build_throughput_model(instance)
    else:
        built = milp.build_energy_model(instance)
    raw = milp.solve(built.ir, options.solver())
    return milp.extract_solution(built, raw), None


def _record(hour, method, problem, solution, graph, power_model, runtime_s) -> dict:
    report = total_power(solution, power_model, graph)
    min_rate = solution.min_ue_mbps
    eta = (
        energy_efficiency(min_rate, report.total_w) if report.total_w > 0 else math.nan
    )
    return {
        "hour": hour,
        "method": method,
        "problem": problem,
        "status": solution.status.value,
        "objective": f"{solution.objective:.6f}",
        "min_ue_mbps": f"{min_rate:.6f}",
        "activated_frontends": solution.activated_count,
        "p_total_w": f"{report.total_w:.6f}",
        "eta_mbps_per_w": f"{eta:.6f}",
        "runtime_s": f"{runtime_s:.3f}",
    }


def _error_record(hour, method, problem, exc, runtime_s) -> dict:
    return {
        "hour": hour,
        "method": method,
        "problem": problem,
        "status": f"error:{type(exc).__name__}",
        "objective": "",
        "min_ue_mbps": "",
        "activated_frontends": "",
        "p_total_w": "",
        "eta_mbps_per_w": "",
        "runtime_s": f"{runtime_s:.3f}",
    }


# -- scenario-gen -----------------------------------------------------------


@main.command("scenario-gen")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--profile", "profile_path", required=True, type=click.Path(exists=True))
@click.option("--hour", type=int, required=True)
@click.option("--out", "out_path", required=True, type=click.Path())
def cmd_scenario_gen(config_path, profile_path, hour, out_path):
    """Generate one hour's measurement graph to JSON."""
    try:
        config = config_from_json(config_path)
        profile = load_profile_csv(profile_path)
        graph, _commodities = generate(config, profile, hour)
    except IabError as exc:
        _fail(str(exc))
    save_graph(graph, out_path)
    click.echo(f"wrote {out_path}: {len(graph.nodes)} nodes, {len(graph.edges)} edges")


# -- solve -------------------------------------------------------------------


@main.command("solve")
@click.option("--graph", "graph_path", required=True, type=click.Path(exists=True))
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--problem", type=click.Choice(PROBLEMS), required=True)
@click.option("--method", type=click.Choice(METHODS), default="local-search", show_default=True)
@click.option("--demand-mbps", type=float, default=0.0, show_default=True)
@click.option(
    "--power-mode",
    type=click.Choice(["fixed-max", "continuous", "discrete"]),
    default="continuous",
    show_default=True,
)
@click.option("--levels", type=int, default=9, show_default=True)
@click.option("--mcs-table", type=click.Path(exists=True), default=None)
@click.option("--time-limit", type=float, default=60.0, show_default=True)
@click.option("--global-budget", type=float, default=2400.0, show_default=True)
@click.option("--k0", type=int, default=5, show_default=True)
@click.option("--k-max", type=int, default=10, show_default=True)
@click.option("--out-solution", type=click.Path(), default=None)
@click.option("--out-state", type=click.Path(), default=None)
@click.option("--lp-out", type=click.Path(), default=None)
def cmd_solve(
    graph_path,
    config_path,
    problem,
    method,
    demand_mbps,
    power_mode,
    levels,
    mcs_table,
    time_limit,
    global_budget,
    k0,
    k_max,
    out_solution,
    out_state,
    lp_out,
):
    """Solve one problem on one graph file."""
    from .scenario import ScenarioConfig

    try:
        graph = load_graph(graph_path)
        config = config_from_json(config_path) if config_path else ScenarioConfig()
        if problem == "energy" and power_mode == "continuous":
            power_mode = "discrete" if method != "local-search" else "fixed-max"
        instance = _build_instance(graph, config, demand_mbps, power_mode, levels, mcs_table)
    except IabError as exc:
        _fail(str(exc))

    options = SearchOptions(solve_time_limit_s=time_limit, global_budget_s=global_budget)
    prune = PruneParams(k0=k0, k_max=k_max)
    if lp_out:
        built = (
            milp.build_throughput_model(instance)
            if problem == "throughput"
            else milp.build_energy_model(instance)
        )
        Path(lp_out).write_text(built.ir.lp_text())
    start = time.monotonic()
    try:
        solution, state = _run_method(instance, method, problem, options, prune)
    except IabError as exc:
        _fail(str(exc), code=1)
    runtime = time.monotonic() - start
    click.echo(
        f"{problem}/{method}: status={solution.status.value} "
        f"objective={solution.objective:.6f} min_ue={solution.min_ue_mbps:.6f} "
        f"activated={solution.activated_count} runtime={runtime:.2f}s"
    )
    if out_solution:
        save_solution(solution, out_solution)
    if out_state and state is not None:
        state.write_csv(out_state)


# -- sweep --------------------------------------------------------------------


def _parse_hours(text: str) -> list[int]:
    hours: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            lo, hi = part.split("-")
            hours.extend(range(int(lo), int(hi) + 1))
        elif part:
            hours.append(int(part))
    return sorted(set(hours))


def _sweep_one(args) -> tuple[dict, dict | None, list | None]:
    """One (hour, method, problem) run; returns (row, solution payload, state rows)."""
    (hour, method, problem, config_path, profile_path, seed, demand, time_limit,
     global_budget, k0, k_max, levels) = args
    config = config_from_json(config_path)
    config = type(config)(**{**vars(config), "seed": seed})
    profile = load_profile_csv(profile_path)
    options = SearchOptions(solve_time_limit_s=time_limit, global_budget_s=global_budget)
    prune = PruneParams(k0=k0, k_max=k_max)
    start = time.monotonic()
    try:
        graph, _ = generate(config, profile, hour)
        mode = "continuous" if problem == "throughput" else "fixed-max"
        if method in ("exact", "selective-reduction") and problem == "energy":
            mode = "discrete"
        instance = _build_instance(graph, config, demand, mode, levels, None)
        solution, state = _run_method(instance, method, problem, options, prune)
    except Exception as exc:
        return _error_record(hour, method, problem, exc, time.monotonic() - start), None, None
    runtime = time.monotonic() - start
    row = _record(hour, method, problem, solution, graph, config.power_model, runtime)
    state_rows = (
        [[e.iteration, f"{e.timestamp_s:.6f}", repr(e.objective)] for e in state.log]
        if state is not None
        else None
    )
    return row, solution_payload(solution), state_rows


@main.command("sweep")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--profile", "profile_path", required=True, type=click.Path(exists=True))
@click.option("--hours", default="0-23", show_default=True)
@click.option("--methods", default="local-search,selective-reduction", show_default=True)
@click.option("--problems", default="throughput", show_default=True)
@click.option("--seed", type=int, required=True)
@click.option("--demand-mbps", type=float, default=5.0, show_default=True)
@click.option("--time-limit", type=float, default=60.0, show_default=True)
@click.option("--global-budget", type=float, default=2400.0, show_default=True)
@click.option("--k0", type=int, default=5, show_default=True)
@click.option("--k-max", type=int, default=10, show_default=True)
@click.option("--levels", type=int, default=9, show_default=True)
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--out-dir", required=True, type=click.Path())
def cmd_sweep(
    config_path,
    profile_path,
    hours,
    methods,
    problems,
    seed,
    demand_mbps,
    time_limit,
    global_budget,
    k0,
    k_max,
    levels,
    workers,
    out_dir,
):
    """Generate each hour, run every method/problem, append result rows."""
    hour_list = _parse_hours(hours)
    method_list = [m.strip() for m in methods.split(",") if m.strip()]
    problem_list = [p.strip() for p in problems.split(",") if p.strip()]
    for m in method_list:
        if m not in METHODS:
            _fail(f"unknown method {m!r}")
    for p in problem_list:
        if p not in PROBLEMS:
            _fail(f"unknown problem {p!r}")

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tasks = [
        (h, m, p, config_path, profile_path, seed, demand_mbps, time_limit,
         global_budget, k0, k_max, levels)
        for h in hour_list
        for m in method_list
        for p in problem_list
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(_sweep_one, tasks))
    else:
        outputs = [_sweep_one(t) for t in tasks]

    rows = []
    for task, (row, payload, state_rows) in zip(tasks, outputs):
        hour, method, problem = task[0], task[1], task[2]
        rows.append(row)
        stem = f"hour{hour:03d}_{method}_{problem}"
        if payload is not None:
            with open(out / f"{stem}_solution.json", "w") as fh:
                json.dump(payload, fh, indent=2)
                fh.write("\n")
        if state_rows is not None:
            with open(out / f"{stem}_state.csv", "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["iter", "timestamp_s", "objective"])
                writer.writerows(state_rows)

    rows.sort(key=lambda r: (r["hour"], r["method"], r["problem"]))
    results_path = out / "results.csv"
    with open(results_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=RESULT_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    click.echo(f"wrote {results_path} ({len(rows)} rows)")


# -- report -------------------------------------------------------------------


def _cdf_points(values: list[float]) -> list[tuple[float, float]]:
    ordered = sorted(values)
    n = len(ordered)
    return [(v, (i + 1) / n) for i, v in enumerate(ordered)]


def evolution_stats(log: list[tuple[float, float]]) -> dict:
    """Initial/final objective, improvement %, and time to near-final.

    ``log`` is (timestamp_s, objective), in order.  Near-final is the
    first timestamp whose objective is within 1% of the final one; it is
    undefined (None) when the trace never improves.
    """
    if not log:
        raise EmptyResults("empty evolution log")
    initial = log[0][1]
    final = log[-1][1]
    improvement = (final - initial) / initial * 100.0 if initial else math.nan
    near_final = None
    if abs(final - initial) > 1e-12:
        for ts, obj in log:
            if abs(obj - final) <= NEAR_FINAL_FRACTION * abs(final):
                near_final = ts
                break
    return {
        "initial": initial,
        "final": final,
        "improvement_pct": improvement,
        "time_to_near_final_s": near_final,
        "total_time_s": log[-1][0],
    }


@main.command("report")
@click.option("--results", "results_path", required=True, type=click.Path(exists=True))
@click.option("--states-dir", type=click.Path(exists=True), default=None)
@click.option("--out-dir", required=True, type=click.Path())
def cmd_report(results_path, states_dir, out_dir):
    """Summarize a results CSV into plot-ready CDF/time-series/evolution CSVs."""
    with open(results_path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != RESULT_COLUMNS:
            _fail(f"{results_path}: unexpected columns {reader.fieldnames}")
        rows = [r for r in reader]
    ok_rows = [r for r in rows if not r["status"].startswith("error")]
    if not rows:
        _fail("results file has no rows")

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    throughput_vals = [
        float(r["objective"]) for r in ok_rows if r["problem"] == "throughput" and r["objective"]
    ]
    if throughput_vals:
        with open(out / "throughput_cdf.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["throughput_mbps", "cdf"])
            writer.writerows(
                (f"{v:.6f}", f"{c:.6f}") for v, c in _cdf_points(throughput_vals)
            )

    eta_vals = [
        float(r["eta_mbps_per_w"])
        for r in ok_rows
        if r["problem"] == "energy" and r["eta_mbps_per_w"]
    ]
    if eta_vals:
        with open(out / "eta_cdf.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["eta_mbps_per_w", "cdf"])
            writer.writerows((f"{v:.6f}", f"{c:.6f}") for v, c in _cdf_points(eta_vals))

    with open(out / "activation_timeseries.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["hour", "method", "problem", "activated_frontends"])
        for r in ok_rows:
            writer.writerow([r["hour"], r["method"], r["problem"], r["activated_frontends"]])

    if states_dir:
        evo_rows = []
        for state_path in sorted(Path(states_dir).glob("*_state.csv")):
            with open(state_path, newline="") as fh:
                reader = csv.DictReader(fh)
                log = [(float(r["timestamp_s"]), float(r["objective"])) for r in reader]
            if not log:
                continue
            stats = evolution_stats(log)
            near = stats["time_to_near_final_s"]
            evo_rows.append(
                [
                    state_path.name.replace("_state.csv", ""),
                    f"{stats['initial']:.2f}",
                    f"{stats['final']:.2f}",
                    f"{stats['improvement_pct']:.2f}",
                    "" if near is None else f"{near:.2f}",
                    f"{stats['total_time_s']:.2f}",
                ]
            )
        with open(out / "evolution.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["run", "initial", "final", "improvement_pct", "time_to_near_final_s", "total_time_s"]
            )
            writer.writerows(evo_rows)

    click.echo(f"wrote report files to {out}")


# -- validate -----------------------------------------------------------------


@main.command("validate")
@click.option("--solution", "solution_path", required=True, type=click.Path(exists=True))
@click.option("--graph", "graph_path", required=True, type=click.Path(exists=True))
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--demand-mbps", type=float, default=0.0, show_default=True)
@click.option("--mcs-table", type=click.Path(exists=True), default=None)
def cmd_validate(solution_path, graph_path, config_path, demand_mbps, mcs_table):
    """Re-validate a solution JSON against its graph; exit 0 iff clean."""
    from .scenario import ScenarioConfig

    try:
        graph = load_graph(graph_path)
        solution = load_solution(solution_path)
        referenced = set(solution.chosen_edges) | set(solution.airtimes) | set(
            solution.capacities_mbps
        )
        for per_edge in solution.flows.values():
            referenced |= set(per_edge)
        for (src, dst) in sorted(referenced):
            if graph.edge(src, dst) is None:
                raise ParseError(f"solution references edge {src}->{dst} not in graph")
        for fid in solution.powers_mw:
            if not graph.has_node(fid):
                raise ParseError(f"solution references unknown frontend {fid}")
        config = config_from_json(config_path) if config_path else ScenarioConfig()
        instance = _build_instance(
            graph, config, demand_mbps, "fixed-max", 9, mcs_table
        )
    except IabError as exc:
        _fail(str(exc))
    report = oracle.validate_solution(instance, solution)
    if report.ok:
        click.echo("ok")
        sys.exit(0)
    for v in report.violations:
        click.echo(str(v))
    sys.exit(1)


if __name__ == "__main__":
    main()
