"""Two-phase local search and selective-reduction pruning.

Local search keeps every solve small by fixing frontend powers and only
freeing one at a time: phase one toggles frontends between 0 and full
power (accepting ties), phase two refines one continuous power at a time
under strict improvement.  A final strict-toggle pass certifies that no
single on/off flip improves the phase-one solution.

Selective reduction shrinks the routing edge set to each receiver's top-k
ranked incoming links and re-solves the exact model, widening k until
feasible.  Interference always accumulates over the full graph, so a
pruned-feasible solution stays feasible unpruned.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field

from . import milp, oracle
from .channel import RadioParams, serving_gains_dbi
from .errors import (
    BackendError,
    DemandExceedsMaxMin,
    NoFeasibleStart,
    NoFeasibleWithinKmax,
)
from .graph import Edge, MeasurementGraph, build_graph
from .milp import SolverOptions
from .problem import (
    ContinuousPower,
    DiscretePower,
    NetworkSolution,
    ProblemInstance,
    SolveStatus,
    default_power_levels,
)

_IMPROVE_TOL = 1e-6


@dataclass(frozen=True)
class SearchOptions:
    solve_time_limit_s: float = 60.0
    global_budget_s: float = 2400.0
    rel_gap: float = 0.0
    power_levels: int = 9  # grid size for the energy refinement sweeps

    def solver(self, remaining_s: float | None = None) -> SolverOptions:
        limit = self.solve_time_limit_s
        if remaining_s is not None:
            limit = max(min(limit, remaining_s), 0.05)
        return SolverOptions(time_limit_s=limit, rel_gap=self.rel_gap)


@dataclass(frozen=True)
class PruneParams:
    k0: int = 5
    k_max: int = 10
    step: int = 1

    def __post_init__(self):
        if not 1 <= self.k0 <= self.k_max:
            raise ValueError("need 1 <= k0 <= k_max")
        if self.step < 1:
            raise ValueError("step must be >= 1")


@dataclass
class LogEntry:
    iteration: int
    timestamp_s: float
    objective: float


@dataclass
class SearchState:
    """Best-so-far powers and the accepted-objective trace of one run."""

    curr_best_sol: dict[int, float]
    curr_best_obj: float
    prev_best_obj: float
    log: list[LogEntry] = field(default_factory=list)
    phase1_powers: dict[int, float] | None = None

    def record(self, iteration: int, timestamp_s: float, objective: float) -> None:
        self.log.append(LogEntry(iteration, timestamp_s, objective))

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["iter", "timestamp_s", "objective"])
            for entry in self.log:
                writer.writerow(
                    [entry.iteration, f"{entry.timestamp_s:.6f}", repr(entry.objective)]
                )


class _Clock:
    def __init__(self, budget_s: float):
        self.t0 = time.monotonic()
        self.budget_s = budget_s

    def elapsed(self) -> float:
        return time.monotonic() - self.t0

    def remaining(self) -> float:
        return self.budget_s - self.elapsed()

    def expired(self) -> bool:
        return self.remaining() <= 0


def _objective_of(raw: milp.RawSolution) -> float | None:
    if raw.status in (SolveStatus.OPTIMAL, SolveStatus.FEASIBLE) or (
        raw.status is SolveStatus.TIME_LIMIT and raw.values is not None
    ):
        return raw.objective
    return None


def _extracted_power(built: milp.BuiltModel, raw: milp.RawSolution, frontend: int) -> float:
    rep = built.power_reps[frontend]
    if rep.cont_idx is not None:
        p = max(float(raw.values[rep.cont_idx]), 0.0)
        p_on = milp.builder.MIN_ON_POWER_FRACTION * built.instance.radio.p_max_mw
        return p if p >= p_on else 0.0
    return sum(lvl * round(float(raw.values[idx])) for lvl, idx in rep.level_terms)


def local_search_throughput(
    instance: ProblemInstance, options: SearchOptions | None = None
) -> tuple[NetworkSolution, SearchState]:
    """Iterated on/off toggling plus one-at-a-time continuous power refinement."""
    options = options or SearchOptions()
    clock = _Clock(options.global_budget_s)
    g = instance.graph
    frontends = sorted(n.id for n in g.frontends)
    # "Full power" and the phase-2 refinement domain follow the instance's
    # power mode, so the search never leaves the declared power space.
    discrete = isinstance(instance.power_mode, DiscretePower)
    p_max = max(instance.power_mode.levels_mw) if discrete else instance.radio.p_max_mw

    def solve_fixed(powers: dict[int, float]) -> milp.RawSolution:
        built = milp.build_throughput_model(instance, fixed_powers=powers)
        return milp.solve(built.ir, options.solver(clock.remaining()))

    powers = {u: p_max for u in frontends}
    raw = solve_fixed(powers)
    z0 = _objective_of(raw)
    if z0 is None:
        raise NoFeasibleStart(f"initial all-on solve ended {raw.status.value}")

    state = SearchState(curr_best_sol=dict(powers), curr_best_obj=z0, prev_best_obj=-1.0)
    state.record(0, clock.elapsed(), z0)
    iteration = 0

    # Phase 1: toggle each frontend between 0 and p_max, accepting ties.
    prev = -1.0
    while state.curr_best_obj != prev and not clock.expired():
        prev = state.curr_best_obj
        for u in frontends:
            if clock.expired():
                break
            val = p_max if state.curr_best_sol[u] == 0 else 0.0
            trial = dict(state.curr_best_sol)
            trial[u] = val
            z = _objective_of(solve_fixed(trial))
            iteration += 1
            if z is not None and z >= state.curr_best_obj:
                state.curr_best_sol[u] = val
                state.curr_best_obj = z
                state.record(iteration, clock.elapsed(), z)
        state.prev_best_obj = prev

    # Certify the fixed point: only strict toggle improvements are taken, so
    # the last clean pass proves no single flip beats the final powers.
    improved = True
    while improved and not clock.expired():
        improved = False
        for u in frontends:
            if clock.expired():
                break
            val = p_max if state.curr_best_sol[u] == 0 else 0.0
            trial = dict(state.curr_best_sol)
            trial[u] = val
            z = _objective_of(solve_fixed(trial))
            iteration += 1
            if z is not None and z > state.curr_best_obj + _IMPROVE_TOL:
                state.curr_best_sol[u] = val
                state.curr_best_obj = z
                state.record(iteration, clock.elapsed(), z)
                improved = True
    state.phase1_powers = dict(state.curr_best_sol)

    # Phase 2: free one frontend's power at a time, continuous in
    # [0, p_max] unless the instance itself restricts powers to a grid.
    refine = instance if discrete else instance.with_power_mode(ContinuousPower())
    prev = -1.0
    while state.curr_best_obj != prev and not clock.expired():
        prev = state.curr_best_obj
        for u in frontends:
            if clock.expired():
                break
            fixed = {v: p for v, p in state.curr_best_sol.items() if v != u}
            built = milp.build_throughput_model(refine, fixed_powers=fixed)
            raw = milp.solve(built.ir, options.solver(clock.remaining()))
            iteration += 1
            z = _objective_of(raw)
            if z is not None and z > state.curr_best_obj + _IMPROVE_TOL:
                state.curr_best_sol[u] = _extracted_power(built, raw, u)
                state.curr_best_obj = z
                state.record(iteration, clock.elapsed(), z)
        state.prev_best_obj = prev

    # The returned solution always comes from a full-budget fixed-power
    # solve, even when the sweep budget ran dry.
    built = milp.build_throughput_model(instance, fixed_powers=state.curr_best_sol)
    raw = milp.solve(built.ir, options.solver())
    if _objective_of(raw) is None:
        raise BackendError(f"final fixed-power solve ended {raw.status.value}")
    solution = milp.extract_solution(built, raw)
    state.curr_best_obj = solution.objective
    state.record(iteration + 1, clock.elapsed(), solution.objective)
    return solution, state


def local_search_energy(
    instance: ProblemInstance, options: SearchOptions | None = None
) -> tuple[NetworkSolution, SearchState]:
    """Throughput search for a power seed, then energy refinement sweeps."""
    options = options or SearchOptions()
    _tput_sol, tput_state = local_search_throughput(instance, options)
    z = tput_state.curr_best_obj
    for comm in instance.commodities:
        if comm.demand_mbps > 0 and comm.demand_mbps >= z:
            raise DemandExceedsMaxMin(
                f"demand {comm.demand_mbps} Mbps >= reachable max-min rate {z}"
            )

    clock = _Clock(options.global_budget_s)
    g = instance.graph
    frontends = sorted(n.id for n in g.frontends)

    if isinstance(instance.power_mode, DiscretePower):
        levels = instance.power_mode.levels_mw
    else:
        levels = default_power_levels(instance.radio.p_max_mw, options.power_levels)
    gridded = instance.with_power_mode(DiscretePower(levels))

    def solve_energy(fixed: dict[int, float], grid_frontend: int | None, clamp=True):
        if grid_frontend is None:
            built = milp.build_energy_model(instance, fixed_powers=fixed)
        else:
            built = milp.build_energy_model(gridded, fixed_powers=fixed)
        limit = options.solver(clock.remaining()) if clamp else options.solver()
        raw = milp.solve(built.ir, limit)
        return built, raw

    powers = dict(tput_state.curr_best_sol)
    built, raw = solve_energy(powers, None)
    y0 = _objective_of(raw)
    if y0 is None:
        raise NoFeasibleStart(f"energy solve at throughput powers ended {raw.status.value}")

    state = SearchState(curr_best_sol=dict(powers), curr_best_obj=y0, prev_best_obj=-1.0)
    state.record(0, clock.elapsed(), y0)
    iteration = 0

    # Refinement: one frontend at a time on the discrete grid, strict decrease.
    prev = -1.0
    while state.curr_best_obj != prev and not clock.expired():
        prev = state.curr_best_obj
        for u in frontends:
            if clock.expired():
                break
            fixed = {v: p for v, p in state.curr_best_sol.items() if v != u}
            built, raw = solve_energy(fixed, u)
            iteration += 1
            y = _objective_of(raw)
            if y is not None and y < state.curr_best_obj - _IMPROVE_TOL:
                state.curr_best_sol[u] = _extracted_power(built, raw, u)
                state.curr_best_obj = y
                state.record(iteration, clock.elapsed(), y)
        state.prev_best_obj = prev

    built, raw = solve_energy(state.curr_best_sol, None, clamp=False)
    if _objective_of(raw) is None:
        raise BackendError(f"final energy solve ended {raw.status.value}")
    solution = milp.extract_solution(built, raw)
    state.curr_best_obj = solution.objective
    state.record(iteration + 1, clock.elapsed(), solution.objective)
    return solution, state


# -- selective reduction -------------------------------------------------------


def rank_edges(graph: MeasurementGraph, radio_params) -> list[Edge]:
    """Wireless edges sorted by gain minus pathloss, best first.

    Ties break on (src, dst) ascending so rankings are input-order
    invariant.
    """

    def metric(e: Edge) -> float:
        g_tx, g_rx = serving_gains_dbi(graph, e, radio_params)
        return g_tx + g_rx - e.pathloss_db

    return sorted(graph.wireless_edges, key=lambda e: (-metric(e), e.src, e.dst))


def prune_graph(graph: MeasurementGraph, k: int, radio_params=None) -> MeasurementGraph:
    """Keep each node's k best-ranked incoming wireless edges (wired survive)."""
    if k < 1:
        raise ValueError("retention count must be >= 1")
    ranked = rank_edges(graph, radio_params or RadioParams())
    kept: list[Edge] = list(graph.wired_edges)
    per_node: dict[int, int] = {}
    for e in ranked:
        if per_node.get(e.dst, 0) < k:
            kept.append(e)
            per_node[e.dst] = per_node.get(e.dst, 0) + 1
    kept.sort(key=lambda e: (e.src, e.dst))
    return build_graph(graph.nodes, kept)


def selective_reduction(
    instance: ProblemInstance,
    prune_params: PruneParams,
    problem_kind: str,
    options: SearchOptions | None = None,
    radio_params=None,
) -> tuple[NetworkSolution, int]:
    """Solve the exact model on a top-k pruned edge set, widening k on infeasibility.

    Returns the solution and the retention count that produced it.  The
    solution is re-validated against the unpruned instance (the model's
    interference terms already span the full graph).
    """
    if problem_kind not in (milp.THROUGHPUT, milp.ENERGY):
        raise ValueError(f"unknown problem kind {problem_kind!r}")
    options = options or SearchOptions()
    clock = _Clock(options.global_budget_s)

    k = prune_params.k0
    while k <= prune_params.k_max:
        pruned = prune_graph(instance.graph, k, radio_params or instance.radio)
        retained = [e.key for e in pruned.edges]
        if problem_kind == milp.THROUGHPUT:
            built = milp.build_throughput_model(instance, routing_edges=retained)
        else:
            built = milp.build_energy_model(instance, routing_edges=retained)
        raw = milp.solve(built.ir, options.solver(clock.remaining()))
        if raw.status is SolveStatus.INFEASIBLE:
            k += prune_params.step
            continue
        if raw.values is None:
            raise BackendError(f"pruned solve at k={k} ended {raw.status.value}")
        solution = milp.extract_solution(built, raw)
        report = oracle.validate_solution(instance, solution)
        if not report.ok:
            raise BackendError(
                f"pruned solution invalid in full graph: {report.violations[:4]}"
            )
        return solution, k
    raise NoFeasibleWithinKmax(
        f"infeasible for every retention count in [{prune_params.k0}, {prune_params.k_max}]"
    )
