"""Independent brute-force optima and numeric solution validation.

Everything here recomputes from first principles (channel arithmetic,
ladder lookups, explicit enumeration) so the optimization models have a
second, dumber implementation to agree with.  Enumeration is a test
instrument with a hard size guard, not a solver.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .capacity import CapacityTable, capacity_from_sinr
from .channel import link_budget
from .energy import total_power
from .errors import NoFeasible, TooLarge, UnsupportedMode, ZeroCapacityLink
from .graph import EdgeKey, EdgeKind, MeasurementGraph, NodeKind, validate_tree
from .problem import (
    DiscretePower,
    FixedPower,
    NetworkSolution,
    ProblemInstance,
    SolveStatus,
)

_TOL = 1e-6
_CONFIG_GUARD = 10**6

# Relative slack when re-deriving ladder levels from extracted powers;
# covers the solver's row feasibility tolerance at threshold-binding
# optima (~1e-4 relative is ~0.0004 dB of SINR).
_LEVEL_SLACK = 1e-4


# -- max-min airtime feasibility on a fixed tree -----------------------------


def max_min_on_tree(
    graph: MeasurementGraph,
    tree_edges: Iterable[EdgeKey],
    capacities_mbps: Mapping[EdgeKey, float],
    ue_ids: Iterable[int],
) -> float:
    """Largest common per-UE rate a fixed tree supports, by bisection.

    Feasibility at rate Z charges every wireless tree edge airtime
    Z * (UEs downstream) / capacity at both endpoints and checks each
    node's unit budget of 1.  Converges to 1e-9 absolute.
    """
    tree = set(tree_edges)
    ues = set(ue_ids)
    if not ues:
        return 0.0

    children: dict[int, list[int]] = {}
    for src, dst in tree:
        children.setdefault(src, []).append(dst)

    donor = graph.donor.id
    # Downstream UE count per tree edge (iterative postorder).
    subtree_ues: dict[int, int] = {}
    order: list[int] = []
    seen = {donor}
    stack = [donor]
    while stack:
        u = stack.pop()
        order.append(u)
        for v in children.get(u, ()):
            if v in seen:
                continue  # defensive; trees should not revisit
            seen.add(v)
            stack.append(v)
    for u in reversed(order):
        count = 1 if u in ues else 0
        count += sum(subtree_ues.get(v, 0) for v in children.get(u, ()))
        subtree_ues[u] = count

    if any(ue not in seen for ue in ues):
        return 0.0

    wireless_loads: list[tuple[EdgeKey, float, int]] = []  # (key, capacity, ue count)
    for key in sorted(tree):
        edge = graph.edge(*key)
        if edge is None or edge.kind is not EdgeKind.WIRELESS:
            continue
        n_down = subtree_ues.get(key[1], 0)
        if n_down == 0:
            continue
        c = capacities_mbps.get(key, 0.0)
        if c <= 0:
            raise ZeroCapacityLink(f"tree edge {key} carries {n_down} UEs at zero capacity")
        wireless_loads.append((key, c, n_down))

    def feasible(z: float) -> bool:
        load: dict[int, float] = {}
        for (src, dst), c, n_down in wireless_loads:
            a = z * n_down / c
            load[src] = load.get(src, 0.0) + a
            load[dst] = load.get(dst, 0.0) + a
        return all(v <= 1.0 + 1e-12 for v in load.values())

    lo = 0.0
    hi = max(capacities_mbps.values(), default=0.0) + 1.0
    if feasible(hi):
        return hi  # unbounded only when no wireless edge is loaded
    for _ in range(200):
        if hi - lo <= 1e-9:
            break
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return lo


# -- exhaustive optima --------------------------------------------------------


def _power_grids(instance: ProblemInstance) -> tuple[list[int], list[list[float]]]:
    mode = instance.power_mode
    frontends = sorted(n.id for n in instance.graph.frontends)
    if isinstance(mode, FixedPower):
        return frontends, [[float(mode.powers_mw.get(f, 0.0))] for f in frontends]
    if isinstance(mode, DiscretePower):
        return frontends, [list(mode.levels_mw) for _ in frontends]
    raise UnsupportedMode("enumeration needs fixed or discrete powers")


def _parent_chain_edges(
    graph: MeasurementGraph,
    ue_parent: Mapping[int, int],
    unit_parent: Mapping[int, int | None],
) -> set[EdgeKey] | None:
    """Tree edges realizing the parent choices, or None if disconnected/cyclic."""
    donor_unit = graph.donor.unit_id
    baseband_of_unit = {n.unit_id: n for n in graph.basebands}
    reach_memo: dict[int, bool] = {}

    def unit_reaches_donor(unit_id: int, trail: set[int]) -> bool:
        if unit_id == donor_unit:
            return True
        if unit_id in reach_memo:
            return reach_memo[unit_id]
        if unit_id in trail:
            return False  # cycle among unit parents
        pf = unit_parent.get(baseband_of_unit[unit_id].id)
        ok = pf is not None and unit_reaches_donor(
            graph.node(pf).unit_id, trail | {unit_id}
        )
        reach_memo[unit_id] = ok
        return ok

    edges: set[EdgeKey] = set()
    for ue in sorted(ue_parent):
        f = ue_parent[ue]
        if not unit_reaches_donor(graph.node(f).unit_id, set()):
            return None
        edges.add((f, ue))
        # Climb: wired baseband -> frontend, then backhaul into that baseband.
        frontend = f
        while True:
            baseband = baseband_of_unit[graph.node(frontend).unit_id]
            edges.add((baseband.id, frontend))
            if baseband.kind is NodeKind.DONOR_DU:
                break
            pf = unit_parent[baseband.id]
            if (pf, baseband.id) in edges:
                break
            edges.add((pf, baseband.id))
            frontend = pf
    return edges


def _edge_capacities(
    instance: ProblemInstance, powers: dict[int, float]
) -> dict[EdgeKey, float]:
    caps: dict[EdgeKey, float] = {}
    for e in instance.graph.wireless_edges:
        budget = link_budget(e, powers, instance.graph, instance.radio)
        _, c = capacity_from_sinr(
            instance.capacity_table, budget.signal_mw, budget.interference_mw
        )
        caps[e.key] = c
    return caps


def _enumeration_space(instance: ProblemInstance, ue_ids: Sequence[int]):
    g = instance.graph
    frontends, grids = _power_grids(instance)
    ue_candidates = {
        ue: [e.src for e in g.in_edges(ue) if e.kind is EdgeKind.WIRELESS]
        for ue in ue_ids
    }
    mtdus = sorted(n.id for n in g.basebands if n.kind is NodeKind.MT_DU)
    mtdu_candidates = {
        m: [None] + [e.src for e in g.in_edges(m) if e.kind is EdgeKind.WIRELESS]
        for m in mtdus
    }
    total = 1
    for grid in grids:
        total *= len(grid)
    for c in ue_candidates.values():
        total *= max(len(c), 1)
    for c in mtdu_candidates.values():
        total *= len(c)
    if total > _CONFIG_GUARD:
        raise TooLarge(f"{total} configurations exceed the {_CONFIG_GUARD} guard")
    return frontends, grids, ue_candidates, mtdus, mtdu_candidates


def enumerate_optimal_throughput(instance: ProblemInstance) -> float:
    """Exact max-min rate by exhausting powers, parents and airtime."""
    ue_ids = sorted({c.dest for c in instance.commodities})
    if not ue_ids:
        return 0.0
    g = instance.graph
    frontends, grids, ue_cand, mtdus, mtdu_cand = _enumeration_space(instance, ue_ids)

    best = 0.0
    for combo in itertools.product(*grids):
        powers = dict(zip(frontends, combo))
        caps = _edge_capacities(instance, powers)
        ue_options = [
            [f for f in ue_cand[ue] if caps.get((f, ue), 0.0) > 0] for ue in ue_ids
        ]
        if any(not opts for opts in ue_options):
            continue  # some UE unservable at these powers: Z = 0
        mtdu_options = [
            [None] + [f for f in mtdu_cand[m][1:] if caps.get((f, m), 0.0) > 0]
            for m in mtdus
        ]
        for ue_pick in itertools.product(*ue_options):
            ue_parent = dict(zip(ue_ids, ue_pick))
            for m_pick in itertools.product(*mtdu_options):
                unit_parent = dict(zip(mtdus, m_pick))
                tree = _parent_chain_edges(g, ue_parent, unit_parent)
                if tree is None:
                    continue
                z = max_min_on_tree(g, tree, caps, ue_ids)
                if z > best:
                    best = z
    return best


def enumerate_optimal_energy(instance: ProblemInstance) -> float:
    """Exact minimum total power meeting every positive demand."""
    g = instance.graph
    pm = instance.power_model
    commodities = [c for c in instance.commodities if c.demand_mbps > 0]
    frontend_ids = sorted(n.id for n in g.frontends)

    def solution_power(
        powers: dict[int, float], airtimes: dict[EdgeKey, float]
    ) -> float:
        sol = NetworkSolution(
            problem="energy",
            status=SolveStatus.OPTIMAL,
            objective=0.0,
            chosen_edges=(),
            flows={},
            airtimes=airtimes,
            powers_mw=dict(powers),
            activations={f: 1 if powers.get(f, 0.0) > 0 else 0 for f in frontend_ids},
            capacities_mbps={},
            per_ue_mbps={},
        )
        return total_power(sol, pm, g).total_w

    if not commodities:
        return solution_power({f: 0.0 for f in frontend_ids}, {})

    ue_ids = sorted({c.dest for c in commodities})
    demand = {c.dest: c.demand_mbps for c in commodities}
    frontends, grids, ue_cand, mtdus, mtdu_cand = _enumeration_space(instance, ue_ids)

    best = math.inf
    for combo in itertools.product(*grids):
        powers = dict(zip(frontends, combo))
        caps = _edge_capacities(instance, powers)
        ue_options = [
            [f for f in ue_cand[ue] if caps.get((f, ue), 0.0) > 0] for ue in ue_ids
        ]
        if any(not opts for opts in ue_options):
            continue
        mtdu_options = [
            [None] + [f for f in mtdu_cand[m][1:] if caps.get((f, m), 0.0) > 0]
            for m in mtdus
        ]
        for ue_pick in itertools.product(*ue_options):
            ue_parent = dict(zip(ue_ids, ue_pick))
            for m_pick in itertools.product(*mtdu_options):
                unit_parent = dict(zip(mtdus, m_pick))
                tree = _parent_chain_edges(g, ue_parent, unit_parent)
                if tree is None:
                    continue
                # Demand routed over each wireless tree edge.
                load = _routed_demand(g, tree, ue_parent, demand)
                if load is None:
                    continue
                airtimes: dict[EdgeKey, float] = {}
                node_load: dict[int, float] = {}
                ok = True
                for key, d_e in load.items():
                    c = caps.get(key, 0.0)
                    if c <= 0:
                        ok = False
                        break
                    a = d_e / c
                    airtimes[key] = a
                    node_load[key[0]] = node_load.get(key[0], 0.0) + a
                    node_load[key[1]] = node_load.get(key[1], 0.0) + a
                if not ok or any(v > 1.0 + 1e-9 for v in node_load.values()):
                    continue
                value = solution_power(powers, airtimes)
                if value < best:
                    best = value
    if not math.isfinite(best):
        raise NoFeasible("no power/tree/routing combination meets the demands")
    return best


def _routed_demand(
    graph: MeasurementGraph,
    tree: set[EdgeKey],
    ue_parent: Mapping[int, int],
    demand: Mapping[int, float],
) -> dict[EdgeKey, float] | None:
    """Summed demand per wireless tree edge along each UE's unique path."""
    wireless = {e.key for e in graph.wireless_edges}
    parent_of: dict[int, int] = {}
    for src, dst in tree:
        if dst in parent_of:
            return None
        parent_of[dst] = src
    donor = graph.donor.id
    load: dict[EdgeKey, float] = {}
    for ue, d in demand.items():
        node = ue
        hops = 0
        while node != donor:
            src = parent_of.get(node)
            if src is None or hops > len(tree):
                return None
            key = (src, node)
            if key in wireless:
                load[key] = load.get(key, 0.0) + d
            node = src
            hops += 1
    return load


# -- solution validation -------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    rule: str
    location: tuple
    magnitude: float = 0.0

    def __str__(self):
        where = ",".join(str(x) for x in self.location)
        return f"{self.rule}@{where}: {self.magnitude:.3e}"


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[Violation, ...]
    recomputed_objective: float | None


def _granted_capacity(
    table: CapacityTable, signal_mw: float, interference_mw: float
) -> float:
    """Ladder capacity with relative slack on the threshold comparison."""
    if signal_mw <= 0:
        return 0.0
    if interference_mw <= 0:
        return table.max_capacity_mbps
    best = 0.0
    for entry in table.entries:
        lhs = signal_mw
        rhs = entry.threshold_linear * interference_mw
        if lhs >= rhs - _LEVEL_SLACK * max(lhs, rhs):
            best = entry.capacity_mbps
        else:
            break
    return best


def validate_solution(
    instance: ProblemInstance, solution: NetworkSolution
) -> ValidationReport:
    """Re-check every constraint numerically from the solution's own values."""
    g = instance.graph
    violations: list[Violation] = []
    is_energy = solution.problem == "energy"
    commodities = [
        c for c in instance.commodities if not is_energy or c.demand_mbps > 0
    ]

    # Airtime: range and per-node budgets (both endpoints charged).
    node_load: dict[int, float] = {}
    for key, a in solution.airtimes.items():
        if a < -_TOL or a > 1 + _TOL:
            violations.append(Violation("AirtimeRange", key, a))
        node_load[key[0]] = node_load.get(key[0], 0.0) + a
        node_load[key[1]] = node_load.get(key[1], 0.0) + a
    for node_id, load in sorted(node_load.items()):
        if load > 1 + _TOL:
            violations.append(Violation("AirtimeBudget", (node_id,), load - 1.0))

    # Capacity claims against recomputed signal/interference.
    for key in sorted(solution.capacities_mbps):
        c = solution.capacities_mbps[key]
        if c <= _TOL:
            continue
        edge = g.edge(*key)
        if edge is None or edge.kind is not EdgeKind.WIRELESS:
            violations.append(Violation("CapacityOnNonWireless", key, c))
            continue
        budget = link_budget(edge, solution.powers_mw, g, instance.radio)
        granted = _granted_capacity(
            instance.capacity_table, budget.signal_mw, budget.interference_mw
        )
        limit = solution.airtimes.get(key, 0.0) * granted
        if c > limit + _TOL * max(1.0, granted):
            violations.append(Violation("CapacityOverclaim", key, c - limit))

    # Flows: conservation, nonnegativity/binariness, link loads.
    link_flow: dict[EdgeKey, float] = {}
    rates: dict[int, float] = {}
    for comm in commodities:
        per_edge = solution.flows.get(comm.id, {})
        net: dict[int, float] = {}
        for (src, dst), v in per_edge.items():
            if is_energy and min(abs(v), abs(v - 1)) > _TOL:
                violations.append(Violation("NonBinaryFlow", (comm.id, src, dst), v))
            if v < -_TOL:
                violations.append(Violation("NegativeFlow", (comm.id, src, dst), v))
            weight = comm.demand_mbps * v if is_energy else v
            edge = g.edge(src, dst)
            if edge is None:
                violations.append(Violation("FlowOffGraph", (comm.id, src, dst), v))
                continue
            if edge.kind is EdgeKind.WIRELESS:
                link_flow[(src, dst)] = link_flow.get((src, dst), 0.0) + weight
            net[src] = net.get(src, 0.0) + v
            net[dst] = net.get(dst, 0.0) - v
        rate = -net.get(comm.dest, 0.0)
        rates[comm.dest] = comm.demand_mbps * rate if is_energy else rate
        for node_id, value in sorted(net.items()):
            if node_id in (comm.source, comm.dest):
                continue
            if abs(value) > _TOL:
                violations.append(Violation("FlowConservation", (comm.id, node_id), value))
        if is_energy and abs(rate - 1.0) > _TOL:
            violations.append(Violation("UnroutedDemand", (comm.id,), rate))

    for key, flow in sorted(link_flow.items()):
        c = solution.capacities_mbps.get(key, 0.0)
        if flow > c + _TOL * max(1.0, c):
            violations.append(Violation("LinkOverload", key, flow - c))

    # Reported per-UE rates must match the flows.
    for comm in commodities:
        reported = solution.per_ue_mbps.get(comm.dest)
        actual = rates.get(comm.dest, 0.0)
        if reported is None or abs(reported - actual) > _TOL * max(1.0, abs(actual)):
            violations.append(
                Violation("PerUeMismatch", (comm.dest,), (reported or 0.0) - actual)
            )

    # Tree shape.
    required = [
        comm.dest
        for comm in commodities
        if is_energy or rates.get(comm.dest, 0.0) > _TOL
    ]
    tree_report = validate_tree(g, solution.chosen_edges, required_ues=required)
    for tv in tree_report.violations:
        violations.append(Violation(tv.rule, tv.location))

    # Activation consistency (sleeping frontends neither transmit nor serve).
    chosen_srcs = {src for src, _ in solution.chosen_edges}
    for fid, on in sorted(solution.activations.items()):
        p = solution.powers_mw.get(fid, 0.0)
        if not on:
            if p > _TOL:
                violations.append(Violation("SleepingTransmitter", (fid,), p))
            wireless_out = {e.dst for e in g.out_edges(fid) if e.kind is EdgeKind.WIRELESS}
            if fid in chosen_srcs and any(
                (fid, dst) in set(solution.chosen_edges) for dst in wireless_out
            ):
                violations.append(Violation("SleepingServer", (fid,)))

    # Objective recomputation.
    recomputed: float | None = None
    if is_energy:
        try:
            recomputed = total_power(solution, instance.power_model, g).total_w
        except Exception as exc:  # inconsistent activations already flagged
            violations.append(Violation("EnergyRecompute", (str(exc),)))
    else:
        recomputed = min(
            (rates.get(comm.dest, 0.0) for comm in commodities), default=0.0
        )
    if recomputed is not None and solution.objective is not None:
        if abs(recomputed - solution.objective) > _TOL * max(1.0, abs(recomputed)):
            violations.append(
                Violation("ObjectiveMismatch", (), recomputed - solution.objective)
            )

    return ValidationReport(
        ok=not violations,
        violations=tuple(violations),
        recomputed_objective=recomputed,
    )
