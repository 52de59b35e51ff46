"""Turn raw solver values into validated network solutions.

Extraction is deliberately paranoid: binaries must sit within tolerance
of integers, ladder indicators must agree with a direct SINR recompute at
the extracted powers, and the assembled solution must pass the oracle's
full numeric validation.  Any failure raises ExtractionMismatch rather
than silently accepting a model/tolerance bug.
"""

from __future__ import annotations

import math

from .. import oracle
from ..capacity import ladder_position
from ..channel import link_budget
from ..errors import BackendError, ExtractionMismatch
from ..graph import EdgeKey
from ..problem import NetworkSolution, SolveStatus
from .backend import RawSolution
from .builder import ENERGY, MIN_ON_POWER_FRACTION, BuiltModel

_BIN_TOL = 1e-6
_FLOW_TOL = 1e-6
# Matches the oracle's level-granting slack (solver row tolerance).
_BOUNDARY_SLACK = 1e-4


def extract_solution(built: BuiltModel, raw: RawSolution, validate: bool = True) -> NetworkSolution:
    if raw.values is None:
        raise BackendError(f"cannot extract from status {raw.status.value} without values")

    def val(idx: int) -> float:
        return float(raw.values[idx])

    def bval(idx: int, what: str) -> int:
        v = val(idx)
        r = round(v)
        if abs(v - r) > _BIN_TOL:
            raise ExtractionMismatch(f"{what}: binary value {v} not within 1e-6 of an integer")
        return int(r)

    # Effective transmit powers.  Continuous powers under the model's
    # minimum-on threshold mean "off" (they grant no ladder level) and are
    # snapped to exactly zero.
    p_on = MIN_ON_POWER_FRACTION * built.instance.radio.p_max_mw
    powers: dict[int, float] = {}
    activations: dict[int, int] = {}
    for fid in sorted(built.power_reps):
        rep = built.power_reps[fid]
        if rep.is_const:
            p = rep.const_mw
        elif rep.cont_idx is not None:
            p = max(val(rep.cont_idx), 0.0)
            if p < p_on:
                p = 0.0
        else:
            p = sum(lvl * bval(idx, f"power level of {fid}") for lvl, idx in rep.level_terms)
        powers[fid] = p
        if built.problem == ENERGY:
            activations[fid] = bval(rep.act_idx, f"act[{fid}]") if rep.act_idx is not None else 0
        else:
            activations[fid] = 1 if p > 0 else 0

    # Flows and chosen edges.
    flows: dict[int, dict[EdgeKey, float]] = {}
    chosen: set[EdgeKey] = set()
    routing = built.routing_wireless + built.routing_wired
    for comm in built.commodities:
        per_edge: dict[EdgeKey, float] = {}
        for e in routing:
            idx = built.flow[(comm.id, e.key)]
            if built.problem == ENERGY:
                v = float(bval(idx, f"f[k{comm.id},{e.key}]"))
            else:
                v = max(val(idx), 0.0)
                if v < _FLOW_TOL:
                    v = 0.0
            if v:
                per_edge[e.key] = v
                chosen.add(e.key)
        flows[comm.id] = per_edge

    airtimes: dict[EdgeKey, float] = {}
    capacities: dict[EdgeKey, float] = {}
    for e in built.routing_wireless:
        if e.key in chosen:
            airtimes[e.key] = min(max(val(built.alpha[e.key]), 0.0), 1.0)
            capacities[e.key] = max(val(built.cap[e.key]), 0.0)
        else:
            airtimes[e.key] = 0.0
            capacities[e.key] = 0.0

    # Ladder indicators against a direct SINR recompute.  The solver may
    # leave an indicator at 0 despite a met threshold (a within-tolerance
    # violation on an unused edge, which only wastes capacity); granting a
    # level the physics denies is the bug this check exists to catch.
    table = built.instance.capacity_table
    for e in built.routing_wireless:
        phis = built.phi_vars.get(e.key, ())
        if phis:
            model_count = 0
            for i, idx in enumerate(phis):
                b = bval(idx, f"phi[{e.key},{i}]")
                if b and model_count < i:
                    raise ExtractionMismatch(f"phi chain broken on edge {e.key} at level {i}")
                model_count += b
        else:
            pos = built.phi_const_level.get(e.key)
            model_count = 0 if pos is None else pos + 1
        budget = link_budget(e, powers, built.instance.graph, built.instance.radio)
        pos = ladder_position(table, budget.signal_mw, budget.interference_mw)
        direct_count = 0 if pos is None else pos + 1
        if model_count > direct_count and phis:
            for j in range(direct_count, model_count):
                th = table.thresholds_linear[j]
                lhs, rhs = budget.signal_mw, th * budget.interference_mw
                if abs(lhs - rhs) > _BOUNDARY_SLACK * max(lhs, rhs, 1e-30):
                    raise ExtractionMismatch(
                        f"edge {e.key}: model grants {model_count} ladder levels, "
                        f"direct recompute grants {direct_count}"
                    )

    per_ue: dict[int, float] = {}
    for comm in built.commodities:
        if built.problem == ENERGY:
            per_ue[comm.dest] = comm.demand_mbps
        else:
            inflow = sum(v for (src, dst), v in flows[comm.id].items() if dst == comm.dest)
            outflow = sum(v for (src, dst), v in flows[comm.id].items() if src == comm.dest)
            per_ue[comm.dest] = inflow - outflow

    status = raw.status
    if status is SolveStatus.TIME_LIMIT:
        status = SolveStatus.FEASIBLE  # incumbent available

    solution = NetworkSolution(
        problem=built.problem,
        status=status,
        objective=raw.objective if raw.objective is not None else math.nan,
        chosen_edges=tuple(sorted(chosen)),
        flows=flows,
        airtimes=airtimes,
        powers_mw=powers,
        activations=activations,
        capacities_mbps=capacities,
        per_ue_mbps=per_ue,
        gap=raw.gap,
    )

    if validate:
        report = oracle.validate_solution(built.instance, solution)
        if not report.ok:
            summary = "; ".join(str(v) for v in report.violations[:8])
            raise ExtractionMismatch(
                f"solution failed re-validation: {summary}", report
            )
    return solution
