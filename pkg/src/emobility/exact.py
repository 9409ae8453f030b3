"""Exact minimum-time solver for the constrained multi-modal problem.

Label-setting search over (node, carried tool type, quantized charge) with
Pareto dominance pruning: a label dies when another label at the same
(node, carried type) has both lower cost and at least as much charge. Charge
is quantized to quant levels over [0, 100]; consumption snaps to the grid
when it lands on it (all half-percent-rate models with the default
quant = 200) and rounds up otherwise, so any returned plan is always truly
feasible. Intended for tests and reference queries, not the fast path.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass

from .errors import NoFeasiblePlanError
from .plans import EMPTY_PLAN, Leg, Plan
from .space import NO_TOOL, WALK, ActionSpace

_SNAP = 1e-9


@dataclass(frozen=True)
class ExactResult:
    plan: Plan
    cost: float


def _to_quanta(percent, quant, up):
    scaled = percent * quant / 100.0
    nearest = round(scaled)
    if abs(scaled - nearest) <= _SNAP * max(1.0, abs(scaled)) + _SNAP:
        return int(nearest)
    return int(-(-scaled // 1)) if up else int(scaled // 1)


def exact_optimum(reduced, sc, quant=200):
    """Globally minimum-time plan honoring docking, energy and preference.

    Raises NoFeasiblePlanError when the destination is unreachable even by
    walking. quant >= 1 sets the charge quantization level count.
    """
    if quant < 1:
        raise ValueError("quant must be >= 1")
    if reduced.origin == reduced.dest:
        return ExactResult(EMPTY_PLAN, 0.0)

    space = ActionSpace(reduced, sc)
    dest_i = space.dest_i
    pickup_q = [
        {mid: _to_quanta(soc, quant, up=False) for mid, soc in pristine.items()}
        for pristine in space.pristine
    ]
    need_q = [_to_quanta(a.need_pct, quant, up=True) for a in space.arcs]

    # labels[i] = (cost, node_i, carried, soc_q, parent_label_idx, arc_idx)
    labels = [(0.0, space.origin_i, NO_TOOL, 0, -1, -1)]
    heap = [(0.0, 0)]
    frontier = {}  # (node, carried) -> list of nondominated (cost, soc_q)

    def dominated(key, cost, soc_q):
        for c, s in frontier.get(key, ()):
            if c <= cost and s >= soc_q:
                return True
        return False

    def settle(key, cost, soc_q):
        lst = frontier.setdefault(key, [])
        lst[:] = [(c, s) for c, s in lst if not (cost <= c and soc_q >= s)]
        lst.append((cost, soc_q))

    goal = None
    while heap:
        cost, idx = heapq.heappop(heap)
        _, node, carried, soc_q, _, _ = labels[idx]
        key = (node, carried)
        if dominated(key, cost, soc_q):
            continue
        if node == dest_i:
            goal = idx
            break
        settle(key, cost, soc_q)

        docks = space.docks[node]
        can_drop = carried == NO_TOOL or carried in docks
        for arc in space.out[node]:
            mid = arc.mode_id
            if mid == WALK:
                if not can_drop:
                    continue
                child = (cost + arc.time_s, arc.dst_i, NO_TOOL, 0, idx, arc.idx)
            elif mid == carried:
                left = soc_q - need_q[arc.idx]
                if left < 0:
                    continue
                child = (cost + arc.time_s, arc.dst_i, carried, left, idx, arc.idx)
            else:
                if not can_drop:
                    continue
                start_q = pickup_q[node].get(mid)
                if start_q is None:
                    continue
                left = start_q - need_q[arc.idx]
                if left < 0:
                    continue
                child = (cost + arc.time_s, arc.dst_i, mid, left, idx, arc.idx)
            ckey = (child[1], child[2])
            if dominated(ckey, child[0], child[3]):
                continue
            labels.append(child)
            heapq.heappush(heap, (child[0], len(labels) - 1))

    if goal is None:
        raise NoFeasiblePlanError(f"{reduced.dest!r} unreachable from {reduced.origin!r}")

    arc_ids = []
    idx = goal
    while idx != -1:
        _, _, _, _, parent, arc_idx = labels[idx]
        if arc_idx != -1:
            arc_ids.append(arc_idx)
        idx = parent
    arc_ids.reverse()
    legs = tuple(
        Leg(a.arc.src, a.arc.dst, a.mode, a.time_s, a.dist_m)
        for a in (space.arcs[i] for i in arc_ids)
    )
    plan = Plan.from_legs(legs)
    return ExactResult(plan, plan.total_time_s)
