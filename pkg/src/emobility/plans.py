"""Plans (ordered legs over the reduced graph) and constraint validation.

A maximal block of consecutive legs sharing one non-walk mode is a single
carried segment: the tool is picked up where the block starts, ridden across
every leg of the block, and dropped where the block ends. Inventory is
replayed sequentially, so a plan may pick up a tool it dropped earlier at
that same hub, but never a tool that has already been moved away.
"""
from __future__ import annotations

from dataclasses import dataclass

from .graph import Mode
from .scenario import SOC_EPS, energy_required


@dataclass(frozen=True)
class Leg:
    src: str
    dst: str
    mode: Mode
    time_s: float
    dist_m: float


@dataclass(frozen=True)
class Plan:
    legs: tuple  # of Leg, chained src -> dst
    total_time_s: float

    @classmethod
    def from_legs(cls, legs):
        legs = tuple(legs)
        total = 0.0
        for leg in legs:
            total += leg.time_s
        return cls(legs=legs, total_time_s=total)


EMPTY_PLAN = Plan(legs=(), total_time_s=0.0)


# Violation codes reported by validate_plan.
CHAIN_BROKEN = "chain_broken"
TOTAL_MISMATCH = "total_mismatch"
UNKNOWN_ARC = "unknown_arc"
PREFERENCE_EXCLUDED = "preference_excluded"
NO_TOOL_AT_PICKUP = "no_tool_at_pickup"
UNDOCKABLE_DROP = "undockable_drop"
ENERGY_DEFICIT = "energy_deficit"
TERMINAL_NOT_WALK = "terminal_not_walk"


@dataclass(frozen=True)
class Violation:
    code: str
    detail: str


def plan_cost(plan, r):
    """Total time recomputed from the reduced graph's arcs."""
    total = 0.0
    for leg in plan.legs:
        arc = r.arc_index.get((leg.src, leg.dst, leg.mode))
        if arc is None:
            raise KeyError(f"no arc {leg.src}->{leg.dst} by {leg.mode.value}")
        total += arc.time_s
    return total


def replay_plan(plan, r, sc, origin=None, dest=None):
    """Check every constraint along a plan.

    Returns (violations, soc_after) where soc_after[i] is the carried tool's
    charge after leg i (None while walking). An empty violations tuple means
    the plan is valid.
    """
    origin = r.origin if origin is None else origin
    dest = r.dest if dest is None else dest
    violations = []
    soc_after = [None] * len(plan.legs)

    if not plan.legs:
        if origin != dest:
            violations.append(Violation(CHAIN_BROKEN, "empty plan but origin != destination"))
        if plan.total_time_s != 0.0:
            violations.append(Violation(TOTAL_MISMATCH, "empty plan with nonzero total"))
        return tuple(violations), soc_after

    if plan.legs[0].src != origin:
        violations.append(Violation(CHAIN_BROKEN, f"plan starts at {plan.legs[0].src!r}, not origin"))
    if plan.legs[-1].dst != dest:
        violations.append(Violation(CHAIN_BROKEN, f"plan ends at {plan.legs[-1].dst!r}, not destination"))
    total = 0.0
    for i, leg in enumerate(plan.legs):
        if i > 0 and leg.src != plan.legs[i - 1].dst:
            violations.append(Violation(CHAIN_BROKEN, f"leg {i} starts at {leg.src!r}, previous ended elsewhere"))
        arc = r.arc_index.get((leg.src, leg.dst, leg.mode))
        if arc is None or arc.time_s != leg.time_s:
            violations.append(Violation(UNKNOWN_ARC, f"leg {i} does not match a reduced arc"))
        if leg.mode not in sc.preference.allowed:
            violations.append(Violation(PREFERENCE_EXCLUDED, leg.mode.value))
        total += leg.time_s
    if total != plan.total_time_s:
        violations.append(Violation(TOTAL_MISMATCH, f"stored {plan.total_time_s}, legs sum to {total}"))

    hub_nodes = {h.node for h in sc.hubs}
    first, last = plan.legs[0], plan.legs[-1]
    if first.mode is not Mode.Walk and first.src not in hub_nodes:
        violations.append(Violation(TERMINAL_NOT_WALK, "first leg leaves a non-hub origin by tool"))
    if last.mode is not Mode.Walk and last.dst not in hub_nodes:
        violations.append(Violation(TERMINAL_NOT_WALK, "last leg enters a non-hub destination by tool"))

    # Sequential inventory: {node: {mode: soc or None-if-taken}} overrides.
    overrides = {}

    def available_soc(node, mode):
        if node in overrides and mode in overrides[node]:
            return overrides[node][mode]
        return sc.pristine_tool_soc(node, mode)

    i = 0
    while i < len(plan.legs):
        leg = plan.legs[i]
        if leg.mode is Mode.Walk:
            i += 1
            continue
        j = i
        while j + 1 < len(plan.legs) and plan.legs[j + 1].mode is leg.mode:
            j += 1
        mode = leg.mode
        pickup, drop = plan.legs[i].src, plan.legs[j].dst
        soc = available_soc(pickup, mode)
        if soc is None:
            violations.append(Violation(NO_TOOL_AT_PICKUP, f"no {mode.value} docked at {pickup!r}"))
            soc = 0.0
            deficit = True
        else:
            overrides.setdefault(pickup, {})[mode] = None
            deficit = False
        for k in range(i, j + 1):
            soc -= energy_required(sc.energy, mode, plan.legs[k].time_s)
            soc_after[k] = soc
            if soc < -SOC_EPS and not deficit:
                deficit = True
                violations.append(
                    Violation(ENERGY_DEFICIT, f"{mode.value} charge exhausted on leg {k} ({soc:.3f}%)")
                )
        if mode not in sc.docks_at(drop):
            violations.append(Violation(UNDOCKABLE_DROP, f"{mode.value} cannot dock at {drop!r}"))
        elif not deficit:
            overrides.setdefault(drop, {})[mode] = soc
        i = j + 1

    return tuple(violations), soc_after


def validate_plan(plan, r, sc, origin=None, dest=None):
    """All violated constraints for a plan; empty tuple means valid."""
    return replay_plan(plan, r, sc, origin=origin, dest=dest)[0]
