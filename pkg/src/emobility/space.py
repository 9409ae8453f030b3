"""Compiled move tables over one (reduced graph, scenario) pair.

Both planners and the exact solver step through the same move semantics:
walking is always permitted (after docking any carried tool), a tool leg
either continues the carried tool or picks a docked one up, and a tool may
only enter the destination if it can dock there. Arcs that can never be
ridden under the scenario (excluded mode, or no reachable supply of that
tool type) are dropped here once instead of being re-filtered every step.
"""
from __future__ import annotations

from dataclasses import dataclass

from .graph import Mode, TOOL_MODES
from .scenario import SOC_EPS, energy_required

WALK = 0
MODE_BY_ID = (Mode.Walk, Mode.EBike, Mode.EScooter, Mode.ECar)
MODE_ID = {mode: i for i, mode in enumerate(MODE_BY_ID)}
NO_TOOL = -1


@dataclass(slots=True)
class CompiledArc:
    idx: int
    src_i: int
    dst_i: int
    mode_id: int
    mode: Mode
    time_s: float
    dist_m: float
    need_pct: float  # SOC consumed riding this arc (0 for walk)
    arc: object  # the underlying reduced-graph Arc


class ActionSpace:
    """Indexed nodes, usable arcs and inventory tables for fast stepping."""

    def __init__(self, reduced, sc):
        self.reduced = reduced
        self.scenario = sc
        self.nodes = reduced.nodes
        self.node_i = {n: i for i, n in enumerate(self.nodes)}
        self.origin_i = self.node_i[reduced.origin]
        self.dest_i = self.node_i[reduced.dest]

        n = len(self.nodes)
        self.docks = [frozenset() for _ in range(n)]
        self.pristine = [{} for _ in range(n)]  # mode_id -> soc
        for hub in sc.hubs:
            i = self.node_i.get(hub.node)
            if i is None:
                continue
            self.docks[i] = frozenset(MODE_ID[m] for m in hub.docks)
            for tool in hub.tools:
                self.pristine[i][MODE_ID[tool.mode]] = tool.soc

        allowed = sc.preference.allowed
        keep = []
        if Mode.Walk in allowed:
            keep.extend(a for a in reduced.arcs if a.mode is Mode.Walk and a.src != a.dst)
        for mode in TOOL_MODES:
            if mode not in allowed:
                continue
            mid = MODE_ID[mode]
            by_src = {}
            for a in reduced.arcs:
                if a.mode is not mode or a.src == a.dst:
                    continue
                if self.node_i[a.dst] == self.dest_i and mid not in self.docks[self.dest_i]:
                    continue  # carried tool could never dock at the destination
                by_src.setdefault(a.src, []).append(a)
            # A tool arc is usable only where a tool of that type can actually
            # arrive: at a hub stocking it, or carried in over another usable arc.
            frontier = [nd for i, nd in enumerate(self.nodes) if mid in self.pristine[i]]
            seen = set(frontier)
            while frontier:
                u = frontier.pop()
                for a in by_src.get(u, ()):
                    keep.append(a)
                    if a.dst not in seen:
                        seen.add(a.dst)
                        frontier.append(a.dst)

        # (mode, destination) order: greedy argmax scans with strict
        # improvement then break action-value ties lexicographically for free.
        keep.sort(key=lambda a: (a.src, a.mode.value, a.dst))
        self.arcs = []
        self.out = [[] for _ in range(n)]
        for a in keep:
            ca = CompiledArc(
                idx=len(self.arcs),
                src_i=self.node_i[a.src],
                dst_i=self.node_i[a.dst],
                mode_id=MODE_ID[a.mode],
                mode=a.mode,
                time_s=a.time_s,
                dist_m=a.dist_m,
                need_pct=energy_required(sc.energy, a.mode, a.time_s),
                arc=a,
            )
            self.arcs.append(ca)
            self.out[ca.src_i].append(ca)
        self.out = [tuple(v) for v in self.out]
        # Most steps happen empty-handed with untouched local inventory;
        # their move and action-key lists are static, computed once per node.
        self.unladen = [self._moves_dynamic(i, NO_TOOL, 0.0, None) for i in range(n)]
        self.unladen_keys = [
            tuple((arc.mode, self.nodes[arc.dst_i]) for arc, _, _ in entries)
            for entries in self.unladen
        ]

    def moves(self, node_i, carried, soc, overrides=None):
        """Conformity-legal moves from a state, as a tuple (do not mutate).

        ``carried`` is a mode id or NO_TOOL; ``overrides`` maps
        (node_i, mode_id) -> soc-or-None for tools displaced earlier.
        Entries are (arc, ride_soc, energy_ok): ride_soc is the charge of the
        tool that would be ridden (None when walking), energy_ok the binary
        energy factor for the move. Ordered by (mode, destination).
        """
        if carried == NO_TOOL and not overrides:
            return self.unladen[node_i]
        return self._moves_dynamic(node_i, carried, soc, overrides)

    def actions(self, node_i, carried, soc, overrides, touched_nodes):
        """(moves, action keys) for a state; cached when the cache is exact.

        ``touched_nodes`` is the set of node indices whose inventory the
        overrides mention; elsewhere the pristine tables still apply.
        """
        if carried == NO_TOOL and node_i not in touched_nodes:
            return self.unladen[node_i], self.unladen_keys[node_i]
        acts = self._moves_dynamic(node_i, carried, soc, overrides or None)
        return acts, tuple((arc.mode, self.nodes[arc.dst_i]) for arc, _, _ in acts)

    def _moves_dynamic(self, node_i, carried, soc, overrides):
        docks = self.docks[node_i]
        can_drop = carried == NO_TOOL or carried in docks
        pristine = self.pristine[node_i]
        out = []
        for arc in self.out[node_i]:
            mid = arc.mode_id
            if mid == WALK:
                if can_drop:
                    out.append((arc, None, 1))
            elif mid == carried:
                out.append((arc, soc, 1 if soc - arc.need_pct >= -SOC_EPS else 0))
            elif can_drop:
                if overrides is not None:
                    got = overrides.get((node_i, mid), Ellipsis)
                    avail = pristine.get(mid) if got is Ellipsis else got
                else:
                    avail = pristine.get(mid)
                if avail is not None:
                    out.append((arc, avail, 1 if avail - arc.need_pct >= -SOC_EPS else 0))
        return tuple(out)
