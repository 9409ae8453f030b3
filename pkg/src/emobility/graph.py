"""Directed multi-modal road graph: loading, per-mode shortest times, hub-level reduction.

The full graph carries one travel time per permitted mode on every edge.
Planning happens on a reduced graph whose arcs are precomputed per-mode
shortest travel times between the origin, the destination and the E-hubs.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from enum import Enum

from .errors import (
    DanglingNodeError,
    NetworkFormatError,
    NoFeasibleEntryError,
    UnknownNodeError,
)


class Mode(str, Enum):
    Walk = "Walk"
    EBike = "EBike"
    EScooter = "EScooter"
    ECar = "ECar"


TOOL_MODES = (Mode.EBike, Mode.EScooter, Mode.ECar)

# Fallback urban speeds, used when neither the edge nor the scenario profile
# supplies one. Fully overridable in scenario config.
DEFAULT_SPEED_MPS = {
    Mode.Walk: 1.4,
    Mode.EScooter: 4.0,
    Mode.EBike: 5.0,
    Mode.ECar: 11.0,
}


@dataclass(frozen=True)
class EdgeRecord:
    id: str
    src: str
    dst: str
    length_m: float
    time_by_mode: dict  # Mode -> seconds; absent entry = mode not permitted
    speed_override: dict = field(default_factory=dict)  # Mode -> m/s, from the document


@dataclass(frozen=True)
class MultiModalGraph:
    nodes: dict  # node id -> payload dict (optional "x","y" pass through for the UI)
    edges: dict  # edge id -> EdgeRecord
    adjacency: dict  # node id -> tuple of outgoing edge ids, sorted

    def __contains__(self, node_id):
        return node_id in self.nodes


def _parse_mode(raw, field_name):
    try:
        return Mode(raw)
    except ValueError:
        raise NetworkFormatError(f"unknown mode {raw!r}", field=field_name) from None


def _edge_times(length_m, modes, speed_override, profile, clock_s):
    mult = profile.multiplier_at(clock_s) if profile is not None else 1.0
    times = {}
    for mode in modes:
        speed = speed_override.get(mode)
        if speed is None:
            if profile is not None:
                speed = profile.base_speed.get(mode, DEFAULT_SPEED_MPS[mode])
            else:
                speed = DEFAULT_SPEED_MPS[mode]
        speed *= mult  # congestion slows every mode, overrides included
        if speed <= 0:
            raise NetworkFormatError(f"non-positive speed for {mode.value}", field="edges")
        times[mode] = length_m / speed
    return times


def load_graph(document, profile=None, clock_s=0.0):
    """Build a MultiModalGraph from a network document.

    Travel times are length / speed, where speed is the per-edge override if
    present, otherwise the scenario speed profile at ``clock_s``, otherwise
    the module defaults.
    """
    if not isinstance(document, dict):
        raise NetworkFormatError("network document must be an object")
    nodes = {}
    for i, raw in enumerate(document.get("nodes", [])):
        if not isinstance(raw, dict) or "id" not in raw:
            raise NetworkFormatError("node entries need an 'id'", field=f"nodes[{i}]")
        nid = str(raw["id"])
        if nid in nodes:
            raise NetworkFormatError(f"duplicate node id {nid!r}", field=f"nodes[{i}]")
        nodes[nid] = {k: v for k, v in raw.items() if k != "id"}

    edges = {}
    adjacency = {nid: [] for nid in nodes}
    for i, raw in enumerate(document.get("edges", [])):
        where = f"edges[{i}]"
        if not isinstance(raw, dict):
            raise NetworkFormatError("edge entries must be objects", field=where)
        try:
            eid = str(raw["id"])
            src = str(raw["from"])
            dst = str(raw["to"])
            length = float(raw["length_m"])
            mode_names = raw["modes"]
        except KeyError as exc:
            raise NetworkFormatError(f"edge missing key {exc}", field=where) from None
        if eid in edges:
            raise NetworkFormatError(f"duplicate edge id {eid!r}", field=where)
        for endpoint in (src, dst):
            if endpoint not in nodes:
                raise DanglingNodeError(endpoint, edge_id=eid)
        if length <= 0:
            raise NetworkFormatError(f"non-positive length on edge {eid!r}", field=where)
        modes = [_parse_mode(m, where) for m in mode_names]
        if not modes:
            raise NetworkFormatError(f"edge {eid!r} permits no modes", field=where)
        override = {
            _parse_mode(m, where): float(s)
            for m, s in (raw.get("speed_mps") or {}).items()
        }
        times = _edge_times(length, modes, override, profile, clock_s)
        edges[eid] = EdgeRecord(eid, src, dst, length, times, override)
        adjacency[src].append(eid)

    adjacency = {nid: tuple(sorted(out)) for nid, out in adjacency.items()}
    return MultiModalGraph(nodes=nodes, edges=edges, adjacency=adjacency)


def retime_graph(g, profile, clock_s):
    """Recompute edge travel times under a scenario speed profile."""
    edges = {}
    for eid, e in g.edges.items():
        times = _edge_times(e.length_m, tuple(e.time_by_mode), e.speed_override, profile, clock_s)
        edges[eid] = EdgeRecord(eid, e.src, e.dst, e.length_m, times, e.speed_override)
    return MultiModalGraph(nodes=g.nodes, edges=edges, adjacency=g.adjacency)


def shortest_time_map(g, mode, source):
    """Single-source shortest travel times for one mode.

    Returns {node: (time_s, dist_m, edge_id_path)} for every reachable node.
    Equal-cost ties are broken by the lexicographically smallest edge-id
    sequence, which keeps reduced graphs deterministic across platforms.
    """
    if source not in g.nodes:
        raise UnknownNodeError(source)
    best = {}
    heap = [(0.0, (), source, 0.0)]
    while heap:
        time, path, node, dist = heapq.heappop(heap)
        if node in best:
            continue
        best[node] = (time, dist, path)
        for eid in g.adjacency.get(node, ()):
            edge = g.edges[eid]
            w = edge.time_by_mode.get(mode)
            if w is None or edge.dst in best:
                continue
            heapq.heappush(heap, (time + w, path + (eid,), edge.dst, dist + edge.length_m))
    return best


def shortest_time(g, mode, u, v):
    """Minimum travel time u -> v using only edges permitting ``mode``.

    Returns seconds, or None when v is unreachable from u in that mode's
    subgraph (never a sentinel numeric weight).
    """
    if v not in g.nodes:
        raise UnknownNodeError(v)
    reached = shortest_time_map(g, mode, u).get(v)
    return None if reached is None else reached[0]


@dataclass(frozen=True)
class Arc:
    src: str
    dst: str
    mode: Mode
    time_s: float
    dist_m: float


@dataclass(frozen=True)
class ReducedGraph:
    origin: str
    dest: str
    hubs: tuple
    nodes: tuple
    arcs: tuple
    out: dict  # node id -> tuple of Arcs
    arc_index: dict  # (src, dst, mode) -> Arc


class ReducedGraphFactory:
    """Builds reduced graphs over one full graph, caching per-(node, mode) searches.

    Hub-to-hub arcs do not depend on the query, so reusing one factory across
    many (origin, destination) pairs avoids recomputing them.
    """

    def __init__(self, g):
        self.graph = g
        self._maps = {}

    def _map(self, node, mode):
        key = (node, mode)
        got = self._maps.get(key)
        if got is None:
            got = self._maps[key] = shortest_time_map(self.graph, mode, node)
        return got

    def build(self, origin, dest, hubs):
        g = self.graph
        for node in (origin, dest, *hubs):
            if node not in g.nodes:
                raise UnknownNodeError(node)
        if not hubs:
            raise ValueError("hubs must be nonempty")

        node_order = list(dict.fromkeys([origin, dest, *hubs]))
        hub_set = set(hubs)

        if origin != dest:  # an empty-plan query needs no entry legs
            walk_from_origin = self._map(origin, Mode.Walk)
            if not any(h in walk_from_origin for h in hubs):
                raise NoFeasibleEntryError(f"origin {origin!r} cannot walk to any hub")
            if not any(dest in self._map(h, Mode.Walk) for h in hubs):
                raise NoFeasibleEntryError(f"no hub can walk to destination {dest!r}")

        arcs = []
        for src in node_order:
            for mode in Mode:
                reach = self._map(src, mode)
                for dst in node_order:
                    if dst == src:
                        continue
                    hit = reach.get(dst)
                    if hit is not None:
                        arcs.append(Arc(src, dst, mode, hit[0], hit[1]))
        # A terminal placed exactly on a hub keeps its zero-length walk arc.
        for terminal in (origin, dest):
            if terminal in hub_set:
                arcs.append(Arc(terminal, terminal, Mode.Walk, 0.0, 0.0))

        arcs.sort(key=lambda a: (a.src, a.dst, a.mode.value))
        out = {n: [] for n in node_order}
        for arc in arcs:
            out[arc.src].append(arc)
        return ReducedGraph(
            origin=origin,
            dest=dest,
            hubs=tuple(hubs),
            nodes=tuple(node_order),
            arcs=tuple(arcs),
            out={n: tuple(v) for n, v in out.items()},
            arc_index={(a.src, a.dst, a.mode): a for a in arcs},
        )


def build_reduced_graph(g, origin, dest, hubs):
    """One-shot reduced graph construction (see ReducedGraphFactory)."""
    return ReducedGraphFactory(g).build(origin, dest, hubs)
