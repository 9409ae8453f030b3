"""Scenario state: E-hubs, tool inventories, energy model, preferences, speed profiles.

A scenario is immutable after load; the generators (tool distribution, O/D
sampling) return new values instead of mutating. All randomness is a pure
function of (config, seed) via :mod:`emobility.seeding`.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

from .errors import (
    ClockOutOfRangeError,
    InsufficientPairsError,
    ScenarioFormatError,
    SocOutOfRangeError,
)
from .graph import DEFAULT_SPEED_MPS, TOOL_MODES, Mode, retime_graph, shortest_time_map
from .seeding import rng_from

SECONDS_PER_DAY = 86400.0
SOC_EPS = 1e-9  # float slack when comparing consumed energy against carried charge


@dataclass(frozen=True)
class ToolState:
    mode: Mode
    soc: float  # percent in [0, 100]


@dataclass(frozen=True)
class EHub:
    node: str
    docks: frozenset  # of Mode
    tools: tuple  # of ToolState, at most one per mode


@dataclass(frozen=True)
class EnergyModel:
    rate_per_100s: dict  # Mode -> percent SOC consumed per 100 s ridden; Walk is 0

    def rate(self, mode):
        if mode is Mode.Walk:
            return 0.0
        return self.rate_per_100s.get(mode, 0.0)


@dataclass(frozen=True)
class UserPreference:
    allowed: frozenset  # of Mode; Walk is always a member

    @classmethod
    def of(cls, modes):
        return cls(frozenset(modes) | {Mode.Walk})

    @classmethod
    def all_modes(cls):
        return cls.of(Mode)


@dataclass(frozen=True)
class SpeedProfile:
    base_speed: dict  # Mode -> m/s
    congestion: tuple  # of (from_s, to_s, mult); non-overlapping; gaps mean 1.0

    def multiplier_at(self, clock_s):
        if not 0.0 <= clock_s < SECONDS_PER_DAY:
            raise ClockOutOfRangeError(clock_s)
        for from_s, to_s, mult in self.congestion:
            if from_s <= clock_s < to_s:
                return mult
        return 1.0

    def speed(self, mode, clock_s):
        base = self.base_speed.get(mode, DEFAULT_SPEED_MPS[mode])
        return base * self.multiplier_at(clock_s)


@dataclass(frozen=True)
class ScenarioConfig:
    graph: object  # MultiModalGraph, retimed under this scenario's profile
    hubs: tuple  # of EHub
    energy: EnergyModel
    preference: UserPreference
    profile: SpeedProfile
    seed: int
    clock_s: float

    @property
    def hub_by_node(self):
        return {h.node: h for h in self.hubs}

    def docks_at(self, node):
        hub = self.hub_by_node.get(node)
        return hub.docks if hub is not None else frozenset()

    def pristine_tool_soc(self, node, mode):
        """SOC of the docked tool of ``mode`` at ``node``, or None."""
        hub = self.hub_by_node.get(node)
        if hub is None:
            return None
        for tool in hub.tools:
            if tool.mode is mode:
                return tool.soc
        return None


class DistributionPolicy(str, Enum):
    Fixed = "Fixed"
    Random = "Random"


def _parse_mode(raw, field):
    try:
        return Mode(raw)
    except ValueError:
        raise ScenarioFormatError(f"unknown mode {raw!r}", field=field) from None


def _parse_profile(raw):
    raw = raw or {}
    base = dict(DEFAULT_SPEED_MPS)
    for m, s in (raw.get("base_speed") or {}).items():
        mode = _parse_mode(m, "profile.base_speed")
        s = float(s)
        if s <= 0:
            raise ScenarioFormatError(f"non-positive base speed for {mode.value}", field="profile.base_speed")
        base[mode] = s
    segments = []
    for i, seg in enumerate(raw.get("congestion") or []):
        field = f"profile.congestion[{i}]"
        try:
            from_s, to_s, mult = float(seg["from_s"]), float(seg["to_s"]), float(seg["mult"])
        except KeyError as exc:
            raise ScenarioFormatError(f"congestion segment missing {exc}", field=field) from None
        if not (0.0 <= from_s < to_s <= SECONDS_PER_DAY):
            raise ScenarioFormatError("segment must satisfy 0 <= from_s < to_s <= 86400", field=field)
        if not 0.0 < mult <= 1.0:
            raise ScenarioFormatError(f"multiplier must be in (0, 1], got {mult}", field=field)
        segments.append((from_s, to_s, mult))
    segments.sort()
    for (_, prev_to, _), (nxt_from, _, _) in zip(segments, segments[1:]):
        if nxt_from < prev_to:
            raise ScenarioFormatError("congestion segments overlap", field="profile.congestion")
    return SpeedProfile(base_speed=base, congestion=tuple(segments))


def _parse_hub(raw, i, g):
    field = f"hubs[{i}]"
    node = str(raw.get("node", ""))
    if node not in g.nodes:
        raise ScenarioFormatError(f"hub node {node!r} not in graph", field=f"{field}.node")
    docks = frozenset(_parse_mode(m, f"{field}.docks") for m in raw.get("docks", []))
    tools = []
    seen = set()
    for j, t in enumerate(raw.get("tools", [])):
        tfield = f"{field}.tools[{j}]"
        mode = _parse_mode(t.get("mode"), f"{tfield}.mode")
        if mode is Mode.Walk:
            raise ScenarioFormatError("Walk is not a dockable tool", field=f"{tfield}.mode")
        soc = float(t.get("soc", 100.0))
        if not 0.0 <= soc <= 100.0:
            raise SocOutOfRangeError(soc, field=f"{tfield}.soc")
        if mode not in docks:
            raise ScenarioFormatError(f"tool mode {mode.value} not in hub docks", field=tfield)
        if mode in seen:
            raise ScenarioFormatError(f"hub holds more than one {mode.value}", field=tfield)
        seen.add(mode)
        tools.append(ToolState(mode, soc))
    return EHub(node=node, docks=docks, tools=tuple(tools))


def load_scenario(document, g):
    """Validate a scenario document against a loaded graph.

    The returned config's graph is the input graph retimed under the
    scenario's speed profile at its clock.
    """
    if not isinstance(document, dict):
        raise ScenarioFormatError("scenario document must be an object")
    hubs = tuple(_parse_hub(h, i, g) for i, h in enumerate(document.get("hubs", [])))

    rates = {}
    for m, r in ((document.get("energy") or {}).get("rate_per_100s") or {}).items():
        mode = _parse_mode(m, "energy.rate_per_100s")
        r = float(r)
        if r < 0:
            raise ScenarioFormatError(f"negative consumption rate for {mode.value}", field="energy.rate_per_100s")
        if mode is Mode.Walk and r != 0:
            raise ScenarioFormatError("Walk rate must be 0", field="energy.rate_per_100s")
        rates[mode] = r
    rates[Mode.Walk] = 0.0

    pref_doc = document.get("preference") or {}
    allowed = pref_doc.get("allowed")
    if allowed is None:
        preference = UserPreference.all_modes()
    else:
        preference = UserPreference.of(_parse_mode(m, "preference.allowed") for m in allowed)

    profile = _parse_profile(document.get("profile"))
    clock_s = float(document.get("clock_s", 0.0))
    if not 0.0 <= clock_s < SECONDS_PER_DAY:
        raise ClockOutOfRangeError(clock_s)
    seed = int(document.get("seed", 0))
    if seed < 0:
        raise ScenarioFormatError("seed must be a 64-bit unsigned integer", field="seed")

    return ScenarioConfig(
        graph=retime_graph(g, profile, clock_s),
        hubs=hubs,
        energy=EnergyModel(rate_per_100s=rates),
        preference=preference,
        profile=profile,
        seed=seed,
        clock_s=clock_s,
    )


def energy_required(em, mode, ride_seconds):
    """Percent SOC consumed by riding ``mode`` for ``ride_seconds``."""
    if ride_seconds < 0:
        raise ValueError("ride_seconds must be >= 0")
    return em.rate(mode) * ride_seconds / 100.0


def feasible_transition(sc, carried_soc, mode, ride_seconds):
    """Binary energy factor: 1 iff the carried charge covers the transition."""
    if mode is Mode.Walk:
        return 1
    return 1 if carried_soc - energy_required(sc.energy, mode, ride_seconds) >= -SOC_EPS else 0


def distribute_tools(sc, policy, seed, soc=100.0):
    """Reassign hub inventories under a placement policy.

    Fixed gives every hub one tool of each of the three types; Random gives
    each hub an independently drawn uniformly random nonempty subset of the
    three types. Deterministic under (policy, seed). New tools start at
    ``soc`` percent and dock sets are widened to cover them.
    """
    policy = DistributionPolicy(policy)
    if not 0.0 <= soc <= 100.0:
        raise SocOutOfRangeError(soc, field="soc")
    rng = rng_from(seed, 1)
    subsets = [
        tuple(m for bit, m in enumerate(TOOL_MODES) if mask >> bit & 1)
        for mask in range(1, 8)
    ]
    new_hubs = []
    for hub in sc.hubs:
        if policy is DistributionPolicy.Fixed:
            modes = TOOL_MODES
        else:
            modes = subsets[int(rng.integers(0, len(subsets)))]
        new_hubs.append(
            EHub(
                node=hub.node,
                docks=hub.docks | frozenset(modes),
                tools=tuple(ToolState(m, soc) for m in modes),
            )
        )
    return replace(sc, hubs=tuple(new_hubs))


def sample_od_pairs(g, n, seed):
    """Sample n distinct walk-reachable (origin, destination) pairs.

    Pairs are stratified across short/medium/long walk-distance terciles and
    drawn deterministically under ``seed``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if len(g.nodes) < 2:
        raise ValueError("graph needs at least 2 nodes")

    candidates = []
    for origin in sorted(g.nodes):
        for dst, (_t, dist, _p) in shortest_time_map(g, Mode.Walk, origin).items():
            if dst != origin:
                candidates.append((dist, origin, dst))
    if len(candidates) < n:
        raise InsufficientPairsError(f"only {len(candidates)} reachable pairs, need {n}")
    candidates.sort()

    third = len(candidates) // 3
    strata = [candidates[:third], candidates[third : 2 * third], candidates[2 * third :]]
    want = [n // 3] * 3
    for i in range(n % 3):
        want[i] += 1
    # Top up from neighbouring strata when one is too small.
    for i in range(3):
        excess = want[i] - len(strata[i])
        if excess > 0:
            want[i] -= excess
            want[(i + 1) % 3] += excess

    rng = rng_from(seed, 2)
    picked = []
    for stratum, k in zip(strata, want):
        idx = rng.choice(len(stratum), size=k, replace=False)
        picked.extend(stratum[int(j)] for j in sorted(idx))
    return [(o, d) for _dist, o, d in picked]


def edge_speed(sc, mode, clock_s):
    """Scenario base speed for a mode, scaled by congestion at ``clock_s``."""
    return sc.profile.speed(mode, clock_s)
