"""Energy-constrained multi-modal ant colony planner over the reduced graph.

Move selection weights combine pheromone level, inverse travel time and a
binary energy factor (pheromone^alpha * heuristic^beta * energy^gamma).
Each iteration evaporates all pheromone by (1 - rho), then every ant that
reached the destination deposits q_deposit / transition_time on each
transition it used.

The colony is simulated by count flow: ants sharing a partial path are one
frontier entry whose count is split multinomially over the candidate moves.
This is distribution-identical to stepping ants one by one (a multinomial is
n independent categorical draws) but far cheaper once paths coincide, which
they do both early (shared prefixes) and after convergence.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DeadEndError, NoFeasiblePlanError
from .plans import EMPTY_PLAN, Leg, Plan
from .seeding import rng_from
from .space import NO_TOOL, WALK, ActionSpace

START = -1  # virtual predecessor of an ant's first transition


@dataclass(frozen=True)
class AcoParams:
    alpha: float = 1.0
    beta: float = 2.0
    gamma: float = 1.0
    rho: float = 0.1
    q_deposit: float = 100.0
    n_ants: int = 1600
    n_iterations: int = 20
    tau0: float = 1.0
    step_cap: int | None = None  # defaults to 4 x reduced node count
    seed: int = 0
    elitist: bool = False

    def __post_init__(self):
        if min(self.alpha, self.beta, self.gamma) < 0:
            raise ValueError("alpha, beta, gamma must be >= 0")
        if not 0.0 < self.rho <= 1.0:
            raise ValueError("rho must be in (0, 1]")
        if self.q_deposit <= 0:
            raise ValueError("q_deposit must be > 0")
        if self.tau0 <= 0:
            raise ValueError("tau0 must be > 0")
        if self.n_ants < 1 or self.n_iterations < 1:
            raise ValueError("n_ants and n_iterations must be >= 1")

    @classmethod
    def from_dict(cls, raw, **overrides):
        raw = dict(raw or {})
        if "q" in raw:
            raw["q_deposit"] = raw.pop("q")
        raw.update(overrides)
        known = {f for f in cls.__dataclass_fields__}
        return cls(**{k: v for k, v in raw.items() if k in known})


@dataclass
class PheromoneTable:
    """Transition key ((arc, mode) pair identity) -> pheromone level."""

    levels: dict = field(default_factory=dict)

    def level(self, key):
        return self.levels.get(key, 0.0)


@dataclass(frozen=True)
class TransitionCandidate:
    key: object  # transition key into the pheromone table
    heuristic: float  # 1 / transition time
    energy_factor: float  # binary gate from feasible_transition


def evaporate(table, rho):
    """Multiply every pheromone level by (1 - rho), in place."""
    if not 0.0 < rho <= 1.0:
        raise ValueError("rho must be in (0, 1]")
    keep = 1.0 - rho
    for key in table.levels:
        table.levels[key] *= keep
    return table


def deposit(table, transitions, q_deposit, costs):
    """Add q_deposit / cost to each listed transition, in place."""
    if len(transitions) != len(costs):
        raise ValueError("transitions and costs must align")
    for key, cost in zip(transitions, costs):
        if cost <= 0:
            raise ValueError(f"transition cost must be > 0, got {cost}")
        table.levels[key] = table.levels.get(key, 0.0) + q_deposit / cost
    return table


def transition_probabilities(table, candidates, params):
    """Normalized selection probabilities over candidate transitions.

    Weight of a candidate is level^alpha * heuristic^beta * ef^gamma; raises
    DeadEndError when every weight is zero (the ant is abandoned).
    """
    if not candidates:
        raise DeadEndError("no candidate transitions")
    weights = [
        table.level(c.key) ** params.alpha
        * c.heuristic ** params.beta
        * c.energy_factor ** params.gamma
        for c in candidates
    ]
    total = math.fsum(weights)
    if total <= 0.0:
        raise DeadEndError("all candidate transitions have zero weight")
    return [w / total for w in weights]


class _SparseTrail:
    """Pheromone over (prev arc, next arc) keys with O(1) uniform evaporation.

    Levels are stored deflated by a running decay factor so evaporation is a
    single multiply; untouched feasible transitions implicitly sit at tau0.
    Statically infeasible transitions are outside the domain entirely, which
    keeps them at level zero for the whole run.
    """

    def __init__(self, tau0):
        self.tau0 = tau0
        self.decay = 1.0
        self.rows = {}  # prev arc idx -> {next arc idx: deflated level}

    def level(self, prev_idx, arc_idx):
        row = self.rows.get(prev_idx)
        stored = self.tau0 if row is None else row.get(arc_idx, self.tau0)
        return self.decay * stored

    def row(self, prev_idx):
        return self.rows.get(prev_idx)

    def evaporate(self, rho):
        if rho == 1.0:
            self.rows = {}
            self.tau0 = 0.0
            self.decay = 1.0
            return
        self.decay *= 1.0 - rho
        if self.decay < 1e-12:
            for row in self.rows.values():
                for k in row:
                    row[k] *= self.decay
            self.tau0 *= self.decay
            self.decay = 1.0

    def deposit(self, prev_idx, arc_idx, amount):
        row = self.rows.setdefault(prev_idx, {})
        row[arc_idx] = row.get(arc_idx, self.tau0) + amount / self.decay


@dataclass
class AcoResult:
    plan: Plan
    cost: float
    trace: list  # best-so-far cost after each iteration (None before first completion)
    iterations: int
    completed_ants: int
    seed: int


def _ov_with(ov, key, value):
    return frozenset(e for e in ov if e[0] != key) | {(key, value)}


def _path_arcs(link):
    arcs = []
    while link is not None:
        link, arc_idx = link
        arcs.append(arc_idx)
    arcs.reverse()
    return tuple(arcs)


def run_aco(reduced, sc, params=None, space=None):
    """Best feasible plan found by the colony, plus its best-cost trace.

    The binary energy factor acts as a hard gate: moves with ef = 0 are never
    selectable, for any gamma, since a depleted tool cannot physically ride.
    Raises NoFeasiblePlanError when no ant completes in any iteration.
    """
    params = params or AcoParams()
    if reduced.origin == reduced.dest:
        return AcoResult(EMPTY_PLAN, 0.0, [0.0] * params.n_iterations, params.n_iterations, 0, params.seed)

    if space is None:
        space = ActionSpace(reduced, sc)
    step_cap = params.step_cap or 4 * len(reduced.nodes)
    rng = rng_from(params.seed, 3)
    alpha, beta = params.alpha, params.beta
    trail = _SparseTrail(params.tau0)
    dest_i = space.dest_i
    empty_ov = frozenset()

    # Static per-node candidate tables for the dominant unladen state:
    # ridable moves (energy factor 1) with their precomputed heuristic term.
    nc_meta = []
    nc_hbeta = []
    nc_pos = []
    for entries in space.unladen:
        ok_entries = [(arc, ride_soc) for arc, ride_soc, ok in entries if ok]
        nc_meta.append(ok_entries)
        nc_hbeta.append(np.array([arc.time_s ** -beta for arc, _ in ok_entries]))
        nc_pos.append({arc.idx: i for i, (arc, _) in enumerate(ok_entries)})

    best_cost = None
    best_arcs = None
    trace = []
    total_completed = 0

    def laden_weights(state):
        prev_idx, node_i, carried, soc, ov = state
        arcs, weights = [], []
        for arc, ride_soc, ok in space.moves(node_i, carried, soc, dict(ov) if ov else None):
            if not ok:
                continue  # depleted tool: move physically impossible
            w = trail.level(prev_idx, arc.idx)
            w = (w if alpha == 1.0 else w**alpha) * arc.time_s**-beta
            if w > 0.0:
                arcs.append((arc, ride_soc))
                weights.append(w)
        return arcs, np.array(weights)

    for _it in range(params.n_iterations):
        memo = {}
        frontier = [((START, space.origin_i, NO_TOOL, 0.0, empty_ov), 0.0, None, params.n_ants)]
        completed = []

        for _depth in range(step_cap):
            if not frontier:
                break
            nxt = []
            for state, cost, link, count in frontier:
                dist = memo.get(state)
                if dist is None:
                    prev_idx, node_i, carried, soc, ov = state
                    if carried == NO_TOOL and not ov:
                        base = trail.decay * trail.tau0
                        weights = nc_hbeta[node_i] * (base if alpha == 1.0 else base**alpha)
                        row = trail.row(prev_idx)
                        if row:
                            pos = nc_pos[node_i]
                            for arc_idx, stored in row.items():
                                i = pos.get(arc_idx)
                                if i is not None:
                                    lvl = trail.decay * stored
                                    weights[i] = (lvl if alpha == 1.0 else lvl**alpha) * nc_hbeta[node_i][i]
                        arcs = nc_meta[node_i]
                    else:
                        arcs, weights = laden_weights(state)
                    total = float(weights.sum()) if len(arcs) else 0.0
                    dist = memo[state] = (arcs, weights, total, np.cumsum(weights) if len(arcs) else None)
                arcs, weights, total, cum = dist
                if not arcs or total <= 0.0:
                    continue  # dead end: these ants are abandoned
                if len(arcs) == 1:
                    chosen_shares = ((0, count),)
                elif count == 1:
                    i = int(np.searchsorted(cum, rng.random() * total, side="right"))
                    chosen_shares = ((min(i, len(arcs) - 1), 1),)
                else:
                    draws = rng.multinomial(count, weights / total)
                    chosen_shares = [(i, int(draws[i])) for i in np.nonzero(draws)[0]]

                prev_idx, node_i, carried, soc, ov = state
                for i, share in chosen_shares:
                    if share == 0:
                        continue
                    arc, ride_soc = arcs[i]
                    child_link = (link, arc.idx)
                    child_cost = cost + arc.time_s
                    if arc.dst_i == dest_i:
                        completed.append((child_cost, child_link, share))
                        continue
                    if arc.mode_id == WALK:
                        new_ov = _ov_with(ov, (node_i, carried), soc) if carried != NO_TOOL else ov
                        child = (arc.idx, arc.dst_i, NO_TOOL, 0.0, new_ov)
                    elif arc.mode_id == carried:
                        child = (arc.idx, arc.dst_i, carried, soc - arc.need_pct, ov)
                    else:
                        new_ov = _ov_with(ov, (node_i, arc.mode_id), None)
                        if carried != NO_TOOL:
                            new_ov = _ov_with(new_ov, (node_i, carried), soc)
                        child = (arc.idx, arc.dst_i, arc.mode_id, ride_soc - arc.need_pct, new_ov)
                    nxt.append((child, child_cost, child_link, share))
            frontier = nxt

        trail.evaporate(params.rho)
        deposit_from = completed
        if params.elitist and completed:
            deposit_from = [min(completed, key=lambda c: c[0])[:2] + (1,)]
        for cost, link, count in deposit_from:
            total_weight = count * params.q_deposit
            prev = START
            for arc_idx in _path_arcs(link):
                trail.deposit(prev, arc_idx, total_weight / space.arcs[arc_idx].time_s)
                prev = arc_idx

        for cost, link, count in completed:
            total_completed += count
            if best_cost is None or cost < best_cost:
                best_cost, best_arcs = cost, _path_arcs(link)
            elif cost == best_cost:
                arcs = _path_arcs(link)
                if arcs < best_arcs:
                    best_arcs = arcs
        trace.append(best_cost)

    if best_cost is None:
        raise NoFeasiblePlanError(
            f"no ant reached {reduced.dest!r} from {reduced.origin!r} in {params.n_iterations} iterations"
        )
    legs = tuple(
        Leg(a.arc.src, a.arc.dst, a.mode, a.time_s, a.dist_m)
        for a in (space.arcs[i] for i in best_arcs)
    )
    return AcoResult(Plan.from_legs(legs), best_cost, trace, params.n_iterations, total_completed, params.seed)
