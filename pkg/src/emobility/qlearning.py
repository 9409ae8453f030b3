"""Tabular Q-learning planner: state = reduced-graph node, action = (mode, next node).

Rewards are negative travel times; riding with insufficient charge or walking
into a dead end ends the episode with a large negative penalty. Charge and
displaced tools are tracked while stepping but are not part of the state key,
so two routes reaching one node with different carried energy share Q-values;
the resulting ambiguity is surfaced as a penalty-event diagnostic rather than
hidden by changing the state space.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .plans import EMPTY_PLAN, Leg, Plan
from .seeding import rng_from
from .space import NO_TOOL, WALK, ActionSpace


@dataclass(frozen=True)
class QParams:
    learning_rate: float = 0.1
    discount: float = 0.95
    epsilon_start: float = 0.9
    epsilon_end: float = 0.05
    n_episodes: int = 2000
    penalty: float = -1e6
    step_cap: int | None = None  # defaults to 4 x reduced node count
    seed: int = 0
    eval_every: int = 50

    def __post_init__(self):
        if not 0.0 < self.learning_rate <= 1.0:
            raise ValueError("learning_rate must be in (0, 1]")
        if not 0.0 <= self.discount <= 1.0:
            raise ValueError("discount must be in [0, 1]")
        for eps in (self.epsilon_start, self.epsilon_end):
            if not 0.0 <= eps <= 1.0:
                raise ValueError("epsilon must be in [0, 1]")
        if self.penalty >= 0:
            raise ValueError("penalty must be negative")
        if self.n_episodes < 0:
            raise ValueError("n_episodes must be >= 0")

    @classmethod
    def from_dict(cls, raw, **overrides):
        raw = dict(raw or {})
        raw.update(overrides)
        known = {f for f in cls.__dataclass_fields__}
        return cls(**{k: v for k, v in raw.items() if k in known})

    def epsilon_at(self, episode):
        """Linear decay from epsilon_start to epsilon_end over the first 80% of episodes."""
        horizon = max(1, int(0.8 * self.n_episodes))
        frac = min(1.0, episode / horizon)
        return self.epsilon_start + (self.epsilon_end - self.epsilon_start) * frac


@dataclass
class QTable:
    """Q(s, a) for s a node id and a = (Mode, successor node id)."""

    data: dict = field(default_factory=dict)

    @classmethod
    def for_space(cls, space):
        data = {}
        for i, node in enumerate(space.nodes):
            data[node] = {(arc.mode, space.nodes[arc.dst_i]): 0.0 for arc in space.out[i]}
            data.setdefault(node, {})
        return cls(data=data)

    def value(self, state, action):
        return self.data[state][action]

    def best_value(self, state):
        row = self.data.get(state)
        return max(row.values()) if row else 0.0


def q_update(q, s, a, reward, s_next, params, next_actions=None):
    """One value-iteration step; s_next None means terminal (max term 0).

    The max at s_next ranges over that state's action set: all table actions
    by default, or ``next_actions`` when the caller knows which moves are
    actually available on arrival (rewards are nonpositive, so actions that
    were never available would otherwise sit at their 0 initializer and
    dominate the bootstrap).
    """
    row = q.data[s]
    if a not in row:
        raise KeyError(f"unknown state-action pair ({s!r}, {a!r})")
    future = 0.0
    if s_next is not None:
        nxt = q.data.get(s_next)
        if nxt:
            if next_actions is None:
                future = max(nxt.values())
            else:
                future = max(nxt[a2] for a2 in next_actions)
    lr = params.learning_rate
    new = (1.0 - lr) * row[a] + lr * (reward + params.discount * future)
    row[a] = new
    return new


@dataclass(frozen=True)
class StepOutcome:
    reward: float
    soc_after: float
    feasible: bool


def step_reward(sc, carried_soc, mode, arc_time, params):
    """Reward for riding one arc: -time when charge suffices, else the penalty."""
    from .scenario import SOC_EPS, energy_required

    need = energy_required(sc.energy, mode, arc_time)
    if carried_soc - need >= -SOC_EPS:
        return StepOutcome(-arc_time, carried_soc - need, True)
    return StepOutcome(params.penalty, carried_soc, False)


def select_action(q, s, feasible, epsilon, rng):
    """Epsilon-greedy pick over feasible actions, ties broken by (mode, node) order."""
    if not feasible:
        raise ValueError("feasible action list is empty")
    if epsilon > 0.0 and rng.random() < epsilon:
        return feasible[int(rng.integers(0, len(feasible)))]
    row = q.data[s]
    best = None
    best_v = None
    for a in feasible:
        v = row[a]
        if best_v is None or v > best_v or (v == best_v and (a[0].value, a[1]) < (best[0].value, best[1])):
            best, best_v = a, v
    return best


@dataclass
class RolloutResult:
    plan: Plan | None  # None when the rollout looped or dead-ended
    cost: float | None
    penalty_events: int
    reason: str  # "ok" | "loop" | "dead_end"


def greedy_rollout(q, reduced, sc, space=None, step_cap=None):
    """Follow argmax Q-values from the origin with live charge tracking.

    A penalty event is counted whenever the top-valued action is unridable on
    the current charge; the rollout then falls back to the best action the
    energy budget allows. Value ties break in (mode, node) order.
    """
    if space is None:
        space = ActionSpace(reduced, sc)
    if reduced.origin == reduced.dest:
        return RolloutResult(EMPTY_PLAN, 0.0, 0, "ok")
    step_cap = step_cap or 4 * len(reduced.nodes)
    node, carried, soc = space.origin_i, NO_TOOL, 0.0
    ov = {}
    touched = set()
    seen = {(node, carried, 0.0)}
    legs = []
    penalty_events = 0

    for _ in range(step_cap):
        acts, keys = space.actions(node, carried, soc, ov, touched)
        row = q.data.get(space.nodes[node], {})
        best = best_ok = -1
        best_v = best_ok_v = None
        for i, key in enumerate(keys):
            v = row[key]
            if best_v is None or v > best_v:
                best, best_v = i, v
            if acts[i][2] and (best_ok_v is None or v > best_ok_v):
                best_ok, best_ok_v = i, v
        if best < 0 or best_ok < 0:
            if best >= 0:
                penalty_events += 1
            return RolloutResult(None, None, penalty_events, "dead_end")
        if best != best_ok:
            penalty_events += 1
        arc, ride_soc, _ok = acts[best_ok]

        if arc.mode_id == WALK:
            if carried != NO_TOOL:
                ov[(node, carried)] = soc
                touched.add(node)
            carried, soc = NO_TOOL, 0.0
        elif arc.mode_id == carried:
            soc -= arc.need_pct
        else:
            if carried != NO_TOOL:
                ov[(node, carried)] = soc
            ov[(node, arc.mode_id)] = None
            touched.add(node)
            carried, soc = arc.mode_id, ride_soc - arc.need_pct
        node = arc.dst_i
        legs.append(Leg(arc.arc.src, arc.arc.dst, arc.mode, arc.time_s, arc.dist_m))
        if node == space.dest_i:
            plan = Plan.from_legs(legs)
            return RolloutResult(plan, plan.total_time_s, penalty_events, "ok")
        state = (node, carried, round(soc, 6))
        if state in seen:
            return RolloutResult(None, None, penalty_events, "loop")
        seen.add(state)
    return RolloutResult(None, None, penalty_events, "dead_end")


def extract_policy_path(q, reduced, sc, space=None):
    """Greedy plan read out of a trained table (None when no path emerges)."""
    return greedy_rollout(q, reduced, sc, space=space)


@dataclass
class TrainResult:
    qtable: QTable
    trace: list  # (episode, greedy cost or None) sampled every eval_every episodes
    diagnostics: dict
    seed: int


def train(reduced, sc, params=None, space=None):
    """Run n_episodes of epsilon-greedy training against a pristine scenario.

    Tool inventories and charge reset every episode. The greedy-policy cost
    is evaluated periodically into the trace; non-convergence shows up there
    rather than as an error.
    """
    params = params or QParams()
    if space is None:
        space = ActionSpace(reduced, sc)
    q = QTable.for_space(space)
    step_cap = params.step_cap or 4 * len(reduced.nodes)
    max_arc = max((a.time_s for a in space.arcs), default=0.0)
    if params.penalty >= -(step_cap * max_arc):
        raise ValueError(
            f"penalty {params.penalty} too small: must be < -(step_cap * max arc time) = {-(step_cap * max_arc)}"
        )
    rng = rng_from(params.seed, 4)
    nodes = space.nodes
    trace = []
    train_penalties = 0

    if reduced.origin == reduced.dest:
        return TrainResult(q, [(params.n_episodes, 0.0)], {"train_penalty_events": 0}, params.seed)

    for ep in range(params.n_episodes):
        eps = params.epsilon_at(ep)
        node, carried, soc = space.origin_i, NO_TOOL, 0.0
        ov = {}
        touched = set()
        acts, keys = space.actions(node, carried, soc, ov, touched)
        steps = 0
        while acts and steps < step_cap:
            if eps > 0.0 and rng.random() < eps:
                i = int(rng.integers(0, len(acts)))
            else:
                row = q.data[nodes[node]]
                i, best_v = 0, row[keys[0]]
                for j in range(1, len(keys)):
                    v = row[keys[j]]
                    if v > best_v:
                        i, best_v = j, v
            arc, ride_soc, ok = acts[i]
            s_key = nodes[node]
            a_key = keys[i]

            if not ok:
                q_update(q, s_key, a_key, params.penalty, None, params)
                train_penalties += 1
                break

            if arc.mode_id == WALK:
                if carried != NO_TOOL:
                    ov[(node, carried)] = soc
                    touched.add(node)
                carried, soc = NO_TOOL, 0.0
            elif arc.mode_id == carried:
                soc -= arc.need_pct
            else:
                if carried != NO_TOOL:
                    ov[(node, carried)] = soc
                ov[(node, arc.mode_id)] = None
                touched.add(node)
                carried, soc = arc.mode_id, ride_soc - arc.need_pct
            node = arc.dst_i
            steps += 1

            if node == space.dest_i:
                q_update(q, s_key, a_key, -arc.time_s, None, params)
                break
            acts, keys = space.actions(node, carried, soc, ov, touched)
            if not acts:
                q_update(q, s_key, a_key, params.penalty, None, params)
                train_penalties += 1
                break
            q_update(q, s_key, a_key, -arc.time_s, nodes[node], params, next_actions=keys)

        if params.eval_every and (ep + 1) % params.eval_every == 0:
            rollout = greedy_rollout(q, reduced, sc, space=space, step_cap=step_cap)
            trace.append((ep + 1, rollout.cost))

    final = greedy_rollout(q, reduced, sc, space=space, step_cap=step_cap)
    if not trace or trace[-1][0] != params.n_episodes:
        trace.append((params.n_episodes, final.cost))
    diagnostics = {
        "train_penalty_events": train_penalties,
        "eval_penalty_events": final.penalty_events,
    }
    return TrainResult(q, trace, diagnostics, params.seed)
