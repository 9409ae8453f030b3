import math

import pytest

from conftest import corridor_setup
from emobility.aco import (
    AcoParams,
    PheromoneTable,
    TransitionCandidate,
    deposit,
    evaporate,
    run_aco,
    transition_probabilities,
)
from emobility.errors import DeadEndError, NoFeasiblePlanError
from emobility.graph import Mode, build_reduced_graph, load_graph
from emobility.plans import validate_plan
from emobility.scenario import load_scenario
from emobility.seeding import rng_from


def test_transition_probabilities_inverse_time_squared():
    table = PheromoneTable({"a": 1.0, "b": 1.0})
    cands = [
        TransitionCandidate("a", 1 / 300, 1),
        TransitionCandidate("b", 1 / 600, 1),
    ]
    params = AcoParams(alpha=1, beta=2, gamma=1)
    probs = transition_probabilities(table, cands, params)
    assert probs == pytest.approx([0.8, 0.2], rel=1e-12)


def test_transition_probabilities_energy_gate():
    table = PheromoneTable({"a": 100.0, "b": 0.5})
    cands = [TransitionCandidate("a", 1 / 100, 0), TransitionCandidate("b", 1 / 100, 1)]
    probs = transition_probabilities(table, cands, AcoParams())
    assert probs[0] == 0.0 and probs[1] == 1.0


def test_transition_probabilities_singleton_and_deadend():
    table = PheromoneTable({"a": 2.0})
    assert transition_probabilities(table, [TransitionCandidate("a", 0.5, 1)], AcoParams()) == [1.0]
    with pytest.raises(DeadEndError):
        transition_probabilities(table, [TransitionCandidate("zzz", 0.5, 0)], AcoParams())
    with pytest.raises(DeadEndError):
        transition_probabilities(table, [], AcoParams())


def test_evaporate():
    table = PheromoneTable({"a": 1.0, "b": 0.0})
    evaporate(table, 0.1)
    assert table.levels["a"] == pytest.approx(0.9, rel=1e-12)
    assert table.levels["b"] == 0.0
    evaporate(table, 1.0)
    assert table.levels["a"] == 0.0


def test_deposit():
    table = PheromoneTable({"t": 0.9})
    deposit(table, ["t"], 100.0, [300.0])
    assert table.levels["t"] == pytest.approx(0.9 + 1 / 3, rel=1e-12)
    deposit(table, ["t"], 0.0, [300.0])
    assert table.levels["t"] == pytest.approx(0.9 + 1 / 3, rel=1e-12)
    deposit(table, ["t", "t"], 100.0, [300.0, 300.0])  # two ants accumulate
    assert table.levels["t"] == pytest.approx(0.9 + 1, rel=1e-12)
    with pytest.raises(ValueError):
        deposit(table, ["t"], 100.0, [0.0])


def test_pheromone_stays_nonnegative():
    rng = rng_from(17)
    table = PheromoneTable({k: float(rng.uniform(0, 2)) for k in "abcdef"})
    for _ in range(50):
        evaporate(table, float(rng.uniform(0.05, 0.9)))
        keys = [k for k in "abc"]
        deposit(table, keys, float(rng.uniform(0, 50)), [float(rng.uniform(10, 500))] * 3)
        assert all(v >= 0 for v in table.levels.values())


def test_run_aco_corridor_variants():
    _, sc, r = corridor_setup()
    result = run_aco(r, sc, AcoParams(seed=11))
    assert result.cost == 1050.0
    assert [l.mode for l in result.plan.legs] == [Mode.Walk, Mode.ECar, Mode.Walk]
    assert validate_plan(result.plan, r, sc) == ()

    _, sc_nocar, r2 = corridor_setup(allowed=["Walk", "EBike", "EScooter"])
    assert run_aco(r2, sc_nocar, AcoParams(seed=11)).cost == 1200.0

    _, sc_low, r3 = corridor_setup(ebike_soc=20, allowed=["Walk", "EBike", "EScooter"])
    assert run_aco(r3, sc_low, AcoParams(seed=11)).cost == 1500.0


def test_run_aco_respects_preference():
    _, sc, r = corridor_setup(allowed=["Walk"])
    result = run_aco(r, sc, AcoParams(seed=3))
    assert all(l.mode is Mode.Walk for l in result.plan.legs)
    assert result.cost == 1500.0


def test_run_aco_trace_monotone():
    _, sc, r = corridor_setup()
    result = run_aco(r, sc, AcoParams(n_ants=20, n_iterations=30, seed=5))
    seen = [c for c in result.trace if c is not None]
    assert seen, "colony never completed"
    assert all(a >= b for a, b in zip(seen, seen[1:]))


def test_run_aco_deterministic():
    _, sc, r = corridor_setup()
    a = run_aco(r, sc, AcoParams(seed=21))
    b = run_aco(r, sc, AcoParams(seed=21))
    assert a.cost == b.cost and a.trace == b.trace and a.plan == b.plan


def test_run_aco_energy_gate_is_hard():
    # with gamma = 0, an unridable tool must still never be ridden
    _, sc_low, r = corridor_setup(ebike_soc=20, allowed=["Walk", "EBike"])
    result = run_aco(r, sc_low, AcoParams(gamma=0.0, seed=9))
    assert result.cost == 1500.0
    assert all(l.mode is Mode.Walk for l in result.plan.legs)


def test_run_aco_gamma_irrelevant_when_unconstrained():
    _, sc, r = corridor_setup(ebike_soc=100)
    a = run_aco(r, sc, AcoParams(gamma=0.0, seed=13))
    b = run_aco(r, sc, AcoParams(gamma=1.0, seed=13))
    assert a.cost == b.cost and a.trace == b.trace


def test_run_aco_origin_is_destination():
    _, sc, r = corridor_setup()
    r2 = build_reduced_graph(sc.graph, "O", "O", ["H1", "H2"])
    result = run_aco(r2, sc, AcoParams(seed=1))
    assert result.cost == 0.0 and result.plan.legs == ()


def test_run_aco_no_feasible_plan():
    net = {
        "nodes": [{"id": n} for n in ("O", "H1", "H2", "D")],
        "edges": [
            {"id": "a", "from": "O", "to": "H1", "length_m": 100, "modes": ["Walk"]},
            {"id": "b", "from": "H2", "to": "D", "length_m": 100, "modes": ["Walk"]},
        ],
    }
    g = load_graph(net)
    sc = load_scenario({"hubs": [{"node": "H1", "docks": []}, {"node": "H2", "docks": []}], "seed": 0}, g)
    r = build_reduced_graph(g, "O", "D", ["H1", "H2"])
    with pytest.raises(NoFeasiblePlanError):
        run_aco(r, sc, AcoParams(n_ants=10, n_iterations=2, seed=1))


def test_elitist_option_still_finds_optimum():
    _, sc, r = corridor_setup()
    result = run_aco(r, sc, AcoParams(seed=2, elitist=True))
    assert result.cost == 1050.0


def test_params_validation():
    with pytest.raises(ValueError):
        AcoParams(rho=0.0)
    with pytest.raises(ValueError):
        AcoParams(alpha=-1)
    with pytest.raises(ValueError):
        AcoParams(tau0=0.0)
    with pytest.raises(ValueError):
        AcoParams(q_deposit=0.0)
    params = AcoParams.from_dict({"q": 42.0, "n_ants": 5, "unknown_key": 1})
    assert params.q_deposit == 42.0 and params.n_ants == 5
