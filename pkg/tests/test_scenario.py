import pytest

from conftest import corridor_network, corridor_scenario_doc
from emobility.errors import (
    ClockOutOfRangeError,
    InsufficientPairsError,
    ScenarioFormatError,
    SocOutOfRangeError,
)
from emobility.graph import Mode, load_graph
from emobility.scenario import (
    EnergyModel,
    UserPreference,
    distribute_tools,
    edge_speed,
    energy_required,
    feasible_transition,
    load_scenario,
    sample_od_pairs,
)
from emobility.seeding import rng_from
from emobility.synth import grid_network, grid_scenario_document


@pytest.fixture
def corridor_graph():
    return load_graph(corridor_network())


def test_load_corridor(corridor_graph):
    sc = load_scenario(corridor_scenario_doc(), corridor_graph)
    assert len(sc.hubs) == 2
    assert sc.pristine_tool_soc("H1", Mode.EBike) == 50
    assert sc.pristine_tool_soc("H1", Mode.ECar) == 100
    assert sc.pristine_tool_soc("H2", Mode.EBike) is None
    assert Mode.Walk in sc.preference.allowed


def test_load_soc_out_of_range(corridor_graph):
    doc = corridor_scenario_doc()
    doc["hubs"][0]["tools"][0]["soc"] = 130
    with pytest.raises(SocOutOfRangeError) as err:
        load_scenario(doc, corridor_graph)
    assert "soc" in err.value.field


def test_load_default_congestion_is_identity(corridor_graph):
    doc = corridor_scenario_doc()
    doc["profile"] = {}
    sc = load_scenario(doc, corridor_graph)
    for clock in (0.0, 30000.0, 86399.0):
        assert sc.profile.multiplier_at(clock) == 1.0


def test_load_unknown_hub_node(corridor_graph):
    doc = corridor_scenario_doc()
    doc["hubs"][0]["node"] = "nope"
    with pytest.raises(ScenarioFormatError) as err:
        load_scenario(doc, corridor_graph)
    assert "node" in err.value.field


def test_load_negative_rate(corridor_graph):
    doc = corridor_scenario_doc()
    doc["energy"]["rate_per_100s"]["EBike"] = -1
    with pytest.raises(ScenarioFormatError):
        load_scenario(doc, corridor_graph)


def test_energy_required_examples():
    em = EnergyModel({Mode.EBike: 10.0, Mode.ECar: 5.0, Mode.Walk: 0.0})
    assert energy_required(em, Mode.EBike, 300) == 30.0
    assert energy_required(em, Mode.Walk, 12345) == 0.0
    assert energy_required(em, Mode.ECar, 150) == 7.5
    with pytest.raises(ValueError):
        energy_required(em, Mode.EBike, -1)


def test_energy_required_linear():
    em = EnergyModel({Mode.EScooter: 7.5})
    rng = rng_from(11)
    for _ in range(50):
        a, b = float(rng.uniform(0, 500)), float(rng.uniform(0, 500))
        assert energy_required(em, Mode.EScooter, a + b) == pytest.approx(
            energy_required(em, Mode.EScooter, a) + energy_required(em, Mode.EScooter, b), rel=1e-12
        )


def test_feasible_transition(corridor_graph):
    sc = load_scenario(corridor_scenario_doc(), corridor_graph)
    assert feasible_transition(sc, 50, Mode.EBike, 300) == 1
    assert feasible_transition(sc, 20, Mode.EBike, 300) == 0
    assert feasible_transition(sc, 0, Mode.Walk, 10000) == 1
    # monotone in carried charge
    prev = 0
    for soc in range(0, 101, 5):
        now = feasible_transition(sc, soc, Mode.EBike, 300)
        assert now >= prev
        prev = now


def _grid_sc(k_hubs=20):
    doc = grid_network(8)
    g = load_graph(doc)
    return load_scenario(grid_scenario_document(doc, k_hubs, seed=3), g), g


def test_distribute_fixed():
    sc, _ = _grid_sc()
    out = distribute_tools(sc, "Fixed", seed=5)
    assert sum(len(h.tools) for h in out.hubs) == 60
    assert all(len(h.tools) == 3 for h in out.hubs)
    again = distribute_tools(out, "Fixed", seed=99)
    assert [h.tools for h in again.hubs] == [h.tools for h in out.hubs]


def test_distribute_random_deterministic():
    sc, _ = _grid_sc()
    a = distribute_tools(sc, "Random", seed=7)
    b = distribute_tools(sc, "Random", seed=7)
    assert [h.tools for h in a.hubs] == [h.tools for h in b.hubs]
    c = distribute_tools(sc, "Random", seed=8)
    assert [h.tools for h in a.hubs] != [h.tools for h in c.hubs]
    assert all(1 <= len(h.tools) <= 3 for h in a.hubs)
    assert all({t.mode for t in h.tools} <= h.docks for h in a.hubs)


def test_distribute_soc_guard():
    sc, _ = _grid_sc()
    with pytest.raises(SocOutOfRangeError):
        distribute_tools(sc, "Fixed", seed=1, soc=130)


def test_sample_od_pairs_small(corridor_graph):
    pairs = sample_od_pairs(corridor_graph, 3, seed=1)
    assert len(pairs) == len(set(pairs)) == 3
    assert all(o != d for o, d in pairs)


def test_sample_od_pairs_errors(corridor_graph):
    with pytest.raises(ValueError):
        sample_od_pairs(corridor_graph, 0, seed=1)
    with pytest.raises(InsufficientPairsError):
        sample_od_pairs(corridor_graph, 10_000, seed=1)


def test_sample_od_pairs_deterministic_and_stratified():
    doc = grid_network(6)
    g = load_graph(doc)
    a = sample_od_pairs(g, 30, seed=4)
    b = sample_od_pairs(g, 30, seed=4)
    assert a == b
    from emobility.graph import shortest_time_map

    dists = []
    for o, d in a:
        dists.append(shortest_time_map(g, Mode.Walk, o)[d][1])
    # stratification puts pairs in all three terciles
    lo, hi = min(dists), max(dists)
    assert lo < (lo + hi) / 3 + 1 and hi > 2 * (lo + hi) / 3 - 1


def test_edge_speed(corridor_graph):
    doc = corridor_scenario_doc()
    doc["profile"] = {
        "base_speed": {"EBike": 5.0},
        "congestion": [{"from_s": 7 * 3600, "to_s": 9 * 3600, "mult": 0.8}],
    }
    sc = load_scenario(doc, corridor_graph)
    assert edge_speed(sc, Mode.EBike, 8 * 3600) == 4.0
    assert edge_speed(sc, Mode.EBike, 3 * 3600) == 5.0
    with pytest.raises(ClockOutOfRangeError):
        edge_speed(sc, Mode.EBike, 86400)


def test_congestion_retimes_edges(corridor_graph):
    doc = corridor_scenario_doc()
    doc["profile"] = {"congestion": [{"from_s": 0, "to_s": 86400, "mult": 0.5}]}
    sc = load_scenario(doc, corridor_graph)
    assert sc.graph.edges["e0"].time_by_mode[Mode.Walk] == 1200.0


def test_preference_always_allows_walk():
    pref = UserPreference.of([Mode.ECar])
    assert Mode.Walk in pref.allowed
