import pytest

from conftest import corridor_setup
from emobility.graph import Mode
from emobility.plans import (
    CHAIN_BROKEN,
    ENERGY_DEFICIT,
    NO_TOOL_AT_PICKUP,
    PREFERENCE_EXCLUDED,
    TERMINAL_NOT_WALK,
    TOTAL_MISMATCH,
    UNDOCKABLE_DROP,
    UNKNOWN_ARC,
    EMPTY_PLAN,
    Leg,
    Plan,
    plan_cost,
    replay_plan,
    validate_plan,
)


def leg(r, src, dst, mode):
    arc = r.arc_index[(src, dst, mode)]
    return Leg(src, dst, mode, arc.time_s, arc.dist_m)


def ecar_plan(r):
    return Plan.from_legs([
        leg(r, "O", "H1", Mode.Walk),
        leg(r, "H1", "H2", Mode.ECar),
        leg(r, "H2", "D", Mode.Walk),
    ])


def codes(violations):
    return {v.code for v in violations}


def test_valid_ecar_plan(corridor):
    _, sc, r = corridor
    plan = ecar_plan(r)
    assert validate_plan(plan, r, sc) == ()
    assert plan_cost(plan, r) == plan.total_time_s == 1050.0


def test_soc_after_replay(corridor):
    _, sc, r = corridor
    violations, soc_after = replay_plan(ecar_plan(r), r, sc)
    assert violations == ()
    assert soc_after == [None, 92.5, None]


def test_preference_excluded(corridor):
    g, sc, r = corridor
    _, sc_nocar, _ = corridor_setup(allowed=["Walk", "EBike", "EScooter"])
    violations = validate_plan(ecar_plan(r), r, sc_nocar)
    assert codes(violations) == {PREFERENCE_EXCLUDED}
    assert violations[0].detail == "ECar"


def test_energy_deficit(corridor):
    _, _, r = corridor
    _, sc_low, _ = corridor_setup(ebike_soc=20)
    plan = Plan.from_legs([
        leg(r, "O", "H1", Mode.Walk),
        leg(r, "H1", "H2", Mode.EBike),
        leg(r, "H2", "D", Mode.Walk),
    ])
    assert ENERGY_DEFICIT in codes(validate_plan(plan, r, sc_low))


def test_chain_broken(corridor):
    _, sc, r = corridor
    plan = Plan.from_legs([leg(r, "O", "H1", Mode.Walk), leg(r, "H2", "D", Mode.Walk)])
    assert CHAIN_BROKEN in codes(validate_plan(plan, r, sc))


def test_unknown_arc_and_total_mismatch(corridor):
    _, sc, r = corridor
    good = leg(r, "O", "H1", Mode.Walk)
    bad = Leg("O", "H1", Mode.Walk, 999.0, 0.0)
    plan = Plan(legs=(bad, leg(r, "H1", "H2", Mode.Walk), leg(r, "H2", "D", Mode.Walk)), total_time_s=1.0)
    got = codes(validate_plan(plan, r, sc))
    assert UNKNOWN_ARC in got and TOTAL_MISMATCH in got


def test_no_tool_at_pickup(corridor):
    _, sc, r = corridor
    plan = Plan.from_legs([
        leg(r, "O", "H2", Mode.Walk),
        # H2 docks EBike but holds none
        Leg("H2", "D", Mode.EBike, 1.0, 1.0),
    ])
    assert NO_TOOL_AT_PICKUP in codes(validate_plan(plan, r, sc))


def test_undockable_drop(corridor):
    _, sc, r = corridor
    # destination D is not a hub: an EBike ride must not end there
    doc_arc = r.arc_index.get(("H1", "D", Mode.EBike))
    assert doc_arc is None  # no such arc exists; fabricate the leg
    plan = Plan.from_legs([
        leg(r, "O", "H1", Mode.Walk),
        Leg("H1", "D", Mode.EBike, 100.0, 100.0),
    ])
    got = codes(validate_plan(plan, r, sc))
    assert UNDOCKABLE_DROP in got and TERMINAL_NOT_WALK in got


def test_tool_leg_from_non_hub_origin(corridor):
    _, sc, r = corridor
    plan = Plan.from_legs([Leg("O", "D", Mode.ECar, 10.0, 10.0)])
    got = codes(validate_plan(plan, r, sc))
    assert TERMINAL_NOT_WALK in got and NO_TOOL_AT_PICKUP in got


def test_empty_plan(corridor):
    _, sc, r = corridor
    assert validate_plan(EMPTY_PLAN, r, sc, origin="O", dest="O") == ()
    assert CHAIN_BROKEN in codes(validate_plan(EMPTY_PLAN, r, sc))


def test_carried_segment_spans_legs():
    # one tool ridden across two consecutive arcs: picked at H1, dropped at H3
    from emobility.graph import build_reduced_graph, load_graph
    from emobility.scenario import load_scenario

    net = {
        "nodes": [{"id": n} for n in ("O", "H1", "H2", "H3", "D")],
        "edges": [
            {"id": "w0", "from": "O", "to": "H1", "length_m": 100, "modes": ["Walk"], "speed_mps": {"Walk": 1.0}},
            {"id": "b1", "from": "H1", "to": "H2", "length_m": 200, "modes": ["EBike"], "speed_mps": {"EBike": 1.0}},
            {"id": "b2", "from": "H2", "to": "H3", "length_m": 200, "modes": ["EBike"], "speed_mps": {"EBike": 1.0}},
            {"id": "w1", "from": "H3", "to": "D", "length_m": 100, "modes": ["Walk"], "speed_mps": {"Walk": 1.0}},
            {"id": "w2", "from": "O", "to": "D", "length_m": 5000, "modes": ["Walk"], "speed_mps": {"Walk": 1.0}},
            {"id": "w3", "from": "H1", "to": "H3", "length_m": 2000, "modes": ["Walk"], "speed_mps": {"Walk": 1.0}},
        ],
    }
    g = load_graph(net)
    scn = {
        "hubs": [
            {"node": "H1", "docks": ["EBike"], "tools": [{"mode": "EBike", "soc": 45}]},
            {"node": "H2", "docks": []},  # pass-through: cannot dock anything
            {"node": "H3", "docks": ["EBike"], "tools": []},
        ],
        "energy": {"rate_per_100s": {"EBike": 10}},
        "seed": 0,
    }
    sc = load_scenario(scn, g)
    r = build_reduced_graph(g, "O", "D", ["H1", "H2", "H3"])
    plan = Plan.from_legs([
        Leg("O", "H1", Mode.Walk, 100.0, 100.0),
        Leg("H1", "H2", Mode.EBike, 200.0, 200.0),
        Leg("H2", "H3", Mode.EBike, 200.0, 200.0),
        Leg("H3", "D", Mode.Walk, 100.0, 100.0),
    ])
    violations, soc_after = replay_plan(plan, r, sc)
    assert violations == ()
    assert soc_after == [None, 25.0, 5.0, None]
    # with a weaker battery the second stretch runs dry
    scn["hubs"][0]["tools"][0]["soc"] = 30
    sc_low = load_scenario(scn, g)
    assert ENERGY_DEFICIT in codes(validate_plan(plan, r, sc_low))
