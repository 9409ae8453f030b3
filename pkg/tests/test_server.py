import json
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from emobility.server import create_app

REPO = Path(__file__).resolve().parent.parent
CORRIDOR = json.loads((REPO / "scenarios" / "corridor.json").read_text())


@pytest.fixture()
def client():
    return TestClient(create_app())


def post_corridor(client, **changes):
    doc = json.loads(json.dumps(CORRIDOR))
    doc.update(changes)
    resp = client.post("/v1/scenario", json=doc)
    assert resp.status_code == 201, resp.text
    return resp.json()["id"]


def test_scenario_round_trip_and_state(client):
    sid = post_corridor(client)
    state = client.get(f"/v1/scenario/{sid}/state").json()
    assert {h["node"] for h in state["hubs"]} == {"H1", "H2"}
    h1 = next(h for h in state["hubs"] if h["node"] == "H1")
    assert {"mode": "EBike", "soc": 50} in h1["tools"]
    assert len(state["network"]["nodes"]) == 4
    assert sid in client.get("/v1/scenarios").json()["ids"]


def test_scenario_validation_errors(client):
    doc = json.loads(json.dumps(CORRIDOR))
    doc["hubs"][0]["tools"][0]["soc"] = 130
    resp = client.post("/v1/scenario", json=doc)
    assert resp.status_code == 400
    detail = resp.json()["detail"]
    assert "soc" in detail["field"]

    resp = client.post("/v1/scenario", json={"network_ref": "missing.json", "hubs": []})
    assert resp.status_code == 400


def test_scenario_network_ref(tmp_path):
    (tmp_path / "net.json").write_text(json.dumps(CORRIDOR["network"]))
    doc = {k: v for k, v in CORRIDOR.items() if k != "network"}
    doc["network_ref"] = "net.json"
    client = TestClient(create_app(scenario_dir=tmp_path))
    resp = client.post("/v1/scenario", json=doc)
    assert resp.status_code == 201


def route(client, sid, planner="oracle", **extra):
    body = {"scenario_id": sid, "origin": "O", "destination": "D", "planner": planner}
    body.update(extra)
    return client.post("/v1/route", json=body)


def test_route_oracle_costs(client):
    sid = post_corridor(client)
    resp = route(client, sid)
    assert resp.status_code == 200
    body = resp.json()
    assert body["total_time_s"] == 1050.0
    assert [leg["mode"] for leg in body["plan"]["legs"]] == ["Walk", "ECar", "Walk"]
    assert body["plan"]["legs"][1]["soc_after"] == 92.5

    resp = route(client, sid, preference=["Walk", "EBike", "EScooter"])
    assert resp.json()["total_time_s"] == 1200.0


def test_route_planners_and_seeds(client):
    sid = post_corridor(client)
    a = route(client, sid, planner="aco", params={"seed": 5}).json()
    b = route(client, sid, planner="aco", params={"seed": 5}).json()
    assert a["total_time_s"] == b["total_time_s"] == 1050.0
    assert a["diagnostics"]["seed"] == 5
    q = route(client, sid, planner="q", params={"seed": 5, "qlearning": {"n_episodes": 800}}).json()
    assert q["planner"] == "qlearning"
    assert q["total_time_s"] == 1050.0
    assert "eval_penalty_events" in q["diagnostics"]


def test_route_identity_and_errors(client):
    sid = post_corridor(client)
    resp = route(client, sid, origin="O", destination="O")
    assert resp.status_code == 200
    assert resp.json()["total_time_s"] == 0.0
    assert resp.json()["plan"]["legs"] == []

    assert route(client, "nope").status_code == 404
    assert route(client, sid, origin="ZZ").status_code == 400
    assert route(client, sid, planner="bogus").status_code == 400


def test_concurrent_seeded_routes_agree(client):
    from concurrent.futures import ThreadPoolExecutor

    sid = post_corridor(client)
    body = {
        "scenario_id": sid, "origin": "O", "destination": "D",
        "planner": "aco", "params": {"seed": 11, "aco": {"n_ants": 60, "n_iterations": 6}},
    }
    with ThreadPoolExecutor(max_workers=4) as pool:
        costs = list(pool.map(lambda _: client.post("/v1/route", json=body).json()["total_time_s"], range(8)))
    assert len(set(costs)) == 1


def test_route_infeasible_is_422(client):
    doc = {
        "network": {
            "nodes": [{"id": n} for n in ("O", "H1", "H2", "D")],
            "edges": [
                {"id": "a", "from": "O", "to": "H1", "length_m": 100, "modes": ["Walk"]},
                {"id": "b", "from": "H2", "to": "D", "length_m": 100, "modes": ["Walk"]},
            ],
        },
        "hubs": [{"node": "H1", "docks": []}, {"node": "H2", "docks": []}],
        "seed": 0,
    }
    resp = client.post("/v1/scenario", json=doc)
    sid = resp.json()["id"]
    resp = route(client, sid, planner="oracle")
    assert resp.status_code == 422


def test_fixed_distribution_via_grid_bundle(client):
    from emobility.synth import grid_network, grid_scenario_document
    from emobility.scenario import distribute_tools, load_scenario
    from emobility.graph import load_graph

    net = grid_network(8)
    doc = grid_scenario_document(net, 20, seed=1)
    # stock every hub with one tool of each type, then serve it
    g = load_graph(net)
    sc = distribute_tools(load_scenario(doc, g), "Fixed", seed=1)
    doc["hubs"] = [
        {
            "node": h.node,
            "docks": sorted(m.value for m in h.docks),
            "tools": [{"mode": t.mode.value, "soc": t.soc} for t in h.tools],
        }
        for h in sc.hubs
    ]
    doc["network"] = net
    resp = client.post("/v1/scenario", json=doc)
    sid = resp.json()["id"]
    state = client.get(f"/v1/scenario/{sid}/state").json()
    assert sum(len(h["tools"]) for h in state["hubs"]) == 60
