import copy
import json
from pathlib import Path

import pytest

from emobility.graph import build_reduced_graph, load_graph
from emobility.scenario import load_scenario

REPO = Path(__file__).resolve().parent.parent
CORRIDOR = json.loads((REPO / "scenarios" / "corridor.json").read_text())


def corridor_network():
    return copy.deepcopy(CORRIDOR["network"])


def corridor_scenario_doc(ebike_soc=50, allowed=None):
    doc = copy.deepcopy({k: v for k, v in CORRIDOR.items() if k != "network"})
    doc["hubs"][0]["tools"][0]["soc"] = ebike_soc
    if allowed is not None:
        doc["preference"]["allowed"] = list(allowed)
    return doc


def corridor_setup(ebike_soc=50, allowed=None, hubs_emptied=False):
    """(graph, scenario, reduced) for the two-hub corridor fixture."""
    g = load_graph(corridor_network())
    doc = corridor_scenario_doc(ebike_soc=ebike_soc, allowed=allowed)
    if hubs_emptied:
        for hub in doc["hubs"]:
            hub["tools"] = []
    sc = load_scenario(doc, g)
    reduced = build_reduced_graph(sc.graph, "O", "D", ["H1", "H2"])
    return g, sc, reduced


@pytest.fixture
def corridor():
    return corridor_setup()
