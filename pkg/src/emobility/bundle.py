"""Scenario bundles: one document carrying the network plus the scenario.

The network is inline under "network" or referenced by "network_ref"
(a JSON file resolved against the bundle's directory). Optional "aco" and
"qlearning" blocks carry planner parameter overrides.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import ScenarioFormatError
from .graph import load_graph
from .scenario import load_scenario


@dataclass(frozen=True)
class Bundle:
    graph: object  # as loaded, before scenario retiming
    scenario: object  # ScenarioConfig (carries the retimed graph)
    aco: dict
    qlearning: dict
    document: dict


def load_bundle(document, base_dir=None):
    if not isinstance(document, dict):
        raise ScenarioFormatError("bundle must be an object")
    network = document.get("network")
    if network is None:
        ref = document.get("network_ref")
        if not ref:
            raise ScenarioFormatError("bundle needs 'network' or 'network_ref'", field="network")
        path = Path(ref)
        if not path.is_absolute():
            if base_dir is None:
                raise ScenarioFormatError(f"unresolvable network_ref {ref!r}", field="network_ref")
            path = Path(base_dir) / path
        if not path.exists():
            raise ScenarioFormatError(f"unknown network reference {ref!r}", field="network_ref")
        network = json.loads(path.read_text())
    g = load_graph(network)
    sc = load_scenario(document, g)
    return Bundle(
        graph=g,
        scenario=sc,
        aco=dict(document.get("aco") or {}),
        qlearning=dict(document.get("qlearning") or {}),
        document=document,
    )


def load_bundle_file(path):
    path = Path(path)
    return load_bundle(json.loads(path.read_text()), base_dir=path.parent)
