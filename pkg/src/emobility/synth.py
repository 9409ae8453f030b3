"""Synthetic network and scenario generators for benchmarks and tests."""
from __future__ import annotations

from .graph import TOOL_MODES, Mode
from .seeding import rng_from


def grid_network(n=16, spacing_m=250.0):
    """n x n street grid with bidirectional edges between 4-neighbours.

    Nodes are named ``n{row}_{col}`` and carry x/y coordinates for the UI.
    All modes are permitted on every edge; speeds come from the scenario.
    """
    nodes = [
        {"id": f"n{r}_{c}", "x": c * spacing_m, "y": r * spacing_m}
        for r in range(n)
        for c in range(n)
    ]
    edges = []

    def link(a, b):
        i = len(edges)
        modes = [m.value for m in Mode]
        edges.append({"id": f"e{i}", "from": a, "to": b, "length_m": spacing_m, "modes": modes})
        edges.append({"id": f"e{i + 1}", "from": b, "to": a, "length_m": spacing_m, "modes": modes})

    for r in range(n):
        for c in range(n):
            if c + 1 < n:
                link(f"n{r}_{c}", f"n{r}_{c + 1}")
            if r + 1 < n:
                link(f"n{r}_{c}", f"n{r + 1}_{c}")
    return {"nodes": nodes, "edges": edges}


def stratified_hub_nodes(document, k=20, seed=0):
    """Pick k hub nodes spread over the map: one per spatial block.

    The bounding box is split into a near-square block lattice with at least
    k cells; one node is drawn per block until k are chosen.
    """
    nodes = document["nodes"]
    if k > len(nodes):
        raise ValueError(f"cannot place {k} hubs on {len(nodes)} nodes")
    xs = [n.get("x", 0.0) for n in nodes]
    ys = [n.get("y", 0.0) for n in nodes]
    x0, x1 = min(xs), max(xs) + 1e-9
    y0, y1 = min(ys), max(ys) + 1e-9
    rows = max(1, int(k**0.5))
    cols = -(-k // rows)

    blocks = {}
    for node in nodes:
        bx = min(cols - 1, int((node.get("x", 0.0) - x0) / (x1 - x0) * cols))
        by = min(rows - 1, int((node.get("y", 0.0) - y0) / (y1 - y0) * rows))
        blocks.setdefault((by, bx), []).append(node["id"])

    rng = rng_from(seed, 5)
    ordered = [blocks[key] for key in sorted(blocks)]
    picked = []
    round_i = 0
    while len(picked) < k:
        progressed = False
        for block in ordered:
            if len(picked) >= k:
                break
            candidates = [nid for nid in block if nid not in picked]
            if candidates:
                picked.append(candidates[int(rng.integers(0, len(candidates)))])
                progressed = True
        if not progressed:
            raise ValueError("not enough distinct nodes across blocks")
        round_i += 1
    return picked


def grid_scenario_document(document, k_hubs=20, seed=0, rates=None):
    """Baseline scenario over a grid network: hubs stocked later by the harness."""
    hubs = [
        {"node": nid, "docks": [m.value for m in TOOL_MODES], "tools": []}
        for nid in stratified_hub_nodes(document, k_hubs, seed)
    ]
    rates = rates or {"EBike": 10.0, "EScooter": 8.0, "ECar": 5.0}
    return {
        "hubs": hubs,
        "energy": {"rate_per_100s": rates},
        "preference": {"allowed": [m.value for m in Mode]},
        "profile": {"base_speed": {}, "congestion": []},
        "seed": seed,
        "clock_s": 0.0,
    }


# Power-of-two speeds divide exactly in floats; with lengths that are
# multiples of 100 m, every edge time is an exact multiple of 100 s, so
# half-percent consumption rates always land on the charge grid. Lengths
# stay in an urban-plausible band (a few minutes to ~1 h on foot per edge).
_WALK_SPEEDS = (0.25,)
_TOOL_SPEEDS = (0.5, 1.0)


def random_small_instance(seed):
    """Small random instance: (network doc, scenario doc, origin, destination).

    Sized for exhaustive cross-checking: at most 6 hubs and 3 tool types,
    exact edge times that are multiples of 100 s, and half-percent
    consumption rates. The origin reaches the destination by walking along a
    guaranteed spine.
    """
    rng = rng_from(seed, 6)
    n = int(rng.integers(5, 10))
    names = [f"v{i}" for i in range(n)]
    nodes = [{"id": nm} for nm in names]

    edges = []

    def add_edge(a, b):
        modes = [Mode.Walk]
        speeds = {Mode.Walk.value: float(rng.choice(_WALK_SPEEDS))}
        for mode in TOOL_MODES:
            if rng.random() < 0.5:
                modes.append(mode)
                speeds[mode.value] = float(rng.choice(_TOOL_SPEEDS))
        edges.append(
            {
                "id": f"e{len(edges)}",
                "from": a,
                "to": b,
                "length_m": float(100 * int(rng.integers(2, 11))),
                "modes": [m.value for m in modes],
                "speed_mps": speeds,
            }
        )

    for i in range(n - 1):
        add_edge(names[i], names[i + 1])
    for a in range(n):
        for b in range(n):
            if a != b and abs(a - b) != 1 and rng.random() < 0.25:
                add_edge(names[a], names[b])

    i, j = sorted(int(x) for x in rng.choice(n, size=2, replace=False))
    n_hubs = int(rng.integers(1, min(6, n) + 1))
    # One hub always sits on the origin->destination walk spine so the
    # reduced graph is constructible.
    forced = int(rng.integers(i, j + 1))
    hub_idx = {forced}
    for cand in rng.permutation(n):
        if len(hub_idx) >= n_hubs:
            break
        hub_idx.add(int(cand))
    hub_ids = [names[k] for k in hub_idx]
    hubs = []
    for nid in sorted(hub_ids):
        docks = [m for m in TOOL_MODES if rng.random() < 0.7]
        if not docks:
            docks = [TOOL_MODES[int(rng.integers(0, 3))]]
        tools = [
            {"mode": m.value, "soc": int(rng.integers(0, 201)) / 2.0}
            for m in docks
            if rng.random() < 0.7
        ]
        hubs.append({"node": nid, "docks": [m.value for m in docks], "tools": tools})

    rates = {m.value: int(rng.integers(1, 21)) / 2.0 for m in TOOL_MODES}
    allowed = [m for m in Mode if m is Mode.Walk or rng.random() < 0.85]

    scenario = {
        "hubs": hubs,
        "energy": {"rate_per_100s": rates},
        "preference": {"allowed": [m.value for m in allowed]},
        "profile": {"base_speed": {}, "congestion": []},
        "seed": int(seed),
        "clock_s": 0.0,
    }
    network = {"nodes": nodes, "edges": edges}
    return network, scenario, names[int(i)], names[int(j)]
