"""JSON-over-HTTP service: scenario setup, route queries, inventory snapshots.

Scenarios are immutable once loaded; planning is stateless per request (no
tool reservation), so reads are idempotent and concurrent requests with the
same seed return plans of identical cost. Reduced graphs are cached per
(scenario, origin, destination) under a lock.
"""
from __future__ import annotations

import threading
import time
import uuid
from dataclasses import replace

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import __version__
from .aco import AcoParams, run_aco
from .bundle import load_bundle
from .errors import (
    EmobilityError,
    NoFeasibleEntryError,
    NoFeasiblePlanError,
    ScenarioFormatError,
    UnknownNodeError,
)
from .exact import exact_optimum
from .graph import Mode, ReducedGraphFactory
from .plans import EMPTY_PLAN, replay_plan
from .qlearning import QParams, extract_policy_path, train
from .scenario import UserPreference
from .seeding import rng_from


class _Entry:
    def __init__(self, bundle):
        self.bundle = bundle
        self.factory = ReducedGraphFactory(bundle.scenario.graph)
        self.reduced_cache = {}
        self.lock = threading.Lock()

    def reduced(self, origin, dest):
        key = (origin, dest)
        with self.lock:
            got = self.reduced_cache.get(key)
        if got is not None:
            return got
        hubs = [h.node for h in self.bundle.scenario.hubs]
        with self.lock:
            got = self.reduced_cache.get(key)
            if got is None:
                got = self.factory.build(origin, dest, hubs)
                self.reduced_cache[key] = got
        return got


class RouteRequest(BaseModel):
    scenario_id: str
    origin: str
    destination: str
    planner: str = "aco"
    preference: list[str] | None = None
    params: dict = Field(default_factory=dict)


def _error_payload(exc):
    payload = {"error": str(exc)}
    field = getattr(exc, "field", None)
    if field:
        payload["field"] = field
    return payload


def _plan_payload(plan, soc_after):
    return {
        "legs": [
            {
                "from": leg.src,
                "to": leg.dst,
                "mode": leg.mode.value,
                "time_s": leg.time_s,
                "dist_m": leg.dist_m,
                "soc_after": soc_after[i],
            }
            for i, leg in enumerate(plan.legs)
        ],
        "total_time_s": plan.total_time_s,
    }


def create_app(scenario_dir=None, static_dir=None):
    app = FastAPI(title="emobility", version=__version__)
    store: dict[str, _Entry] = {}
    store_lock = threading.Lock()
    server_rng = rng_from(int(time.time_ns()) % (2**63), 12)

    def get_entry(scenario_id):
        entry = store.get(scenario_id)
        if entry is None:
            raise HTTPException(status_code=404, detail={"error": f"unknown scenario {scenario_id!r}"})
        return entry

    @app.post("/v1/scenario", status_code=201)
    def post_scenario(document: dict):
        try:
            bundle = load_bundle(document, base_dir=scenario_dir)
        except EmobilityError as exc:
            return JSONResponse(status_code=400, content={"detail": _error_payload(exc)})
        sid = uuid.uuid4().hex[:12]
        with store_lock:
            store[sid] = _Entry(bundle)
        return {"id": sid}

    @app.get("/v1/scenarios")
    def list_scenarios():
        with store_lock:
            return {"ids": sorted(store)}

    @app.get("/v1/scenario/{scenario_id}/state")
    def scenario_state(scenario_id: str):
        entry = get_entry(scenario_id)
        sc = entry.bundle.scenario
        g = sc.graph
        return {
            "id": scenario_id,
            "hubs": [
                {
                    "node": h.node,
                    "docks": sorted(m.value for m in h.docks),
                    "tools": [{"mode": t.mode.value, "soc": t.soc} for t in h.tools],
                }
                for h in sc.hubs
            ],
            "preference": sorted(m.value for m in sc.preference.allowed),
            "clock_s": sc.clock_s,
            "seed": sc.seed,
            "network": {
                "nodes": [{"id": nid, **payload} for nid, payload in g.nodes.items()],
                "edges": [
                    {"id": e.id, "from": e.src, "to": e.dst, "length_m": e.length_m,
                     "modes": sorted(m.value for m in e.time_by_mode)}
                    for e in g.edges.values()
                ],
            },
        }

    @app.post("/v1/route")
    def post_route(req: RouteRequest):
        entry = get_entry(req.scenario_id)
        bundle = entry.bundle
        sc = bundle.scenario
        if req.preference is not None:
            try:
                sc = replace(sc, preference=UserPreference.of(Mode(m) for m in req.preference))
            except ValueError as exc:
                return JSONResponse(status_code=400, content={"detail": {"error": str(exc), "field": "preference"}})

        planner = {"q": "qlearning"}.get(req.planner, req.planner)
        if planner not in ("aco", "qlearning", "oracle"):
            return JSONResponse(status_code=400, content={"detail": {"error": f"unknown planner {req.planner!r}", "field": "planner"}})
        seed = req.params.get("seed")
        if seed is None:
            seed = int(server_rng.integers(0, 2**62))
        diagnostics = {"seed": int(seed)}

        start = time.perf_counter()
        try:
            if req.origin == req.destination:
                if req.origin not in sc.graph.nodes:
                    raise UnknownNodeError(req.origin)
                plan, reduced = EMPTY_PLAN, None
            else:
                reduced = entry.reduced(req.origin, req.destination)
                if planner == "aco":
                    params = AcoParams.from_dict({**bundle.aco, **req.params.get("aco", {})}, seed=int(seed))
                    result = run_aco(reduced, sc, params)
                    plan = result.plan
                    diagnostics.update(iterations=result.iterations, completed_ants=result.completed_ants)
                elif planner == "qlearning":
                    params = QParams.from_dict({**bundle.qlearning, **req.params.get("qlearning", {})}, seed=int(seed))
                    trained = train(reduced, sc, params)
                    rollout = extract_policy_path(trained.qtable, reduced, sc)
                    diagnostics.update(trained.diagnostics, episodes=params.n_episodes)
                    if rollout.plan is None:
                        raise NoFeasiblePlanError(f"greedy policy found no path ({rollout.reason})")
                    plan = rollout.plan
                else:
                    quant = int(req.params.get("quant", 200))
                    plan = exact_optimum(reduced, sc, quant=quant).plan
        except UnknownNodeError as exc:
            return JSONResponse(status_code=400, content={"detail": _error_payload(exc)})
        except (NoFeasiblePlanError, NoFeasibleEntryError) as exc:
            return JSONResponse(status_code=422, content={"detail": _error_payload(exc)})
        except ValueError as exc:
            return JSONResponse(status_code=400, content={"detail": {"error": str(exc), "field": "params"}})
        exec_time = time.perf_counter() - start

        if reduced is None:
            violations, soc_after = (), []
        else:
            violations, soc_after = replay_plan(plan, reduced, sc, origin=req.origin, dest=req.destination)
        if violations:
            return JSONResponse(
                status_code=500,
                content={"detail": {"error": "planner emitted an invalid plan",
                                    "violations": [v.code for v in violations]}},
            )
        return {
            "plan": _plan_payload(plan, soc_after),
            "total_time_s": plan.total_time_s,
            "planner": planner,
            "exec_time_s": exec_time,
            "diagnostics": diagnostics,
        }

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")
    return app
