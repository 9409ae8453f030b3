// ViewState store: scenario lifecycle, route comparison and what-if history.
//
// Every route request carries a per-planner sequence number; a response is
// applied only when it is still the latest issued for that planner, so rapid
// control changes can never leave a stale plan on screen. Panels only ever
// hold validated RouteResponses straight from the server.

import { ApiError, RouteResponse, ScenarioState, Transport } from "./api.js";

export const ALL_MODES = ["Walk", "EBike", "EScooter", "ECar"] as const;
export const COMPARED_PLANNERS = ["aco", "q"] as const;

export interface Panel {
  planner: string;
  response: RouteResponse | null;
  error: string | null;
  pending: boolean;
}

export interface WhatIfEntry {
  change: string;
  before: Record<string, number | null>;
  after: Record<string, number | null>;
}

export interface ScenarioDocument {
  hubs: { node: string; docks: string[]; tools: { mode: string; soc: number }[] }[];
  [key: string]: unknown;
}

type Listener = () => void;

export class ViewStore {
  scenarioId: string | null = null;
  scenarioDoc: ScenarioDocument | null = null;
  state: ScenarioState | null = null;
  origin: string | null = null;
  destination: string | null = null;
  allowed: Set<string> = new Set(ALL_MODES);
  showOracle = true;
  seed = 0;
  panels: Record<string, Panel> = {};
  history: WhatIfEntry[] = [];
  banner: string | null = null;

  private seq = 0;
  private issued: Record<string, number> = {};
  private listeners: Listener[] = [];

  constructor(private transport: Transport) {}

  subscribe(fn: Listener): void {
    this.listeners.push(fn);
  }

  private emit(): void {
    for (const fn of this.listeners) fn();
  }

  plannersToQuery(): string[] {
    return this.showOracle ? [...COMPARED_PLANNERS, "oracle"] : [...COMPARED_PLANNERS];
  }

  async loadScenario(doc: ScenarioDocument): Promise<void> {
    this.banner = null;
    try {
      const { id } = await this.transport.postScenario(doc);
      this.scenarioId = id;
      this.scenarioDoc = doc;
      this.state = await this.transport.getState(id);
      this.panels = {};
      this.history = [];
      this.origin = null;
      this.destination = null;
    } catch (err) {
      this.banner = err instanceof ApiError ? err.message : String(err);
    }
    this.emit();
  }

  setEndpoints(origin: string | null, destination: string | null): void {
    this.origin = origin;
    this.destination = destination;
    this.emit();
  }

  toggleMode(mode: string, on: boolean): void {
    if (mode === "Walk") return; // walking is always available
    if (on) this.allowed.add(mode);
    else this.allowed.delete(mode);
    this.emit();
  }

  currentCosts(): Record<string, number | null> {
    const costs: Record<string, number | null> = {};
    for (const planner of this.plannersToQuery()) {
      costs[planner] = this.panels[planner]?.response?.total_time_s ?? null;
    }
    return costs;
  }

  /** Issue one sequenced request per planner; stale responses are dropped. */
  async requestRoutes(): Promise<void> {
    if (!this.scenarioId || !this.origin || !this.destination) return;
    const scenarioId = this.scenarioId;
    const preference = [...this.allowed];
    const jobs = this.plannersToQuery().map((planner) => {
      const mySeq = ++this.seq;
      this.issued[planner] = mySeq;
      this.panels[planner] = {
        planner,
        response: this.panels[planner]?.response ?? null,
        error: null,
        pending: true,
      };
      this.emit();
      return this.transport
        .postRoute({
          scenario_id: scenarioId,
          origin: this.origin!,
          destination: this.destination!,
          planner,
          preference,
          params: { seed: this.seed },
        })
        .then((response) => {
          if (this.issued[planner] !== mySeq) return; // superseded
          this.panels[planner] = { planner, response, error: null, pending: false };
          this.emit();
        })
        .catch((err) => {
          if (this.issued[planner] !== mySeq) return;
          const message =
            err instanceof ApiError && err.status === 422
              ? `no feasible route: ${JSON.stringify(err.detail)}`
              : String(err);
          this.panels[planner] = { planner, response: null, error: message, pending: false };
          this.emit();
        });
    });
    await Promise.all(jobs);
  }

  /** Apply a scenario patch, reload it as a new scenario and re-request. */
  async whatIf(change: string, patch: (doc: ScenarioDocument) => void): Promise<void> {
    if (!this.scenarioDoc) return;
    const before = this.currentCosts();
    const doc = JSON.parse(JSON.stringify(this.scenarioDoc)) as ScenarioDocument;
    patch(doc);
    const endpoints = { origin: this.origin, destination: this.destination };
    await this.loadScenario(doc);
    if (this.banner) return; // validation failed; keep the old panels away
    this.origin = endpoints.origin;
    this.destination = endpoints.destination;
    await this.requestRoutes();
    this.history.push({ change, before, after: this.currentCosts() });
    this.emit();
  }

  setToolSoc(hubNode: string, mode: string, soc: number): Promise<void> {
    if (soc < 0 || soc > 100 || Number.isNaN(soc)) {
      this.banner = `charge must be within 0..100, got ${soc}`;
      this.emit();
      return Promise.resolve();
    }
    return this.whatIf(`${mode}@${hubNode} soc -> ${soc}`, (doc) => {
      for (const hub of doc.hubs) {
        if (hub.node !== hubNode) continue;
        for (const tool of hub.tools) {
          if (tool.mode === mode) tool.soc = soc;
        }
      }
    });
  }
}
