// Typed client for the /v1 HTTP API. The UI talks to the backend through
// this Transport interface only, so tests can swap in a scripted fake.

export interface ToolInfo {
  mode: string;
  soc: number;
}

export interface HubState {
  node: string;
  docks: string[];
  tools: ToolInfo[];
}

export interface NetworkNode {
  id: string;
  x?: number;
  y?: number;
}

export interface NetworkEdge {
  id: string;
  from: string;
  to: string;
  length_m: number;
  modes: string[];
}

export interface ScenarioState {
  id: string;
  hubs: HubState[];
  preference: string[];
  clock_s: number;
  seed: number;
  network: { nodes: NetworkNode[]; edges: NetworkEdge[] };
}

export interface PlanLeg {
  from: string;
  to: string;
  mode: string;
  time_s: number;
  dist_m: number;
  soc_after: number | null;
}

export interface RouteResponse {
  plan: { legs: PlanLeg[]; total_time_s: number };
  total_time_s: number;
  planner: string;
  exec_time_s: number;
  diagnostics: Record<string, unknown>;
}

export interface RouteRequest {
  scenario_id: string;
  origin: string;
  destination: string;
  planner: string;
  preference?: string[];
  params?: Record<string, unknown>;
}

export class ApiError extends Error {
  status: number;
  detail: unknown;

  constructor(status: number, detail: unknown) {
    super(`API error ${status}: ${JSON.stringify(detail)}`);
    this.status = status;
    this.detail = detail;
  }
}

export interface Transport {
  postScenario(doc: unknown): Promise<{ id: string }>;
  getState(id: string): Promise<ScenarioState>;
  postRoute(req: RouteRequest): Promise<RouteResponse>;
}

async function asJson<T>(resp: Response): Promise<T> {
  const body = await resp.json().catch(() => ({}));
  if (!resp.ok) {
    throw new ApiError(resp.status, (body as { detail?: unknown }).detail ?? body);
  }
  return body as T;
}

export class HttpTransport implements Transport {
  constructor(private baseUrl: string = "") {}

  postScenario(doc: unknown): Promise<{ id: string }> {
    return fetch(`${this.baseUrl}/v1/scenario`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(doc),
    }).then((r) => asJson<{ id: string }>(r));
  }

  getState(id: string): Promise<ScenarioState> {
    return fetch(`${this.baseUrl}/v1/scenario/${id}/state`).then((r) => asJson<ScenarioState>(r));
  }

  postRoute(req: RouteRequest): Promise<RouteResponse> {
    return fetch(`${this.baseUrl}/v1/route`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(req),
    }).then((r) => asJson<RouteResponse>(r));
  }
}
