// DOM/SVG rendering for the scenario map and the route comparison panels.

import { PlanLeg, RouteResponse, ScenarioState } from "./api.js";
import { Layout } from "./layout.js";
import { Panel } from "./store.js";

export const MODE_COLORS: Record<string, string> = {
  Walk: "#7f8c8d",
  EBike: "#27ae60",
  EScooter: "#e67e22",
  ECar: "#2980b9",
};

const SVG_NS = "http://www.w3.org/2000/svg";

function el<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | number>,
): SVGElementTagNameMap[K] {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, String(v));
  return node;
}

export function renderScenario(
  svg: SVGSVGElement,
  state: ScenarioState,
  layout: Layout,
  selection: { origin: string | null; destination: string | null },
  legsByPlanner: Record<string, PlanLeg[]>,
  onPick: (node: string) => void,
): void {
  svg.innerHTML = "";
  const hubByNode = new Map(state.hubs.map((h) => [h.node, h]));

  for (const edge of state.network.edges) {
    const a = layout.get(edge.from);
    const b = layout.get(edge.to);
    if (!a || !b) continue;
    svg.appendChild(
      el("line", { x1: a.x, y1: a.y, x2: b.x, y2: b.y, stroke: "#dfe6e9", "stroke-width": 1.5 }),
    );
  }

  // route overlays, one dashed offset band per planner
  const planners = Object.keys(legsByPlanner);
  planners.forEach((planner, i) => {
    for (const leg of legsByPlanner[planner]) {
      const a = layout.get(leg.from);
      const b = layout.get(leg.to);
      if (!a || !b) continue;
      const off = (i - (planners.length - 1) / 2) * 4;
      svg.appendChild(
        el("line", {
          x1: a.x,
          y1: a.y + off,
          x2: b.x,
          y2: b.y + off,
          stroke: MODE_COLORS[leg.mode] ?? "#2c3e50",
          "stroke-width": 3.5,
          "stroke-dasharray": planner === "oracle" ? "6 4" : "none",
          opacity: 0.85,
        }),
      );
    }
  });

  for (const node of state.network.nodes) {
    const p = layout.get(node.id);
    if (!p) continue;
    const hub = hubByNode.get(node.id);
    const selected = node.id === selection.origin || node.id === selection.destination;
    const circle = el("circle", {
      cx: p.x,
      cy: p.y,
      r: hub ? 9 : 5,
      fill: hub ? "#f5b041" : "#b2bec3",
      stroke: selected ? "#c0392b" : "#2d3436",
      "stroke-width": selected ? 3 : 1,
    });
    circle.addEventListener("click", () => onPick(node.id));
    svg.appendChild(circle);
    const label = el("text", { x: p.x + 10, y: p.y - 8, "font-size": 11, fill: "#2d3436" });
    label.textContent =
      node.id === selection.origin ? `${node.id} (origin)` :
      node.id === selection.destination ? `${node.id} (destination)` : node.id;
    svg.appendChild(label);
    if (hub) {
      hub.tools.forEach((tool, i) => {
        const badge = el("text", {
          x: p.x + 10,
          y: p.y + 6 + i * 12,
          "font-size": 10,
          fill: MODE_COLORS[tool.mode] ?? "#2c3e50",
        });
        badge.textContent = `${tool.mode} ${tool.soc}%`;
        svg.appendChild(badge);
      });
    }
  }
}

export function legsTotal(legs: PlanLeg[]): number {
  let total = 0;
  for (const leg of legs) total += leg.time_s;
  return total;
}

function formatSeconds(s: number): string {
  return s >= 120 ? `${(s / 60).toFixed(1)} min (${s.toFixed(0)} s)` : `${s.toFixed(0)} s`;
}

export function renderPanel(container: HTMLElement, panel: Panel): void {
  container.innerHTML = "";
  const title = document.createElement("h3");
  title.textContent = panel.planner === "q" ? "q-learning" : panel.planner;
  container.appendChild(title);
  if (panel.pending) {
    container.appendChild(document.createTextNode("planning..."));
    return;
  }
  if (panel.error) {
    const err = document.createElement("p");
    err.className = "error";
    err.textContent = panel.error;
    container.appendChild(err);
    return;
  }
  const response: RouteResponse | null = panel.response;
  if (!response) return;

  // the displayed total is the sum of the displayed legs, always
  const total = legsTotal(response.plan.legs);
  const head = document.createElement("p");
  head.className = "total";
  head.textContent = `total ${formatSeconds(total)} · planned in ${(response.exec_time_s * 1000).toFixed(0)} ms`;
  container.appendChild(head);

  const list = document.createElement("ul");
  for (const leg of response.plan.legs) {
    const item = document.createElement("li");
    item.style.color = MODE_COLORS[leg.mode] ?? "#2c3e50";
    const soc = leg.soc_after === null ? "" : ` · ${leg.soc_after}% left`;
    item.textContent = `${leg.from} → ${leg.to} by ${leg.mode}, ${formatSeconds(leg.time_s)}${soc}`;
    list.appendChild(item);
  }
  if (!response.plan.legs.length) {
    const item = document.createElement("li");
    item.textContent = "already at the destination";
    list.appendChild(item);
  }
  container.appendChild(list);
}
