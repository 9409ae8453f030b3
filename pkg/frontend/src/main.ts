// Wires the ViewStore to the page: scenario loading, node picking, mode
// toggles, charge sliders, comparison panels and the what-if history.

import { HttpTransport, PlanLeg } from "./api.js";
import { layoutNodes } from "./layout.js";
import { legsTotal, renderPanel, renderScenario } from "./render.js";
import { ALL_MODES, ViewStore } from "./store.js";

const store = new ViewStore(new HttpTransport(""));

const $ = <T extends HTMLElement>(id: string) => document.getElementById(id) as T;

function pickNode(node: string): void {
  if (!store.origin || (store.origin && store.destination)) {
    store.setEndpoints(node, null);
  } else if (node !== store.origin) {
    store.setEndpoints(store.origin, node);
    void store.requestRoutes();
  }
}

function redraw(): void {
  const banner = $("banner");
  banner.textContent = store.banner ?? "";
  banner.style.display = store.banner ? "block" : "none";

  const state = store.state;
  const svg = $("map") as unknown as SVGSVGElement;
  if (state) {
    const layout = layoutNodes(state.network.nodes, state.network.edges, state.seed);
    const legsByPlanner: Record<string, PlanLeg[]> = {};
    for (const [planner, panel] of Object.entries(store.panels)) {
      if (panel.response) legsByPlanner[planner] = panel.response.plan.legs;
    }
    renderScenario(svg, state, layout, { origin: store.origin, destination: store.destination }, legsByPlanner, pickNode);
  }

  const panels = $("panels");
  panels.innerHTML = "";
  for (const planner of store.plannersToQuery()) {
    const div = document.createElement("div");
    div.className = "panel";
    const panel = store.panels[planner];
    if (panel) renderPanel(div, panel);
    else div.innerHTML = `<h3>${planner === "q" ? "q-learning" : planner}</h3><p>no request yet</p>`;
    panels.appendChild(div);
  }

  const sliders = $("sliders");
  sliders.innerHTML = "";
  if (state) {
    for (const hub of state.hubs) {
      for (const tool of hub.tools) {
        const row = document.createElement("label");
        row.className = "slider-row";
        row.textContent = `${tool.mode} @ ${hub.node}: ${tool.soc}% `;
        const input = document.createElement("input");
        input.type = "range";
        input.min = "0";
        input.max = "100";
        input.step = "5";
        input.value = String(tool.soc);
        input.addEventListener("change", () => {
          void store.setToolSoc(hub.node, tool.mode, Number(input.value));
        });
        row.appendChild(input);
        sliders.appendChild(row);
      }
    }
  }

  const history = $("history");
  history.innerHTML = "";
  for (const entry of [...store.history].reverse()) {
    const item = document.createElement("li");
    const fmt = (costs: Record<string, number | null>) =>
      Object.entries(costs)
        .map(([p, c]) => `${p}: ${c === null ? "—" : c + " s"}`)
        .join(", ");
    item.textContent = `${entry.change} | before {${fmt(entry.before)}} after {${fmt(entry.after)}}`;
    history.appendChild(item);
  }

  const endpoints = $("endpoints");
  endpoints.textContent = `origin: ${store.origin ?? "click a node"} · destination: ${
    store.destination ?? "click another node"
  }`;
}

store.subscribe(redraw);

async function boot(): Promise<void> {
  const textarea = $<HTMLTextAreaElement>("scenario-doc");
  try {
    const demo = await fetch("./corridor.json").then((r) => r.text());
    textarea.value = demo;
  } catch {
    textarea.value = "{\n}";
  }

  $("load").addEventListener("click", () => {
    try {
      const doc = JSON.parse(textarea.value);
      void store.loadScenario(doc);
    } catch (err) {
      store.banner = `scenario is not valid JSON: ${err}`;
      redraw();
    }
  });

  const toggles = $("mode-toggles");
  for (const mode of ALL_MODES) {
    const label = document.createElement("label");
    const box = document.createElement("input");
    box.type = "checkbox";
    box.checked = true;
    box.disabled = mode === "Walk";
    box.addEventListener("change", () => {
      store.toggleMode(mode, box.checked);
      void store.requestRoutes();
    });
    label.appendChild(box);
    label.appendChild(document.createTextNode(mode));
    toggles.appendChild(label);
  }

  $("oracle-toggle").addEventListener("change", (ev) => {
    store.showOracle = (ev.target as HTMLInputElement).checked;
    void store.requestRoutes();
  });
  $("replan").addEventListener("click", () => void store.requestRoutes());
  redraw();
}

void boot();
