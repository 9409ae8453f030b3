// Node placement: document coordinates when available, otherwise a seeded
// deterministic force-directed layout.

import { NetworkEdge, NetworkNode } from "./api.js";

export interface Point {
  x: number;
  y: number;
}

export type Layout = Map<string, Point>;

// Small deterministic PRNG (mulberry32); layouts must not jump between loads.
function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function layoutNodes(nodes: NetworkNode[], edges: NetworkEdge[], seed = 1): Layout {
  const layout: Layout = new Map();
  if (nodes.length === 0) return layout;
  if (nodes.every((n) => typeof n.x === "number" && typeof n.y === "number")) {
    for (const n of nodes) layout.set(n.id, { x: n.x as number, y: n.y as number });
    return normalize(layout);
  }

  const rand = mulberry32(seed);
  const pos = new Map<string, Point>();
  for (const n of nodes) pos.set(n.id, { x: rand() * 1000, y: rand() * 1000 });
  const neighbours = edges.map((e) => [e.from, e.to] as const);
  const k = 1000 / Math.sqrt(nodes.length);

  for (let iter = 0; iter < 150; iter++) {
    const force = new Map<string, Point>(nodes.map((n) => [n.id, { x: 0, y: 0 }]));
    for (let i = 0; i < nodes.length; i++) {
      for (let j = i + 1; j < nodes.length; j++) {
        const a = pos.get(nodes[i].id)!;
        const b = pos.get(nodes[j].id)!;
        let dx = a.x - b.x;
        let dy = a.y - b.y;
        const d2 = Math.max(dx * dx + dy * dy, 1e-6);
        const rep = (k * k) / d2;
        dx *= rep;
        dy *= rep;
        const fa = force.get(nodes[i].id)!;
        const fb = force.get(nodes[j].id)!;
        fa.x += dx;
        fa.y += dy;
        fb.x -= dx;
        fb.y -= dy;
      }
    }
    for (const [u, v] of neighbours) {
      const a = pos.get(u);
      const b = pos.get(v);
      if (!a || !b) continue;
      const dx = b.x - a.x;
      const dy = b.y - a.y;
      const d = Math.max(Math.sqrt(dx * dx + dy * dy), 1e-3);
      const att = (d * d) / k / d / 50;
      const fa = force.get(u)!;
      const fb = force.get(v)!;
      fa.x += dx * att;
      fa.y += dy * att;
      fb.x -= dx * att;
      fb.y -= dy * att;
    }
    const temp = 10 * (1 - iter / 150);
    for (const n of nodes) {
      const p = pos.get(n.id)!;
      const f = force.get(n.id)!;
      const mag = Math.max(Math.sqrt(f.x * f.x + f.y * f.y), 1e-9);
      p.x += (f.x / mag) * Math.min(mag, temp);
      p.y += (f.y / mag) * Math.min(mag, temp);
    }
  }
  for (const n of nodes) layout.set(n.id, pos.get(n.id)!);
  return normalize(layout);
}

// Scale into a [40, 760] x [40, 560] viewport.
function normalize(layout: Layout): Layout {
  const xs = [...layout.values()].map((p) => p.x);
  const ys = [...layout.values()].map((p) => p.y);
  const x0 = Math.min(...xs);
  const x1 = Math.max(...xs);
  const y0 = Math.min(...ys);
  const y1 = Math.max(...ys);
  const sx = x1 > x0 ? 720 / (x1 - x0) : 1;
  const sy = y1 > y0 ? 520 / (y1 - y0) : 1;
  const out: Layout = new Map();
  for (const [id, p] of layout) {
    out.set(id, { x: 40 + (p.x - x0) * sx, y: 40 + (p.y - y0) * sy });
  }
  return out;
}
