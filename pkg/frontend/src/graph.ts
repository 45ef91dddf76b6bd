// Deterministic SVG view of a model: concepts on a circle in document
// order, edges sign-coded (solid/excitatory vs dashed/inhibitory) with
// weight labels, target concepts visually emphasized. Same document, same
// markup, so screenshots are reproducible.

import type { ConceptKind, ModelDocument } from './types.js';

export interface NodeLayout {
  id: string;
  label: string;
  kind: ConceptKind;
  x: number;
  y: number;
}

export interface EdgeLayout {
  source: string;
  target: string;
  weight: number;
  sign: 'positive' | 'negative' | 'zero';
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  labelX: number;
  labelY: number;
}

export interface GraphLayout {
  nodes: NodeLayout[];
  edges: EdgeLayout[];
}

const NODE_RADIUS = 26;

function round1(v: number): number {
  return Math.round(v * 10) / 10;
}

export function conceptKind(document: ModelDocument, id: string): ConceptKind {
  const concept = document.concepts.find((c) => c.id === id);
  return concept?.kind ?? 'ordinary';
}

export function layoutModel(document: ModelDocument, width: number, height: number): GraphLayout {
  const n = document.concepts.length;
  const cx = width / 2;
  const cy = height / 2;
  const radius = Math.max(10, Math.min(width, height) / 2 - NODE_RADIUS - 24);
  const nodes: NodeLayout[] = document.concepts.map((c, i) => {
    const angle = -Math.PI / 2 + (2 * Math.PI * i) / Math.max(n, 1);
    return {
      id: c.id,
      label: c.label || c.id,
      kind: c.kind ?? 'ordinary',
      x: round1(cx + radius * Math.cos(angle)),
      y: round1(cy + radius * Math.sin(angle)),
    };
  });
  const byId = new Map(nodes.map((node) => [node.id, node]));
  const edges: EdgeLayout[] = document.edges.map((e) => {
    const a = byId.get(e.source);
    const b = byId.get(e.target);
    if (!a || !b) throw new Error(`edge endpoint missing: ${e.source}->${e.target}`);
    const dx = b.x - a.x;
    const dy = b.y - a.y;
    const length = Math.hypot(dx, dy) || 1;
    const ux = dx / length;
    const uy = dy / length;
    const x1 = a.x + ux * NODE_RADIUS;
    const y1 = a.y + uy * NODE_RADIUS;
    const x2 = b.x - ux * (NODE_RADIUS + 6);
    const y2 = b.y - uy * (NODE_RADIUS + 6);
    // nudge the label off the line so opposite edges stay readable
    const mx = (x1 + x2) / 2 - uy * 10;
    const my = (y1 + y2) / 2 + ux * 10;
    return {
      source: e.source,
      target: e.target,
      weight: e.weight,
      sign: e.weight > 0 ? 'positive' : e.weight < 0 ? 'negative' : 'zero',
      x1: round1(x1),
      y1: round1(y1),
      x2: round1(x2),
      y2: round1(y2),
      labelX: round1(mx),
      labelY: round1(my),
    };
  });
  return { nodes, edges };
}

export function escapeXml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

export function renderGraphSvg(document: ModelDocument, width = 680, height = 460): string {
  const layout = layoutModel(document, width, height);
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" class="graph-view" viewBox="0 0 ${width} ${height}" width="${width}" height="${height}">`,
  );
  parts.push(
    '<defs>' +
      '<marker id="arrow-positive" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="7" markerHeight="7" orient="auto-start-reverse">' +
      '<path d="M 0 0 L 10 5 L 0 10 z" class="arrow-positive"/></marker>' +
      '<marker id="arrow-negative" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="7" markerHeight="7" orient="auto-start-reverse">' +
      '<path d="M 0 0 L 10 5 L 0 10 z" class="arrow-negative"/></marker>' +
      '</defs>',
  );
  for (const e of layout.edges) {
    parts.push(
      `<line class="edge edge-${e.sign}" data-source="${escapeXml(e.source)}" ` +
        `data-target="${escapeXml(e.target)}" data-weight="${String(e.weight)}" ` +
        `x1="${e.x1}" y1="${e.y1}" x2="${e.x2}" y2="${e.y2}" ` +
        `marker-end="url(#arrow-${e.sign === 'negative' ? 'negative' : 'positive'})"/>`,
    );
    parts.push(
      `<text class="edge-label edge-label-${e.sign}" x="${e.labelX}" y="${e.labelY}">` +
        `${String(e.weight)}</text>`,
    );
  }
  for (const node of layout.nodes) {
    parts.push(`<g class="node node-${node.kind}" data-concept="${escapeXml(node.id)}">`);
    parts.push(`<circle cx="${node.x}" cy="${node.y}" r="${NODE_RADIUS}"/>`);
    if (node.kind === 'target') {
      parts.push(`<circle class="target-ring" cx="${node.x}" cy="${node.y}" r="${NODE_RADIUS + 5}"/>`);
    }
    parts.push(
      `<text class="node-label" x="${node.x}" y="${node.y - NODE_RADIUS - 8}">${escapeXml(node.label)}</text>`,
    );
    parts.push(
      `<text class="kind-badge kind-badge-${node.kind}" x="${node.x}" y="${node.y + 4}">` +
        `${node.kind}</text>`,
    );
    parts.push('</g>');
  }
  parts.push('</svg>');
  return parts.join('');
}
