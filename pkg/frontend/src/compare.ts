// Side-by-side run comparison. Every cell shows the payload number
// verbatim (shortest round-trip string of the exact value), deltas on
// target concepts are highlighted, and delta signs drive the coloring.

import type { CompareRecord } from './types.js';
import { escapeXml } from './graph.js';
import { outcomeBadge } from './chart.js';

export interface CompareRowView {
  id: string;
  kind: string;
  finalA: string;
  finalB: string;
  delta: string;
  rawDelta: number;
  deltaSign: 'positive' | 'negative' | 'zero';
  highlighted: boolean;
}

export function compareRows(record: CompareRecord): CompareRowView[] {
  return record.concepts.map((row) => ({
    id: row.id,
    kind: row.kind,
    finalA: String(row.final_a),
    finalB: String(row.final_b),
    delta: String(row.delta),
    rawDelta: row.delta,
    deltaSign: row.delta > 0 ? 'positive' : row.delta < 0 ? 'negative' : 'zero',
    highlighted: row.kind === 'target',
  }));
}

export function renderCompareTableHtml(record: CompareRecord): string {
  const rows = compareRows(record);
  const header =
    '<thead><tr><th>concept</th><th>kind</th>' +
    `<th>A <span class="outcome-badge">${escapeXml(outcomeBadge(record.outcome_a))}</span></th>` +
    `<th>B <span class="outcome-badge">${escapeXml(outcomeBadge(record.outcome_b))}</span></th>` +
    '<th>delta (B-A)</th></tr></thead>';
  const body = rows
    .map(
      (row) =>
        `<tr class="${row.highlighted ? 'row-target' : ''}" data-concept="${escapeXml(row.id)}">` +
        `<td>${escapeXml(row.id)}</td>` +
        `<td><span class="kind-chip kind-chip-${row.kind}">${escapeXml(row.kind)}</span></td>` +
        `<td class="num">${row.finalA}</td>` +
        `<td class="num">${row.finalB}</td>` +
        `<td class="num delta delta-${row.deltaSign}">${row.delta}</td>` +
        '</tr>',
    )
    .join('');
  return `<table class="compare-table">${header}<tbody>${body}</tbody></table>`;
}
