// Trajectory chart building. The numeric substance (series values, the
// outcome badge) is copied verbatim from the run record; geometry only
// scales it for display, and each polyline carries its exact payload
// values in a data attribute so parity with the service stays checkable.

import type { ConceptKind, ModelDocument, OutcomeDoc, RunRecord } from './types.js';
import { conceptKind, escapeXml } from './graph.js';

export interface ChartSeries {
  concept: string;
  kind: ConceptKind;
  values: number[]; // exactly run.result.trajectory[.][index]
  emphasized: boolean; // target concepts stand out
}

export function trajectorySeries(run: RunRecord, document: ModelDocument): ChartSeries[] {
  return run.concepts.map((concept, index) => {
    const kind = conceptKind(document, concept);
    return {
      concept,
      kind,
      values: run.result.trajectory.map((state) => {
        const value = state[index];
        if (value === undefined) throw new Error(`state misaligned at concept ${concept}`);
        return value;
      }),
      emphasized: kind === 'target',
    };
  });
}

export function outcomeBadge(outcome: OutcomeDoc): string {
  if (outcome.kind === 'LimitCycle') return `LimitCycle:${outcome.period}`;
  return outcome.kind;
}

export function renderTrajectoryChartSvg(
  run: RunRecord,
  document: ModelDocument,
  width = 680,
  height = 320,
): string {
  const series = trajectorySeries(run, document);
  const steps = run.result.trajectory.length - 1;
  const lo = document.range === 'bipolar' ? -1 : 0;
  const hi = 1;
  const margin = { left: 46, right: 12, top: 12, bottom: 28 };
  const plotW = width - margin.left - margin.right;
  const plotH = height - margin.top - margin.bottom;
  const x = (t: number) => margin.left + (steps === 0 ? 0 : (t / steps) * plotW);
  const y = (v: number) => margin.top + ((hi - v) / (hi - lo)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" class="trajectory-chart" viewBox="0 0 ${width} ${height}" width="${width}" height="${height}">`,
  );
  // frame and zero line
  parts.push(
    `<rect class="chart-frame" x="${margin.left}" y="${margin.top}" width="${plotW}" height="${plotH}"/>`,
  );
  if (lo < 0) {
    parts.push(
      `<line class="chart-zero" x1="${margin.left}" y1="${y(0)}" x2="${margin.left + plotW}" y2="${y(0)}"/>`,
    );
  }
  for (const bound of [lo, hi]) {
    parts.push(
      `<text class="chart-tick" x="${margin.left - 6}" y="${y(bound) + 4}" text-anchor="end">${bound}</text>`,
    );
  }
  parts.push(
    `<text class="chart-tick" x="${x(0)}" y="${height - 8}" text-anchor="middle">0</text>`,
    `<text class="chart-tick" x="${x(steps)}" y="${height - 8}" text-anchor="middle">${steps}</text>`,
  );
  series.forEach((s, i) => {
    const points = s.values.map((v, t) => `${x(t).toFixed(1)},${y(v).toFixed(1)}`).join(' ');
    parts.push(
      `<polyline class="series swatch-${i % 10}${s.emphasized ? ' series-target' : ''}" fill="none" ` +
        `data-concept="${escapeXml(s.concept)}" data-kind="${s.kind}" ` +
        `data-values="${s.values.map((v) => String(v)).join(',')}" ` +
        `points="${points}"/>`,
    );
  });
  parts.push('</svg>');
  return parts.join('');
}

export function renderLegendHtml(series: ChartSeries[]): string {
  return (
    '<ul class="chart-legend">' +
    series
      .map(
        (s, i) =>
          `<li class="legend-item${s.emphasized ? ' legend-target' : ''}" data-series="${i}">` +
          `<span class="legend-swatch swatch-${i % 10}"></span>${escapeXml(s.concept)}` +
          `${s.emphasized ? ' <span class="legend-badge">target</span>' : ''}</li>`,
      )
      .join('') +
    '</ul>'
  );
}
