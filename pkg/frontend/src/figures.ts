import { scaleLinear } from 'd3-scale';

import type { IterationRow, RunSeries } from './schema.js';

/** A metric column the chart set knows how to present. */
export interface MetricDef {
  column: Exclude<keyof IterationRow, 'iteration' | 'time_s'>;
  file: string;
  title: string;
  yLabel: string;
}

// The five comparison figures, one per metric, all against simulated time.
export const METRICS: readonly MetricDef[] = [
  { column: 'alive', file: 'nodes-alive.svg', title: 'Nodes alive', yLabel: 'nodes' },
  { column: 'energy_j', file: 'energy.svg', title: 'Energy consumed', yLabel: 'joules' },
  { column: 'delay_ms', file: 'delay.svg', title: 'End-to-end delay', yLabel: 'ms' },
  { column: 'overhead_bytes', file: 'overhead.svg', title: 'Control overhead', yLabel: 'bytes' },
  { column: 'clusters', file: 'clusters.svg', title: 'Clusters retained', yLabel: 'clusters' },
];

const WIDTH = 760;
const HEIGHT = 440;
const MARGIN = { top: 48, right: 24, bottom: 56, left: 72 };
const PALETTE = ['#4e79a7', '#e15759', '#59a14f', '#f28e2b', '#b07aa1', '#76b7b2'];
const FONT = 'font-family="Helvetica, Arial, sans-serif"';

// Fixed-precision coordinate text keeps re-renders byte-identical.
function fmt(v: number): string {
  const r = Math.round(v * 100) / 100;
  return Object.is(r, -0) ? '0' : String(r);
}

function esc(text: string): string {
  return text.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;');
}

/** Render one metric as a standalone SVG line chart, one series per run. */
export function renderChart(metric: MetricDef, runs: readonly RunSeries[]): string {
  const xMax = Math.max(1, ...runs.flatMap((r) => r.rows.map((row) => row.time_s)));
  const yMax = Math.max(1e-9, ...runs.flatMap((r) => r.rows.map((row) => row[metric.column])));
  const x = scaleLinear([0, xMax], [MARGIN.left, WIDTH - MARGIN.right]).nice();
  const y = scaleLinear([0, yMax], [HEIGHT - MARGIN.bottom, MARGIN.top]).nice();
  const floor = HEIGHT - MARGIN.bottom;

  const parts: string[] = [];
  parts.push('<?xml version="1.0" encoding="UTF-8"?>');
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(
    `<text x="${WIDTH / 2}" y="26" text-anchor="middle" ${FONT} font-size="17">${esc(metric.title)} vs time</text>`,
  );

  for (const t of y.ticks(5)) {
    const py = fmt(y(t));
    parts.push(
      `<line x1="${MARGIN.left}" y1="${py}" x2="${WIDTH - MARGIN.right}" y2="${py}" stroke="#dddddd"/>`,
    );
    parts.push(
      `<text x="${MARGIN.left - 8}" y="${py}" text-anchor="end" dominant-baseline="middle" ${FONT} font-size="12">${fmt(t)}</text>`,
    );
  }
  for (const t of x.ticks(7)) {
    const px = fmt(x(t));
    parts.push(`<line x1="${px}" y1="${floor}" x2="${px}" y2="${floor + 5}" stroke="#333333"/>`);
    parts.push(
      `<text x="${px}" y="${floor + 20}" text-anchor="middle" ${FONT} font-size="12">${fmt(t)}</text>`,
    );
  }
  parts.push(
    `<line x1="${MARGIN.left}" y1="${floor}" x2="${WIDTH - MARGIN.right}" y2="${floor}" stroke="#333333"/>`,
  );
  parts.push(`<line x1="${MARGIN.left}" y1="${MARGIN.top}" x2="${MARGIN.left}" y2="${floor}" stroke="#333333"/>`);
  parts.push(
    `<text x="${(MARGIN.left + WIDTH - MARGIN.right) / 2}" y="${HEIGHT - 14}" text-anchor="middle" ${FONT} font-size="13">time (s)</text>`,
  );
  parts.push(
    `<text x="20" y="${(MARGIN.top + floor) / 2}" text-anchor="middle" ${FONT} font-size="13" transform="rotate(-90 20 ${(MARGIN.top + floor) / 2})">${esc(metric.yLabel)}</text>`,
  );

  runs.forEach((run, i) => {
    const color = PALETTE[i % PALETTE.length];
    const pts = run.rows.map((row) => [x(row.time_s), y(row[metric.column])] as const);
    const d = 'M' + pts.map(([px, py]) => `${fmt(px)},${fmt(py)}`).join(' L');
    parts.push(`<path d="${d}" fill="none" stroke="${color}" stroke-width="2"/>`);
    for (const [px, py] of pts) {
      parts.push(`<circle cx="${fmt(px)}" cy="${fmt(py)}" r="3" fill="${color}"/>`);
    }
  });

  runs.forEach((run, i) => {
    const color = PALETTE[i % PALETTE.length];
    const ly = MARGIN.top + 14 + i * 18;
    const lx = WIDTH - MARGIN.right - 150;
    parts.push(`<line x1="${lx}" y1="${ly}" x2="${lx + 24}" y2="${ly}" stroke="${color}" stroke-width="2"/>`);
    parts.push(
      `<text x="${lx + 30}" y="${ly}" dominant-baseline="middle" ${FONT} font-size="12">${esc(run.label)}</text>`,
    );
  });

  parts.push('</svg>');
  return parts.join('\n') + '\n';
}
