import { readFileSync } from 'fs';
import { join } from 'path';
import { fileURLToPath } from 'url';

import { describe, expect, it } from 'vitest';

import { METRICS, renderChart } from '../src/figures.js';
import { parseMetricsCsv } from '../src/schema.js';

const FIXTURES = fileURLToPath(new URL('./fixtures', import.meta.url));

function fixtureRun(name: string, label: string) {
  const text = readFileSync(join(FIXTURES, name), 'utf8');
  return { label, rows: parseMetricsCsv(text, name) };
}

const on = fixtureRun('security-on.csv', 'security on');
const off = fixtureRun('security-off.csv', 'security off');
const energy = METRICS.find((m) => m.column === 'energy_j')!;

describe('renderChart', () => {
  it('defines the five comparison metrics', () => {
    expect(METRICS.map((m) => m.column)).toEqual([
      'alive',
      'energy_j',
      'delay_ms',
      'overhead_bytes',
      'clusters',
    ]);
    expect(new Set(METRICS.map((m) => m.file)).size).toBe(5);
  });

  it('draws one series per run plus a legend', () => {
    const svg = renderChart(energy, [on, off]);
    expect(svg.match(/<path /g)).toHaveLength(2);
    expect(svg).toContain('security on');
    expect(svg).toContain('security off');
    expect(svg).toContain('Energy consumed vs time');
    expect(svg).toContain('time (s)');
    // one marker per iteration row per run
    expect(svg.match(/<circle /g)).toHaveLength(16);
  });

  it('single run gives a single-series chart', () => {
    const svg = renderChart(energy, [on]);
    expect(svg.match(/<path /g)).toHaveLength(1);
    expect(svg).not.toContain('security off');
  });

  it('is deterministic for identical input', () => {
    const a = renderChart(energy, [on, off]);
    const b = renderChart(energy, [on, off]);
    expect(a).toBe(b);
  });

  it('higher metric values map to higher curve positions', () => {
    const svg = renderChart(energy, [on]);
    const d = /<path d="([^"]+)"/.exec(svg)![1];
    const ys = d
      .replace(/^M/, '')
      .split(' L')
      .map((pt) => Number(pt.split(',')[1]));
    for (let i = 1; i < ys.length; i++) {
      // energy spent accumulates, so the line must descend in SVG y
      expect(ys[i]).toBeLessThan(ys[i - 1]);
    }
  });

  it('escapes markup in labels and titles', () => {
    const svg = renderChart(energy, [{ ...on, label: 'a<b&c>' }]);
    expect(svg).toContain('a&lt;b&amp;c&gt;');
    expect(svg).not.toContain('a<b&c>');
  });
});
