import { existsSync, mkdtempSync, readdirSync, readFileSync, writeFileSync } from 'fs';
import { tmpdir } from 'os';
import { join } from 'path';
import { fileURLToPath } from 'url';

import { describe, expect, it } from 'vitest';

import { main } from '../src/cli.js';
import { defaultLabel, defaultSpecs, InputError, renderFigures } from '../src/render.js';
import { SchemaError } from '../src/schema.js';

const FIXTURES = fileURLToPath(new URL('./fixtures', import.meta.url));
const ON = join(FIXTURES, 'security-on.csv');
const OFF = join(FIXTURES, 'security-off.csv');
const LABELS = ['security on', 'security off'];

function freshDir(): string {
  return mkdtempSync(join(tmpdir(), 'esrp-plots-'));
}

describe('renderFigures', () => {
  it('renders 5 byte-stable figures from a two-run sweep', () => {
    const before = [readFileSync(ON, 'utf8'), readFileSync(OFF, 'utf8')];

    const dirA = freshDir();
    const first = renderFigures(defaultSpecs([ON, OFF], LABELS, dirA));
    expect(first).toHaveLength(5);
    for (const p of first) {
      const svg = readFileSync(p, 'utf8');
      expect(svg.startsWith('<?xml')).toBe(true);
      expect(svg.trimEnd().endsWith('</svg>')).toBe(true);
    }
    expect(readdirSync(dirA).sort()).toEqual([
      'clusters.svg',
      'delay.svg',
      'energy.svg',
      'nodes-alive.svg',
      'overhead.svg',
    ]);

    const dirB = freshDir();
    const second = renderFigures(defaultSpecs([ON, OFF], LABELS, dirB));
    for (let i = 0; i < first.length; i++) {
      expect(readFileSync(second[i])).toEqual(readFileSync(first[i]));
    }

    // inputs are read-only
    expect([readFileSync(ON, 'utf8'), readFileSync(OFF, 'utf8')]).toEqual(before);

    console.log('[PASS] secondary: 5 figures from a two-run sweep CSV, byte-stable across re-renders');
  });

  it('missing column leaves no partial output', () => {
    const dir = freshDir();
    const crippled = join(dir, 'no-delay.csv');
    const text = readFileSync(ON, 'utf8')
      .split('\n')
      .map((line) => line.split(',').filter((_, i) => i !== 10).join(','))
      .join('\n');
    writeFileSync(crippled, text);

    const out = join(dir, 'figs');
    expect(() => renderFigures(defaultSpecs([crippled, OFF], LABELS, out))).toThrowError(
      /missing column delay_ms/,
    );
    expect(existsSync(out)).toBe(false);
  });

  it('empty CSV leaves no partial output', () => {
    const dir = freshDir();
    const empty = join(dir, 'empty.csv');
    writeFileSync(empty, '');
    const out = join(dir, 'figs');
    expect(() => renderFigures(defaultSpecs([empty], ['x'], out))).toThrowError(SchemaError);
    expect(existsSync(out)).toBe(false);
  });

  it('unreadable file and unknown metric are named errors', () => {
    const dir = freshDir();
    expect(() => renderFigures(defaultSpecs([join(dir, 'nope.csv')], ['x'], dir))).toThrowError(
      InputError,
    );
    expect(() =>
      renderFigures([{ csvPaths: [ON], labels: ['x'], column: 'delivered_frames', outPath: join(dir, 'f.svg') }]),
    ).toThrowError(/unknown metric column delivered_frames/);
    expect(() => renderFigures([{ csvPaths: [ON], labels: [], column: 'alive', outPath: join(dir, 'f.svg') }])).toThrowError(
      /1 runs but 0 labels/,
    );
  });
});

describe('defaultLabel', () => {
  it('uses the file stem, or the directory for stock metrics.csv paths', () => {
    expect(defaultLabel('/somewhere/run-a.csv')).toBe('run-a');
    expect(defaultLabel('/sweep/security_enabled=true/metrics.csv')).toBe('security_enabled=true');
    expect(defaultLabel('metrics.csv')).toBe('metrics');
  });
});

describe('cli', () => {
  it('renders the figure set and exits 0', async () => {
    const out = join(freshDir(), 'figs');
    const code = await main(['--runs', ON, OFF, '--labels', 'A', 'B', '--out', out]);
    expect(code).toBe(0);
    expect(readdirSync(out)).toHaveLength(5);
  });

  it('maps failures to exit codes', async () => {
    const dir = freshDir();
    expect(await main(['--runs', ON, '--no-such-flag'])).toBe(1);
    expect(await main([])).toBe(1);
    expect(await main(['--runs', ON, OFF, '--labels', 'only-one', '--out', dir])).toBe(1);
    expect(await main(['--runs', join(dir, 'ghost.csv'), '--out', dir])).toBe(2);
  });
});
