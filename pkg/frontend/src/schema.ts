import Papa from 'papaparse';

/** Raised when an input CSV does not carry the metrics schema. */
export class SchemaError extends Error {
  override name = 'SchemaError';
}

/** One per-iteration row of a run's metrics.csv, already filtered to kind=iteration. */
export interface IterationRow {
  iteration: number;
  time_s: number;
  alive: number;
  clusters: number;
  energy_j: number;
  delay_ms: number;
  overhead_bytes: number;
}

export interface RunSeries {
  label: string;
  rows: IterationRow[];
}

// Columns every figure may reference. The simulator writes more (per-category
// packet/byte splits, summary percentages); those are ignored here.
export const REQUIRED_COLUMNS = [
  'kind',
  'iteration',
  'time_s',
  'alive',
  'clusters',
  'energy_j',
  'delay_ms',
  'overhead_bytes',
] as const;

type RawRow = Record<string, string | number | boolean | null>;

function numeric(row: RawRow, column: string, source: string): number {
  const v = row[column];
  if (typeof v !== 'number' || !Number.isFinite(v)) {
    throw new SchemaError(`${source}: column ${column} holds non-numeric value ${JSON.stringify(v)}`);
  }
  return v;
}

/**
 * Parse metrics CSV text into iteration rows.
 *
 * The file must carry all REQUIRED_COLUMNS and at least one kind=iteration
 * row; the trailing kind=summary row is dropped. `source` names the file in
 * error messages.
 */
export function parseMetricsCsv(text: string, source: string): IterationRow[] {
  if (text.trim() === '') {
    throw new SchemaError(`${source}: empty CSV`);
  }
  const parsed = Papa.parse<RawRow>(text, { header: true, dynamicTyping: true, skipEmptyLines: true });
  const fields = parsed.meta.fields ?? [];
  for (const column of REQUIRED_COLUMNS) {
    if (!fields.includes(column)) {
      throw new SchemaError(`${source}: missing column ${column}`);
    }
  }
  const rows: IterationRow[] = [];
  for (const raw of parsed.data) {
    if (raw.kind !== 'iteration') continue;
    rows.push({
      iteration: numeric(raw, 'iteration', source),
      time_s: numeric(raw, 'time_s', source),
      alive: numeric(raw, 'alive', source),
      clusters: numeric(raw, 'clusters', source),
      energy_j: numeric(raw, 'energy_j', source),
      delay_ms: numeric(raw, 'delay_ms', source),
      overhead_bytes: numeric(raw, 'overhead_bytes', source),
    });
  }
  if (rows.length === 0) {
    throw new SchemaError(`${source}: no iteration rows`);
  }
  rows.sort((a, b) => a.time_s - b.time_s);
  return rows;
}
