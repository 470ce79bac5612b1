export { parseMetricsCsv, SchemaError, REQUIRED_COLUMNS } from './schema.js';
export type { IterationRow, RunSeries } from './schema.js';
export { METRICS, renderChart } from './figures.js';
export type { MetricDef } from './figures.js';
export { defaultLabel, defaultSpecs, InputError, renderFigures } from './render.js';
export type { FigureSpec } from './render.js';
export { main } from './cli.js';
