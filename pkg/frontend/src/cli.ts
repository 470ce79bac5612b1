#!/usr/bin/env node
import { pathToFileURL } from 'url';

import yargs from 'yargs';

import { defaultLabel, defaultSpecs, InputError, renderFigures } from './render.js';
import { SchemaError } from './schema.js';

// Exit codes: 0 ok, 1 usage, 2 bad input, 3 unexpected failure.
export async function main(argv: string[]): Promise<number> {
  let args;
  try {
    args = await yargs(argv)
      .usage('$0 --runs a.csv b.csv --labels A B --out figs/')
      .option('runs', {
        type: 'array',
        string: true,
        demandOption: true,
        describe: 'metrics CSV files, one per run',
      })
      .option('labels', {
        type: 'array',
        string: true,
        describe: 'series labels, one per run (default: file or directory name)',
      })
      .option('out', { type: 'string', default: 'figs', describe: 'directory for the SVG figures' })
      .strict()
      .exitProcess(false)
      .fail((msg, err) => {
        throw new Error(msg || (err ? err.message : 'bad arguments'));
      })
      .parse();
  } catch (err) {
    console.error(`usage error: ${(err as Error).message}`);
    return 1;
  }
  if (args.help || args.version) return 0;

  const runs = args.runs.map(String);
  const labels = args.labels ? args.labels.map(String) : runs.map(defaultLabel);
  if (labels.length !== runs.length) {
    console.error(`usage error: got ${runs.length} runs but ${labels.length} labels`);
    return 1;
  }
  try {
    const written = renderFigures(defaultSpecs(runs, labels, args.out));
    for (const p of written) console.log(`wrote ${p}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError || err instanceof InputError) {
      console.error(`${err.name}: ${err.message}`);
      return 2;
    }
    console.error(String(err));
    return 3;
  }
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
