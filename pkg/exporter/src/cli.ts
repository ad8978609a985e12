#!/usr/bin/env node
/**
 * vismem-exporter CLI.
 *
 *   export --model clip|alexnet --manifest m.jsonl --out e.emb1
 *          [--backend real|test] [--meta sidecar.json]
 *   serve  --model clip|alexnet [--backend real|test]
 */

import { parseArgs } from 'node:util';

import { loadBackend, MODEL_DIMS, type BackendKind, type ModelName } from './backends.js';
import { runExport } from './export.js';
import { serveStdio } from './serve.js';

function usage(): never {
  console.error(
    'usage: cli.js export --model clip|alexnet --manifest FILE --out FILE [--backend real|test] [--meta FILE]\n' +
    '       cli.js serve  --model clip|alexnet [--backend real|test]',
  );
  process.exit(2);
}

function parseModel(value: string | undefined): ModelName {
  if (value !== 'clip' && value !== 'alexnet') usage();
  return value;
}

function parseBackend(value: string | undefined): BackendKind {
  const kind = value ?? 'real';
  if (kind !== 'real' && kind !== 'test') usage();
  return kind;
}

async function main(): Promise<void> {
  const [command, ...rest] = process.argv.slice(2);
  const { values } = parseArgs({
    args: rest,
    options: {
      model: { type: 'string' },
      manifest: { type: 'string' },
      out: { type: 'string' },
      meta: { type: 'string' },
      backend: { type: 'string' },
    },
  });

  if (command === 'export') {
    if (!values.manifest || !values.out) usage();
    const result = await runExport({
      model: parseModel(values.model),
      backend: parseBackend(values.backend),
      manifestPath: values.manifest,
      outPath: values.out,
      metaPath: values.meta,
    });
    console.log(JSON.stringify({
      out: values.out,
      records: result.records,
      dim: result.dim,
      skipped: result.skippedIds.length,
    }));
    return;
  }

  if (command === 'serve') {
    const backend = loadBackend(parseModel(values.model), parseBackend(values.backend));
    await serveStdio(backend);
    return;
  }

  if (command === 'dims') {
    console.log(JSON.stringify(MODEL_DIMS));
    return;
  }

  usage();
}

main().catch((err) => {
  console.error(JSON.stringify({ error: (err as Error).message }));
  process.exit(1);
});
