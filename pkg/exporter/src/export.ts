/**
 * Batch export: manifest in, EMB1 out, sidecar metadata alongside.
 *
 * Unreadable or undecodable images are skipped (not fatal) and listed
 * in the sidecar, so a partial corpus still produces a usable file.
 */

import { readFileSync, writeFileSync } from 'node:fs';

import { loadBackend, type BackendKind, type ModelName } from './backends.js';
import { encodeEmb1, type Emb1Record } from './emb1.js';
import { decodeImage } from './image.js';
import { loadManifest } from './manifest.js';

export interface ExportJob {
  model: ModelName;
  backend: BackendKind;
  manifestPath: string;
  outPath: string;
  metaPath?: string;
}

export interface ExportResult {
  records: number;
  dim: number;
  skippedIds: string[];
}

export async function runExport(job: ExportJob): Promise<ExportResult> {
  const backend = loadBackend(job.model, job.backend);
  const entries = loadManifest(job.manifestPath);
  const records: Emb1Record[] = [];
  const skipped: string[] = [];
  for (const entry of entries) {
    try {
      const image = decodeImage(readFileSync(entry.path));
      records.push({ id: entry.id, values: await backend.embed(image) });
    } catch (err) {
      if (err instanceof Error && err.message.startsWith('model load error')) {
        throw err; // missing model is fatal, a bad image is not
      }
      skipped.push(entry.id);
    }
  }
  writeFileSync(job.outPath, encodeEmb1(backend.dim, records));
  const sidecar = {
    model: job.model,
    backend: backend.kind,
    dim: backend.dim,
    preprocessing: backend.preprocessing,
    records: records.length,
    skipped_ids: skipped,
  };
  writeFileSync(job.metaPath ?? `${job.outPath}.meta.json`, JSON.stringify(sidecar, null, 2) + '\n');
  return { records: records.length, dim: backend.dim, skippedIds: skipped };
}
