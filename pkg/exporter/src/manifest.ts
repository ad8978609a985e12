/** JSON-lines manifest: one {"id", "path", "category"} object per line. */

import { readFileSync } from 'node:fs';

export interface ManifestEntry {
  id: string;
  path: string;
  category?: string;
}

export function loadManifest(path: string): ManifestEntry[] {
  const entries: ManifestEntry[] = [];
  const seen = new Set<string>();
  const lines = readFileSync(path, 'utf-8').split('\n');
  lines.forEach((line, index) => {
    if (!line.trim()) return;
    let obj: unknown;
    try {
      obj = JSON.parse(line);
    } catch (err) {
      throw new Error(`${path}:${index + 1}: invalid JSON (${(err as Error).message})`);
    }
    const entry = obj as ManifestEntry;
    if (typeof entry.id !== 'string' || typeof entry.path !== 'string') {
      throw new Error(`${path}:${index + 1}: entry needs string id and path`);
    }
    if (seen.has(entry.id)) {
      throw new Error(`${path}:${index + 1}: duplicate id ${entry.id}`);
    }
    seen.add(entry.id);
    entries.push(entry);
  });
  return entries;
}
