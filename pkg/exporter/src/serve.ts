/**
 * Stdio encoder server: newline-delimited JSON on stdin/stdout.
 *
 * Request  {"id": string, "path": string}
 * Response {"id": string, "dim": number, "values": number[]}
 *       or {"id": string, "error": string}
 *
 * Responses are written as requests complete; a failed request never
 * stops the loop. The process exits when stdin reaches EOF.
 */

import { readFileSync } from 'node:fs';
import { createInterface } from 'node:readline';

import type { Backend } from './backends.js';
import { decodeImage } from './image.js';

export async function serveStdio(backend: Backend): Promise<void> {
  const rl = createInterface({ input: process.stdin, crlfDelay: Infinity });
  for await (const line of rl) {
    if (!line.trim()) continue;
    let id: string | null = null;
    try {
      const request = JSON.parse(line) as { id?: unknown; path?: unknown };
      if (typeof request.id !== 'string' || typeof request.path !== 'string') {
        throw new Error('request needs string id and path');
      }
      id = request.id;
      const image = decodeImage(readFileSync(request.path));
      const values = await backend.embed(image);
      process.stdout.write(
        JSON.stringify({ id, dim: backend.dim, values: Array.from(values) }) + '\n',
      );
    } catch (err) {
      process.stdout.write(
        JSON.stringify({ id, error: (err as Error).message }) + '\n',
      );
    }
  }
}
