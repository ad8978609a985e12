import assert from 'node:assert/strict';
import { spawn } from 'node:child_process';
import { once } from 'node:events';
import { writeFileSync } from 'node:fs';
import { join } from 'node:path';
import { createInterface } from 'node:readline';
import { test } from 'node:test';

import { encodePng, patternPixels, tempDir } from './helpers.js';

const CLI = new URL('../src/cli.js', import.meta.url).pathname;

interface Response {
  id: string | null;
  dim?: number;
  values?: number[];
  error?: string;
}

async function talk(requests: object[], expected: number): Promise<Response[]> {
  const proc = spawn(process.execPath, [CLI, 'serve', '--model', 'clip', '--backend', 'test'], {
    stdio: ['pipe', 'pipe', 'inherit'],
  });
  const responses: Response[] = [];
  const rl = createInterface({ input: proc.stdout });
  const done = new Promise<void>((resolve) => {
    rl.on('line', (line) => {
      responses.push(JSON.parse(line));
      if (responses.length === expected) resolve();
    });
  });
  for (const request of requests) {
    proc.stdin.write(JSON.stringify(request) + '\n');
  }
  await done;
  proc.stdin.end();
  await once(proc, 'exit');
  return responses;
}

test('serve answers 64 pipelined requests bijectively', async () => {
  const dir = tempDir('serve-');
  const requests = [];
  for (let i = 0; i < 64; i++) {
    const path = join(dir, `img-${i}.png`);
    writeFileSync(path, encodePng(12, 12, 3, patternPixels(12, 12, 3, i)));
    requests.push({ id: `req-${i.toString().padStart(3, '0')}`, path });
  }
  const responses = await talk(requests, 64);
  const ids = responses.map((r) => r.id).sort();
  assert.deepEqual(ids, requests.map((r) => r.id).sort());
  for (const response of responses) {
    assert.equal(response.dim, 768);
    assert.equal(response.values?.length, 768);
  }
});

test('serve reports errors per request and keeps going', async () => {
  const dir = tempDir('serve-err-');
  const good = join(dir, 'good.png');
  writeFileSync(good, encodePng(8, 8, 1, patternPixels(8, 8, 1, 2)));
  const responses = await talk(
    [
      { id: 'bad', path: join(dir, 'missing.png') },
      { id: 'good', path: good },
    ],
    2,
  );
  const byId = new Map(responses.map((r) => [r.id, r]));
  assert.ok(byId.get('bad')?.error);
  assert.equal(byId.get('good')?.dim, 768);
});

test('serve exits cleanly on EOF', async () => {
  const proc = spawn(process.execPath, [CLI, 'serve', '--model', 'alexnet', '--backend', 'test'], {
    stdio: ['pipe', 'pipe', 'inherit'],
  });
  proc.stdin.end();
  const [code] = (await once(proc, 'exit')) as [number];
  assert.equal(code, 0);
});
