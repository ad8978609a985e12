import assert from 'node:assert/strict';
import { test } from 'node:test';

import { decodeEmb1, encodeEmb1 } from '../src/emb1.js';

test('emb1 roundtrip is bit-exact', () => {
  const records = [
    { id: 'a', values: Float32Array.from([0.25, -1.5, 3]) },
    { id: 'id with spaces é', values: Float32Array.from([1e-7, 2e6, -0]) },
  ];
  const buf = encodeEmb1(3, records);
  const back = decodeEmb1(buf);
  assert.equal(back.dim, 3);
  assert.equal(back.records.length, 2);
  for (let i = 0; i < records.length; i++) {
    assert.equal(back.records[i].id, records[i].id);
    assert.deepEqual(Array.from(back.records[i].values), Array.from(records[i].values));
  }
});

test('emb1 empty file', () => {
  const back = decodeEmb1(encodeEmb1(768, []));
  assert.equal(back.dim, 768);
  assert.equal(back.records.length, 0);
});

test('emb1 rejects wrong dim and duplicate ids', () => {
  assert.throws(() => encodeEmb1(2, [{ id: 'a', values: Float32Array.from([1]) }]));
  assert.throws(() =>
    encodeEmb1(1, [
      { id: 'a', values: Float32Array.from([1]) },
      { id: 'a', values: Float32Array.from([2]) },
    ]),
  );
});

test('emb1 rejects bad magic', () => {
  assert.throws(() => decodeEmb1(Buffer.from('NOPE....more')));
});
