import assert from 'node:assert/strict';
import { test } from 'node:test';

import { decodeImage, decodePng, decodeRaw } from '../src/image.js';
import { encodePng, encodeRaw, patternPixels } from './helpers.js';

test('png decode roundtrip (gray and rgb)', () => {
  for (const channels of [1, 3] as const) {
    const pixels = patternPixels(9, 7, channels, 1);
    const img = decodePng(encodePng(9, 7, channels, pixels));
    assert.equal(img.width, 9);
    assert.equal(img.height, 7);
    assert.equal(img.channels, channels);
    assert.deepEqual(Array.from(img.pixels), Array.from(pixels));
  }
});

test('raw decode roundtrip', () => {
  const pixels = patternPixels(5, 4, 3, 2);
  const img = decodeRaw(encodeRaw(5, 4, 3, pixels));
  assert.deepEqual(Array.from(img.pixels), Array.from(pixels));
});

test('decodeImage dispatches on magic', () => {
  const pixels = patternPixels(4, 4, 1, 3);
  assert.equal(decodeImage(encodePng(4, 4, 1, pixels)).channels, 1);
  assert.equal(decodeImage(encodeRaw(4, 4, 1, pixels)).channels, 1);
  assert.throws(() => decodeImage(Buffer.from('garbage')));
});
