/**
 * Minimal image decoding for the exporter: 8-bit non-interlaced PNG
 * (grayscale / RGB, all five scanline filters) and the RAW1 planar
 * format. Pixels come back as a flat row-major uint8 array.
 */

import { inflateSync } from 'node:zlib';

export interface DecodedImage {
  width: number;
  height: number;
  channels: number;
  pixels: Uint8Array; // row-major, length = width * height * channels
}

const PNG_SIGNATURE = Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]);
const RAW_MAGIC = Buffer.from('RAW1', 'ascii');

function paeth(a: number, b: number, c: number): number {
  const p = a + b - c;
  const pa = Math.abs(p - a);
  const pb = Math.abs(p - b);
  const pc = Math.abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  return pb <= pc ? b : c;
}

export function decodePng(data: Buffer): DecodedImage {
  if (!data.subarray(0, 8).equals(PNG_SIGNATURE)) {
    throw new Error('not a PNG file');
  }
  let pos = 8;
  let width = 0;
  let height = 0;
  let channels = 0;
  const idat: Buffer[] = [];
  while (pos < data.length) {
    const length = data.readUInt32BE(pos);
    const tag = data.subarray(pos + 4, pos + 8).toString('ascii');
    const payload = data.subarray(pos + 8, pos + 8 + length);
    pos += 12 + length;
    if (tag === 'IHDR') {
      width = payload.readUInt32BE(0);
      height = payload.readUInt32BE(4);
      const depth = payload.readUInt8(8);
      const color = payload.readUInt8(9);
      const interlace = payload.readUInt8(12);
      if (depth !== 8) throw new Error(`unsupported bit depth ${depth}`);
      if (interlace !== 0) throw new Error('interlaced PNG not supported');
      if (color === 0) channels = 1;
      else if (color === 2) channels = 3;
      else throw new Error(`unsupported color type ${color}`);
    } else if (tag === 'IDAT') {
      idat.push(payload);
    } else if (tag === 'IEND') {
      break;
    }
  }
  if (!width || !height) throw new Error('PNG missing IHDR');
  const raw = inflateSync(Buffer.concat(idat));
  const stride = width * channels;
  const pixels = new Uint8Array(height * stride);
  const prev = new Uint8Array(stride);
  let offset = 0;
  for (let y = 0; y < height; y++) {
    const filter = raw[offset++];
    const line = raw.subarray(offset, offset + stride);
    offset += stride;
    const cur = pixels.subarray(y * stride, (y + 1) * stride);
    for (let x = 0; x < stride; x++) {
      const rawal = line[x];
      const left = x >= channels ? cur[x - channels] : 0;
      const up = prev[x];
      const upLeft = x >= channels ? prev[x - channels] : 0;
      let value: number;
      switch (filter) {
        case 0: value = rawal; break;
        case 1: value = rawal + left; break;
        case 2: value = rawal + up; break;
        case 3: value = rawal + ((left + up) >> 1); break;
        case 4: value = rawal + paeth(left, up, upLeft); break;
        default: throw new Error(`unknown PNG filter ${filter}`);
      }
      cur[x] = value & 0xff;
    }
    prev.set(cur);
  }
  return { width, height, channels, pixels };
}

export function decodeRaw(data: Buffer): DecodedImage {
  if (!data.subarray(0, 4).equals(RAW_MAGIC)) {
    throw new Error('not a RAW1 file');
  }
  const width = data.readUInt32LE(4);
  const height = data.readUInt32LE(8);
  const channels = data.readUInt8(12);
  const need = width * height * channels;
  const body = data.subarray(13);
  if (body.length < need) throw new Error('RAW1 truncated');
  // planar on disk -> interleaved row-major in memory
  const pixels = new Uint8Array(need);
  const plane = width * height;
  for (let c = 0; c < channels; c++) {
    for (let i = 0; i < plane; i++) {
      pixels[i * channels + c] = body[c * plane + i];
    }
  }
  return { width, height, channels, pixels };
}

export function decodeImage(data: Buffer): DecodedImage {
  if (data.subarray(0, 8).equals(PNG_SIGNATURE)) return decodePng(data);
  if (data.subarray(0, 4).equals(RAW_MAGIC)) return decodeRaw(data);
  throw new Error('neither PNG nor RAW1');
}
