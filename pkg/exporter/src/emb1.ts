/**
 * EMB1 binary embedding format (little-endian throughout):
 *
 *   magic  "EMB1"
 *   u32    dim
 *   u64    record count
 *   per record: u16 id byte length, UTF-8 id bytes, dim x float32
 *
 * The writer is the product side; the reader exists for round-trip
 * self-tests.
 */

export interface Emb1Record {
  id: string;
  values: Float32Array;
}

const MAGIC = Buffer.from('EMB1', 'ascii');

export function encodeEmb1(dim: number, records: Emb1Record[]): Buffer {
  const seen = new Set<string>();
  const chunks: Buffer[] = [];
  const header = Buffer.alloc(16);
  MAGIC.copy(header, 0);
  header.writeUInt32LE(dim, 4);
  header.writeBigUInt64LE(BigInt(records.length), 8);
  chunks.push(header);
  for (const record of records) {
    if (record.values.length !== dim) {
      throw new Error(`record ${record.id}: dim ${record.values.length}, expected ${dim}`);
    }
    if (seen.has(record.id)) {
      throw new Error(`duplicate id ${record.id}`);
    }
    seen.add(record.id);
    const idBytes = Buffer.from(record.id, 'utf-8');
    if (idBytes.length > 0xffff) {
      throw new Error(`id too long: ${record.id.slice(0, 32)}...`);
    }
    const idLen = Buffer.alloc(2);
    idLen.writeUInt16LE(idBytes.length, 0);
    const values = Buffer.alloc(4 * dim);
    for (let i = 0; i < dim; i++) {
      values.writeFloatLE(record.values[i], 4 * i);
    }
    chunks.push(idLen, idBytes, values);
  }
  return Buffer.concat(chunks);
}

export function decodeEmb1(data: Buffer): { dim: number; records: Emb1Record[] } {
  if (data.length < 16 || !data.subarray(0, 4).equals(MAGIC)) {
    throw new Error('not an EMB1 file');
  }
  const dim = data.readUInt32LE(4);
  const count = Number(data.readBigUInt64LE(8));
  const records: Emb1Record[] = [];
  let pos = 16;
  for (let i = 0; i < count; i++) {
    if (pos + 2 > data.length) throw new Error(`record ${i}: truncated header`);
    const idLen = data.readUInt16LE(pos);
    pos += 2;
    if (pos + idLen + 4 * dim > data.length) throw new Error(`record ${i}: truncated body`);
    const id = data.subarray(pos, pos + idLen).toString('utf-8');
    pos += idLen;
    const values = new Float32Array(dim);
    for (let k = 0; k < dim; k++) {
      values[k] = data.readFloatLE(pos + 4 * k);
    }
    pos += 4 * dim;
    records.push({ id, values });
  }
  return { dim, records };
}
