/**
 * Binary embedding file format shared with the clustering engine
 * (see docs/FORMATS.md at the repository root). Little-endian
 * throughout; float32 payloads.
 */

const MAGIC = 0x43454453; // "SDEC" read as LE u32
const VERSION = 1;
export const KIND_FLAT = 0;
export const KIND_SEQUENCES = 1;
const HEADER_BYTES = 15;

export class FormatError extends Error {}

function header(kind: number, n: number, dim: number): Buffer {
  const buf = Buffer.alloc(HEADER_BYTES);
  buf.write("SDEC", 0, "ascii");
  buf.writeUInt16LE(VERSION, 4);
  buf.writeUInt8(kind, 6);
  buf.writeUInt32LE(n, 7);
  buf.writeUInt32LE(dim, 11);
  return buf;
}

function floatsToBuffer(values: Float32Array): Buffer {
  const buf = Buffer.alloc(values.length * 4);
  for (let i = 0; i < values.length; i++) {
    buf.writeFloatLE(values[i], i * 4);
  }
  return buf;
}

/** Serialize token sequences (kind 1). Every sequence needs >= 1 token. */
export function encodeSequences(sequences: Float32Array[][], dim: number): Buffer {
  if (sequences.length === 0) {
    throw new FormatError("cannot encode an empty sequence list");
  }
  const chunks: Buffer[] = [header(KIND_SEQUENCES, sequences.length, dim)];
  for (const tokens of sequences) {
    if (tokens.length < 1) {
      throw new FormatError("sequences must contain at least one token");
    }
    const len = Buffer.alloc(4);
    len.writeUInt32LE(tokens.length, 0);
    chunks.push(len);
    for (const vector of tokens) {
      if (vector.length !== dim) {
        throw new FormatError(`token dimension ${vector.length} != ${dim}`);
      }
      chunks.push(floatsToBuffer(vector));
    }
  }
  return Buffer.concat(chunks);
}

function readHeader(buf: Buffer): { kind: number; n: number; dim: number } {
  if (buf.length < HEADER_BYTES) {
    throw new FormatError("file shorter than the header");
  }
  if (buf.readUInt32LE(0) !== MAGIC) {
    throw new FormatError(`bad magic ${buf.subarray(0, 4).toString("ascii")}`);
  }
  const version = buf.readUInt16LE(4);
  if (version !== VERSION) {
    throw new FormatError(`unsupported version ${version}`);
  }
  return { kind: buf.readUInt8(6), n: buf.readUInt32LE(7), dim: buf.readUInt32LE(11) };
}

/** Parse a flat (kind 0) vector file into row-major Float64 rows. */
export function decodeFlat(buf: Buffer): { rows: number; dim: number; data: Float64Array } {
  const { kind, n, dim } = readHeader(buf);
  if (kind !== KIND_FLAT) {
    throw new FormatError(`expected kind 0, found ${kind}`);
  }
  const expected = HEADER_BYTES + 4 * n * dim;
  if (buf.length !== expected) {
    throw new FormatError(`payload is ${buf.length - HEADER_BYTES} bytes, expected ${expected - HEADER_BYTES}`);
  }
  const data = new Float64Array(n * dim);
  for (let i = 0; i < n * dim; i++) {
    data[i] = buf.readFloatLE(HEADER_BYTES + 4 * i);
  }
  return { rows: n, dim, data };
}

/** Parse a sequence (kind 1) file back into per-text token vectors. */
export function decodeSequences(buf: Buffer): Float32Array[][] {
  const { kind, n, dim } = readHeader(buf);
  if (kind !== KIND_SEQUENCES) {
    throw new FormatError(`expected kind 1, found ${kind}`);
  }
  const sequences: Float32Array[][] = [];
  let offset = HEADER_BYTES;
  for (let s = 0; s < n; s++) {
    if (offset + 4 > buf.length) {
      throw new FormatError("truncated sequence header");
    }
    const length = buf.readUInt32LE(offset);
    offset += 4;
    if (length < 1 || offset + 4 * length * dim > buf.length) {
      throw new FormatError("truncated sequence payload");
    }
    const tokens: Float32Array[] = [];
    for (let t = 0; t < length; t++) {
      const vec = new Float32Array(dim);
      for (let i = 0; i < dim; i++) {
        vec[i] = buf.readFloatLE(offset);
        offset += 4;
      }
      tokens.push(vec);
    }
    sequences.push(tokens);
  }
  if (offset !== buf.length) {
    throw new FormatError(`${buf.length - offset} trailing bytes`);
  }
  return sequences;
}
