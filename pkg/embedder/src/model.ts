/**
 * Token-embedding backends. The always-available `hash-<dim>` model maps
 * every token to a deterministic pseudo-random vector derived from the
 * token text alone, so runs are reproducible anywhere with no model
 * download. Named transformer models must exist locally; otherwise
 * loading fails with ModelLoadError.
 */

import { existsSync } from "node:fs";

export class ModelLoadError extends Error {}

export interface TokenEmbedder {
  readonly name: string;
  readonly dim: number;
  /** Embed one already-preprocessed text; tokens beyond maxLen are cut. */
  embed(text: string, maxLen: number): { vectors: Float32Array[]; truncated: boolean };
}

const MASK64 = 0xffffffffffffffffn;

function fnv1a64(text: string): bigint {
  let h = 0xcbf29ce484222325n;
  const bytes = Buffer.from(text, "utf-8");
  for (const b of bytes) {
    h = ((h ^ BigInt(b)) * 0x100000001b3n) & MASK64;
  }
  return h;
}

function mix64(x: bigint): bigint {
  x = ((x ^ (x >> 30n)) * 0xbf58476d1ce4e5b9n) & MASK64;
  x = ((x ^ (x >> 27n)) * 0x94d049bb133111ebn) & MASK64;
  return x ^ (x >> 31n);
}

/** Deterministic feature vector for one token: unit-scaled mixed words. */
function hashVector(token: string, dim: number): Float32Array {
  const seed = fnv1a64(token);
  const out = new Float32Array(dim);
  for (let i = 0; i < dim; i++) {
    const word = mix64((seed + BigInt(i + 1) * 0x9e3779b97f4a7c15n) & MASK64);
    // top 53 bits -> [0, 1) -> [-1, 1)
    out[i] = Number(word >> 11n) * 2 ** -52 - 1.0;
  }
  return out;
}

class HashEmbedder implements TokenEmbedder {
  constructor(readonly name: string, readonly dim: number) {}

  embed(text: string, maxLen: number): { vectors: Float32Array[]; truncated: boolean } {
    const tokens = text.split(/\s+/).filter((t) => t.length > 0);
    const truncated = tokens.length > maxLen;
    const kept = truncated ? tokens.slice(0, maxLen) : tokens;
    // Empty text still yields one token so the sequence format stays valid.
    const effective = kept.length > 0 ? kept : ["[EMPTY]"];
    return { vectors: effective.map((t) => hashVector(t, this.dim)), truncated };
  }
}

const HASH_NAME = /^hash-(\d+)$/;

export function loadModel(name: string): TokenEmbedder {
  const hash = HASH_NAME.exec(name);
  if (hash) {
    const dim = parseInt(hash[1], 10);
    if (dim < 1 || dim > 16384) {
      throw new ModelLoadError(`hash model dimension out of range: ${name}`);
    }
    return new HashEmbedder(name, dim);
  }
  // Transformer checkpoints are resolved as local directories only.
  if (existsSync(name)) {
    throw new ModelLoadError(
      `local transformer checkpoints are not supported by this build: ${name}`,
    );
  }
  throw new ModelLoadError(
    `model '${name}' is not available locally (use hash-<dim> for the built-in embedder)`,
  );
}
