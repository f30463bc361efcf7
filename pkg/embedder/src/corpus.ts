/**
 * Corpus embedding: preprocess each text, run the token embedder, and
 * write the kind-1 binary file plus a sidecar JSON describing the run.
 */

import { createHash } from "node:crypto";
import { writeFileSync } from "node:fs";

import { loadModel } from "./model.js";
import { defaultSpec, preprocess, PreprocessSpec } from "./preprocess.js";
import { encodeSequences } from "./sdecfile.js";

export interface EmbedResult {
  texts: number;
  dim: number;
  truncated: number;
  emptyTexts: number;
}

export interface EmbedOptions {
  modelName: string;
  maxLen: number;
  spec?: PreprocessSpec;
  skipPreprocess?: boolean;
}

export function embedCorpus(texts: string[], options: EmbedOptions, outPath: string): EmbedResult {
  const model = loadModel(options.modelName);
  const spec = options.spec ?? defaultSpec();
  const sequences: Float32Array[][] = [];
  let truncated = 0;
  let emptyTexts = 0;
  const hashes: string[] = [];
  for (const text of texts) {
    hashes.push(createHash("sha256").update(text, "utf-8").digest("hex"));
    const prepared = options.skipPreprocess ? text : preprocess(text, spec);
    if (prepared.trim().length === 0) {
      emptyTexts += 1;
    }
    const { vectors, truncated: cut } = model.embed(prepared, options.maxLen);
    if (cut) {
      truncated += 1;
    }
    sequences.push(vectors);
  }
  writeFileSync(outPath, encodeSequences(sequences, model.dim));
  const sidecar = {
    model: options.modelName,
    max_len: options.maxLen,
    dim: model.dim,
    texts: texts.length,
    truncated,
    empty_texts: emptyTexts,
    text_hashes: hashes,
  };
  writeFileSync(outPath + ".json", JSON.stringify(sidecar, null, 2) + "\n");
  return { texts: texts.length, dim: model.dim, truncated, emptyTexts };
}
