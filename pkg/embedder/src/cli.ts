#!/usr/bin/env node
/**
 * embed --in texts.txt --model <name> --max-len 128 --out tokens.sdec
 *
 * Reads one text per input line, preprocesses it (URL removal,
 * contraction expansion, charset filtering, stop-token removal,
 * lemmatization), embeds tokens with the selected model, and writes the
 * kind-1 binary embedding file plus a .json sidecar.
 *
 * Exit codes: 0 success, 2 usage error, 3 missing input file,
 * 4 model load failure.
 */

import { existsSync, readFileSync } from "node:fs";
import process from "node:process";

import { embedCorpus } from "./corpus.js";
import { ModelLoadError } from "./model.js";
import { defaultSpec } from "./preprocess.js";

const USAGE =
  "usage: sdec-embed --in texts.txt [--model hash-768] [--max-len 128] " +
  "--out tokens.sdec [--stop-tokens file] [--raw]";

interface Args {
  input: string;
  output: string;
  model: string;
  maxLen: number;
  stopTokensFile?: string;
  raw: boolean;
}

function parseArgs(argv: string[]): Args {
  const args: Partial<Args> = { model: "bert-large-cased", maxLen: 128, raw: false };
  for (let i = 0; i < argv.length; i++) {
    const flag = argv[i];
    const next = () => {
      i += 1;
      if (i >= argv.length) {
        throw new UsageError(`missing value for ${flag}`);
      }
      return argv[i];
    };
    switch (flag) {
      case "--in":
        args.input = next();
        break;
      case "--out":
        args.output = next();
        break;
      case "--model":
        args.model = next();
        break;
      case "--max-len": {
        const value = parseInt(next(), 10);
        if (!Number.isFinite(value) || value < 1) {
          throw new UsageError("--max-len must be a positive integer");
        }
        args.maxLen = value;
        break;
      }
      case "--stop-tokens":
        args.stopTokensFile = next();
        break;
      case "--raw":
        args.raw = true;
        break;
      case "--help":
      case "-h":
        console.log(USAGE);
        process.exit(0);
        break;
      default:
        throw new UsageError(`unknown flag ${flag}`);
    }
  }
  if (!args.input || !args.output) {
    throw new UsageError("--in and --out are required");
  }
  return args as Args;
}

class UsageError extends Error {}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    if (err instanceof UsageError) {
      console.error(`error: ${err.message}`);
      console.error(USAGE);
      return 2;
    }
    throw err;
  }
  if (!existsSync(args.input)) {
    console.error(`error: missing input file ${args.input}`);
    return 3;
  }
  const spec = defaultSpec();
  if (args.stopTokensFile) {
    if (!existsSync(args.stopTokensFile)) {
      console.error(`error: missing stop-token file ${args.stopTokensFile}`);
      return 3;
    }
    for (const line of readFileSync(args.stopTokensFile, "utf-8").split("\n")) {
      const token = line.trim().toLowerCase();
      if (token.length > 0) {
        spec.stopTokens.add(token);
      }
    }
  }
  const texts = readFileSync(args.input, "utf-8")
    .split("\n")
    .filter((line) => line.trim().length > 0);
  if (texts.length === 0) {
    console.error("error: input file contains no texts");
    return 2;
  }
  try {
    const result = embedCorpus(
      texts,
      { modelName: args.model, maxLen: args.maxLen, spec, skipPreprocess: args.raw },
      args.output,
    );
    if (result.truncated > 0) {
      console.error(`warning: ${result.truncated} text(s) truncated to ${args.maxLen} tokens`);
    }
    if (result.emptyTexts > 0) {
      console.error(`warning: ${result.emptyTexts} text(s) became empty after preprocessing`);
    }
    console.log(JSON.stringify({ texts: result.texts, dim: result.dim, out: args.output }));
    return 0;
  } catch (err) {
    if (err instanceof ModelLoadError) {
      console.error(`error: ${err.message}`);
      return 4;
    }
    throw err;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url.endsWith(process.argv[1].split("/").pop()!);
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
