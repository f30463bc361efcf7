import { describe, expect, it } from "vitest";

import { loadModel, ModelLoadError } from "../src/model.js";

describe("hash model", () => {
  it("reports its dimension from the name", () => {
    expect(loadModel("hash-48").dim).toBe(48);
  });

  it("is deterministic per token", () => {
    const model = loadModel("hash-16");
    const a = model.embed("alpha beta alpha", 10);
    const b = model.embed("alpha beta alpha", 10);
    expect(a.vectors.length).toBe(3);
    for (let i = 0; i < 3; i++) {
      expect(Array.from(a.vectors[i])).toEqual(Array.from(b.vectors[i]));
    }
    // identical tokens embed identically regardless of position
    expect(Array.from(a.vectors[0])).toEqual(Array.from(a.vectors[2]));
    expect(Array.from(a.vectors[0])).not.toEqual(Array.from(a.vectors[1]));
  });

  it("stays within [-1, 1)", () => {
    const { vectors } = loadModel("hash-64").embed("range check tokens", 10);
    for (const v of vectors) {
      for (const x of v) {
        expect(x).toBeGreaterThanOrEqual(-1);
        expect(x).toBeLessThan(1);
      }
    }
  });

  it("truncates past max-len and reports it", () => {
    const model = loadModel("hash-8");
    const { vectors, truncated } = model.embed("a b c d e", 3);
    expect(vectors.length).toBe(3);
    expect(truncated).toBe(true);
  });

  it("embeds empty text as one placeholder token", () => {
    const { vectors, truncated } = loadModel("hash-8").embed("", 3);
    expect(vectors.length).toBe(1);
    expect(truncated).toBe(false);
  });
});

describe("model loading", () => {
  it("fails for transformer names that are not local", () => {
    expect(() => loadModel("bert-large-cased")).toThrow(ModelLoadError);
  });

  it("rejects out-of-range hash dimensions", () => {
    expect(() => loadModel("hash-0")).toThrow(ModelLoadError);
  });
});
