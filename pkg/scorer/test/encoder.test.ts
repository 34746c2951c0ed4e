import { describe, expect, it } from "vitest";

import { HashEmbeddingEncoder, tokenBucket } from "../src/encoder";
import { buildPairInput } from "../src/tokenizer";

describe("encoder output shape", () => {
  const encoder = new HashEmbeddingEncoder();

  it("emits one hidden vector per position, classification vector first", () => {
    const tokens = buildPairInput("what was the revenue?", "Revenue was 100 in 2019.");
    const { hidden, cls } = encoder.encode(tokens);
    expect(hidden).toHaveLength(tokens.length);
    expect(cls).toBe(hidden[0]);
  });

  it("classification vector mixes the whole sequence", () => {
    const a = encoder.encode(["[CLS]", "alpha", "[SEP]"]).cls;
    const b = encoder.encode(["[CLS]", "omega", "[SEP]"]).cls;
    expect(Array.from(a)).not.toEqual(Array.from(b));
  });

  it("bucket hashing is deterministic and in range", () => {
    expect(tokenBucket("revenue", 2048)).toBe(tokenBucket("revenue", 2048));
    for (const tok of ["a", "zz", "revenue", "2019", "[CLS]"]) {
      const bucket = tokenBucket(tok, 64);
      expect(bucket).toBeGreaterThanOrEqual(0);
      expect(bucket).toBeLessThan(64);
    }
  });

  it("rejects empty sequences", () => {
    expect(() => encoder.encode([])).toThrow(/empty/);
  });
});
