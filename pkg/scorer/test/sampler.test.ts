import { describe, expect, it } from "vitest";

import { ResamplingSampler } from "../src/sampler";

describe("resampling sampler", () => {
  it("hits the target positive rate 0.5 within 0.05 over 100 batches", () => {
    // 5% positives in the raw data
    const labels = Array.from({ length: 2000 }, (_, i) => (i % 20 === 0 ? 1 : 0));
    const sampler = new ResamplingSampler(labels, 0.5, 7);
    let positives = 0;
    let total = 0;
    for (let b = 0; b < 100; b++) {
      for (const idx of sampler.nextBatch(32)) {
        positives += labels[idx];
        total += 1;
      }
    }
    const rate = positives / total;
    expect(Math.abs(rate - 0.5)).toBeLessThanOrEqual(0.05);
  });

  it("aborts when there are no positives", () => {
    expect(() => new ResamplingSampler([0, 0, 0], 0.5, 0)).toThrow(/no positive/);
  });

  it("is deterministic for a fixed seed", () => {
    const labels = [1, 0, 0, 1, 0, 0, 0, 0];
    const a = new ResamplingSampler(labels, 0.5, 3).nextBatch(16);
    const b = new ResamplingSampler(labels, 0.5, 3).nextBatch(16);
    expect(a).toEqual(b);
  });
});
