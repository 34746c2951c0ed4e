import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { describe, expect, it } from "vitest";

import { PairExample } from "../src/data";
import { buildPairInput } from "../src/tokenizer";
import { DEFAULT_TRAIN, loadCheckpoint, recallAt1, saveCheckpoint, trainScorer } from "../src/train";
import { Rng } from "../src/rng";

const FILLER = (
  "balance liquidity statement operations period segment footnote amortization " +
  "expense allowance deferred accrued consolidated interim disclosure"
).split(" ");

/** Separable relevance task: the positive candidate carries a marker token. */
function separableDataset(nQuestions: number, seed: number): PairExample[] {
  const rng = new Rng(seed);
  const out: PairExample[] = [];
  for (let qi = 0; qi < nQuestions; qi++) {
    const question = `what was metric${qi} in 20${10 + rng.int(10)}?`;
    const positiveAt = rng.int(8);
    for (let ci = 0; ci < 8; ci++) {
      const noise = Array.from({ length: 6 }, () => rng.pick(FILLER)).join(" ");
      const positive = ci === positiveAt;
      const text = positive
        ? `keyfact metric${qi} reported for the period`
        : `${noise} item ${ci}`;
      out.push({
        q_id: `q${qi}`,
        candidate_id: `q${qi}-c${ci}`,
        tokens: buildPairInput(question, text),
        label: positive ? 1 : 0,
      });
    }
  }
  return out;
}

describe("training on a synthetic separable set", () => {
  const train = separableDataset(40, 3);
  const held = separableDataset(10, 104729); // disjoint questions

  it("reaches held-out recall@1 >= 0.95 within 2 epochs", () => {
    const { model, log } = trainScorer(train, DEFAULT_TRAIN); // 2 epochs
    expect(log.length).toBeGreaterThan(0);
    expect(log.every((entry) => Number.isFinite(entry.loss))).toBe(true);
    const recall = recallAt1(model, held);
    console.log(`held-out recall@1 after 2 epochs: ${recall.toFixed(3)}`);
    expect(recall).toBeGreaterThanOrEqual(0.95);
  });

  it("converges with and without the DSC term (direction logged, no threshold)", () => {
    const withDsc = trainScorer(train, { ...DEFAULT_TRAIN, loss: { lambda: 0.5, dscEpsilon: 1 } });
    const withoutDsc = trainScorer(train, { ...DEFAULT_TRAIN, loss: { lambda: 0, dscEpsilon: 1 } });
    const recallWith = recallAt1(withDsc.model, held);
    const recallWithout = recallAt1(withoutDsc.model, held);
    console.log(
      `recall@1 with DSC (lambda=0.5): ${recallWith.toFixed(3)} | ` +
        `without (lambda=0): ${recallWithout.toFixed(3)}`,
    );
    expect(recallWith).toBeGreaterThanOrEqual(0.9);
    expect(recallWithout).toBeGreaterThanOrEqual(0.9);
  });

  it("aborts on a dataset without positives", () => {
    const negatives = train.filter((e) => e.label === 0).slice(0, 50);
    expect(() => trainScorer(negatives)).toThrow(/no positive/);
  });

  it("checkpoints round-trip through the documented layout", () => {
    const dir = fs.mkdtempSync(path.join(os.tmpdir(), "ttqa-scorer-"));
    const result = trainScorer(train, { ...DEFAULT_TRAIN, epochs: 1 });
    const file = saveCheckpoint(dir, "text", result);
    expect(file).toBe(path.join(dir, "text.json"));
    expect(fs.existsSync(path.join(dir, "text_log.jsonl"))).toBe(true);
    const reloaded = loadCheckpoint(dir, "text");
    for (const example of held.slice(0, 20)) {
      expect(reloaded.probability(example.tokens)).toBe(result.model.probability(example.tokens));
    }
  });

  it("training is deterministic for a fixed seed", () => {
    const a = trainScorer(train, { ...DEFAULT_TRAIN, epochs: 1, seed: 9 });
    const b = trainScorer(train, { ...DEFAULT_TRAIN, epochs: 1, seed: 9 });
    expect(a.log).toEqual(b.log);
    const probe = held[0].tokens;
    expect(a.model.probability(probe)).toBe(b.model.probability(probe));
  });
});
