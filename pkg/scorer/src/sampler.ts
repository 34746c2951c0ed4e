/** Resampling batch sampler.
 *
 * Relevance labels are heavily imbalanced (few candidates per question are
 * evidence), so batches draw each slot from the positive pool with the
 * target probability and from the negative pool otherwise.
 */

import { Rng } from "./rng";

export class ResamplingSampler {
  private positives: number[] = [];
  private negatives: number[] = [];
  private rng: Rng;
  readonly positiveFraction: number;

  constructor(labels: readonly number[], positiveFraction = 0.5, seed = 0) {
    if (!(positiveFraction > 0 && positiveFraction < 1)) {
      throw new Error(`positive fraction must lie in (0,1), got ${positiveFraction}`);
    }
    labels.forEach((y, i) => (y === 1 ? this.positives : this.negatives).push(i));
    if (this.positives.length === 0) {
      throw new Error("no positive examples; cannot train a relevance scorer");
    }
    if (this.negatives.length === 0) {
      throw new Error("no negative examples; cannot train a relevance scorer");
    }
    this.positiveFraction = positiveFraction;
    this.rng = new Rng(seed * 1000003 + 101);
  }

  nextBatch(size: number): number[] {
    const batch: number[] = [];
    for (let i = 0; i < size; i++) {
      const pool = this.rng.next() < this.positiveFraction ? this.positives : this.negatives;
      batch.push(this.rng.pick(pool));
    }
    return batch;
  }
}
