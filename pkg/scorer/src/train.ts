/** Training loop: resampled batches, per-step loss log, one model per target. */

import * as fs from "node:fs";
import * as path from "node:path";

import { PairExample, Target } from "./data";
import { DEFAULT_ENCODER, EncoderConfig } from "./encoder";
import { DEFAULT_LOSS, LossConfig } from "./loss";
import { DEFAULT_OPTIM, OptimConfig, PairScorer } from "./model";
import { ResamplingSampler } from "./sampler";

export interface TrainConfig {
  encoder: EncoderConfig;
  loss: LossConfig;
  optim: OptimConfig;
  batchSize: number;
  epochs: number;
  positiveFraction: number;
  seed: number;
}

export const DEFAULT_TRAIN: TrainConfig = {
  encoder: DEFAULT_ENCODER,
  loss: DEFAULT_LOSS,
  optim: DEFAULT_OPTIM,
  batchSize: 32,
  epochs: 2,
  positiveFraction: 0.5,
  seed: 0,
};

export interface StepLog {
  step: number;
  loss: number;
}

export interface TrainResult {
  model: PairScorer;
  log: StepLog[];
}

export function trainScorer(
  dataset: readonly PairExample[],
  cfg: TrainConfig = DEFAULT_TRAIN,
): TrainResult {
  if (dataset.length === 0) throw new Error("empty training dataset");
  const sampler = new ResamplingSampler(
    dataset.map((e) => e.label),
    cfg.positiveFraction,
    cfg.seed,
  );
  const model = new PairScorer({ ...cfg.encoder, seed: cfg.seed });
  const stepsPerEpoch = Math.max(1, Math.ceil(dataset.length / cfg.batchSize));
  const log: StepLog[] = [];
  let step = 0;
  for (let epoch = 0; epoch < cfg.epochs; epoch++) {
    for (let i = 0; i < stepsPerEpoch; i++) {
      const batch = sampler.nextBatch(cfg.batchSize).map((idx) => dataset[idx]);
      const loss = model.trainBatch(batch, cfg.loss, cfg.optim);
      step += 1;
      log.push({ step, loss });
    }
  }
  return { model, log };
}

/** Checkpoint directory layout: <dir>/<target>.json + <dir>/<target>_log.jsonl */
export function saveCheckpoint(dir: string, target: Target, result: TrainResult): string {
  const file = path.join(dir, `${target}.json`);
  result.model.save(file);
  fs.writeFileSync(
    path.join(dir, `${target}_log.jsonl`),
    result.log.map((entry) => JSON.stringify(entry)).join("\n") + "\n",
  );
  return file;
}

export function loadCheckpoint(dir: string, target: Target): PairScorer {
  return PairScorer.load(path.join(dir, `${target}.json`));
}

/** Fraction of questions whose top-1 ranked candidate is a gold positive. */
export function recallAt1(model: PairScorer, dataset: readonly PairExample[]): number {
  const byQuestion = new Map<string, PairExample[]>();
  for (const example of dataset) {
    const group = byQuestion.get(example.q_id) ?? [];
    group.push(example);
    byQuestion.set(example.q_id, group);
  }
  let hits = 0;
  let total = 0;
  for (const group of byQuestion.values()) {
    if (!group.some((e) => e.label === 1)) continue;
    total += 1;
    let best = group[0];
    let bestScore = -Infinity;
    for (const example of group) {
      const p = model.probability(example.tokens);
      if (p > bestScore || (p === bestScore && example.candidate_id < best.candidate_id)) {
        best = example;
        bestScore = p;
      }
    }
    if (best.label === 1) hits += 1;
  }
  if (total === 0) throw new Error("no questions with gold positives to evaluate");
  return hits / total;
}
