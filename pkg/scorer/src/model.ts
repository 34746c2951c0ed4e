/** Binary pair scorer: encoder classification vector -> linear head -> p.
 *
 * Gradients are computed by hand (the head is linear and the classification
 * vector is an affine function of the touched embedding buckets) and
 * applied with sparse Adam.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { DEFAULT_ENCODER, EncoderConfig, HashEmbeddingEncoder } from "./encoder";
import { DEFAULT_LOSS, LossConfig, combinedLoss, lossGradLogit } from "./loss";
import { Rng } from "./rng";

export interface TrainExample {
  tokens: string[];
  label: 0 | 1;
}

export interface OptimConfig {
  lr: number;
  beta1: number;
  beta2: number;
  adamEps: number;
}

export const DEFAULT_OPTIM: OptimConfig = { lr: 0.02, beta1: 0.9, beta2: 0.999, adamEps: 1e-8 };

function sigmoid(z: number): number {
  return 1 / (1 + Math.exp(-z));
}

const P_CLAMP = 1e-7; // keeps probabilities inside (0,1) for the loss

export class PairScorer {
  readonly encoder: HashEmbeddingEncoder;
  w: Float64Array;
  b: number;

  private step = 0;
  private mW: Float64Array;
  private vW: Float64Array;
  private mB = 0;
  private vB = 0;
  private mE: Float64Array;
  private vE: Float64Array;

  constructor(encoderConfig: EncoderConfig = DEFAULT_ENCODER, encoder?: HashEmbeddingEncoder) {
    this.encoder = encoder ?? new HashEmbeddingEncoder(encoderConfig);
    const { dim } = this.encoder.config;
    const rng = new Rng(this.encoder.config.seed * 7919 + 3);
    this.w = new Float64Array(dim);
    for (let d = 0; d < dim; d++) this.w[d] = rng.gauss() / Math.sqrt(dim);
    this.b = 0;
    this.mW = new Float64Array(dim);
    this.vW = new Float64Array(dim);
    this.mE = new Float64Array(this.encoder.embeddings.length);
    this.vE = new Float64Array(this.encoder.embeddings.length);
  }

  /** Probability that the pair is relevant (or the question arithmetic). */
  probability(tokens: readonly string[]): number {
    const { cls } = this.encoder.encode(tokens);
    let z = this.b;
    for (let d = 0; d < cls.length; d++) z += this.w[d] * cls[d];
    const p = sigmoid(z);
    return Math.min(Math.max(p, P_CLAMP), 1 - P_CLAMP);
  }

  /** One optimizer step over a batch; returns the batch loss. */
  trainBatch(
    batch: readonly TrainExample[],
    loss: LossConfig = DEFAULT_LOSS,
    optim: OptimConfig = DEFAULT_OPTIM,
  ): number {
    const { dim } = this.encoder.config;
    const ys: number[] = [];
    const ps: number[] = [];
    const gradW = new Float64Array(dim);
    let gradB = 0;
    const gradE = new Map<number, Float64Array>();

    for (const example of batch) {
      const buckets = this.encoder.bucketsOf(example.tokens);
      const { cls } = this.encoder.encode(example.tokens);
      let z = this.b;
      for (let d = 0; d < dim; d++) z += this.w[d] * cls[d];
      const p = Math.min(Math.max(sigmoid(z), P_CLAMP), 1 - P_CLAMP);
      ys.push(example.label);
      ps.push(p);

      const g = lossGradLogit(example.label, p, loss) / batch.length;
      for (let d = 0; d < dim; d++) gradW[d] += g * cls[d];
      gradB += g;
      // cls = e[first] + mean_i e[i] -> first bucket gets weight 1 + 1/l,
      // every other position 1/l
      const l = buckets.length;
      const add = (bucket: number, scale: number) => {
        let acc = gradE.get(bucket);
        if (!acc) {
          acc = new Float64Array(dim);
          gradE.set(bucket, acc);
        }
        for (let d = 0; d < dim; d++) acc[d] += g * scale * this.w[d];
      };
      add(buckets[0], 1);
      for (const bucket of buckets) add(bucket, 1 / l);
    }

    this.step += 1;
    const { lr, beta1, beta2, adamEps } = optim;
    const bias1 = 1 - Math.pow(beta1, this.step);
    const bias2 = 1 - Math.pow(beta2, this.step);
    const adam = (value: number, grad: number, m: number, v: number): [number, number, number] => {
      const m2 = beta1 * m + (1 - beta1) * grad;
      const v2 = beta2 * v + (1 - beta2) * grad * grad;
      return [value - (lr * (m2 / bias1)) / (Math.sqrt(v2 / bias2) + adamEps), m2, v2];
    };

    for (let d = 0; d < dim; d++) {
      [this.w[d], this.mW[d], this.vW[d]] = adam(this.w[d], gradW[d], this.mW[d], this.vW[d]);
    }
    [this.b, this.mB, this.vB] = adam(this.b, gradB, this.mB, this.vB);
    for (const [bucket, grad] of gradE) {
      for (let d = 0; d < dim; d++) {
        const i = bucket * dim + d;
        [this.encoder.embeddings[i], this.mE[i], this.vE[i]] = adam(
          this.encoder.embeddings[i],
          grad[d],
          this.mE[i],
          this.vE[i],
        );
      }
    }
    return combinedLoss(ys, ps, loss);
  }

  save(file: string): void {
    fs.mkdirSync(path.dirname(file), { recursive: true });
    fs.writeFileSync(
      file,
      JSON.stringify({
        encoder: this.encoder.config,
        embeddings: Array.from(this.encoder.embeddings),
        w: Array.from(this.w),
        b: this.b,
      }),
    );
  }

  static load(file: string): PairScorer {
    const raw = JSON.parse(fs.readFileSync(file, "utf-8"));
    const encoder = new HashEmbeddingEncoder(raw.encoder, Float64Array.from(raw.embeddings));
    const model = new PairScorer(raw.encoder, encoder);
    model.w = Float64Array.from(raw.w);
    model.b = raw.b;
    return model;
  }
}
