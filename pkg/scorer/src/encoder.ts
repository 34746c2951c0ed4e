/** Hash-bucket token encoder.
 *
 * Every token embeds through a fixed-size bucket table; a sequence encodes
 * to per-position hidden vectors plus a classification vector that mixes
 * the whole sequence (the [CLS] embedding with a mean-pooled residual), so
 * a linear head over it sees bag-of-sequence information. Any encoder
 * exposing this shape (hidden states + a classification vector) can sit
 * behind the scorer; this one keeps training dependency-free and fast.
 */

import { Rng } from "./rng";

export interface EncoderConfig {
  buckets: number;
  dim: number;
  seed: number;
}

export const DEFAULT_ENCODER: EncoderConfig = { buckets: 2048, dim: 16, seed: 0 };

export interface EncoderOutput {
  /** One hidden vector per input position (same length as the input). */
  hidden: Float64Array[];
  /** Classification vector: the first position's hidden vector. */
  cls: Float64Array;
}

export function tokenBucket(token: string, buckets: number): number {
  let h = 5381;
  for (let i = 0; i < token.length; i++) {
    h = ((h << 5) + h + token.charCodeAt(i)) | 0;
  }
  return (h >>> 0) % buckets;
}

export class HashEmbeddingEncoder {
  readonly config: EncoderConfig;
  embeddings: Float64Array;

  constructor(config: EncoderConfig = DEFAULT_ENCODER, embeddings?: Float64Array) {
    this.config = config;
    if (embeddings) {
      this.embeddings = embeddings;
    } else {
      const rng = new Rng(config.seed * 2654435761 + 17);
      this.embeddings = new Float64Array(config.buckets * config.dim);
      for (let i = 0; i < this.embeddings.length; i++) {
        this.embeddings[i] = 0.1 * rng.gauss();
      }
    }
  }

  bucketsOf(tokens: readonly string[]): number[] {
    return tokens.map((t) => tokenBucket(t, this.config.buckets));
  }

  private vector(bucket: number): Float64Array {
    const { dim } = this.config;
    return this.embeddings.subarray(bucket * dim, (bucket + 1) * dim);
  }

  encode(tokens: readonly string[]): EncoderOutput {
    if (tokens.length === 0) throw new Error("cannot encode an empty sequence");
    const { dim } = this.config;
    const ids = this.bucketsOf(tokens);
    const raw = ids.map((b) => this.vector(b));
    // one uniform-attention mixing step: every position sees the sequence mean
    const mean = new Float64Array(dim);
    for (const r of raw) {
      for (let d = 0; d < dim; d++) mean[d] += r[d] / raw.length;
    }
    const hidden = raw.map((r) => {
      const h = new Float64Array(dim);
      for (let d = 0; d < dim; d++) h[d] = r[d] + mean[d];
      return h;
    });
    return { hidden, cls: hidden[0] };
  }
}
