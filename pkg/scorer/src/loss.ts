/** Training loss: cross-entropy plus a weighted self-adjusting Dice term.
 *
 * The Dice term for one example is
 *   DSC_i = 1 - (2 * (1-p) * p * y + eps) / ((1-p) * p + y + eps)
 * which discounts already-confident positives and directly targets the
 * F-score trade-off the retriever is evaluated on; the combined loss is
 * mean CE + lambda * mean DSC.
 */

export interface LossConfig {
  lambda: number; // DSC weight, >= 0
  dscEpsilon: number; // smoothing, > 0
}

export const DEFAULT_LOSS: LossConfig = { lambda: 0.5, dscEpsilon: 1.0 };

function checkInputs(y: readonly number[], p: readonly number[]): void {
  if (y.length !== p.length) {
    throw new Error(`label/probability length mismatch: ${y.length} vs ${p.length}`);
  }
  if (y.length === 0) throw new Error("empty batch");
  for (let i = 0; i < y.length; i++) {
    if (y[i] !== 0 && y[i] !== 1) throw new Error(`label must be 0 or 1, got ${y[i]}`);
    if (!(p[i] > 0 && p[i] < 1)) throw new Error(`probability must lie in (0,1), got ${p[i]}`);
  }
}

export function crossEntropy(y: readonly number[], p: readonly number[]): number {
  checkInputs(y, p);
  let total = 0;
  for (let i = 0; i < y.length; i++) {
    total += -(y[i] * Math.log(p[i]) + (1 - y[i]) * Math.log(1 - p[i]));
  }
  return total / y.length;
}

/** Per-example self-adjusting Dice term. */
export function dscTerm(y: number, p: number, eps: number): number {
  const u = (1 - p) * p;
  return 1 - (2 * u * y + eps) / (u + y + eps);
}

export function dscLoss(y: readonly number[], p: readonly number[], eps: number): number {
  checkInputs(y, p);
  let total = 0;
  for (let i = 0; i < y.length; i++) total += dscTerm(y[i], p[i], eps);
  return total / y.length;
}

export function combinedLoss(
  y: readonly number[],
  p: readonly number[],
  cfg: LossConfig = DEFAULT_LOSS,
): number {
  if (cfg.lambda < 0) throw new Error(`lambda must be >= 0, got ${cfg.lambda}`);
  if (!(cfg.dscEpsilon > 0)) throw new Error(`epsilon must be > 0, got ${cfg.dscEpsilon}`);
  const ce = crossEntropy(y, p);
  if (cfg.lambda === 0) return ce;
  return ce + cfg.lambda * dscLoss(y, p, cfg.dscEpsilon);
}

/**
 * d(combined loss)/d(logit) for one example, with p = sigmoid(logit).
 * CE part: p - y. DSC part via u = p - p^2:
 *   dDSC/du = -(2y^2 + 2y*eps - eps) / (u + y + eps)^2,  du/dp = 1 - 2p,
 *   dp/dz = p (1 - p).
 */
export function lossGradLogit(y: number, p: number, cfg: LossConfig): number {
  let grad = p - y;
  if (cfg.lambda > 0) {
    const eps = cfg.dscEpsilon;
    const u = (1 - p) * p;
    const dDscDu = -(2 * y * y + 2 * y * eps - eps) / ((u + y + eps) * (u + y + eps));
    grad += cfg.lambda * dDscDu * (1 - 2 * p) * p * (1 - p);
  }
  return grad;
}
