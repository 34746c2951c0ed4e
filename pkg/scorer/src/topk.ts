/** Top-k selection and micro recall, mirroring the pipeline's contract
 * (descending score, ties by candidate id ascending, micro-averaged recall
 * over questions with nonempty gold). Used to cross-check the exported
 * score files against the pipeline's own evaluation.
 */

export interface ScoredCandidate {
  candidate_id: string;
  score: number;
}

export function selectTopK(candidates: readonly ScoredCandidate[], k: number): string[] {
  return [...candidates]
    .sort((a, b) => b.score - a.score || (a.candidate_id < b.candidate_id ? -1 : 1))
    .slice(0, k)
    .map((c) => c.candidate_id);
}

export function microRecall(
  predictions: Map<string, string[]>,
  gold: Map<string, Set<string>>,
): number {
  let hits = 0;
  let total = 0;
  for (const [qId, goldIds] of gold) {
    if (goldIds.size === 0) continue;
    const retrieved = new Set(predictions.get(qId) ?? []);
    for (const id of goldIds) if (retrieved.has(id)) hits += 1;
    total += goldIds.size;
  }
  if (total === 0) throw new Error("no gold evidence to score");
  return hits / total;
}
