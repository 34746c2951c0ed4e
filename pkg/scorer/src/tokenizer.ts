/** Pair-input construction: classifier token, question, separator, candidate. */

export const CLS = "[CLS]";
export const SEP = "[SEP]";

export const DEFAULT_MAX_LEN = 256;

export function tokenize(text: string): string[] {
  return text.toLowerCase().match(/\w+/g) ?? [];
}

/**
 * Build the encoder input for a (question, candidate) pair:
 * [CLS] question [SEP] candidate [SEP], truncated from the candidate side so
 * the total length never exceeds maxLen and the question survives whole.
 */
export function buildPairInput(
  question: string,
  candidate: string,
  maxLen: number = DEFAULT_MAX_LEN,
): string[] {
  if (!question.trim()) throw new Error("pair input requires a nonempty question");
  if (!candidate.trim()) throw new Error("pair input requires a nonempty candidate");
  const q = tokenize(question);
  const c = tokenize(candidate);
  const budget = Math.max(maxLen - q.length - 3, 0); // CLS + 2 SEP
  return [CLS, ...q, SEP, ...c.slice(0, budget), SEP];
}

/** Encoder input for question-type classification: [CLS] question [SEP]. */
export function buildQuestionInput(question: string, maxLen: number = DEFAULT_MAX_LEN): string[] {
  if (!question.trim()) throw new Error("typing input requires a nonempty question");
  return [CLS, ...tokenize(question).slice(0, maxLen - 2), SEP];
}
