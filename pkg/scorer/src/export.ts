/** Score/label export in the pipeline's external file contract:
 *   scores JSONL: {"q_id","candidate_id","kind","score"}
 *   labels JSONL: {"q_id","label"}
 * One score per (question, candidate); every paragraph and every table
 * description of the question's document is scored.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { Corpus, DescriptionRecord, descriptionsForDoc } from "./data";
import { PairScorer } from "./model";
import { buildPairInput, buildQuestionInput } from "./tokenizer";

export interface ExportModels {
  text: PairScorer;
  tableDesc: PairScorer;
  qtype?: PairScorer;
}

export interface ExportPaths {
  scores: string;
  labels: string;
}

export function exportScores(
  models: ExportModels,
  corpus: Corpus,
  descriptions: Map<string, DescriptionRecord[]>,
  outDir: string,
  maxLen?: number,
): ExportPaths {
  fs.mkdirSync(outDir, { recursive: true });
  const docs = new Map(corpus.documents.map((d) => [d.doc_id, d]));
  const scoreLines: string[] = [];
  const labelLines: string[] = [];
  for (const q of corpus.questions) {
    const doc = docs.get(q.doc_id);
    if (!doc) throw new Error(`question ${q.q_id} references unknown doc ${q.doc_id}`);
    for (const para of doc.paragraphs ?? []) {
      const score = models.text.probability(buildPairInput(q.text, para.text, maxLen));
      scoreLines.push(
        JSON.stringify({ q_id: q.q_id, candidate_id: para.para_id, kind: "text", score }),
      );
    }
    for (const desc of descriptionsForDoc(doc, descriptions)) {
      const score = models.tableDesc.probability(buildPairInput(q.text, desc.text, maxLen));
      scoreLines.push(
        JSON.stringify({ q_id: q.q_id, candidate_id: desc.desc_id, kind: "table_desc", score }),
      );
    }
    if (models.qtype) {
      const p = models.qtype.probability(buildQuestionInput(q.text, maxLen));
      labelLines.push(
        JSON.stringify({ q_id: q.q_id, label: p >= 0.5 ? "arithmetic" : "span_selection" }),
      );
    }
  }
  const paths: ExportPaths = {
    scores: path.join(outDir, "scores.jsonl"),
    labels: path.join(outDir, "labels.jsonl"),
  };
  fs.writeFileSync(paths.scores, scoreLines.join("\n") + "\n");
  if (models.qtype) fs.writeFileSync(paths.labels, labelLines.join("\n") + "\n");
  return paths;
}
