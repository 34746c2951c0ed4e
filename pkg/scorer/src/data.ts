/** Readers for the pipeline's file contracts and pair-dataset construction.
 *
 * Inputs: the canonical corpus JSONL (one document per line, questions
 * embedded) and the table-description JSONL (desc_id, table_id, row, col,
 * text) the pipeline exports via `ttqa ingest --descriptions`.
 */

import * as fs from "node:fs";

import { buildPairInput, buildQuestionInput } from "./tokenizer";
import { TrainExample } from "./model";

export interface ParagraphRecord {
  para_id: string;
  text: string;
}

export interface QuestionRecord {
  q_id: string;
  doc_id: string;
  text: string;
  gold_type?: string | null;
  gold_text_evidence?: string[];
  gold_table_evidence?: { table_id: string; row: number; col: number }[];
}

export interface TableRecord {
  table_id: string;
  grid: string[][];
  header_row_band: [number, number];
  header_col_band: [number, number];
}

export interface DocumentRecord {
  doc_id: string;
  paragraphs: ParagraphRecord[];
  tables: TableRecord[];
  questions: QuestionRecord[];
}

export interface DescriptionRecord {
  desc_id: string;
  table_id: string;
  row: number;
  col: number;
  text: string;
}

export interface Corpus {
  documents: DocumentRecord[];
  questions: QuestionRecord[];
}

export function readJsonl(file: string): any[] {
  return fs
    .readFileSync(file, "utf-8")
    .split("\n")
    .filter((line) => line.trim())
    .map((line, i) => {
      try {
        return JSON.parse(line);
      } catch (err) {
        throw new Error(`${file}: malformed JSON on line ${i + 1}`);
      }
    });
}

export function loadCorpus(file: string): Corpus {
  const documents = readJsonl(file) as DocumentRecord[];
  const questions = documents.flatMap((d) => d.questions ?? []);
  return { documents, questions };
}

export function loadDescriptions(file: string): Map<string, DescriptionRecord[]> {
  const byTable = new Map<string, DescriptionRecord[]>();
  for (const rec of readJsonl(file) as DescriptionRecord[]) {
    const group = byTable.get(rec.table_id) ?? [];
    group.push(rec);
    byTable.set(rec.table_id, group);
  }
  return byTable;
}

export function cellKey(table_id: string, row: number, col: number): string {
  return `${table_id}-${row}-${col}`;
}

export type Target = "text" | "table_desc" | "qtype";

export interface PairExample extends TrainExample {
  q_id: string;
  candidate_id: string;
}

/** Labeled training pairs for one target, gold annotations as labels. */
export function buildPairDataset(
  corpus: Corpus,
  descriptions: Map<string, DescriptionRecord[]>,
  target: Target,
  maxLen?: number,
): PairExample[] {
  const docs = new Map(corpus.documents.map((d) => [d.doc_id, d]));
  const out: PairExample[] = [];
  for (const q of corpus.questions) {
    if (target === "qtype") {
      if (!q.gold_type) continue;
      out.push({
        q_id: q.q_id,
        candidate_id: q.q_id,
        tokens: buildQuestionInput(q.text, maxLen),
        label: q.gold_type === "arithmetic" ? 1 : 0,
      });
      continue;
    }
    const doc = docs.get(q.doc_id);
    if (!doc) throw new Error(`question ${q.q_id} references unknown doc ${q.doc_id}`);
    if (target === "text") {
      const gold = new Set(q.gold_text_evidence ?? []);
      for (const para of doc.paragraphs ?? []) {
        out.push({
          q_id: q.q_id,
          candidate_id: para.para_id,
          tokens: buildPairInput(q.text, para.text, maxLen),
          label: gold.has(para.para_id) ? 1 : 0,
        });
      }
    } else {
      const gold = new Set(
        (q.gold_table_evidence ?? []).map((c) => cellKey(c.table_id, c.row, c.col)),
      );
      for (const doc_table of descriptionsForDoc(doc, descriptions)) {
        out.push({
          q_id: q.q_id,
          candidate_id: doc_table.desc_id,
          tokens: buildPairInput(q.text, doc_table.text, maxLen),
          label: gold.has(doc_table.desc_id) ? 1 : 0,
        });
      }
    }
  }
  return out;
}

export function descriptionsForDoc(
  doc: DocumentRecord,
  descriptions: Map<string, DescriptionRecord[]>,
): DescriptionRecord[] {
  const out: DescriptionRecord[] = [];
  for (const table of doc.tables ?? []) {
    out.push(...(descriptions.get(table.table_id) ?? []));
  }
  return out;
}
