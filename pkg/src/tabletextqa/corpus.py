"""Corpus ingestion and serialization.

Canonical format: UTF-8 JSONL, one document per line. Each line holds the
document's paragraphs, tables (raw string grids plus explicit header bands)
and its questions with gold annotations. An adapter maps the official
MultiHiertt release files (one JSON array of question instances, tables as
lists of row-string-lists) into it; see README for the schema and the
evidence-id mapping.

Corpus objects are immutable after ingestion and safe to share across
threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable

from .errors import DataError
from .tabletree import CellRef, HierTable, parse_numeric

QUESTION_TYPES = ("arithmetic", "span_selection")


@dataclass(frozen=True)
class Paragraph:
    para_id: str
    text: str


@dataclass(frozen=True)
class AnswerValue:
    kind: str  # "number" | "text"
    number: float | None = None
    text: str | None = None

    def __post_init__(self):
        if self.kind == "number":
            if self.number is None or self.text is not None:
                raise DataError("number answer must populate exactly the number payload")
        elif self.kind == "text":
            if self.text is None or self.number is not None:
                raise DataError("text answer must populate exactly the text payload")
        else:
            raise DataError(f"unknown answer kind: {self.kind!r}")

    @staticmethod
    def from_raw(value: Any) -> "AnswerValue":
        """Coerce a dataset answer (number or string) into an AnswerValue."""
        if isinstance(value, bool):
            return AnswerValue(kind="text", text="yes" if value else "no")
        if isinstance(value, (int, float)):
            return AnswerValue(kind="number", number=float(value))
        if isinstance(value, str):
            parsed = parse_numeric(value)
            if parsed is not None:
                return AnswerValue(kind="number", number=parsed)
            return AnswerValue(kind="text", text=value)
        raise DataError(f"unsupported answer value: {value!r}")


@dataclass(frozen=True)
class Question:
    q_id: str
    doc_id: str
    text: str
    gold_type: str | None = None
    gold_answer: AnswerValue | None = None
    gold_program: str | None = None
    gold_text_evidence: tuple[str, ...] = ()
    gold_table_evidence: tuple[CellRef, ...] = ()

    def __post_init__(self):
        if self.gold_type is not None and self.gold_type not in QUESTION_TYPES:
            raise DataError(f"question {self.q_id}: unknown gold_type {self.gold_type!r}")
        if self.gold_program is not None and self.gold_type != "arithmetic":
            raise DataError(
                f"question {self.q_id}: gold_program present but gold_type is "
                f"{self.gold_type!r}, expected 'arithmetic'"
            )


@dataclass(frozen=True)
class Document:
    doc_id: str
    paragraphs: tuple[Paragraph, ...]
    tables: tuple[HierTable, ...]

    def paragraph_ids(self) -> set[str]:
        return {p.para_id for p in self.paragraphs}

    def table_by_id(self, table_id: str) -> HierTable:
        for t in self.tables:
            if t.table_id == table_id:
                return t
        raise DataError(f"document {self.doc_id}: no table {table_id!r}")


@dataclass(frozen=True)
class Corpus:
    documents: tuple[Document, ...]
    questions: tuple[Question, ...]

    def document(self, doc_id: str) -> Document:
        doc = self._doc_index().get(doc_id)
        if doc is None:
            raise DataError(f"no document {doc_id!r} in corpus")
        return doc

    def _doc_index(self) -> dict[str, Document]:
        cached = getattr(self, "_index", None)
        if cached is None:
            cached = {d.doc_id: d for d in self.documents}
            object.__setattr__(self, "_index", cached)
        return cached

    def questions_for(self, doc_id: str) -> list[Question]:
        return [q for q in self.questions if q.doc_id == doc_id]


# ---------------------------------------------------------------------------
# JSONL plumbing


def write_jsonl(records: Iterable[dict], path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        for rec in records:
            f.write(json.dumps(rec, ensure_ascii=False) + "\n")


def read_jsonl(path: str | Path) -> list[dict]:
    out = []
    with Path(path).open("r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                out.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}: malformed JSON on line {lineno}: {exc}") from None
    return out


# ---------------------------------------------------------------------------
# Canonical (de)serialization


def question_to_dict(q: Question) -> dict:
    gold_answer = None
    if q.gold_answer is not None:
        gold_answer = {"kind": q.gold_answer.kind}
        if q.gold_answer.kind == "number":
            gold_answer["number"] = q.gold_answer.number
        else:
            gold_answer["text"] = q.gold_answer.text
    return {
        "q_id": q.q_id,
        "doc_id": q.doc_id,
        "text": q.text,
        "gold_type": q.gold_type,
        "gold_answer": gold_answer,
        "gold_program": q.gold_program,
        "gold_text_evidence": list(q.gold_text_evidence),
        "gold_table_evidence": [
            {"table_id": c.table_id, "row": c.row, "col": c.col}
            for c in q.gold_table_evidence
        ],
    }


def question_from_dict(rec: dict) -> Question:
    gold_answer = None
    if rec.get("gold_answer") is not None:
        ga = rec["gold_answer"]
        gold_answer = AnswerValue(
            kind=ga["kind"], number=ga.get("number"), text=ga.get("text")
        )
    return Question(
        q_id=rec["q_id"],
        doc_id=rec["doc_id"],
        text=rec["text"],
        gold_type=rec.get("gold_type"),
        gold_answer=gold_answer,
        gold_program=rec.get("gold_program"),
        gold_text_evidence=tuple(rec.get("gold_text_evidence") or ()),
        gold_table_evidence=tuple(
            CellRef(c["table_id"], c["row"], c["col"])
            for c in rec.get("gold_table_evidence") or ()
        ),
    )


def table_to_dict(t: HierTable) -> dict:
    return {
        "table_id": t.table_id,
        "grid": t.rows_as_strings(),
        "header_row_band": list(t.header_row_band),
        "header_col_band": list(t.header_col_band),
    }


def table_from_dict(rec: dict) -> HierTable:
    return HierTable.from_rows(
        rec["table_id"],
        rec["grid"],
        tuple(rec.get("header_row_band") or (0, 0)),
        tuple(rec.get("header_col_band") or (0, 0)),
    )


def document_to_dict(doc: Document, questions: Iterable[Question] = ()) -> dict:
    return {
        "doc_id": doc.doc_id,
        "paragraphs": [{"para_id": p.para_id, "text": p.text} for p in doc.paragraphs],
        "tables": [table_to_dict(t) for t in doc.tables],
        "questions": [question_to_dict(q) for q in questions],
    }


def write_corpus(corpus: Corpus, path: str | Path) -> None:
    by_doc = {d.doc_id: [] for d in corpus.documents}
    for q in corpus.questions:
        by_doc.setdefault(q.doc_id, []).append(q)
    write_jsonl(
        (document_to_dict(d, by_doc.get(d.doc_id, ())) for d in corpus.documents), path
    )


# ---------------------------------------------------------------------------
# Ingestion and validation


def _validate_corpus(documents: list[Document], questions: list[Question]) -> Corpus:
    seen_docs: set[str] = set()
    for doc in documents:
        if doc.doc_id in seen_docs:
            raise DataError(f"duplicate doc_id {doc.doc_id!r}")
        seen_docs.add(doc.doc_id)
        seen_paras: set[str] = set()
        for p in doc.paragraphs:
            if p.para_id in seen_paras:
                raise DataError(f"document {doc.doc_id}: duplicate para_id {p.para_id!r}")
            seen_paras.add(p.para_id)
            if not p.text.strip():
                raise DataError(f"document {doc.doc_id}: paragraph {p.para_id} is empty")
        seen_tables: set[str] = set()
        for t in doc.tables:
            if t.table_id in seen_tables:
                raise DataError(f"document {doc.doc_id}: duplicate table_id {t.table_id!r}")
            seen_tables.add(t.table_id)

    doc_index = {d.doc_id: d for d in documents}
    seen_q: set[str] = set()
    for q in questions:
        if q.q_id in seen_q:
            raise DataError(f"duplicate q_id {q.q_id!r}")
        seen_q.add(q.q_id)
        doc = doc_index.get(q.doc_id)
        if doc is None:
            raise DataError(f"question {q.q_id}: unknown doc_id {q.doc_id!r}")
        para_ids = doc.paragraph_ids()
        for pid in q.gold_text_evidence:
            if pid not in para_ids:
                raise DataError(
                    f"question {q.q_id}: dangling text evidence ref {pid!r}"
                )
        for ref in q.gold_table_evidence:
            table = None
            for t in doc.tables:
                if t.table_id == ref.table_id:
                    table = t
                    break
            if table is None:
                raise DataError(
                    f"question {q.q_id}: dangling table evidence ref {ref.key()!r}"
                )
            if not (0 <= ref.row < table.n_rows and 0 <= ref.col < table.n_cols):
                raise DataError(
                    f"question {q.q_id}: table evidence ref {ref.key()!r} out of bounds"
                )
    return Corpus(tuple(documents), tuple(questions))


def _load_canonical(path: Path) -> Corpus:
    documents: list[Document] = []
    questions: list[Question] = []
    for rec in read_jsonl(path):
        try:
            doc = Document(
                doc_id=rec["doc_id"],
                paragraphs=tuple(
                    Paragraph(p["para_id"], p["text"]) for p in rec.get("paragraphs", ())
                ),
                tables=tuple(table_from_dict(t) for t in rec.get("tables", ())),
            )
            documents.append(doc)
            for qrec in rec.get("questions", ()):
                questions.append(question_from_dict(qrec))
        except KeyError as exc:
            raise DataError(
                f"document record {rec.get('doc_id', '?')!r}: missing field {exc}"
            ) from None
    return _validate_corpus(documents, questions)


def infer_header_row_band(rows: list[list[str]]) -> tuple[int, int]:
    """Header rows = rows before the first row containing a numeric cell."""
    for r, row in enumerate(rows):
        if any(parse_numeric(cell) is not None for cell in row):
            return (0, max(r - 1, 0))
    return (0, 0)


def fill_merged_headers(rows: list[list[str]], band_end: int) -> list[list[str]]:
    """Forward-fill blank cells in header rows so a label spanning several
    columns repeats across them (merged-cell markup arrives blank)."""
    out = [list(r) for r in rows]
    for r in range(min(band_end + 1, len(out))):
        last = ""
        for c in range(1, len(out[r])):
            if out[r][c].strip():
                last = out[r][c]
            elif last:
                out[r][c] = last
    return out


def _adapt_multihiertt(path: Path, infer_bands: bool = True) -> Corpus:
    """Map the official release (JSON array of question instances) into the
    canonical model: one document per instance, tables indexed by position,
    evidence cell ids decoded from "{table}-{row}-{col}" keys."""
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: not valid JSON: {exc}") from None
    if not isinstance(payload, list):
        raise DataError(f"{path}: expected a JSON array of instances")

    documents: list[Document] = []
    questions: list[Question] = []
    for i, inst in enumerate(payload):
        uid = inst.get("uid", f"inst-{i}")
        doc_id = str(uid)
        paragraphs = tuple(
            Paragraph(para_id=f"{doc_id}-p{j}", text=text)
            for j, text in enumerate(inst.get("paragraphs", ()))
            if str(text).strip()
        )
        tables = []
        for ti, rows in enumerate(inst.get("tables", ())):
            rows = [[str(c) for c in row] for row in rows]
            band = infer_header_row_band(rows) if infer_bands else (0, 0)
            rows = fill_merged_headers(rows, band[1])
            tables.append(HierTable.from_rows(f"{doc_id}-t{ti}", rows, band, (0, 0)))
        documents.append(Document(doc_id, paragraphs, tuple(tables)))

        qa = inst.get("qa")
        if not qa:
            continue
        qtype = qa.get("question_type")
        if qtype is not None:
            qtype = str(qtype).replace("-", "_")
            if qtype not in QUESTION_TYPES:
                raise DataError(f"instance {uid}: unknown question_type {qtype!r}")
        answer = qa.get("answer")
        gold_answer = AnswerValue.from_raw(answer) if answer not in (None, "") else None
        program = qa.get("program") or None
        if program is not None and qtype is None:
            qtype = "arithmetic"
        text_ev = tuple(
            f"{doc_id}-p{j}" for j in qa.get("text_evidence", ())
        )
        table_ev = []
        for key in qa.get("table_evidence", ()):
            ref = CellRef.from_key(str(key))
            table_ev.append(CellRef(f"{doc_id}-t{ref.table_id}", ref.row, ref.col))
        questions.append(
            Question(
                q_id=str(uid),
                doc_id=doc_id,
                text=qa.get("question", ""),
                gold_type=qtype,
                gold_answer=gold_answer,
                gold_program=program,
                gold_text_evidence=text_ev,
                gold_table_evidence=tuple(table_ev),
            )
        )
    return _validate_corpus(documents, questions)


def ingest_corpus(
    path: str | Path, format: str = "canonical", infer_bands: bool = True
) -> Corpus:
    """Load and validate a corpus. Deterministic: same bytes, same corpus.

    infer_bands only affects the multihiertt adapter: on, header row bands
    are derived from the first numeric row; off, every band is [0, 0] and
    markup-provided bands in the canonical format are the way to override.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"corpus path does not exist: {path}")
    if format == "canonical":
        return _load_canonical(path)
    if format == "multihiertt":
        return _adapt_multihiertt(path, infer_bands=infer_bands)
    raise DataError(f"unknown corpus format {format!r}")
