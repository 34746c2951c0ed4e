"""Question typing and top-k evidence retrieval.

Candidates for a question are its document's paragraphs plus the table
descriptions of every table in that document. A scorer assigns one relevance
score per candidate; the top n texts and top m descriptions become the
question's evidence. Scorers are pluggable: a lexical cosine baseline, an
oracle backed by gold annotations, or externally produced score files
(shared JSONL contract: {"q_id","candidate_id","kind","score"}).
"""

from __future__ import annotations

import json
import math
import re
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import Document, Question, read_jsonl
from .errors import ConfigError, DataError
from .tabletree import CellRef, linearize

KIND_TEXT = "text"
KIND_TABLE = "table_desc"

_WORD_RE = re.compile(r"\w+")


def tokenize(text: str) -> list[str]:
    return _WORD_RE.findall(text.lower())


def cosine_tf(a: str, b: str) -> float:
    """Cosine similarity of term-frequency vectors over lowercase tokens."""
    va, vb = Counter(tokenize(a)), Counter(tokenize(b))
    if not va or not vb:
        return 0.0
    dot = sum(count * vb[tok] for tok, count in va.items())
    norm = math.sqrt(sum(c * c for c in va.values())) * math.sqrt(
        sum(c * c for c in vb.values())
    )
    return dot / norm if norm else 0.0


@dataclass(frozen=True)
class CandidateSet:
    q_id: str
    texts: tuple[tuple[str, str], ...]  # (para_id, text)
    descs: tuple[tuple[str, str, CellRef], ...]  # (desc_id, text, cell)


@dataclass(frozen=True)
class RelevanceScore:
    q_id: str
    candidate_id: str
    kind: str  # "text" | "table_desc"
    score: float

    def __post_init__(self):
        if not math.isfinite(self.score):
            raise DataError(
                f"non-finite score for ({self.q_id}, {self.candidate_id})"
            )


@dataclass(frozen=True)
class RetrievalConfig:
    n: int = 5  # top texts
    m: int = 10  # top table descriptions
    scorer: str = "lexical"  # "lexical" | "oracle" | "external"

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ConfigError(f"retrieval top-k must be >= 1, got n={self.n}, m={self.m}")


@dataclass(frozen=True)
class Evidence:
    """Ranked evidence ids selected for one question."""

    q_id: str
    text_ids: tuple[str, ...]
    desc_ids: tuple[str, ...]


def build_candidates(doc: Document, q_id: str) -> CandidateSet:
    descs: list[tuple[str, str, CellRef]] = []
    for table in doc.tables:
        for d in linearize(table):
            descs.append((d.desc_id, d.text, d.cell))
    return CandidateSet(
        q_id=q_id,
        texts=tuple((p.para_id, p.text) for p in doc.paragraphs),
        descs=tuple(descs),
    )


# ---------------------------------------------------------------------------
# Question typing


def _load_rules(rules_path: str | Path | None = None) -> dict:
    if rules_path is not None:
        return json.loads(Path(rules_path).read_text(encoding="utf-8"))
    return json.loads(
        resources.files("tabletextqa.data")
        .joinpath("question_type_rules.json")
        .read_text(encoding="utf-8")
    )


def classify_question(
    question: Question,
    backend: str = "rules",
    labels: Mapping[str, str] | None = None,
    rules_path: str | Path | None = None,
) -> str:
    """Label a question arithmetic or span_selection.

    The rules backend matches keyword phrases (span patterns first,
    arithmetic keywords second, default arithmetic). The external backend
    looks the label up in a loaded labels file.
    """
    if not question.text.strip():
        raise DataError(f"question {question.q_id}: empty text")
    if backend == "external":
        if labels is None or question.q_id not in labels:
            raise DataError(f"external labels missing q_id {question.q_id!r}")
        label = labels[question.q_id]
        if label not in ("arithmetic", "span_selection"):
            raise DataError(f"external label for {question.q_id!r} is {label!r}")
        return label
    if backend != "rules":
        raise ConfigError(f"unknown classifier backend {backend!r}")
    rules = _load_rules(rules_path)
    text = question.text.lower()
    for phrase in rules.get("span_selection", ()):
        if phrase in text:
            return "span_selection"
    for phrase in rules.get("arithmetic", ()):
        if phrase in text:
            return "arithmetic"
    return "arithmetic"


def load_external_labels(path: str | Path) -> dict[str, str]:
    """Labels JSONL: {"q_id","label"}."""
    out = {}
    for rec in read_jsonl(path):
        out[rec["q_id"]] = rec["label"]
    return out


# ---------------------------------------------------------------------------
# Scoring


def load_external_scores(path: str | Path) -> dict[tuple[str, str], float]:
    """Scores JSONL: {"q_id","candidate_id","kind","score"}."""
    out = {}
    for rec in read_jsonl(path):
        out[(rec["q_id"], rec["candidate_id"])] = float(rec["score"])
    return out


def _gold_ids(question: Question) -> tuple[set[str], set[str]]:
    return (
        set(question.gold_text_evidence),
        {ref.key() for ref in question.gold_table_evidence},
    )


def score_candidates(
    question: Question,
    cands: CandidateSet,
    scorer: str = "lexical",
    external_scores: Mapping[tuple[str, str], float] | None = None,
) -> list[RelevanceScore]:
    """One relevance score per candidate, in candidate order."""
    scores: list[RelevanceScore] = []
    if scorer == "lexical":
        for pid, text in cands.texts:
            scores.append(RelevanceScore(cands.q_id, pid, KIND_TEXT, cosine_tf(question.text, text)))
        for did, text, _ in cands.descs:
            scores.append(RelevanceScore(cands.q_id, did, KIND_TABLE, cosine_tf(question.text, text)))
    elif scorer == "oracle":
        gold_text, gold_table = _gold_ids(question)
        for pid, _ in cands.texts:
            scores.append(RelevanceScore(cands.q_id, pid, KIND_TEXT, 1.0 if pid in gold_text else 0.0))
        for did, _, _ in cands.descs:
            scores.append(RelevanceScore(cands.q_id, did, KIND_TABLE, 1.0 if did in gold_table else 0.0))
    elif scorer == "external":
        if external_scores is None:
            raise ConfigError("external scorer requires a loaded scores file")
        missing = []
        for cid, kind in [(pid, KIND_TEXT) for pid, _ in cands.texts] + [
            (did, KIND_TABLE) for did, _, _ in cands.descs
        ]:
            key = (cands.q_id, cid)
            if key not in external_scores:
                missing.append(cid)
                continue
            scores.append(RelevanceScore(cands.q_id, cid, kind, external_scores[key]))
        if missing:
            raise DataError(
                f"external scores missing candidates for {cands.q_id}: {', '.join(missing)}"
            )
    else:
        raise ConfigError(f"unknown scorer {scorer!r}")
    return scores


def select_topk(scores: Sequence[RelevanceScore], config: RetrievalConfig) -> Evidence:
    """Top-n texts and top-m descriptions by descending score; ties broken by
    candidate_id ascending. Deterministic."""
    q_ids = {s.q_id for s in scores}
    if len(q_ids) > 1:
        raise DataError(f"select_topk got scores for multiple questions: {sorted(q_ids)}")
    q_id = next(iter(q_ids)) if q_ids else ""

    def top(kind: str, k: int) -> tuple[str, ...]:
        pool = [s for s in scores if s.kind == kind]
        pool.sort(key=lambda s: (-s.score, s.candidate_id))
        return tuple(s.candidate_id for s in pool[:k])

    return Evidence(q_id, top(KIND_TEXT, config.n), top(KIND_TABLE, config.m))


# ---------------------------------------------------------------------------
# Recall


def recall_at_k(
    predictions: Mapping[str, Sequence[str]],
    gold: Mapping[str, Iterable[str]],
    kind: str,
) -> float:
    """Micro-averaged recall: retrieved gold items / all gold items, over
    questions with nonempty gold evidence of this kind."""
    hits = 0
    total = 0
    for q_id, gold_ids in gold.items():
        gold_set = set(gold_ids)
        if not gold_set:
            continue
        retrieved = set(predictions.get(q_id, ()))
        hits += len(gold_set & retrieved)
        total += len(gold_set)
    if total == 0:
        raise DataError(f"no gold evidence of kind {kind!r} to score")
    return hits / total


def evidence_recall(
    evidences: Iterable[Evidence], questions: Iterable[Question], kind: str
) -> float:
    """recall_at_k over Evidence/Question objects."""
    preds: dict[str, Sequence[str]] = {}
    for ev in evidences:
        preds[ev.q_id] = ev.text_ids if kind == KIND_TEXT else ev.desc_ids
    gold: dict[str, set[str]] = {}
    for q in questions:
        g_text, g_table = _gold_ids(q)
        gold[q.q_id] = g_text if kind == KIND_TEXT else g_table
    return recall_at_k(preds, gold, kind)
