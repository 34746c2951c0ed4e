"""Prompt construction for zero-shot and few-shot runs.

Two strategies share the machinery. The retrieval-of-thought strategy
("hrot") asks the model to locate the evidence before reasoning and, for
arithmetic questions, sees reconstructed sub-tables; the chain-of-thought
baseline ("cot") sees table descriptions only. A bundle is an ordered list
of role-tagged segments whose rendering is their texts joined by single
newlines; the trigger strings are pinned constants and must never be
reformatted.

Demonstrations are human-editable files selected from the training split by
clustering question embeddings and taking the question nearest each
centroid.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .corpus import Question
from .errors import ConfigError, DataError
from .programdsl import ANSWER_TRIGGER, parse_program
from .retrieval import tokenize

ZERO_SHOT_TRIGGER = (
    "Let's retrieve above text and table step by step and then think step by step "
    "to answer the question. First, based on the question, we need to find"
)
FEW_SHOT_TRIGGER = "Let's retrieve above text and table step by step"
COT_TRIGGER = "Let's think step by step"

STRATEGIES = ("hrot", "cot")

SEGMENT_ROLES = (
    "context_text",
    "context_table",
    "demonstration",
    "question",
    "trigger",
    "answer_trigger",
)


@dataclass(frozen=True)
class Segment:
    role: str
    text: str


@dataclass(frozen=True)
class PromptBundle:
    segments: tuple[Segment, ...]

    def __post_init__(self):
        for seg in self.segments:
            if seg.role not in SEGMENT_ROLES:
                raise DataError(f"unknown segment role {seg.role!r}")
        if sum(1 for s in self.segments if s.role == "question") != 1:
            raise DataError("bundle must contain exactly one question segment")

    @property
    def rendered(self) -> str:
        return "\n".join(seg.text for seg in self.segments)


@dataclass(frozen=True)
class Demonstration:
    demo_id: str
    qtype: str
    question: str
    context: str
    chain: str
    answer: str

    def validate(self) -> None:
        if self.qtype == "arithmetic" and self.answer.strip():
            parse_program(self.answer)  # raises if not a well-formed program


@dataclass(frozen=True)
class PreparedEvidence:
    """Context for one question, already serialized: ranked paragraph texts,
    rendered reconstructed tables, table-description sentences."""

    texts: tuple[str, ...] = ()
    tables: tuple[str, ...] = ()
    descriptions: tuple[str, ...] = ()

    def is_empty(self) -> bool:
        return not (self.texts or self.tables or self.descriptions)


def answer_trigger() -> str:
    return ANSWER_TRIGGER


def _context_segments(evidence: PreparedEvidence) -> list[Segment]:
    segments = [Segment("context_text", text) for text in evidence.texts]
    segments += [Segment("context_table", f"Table:\n{t}") for t in evidence.tables]
    segments += [Segment("context_table", d) for d in evidence.descriptions]
    return segments


def build_zero_shot(
    evidence: PreparedEvidence, question: Question, strategy: str = "hrot"
) -> PromptBundle:
    """Context, question, then the strategy's reasoning trigger."""
    if strategy not in STRATEGIES:
        raise ConfigError(f"unknown strategy {strategy!r}")
    if evidence.is_empty():
        raise DataError(
            f"question {question.q_id}: empty evidence; run retrieval first"
        )
    if strategy == "cot" and evidence.tables:
        raise DataError("cot prompts take table descriptions, not reconstructed tables")
    segments = _context_segments(evidence)
    segments.append(Segment("question", f"Question: {question.text}"))
    trigger = ZERO_SHOT_TRIGGER if strategy == "hrot" else COT_TRIGGER
    segments.append(Segment("trigger", trigger))
    return PromptBundle(tuple(segments))


def build_answer_extraction_prompt(first_prompt: str, model_output: str) -> str:
    """Second call of the zero-shot protocol: first prompt, the model's
    reasoning, then the answer trigger."""
    return f"{first_prompt}\n{model_output}\n{ANSWER_TRIGGER}"


def render_demonstration(demo: Demonstration, strategy: str = "hrot") -> str:
    trigger = FEW_SHOT_TRIGGER if strategy == "hrot" else COT_TRIGGER
    return (
        f"{demo.context}\n"
        f"Question: {demo.question}\n"
        f"{trigger}\n"
        f"{demo.chain}\n"
        f"{ANSWER_TRIGGER} {demo.answer}"
    )


def build_few_shot(
    demos: Sequence[Demonstration],
    evidence: PreparedEvidence,
    question: Question,
    strategy: str = "hrot",
    qtype: str | None = None,
) -> PromptBundle:
    """Demonstrations in order, then the query block ending in the few-shot
    trigger. All demos must share the question's type."""
    if strategy not in STRATEGIES:
        raise ConfigError(f"unknown strategy {strategy!r}")
    if not demos:
        raise DataError("no demonstrations given; use build_zero_shot for 0-shot runs")
    qtype = qtype or question.gold_type
    for demo in demos:
        if qtype is not None and demo.qtype != qtype:
            raise DataError(
                f"demonstration {demo.demo_id} has qtype {demo.qtype!r}, "
                f"question {question.q_id} is {qtype!r}"
            )
    if evidence.is_empty():
        raise DataError(
            f"question {question.q_id}: empty evidence; run retrieval first"
        )
    segments = [
        Segment("demonstration", render_demonstration(d, strategy)) for d in demos
    ]
    segments += _context_segments(evidence)
    segments.append(Segment("question", f"Question: {question.text}"))
    trigger = FEW_SHOT_TRIGGER if strategy == "hrot" else COT_TRIGGER
    segments.append(Segment("trigger", trigger))
    return PromptBundle(tuple(segments))


# ---------------------------------------------------------------------------
# Demonstration store: one "###"-sectioned text file per demo

_SECTION_RE = re.compile(r"^### (\w+)\s*$", re.MULTILINE)
_DEMO_SECTIONS = ("qtype", "question", "context", "chain", "answer")


def demo_to_text(demo: Demonstration) -> str:
    parts = []
    for name in _DEMO_SECTIONS:
        parts.append(f"### {name}\n{getattr(demo, name)}")
    return "\n".join(parts) + "\n"


def demo_from_text(demo_id: str, text: str) -> Demonstration:
    pieces = _SECTION_RE.split(text)
    # pieces = [prefix, name1, body1, name2, body2, ...]
    fields = {}
    for name, body in zip(pieces[1::2], pieces[2::2]):
        fields[name] = body.strip("\n").rstrip()
    missing = [s for s in _DEMO_SECTIONS if s not in fields]
    if missing:
        raise DataError(f"demo {demo_id}: missing sections {missing}")
    return Demonstration(demo_id=demo_id, **{s: fields[s] for s in _DEMO_SECTIONS})


def save_demo(demo: Demonstration, demo_dir: str | Path) -> Path:
    demo_dir = Path(demo_dir)
    demo_dir.mkdir(parents=True, exist_ok=True)
    path = demo_dir / f"{demo.demo_id}.txt"
    path.write_text(demo_to_text(demo), encoding="utf-8")
    return path


def load_demos(demo_dir: str | Path, qtype: str | None = None) -> list[Demonstration]:
    """All demos in the directory, demo_id (filename) ascending."""
    demo_dir = Path(demo_dir)
    if not demo_dir.is_dir():
        raise DataError(f"demo directory does not exist: {demo_dir}")
    demos = []
    for path in sorted(demo_dir.glob("*.txt")):
        demo = demo_from_text(path.stem, path.read_text(encoding="utf-8"))
        if qtype is None or demo.qtype == qtype:
            demos.append(demo)
    return demos


# ---------------------------------------------------------------------------
# Demonstration selection: k-means over term-frequency question embeddings

KMEANS_MAX_ITER = 50


def embed_questions(texts: Sequence[str]) -> np.ndarray:
    """L2-normalized term-frequency vectors over the joint vocabulary."""
    vocab: dict[str, int] = {}
    for text in texts:
        for tok in tokenize(text):
            vocab.setdefault(tok, len(vocab))
    mat = np.zeros((len(texts), max(len(vocab), 1)))
    for i, text in enumerate(texts):
        for tok in tokenize(text):
            mat[i, vocab[tok]] += 1.0
    norms = np.linalg.norm(mat, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return mat / norms


def _kmeans(points: np.ndarray, k: int, seed: int) -> np.ndarray:
    """Plain seeded k-means; returns the k centroids."""
    rng = np.random.default_rng(seed)
    centroids = points[rng.choice(len(points), size=k, replace=False)].copy()
    for _ in range(KMEANS_MAX_ITER):
        dists = np.linalg.norm(points[:, None, :] - centroids[None, :, :], axis=2)
        labels = dists.argmin(axis=1)
        new_centroids = centroids.copy()
        for j in range(k):
            members = points[labels == j]
            if len(members):
                new_centroids[j] = members.mean(axis=0)
        if np.allclose(new_centroids, centroids):
            break
        centroids = new_centroids
    return centroids


def select_demos(
    train_questions: Iterable[Question],
    qtype: str,
    k: int,
    seed: int = 0,
) -> list[Demonstration]:
    """Pick k representative questions of one type as demonstration stubs.

    Clusters each question type separately; the stub nearest each centroid
    (cosine, q_id-ascending tie-break) is returned with empty chain/answer,
    to be filled by a zero-shot run and a human pass.
    """
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    pool = sorted(
        (q for q in train_questions if q.gold_type == qtype), key=lambda q: q.q_id
    )
    if len(pool) < k:
        raise DataError(
            f"need at least {k} questions of type {qtype!r}, found {len(pool)}"
        )
    points = embed_questions([q.text for q in pool])
    centroids = _kmeans(points, k, seed)
    chosen: list[Question] = []
    taken: set[int] = set()
    for centroid in centroids:
        sims = points @ centroid
        norm = np.linalg.norm(centroid)
        if norm > 0:
            sims = sims / norm
        best = None
        for i in range(len(pool)):
            if i in taken:
                continue
            if best is None or sims[i] > sims[best] + 1e-12:
                best = i
        taken.add(best)
        chosen.append(pool[best])
    return [
        Demonstration(
            demo_id=q.q_id, qtype=qtype, question=q.text, context="", chain="", answer=""
        )
        for q in chosen
    ]
