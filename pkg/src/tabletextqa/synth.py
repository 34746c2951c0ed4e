"""Synthetic corpora and fixtures.

Deterministic generators for hierarchical financial-style tables, documents,
questions with consistent gold programs/answers/evidence, demonstration
files, and scripted mock completions authored from the gold annotations.
Used by the test suite and the narrative demo scripts; also handy for dry
runs of the full pipeline without any dataset or API access.
"""

from __future__ import annotations

import random
from pathlib import Path
from typing import Iterable

from .corpus import AnswerValue, Corpus, Document, Paragraph, Question
from .llmgateway import write_mock_script
from .programdsl import ANSWER_TRIGGER, eval_program, parse_program
from .promptkit import Demonstration, save_demo
from .reconstruct import reconstruct_tables
from .tabletree import CellRef, HierTable, describe_cell, render_table

METRICS = (
    "Revenue",
    "Net income",
    "Operating expenses",
    "Total assets",
    "Cash and equivalents",
    "Home equity",
    "Interest income",
    "Gross margin",
    "Long-term debt",
    "Accounts receivable",
)
GROUPS = (
    "Fixed maturity securities",
    "Equity securities",
    "Domestic operations",
    "International operations",
    "Consumer banking",
    "Wholesale banking",
)
YEARS = ("2017", "2018", "2019", "2020")


def fig3_style_table(table_id: str = "t0") -> HierTable:
    """Two stacked header rows, sub-header rows at 2 and 4, 8 rows total."""
    rows = [
        ["", "As of December 31,", "As of December 31,", "As of December 31,"],
        ["", "2019", "2018", "2017"],
        ["Fixed maturity securities", "", "", ""],
        ["Bonds", "1,234", "1,100", "987"],
        ["Equity securities", "", "", ""],
        ["Common stock", "5,829", "5,735", "5,600"],
        ["Preferred stock", "450", "410", "395"],
        ["Total equity securities", "6,279", "6,145", "5,995"],
    ]
    return HierTable.from_rows(table_id, rows, (0, 1), (0, 0))


def random_hier_table(
    rng: random.Random,
    table_id: str = "t0",
    min_rows: int = 2,
    max_rows: int = 40,
    min_cols: int = 2,
    max_cols: int = 10,
    max_subheaders: int = 5,
) -> HierTable:
    """Random multi-hierarchical table; data rows keep at least one value."""
    n_rows = rng.randint(min_rows, max_rows)
    n_cols = rng.randint(min_cols, max_cols)
    h = rng.randint(0, 1) if n_rows >= 3 else 0
    g = rng.randint(0, 1) if n_cols >= 3 else 0

    body_rows = list(range(h + 1, n_rows))
    n_sub = min(rng.randint(0, max_subheaders), len(body_rows))
    sub_rows = set(rng.sample(body_rows, n_sub)) if n_sub else set()

    def money(value: float) -> str:
        style = rng.randrange(4)
        if style == 0:
            return f"{value:,.0f}"
        if style == 1:
            return f"${value:,.0f}"
        if style == 2:
            return f"{value / 100:.1%}".replace("%", "%")
        return f"({value:,.0f})"

    rows = []
    for r in range(n_rows):
        if r <= h:
            rows.append([f"Header {r}" if c <= g else f"Col {r}.{c}" for c in range(n_cols)])
        elif r in sub_rows:
            rows.append([rng.choice(GROUPS)] + [""] * (n_cols - 1))
        else:
            row = [f"{rng.choice(METRICS)} {r}" if c <= g else "" for c in range(n_cols)]
            for c in range(g + 1, n_cols):
                if rng.random() < 0.88:
                    row[c] = money(rng.randint(10, 99999))
            if all(not row[c] for c in range(g + 1, n_cols)):
                row[g + 1] = money(rng.randint(10, 99999))
            rows.append(row)
    return HierTable.from_rows(table_id, rows, (0, h), (0, g))


def nonempty_data_cells(table: HierTable) -> list[CellRef]:
    return [
        CellRef(table.table_id, r, c)
        for r in range(table.header_rows_end + 1, table.n_rows)
        for c in range(table.header_cols_end + 1, table.n_cols)
        if table.raw_at(r, c).strip()
    ]


def random_evidence(rng: random.Random, table: HierTable, max_cells: int = 4) -> list[CellRef]:
    pool = nonempty_data_cells(table)
    if not pool:
        return []
    k = rng.randint(1, min(max_cells, len(pool)))
    return rng.sample(pool, k)


# ---------------------------------------------------------------------------
# Fixture corpus with consistent gold annotations

_ARITH_TEMPLATES = (
    ("change", "What was the change in {metric} from {y2} to {y1}?"),
    ("average", "What is the average of {metric} in {y1} and {y2}?"),
    ("ratio", "What was the ratio of {metric} in {y1} to that in {y2}?"),
    ("pct_change", "What was the percentage change in {metric} from {y2} to {y1}?"),
)

_SPAN_TEMPLATES = (
    "In what year was {metric} equal to {value}?",
    "In which year did the company report {metric} of {value}?",
)


def _fixture_table(rng: random.Random, doc_id: str) -> tuple[HierTable, dict]:
    """Small two-band table with unique integer values per (metric, year)."""
    metrics = rng.sample(METRICS, 4)
    years = list(YEARS[:3])
    values = {}
    used = set()
    for m in metrics:
        for y in years:
            v = rng.randint(100, 9899)
            while v in used:
                v = rng.randint(100, 9899)
            used.add(v)
            values[(m, y)] = v
    group = rng.choice(GROUPS)
    rows = [[""] + years]
    rows.append([group] + [""] * len(years))
    for m in metrics[:2]:
        rows.append([m] + [f"{values[(m, y)]:,}" for y in years])
    rows.append([rng.choice([g for g in GROUPS if g != group])] + [""] * len(years))
    for m in metrics[2:]:
        rows.append([m] + [f"{values[(m, y)]:,}" for y in years])
    table = HierTable.from_rows(f"{doc_id}-t0", rows, (0, 0), (0, 0))
    meta = {"metrics": metrics, "years": years, "values": values}
    return table, meta


def _cell_for(table: HierTable, meta: dict, metric: str, year: str) -> CellRef:
    col = 1 + meta["years"].index(year)
    for r in range(1, table.n_rows):
        if table.raw_at(r, 0).strip() == metric:
            return CellRef(table.table_id, r, col)
    raise AssertionError(f"metric {metric} not in fixture table")


def _arith_gold(kind: str, v1: int, v2: int) -> str:
    if kind == "change":
        return f"subtract({v1}, {v2})"
    if kind == "average":
        return f"add({v1}, {v2}), divide(#0, 2)"
    if kind == "ratio":
        return f"divide({v1}, {v2})"
    return f"subtract({v1}, {v2}), divide(#0, {v2})"  # pct_change


def build_fixture_corpus(
    n_questions: int = 20, seed: int = 7, doc_prefix: str = "doc"
) -> Corpus:
    """One document per question; gold programs evaluate to gold answers."""
    rng = random.Random(seed)
    documents, questions = [], []
    for i in range(n_questions):
        doc_id = f"{doc_prefix}{i:03d}"
        table, meta = _fixture_table(rng, doc_id)
        metric = rng.choice(meta["metrics"])
        y1, y2 = rng.sample(meta["years"], 2)
        v1, v2 = meta["values"][(metric, y1)], meta["values"][(metric, y2)]
        relevant = Paragraph(
            f"{doc_id}-p0",
            f"In fiscal {y1}, the company reported {metric} of {v1:,} million, "
            f"compared with {v2:,} million in {y2}.",
        )
        distractors = [
            Paragraph(
                f"{doc_id}-p1",
                "The accompanying notes are an integral part of these consolidated "
                "financial statements.",
            ),
            Paragraph(
                f"{doc_id}-p2",
                f"Management discussed liquidity and capital resources during "
                f"{rng.choice(meta['years'])}.",
            ),
        ]
        doc = Document(doc_id, (relevant, *distractors), (table,))
        documents.append(doc)

        if i % 2 == 0:
            kind, template = _ARITH_TEMPLATES[(i // 2) % len(_ARITH_TEMPLATES)]
            program = _arith_gold(kind, v1, v2)
            answer = eval_program(parse_program(program))
            questions.append(
                Question(
                    q_id=f"{doc_prefix}q{i:03d}",
                    doc_id=doc_id,
                    text=template.format(metric=metric, y1=y1, y2=y2),
                    gold_type="arithmetic",
                    gold_answer=AnswerValue(kind="number", number=answer.number),
                    gold_program=program,
                    gold_text_evidence=(relevant.para_id,),
                    gold_table_evidence=(
                        _cell_for(table, meta, metric, y1),
                        _cell_for(table, meta, metric, y2),
                    ),
                )
            )
        else:
            template = _SPAN_TEMPLATES[(i // 2) % len(_SPAN_TEMPLATES)]
            questions.append(
                Question(
                    q_id=f"{doc_prefix}q{i:03d}",
                    doc_id=doc_id,
                    text=template.format(metric=metric, value=f"{v1:,}"),
                    gold_type="span_selection",
                    gold_answer=AnswerValue(kind="text", text=y1),
                    gold_text_evidence=(relevant.para_id,),
                    gold_table_evidence=(_cell_for(table, meta, metric, y1),),
                )
            )
    return Corpus(tuple(documents), tuple(questions))


# ---------------------------------------------------------------------------
# Demonstrations authored from gold annotations


def _demo_context(corpus: Corpus, q: Question) -> str:
    doc = corpus.document(q.doc_id)
    parts = [p.text for p in doc.paragraphs if p.para_id in q.gold_text_evidence]
    if q.gold_type == "arithmetic":
        recs = reconstruct_tables(q, "arithmetic", doc.tables, q.gold_table_evidence)
        parts += [f"Table:\n{render_table(r.table)}" for r in recs]
    else:
        for ref in q.gold_table_evidence:
            parts.append(describe_cell(doc.table_by_id(ref.table_id), ref))
    return "\n".join(parts)


def _demo_chain(corpus: Corpus, q: Question) -> str:
    doc = corpus.document(q.doc_id)
    locations = []
    for ref in q.gold_table_evidence:
        table = doc.table_by_id(ref.table_id)
        locations.append(
            f"{table.raw_at(ref.row, 0).strip()} ({table.raw_at(ref.row, ref.col).strip()})"
        )
    found = "; ".join(locations) if locations else "the relevant paragraph"
    if q.gold_type == "arithmetic":
        return (
            f"we need to find the values mentioned in the question. "
            f"They are located in the table: {found}. "
            f"Then we compute the result from these values."
        )
    return (
        f"we need to find where the value appears. It is located in the table "
        f"under {found}."
    )


def make_demos(corpus: Corpus, per_type: int = 4) -> list[Demonstration]:
    demos = []
    for qtype in ("arithmetic", "span_selection"):
        picked = [q for q in corpus.questions if q.gold_type == qtype][:per_type]
        if len(picked) < per_type:
            raise ValueError(f"fixture corpus has too few {qtype} questions")
        for q in picked:
            answer = (
                q.gold_program
                if qtype == "arithmetic"
                else (q.gold_answer.text or "")
            )
            demos.append(
                Demonstration(
                    demo_id=f"demo-{q.q_id}",
                    qtype=qtype,
                    question=q.text,
                    context=_demo_context(corpus, q),
                    chain=_demo_chain(corpus, q),
                    answer=answer,
                )
            )
    return demos


def write_demo_dir(demos: Iterable[Demonstration], path: str | Path) -> Path:
    path = Path(path)
    for demo in demos:
        save_demo(demo, path)
    return path


# ---------------------------------------------------------------------------
# Mock completions authored from gold


def _gold_answer_text(q: Question) -> str:
    if q.gold_type == "arithmetic" and q.gold_program:
        return q.gold_program
    if q.gold_answer is None:
        return "unknown"
    if q.gold_answer.kind == "number":
        n = q.gold_answer.number
        return str(int(n)) if n == int(n) else f"{n}"
    return q.gold_answer.text


def author_mock_script(cfg, corpus: Corpus, path: str | Path) -> None:
    """Script the mock backend with gold-derived completions for a config.

    Mirrors the exact prompts the pipeline will build (same config), so a
    run against the script reproduces the gold answers.
    """
    from .pipeline import build_question_prompt, _load_demos_by_type
    from .promptkit import build_answer_extraction_prompt

    demos_by_type = _load_demos_by_type(cfg)
    entries: dict[str, str] = {}
    for q in corpus.questions:
        qtype, _, bundle, _, _ = build_question_prompt(cfg, corpus, q, demos_by_type)
        answer_text = _gold_answer_text(q)
        if cfg.shots == 0:
            chain = _demo_chain(corpus, q)
            entries[bundle.rendered] = chain
            second = build_answer_extraction_prompt(bundle.rendered, chain)
            entries[second] = f" {answer_text}."
        else:
            entries[bundle.rendered] = (
                f"{_demo_chain(corpus, q)}\n{ANSWER_TRIGGER} {answer_text}."
            )
    write_mock_script(entries, path)


# ---------------------------------------------------------------------------
# Classifier validation slice

_CLASSIFIER_TEMPLATES = (
    ("arithmetic", "What was the change in {metric} from {y2} to {y1}?"),
    ("arithmetic", "What is the average of {metric} in {y1} and {y2}?"),
    ("arithmetic", "What was the percentage change in {metric} during {y1}?"),
    ("arithmetic", "What was the ratio of {metric} in {y1} to that in {y2}?"),
    ("arithmetic", "What portion of {metric} was attributable to {group}?"),
    ("arithmetic", "How much did {metric} increase between {y2} and {y1}?"),
    ("arithmetic", "What was the sum of {metric} across {y1} and {y2}?"),
    ("arithmetic", "What is the total of {metric} for {group} in {y1}?"),
    ("arithmetic", "Was {metric} in {y1} greater than in {y2}?"),
    ("arithmetic", "What was the net change in {metric} over the period?"),
    ("arithmetic", "What was the difference between {metric} in {y1} and {y2}?"),
    ("arithmetic", "How many times larger was {metric} in {y1} than in {y2}?"),
    ("span_selection", "In what year is {metric} greater than {value}?"),
    ("span_selection", "In which year did the company report {metric} of {value}?"),
    ("span_selection", "Which year had the peak level of {metric}?"),
    ("span_selection", "What year saw {metric} reach {value}?"),
    ("span_selection", "Which segment contributed the most to {metric} in {y1}?"),
    ("span_selection", "What was the value of {metric} in {y1}?"),
    ("span_selection", "When did {metric} first exceed {value}?"),
    ("span_selection", "What is the amount of {metric} as of {y1}?"),
    # no keyword coverage on purpose: plain lookups fall through to the
    # arithmetic default and keep the reported accuracy honest
    ("span_selection", "What was {metric} for {group} in {y1}?"),
)


def build_classifier_slice(n: int = 200, seed: int = 13) -> list[tuple[str, str]]:
    """(question text, gold label) pairs from varied financial phrasings."""
    rng = random.Random(seed)
    out = []
    for i in range(n):
        label, template = _CLASSIFIER_TEMPLATES[i % len(_CLASSIFIER_TEMPLATES)]
        y1, y2 = rng.sample(list(YEARS), 2)
        text = template.format(
            metric=rng.choice(METRICS),
            group=rng.choice(GROUPS),
            y1=y1,
            y2=y2,
            value=f"{rng.randint(100, 99999):,}",
        )
        out.append((text, label))
    return out
