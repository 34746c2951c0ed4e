import random

import numpy as np
import pytest

from tabletextqa.corpus import Question
from tabletextqa.errors import DataError
from tabletextqa.promptkit import (
    ANSWER_TRIGGER,
    COT_TRIGGER,
    FEW_SHOT_TRIGGER,
    ZERO_SHOT_TRIGGER,
    Demonstration,
    PreparedEvidence,
    answer_trigger,
    build_answer_extraction_prompt,
    build_few_shot,
    build_zero_shot,
    demo_from_text,
    demo_to_text,
    embed_questions,
    load_demos,
    save_demo,
    select_demos,
)


def make_question(text="What was the change in Revenue from 2018 to 2019?", q_id="q0"):
    return Question(q_id=q_id, doc_id="d0", text=text, gold_type="arithmetic")


def evidence():
    return PreparedEvidence(
        texts=("Revenue was 100 in 2019.",),
        tables=("| | 2019 |\n| Revenue | 100 |",),
    )


def make_demo(demo_id="demo-0", qtype="arithmetic", answer="subtract(100, 90)"):
    return Demonstration(
        demo_id=demo_id,
        qtype=qtype,
        question="What was the change in Revenue?",
        context="Revenue was 100 in 2019 and 90 in 2018.",
        chain="we need to find Revenue for both years in the table.",
        answer=answer,
    )


class TestTriggerConstants:
    def test_zero_shot_trigger_verbatim(self):
        assert ZERO_SHOT_TRIGGER == (
            "Let's retrieve above text and table step by step and then think step "
            "by step to answer the question. First, based on the question, we need "
            "to find"
        )

    def test_few_shot_trigger_verbatim(self):
        assert FEW_SHOT_TRIGGER == "Let's retrieve above text and table step by step"

    def test_answer_trigger_verbatim(self):
        assert answer_trigger() == "Therefore, the answer to the question is"
        assert ANSWER_TRIGGER == answer_trigger()

    def test_cot_trigger_verbatim(self):
        assert COT_TRIGGER == "Let's think step by step"

    def test_no_trailing_whitespace(self):
        for trigger in (ZERO_SHOT_TRIGGER, FEW_SHOT_TRIGGER, ANSWER_TRIGGER, COT_TRIGGER):
            assert trigger == trigger.strip()


class TestZeroShot:
    def test_hrot_ends_with_trigger(self):
        bundle = build_zero_shot(evidence(), make_question(), "hrot")
        assert bundle.rendered.endswith("we need to find")
        assert bundle.rendered.endswith(ZERO_SHOT_TRIGGER)

    def test_cot_has_no_reconstructed_tables(self):
        ev = PreparedEvidence(
            texts=("Revenue was 100 in 2019.",),
            descriptions=("For Revenue, the 2019 is 100.",),
        )
        bundle = build_zero_shot(ev, make_question(), "cot")
        assert bundle.rendered.endswith(COT_TRIGGER)
        assert "Table:\n" not in bundle.rendered
        with pytest.raises(DataError):
            build_zero_shot(evidence(), make_question(), "cot")

    def test_table_only_context(self):
        ev = PreparedEvidence(tables=("| x |",))
        bundle = build_zero_shot(ev, make_question(), "hrot")
        roles = [s.role for s in bundle.segments]
        assert roles == ["context_table", "question", "trigger"]

    def test_empty_evidence_rejected(self):
        with pytest.raises(DataError, match="retrieval"):
            build_zero_shot(PreparedEvidence(), make_question(), "hrot")

    def test_context_order_texts_then_tables(self):
        bundle = build_zero_shot(evidence(), make_question(), "hrot")
        roles = [s.role for s in bundle.segments]
        assert roles == ["context_text", "context_table", "question", "trigger"]

    def test_deterministic_bytes(self):
        a = build_zero_shot(evidence(), make_question(), "hrot").rendered
        b = build_zero_shot(evidence(), make_question(), "hrot").rendered
        assert a == b

    def test_second_call_ends_with_answer_trigger(self):
        bundle = build_zero_shot(evidence(), make_question(), "hrot")
        second = build_answer_extraction_prompt(bundle.rendered, "the value is 10")
        assert second.endswith(ANSWER_TRIGGER)
        assert second.startswith(bundle.rendered)


class TestFewShot:
    def test_demo_segments_in_order(self):
        demos = [make_demo(f"demo-{i}") for i in range(4)]
        bundle = build_few_shot(demos, evidence(), make_question())
        demo_segments = [s for s in bundle.segments if s.role == "demonstration"]
        assert len(demo_segments) == 4
        for i, seg in enumerate(demo_segments):
            assert seg.text.startswith(demos[i].context)
            assert FEW_SHOT_TRIGGER in seg.text
            assert f"{ANSWER_TRIGGER} {demos[i].answer}" in seg.text

    def test_query_block_ends_with_few_shot_trigger(self):
        bundle = build_few_shot([make_demo()], evidence(), make_question())
        assert bundle.rendered.endswith(FEW_SHOT_TRIGGER)
        assert not bundle.rendered.endswith(ZERO_SHOT_TRIGGER)

    def test_zero_demos_rejected(self):
        with pytest.raises(DataError, match="build_zero_shot"):
            build_few_shot([], evidence(), make_question())

    def test_qtype_mismatch_rejected(self):
        demo = make_demo(qtype="span_selection", answer="2019")
        with pytest.raises(DataError, match="span_selection"):
            build_few_shot([demo], evidence(), make_question())


class TestDemoStore:
    def test_roundtrip(self, tmp_path):
        demo = make_demo()
        save_demo(demo, tmp_path)
        loaded = load_demos(tmp_path)
        assert loaded == [demo]

    def test_sections_format(self):
        text = demo_to_text(make_demo())
        for section in ("### qtype", "### question", "### context", "### chain", "### answer"):
            assert section in text

    def test_missing_section_rejected(self):
        with pytest.raises(DataError, match="answer"):
            demo_from_text("d", "### qtype\narithmetic\n### question\nQ?\n")

    def test_filter_by_qtype(self, tmp_path):
        save_demo(make_demo("demo-a"), tmp_path)
        save_demo(make_demo("demo-s", qtype="span_selection", answer="2019"), tmp_path)
        assert [d.demo_id for d in load_demos(tmp_path, "arithmetic")] == ["demo-a"]

    def test_arithmetic_answer_must_parse(self):
        demo = make_demo(answer="not a program")
        with pytest.raises(Exception):
            demo.validate()
        make_demo().validate()


class TestSelectDemos:
    def test_identical_questions_tie_break_by_id(self):
        questions = [
            Question(q_id="qb", doc_id="d", text="same text", gold_type="arithmetic"),
            Question(q_id="qa", doc_id="d", text="same text", gold_type="arithmetic"),
        ]
        picked = select_demos(questions, "arithmetic", k=1, seed=0)
        assert picked[0].demo_id == "qa"

    def test_two_separated_clusters_get_one_rep_each(self):
        # member 0 of each family carries the bare base phrase, so it is the
        # unique nearest point to its cluster mean; others add noise tokens
        def family(tag, base):
            return [
                Question(
                    q_id=f"{tag}{i}",
                    doc_id="d",
                    gold_type="arithmetic",
                    text=base if i == 0 else f"{base} {' '.join(f'{tag}noise{i}{j}' for j in range(3))}",
                )
                for i in range(5)
            ]

        cluster_a = family("a", "average revenue profit margin growth")
        cluster_b = family("b", "lease obligations maturity schedule payments")
        picked = select_demos(cluster_a + cluster_b, "arithmetic", k=2, seed=3)
        families = {d.demo_id[0] for d in picked}
        assert families == {"a", "b"}
        # brute-force: each pick is the nearest question to its own cluster mean
        texts = [q.text for q in cluster_a + cluster_b]
        points = embed_questions(texts)
        ids = [q.q_id for q in cluster_a + cluster_b]
        for demo in picked:
            members = [i for i, qid in enumerate(ids) if qid[0] == demo.demo_id[0]]
            centroid = points[members].mean(axis=0)
            sims = points @ centroid / np.linalg.norm(centroid)
            best = max(members, key=lambda i: sims[i])
            assert ids[best] == demo.demo_id

    def test_qtypes_clustered_separately(self, fixture_corpus):
        picked = select_demos(fixture_corpus.questions, "arithmetic", k=4, seed=0)
        assert len(picked) == 4
        assert all(d.qtype == "arithmetic" for d in picked)

    def test_too_few_questions_rejected(self):
        questions = [
            Question(q_id="q0", doc_id="d", text="only one", gold_type="arithmetic")
        ]
        with pytest.raises(DataError, match="at least 2"):
            select_demos(questions, "arithmetic", k=2)

    def test_deterministic_given_seed(self, fixture_corpus):
        a = select_demos(fixture_corpus.questions, "span_selection", k=3, seed=42)
        b = select_demos(fixture_corpus.questions, "span_selection", k=3, seed=42)
        assert [d.demo_id for d in a] == [d.demo_id for d in b]
