import pytest

from tabletextqa.corpus import Document, Paragraph, Question
from tabletextqa.errors import ConfigError, DataError
from tabletextqa.retrieval import (
    CandidateSet,
    RelevanceScore,
    RetrievalConfig,
    build_candidates,
    classify_question,
    cosine_tf,
    evidence_recall,
    recall_at_k,
    score_candidates,
    select_topk,
)
from tabletextqa.synth import build_classifier_slice
from tabletextqa.tabletree import CellRef, HierTable

from oracles import oracle_cosine


def make_question(text, q_id="q0", **kwargs):
    return Question(q_id=q_id, doc_id="d0", text=text, **kwargs)


class TestClassifyQuestion:
    def test_average_is_arithmetic(self):
        q = make_question("What is the average of Revenue in 2018 and 2019?")
        assert classify_question(q) == "arithmetic"

    def test_year_lookup_is_span_selection(self):
        q = make_question("In what year is Home equity greater than 13000?")
        assert classify_question(q) == "span_selection"

    def test_no_keyword_defaults_to_arithmetic(self):
        q = make_question("Quantify the flux capacitance please.")
        assert classify_question(q) == "arithmetic"

    def test_empty_text_rejected(self):
        with pytest.raises(DataError):
            classify_question(make_question("  "))

    def test_external_backend_reads_labels(self):
        q = make_question("anything", q_id="q7")
        assert classify_question(q, "external", labels={"q7": "span_selection"}) == (
            "span_selection"
        )
        with pytest.raises(DataError, match="q7"):
            classify_question(q, "external", labels={})

    def test_dev_slice_accuracy_reported(self):
        slice_ = build_classifier_slice(n=200, seed=13)
        hits = 0
        for i, (text, gold) in enumerate(slice_):
            predicted = classify_question(make_question(text, q_id=f"s{i}"))
            hits += int(predicted == gold)
        accuracy = hits / len(slice_)
        print(f"\nrules classifier accuracy on 200-question dev slice: {accuracy:.3f}")
        assert accuracy >= 0.9


def small_candidates(q_id="q0"):
    return CandidateSet(
        q_id=q_id,
        texts=(
            ("p0", "Revenue was 100 in 2019."),
            ("p1", "The notes accompany the statements."),
        ),
        descs=(
            ("t0-1-1", "For Revenue, the 2019 is 100.", CellRef("t0", 1, 1)),
            ("t0-1-2", "For Revenue, the 2018 is 90.", CellRef("t0", 1, 2)),
        ),
    )


class TestScoreCandidates:
    def test_oracle_scores_gold_one(self):
        q = make_question(
            "What was Revenue in 2019?",
            gold_text_evidence=("p0",),
            gold_table_evidence=(CellRef("t0", 1, 1),),
        )
        scores = {s.candidate_id: s.score for s in score_candidates(q, small_candidates(), "oracle")}
        assert scores == {"p0": 1.0, "p1": 0.0, "t0-1-1": 1.0, "t0-1-2": 0.0}

    def test_lexical_identical_string_is_maximal(self):
        q = make_question("The notes accompany the statements.")
        scores = score_candidates(q, small_candidates(), "lexical")
        best = max(scores, key=lambda s: s.score)
        assert best.candidate_id == "p1"
        assert best.score == pytest.approx(1.0)

    def test_lexical_matches_brute_force_cosine_on_ten_candidates(self):
        texts = tuple(
            (f"p{i}", f"Paragraph number {i} mentions revenue {'growth ' * (i % 3)}in 2019.")
            for i in range(10)
        )
        cands = CandidateSet(q_id="q0", texts=texts, descs=())
        q = make_question("What was the revenue growth in 2019?")
        scores = score_candidates(q, cands, "lexical")
        expected = {pid: oracle_cosine(q.text, text) for pid, text in texts}
        for s in scores:
            assert s.score == pytest.approx(expected[s.candidate_id], abs=1e-12)
        ranked = select_topk(scores, RetrievalConfig(n=10, m=1)).text_ids
        brute_ranked = tuple(
            pid for pid, _ in sorted(texts, key=lambda kv: (-expected[kv[0]], kv[0]))
        )
        assert ranked == brute_ranked

    def test_external_scorer_missing_candidate_listed(self):
        q = make_question("anything")
        with pytest.raises(DataError, match="t0-1-2"):
            score_candidates(
                q,
                small_candidates(),
                "external",
                external_scores={
                    ("q0", "p0"): 0.8,
                    ("q0", "p1"): 0.1,
                    ("q0", "t0-1-1"): 0.9,
                },
            )

    def test_unknown_scorer_rejected(self):
        with pytest.raises(ConfigError):
            score_candidates(make_question("x"), small_candidates(), "bm25")


class TestSelectTopk:
    def test_fewer_candidates_than_k(self):
        scores = [
            RelevanceScore("q0", f"p{i}", "text", 1.0 - i / 10) for i in range(3)
        ]
        ev = select_topk(scores, RetrievalConfig(n=5, m=10))
        assert ev.text_ids == ("p0", "p1", "p2")

    def test_tie_break_by_candidate_id(self):
        scores = [
            RelevanceScore("q0", "b", "text", 0.9),
            RelevanceScore("q0", "a", "text", 0.9),
            RelevanceScore("q0", "c", "text", 0.1),
        ]
        ev = select_topk(scores, RetrievalConfig(n=2, m=1))
        assert ev.text_ids == ("a", "b")

    def test_oracle_retrieval_gets_full_recall(self):
        q = make_question(
            "What was Revenue in 2019?",
            gold_text_evidence=("p0",),
            gold_table_evidence=(CellRef("t0", 1, 1),),
        )
        scores = score_candidates(q, small_candidates(), "oracle")
        ev = select_topk(scores, RetrievalConfig(n=5, m=10))
        assert evidence_recall([ev], [q], "text") == 1.0
        assert evidence_recall([ev], [q], "table_desc") == 1.0


class TestRecallAtK:
    def test_all_gold_retrieved(self):
        assert recall_at_k({"q0": ["a", "b"]}, {"q0": ["a", "b"]}, "text") == 1.0

    def test_none_retrieved(self):
        assert recall_at_k({"q0": []}, {"q0": ["a"]}, "text") == 0.0

    def test_micro_average(self):
        preds = {"q0": ["a"], "q1": ["c"]}
        gold = {"q0": ["a", "b"], "q1": ["c", "d"]}
        assert recall_at_k(preds, gold, "text") == 0.5

    def test_empty_gold_excluded(self):
        preds = {"q0": ["a"], "q1": ["z"]}
        gold = {"q0": ["a"], "q1": []}
        assert recall_at_k(preds, gold, "text") == 1.0

    def test_nondecreasing_in_k(self):
        scores = [
            RelevanceScore("q0", f"c{i}", "text", float(10 - i)) for i in range(10)
        ]
        gold = {"q0": ["c2", "c5", "c8"]}
        previous = 0.0
        for k in range(1, 11):
            ev = select_topk(scores, RetrievalConfig(n=k, m=1))
            value = recall_at_k({"q0": ev.text_ids}, gold, "text")
            assert value >= previous
            previous = value
        assert previous == 1.0


class TestBuildCandidates:
    def test_counts_from_document(self, fixture_corpus):
        q = fixture_corpus.questions[0]
        doc = fixture_corpus.document(q.doc_id)
        cands = build_candidates(doc, q.q_id)
        assert len(cands.texts) == len(doc.paragraphs)
        assert len(cands.descs) == sum(
            1
            for t in doc.tables
            for r in range(t.header_rows_end + 1, t.n_rows)
            for c in range(t.header_cols_end + 1, t.n_cols)
            if t.raw_at(r, c).strip()
        )
