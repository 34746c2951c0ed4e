"""Question typing, candidate scoring and top-k selection with recall@k."""

from tabletextqa import RetrievalConfig, classify_question, select_topk
from tabletextqa.retrieval import build_candidates, evidence_recall, score_candidates
from tabletextqa.synth import build_fixture_corpus

corpus = build_fixture_corpus(n_questions=6, seed=42)

print("1. rules-based question typing")
for q in corpus.questions[:4]:
    print(f"   {classify_question(q):14s} | {q.text}")

print("\n2. scoring paragraphs + table descriptions, top 5 texts / top 10 descs")
config = RetrievalConfig(n=5, m=10, scorer="lexical")
evidences = []
for q in corpus.questions:
    cands = build_candidates(corpus.document(q.doc_id), q.q_id)
    scores = score_candidates(q, cands, config.scorer)
    evidences.append(select_topk(scores, config))
first = evidences[0]
print(f"   {first.q_id}: texts {list(first.text_ids)}")
print(f"   {first.q_id}: top descs {list(first.desc_ids[:3])} ...")

print("\n3. micro-averaged recall@k against gold evidence")
for kind in ("text", "table_desc"):
    print(f"   lexical {kind} recall: {evidence_recall(evidences, corpus.questions, kind):.3f}")

oracle_evidences = []
for q in corpus.questions:
    cands = build_candidates(corpus.document(q.doc_id), q.q_id)
    oracle_evidences.append(select_topk(score_candidates(q, cands, "oracle"), config))
print(f"   oracle  text recall: {evidence_recall(oracle_evidences, corpus.questions, 'text'):.3f}")
