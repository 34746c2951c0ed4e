"""The full pipeline on a synthetic corpus with a scripted mock model.

Builds a 20-question corpus, authors demonstrations and mock completions
from the gold annotations, runs retrieve -> reconstruct -> prompt ->
complete -> extract -> score, and prints the report. No network, fully
deterministic; rerunning reuses the completion cache.
"""

import tempfile
from pathlib import Path

from tabletextqa import RetrievalConfig, RunConfig, run_pipeline, write_corpus
from tabletextqa.synth import (
    author_mock_script,
    build_fixture_corpus,
    make_demos,
    write_demo_dir,
)

workdir = Path(tempfile.mkdtemp(prefix="ttqa_demo_"))
print("working directory:", workdir)

corpus = build_fixture_corpus(n_questions=20, seed=7)
write_corpus(corpus, workdir / "corpus.jsonl")

demo_corpus = build_fixture_corpus(n_questions=10, seed=99, doc_prefix="demo")
write_demo_dir(make_demos(demo_corpus, per_type=4), workdir / "demos")

config = RunConfig(
    corpus_path=str(workdir / "corpus.jsonl"),
    retrieval=RetrievalConfig(n=5, m=10, scorer="oracle"),
    strategy="hrot",
    shots=4,
    llm_backend="mock",
    mock_script=str(workdir / "mock.jsonl"),
    demo_dir=str(workdir / "demos"),
    output_dir=str(workdir / "out"),
)
author_mock_script(config, corpus, workdir / "mock.jsonl")

report, rendered = run_pipeline(config)
print()
print(rendered)
print(f"\nEM {report.em:.4f} | F1 {report.f1:.4f} over {report.n_questions} questions")
print("\nartifacts:")
for path in sorted((workdir / "out").iterdir()):
    print("  ", path.name)
