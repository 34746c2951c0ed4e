import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tabletextqa.corpus import write_corpus
from tabletextqa.pipeline import RunConfig
from tabletextqa.retrieval import RetrievalConfig
from tabletextqa.synth import (
    author_mock_script,
    build_fixture_corpus,
    fig3_style_table,
    make_demos,
    write_demo_dir,
)


@pytest.fixture(scope="session")
def fig3_table():
    return fig3_style_table()


@pytest.fixture(scope="session")
def fixture_corpus():
    return build_fixture_corpus(n_questions=20, seed=7)


@pytest.fixture(scope="session")
def e2e_setup(tmp_path_factory, fixture_corpus):
    """Corpus file, demo dir and authored mock script for the 20-question
    few-shot run; returns a factory for configs over fresh output dirs."""
    root = tmp_path_factory.mktemp("e2e")
    corpus_path = root / "corpus.jsonl"
    write_corpus(fixture_corpus, corpus_path)
    demo_corpus = build_fixture_corpus(n_questions=10, seed=99, doc_prefix="demo")
    demo_dir = write_demo_dir(make_demos(demo_corpus, per_type=4), root / "demos")
    mock_path = root / "mock_fewshot.jsonl"

    def make_config(out_name, **overrides):
        kwargs = dict(
            corpus_path=str(corpus_path),
            retrieval=RetrievalConfig(scorer="oracle"),
            strategy="hrot",
            shots=4,
            llm_backend="mock",
            mock_script=str(mock_path),
            demo_dir=str(demo_dir),
            output_dir=str(root / out_name),
        )
        kwargs.update(overrides)
        return RunConfig(**kwargs)

    author_mock_script(make_config("_author"), fixture_corpus, mock_path)
    return {"root": root, "corpus": fixture_corpus, "make_config": make_config,
            "corpus_path": corpus_path, "demo_dir": demo_dir, "mock_path": mock_path}
