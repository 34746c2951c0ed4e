"""Three-stage pipeline: retrieve, rebuild tables, prompt and score.

Per question: classify the type, score and select evidence, reconstruct the
evidence-bearing tables (arithmetic) or keep descriptions (span selection),
build the prompt, complete (two calls for zero-shot, one for few-shot),
extract and score the answer. Every stage's output is persisted as JSONL
under the run's output directory so each stage is rerunnable from artifacts
alone; per-question failures land in a quarantine file instead of aborting
the run.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping

from . import promptkit
from .corpus import Corpus, Question, ingest_corpus, write_jsonl
from .errors import ConfigError, DataError, TtqaError
from .evalmetrics import (
    PredictionRecord,
    build_report,
    record_to_dict,
)
from .llmgateway import (
    CompletionCache,
    CompletionRequest,
    HttpBackend,
    LlmGateway,
    MockBackend,
    prompt_hash,
)
from .programdsl import NormalizedAnswer, extract_answer
from .promptkit import Demonstration, PreparedEvidence, PromptBundle
from .reconstruct import reconstruct_tables, reconstruction_to_dict
from .retrieval import (
    Evidence,
    RetrievalConfig,
    build_candidates,
    classify_question,
    evidence_recall,
    load_external_labels,
    load_external_scores,
    score_candidates,
    select_topk,
)
from .tabletree import render_table


@dataclass
class RunConfig:
    corpus_path: str
    corpus_format: str = "canonical"
    split: str = "dev"
    retrieval: RetrievalConfig = field(default_factory=RetrievalConfig)
    classifier: str = "rules"  # "rules" | "external"
    strategy: str = "hrot"  # "hrot" | "cot"
    shots: int = 0
    llm_backend: str = "mock"  # "mock" | "http"
    model_name: str = "mock"
    max_tokens: int = 512
    temperature: float = 0.0
    base_url: str = ""
    api_key_env: str = "TTQA_API_KEY"
    mock_script: str | None = None
    cache_path: str | None = None  # default: <output_dir>/cache.jsonl
    demo_dir: str | None = None
    seed: int = 0
    output_dir: str = "run_output"
    scores_path: str | None = None
    labels_path: str | None = None
    concurrency: int = 4
    demo_context_chars: int = 0  # truncate demo contexts; 0 keeps them whole
    max_questions: int | None = None

    def __post_init__(self):
        if self.strategy not in promptkit.STRATEGIES:
            raise ConfigError(f"unknown strategy {self.strategy!r}")
        if not 0 <= self.shots <= 4:
            raise ConfigError(f"shots must be in 0..4, got {self.shots}")
        if self.llm_backend not in ("mock", "http"):
            raise ConfigError(f"unknown llm backend {self.llm_backend!r}")
        if self.llm_backend == "mock" and not self.mock_script:
            raise ConfigError("mock backend requires mock_script")
        if self.llm_backend == "http" and not self.base_url:
            raise ConfigError("http backend requires base_url")
        if self.concurrency < 1:
            raise ConfigError("concurrency must be >= 1")

    @staticmethod
    def from_dict(raw: Mapping) -> "RunConfig":
        data = dict(raw)
        retrieval = data.pop("retrieval", {})
        if isinstance(retrieval, Mapping):
            retrieval = RetrievalConfig(**retrieval)
        try:
            return RunConfig(retrieval=retrieval, **data)
        except TypeError as exc:
            raise ConfigError(f"bad run config: {exc}") from None

    @staticmethod
    def load(path: str | Path) -> "RunConfig":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
        return RunConfig.from_dict(raw)


def gold_normalized(q: Question) -> NormalizedAnswer | None:
    if q.gold_answer is None:
        return None
    if q.gold_answer.kind == "number":
        return NormalizedAnswer(kind="number", number=q.gold_answer.number)
    return NormalizedAnswer(kind="text", text=q.gold_answer.text)


def prepare_evidence(
    corpus: Corpus,
    question: Question,
    qtype: str,
    evidence: Evidence,
    strategy: str,
) -> tuple[PreparedEvidence, list[dict]]:
    """Join evidence ids back to payloads and build the prompt context.

    Returns the prepared context plus reconstruction audit records (empty
    unless reconstruction ran).
    """
    doc = corpus.document(question.doc_id)
    cands = build_candidates(doc, question.q_id)
    text_by_id = dict(cands.texts)
    desc_by_id = {did: (text, cell) for did, text, cell in cands.descs}
    texts = tuple(text_by_id[tid] for tid in evidence.text_ids)
    audits: list[dict] = []
    if strategy == "hrot" and qtype == "arithmetic":
        cells = [desc_by_id[did][1] for did in evidence.desc_ids]
        recs = reconstruct_tables(question, qtype, doc.tables, cells)
        for rec in recs:
            audit = {"q_id": question.q_id}
            audit.update(reconstruction_to_dict(rec))
            audits.append(audit)
        return (
            PreparedEvidence(
                texts=texts,
                tables=tuple(render_table(r.table) for r in recs),
            ),
            audits,
        )
    descriptions = tuple(desc_by_id[did][0] for did in evidence.desc_ids)
    return PreparedEvidence(texts=texts, descriptions=descriptions), audits


def _truncate_context(demo: Demonstration, limit: int) -> Demonstration:
    if limit <= 0 or len(demo.context) <= limit:
        return demo
    return replace(demo, context=demo.context[:limit])


def build_question_prompt(
    cfg: RunConfig,
    corpus: Corpus,
    question: Question,
    demos_by_type: Mapping[str, list[Demonstration]],
    external_scores: Mapping[tuple[str, str], float] | None = None,
    external_labels: Mapping[str, str] | None = None,
) -> tuple[str, Evidence, PromptBundle, list[dict], list]:
    """Run the pre-LLM stages for one question.

    Returns (qtype, evidence, bundle, reconstruction audits, scores).
    """
    doc = corpus.document(question.doc_id)
    qtype = classify_question(question, cfg.classifier, labels=external_labels)
    cands = build_candidates(doc, question.q_id)
    scores = score_candidates(
        question, cands, cfg.retrieval.scorer, external_scores=external_scores
    )
    evidence = select_topk(scores, cfg.retrieval)
    prepared, audits = prepare_evidence(corpus, question, qtype, evidence, cfg.strategy)
    if cfg.shots == 0:
        bundle = promptkit.build_zero_shot(prepared, question, cfg.strategy)
    else:
        demos = demos_by_type.get(qtype, [])[: cfg.shots]
        if len(demos) < cfg.shots:
            raise ConfigError(
                f"demo dir lacks {cfg.shots} demonstrations of type {qtype!r}; "
                f"run select-demos first"
            )
        demos = [_truncate_context(d, cfg.demo_context_chars) for d in demos]
        bundle = promptkit.build_few_shot(
            demos, prepared, question, cfg.strategy, qtype=qtype
        )
    return qtype, evidence, bundle, audits, scores


def _complete_question(
    cfg: RunConfig,
    gateway: LlmGateway,
    qtype: str,
    bundle: PromptBundle,
) -> tuple[NormalizedAnswer | None, str, list[dict]]:
    """LLM calls for one question: (answer, final prompt, completion records)."""

    def call(prompt: str) -> str:
        req = CompletionRequest(
            prompt=prompt,
            temperature=cfg.temperature,
            max_tokens=cfg.max_tokens,
            model_name=cfg.model_name,
        )
        return gateway.complete(req).text

    completions: list[dict] = []
    first_prompt = bundle.rendered
    first_out = call(first_prompt)
    completions.append({"prompt_sha256": prompt_hash(first_prompt), "text": first_out})
    if cfg.shots == 0:
        second_prompt = promptkit.build_answer_extraction_prompt(first_prompt, first_out)
        second_out = call(second_prompt)
        completions.append(
            {"prompt_sha256": prompt_hash(second_prompt), "text": second_out}
        )
        return extract_answer(second_out, qtype), second_prompt, completions
    return extract_answer(first_out, qtype), first_prompt, completions


def _load_demos_by_type(cfg: RunConfig) -> dict[str, list[Demonstration]]:
    if cfg.shots == 0:
        return {}
    if not cfg.demo_dir:
        raise ConfigError("shots >= 1 requires demo_dir")
    out = {}
    for qtype in ("arithmetic", "span_selection"):
        demos = promptkit.load_demos(cfg.demo_dir, qtype)
        if len(demos) < cfg.shots:
            raise ConfigError(
                f"demo dir {cfg.demo_dir} has {len(demos)} {qtype} demonstrations, "
                f"need {cfg.shots}; run select-demos and fill the stubs"
            )
        out[qtype] = demos
    return out


def _build_gateway(cfg: RunConfig) -> LlmGateway:
    cache_path = cfg.cache_path or str(Path(cfg.output_dir) / "cache.jsonl")
    cache = CompletionCache(cache_path)
    if cfg.llm_backend == "mock":
        backend = MockBackend.from_file(cfg.mock_script)
    else:
        backend = HttpBackend(cfg.base_url, cfg.api_key_env)
    return LlmGateway(backend, cache, max_in_flight=cfg.concurrency)


def run_pipeline(cfg: RunConfig):
    """Execute the full pipeline; returns (MetricsReport, rendered report)."""
    corpus = ingest_corpus(cfg.corpus_path, cfg.corpus_format)
    questions = list(corpus.questions)
    if cfg.max_questions is not None:
        questions = questions[: cfg.max_questions]
    if not questions:
        raise DataError("corpus contains no questions")

    demos_by_type = _load_demos_by_type(cfg)
    external_scores = (
        load_external_scores(cfg.scores_path) if cfg.retrieval.scorer == "external" else None
    )
    if cfg.retrieval.scorer == "external" and cfg.scores_path is None:
        raise ConfigError("external scorer requires scores_path")
    external_labels = (
        load_external_labels(cfg.labels_path) if cfg.classifier == "external" else None
    )
    if cfg.classifier == "external" and cfg.labels_path is None:
        raise ConfigError("external classifier requires labels_path")
    gateway = _build_gateway(cfg)

    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    def flow(question: Question) -> dict:
        result = {"q_id": question.q_id}
        try:
            qtype, evidence, bundle, audits, scores = build_question_prompt(
                cfg, corpus, question, demos_by_type, external_scores, external_labels
            )
            answer, final_prompt, completions = _complete_question(
                cfg, gateway, qtype, bundle
            )
            result.update(
                qtype=qtype,
                evidence=evidence,
                audits=audits,
                scores=scores,
                prompt=final_prompt,
                completions=completions,
                record=PredictionRecord(
                    q_id=question.q_id,
                    qtype=qtype,
                    predicted=answer,
                    gold=gold_normalized(question),
                    prompt_hash=prompt_hash(final_prompt),
                    shots=cfg.shots,
                    strategy=cfg.strategy,
                ),
            )
        except TtqaError as exc:
            result["error"] = {"q_id": question.q_id, "stage": type(exc).__name__,
                               "error": str(exc)}
        return result

    if cfg.concurrency == 1:
        results = [flow(q) for q in questions]
    else:
        with ThreadPoolExecutor(max_workers=cfg.concurrency) as pool:
            results = list(pool.map(flow, questions))

    # persist artifacts in corpus question order
    labels_out, scores_out, evidence_out = [], [], []
    recon_out, prompts_out, completions_out = [], [], []
    predictions_out, errors_out = [], []
    records = []
    evidences = []
    for res in results:
        if "error" in res:
            errors_out.append(res["error"])
            continue
        labels_out.append({"q_id": res["q_id"], "label": res["qtype"]})
        for s in res["scores"]:
            scores_out.append(
                {"q_id": s.q_id, "candidate_id": s.candidate_id, "kind": s.kind,
                 "score": s.score}
            )
        ev = res["evidence"]
        evidences.append(ev)
        evidence_out.append(
            {"q_id": ev.q_id, "text_ids": list(ev.text_ids), "desc_ids": list(ev.desc_ids)}
        )
        recon_out.extend(res["audits"])
        prompts_out.append(
            {"q_id": res["q_id"], "prompt_sha256": prompt_hash(res["prompt"]),
             "rendered": res["prompt"]}
        )
        for c in res["completions"]:
            completions_out.append({"q_id": res["q_id"], **c})
        rec = res["record"]
        predictions_out.append(record_to_dict(rec))
        if rec.gold is not None:
            records.append(rec)

    write_jsonl(labels_out, out_dir / "type_labels.jsonl")
    write_jsonl(scores_out, out_dir / "scores.jsonl")
    write_jsonl(evidence_out, out_dir / "evidence.jsonl")
    write_jsonl(recon_out, out_dir / "reconstructions.jsonl")
    write_jsonl(prompts_out, out_dir / "prompts.jsonl")
    write_jsonl(completions_out, out_dir / "completions.jsonl")
    write_jsonl(predictions_out, out_dir / "predictions.jsonl")
    write_jsonl(errors_out, out_dir / "errors.jsonl")

    if not records:
        raise DataError("no scoreable predictions (all failed or gold missing)")
    report, rendered = build_report(records, layout="main")

    scored = [q for q in questions if q.q_id in {r.q_id for r in records}]
    recall_stats = {}
    for kind in ("text", "table_desc"):
        try:
            recall_stats[kind] = evidence_recall(evidences, scored, kind)
        except DataError:
            pass
    (out_dir / "report.json").write_text(
        json.dumps(
            {
                "em": report.em,
                "f1": report.f1,
                "n_questions": report.n_questions,
                "breakdowns": report.breakdowns,
                "recall": recall_stats,
                "n_errors": len(errors_out),
            },
            indent=2,
            sort_keys=True,
        )
        + "\n",
        encoding="utf-8",
    )
    (out_dir / "report.txt").write_text(rendered + "\n", encoding="utf-8")
    return report, rendered
