"""Command-line entry point.

Subcommands mirror the pipeline stages and exchange JSONL artifacts, so each
stage can rerun from the previous stage's files alone:

    ttqa ingest       raw release or canonical file -> canonical corpus
    ttqa retrieve     corpus -> type labels, scores, selected evidence
    ttqa reconstruct  corpus + evidence -> reconstructed sub-tables
    ttqa select-demos corpus -> demonstration stubs (k-means)
    ttqa run          config file -> full pipeline + report
    ttqa eval         predictions -> metrics report
    ttqa report       predictions -> rendered table layout

Exit codes: 0 ok, 1 config error, 2 data error, 3 backend error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .corpus import ingest_corpus, read_jsonl, write_corpus, write_jsonl
from .errors import BackendError, ConfigError, DataError
from .evalmetrics import build_report, record_from_dict
from .pipeline import RunConfig, run_pipeline
from .promptkit import save_demo, select_demos
from .reconstruct import reconstruct_tables, reconstruction_to_dict
from .retrieval import (
    RetrievalConfig,
    build_candidates,
    classify_question,
    evidence_recall,
    load_external_labels,
    load_external_scores,
    score_candidates,
    select_topk,
)
from .tabletree import CellRef


def _cmd_ingest(args) -> int:
    corpus = ingest_corpus(args.input, args.format, infer_bands=not args.no_infer_bands)
    write_corpus(corpus, args.output)
    print(
        f"ingested {len(corpus.documents)} documents, "
        f"{len(corpus.questions)} questions -> {args.output}"
    )
    if args.descriptions:
        from .tabletree import description_to_dict, linearize

        descs = [
            description_to_dict(d)
            for doc in corpus.documents
            for table in doc.tables
            for d in linearize(table)
        ]
        write_jsonl(descs, args.descriptions)
        print(f"wrote {len(descs)} table descriptions -> {args.descriptions}")
    return 0


def _cmd_retrieve(args) -> int:
    corpus = ingest_corpus(args.corpus, "canonical")
    config = RetrievalConfig(n=args.n, m=args.m, scorer=args.scorer)
    external_scores = load_external_scores(args.scores) if args.scores else None
    external_labels = load_external_labels(args.labels) if args.labels else None
    if config.scorer == "external" and external_scores is None:
        raise ConfigError("--scorer external requires --scores")
    classifier = "external" if external_labels is not None else "rules"

    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    labels_out, scores_out, evidence_out, evidences = [], [], [], []
    for q in corpus.questions:
        doc = corpus.document(q.doc_id)
        label = classify_question(q, classifier, labels=external_labels)
        labels_out.append({"q_id": q.q_id, "label": label})
        cands = build_candidates(doc, q.q_id)
        scores = score_candidates(q, cands, config.scorer, external_scores)
        for s in scores:
            scores_out.append(
                {"q_id": s.q_id, "candidate_id": s.candidate_id, "kind": s.kind,
                 "score": s.score}
            )
        ev = select_topk(scores, config)
        evidences.append(ev)
        evidence_out.append(
            {"q_id": ev.q_id, "text_ids": list(ev.text_ids),
             "desc_ids": list(ev.desc_ids)}
        )
    write_jsonl(labels_out, out_dir / "type_labels.jsonl")
    write_jsonl(scores_out, out_dir / "scores.jsonl")
    write_jsonl(evidence_out, out_dir / "evidence.jsonl")

    recall_stats = {}
    for kind in ("text", "table_desc"):
        try:
            recall_stats[kind] = evidence_recall(evidences, corpus.questions, kind)
        except DataError:
            pass
    if recall_stats:
        (out_dir / "retrieval_eval.json").write_text(
            json.dumps(recall_stats, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        for kind, value in sorted(recall_stats.items()):
            print(f"recall@k ({kind}): {value:.4f}")
    print(f"retrieved evidence for {len(evidence_out)} questions -> {out_dir}")
    return 0


def _cmd_reconstruct(args) -> int:
    corpus = ingest_corpus(args.corpus, "canonical")
    evidence_path = Path(args.evidence)
    if not evidence_path.exists():
        raise DataError(
            f"evidence file not found: {evidence_path}; run `ttqa retrieve` first"
        )
    labels_path = evidence_path.parent / "type_labels.jsonl"
    if not labels_path.exists():
        raise DataError(
            f"type labels not found next to evidence: {labels_path}; "
            f"run `ttqa retrieve` first"
        )
    labels = {rec["q_id"]: rec["label"] for rec in read_jsonl(labels_path)}
    out = []
    q_index = {q.q_id: q for q in corpus.questions}
    for rec in read_jsonl(evidence_path):
        q = q_index.get(rec["q_id"])
        if q is None:
            raise DataError(f"evidence file names unknown q_id {rec['q_id']!r}")
        qtype = labels.get(rec["q_id"], "arithmetic")
        doc = corpus.document(q.doc_id)
        cells = [CellRef.from_key(did) for did in rec.get("desc_ids", ())]
        for rtab in reconstruct_tables(q, qtype, doc.tables, cells):
            audit = {"q_id": q.q_id}
            audit.update(reconstruction_to_dict(rtab))
            out.append(audit)
    out_path = Path(args.output_dir) / "reconstructions.jsonl"
    write_jsonl(out, out_path)
    print(f"reconstructed {len(out)} tables -> {out_path}")
    return 0


def _cmd_select_demos(args) -> int:
    corpus = ingest_corpus(args.corpus, "canonical")
    stubs = select_demos(corpus.questions, args.qtype, args.k, seed=args.seed)
    for stub in stubs:
        path = save_demo(stub, args.output_dir)
        print(f"wrote demo stub {path}")
    print(
        f"selected {len(stubs)} {args.qtype} demonstrations; fill chain/answer "
        f"sections before few-shot runs"
    )
    return 0


def _cmd_run(args) -> int:
    cfg = RunConfig.load(args.config)
    report, rendered = run_pipeline(cfg)
    print(rendered)
    print(f"EM {report.em:.4f} | F1 {report.f1:.4f} over {report.n_questions} questions")
    print(f"artifacts in {cfg.output_dir}")
    return 0


def _load_records(path: str):
    records = []
    skipped = 0
    for rec in read_jsonl(path):
        if rec.get("gold") is None:
            skipped += 1
            continue
        records.append(record_from_dict(rec))
    if skipped:
        print(f"skipped {skipped} predictions without gold answers")
    return records


def _cmd_eval(args) -> int:
    records = _load_records(args.predictions)
    report, rendered = build_report(records, layout="main")
    print(rendered)
    if args.output:
        Path(args.output).write_text(
            json.dumps(
                {"em": report.em, "f1": report.f1, "n_questions": report.n_questions,
                 "breakdowns": report.breakdowns},
                indent=2, sort_keys=True,
            ) + "\n",
            encoding="utf-8",
        )
        print(f"report -> {args.output}")
    return 0


def _cmd_report(args) -> int:
    recall_stats = None
    if args.layout == "recall":
        if not args.retrieval_eval:
            raise ConfigError("--layout recall requires --retrieval-eval")
        recall_stats = json.loads(Path(args.retrieval_eval).read_text(encoding="utf-8"))
        _, rendered = build_report([], layout="recall", recall_stats=recall_stats)
    else:
        if not args.predictions:
            raise ConfigError(f"--layout {args.layout} requires --predictions")
        records = _load_records(args.predictions)
        _, rendered = build_report(records, layout=args.layout)
    print(rendered)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ttqa", description="table-text hybrid QA pipeline"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="load a corpus and write the canonical JSONL")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=["canonical", "multihiertt"], default="canonical")
    p.add_argument("--output", required=True)
    p.add_argument("--descriptions", help="also write the table-description JSONL here")
    p.add_argument("--no-infer-bands", action="store_true",
                   help="multihiertt only: keep header bands at [0,0] instead of inferring")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("retrieve", help="classify questions and select evidence")
    p.add_argument("--corpus", required=True)
    p.add_argument("--scorer", choices=["lexical", "oracle", "external"], default="lexical")
    p.add_argument("--scores", help="external scores JSONL")
    p.add_argument("--labels", help="external type labels JSONL")
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--m", type=int, default=10)
    p.add_argument("--output-dir", required=True)
    p.set_defaults(func=_cmd_retrieve)

    p = sub.add_parser("reconstruct", help="rebuild evidence-bearing sub-tables")
    p.add_argument("--corpus", required=True)
    p.add_argument("--evidence", required=True, help="evidence JSONL from `retrieve`")
    p.add_argument("--output-dir", required=True)
    p.set_defaults(func=_cmd_reconstruct)

    p = sub.add_parser("select-demos", help="pick demonstration stubs by clustering")
    p.add_argument("--corpus", required=True)
    p.add_argument("--qtype", choices=["arithmetic", "span_selection"], required=True)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output-dir", required=True)
    p.set_defaults(func=_cmd_select_demos)

    p = sub.add_parser("run", help="run the full pipeline from a config file")
    p.add_argument("--config", required=True)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("eval", help="score a predictions file")
    p.add_argument("--predictions", required=True)
    p.add_argument("--output", help="write the JSON report here")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("report", help="render a report layout")
    p.add_argument("--predictions")
    p.add_argument("--layout", choices=["main", "ablation", "shots", "recall"],
                   default="main")
    p.add_argument("--retrieval-eval", help="retrieval_eval.json for --layout recall")
    p.set_defaults(func=_cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except BackendError as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
