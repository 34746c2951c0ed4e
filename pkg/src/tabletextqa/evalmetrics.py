"""Exact-match and token-F1 scoring, plus report tables.

Numeric equality is tolerance-based: predictions count as exact when they
round to the gold value's precision (tolerance max(1e-4, half a unit in
gold's last decimal place)), with percent scale-matching (p, p*100, p/100
all tried). Text answers compare normalized strings; token F1 is the
harmonic precision/recall over whitespace tokens. Numeric answers take
F1 = EM, so f1 >= em holds on every slice.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import DataError
from .programdsl import NormalizedAnswer, normalize_span_text
from .tabletree import parse_numeric

SHOT_RANGE = (0, 1, 2, 3, 4)


@dataclass(frozen=True)
class PredictionRecord:
    q_id: str
    qtype: str
    predicted: NormalizedAnswer | None  # None = unanswered
    gold: NormalizedAnswer
    prompt_hash: str = ""
    shots: int = 0
    strategy: str = "hrot"


@dataclass
class MetricsReport:
    em: float
    f1: float
    n_questions: int
    breakdowns: dict[str, dict[str, dict[str, float]]] = field(default_factory=dict)


def _comparable(ans: NormalizedAnswer) -> tuple[str, float | str]:
    """Reduce an answer to ("number", value) or ("text", normalized string).

    Numeric parsing runs on the raw text first: punctuation stripping would
    otherwise eat decimal points ("0.25" is not "025"). Normalization only
    applies to strings that stay textual, plus one retry for forms like
    "94." that need the trailing period gone.
    """
    if ans.kind == "number":
        return ("number", ans.number)
    raw = (ans.text or "").strip()
    if ans.kind == "boolean":
        return ("text", normalize_span_text(raw))
    as_num = parse_numeric(raw.rstrip("."))
    if as_num is not None:
        return ("number", as_num)
    return ("text", normalize_span_text(raw))


def _decimal_places(x: float) -> int:
    if x == int(x):
        return 0
    s = repr(abs(float(x)))
    if "e" in s or "E" in s:
        return 12
    return len(s.split(".")[1])


def numeric_tolerance(gold: float) -> float:
    d = _decimal_places(gold)
    return max(1e-4, 5 * 10.0 ** (-(d + 1)))


def _numbers_equal(pred: float, gold: float) -> bool:
    tol = numeric_tolerance(gold)
    return any(abs(cand - gold) <= tol for cand in (pred, pred * 100.0, pred / 100.0))


def score_em(pred: NormalizedAnswer | None, gold: NormalizedAnswer) -> int:
    if pred is None:
        return 0
    pk, pv = _comparable(pred)
    gk, gv = _comparable(gold)
    if pk == "number" and gk == "number":
        return int(_numbers_equal(pv, gv))
    if pk == "text" and gk == "text":
        return int(pv == gv)
    return 0


def score_f1(pred: NormalizedAnswer | None, gold: NormalizedAnswer) -> float:
    if pred is None:
        return 0.0
    pk, pv = _comparable(pred)
    gk, gv = _comparable(gold)
    if pk == "number" or gk == "number":
        return float(score_em(pred, gold))
    pred_tokens = pv.split()
    gold_tokens = gv.split()
    if not pred_tokens or not gold_tokens:
        return float(pred_tokens == gold_tokens)
    common = Counter(pred_tokens) & Counter(gold_tokens)
    n_same = sum(common.values())
    if n_same == 0:
        return 0.0
    precision = n_same / len(pred_tokens)
    recall = n_same / len(gold_tokens)
    return 2 * precision * recall / (precision + recall)


# ---------------------------------------------------------------------------
# Aggregation and report rendering

LAYOUTS = ("main", "ablation", "shots", "recall")


def _aggregate(records: Sequence[PredictionRecord]) -> tuple[float, float]:
    em = sum(score_em(r.predicted, r.gold) for r in records) / len(records)
    f1 = sum(score_f1(r.predicted, r.gold) for r in records) / len(records)
    return em, f1


def _slices(records: Sequence[PredictionRecord], key) -> dict[str, tuple[float, float, int]]:
    groups: dict[str, list[PredictionRecord]] = {}
    for r in records:
        groups.setdefault(str(key(r)), []).append(r)
    return {
        name: (*_aggregate(group), len(group))
        for name, group in sorted(groups.items())
    }


def _render_rows(header: list[str], rows: list[list[str]]) -> str:
    widths = [
        max(len(header[c]), *(len(row[c]) for row in rows)) if rows else len(header[c])
        for c in range(len(header))
    ]
    def fmt(cells):
        return " | ".join(cell.ljust(widths[c]) for c, cell in enumerate(cells))
    sep = "-+-".join("-" * w for w in widths)
    return "\n".join([fmt(header), sep] + [fmt(row) for row in rows])


def _pct(x: float) -> str:
    return f"{100.0 * x:.2f}"


def build_report(
    records: Sequence[PredictionRecord],
    layout: str = "main",
    recall_stats: Mapping[str, float] | None = None,
) -> tuple[MetricsReport, str]:
    """Aggregate predictions and render the requested table layout."""
    if layout not in LAYOUTS:
        raise DataError(f"unknown report layout {layout!r}")
    if layout == "recall":
        if not recall_stats:
            raise DataError("recall layout requires recall stats")
        rows = [[kind, _pct(value)] for kind, value in sorted(recall_stats.items())]
        rendered = _render_rows(["kind", "recall"], rows)
        report = MetricsReport(em=0.0, f1=0.0, n_questions=0, breakdowns={"recall": {
            kind: {"recall": value} for kind, value in recall_stats.items()
        }})
        return report, rendered

    if not records:
        raise DataError("cannot build a report from zero records")
    em, f1 = _aggregate(records)
    breakdowns = {
        "qtype": {
            name: {"em": e, "f1": f, "n": n}
            for name, (e, f, n) in _slices(records, lambda r: r.qtype).items()
        },
        "strategy": {
            name: {"em": e, "f1": f, "n": n}
            for name, (e, f, n) in _slices(records, lambda r: r.strategy).items()
        },
        "shots": {
            name: {"em": e, "f1": f, "n": n}
            for name, (e, f, n) in _slices(records, lambda r: r.shots).items()
        },
    }
    report = MetricsReport(em=em, f1=f1, n_questions=len(records), breakdowns=breakdowns)

    if layout == "main":
        rows = [["all", _pct(em), _pct(f1), str(len(records))]]
        for name, stats in breakdowns["qtype"].items():
            rows.append([name, _pct(stats["em"]), _pct(stats["f1"]), str(int(stats["n"]))])
        rendered = _render_rows(["slice", "EM", "F1", "n"], rows)
    elif layout == "ablation":
        rows = [
            [name, _pct(stats["em"]), _pct(stats["f1"]), str(int(stats["n"]))]
            for name, stats in breakdowns["strategy"].items()
        ]
        rendered = _render_rows(["strategy", "EM", "F1", "n"], rows)
    else:  # shots
        strategies = sorted({r.strategy for r in records})
        header = ["shots"]
        for s in strategies:
            header += [f"{s} EM", f"{s} F1"]
        cells: dict[tuple[int, str], tuple[float, float]] = {}
        for shots in sorted({r.shots for r in records}):
            for s in strategies:
                group = [r for r in records if r.shots == shots and r.strategy == s]
                if group:
                    cells[(shots, s)] = _aggregate(group)
        rows = []
        for shots in sorted({r.shots for r in records}):
            row = [f"{shots}-shot"]
            for s in strategies:
                if (shots, s) in cells:
                    e, f = cells[(shots, s)]
                    row += [_pct(e), _pct(f)]
                else:
                    row += ["-", "-"]
            rows.append(row)
        rendered = _render_rows(header, rows)
    return report, rendered


# ---------------------------------------------------------------------------
# Prediction record (de)serialization


def answer_to_dict(ans: NormalizedAnswer | None) -> dict | None:
    if ans is None:
        return None
    out = {"kind": ans.kind}
    if ans.number is not None:
        out["number"] = ans.number
    if ans.text is not None:
        out["text"] = ans.text
    return out


def answer_from_dict(rec: dict | None) -> NormalizedAnswer | None:
    if rec is None:
        return None
    return NormalizedAnswer(
        kind=rec["kind"], number=rec.get("number"), text=rec.get("text")
    )


def record_to_dict(r: PredictionRecord) -> dict:
    return {
        "q_id": r.q_id,
        "qtype": r.qtype,
        "predicted": answer_to_dict(r.predicted),
        "gold": answer_to_dict(r.gold),
        "prompt_hash": r.prompt_hash,
        "shots": r.shots,
        "strategy": r.strategy,
    }


def record_from_dict(rec: dict) -> PredictionRecord:
    gold = answer_from_dict(rec["gold"])
    if gold is None:
        raise DataError(f"prediction record {rec.get('q_id')!r} lacks a gold answer")
    return PredictionRecord(
        q_id=rec["q_id"],
        qtype=rec["qtype"],
        predicted=answer_from_dict(rec.get("predicted")),
        gold=gold,
        prompt_hash=rec.get("prompt_hash", ""),
        shots=int(rec.get("shots", 0)),
        strategy=rec.get("strategy", "hrot"),
    )
