"""Parser and evaluator for the arithmetic answer-program format.

A program is a comma-separated list of binary steps, `op(arg1, arg2)`, over
the operators add / subtract / multiply / divide / exp / greater. Arguments
are numeric literals (optionally carrying "$", thousands commas, "%",
parentheses-as-negative, or a const_ prefix) or `#k` references to the
result of an earlier step. The program's value is the last step's value;
`greater` yields the strings "yes"/"no".

Also extracts and normalizes final answers out of raw model completions.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .errors import ProgramEvalError, ProgramParseError
from .tabletree import parse_numeric

OPS = ("add", "subtract", "multiply", "divide", "exp", "greater")

ANSWER_TRIGGER = "Therefore, the answer to the question is"


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class StepRef:
    index: int


Arg = Union[Const, StepRef]


@dataclass(frozen=True)
class Step:
    op: str
    args: tuple[Arg, Arg]


@dataclass(frozen=True)
class Program:
    steps: tuple[Step, ...]


@dataclass(frozen=True)
class NormalizedAnswer:
    kind: str  # "number" | "text" | "boolean"
    number: float | None = None
    text: str | None = None


_OP_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_THOUSANDS_PART_RE = re.compile(r"\d{3}(?:\.\d+)?%?\)?")


def parse_literal(token: str, pos: int = 0) -> float:
    """Parse one numeric program literal, const_ forms included."""
    s = token.strip()
    if s.startswith("const_"):
        body = s[len("const_"):]
        if body == "m1":
            return -1.0
        value = parse_numeric(body)
        if value is None:
            raise ProgramParseError(f"unparseable literal {token!r}", pos)
        return value
    value = parse_numeric(s)
    if value is None:
        raise ProgramParseError(f"unparseable literal {token!r}", pos)
    return value


def _merge_thousands(parts: list[tuple[str, int]]) -> list[tuple[str, int]]:
    """Re-join args split on thousands commas ("1,234" arrives as "1","234").

    With more than two raw parts, the true argument boundary is the split
    point whose right-hand group interiors all look like 3-digit
    continuations. A part starting with whitespace marks the author's ", "
    separator and is preferred; otherwise the rightmost valid boundary wins.
    """
    if len(parts) <= 2:
        return parts

    def _continuation(text: str) -> bool:
        return bool(_THOUSANDS_PART_RE.fullmatch(text.strip()))

    def _valid(boundary: int) -> bool:
        left_ok = all(_continuation(t) for t, _ in parts[1:boundary])
        right_ok = all(_continuation(t) for t, _ in parts[boundary + 1:])
        return left_ok and right_ok

    candidates = [b for b in range(1, len(parts)) if _valid(b)]
    if not candidates:
        return parts
    hinted = [b for b in candidates if parts[b][0][:1].isspace()]
    boundary = (hinted or candidates)[-1]
    join = lambda ps: (",".join(t.strip() for t, _ in ps), ps[0][1])
    return [join(parts[:boundary]), join(parts[boundary:])]


def _parse_arg(text: str, pos: int, step_index: int) -> Arg:
    s = text.strip()
    if not s:
        raise ProgramParseError("empty argument", pos)
    if s.startswith("#"):
        try:
            ref = int(s[1:])
        except ValueError:
            raise ProgramParseError(f"malformed step reference {s!r}", pos) from None
        if ref < 0 or ref >= step_index:
            raise ProgramParseError(
                f"step reference {s!r} must point to an earlier step", pos
            )
        return StepRef(ref)
    return Const(parse_literal(s, pos))


def _parse_steps(src: str, start: int = 0) -> tuple[list[Step], int]:
    """Parse as many steps as possible from src[start:]; returns (steps, end)."""
    steps: list[Step] = []
    i = start
    n = len(src)
    while True:
        while i < n and src[i].isspace():
            i += 1
        m = _OP_NAME_RE.match(src, i)
        if not m:
            if not steps:
                raise ProgramParseError("expected an operator name", i)
            break
        op = m.group(0)
        if op not in OPS:
            if not steps:
                raise ProgramParseError(f"unknown operator {op!r}", i)
            break
        j = m.end()
        while j < n and src[j].isspace():
            j += 1
        if j >= n or src[j] != "(":
            if not steps:
                raise ProgramParseError(f"expected '(' after {op!r}", j)
            break
        # scan to the matching close paren, splitting args at depth-1 commas
        depth = 1
        j += 1
        parts: list[tuple[str, int]] = []
        buf_start = j
        while j < n and depth > 0:
            ch = src[j]
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
                if depth == 0:
                    parts.append((src[buf_start:j], buf_start))
            elif ch == "," and depth == 1:
                parts.append((src[buf_start:j], buf_start))
                buf_start = j + 1
            j += 1
        if depth != 0:
            raise ProgramParseError(f"unbalanced parentheses in {op!r} step", i)
        parts = _merge_thousands(parts)
        if len(parts) != 2:
            raise ProgramParseError(
                f"operator {op!r} takes exactly 2 arguments, got {len(parts)}", i
            )
        args = tuple(_parse_arg(text, pos, len(steps)) for text, pos in parts)
        steps.append(Step(op, args))
        # continue only over a comma followed by another step
        k = j
        while k < n and src[k].isspace():
            k += 1
        if k < n and src[k] == ",":
            save = k + 1
            while save < n and src[save].isspace():
                save += 1
            nxt = _OP_NAME_RE.match(src, save)
            if nxt and nxt.group(0) in OPS:
                i = save
                continue
        i = j
        break
    return steps, i


def parse_program(src: str) -> Program:
    """Parse a complete program; trailing non-whitespace is an error."""
    steps, end = _parse_steps(src)
    if src[end:].strip():
        raise ProgramParseError(f"trailing input after program: {src[end:].strip()!r}", end)
    return Program(tuple(steps))


def _format_number(v: float) -> str:
    if v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def render_program(p: Program) -> str:
    out = []
    for step in p.steps:
        rendered = [
            f"#{a.index}" if isinstance(a, StepRef) else _format_number(a.value)
            for a in step.args
        ]
        out.append(f"{step.op}({rendered[0]}, {rendered[1]})")
    return ", ".join(out)


def eval_program(p: Program) -> NormalizedAnswer:
    """Evaluate steps in order; the program's value is the last step's."""
    if not p.steps:
        raise ProgramEvalError("empty program")
    values: list[float | bool] = []
    for idx, step in enumerate(p.steps):
        operands = []
        for arg in step.args:
            v = values[arg.index] if isinstance(arg, StepRef) else arg.value
            if isinstance(v, bool) and step.op != "greater":
                raise ProgramEvalError(
                    f"step {idx}: arithmetic over a boolean intermediate"
                )
            operands.append(v)
        a, b = operands
        if step.op == "greater":
            if isinstance(a, bool) or isinstance(b, bool):
                raise ProgramEvalError(f"step {idx}: greater over a boolean intermediate")
            values.append(a > b)
            continue
        try:
            if step.op == "add":
                res = a + b
            elif step.op == "subtract":
                res = a - b
            elif step.op == "multiply":
                res = a * b
            elif step.op == "divide":
                if b == 0:
                    raise ProgramEvalError(f"step {idx}: division by zero")
                res = a / b
            else:  # exp
                res = a ** b
        except (OverflowError, ZeroDivisionError):
            raise ProgramEvalError(f"step {idx}: overflow or zero to a negative power") from None
        if isinstance(res, complex) or res != res or res in (float("inf"), float("-inf")):
            raise ProgramEvalError(f"step {idx}: non-finite result")
        values.append(res)
    final = values[-1]
    if isinstance(final, bool):
        return NormalizedAnswer(kind="boolean", text="yes" if final else "no")
    return NormalizedAnswer(kind="number", number=float(final))


# ---------------------------------------------------------------------------
# Completion post-processing

_OP_START_RE = re.compile(r"\b(?:add|subtract|multiply|divide|exp|greater)\s*\(")
_NUMBER_TOKEN_RE = re.compile(
    r"-?\$? ?\d[\d,]*(?:\.\d+)?%?|\(\$? ?\d[\d,]*(?:\.\d+)?%?\)"
)


def find_last_program(text: str) -> Program | None:
    """The last maximal parseable program inside free text, if any."""
    starts = [m.start() for m in _OP_START_RE.finditer(text)]
    for start in reversed(starts):
        try:
            steps, _ = _parse_steps(text, start)
        except ProgramParseError:
            continue
        if steps:
            return Program(tuple(steps))
    return None


def normalize_span_text(s: str) -> str:
    """Lowercase and drop '.', '$' and ',' for span-answer comparison."""
    s = s.lower()
    for ch in (".", "$", ","):
        s = s.replace(ch, "")
    return " ".join(s.split())


def extract_answer(completion: str, qtype: str) -> NormalizedAnswer | None:
    """Pull the final answer out of a raw completion.

    Takes the text after the last answer trigger (the whole string when the
    trigger is absent, as in few-shot completions). Arithmetic answers are
    the last parseable program, else the last numeric literal; span answers
    are the normalized trailing text. Returns None when nothing usable is
    found ("unanswered").
    """
    idx = completion.rfind(ANSWER_TRIGGER)
    tail = completion[idx + len(ANSWER_TRIGGER):] if idx >= 0 else completion
    tail = tail.strip()
    if not tail:
        return None
    if qtype == "arithmetic":
        program = find_last_program(tail)
        if program is not None:
            try:
                return eval_program(program)
            except ProgramEvalError:
                return None
        last = None
        for m in _NUMBER_TOKEN_RE.finditer(tail):
            last = m.group(0)
        if last is None:
            return None
        value = parse_numeric(last.replace(" ", ""))
        if value is None:
            return None
        return NormalizedAnswer(kind="number", number=value)
    text = normalize_span_text(tail)
    if not text:
        return None
    return NormalizedAnswer(kind="text", text=text)
