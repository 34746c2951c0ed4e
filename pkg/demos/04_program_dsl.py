"""The arithmetic answer-program format: parse, evaluate, extract."""

from tabletextqa import eval_program, extract_answer, parse_program, render_program
from tabletextqa.promptkit import ANSWER_TRIGGER

print("1. parse and evaluate")
for src in (
    "subtract(5829, 5735)",
    "subtract(100, 80), divide(#0, 80)",
    "greater(13577, 13000)",
    "add($1,234, 14.1%)",
):
    program = eval_program(parse_program(src))
    value = program.number if program.kind == "number" else program.text
    print(f"   {src:40s} -> {value}")

print("\n2. canonical rendering round-trips")
p = parse_program("add( 1,000 ,  2 ), multiply(#0, const_m1)")
print("   rendered:", render_program(p))
print("   value:   ", eval_program(p).number)

print("\n3. answers extracted from raw completions")
completion = (
    "First, based on the question, we need to find Common stock for 2019 and "
    "2018, located in the Equity securities span. The values are 5,829 and 5,735. "
    f"{ANSWER_TRIGGER} subtract(5829, 5735)"
)
print("   arithmetic:", extract_answer(completion, "arithmetic"))
print("   span:      ", extract_answer(f"{ANSWER_TRIGGER} The Year 2019.", "span_selection"))
print("   unanswered:", extract_answer("", "arithmetic"))
