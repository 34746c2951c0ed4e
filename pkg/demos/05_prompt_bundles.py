"""Zero-shot and few-shot prompt construction with the exact trigger strings."""

from tabletextqa import (
    Demonstration,
    PreparedEvidence,
    Question,
    build_few_shot,
    build_zero_shot,
)
from tabletextqa.promptkit import build_answer_extraction_prompt

question = Question(
    q_id="q0",
    doc_id="d0",
    text="What was the change in Common stock from 2018 to 2019?",
    gold_type="arithmetic",
)
evidence = PreparedEvidence(
    texts=("Common stock holdings grew over the period.",),
    tables=("| | 2019 | 2018 |\n| Common stock | 5,829 | 5,735 |",),
)

print("== zero-shot (two calls) ==")
bundle = build_zero_shot(evidence, question, "hrot")
print(bundle.rendered)
print("\n-- after the model replies, the second call appends the answer trigger --")
print(build_answer_extraction_prompt("<call-1 prompt>", "<model reasoning>"))

demo = Demonstration(
    demo_id="demo-0",
    qtype="arithmetic",
    question="What was the change in Bonds from 2018 to 2019?",
    context="| | 2019 | 2018 |\n| Bonds | 1,234 | 1,100 |",
    chain="we need to find Bonds for 2019 and 2018; the values are 1,234 and 1,100.",
    answer="subtract(1234, 1100)",
)

print("\n== few-shot (single call, demonstrations first) ==")
print(build_few_shot([demo], evidence, question).rendered)
