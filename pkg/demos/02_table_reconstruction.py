"""Evidence-driven sub-table reconstruction for arithmetic questions.

Keeps the column headers, the sub-header of every span an evidence cell
lives in, the evidence rows, and the evidence columns, so the sub-table
stays readable top-to-bottom while dropping everything irrelevant.
"""

from tabletextqa import CellRef, Question, compute_span_list, render_table
from tabletextqa.reconstruct import reconstruct_tables, reserve
from tabletextqa.synth import fig3_style_table

table = fig3_style_table()
print("== source table ==")
print(render_table(table))

evidence = [CellRef("t0", 5, 1), CellRef("t0", 5, 2)]
print("\nevidence cells:", [e.key() for e in evidence])

reservation = reserve(table, compute_span_list(table), evidence)
print("reserved rows:", sorted(reservation.rows))
print("reserved cols:", sorted(reservation.cols))

question = Question(
    q_id="q0",
    doc_id="d0",
    text="What was the change in Common stock from 2018 to 2019?",
)
[rec] = reconstruct_tables(question, "arithmetic", [table], evidence)
print("\n== reconstructed table (what the prompt will contain) ==")
print(render_table(rec.table))

print("\nspan-selection questions skip reconstruction entirely:")
print(reconstruct_tables(question, "span_selection", [table], evidence))
