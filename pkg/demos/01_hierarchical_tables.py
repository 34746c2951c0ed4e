"""Hierarchical tables: span lists, header paths, linearization."""

from tabletextqa import CellRef, compute_span_list, header_paths, linearize, render_table
from tabletextqa.synth import fig3_style_table

table = fig3_style_table()

print("== a two-band financial table ==")
print(render_table(table))

print("\n1. row spans (header band first, one span per sub-header group)")
spans = compute_span_list(table)
print("   span list:", [list(s) for s in spans.spans])

print("\n2. header paths resolve each data cell against both hierarchies")
for ref in (CellRef("t0", 3, 1), CellRef("t0", 5, 2)):
    row_path, col_path = header_paths(table, ref)
    print(f"   cell ({ref.row},{ref.col}): rows {row_path} | cols {col_path}")

print("\n3. linearization: one retrieval-ready sentence per data cell")
for desc in linearize(table)[:4]:
    print("  ", desc.text)
print("   ...")
print("   total descriptions:", len(linearize(table)))
