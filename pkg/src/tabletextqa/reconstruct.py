"""Evidence-driven sub-table reconstruction for arithmetic questions.

Given a table, its span list and the evidence cells that landed in it, keep
three kinds of rows (the header band, the sub-header row of each evidence
cell's span, the evidence rows themselves) and two kinds of columns (the
row-label band and the evidence columns). Restricting the grid to those,
order preserved, yields a minimal sub-table that still carries the full
hierarchical reading context of every evidence cell.

Applied only to arithmetic questions; span-selection questions keep their
table descriptions instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .corpus import Question
from .errors import DataError
from .tabletree import (
    Cell,
    CellRef,
    HierTable,
    TableSpanList,
    compute_span_list,
    span_subheader_row,
)


@dataclass(frozen=True)
class ReservationSets:
    rows: frozenset[int]
    cols: frozenset[int]


@dataclass(frozen=True)
class ReconstructedTable:
    source_table_id: str
    reservation: ReservationSets
    table: HierTable
    cell_map: Mapping[tuple[int, int], tuple[int, int]]  # source -> reconstructed

    def remap(self, ref: CellRef) -> CellRef:
        if ref.table_id != self.source_table_id:
            raise DataError(f"cell ref {ref.key()} is not from table {self.source_table_id}")
        pos = self.cell_map.get((ref.row, ref.col))
        if pos is None:
            raise DataError(f"cell ref {ref.key()} was not preserved by reconstruction")
        return CellRef(self.table.table_id, pos[0], pos[1])


def reserve(
    table: HierTable, span_list: TableSpanList, evidence: Iterable[CellRef]
) -> ReservationSets:
    """Collect the row and column indices to retain for the given evidence."""
    rows = set(range(table.header_row_band[0], table.header_row_band[1] + 1))
    cols = set(range(table.header_col_band[0], table.header_col_band[1] + 1))
    for ref in evidence:
        if ref.table_id != table.table_id:
            raise DataError(
                f"evidence ref {ref.key()} does not belong to table {table.table_id}"
            )
        if not (0 <= ref.row < table.n_rows and 0 <= ref.col < table.n_cols):
            raise DataError(f"evidence ref {ref.key()} out of bounds")
        if not table.is_data_cell(ref.row, ref.col):
            raise DataError(f"evidence ref {ref.key()} lies inside a header band")
        span = span_list.span_of(ref.row)
        sub = span_subheader_row(table, span)
        if sub is not None:
            rows.add(sub)
        rows.add(ref.row)
        cols.add(ref.col)
    return ReservationSets(frozenset(rows), frozenset(cols))


def restrict_table(table: HierTable, reservation: ReservationSets) -> ReconstructedTable:
    """Build the sub-table keeping reserved rows/columns in source order."""
    kept_rows = sorted(reservation.rows)
    kept_cols = sorted(reservation.cols)
    grid = tuple(
        tuple(
            Cell(nr, nc, table.grid[r][c].raw, table.grid[r][c].value)
            for nc, c in enumerate(kept_cols)
        )
        for nr, r in enumerate(kept_rows)
    )
    sub = HierTable(
        table_id=table.table_id,
        grid=grid,
        header_row_band=table.header_row_band,
        header_col_band=table.header_col_band,
    )
    cell_map = {
        (r, c): (nr, nc)
        for nr, r in enumerate(kept_rows)
        for nc, c in enumerate(kept_cols)
    }
    return ReconstructedTable(table.table_id, reservation, sub, cell_map)


def reconstruct_tables(
    question: Question,
    qtype: str,
    tables: Iterable[HierTable],
    evidence: Iterable[CellRef],
) -> list[ReconstructedTable]:
    """One reconstructed table per evidence-bearing table, arithmetic only."""
    if qtype != "arithmetic":
        return []
    by_table: dict[str, list[CellRef]] = {}
    for ref in evidence:
        by_table.setdefault(ref.table_id, []).append(ref)
    out = []
    for table in tables:
        refs = by_table.pop(table.table_id, None)
        if not refs:
            continue
        reservation = reserve(table, compute_span_list(table), refs)
        out.append(restrict_table(table, reservation))
    if by_table:
        missing = ", ".join(sorted(by_table))
        raise DataError(
            f"question {question.q_id}: evidence references unknown tables: {missing}"
        )
    return out


def reconstruction_to_dict(rec: ReconstructedTable) -> dict:
    from .tabletree import render_table

    return {
        "source_table_id": rec.source_table_id,
        "rows": sorted(rec.reservation.rows),
        "cols": sorted(rec.reservation.cols),
        "rendered": render_table(rec.table),
    }
