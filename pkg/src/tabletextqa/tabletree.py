"""Multi-hierarchical table model.

A table is a rectangular grid with two header bands: the column-header rows
at the top (``header_row_band``) and the row-label columns on the left
(``header_col_band``). Rows below the header band are partitioned into spans
opened by sub-header rows; a sub-header row carries a label in column 0 and
is empty everywhere else. Cells outside both bands are data cells.

Operations: span-list computation, per-cell header paths, linearization of
data cells into one-sentence table descriptions, and pipe-delimited
rendering for prompts.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import DataError

_NUM_RE = re.compile(r"[-+]?\d*\.?\d+(?:[eE][-+]?\d+)?")


def parse_numeric(raw: str) -> float | None:
    """Parse a table-cell string to a number, or None.

    Strips "$" and thousands commas, treats "(x)" as negative and "x%" as
    x/100. Anything that does not reduce to a plain number returns None.
    """
    s = raw.strip()
    if not s:
        return None
    negative = False
    if s.startswith("(") and s.endswith(")"):
        negative = True
        s = s[1:-1].strip()
    s = s.replace("$", "").replace(",", "").strip()
    percent = s.endswith("%")
    if percent:
        s = s[:-1].strip()
    if not _NUM_RE.fullmatch(s):
        return None
    value = float(s)
    if percent:
        value /= 100.0
    return -value if negative else value


@dataclass(frozen=True)
class CellRef:
    """Reference to one cell of one table."""

    table_id: str
    row: int
    col: int

    def key(self) -> str:
        return f"{self.table_id}-{self.row}-{self.col}"

    @staticmethod
    def from_key(key: str) -> "CellRef":
        parts = key.rsplit("-", 2)
        if len(parts) != 3:
            raise DataError(f"malformed cell ref key: {key!r}")
        try:
            return CellRef(parts[0], int(parts[1]), int(parts[2]))
        except ValueError:
            raise DataError(f"malformed cell ref key: {key!r}") from None


@dataclass(frozen=True)
class Cell:
    row: int
    col: int
    raw: str
    value: float | None


@dataclass(frozen=True)
class HierTable:
    table_id: str
    grid: tuple[tuple[Cell, ...], ...]
    header_row_band: tuple[int, int]  # inclusive [0, h]
    header_col_band: tuple[int, int]  # inclusive [0, g]

    def __post_init__(self):
        if not self.grid or not self.grid[0]:
            raise DataError(f"table {self.table_id}: empty grid")
        width = len(self.grid[0])
        for r, row in enumerate(self.grid):
            if len(row) != width:
                raise DataError(
                    f"table {self.table_id}: row {r} has {len(row)} cells, expected {width}"
                )
        for name, band, limit in (
            ("header_row_band", self.header_row_band, self.n_rows),
            ("header_col_band", self.header_col_band, self.n_cols),
        ):
            lo, hi = band
            if lo != 0 or hi < lo or hi >= limit:
                raise DataError(f"table {self.table_id}: invalid {name} {band}")

    @property
    def n_rows(self) -> int:
        return len(self.grid)

    @property
    def n_cols(self) -> int:
        return len(self.grid[0])

    @property
    def header_rows_end(self) -> int:
        """Last column-header row index (h)."""
        return self.header_row_band[1]

    @property
    def header_cols_end(self) -> int:
        """Last row-label column index (g)."""
        return self.header_col_band[1]

    def raw_at(self, row: int, col: int) -> str:
        return self.grid[row][col].raw

    def is_data_cell(self, row: int, col: int) -> bool:
        return row > self.header_rows_end and col > self.header_cols_end

    @staticmethod
    def from_rows(
        table_id: str,
        rows: list[list[str]],
        header_row_band: tuple[int, int] = (0, 0),
        header_col_band: tuple[int, int] = (0, 0),
    ) -> "HierTable":
        grid = tuple(
            tuple(Cell(r, c, raw, parse_numeric(raw)) for c, raw in enumerate(row))
            for r, row in enumerate(rows)
        )
        return HierTable(table_id, grid, tuple(header_row_band), tuple(header_col_band))

    def rows_as_strings(self) -> list[list[str]]:
        return [[cell.raw for cell in row] for row in self.grid]


@dataclass(frozen=True)
class TableSpanList:
    """Partition of a table's rows: header band first, then sub-header spans."""

    spans: tuple[tuple[int, int], ...]  # inclusive [start, end] ranges

    def span_of(self, row: int) -> tuple[int, int]:
        for span in self.spans:
            if span[0] <= row <= span[1]:
                return span
        raise DataError(f"row {row} not covered by span list {list(self.spans)}")


@dataclass(frozen=True)
class TableDescription:
    """One-sentence linearization of a single data cell."""

    desc_id: str
    table_id: str
    cell: CellRef
    text: str


def is_subheader_row(table: HierTable, row: int) -> bool:
    """A sub-header row sits below the header band, labels column 0 and is
    otherwise empty."""
    if row <= table.header_rows_end:
        return False
    cells = table.grid[row]
    if not cells[0].raw.strip():
        return False
    return all(not cell.raw.strip() for cell in cells[1:])


def compute_span_list(table: HierTable) -> TableSpanList:
    """Partition rows: the header band, then spans opened at each sub-header
    row (the first body row always opens one)."""
    h = table.header_rows_end
    spans = [(0, h)]
    starts = [
        r for r in range(h + 1, table.n_rows) if r == h + 1 or is_subheader_row(table, r)
    ]
    for i, start in enumerate(starts):
        end = starts[i + 1] - 1 if i + 1 < len(starts) else table.n_rows - 1
        spans.append((start, end))
    return TableSpanList(tuple(spans))


def span_subheader_row(table: HierTable, span: tuple[int, int]) -> int | None:
    """The sub-header row of a span, if it has one. The header-band span
    contributes none."""
    start = span[0]
    if start <= table.header_rows_end:
        return None
    return start if is_subheader_row(table, start) else None


def _check_data_cell(table: HierTable, cell: CellRef) -> None:
    if cell.table_id != table.table_id:
        raise DataError(f"cell ref {cell.key()} does not belong to table {table.table_id}")
    if not (0 <= cell.row < table.n_rows and 0 <= cell.col < table.n_cols):
        raise DataError(f"cell ref {cell.key()} out of bounds for table {table.table_id}")
    if not table.is_data_cell(cell.row, cell.col):
        raise DataError(f"cell ref {cell.key()} lies inside a header band")


def header_paths(table: HierTable, cell: CellRef) -> tuple[list[str], list[str]]:
    """Resolve a data cell's (row_path, col_path).

    row_path starts with the sub-header label of the cell's span (when that
    span has one) followed by the row labels from the row-label columns.
    col_path stacks the column-header labels above the cell, top to bottom.
    Empty labels are elided from both.
    """
    _check_data_cell(table, cell)
    span_list = compute_span_list(table)
    span = span_list.span_of(cell.row)
    row_path: list[str] = []
    sub_row = span_subheader_row(table, span)
    if sub_row is not None:
        row_path.append(table.raw_at(sub_row, 0).strip())
    for c in range(table.header_cols_end + 1):
        label = table.raw_at(cell.row, c).strip()
        if label:
            row_path.append(label)
    col_path = [
        table.raw_at(r, cell.col).strip()
        for r in range(table.header_rows_end + 1)
        if table.raw_at(r, cell.col).strip()
    ]
    return row_path, col_path


def describe_cell(table: HierTable, cell: CellRef) -> str:
    row_path, col_path = header_paths(table, cell)
    return "For {}, the {} is {}.".format(
        " - ".join(row_path), " - ".join(col_path), table.raw_at(cell.row, cell.col).strip()
    )


def linearize(table: HierTable) -> list[TableDescription]:
    """One description per nonempty data cell, row-major order."""
    out = []
    for r in range(table.header_rows_end + 1, table.n_rows):
        for c in range(table.header_cols_end + 1, table.n_cols):
            if not table.raw_at(r, c).strip():
                continue
            ref = CellRef(table.table_id, r, c)
            out.append(
                TableDescription(
                    desc_id=ref.key(),
                    table_id=table.table_id,
                    cell=ref,
                    text=describe_cell(table, ref),
                )
            )
    return out


def render_table(table: HierTable) -> str:
    """Pipe-delimited rendering, one grid row per line, header rows included."""
    return "\n".join(
        "| " + " | ".join(cell.raw for cell in row) + " |" for row in table.grid
    )


def description_to_dict(desc: TableDescription) -> dict:
    return {
        "desc_id": desc.desc_id,
        "table_id": desc.table_id,
        "row": desc.cell.row,
        "col": desc.cell.col,
        "text": desc.text,
    }
