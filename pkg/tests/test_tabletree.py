import random

import pytest

from tabletextqa.errors import DataError
from tabletextqa.synth import random_hier_table
from tabletextqa.tabletree import (
    CellRef,
    HierTable,
    compute_span_list,
    header_paths,
    linearize,
    parse_numeric,
    render_table,
)

from oracles import oracle_span_list


def flat_table():
    rows = [
        ["", "2019", "2018"],
        ["Revenue", "100", "90"],
        ["Net income", "20", "15"],
        ["Expenses", "80", "75"],
    ]
    return HierTable.from_rows("flat", rows, (0, 0), (0, 0))


class TestParseNumeric:
    @pytest.mark.parametrize(
        "raw,expected",
        [
            ("100", 100.0),
            ("1,234.5", 1234.5),
            ("$5,829", 5829.0),
            ("(321)", -321.0),
            ("($1,000)", -1000.0),
            ("12%", 0.12),
            ("14.1%", 0.141),
            ("-3.5", -3.5),
            ("", None),
            ("-", None),
            ("N/A", None),
            ("total", None),
        ],
    )
    def test_cases(self, raw, expected):
        assert parse_numeric(raw) == expected


class TestSpanList:
    def test_two_band_fixture_pins_expected_partition(self, fig3_table):
        spans = compute_span_list(fig3_table).spans
        assert [list(s) for s in spans] == [[0, 1], [2, 3], [4, 7]]

    def test_flat_table_yields_two_spans(self):
        spans = compute_span_list(flat_table()).spans
        assert [list(s) for s in spans] == [[0, 0], [1, 3]]

    def test_subheaders_at_rows_1_and_5(self):
        rows = [["", "A", "B"]]
        rows.append(["Group one", "", ""])  # row 1: sub-header
        for r in range(2, 5):
            rows.append([f"item {r}", "1", "2"])
        rows.append(["Group two", "", ""])  # row 5: sub-header
        for r in range(6, 8):
            rows.append([f"item {r}", "3", "4"])
        table = HierTable.from_rows("t", rows, (0, 0), (0, 0))
        spans = compute_span_list(table).spans
        assert [list(s) for s in spans] == [[0, 0], [1, 4], [5, 7]]
        assert [list(s) for s in spans] == oracle_span_list(rows, 0)

    def test_partition_property_random_tables(self):
        rng = random.Random(11)
        for _ in range(100):
            table = random_hier_table(rng, max_rows=20, max_cols=6)
            spans = compute_span_list(table).spans
            covered = [r for s in spans for r in range(s[0], s[1] + 1)]
            assert covered == list(range(table.n_rows))
            raw_rows = table.rows_as_strings()
            assert [list(s) for s in spans] == oracle_span_list(
                raw_rows, table.header_rows_end
            )


class TestHeaderPaths:
    def test_subheader_label_leads_row_path(self, fig3_table):
        row_path, col_path = header_paths(fig3_table, CellRef("t0", 5, 2))
        assert row_path[0] == "Equity securities"
        assert row_path == ["Equity securities", "Common stock"]
        assert col_path == ["As of December 31,", "2018"]

    def test_flat_table_paths(self):
        row_path, col_path = header_paths(flat_table(), CellRef("flat", 1, 1))
        assert (row_path, col_path) == (["Revenue"], ["2019"])

    def test_two_level_column_header_stacks(self):
        rows = [
            ["", "Assets", "Assets", "Liabilities"],
            ["", "2018", "2019", "2019"],
            ["Cash", "10", "20", "5"],
        ]
        table = HierTable.from_rows("t", rows, (0, 1), (0, 0))
        _, col_path = header_paths(table, CellRef("t", 2, 2))
        assert col_path == ["Assets", "2019"]
        # independent stack: scan header rows over the column
        stacked = [rows[r][2] for r in range(2) if rows[r][2].strip()]
        assert col_path == stacked

    def test_header_band_cell_rejected(self, fig3_table):
        with pytest.raises(DataError):
            header_paths(fig3_table, CellRef("t0", 0, 1))
        with pytest.raises(DataError):
            header_paths(fig3_table, CellRef("t0", 5, 0))  # row-label column

    def test_totality_over_random_tables(self):
        rng = random.Random(3)
        for _ in range(25):
            table = random_hier_table(rng, max_rows=12, max_cols=5)
            for r in range(table.header_rows_end + 1, table.n_rows):
                for c in range(table.header_cols_end + 1, table.n_cols):
                    row_path, col_path = header_paths(table, CellRef(table.table_id, r, c))
                    assert isinstance(row_path, list) and isinstance(col_path, list)
                    assert col_path, "labeled columns must produce a col_path"


class TestLinearize:
    def test_template(self):
        descs = linearize(flat_table())
        assert descs[0].text == "For Revenue, the 2019 is 100."

    def test_empty_data_cell_skipped(self):
        rows = [["", "2019"], ["Revenue", "100"], ["Nothing", ""]]
        table = HierTable.from_rows("t", rows, (0, 0), (0, 0))
        descs = linearize(table)
        assert len(descs) == 1
        assert descs[0].cell == CellRef("t", 1, 1)

    def test_subheader_label_appears_in_span_descriptions(self, fig3_table):
        descs = linearize(fig3_table)
        for d in descs:
            if 4 <= d.cell.row <= 7:
                assert "Equity securities" in d.text

    def test_count_equals_nonempty_data_cells(self):
        rng = random.Random(5)
        for _ in range(25):
            table = random_hier_table(rng, max_rows=12, max_cols=5)
            expected = sum(
                1
                for r in range(table.header_rows_end + 1, table.n_rows)
                for c in range(table.header_cols_end + 1, table.n_cols)
                if table.raw_at(r, c).strip()
            )
            assert len(linearize(table)) == expected

    def test_desc_ids_are_cell_keys(self, fig3_table):
        for d in linearize(fig3_table):
            assert d.desc_id == d.cell.key()


class TestRenderTable:
    def test_one_by_one(self):
        table = HierTable.from_rows("t", [["x"]], (0, 0), (0, 0))
        assert render_table(table) == "| x |"

    def test_two_by_two_pipes(self):
        table = HierTable.from_rows("t", [["a", "b"], ["c", "1"]], (0, 0), (0, 0))
        lines = render_table(table).split("\n")
        assert len(lines) == 2
        assert all(line.count("|") == 3 for line in lines)

    def test_stable_bytes(self, fig3_table):
        assert render_table(fig3_table) == render_table(fig3_table)


class TestValidation:
    def test_ragged_grid_rejected(self):
        with pytest.raises(DataError):
            HierTable.from_rows("t", [["a", "b"], ["c"]], (0, 0), (0, 0))

    def test_band_out_of_bounds_rejected(self):
        with pytest.raises(DataError):
            HierTable.from_rows("t", [["a"]], (0, 1), (0, 0))
