"""
Unit tests for matrix reading and writing.
"""

import json

import numpy as np
import pytest

from nekscale.core.matrix import SquareMatrix, comparison_matrix
from nekscale.io.reader import (
    MatrixReader,
    MatrixReadError,
    NotSquareError,
    ParseError,
    detect_format,
    load_matrix,
)
from nekscale.io.writer import MatrixWriteError, MatrixWriter, write_matrix


A5_ARRAY = """%%MatrixMarket matrix array real general
% A5 stored column by column
3 3
6
-1
-7
-3
11
-3
-2
-8
10
"""


class TestDetectFormat:
    """Tests for format detection."""

    @pytest.mark.parametrize(
        "name,expected",
        [("a.mtx", "mm"), ("a.MM", "mm"), ("a.csv", "csv"), ("a.json", "json")],
    )
    def test_from_extension(self, name, expected):
        """Test inference from the file extension."""
        assert detect_format(name) == expected

    def test_explicit_wins(self):
        """Test that an explicit format overrides the extension."""
        assert detect_format("matrix.txt", "CSV") == "csv"

    def test_unknown_extension(self):
        """Test error when the extension says nothing."""
        with pytest.raises(MatrixReadError):
            detect_format("matrix.txt")

    def test_unknown_format(self):
        """Test error for an unknown format name."""
        with pytest.raises(MatrixReadError):
            detect_format("matrix.csv", "xlsx")


class TestCsvReader:
    """Tests for the CSV format."""

    def test_parse(self):
        """Test a two by two matrix."""
        A = MatrixReader().parse("2,1\n0,2\n", "csv")

        assert A.to_rows() == [[2.0, 1.0], [0.0, 2.0]]

    def test_blank_lines_skipped(self):
        """Test that blank lines are ignored."""
        A = MatrixReader().parse("\n2, 1\n\n0, 2\n\n", "csv")

        assert A.n == 2

    def test_bad_number_reports_line(self):
        """Test that a parse error names the offending line."""
        with pytest.raises(ParseError) as exc_info:
            MatrixReader().parse("1,2\n3,x\n", "csv")
        assert exc_info.value.line == 2
        assert "line 2" in str(exc_info.value)

    def test_non_finite(self):
        """Test that NaN is rejected."""
        with pytest.raises(ParseError):
            MatrixReader().parse("1,nan\n0,1\n", "csv")

    def test_not_square(self):
        """Test error for a non-square table."""
        with pytest.raises(NotSquareError):
            MatrixReader().parse("1,2,3\n4,5,6\n", "csv")

    def test_empty(self):
        """Test error for an empty file."""
        with pytest.raises(ParseError):
            MatrixReader().parse("\n\n", "csv")

    def test_read_file(self, a5_csv, a5):
        """Test reading a file from disk."""
        assert load_matrix(a5_csv) == a5

    def test_missing_file(self, tmp_path):
        """Test error for a file that does not exist."""
        with pytest.raises(MatrixReadError):
            load_matrix(tmp_path / "missing.csv")


class TestJsonReader:
    """Tests for the JSON format."""

    def test_object_form(self):
        """Test the documented object form."""
        A = MatrixReader().parse('{"n": 2, "rows": [[1, 2], [3, 4]]}', "json")

        assert A.to_rows() == [[1.0, 2.0], [3.0, 4.0]]

    def test_bare_list(self):
        """Test a bare list of rows."""
        assert MatrixReader().parse("[[5]]", "json").n == 1

    def test_ragged_rows(self):
        """Test that ragged rows are not square."""
        with pytest.raises(NotSquareError):
            MatrixReader().parse('{"n": 2, "rows": [[1], [2, 3]]}', "json")

    def test_declared_n_mismatch(self):
        """Test that a wrong declared size is refused."""
        with pytest.raises(NotSquareError):
            MatrixReader().parse('{"n": 3, "rows": [[1, 2], [3, 4]]}', "json")

    def test_missing_rows(self):
        """Test error when the rows field is absent."""
        with pytest.raises(ParseError):
            MatrixReader().parse('{"n": 2}', "json")

    @pytest.mark.parametrize("value", ['"1"', "true", "null"])
    def test_non_numeric_entry(self, value):
        """Test that strings, booleans and nulls are refused."""
        with pytest.raises(ParseError):
            MatrixReader().parse(f"[[{value}]]", "json")

    def test_entry_error_names_its_line(self):
        """Test that a bad entry reports the line it sits on and its position."""
        text = '{\n  "n": 2,\n  "rows": [\n    [1, 2],\n    [3, "x"]\n  ]\n}\n'

        with pytest.raises(ParseError) as exc_info:
            MatrixReader().parse(text, "json")

        assert exc_info.value.line == 5
        assert "row 2, column 2" in exc_info.value.reason

    def test_entry_error_inside_a_wrapped_row(self):
        """Test the line of an entry on a continuation line of its row."""
        text = "[[1,\n  2],\n [3,\n  null]]"

        with pytest.raises(ParseError) as exc_info:
            MatrixReader().parse(text, "json")

        assert exc_info.value.line == 4

    def test_non_finite_entry(self):
        """Test that NaN entries are refused."""
        with pytest.raises(ParseError) as exc_info:
            MatrixReader().parse('{"rows": [[1, NaN], [2, 3]], "n": 2}', "json")

        assert exc_info.value.line == 1
        assert "row 1, column 2" in exc_info.value.reason

    def test_invalid_json(self):
        """Test that a syntax error carries its line."""
        with pytest.raises(ParseError) as exc_info:
            MatrixReader().parse('{\n"rows": [[1,]\n', "json")
        assert exc_info.value.line >= 1


class TestMatrixMarketReader:
    """Tests for the Matrix Market format."""

    def test_array_layout(self, a5):
        """Test that array entries are read column by column."""
        assert MatrixReader().parse(A5_ARRAY, "mm") == a5

    def test_coordinate_layout(self):
        """Test that unlisted positions are zero."""
        text = (
            "%%MatrixMarket matrix coordinate real general\n"
            "3 3 3\n"
            "1 1 2.5\n"
            "2 2 3\n"
            "3 1 -1\n"
        )

        A = MatrixReader().parse(text, "mm")

        assert A.to_rows() == [[2.5, 0.0, 0.0], [0.0, 3.0, 0.0], [-1.0, 0.0, 0.0]]

    def test_integer_field(self):
        """Test that integer matrices are accepted."""
        text = "%%MatrixMarket matrix array integer general\n1 1\n7\n"

        assert MatrixReader().parse(text, "mm").to_rows() == [[7.0]]

    def test_bad_banner(self):
        """Test error for a missing banner."""
        with pytest.raises(ParseError) as exc_info:
            MatrixReader().parse("3 3\n1\n", "mm")
        assert exc_info.value.line == 1

    @pytest.mark.parametrize("banner", [
        "%%MatrixMarket matrix array complex general",
        "%%MatrixMarket matrix array real symmetric",
        "%%MatrixMarket matrix diagonal real general",
    ])
    def test_unsupported_banner(self, banner):
        """Test error for unsupported field, symmetry or layout."""
        with pytest.raises(ParseError):
            MatrixReader().parse(f"{banner}\n1 1\n1\n", "mm")

    def test_not_square(self):
        """Test error for a rectangular size line."""
        with pytest.raises(NotSquareError):
            MatrixReader().parse("%%MatrixMarket matrix array real general\n2 3\n", "mm")

    def test_wrong_entry_count(self):
        """Test error when the array has too few entries."""
        text = "%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n"

        with pytest.raises(ParseError) as exc_info:
            MatrixReader().parse(text, "mm")
        assert exc_info.value.line == 5

    def test_index_out_of_range(self):
        """Test error for a coordinate outside the matrix."""
        text = "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n"

        with pytest.raises(ParseError) as exc_info:
            MatrixReader().parse(text, "mm")
        assert exc_info.value.line == 3

    def test_duplicate_entry(self):
        """Test error for a repeated coordinate."""
        text = "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n1 1 2.0\n"

        with pytest.raises(ParseError) as exc_info:
            MatrixReader().parse(text, "mm")
        assert "duplicate" in str(exc_info.value)


class TestMatrixWriter:
    """Tests for writing matrices."""

    @pytest.mark.parametrize("fmt,layout", [
        ("csv", "array"), ("json", "array"), ("mm", "array"), ("mm", "coordinate"),
    ])
    def test_fixtures_survive_a_write(self, tmp_path, fixtures, fmt, layout):
        """Test that every fixture reads back bit for bit."""
        for name, A in fixtures.matrices.items():
            path = write_matrix(A, tmp_path / f"{name}.{fmt}", fmt=fmt, layout=layout)
            assert load_matrix(path, fmt) == A, name

    def test_awkward_values(self, tmp_path):
        """Test values whose shortest decimal form is long."""
        A = SquareMatrix.from_rows([[0.1 + 0.2, 1 / 3], [-1e-300, 2.0 ** 60]])

        path = write_matrix(A, tmp_path / "awkward.mtx")

        assert load_matrix(path) == A

    def test_negative_zero_coordinate(self, tmp_path):
        """Test that -0.0 survives the coordinate layout bit for bit."""
        A = comparison_matrix(SquareMatrix.identity(2))

        path = write_matrix(A, tmp_path / "m.mtx", layout="coordinate")
        back = load_matrix(path)

        assert np.signbit(A.entries[0, 1])
        assert path.read_text().splitlines()[1] == "2 2 4"
        assert back.entries.tobytes() == A.entries.tobytes()

    def test_positive_zero_is_skipped(self, tmp_path):
        """Test that +0.0 entries are left out of the coordinate layout."""
        text = MatrixWriter().render(SquareMatrix.identity(2), "mm", layout="coordinate")

        assert text.splitlines()[1] == "2 2 2"

    def test_json_shape(self, a5):
        """Test the JSON document layout."""
        data = json.loads(MatrixWriter().render(a5, "json"))

        assert data["n"] == 3
        assert data["rows"][2] == [-7.0, -3.0, 10.0]

    def test_array_is_column_major(self, a5):
        """Test that the array layout matches the reader's order."""
        text = MatrixWriter().render(a5, "mm")

        assert text.splitlines()[2:5] == ["6.0", "-1.0", "-7.0"]

    def test_unknown_format(self, a5, tmp_path):
        """Test error for an unknown format."""
        with pytest.raises(MatrixWriteError):
            write_matrix(a5, tmp_path / "a5.xlsx")

    def test_unknown_layout(self, a5):
        """Test error for an unknown Matrix Market layout."""
        with pytest.raises(MatrixWriteError):
            MatrixWriter().render(a5, "mm", layout="packed")
