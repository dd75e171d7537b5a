"""
Matrix reading for the supported file formats.

Supports CSV (comma separated, one row per line, no header), JSON
({"n": ..., "rows": [...]} or a bare list of rows) and Matrix Market
(array and coordinate layouts, real general matrices).
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from nekscale.core.matrix import SquareMatrix
from nekscale.utils.logging import get_logger


logger = get_logger(__name__)

FORMATS = ("mm", "csv", "json")

EXTENSION_FORMATS: Dict[str, str] = {
    ".mtx": "mm",
    ".mm": "mm",
    ".csv": "csv",
    ".json": "json",
}


class MatrixReadError(Exception):
    """Raised when a matrix cannot be read."""
    pass


class ParseError(MatrixReadError):
    """Raised when matrix text is malformed; line is 1-based."""

    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class NotSquareError(MatrixReadError):
    """Raised when the parsed data is not an n x n matrix."""
    pass


def detect_format(path: Union[str, Path], fmt: Optional[str] = None) -> str:
    """
    Resolve the format from an explicit name or the file extension.

    Raises:
        MatrixReadError: If the format is unknown or cannot be inferred
    """
    if fmt:
        fmt = fmt.lower()
        if fmt not in FORMATS:
            raise MatrixReadError(f"Unknown format: {fmt}. Must be one of {FORMATS}")
        return fmt

    suffix = Path(path).suffix.lower()
    if suffix not in EXTENSION_FORMATS:
        raise MatrixReadError(f"Cannot infer format from extension '{suffix}'; pass --format")
    return EXTENSION_FORMATS[suffix]


def _parse_float(token: str, line: int) -> float:
    try:
        value = float(token)
    except ValueError as e:
        raise ParseError(line, f"not a number: {token!r}") from e
    if not math.isfinite(value):
        raise ParseError(line, f"non-finite value: {token!r}")
    return value


_JSON_SEPARATORS = re.compile(r"[\s,:]*")


def _json_items(text: str, pos: int) -> List[int]:
    """Offsets of the items of the well-formed JSON array opening at pos."""
    decoder = json.JSONDecoder()
    offsets: List[int] = []
    pos = _JSON_SEPARATORS.match(text, pos + 1).end()
    while text[pos] != "]":
        offsets.append(pos)
        _, pos = decoder.raw_decode(text, pos)
        pos = _JSON_SEPARATORS.match(text, pos).end()
    return offsets


def _json_rows_offset(text: str) -> int:
    """Offset of the rows array in a well-formed matrix document."""
    decoder = json.JSONDecoder()
    pos = _JSON_SEPARATORS.match(text, 0).end()
    if text[pos] != "{":
        return pos

    # The last "rows" key wins, as in json.loads
    rows_offset = pos
    pos = _JSON_SEPARATORS.match(text, pos + 1).end()
    while text[pos] != "}":
        key, pos = decoder.raw_decode(text, pos)
        pos = _JSON_SEPARATORS.match(text, pos).end()
        if key == "rows":
            rows_offset = pos
        _, pos = decoder.raw_decode(text, pos)
        pos = _JSON_SEPARATORS.match(text, pos).end()
    return rows_offset


def _json_entry_line(text: str, row: int, column: int) -> int:
    """1-based line of entry (row, column), both 0-based."""
    row_offset = _json_items(text, _json_rows_offset(text))[row]
    entry_offset = _json_items(text, row_offset)[column]
    return text.count("\n", 0, entry_offset) + 1


def _square(rows: List[List[float]]) -> SquareMatrix:
    n = len(rows)
    if n == 0:
        raise NotSquareError("Matrix has no rows")
    for index, row in enumerate(rows, start=1):
        if len(row) != n:
            raise NotSquareError(f"Row {index} has {len(row)} entries, expected {n}")
    return SquareMatrix.from_rows(rows)


class MatrixReader:
    """
    Reader dispatching on file format.

    Example:
        >>> reader = MatrixReader()
        >>> A = reader.read("a5.mtx")
    """

    def read(self, path: Union[str, Path], fmt: Optional[str] = None) -> SquareMatrix:
        """
        Read a matrix file.

        Args:
            path: File path
            fmt: mm, csv or json; inferred from the extension when omitted

        Returns:
            SquareMatrix

        Raises:
            MatrixReadError: If the file is missing or unreadable
            ParseError: If the content is malformed
            NotSquareError: If the data is not square
        """
        fmt = detect_format(path, fmt)
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise MatrixReadError(f"Cannot read {path}: {e}") from e

        logger.info(f"Reading {fmt} matrix from: {path}")
        return self.parse(text, fmt)

    def parse(self, text: str, fmt: str) -> SquareMatrix:
        """Parse matrix text in the given format."""
        fmt = detect_format("", fmt)
        if fmt == "csv":
            return self._read_csv(text)
        elif fmt == "json":
            return self._read_json(text)
        return self._read_matrix_market(text)

    def _read_csv(self, text: str) -> SquareMatrix:
        """Read comma separated rows; blank lines are skipped."""
        rows: List[List[float]] = []
        for line_no, record in enumerate(csv.reader(io.StringIO(text)), start=1):
            if not record or all(not cell.strip() for cell in record):
                continue
            rows.append([_parse_float(cell.strip(), line_no) for cell in record])
        if not rows:
            raise ParseError(1, "no data rows")
        return _square(rows)

    def _read_json(self, text: str) -> SquareMatrix:
        """Read {"n": n, "rows": [...]} or a bare list of rows."""
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ParseError(e.lineno, e.msg) from e

        declared_n = None
        if isinstance(data, dict):
            if "rows" not in data:
                raise ParseError(1, "missing 'rows' field")
            declared_n = data.get("n")
            data = data["rows"]

        if not isinstance(data, list) or not all(isinstance(row, list) for row in data):
            raise ParseError(1, "'rows' must be a list of lists")

        rows: List[List[float]] = []
        for i, row in enumerate(data):
            values = []
            for j, value in enumerate(row):
                numeric = isinstance(value, (int, float)) and not isinstance(value, bool)
                if not numeric or not math.isfinite(value):
                    raise ParseError(
                        _json_entry_line(text, i, j),
                        f"row {i + 1}, column {j + 1}: not a finite number: {value!r}",
                    )
                values.append(float(value))
            rows.append(values)

        matrix = _square(rows)
        if declared_n is not None and declared_n != matrix.n:
            raise NotSquareError(f"Declared n={declared_n} but found {matrix.n} rows")
        return matrix

    def _read_matrix_market(self, text: str) -> SquareMatrix:
        """Read a real general Matrix Market file (array or coordinate)."""
        lines = text.splitlines()
        if not lines:
            raise ParseError(1, "empty file")

        layout = self._parse_banner(lines[0])
        body = [
            (line_no, line.split())
            for line_no, line in enumerate(lines[1:], start=2)
            if line.strip() and not line.lstrip().startswith("%")
        ]
        if not body:
            raise ParseError(len(lines), "missing size line")

        size_line, size_tokens = body[0]
        entries = body[1:]

        if layout == "array":
            n = self._parse_size(size_line, size_tokens, 2)[0]
            return self._read_array(n, entries, size_line)

        n, nnz = self._parse_size(size_line, size_tokens, 3)
        return self._read_coordinate(n, nnz, entries, size_line)

    def _parse_banner(self, banner: str) -> str:
        tokens = banner.lower().split()
        if len(tokens) != 5 or tokens[0] != "%%matrixmarket" or tokens[1] != "matrix":
            raise ParseError(1, "expected '%%MatrixMarket matrix <layout> real general'")
        layout, field, symmetry = tokens[2:]
        if layout not in ("array", "coordinate"):
            raise ParseError(1, f"unsupported layout: {layout}")
        if field not in ("real", "integer"):
            raise ParseError(1, f"unsupported field: {field}")
        if symmetry != "general":
            raise ParseError(1, f"unsupported symmetry: {symmetry}")
        return layout

    def _parse_size(self, line_no: int, tokens: List[str], expected: int) -> Tuple[int, int]:
        if len(tokens) != expected:
            raise ParseError(line_no, f"size line needs {expected} integers")
        try:
            values = [int(token) for token in tokens]
        except ValueError as e:
            raise ParseError(line_no, "size line must contain integers") from e
        if values[0] != values[1]:
            raise NotSquareError(f"Matrix Market size {values[0]}x{values[1]} is not square")
        if values[0] < 1:
            raise ParseError(line_no, "dimension must be positive")
        return values[0], values[-1]

    def _read_array(
        self,
        n: int,
        entries: List[Tuple[int, List[str]]],
        size_line: int,
    ) -> SquareMatrix:
        """Array layout stores entries column by column."""
        if len(entries) != n * n:
            last = entries[-1][0] if entries else size_line
            raise ParseError(last, f"expected {n * n} entries, found {len(entries)}")
        values = np.empty(n * n)
        for index, (line_no, tokens) in enumerate(entries):
            if len(tokens) != 1:
                raise ParseError(line_no, "array entries hold one value per line")
            values[index] = _parse_float(tokens[0], line_no)
        return SquareMatrix(values.reshape((n, n), order="F"))

    def _read_coordinate(
        self,
        n: int,
        nnz: int,
        entries: List[Tuple[int, List[str]]],
        size_line: int,
    ) -> SquareMatrix:
        """Coordinate layout; positions not listed are zero."""
        if len(entries) != nnz:
            last = entries[-1][0] if entries else size_line
            raise ParseError(last, f"expected {nnz} entries, found {len(entries)}")
        dense = np.zeros((n, n))
        seen = set()
        for line_no, tokens in entries:
            if len(tokens) != 3:
                raise ParseError(line_no, "coordinate entries need 'row column value'")
            try:
                i, j = int(tokens[0]), int(tokens[1])
            except ValueError as e:
                raise ParseError(line_no, "row and column must be integers") from e
            if not (1 <= i <= n and 1 <= j <= n):
                raise ParseError(line_no, f"index ({i}, {j}) outside 1..{n}")
            if (i, j) in seen:
                raise ParseError(line_no, f"duplicate entry ({i}, {j})")
            seen.add((i, j))
            dense[i - 1, j - 1] = _parse_float(tokens[2], line_no)
        return SquareMatrix(dense)


def load_matrix(path: Union[str, Path], fmt: Optional[str] = None) -> SquareMatrix:
    """Read a matrix file with the default reader."""
    return MatrixReader().read(path, fmt)
