"""
Matrix writing in the formats understood by the reader.

Values are written with repr(float), so reading a written file returns
the same matrix bit for bit.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import List, Optional, Union

import numpy as np

from nekscale.core.matrix import SquareMatrix
from nekscale.io.reader import FORMATS, MatrixReadError, detect_format
from nekscale.utils.logging import get_logger


logger = get_logger(__name__)

LAYOUTS = ("array", "coordinate")


class MatrixWriteError(Exception):
    """Raised when a matrix cannot be written."""
    pass


class MatrixWriter:
    """
    Writer dispatching on file format.

    Example:
        >>> writer = MatrixWriter()
        >>> writer.write(A, "a5.mtx", layout="coordinate")
    """

    def render(self, A: SquareMatrix, fmt: str, layout: str = "array") -> str:
        """
        Render a matrix as text.

        Args:
            A: Matrix to render
            fmt: mm, csv or json
            layout: Matrix Market layout, array or coordinate

        Returns:
            File content ending with a newline
        """
        if fmt not in FORMATS:
            raise MatrixWriteError(f"Unknown format: {fmt}. Must be one of {FORMATS}")
        if fmt == "csv":
            return self._render_csv(A)
        elif fmt == "json":
            return self._render_json(A)
        if layout not in LAYOUTS:
            raise MatrixWriteError(f"Unknown layout: {layout}. Must be one of {LAYOUTS}")
        if layout == "coordinate":
            return self._render_coordinate(A)
        return self._render_array(A)

    def write(
        self,
        A: SquareMatrix,
        path: Union[str, Path],
        fmt: Optional[str] = None,
        layout: str = "array",
    ) -> Path:
        """
        Write a matrix file.

        Args:
            A: Matrix to write
            path: Destination
            fmt: Format; inferred from the extension when omitted
            layout: Matrix Market layout

        Returns:
            The written path

        Raises:
            MatrixWriteError: If the format is unknown or writing fails
        """
        try:
            fmt = detect_format(path, fmt)
        except MatrixReadError as e:
            raise MatrixWriteError(str(e)) from e

        path = Path(path)
        content = self.render(A, fmt, layout)
        try:
            path.write_text(content, encoding="utf-8")
        except OSError as e:
            raise MatrixWriteError(f"Cannot write {path}: {e}") from e

        logger.info(f"Wrote {A.n}x{A.n} {fmt} matrix to: {path}")
        return path

    def _render_csv(self, A: SquareMatrix) -> str:
        return "".join(",".join(repr(v) for v in row) + "\n" for row in A.to_rows())

    def _render_json(self, A: SquareMatrix) -> str:
        return json.dumps({"n": A.n, "rows": A.to_rows()}) + "\n"

    def _render_array(self, A: SquareMatrix) -> str:
        lines: List[str] = ["%%MatrixMarket matrix array real general", f"{A.n} {A.n}"]
        # Column-major order
        for j in range(A.n):
            lines.extend(repr(float(A.entries[i, j])) for i in range(A.n))
        return "\n".join(lines) + "\n"

    def _render_coordinate(self, A: SquareMatrix) -> str:
        nonzeros = [
            (i + 1, j + 1, float(A.entries[i, j]))
            for j in range(A.n)
            for i in range(A.n)
            if np.signbit(A.entries[i, j]) or A.entries[i, j] != 0
        ]
        lines = ["%%MatrixMarket matrix coordinate real general", f"{A.n} {A.n} {len(nonzeros)}"]
        lines.extend(f"{i} {j} {value!r}" for i, j, value in nonzeros)
        return "\n".join(lines) + "\n"


def write_matrix(
    A: SquareMatrix,
    path: Union[str, Path],
    fmt: Optional[str] = None,
    layout: str = "array",
) -> Path:
    """Write a matrix file with the default writer."""
    return MatrixWriter().write(A, path, fmt, layout)
