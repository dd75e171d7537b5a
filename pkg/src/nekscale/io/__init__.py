"""Matrix file reading and writing."""

from nekscale.io.reader import MatrixReader, MatrixReadError, load_matrix
from nekscale.io.writer import MatrixWriter, MatrixWriteError, write_matrix

__all__ = [
    "MatrixReader",
    "MatrixReadError",
    "load_matrix",
    "MatrixWriter",
    "MatrixWriteError",
    "write_matrix",
]
