"""Small CSV helpers shared by the CLI and the risk engine."""

import numpy as np

from .errors import DataError


def read_matrix_csv(path) -> np.ndarray:
    """Read a numeric matrix from CSV, skipping blank and '#' comment lines.

    Parse failures report the one-based line number.
    """
    rows = []
    width = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            try:
                row = [float(tok) for tok in stripped.split(",")]
            except ValueError as exc:
                raise DataError(f"{path}: line {lineno}: {exc}") from exc
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise DataError(
                    f"{path}: line {lineno}: expected {width} fields, got {len(row)}"
                )
            rows.append(row)
    if not rows:
        raise DataError(f"{path}: no data rows")
    return np.asarray(rows, dtype=float)


def write_matrix_csv(matrix, path, header: str | None = None) -> None:
    """Write a numeric matrix as CSV with an optional '#' comment header."""
    matrix = np.atleast_2d(np.asarray(matrix))
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            fh.write(f"# {header}\n")
        for row in matrix:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
