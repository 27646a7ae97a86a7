"""Embedded example datasets and CSV ingestion."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from pathlib import Path

from .errors import DataError
from .inference import PairedSample

log = logging.getLogger(__name__)

# Serie A results, ACF Fiorentina (x1) vs Juventus (x2), 1996-2011, in
# listing order (most recent match first).
FOOTBALL = (
    (1, 2), (0, 0), (1, 1), (1, 2), (1, 1), (0, 1), (1, 1), (3, 2), (1, 1),
    (1, 1), (1, 2), (3, 3), (0, 1), (1, 2), (1, 1), (1, 3), (3, 3), (0, 1),
    (1, 1), (1, 2), (1, 0), (3, 0), (1, 2), (1, 1), (0, 1), (0, 1),
)  # fmt: skip

# Nasal drainage severity (0 none .. 3 severe) on day 1 (x1) and day 2 (x2)
# of steam inhalation treatment for the common cold.
NASAL = (
    (1, 1), (0, 0), (1, 1), (1, 1), (0, 2), (2, 0), (2, 2), (1, 1), (3, 2),
    (2, 2), (1, 0), (2, 3), (1, 3), (2, 1), (2, 3), (2, 1), (1, 1), (2, 2),
    (3, 1), (1, 1), (2, 1), (2, 2), (1, 1), (2, 2), (2, 0), (1, 1), (0, 1),
    (1, 1), (1, 1), (3, 3),
)  # fmt: skip

_EMBEDDED = {
    "football": (FOOTBALL, "Fiorentina vs Juventus Serie A scores, 1996-2011"),
    "nasal": (NASAL, "nasal drainage severity score, day 1 vs day 2"),
}


@dataclass(frozen=True)
class Dataset:
    name: str
    pairs: PairedSample
    provenance: str
    description: str = ""


def embedded_names() -> list[str]:
    return sorted(_EMBEDDED)


def load_embedded(name: str) -> Dataset:
    try:
        pairs, desc = _EMBEDDED[name.lower()]
    except KeyError:
        raise KeyError(f"no embedded dataset {name!r}; available: {embedded_names()}") from None
    return Dataset(name.lower(), PairedSample.from_pairs(pairs), "embedded", desc)


def _parse_count(cell: str, row: int, col: int) -> int:
    text = cell.strip()
    try:
        value = int(text)
    except ValueError:
        raise DataError(f"row {row}, column {col}: {cell!r} is not an integer") from None
    if value < 0:
        raise DataError(f"row {row}, column {col}: negative value {value}")
    return value


def _is_int(cell: str) -> bool:
    try:
        int(cell.strip())
    except ValueError:
        return False
    return True


def load_csv(path, col1: int | str = 0, col2: int | str = 1) -> Dataset:
    """Read two integer columns from a comma-separated UTF-8 file.

    Columns are 0-based indices or header names. A first row whose selected
    cells are not integers is treated as a header and skipped. Blank lines
    are ignored. Row numbers in error messages are 1-based file lines.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8-sig") as fh:
        rows = [(i, r) for i, r in enumerate(csv.reader(fh), start=1) if any(c.strip() for c in r)]
    if not rows:
        raise DataError(f"{path}: file is empty")

    header = None
    first_line, first = rows[0]
    named = isinstance(col1, str) or isinstance(col2, str)
    if named or not all(_is_int(c) for c in first):
        header = [c.strip() for c in first]
        rows = rows[1:]
        log.info("%s: skipping header row %s", path, header)

    def index_of(col):
        if isinstance(col, str):
            if header is None or col not in header:
                raise DataError(f"{path}: no column named {col!r}")
            return header.index(col)
        return int(col)

    i1, i2 = index_of(col1), index_of(col2)
    if not rows:
        raise DataError(f"{path}: no data rows")
    x1, x2 = [], []
    for line, row in rows:
        if max(i1, i2) >= len(row):
            raise DataError(f"row {line}: expected at least {max(i1, i2) + 1} columns, found {len(row)}")
        x1.append(_parse_count(row[i1], line, i1))
        x2.append(_parse_count(row[i2], line, i2))
    return Dataset(path.stem, PairedSample.from_pairs(zip(x1, x2)), str(path))


def resolve_dataset(spec: str, col1=0, col2=1) -> Dataset:
    """An embedded dataset by name, otherwise a CSV path."""
    if spec.lower() in _EMBEDDED:
        return load_embedded(spec)
    if not Path(spec).exists():
        raise DataError(f"{spec!r} is neither an embedded dataset {embedded_names()} nor a file")
    return load_csv(spec, col1, col2)
