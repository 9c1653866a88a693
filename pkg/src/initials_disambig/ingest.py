"""Reading and writing datasets as CSV.

Two fixed schemas are supported:

``empirical_csv``
    ``paper_id,year,authors`` with one row per paper. ``authors`` lists the
    names in author order, separated by semicolons, each written as
    ``"Last, INITIALS"``. Any bibliographic export can be mapped onto this
    by keeping an article identifier, the publication year and the author
    field.

``simulated_csv``
    ``record_id,paper_id,true_author_id,last_name,first_initial,middle_token``
    with one row per name occurrence, already normalized.
"""

from __future__ import annotations

import csv
import enum
import logging
from collections.abc import Iterable, Iterator
from pathlib import Path
from typing import TextIO

from .core import Dataset, NameOccurrence, Provenance, format_author_name, normalize_author_name
from .errors import DatasetFormatError, NameParseError

log = logging.getLogger(__name__)

EMPIRICAL_HEADER = ("paper_id", "year", "authors")
SIMULATED_HEADER = ("record_id", "paper_id", "true_author_id", "last_name", "first_initial", "middle_token")
YEAR_RANGE = (1800, 2100)


class Format(str, enum.Enum):
    EMPIRICAL_CSV = "empirical_csv"
    SIMULATED_CSV = "simulated_csv"

    def __str__(self) -> str:
        return self.value


HEADERS = {Format.EMPIRICAL_CSV: EMPIRICAL_HEADER, Format.SIMULATED_CSV: SIMULATED_HEADER}


def parse_author_field(raw: str) -> list[tuple[str, str, str]]:
    """Split a semicolon-separated author field into normalized names.

    Order is preserved, so element 0 is the first-listed author.

    >>> parse_author_field("Jackson, PA; Smith, C")
    [('JACKSON', 'P', 'A'), ('SMITH', 'C', '')]

    Raises:
        NameParseError: for an empty field or any malformed name. The error
            carries the 1-based ``position`` and the offending substring.
    """
    if not raw or not raw.strip():
        raise NameParseError("empty author field", raw=raw)
    names = []
    for position, piece in enumerate(raw.split(";"), start=1):
        name = piece.strip()
        if not name:
            raise NameParseError(f"author {position}: empty name in {raw!r}", raw=piece, position=position)
        try:
            names.append(normalize_author_name(name))
        except NameParseError as exc:
            raise NameParseError(f"author {position}: {exc}", raw=name, position=position) from None
    return names


def _parse_int(value: str, column: str, line: int) -> int:
    try:
        return int(value)
    except (TypeError, ValueError):
        raise DatasetFormatError(f"{column} must be an integer, got {value!r}", line) from None


def detect_format(header: Iterable[str]) -> Format:
    cols = tuple(h.strip() for h in header)
    if cols and cols[0].startswith("\ufeff"):
        cols = (cols[0][1:], *cols[1:])
    for fmt, expected in HEADERS.items():
        if cols == expected:
            return fmt
    raise DatasetFormatError(
        f"unrecognized header {','.join(cols)!r}; expected {','.join(EMPIRICAL_HEADER)!r} "
        f"or {','.join(SIMULATED_HEADER)!r}",
        1,
    )


def read_dataset(
    stream: TextIO,
    format: Format | str | None = None,
    *,
    skip_bad_names: bool = False,
    label: str = "",
) -> Dataset:
    """Parse a dataset file.

    Args:
        stream: text stream opened with ``newline=""``.
        format: expected schema; ``None`` detects it from the header.
        skip_bad_names: drop names that fail normalization (logging each)
            instead of aborting. Only applies to ``empirical_csv``.
        label: label given to the returned dataset.

    Record ids of empirical data are assigned sequentially from 0 in file
    order.

    Raises:
        DatasetFormatError: on a header mismatch, malformed row or duplicate
            id. The message starts with the offending line number.
        NameParseError: on a malformed author name, unless skipped.
    """
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise DatasetFormatError("file is empty (no header row)", 1) from None
    found = detect_format(header)
    if format is not None and found is not Format(format):
        raise DatasetFormatError(f"header is {found} but {Format(format)} was requested", 1)
    rows = ((reader.line_num, row) for row in reader)
    if found is Format.EMPIRICAL_CSV:
        return _read_empirical(rows, skip_bad_names, label)
    return _read_simulated(rows, label)


def _read_empirical(rows: Iterator[tuple[int, list[str]]], skip_bad_names: bool, label: str) -> Dataset:
    occurrences: list[NameOccurrence] = []
    years: dict[int, int] = {}
    for line, row in rows:
        if not row:
            continue
        if len(row) != len(EMPIRICAL_HEADER):
            raise DatasetFormatError(f"expected {len(EMPIRICAL_HEADER)} fields, got {len(row)}", line)
        paper_id = _parse_int(row[0], "paper_id", line)
        year = _parse_int(row[1], "year", line)
        if not YEAR_RANGE[0] <= year <= YEAR_RANGE[1]:
            raise DatasetFormatError(f"year {year} outside {YEAR_RANGE[0]}-{YEAR_RANGE[1]}", line)
        if paper_id in years:
            raise DatasetFormatError(f"duplicate paper_id {paper_id}", line)
        names = _parse_names(row[2], line, skip_bad_names)
        if not names:
            log.warning("line %d: paper %d has no usable author names; skipped", line, paper_id)
            continue
        years[paper_id] = year
        for last, first, middle in names:
            occurrences.append(NameOccurrence(len(occurrences), paper_id, last, first, middle))
    return Dataset(tuple(occurrences), Provenance.EMPIRICAL, label, years)


def _parse_names(field: str, line: int, skip_bad_names: bool) -> list[tuple[str, str, str]]:
    if not skip_bad_names:
        try:
            return parse_author_field(field)
        except NameParseError as exc:
            raise NameParseError(f"line {line}: {exc}", raw=exc.raw, position=exc.position) from None
    names = []
    for position, piece in enumerate(field.split(";"), start=1):
        try:
            names.append(normalize_author_name(piece.strip()))
        except NameParseError as exc:
            log.warning("line %d: author %d skipped: %s", line, position, exc)
    return names


def _read_simulated(rows: Iterator[tuple[int, list[str]]], label: str) -> Dataset:
    occurrences: list[NameOccurrence] = []
    seen: set[int] = set()
    for line, row in rows:
        if not row:
            continue
        if len(row) != len(SIMULATED_HEADER):
            raise DatasetFormatError(f"expected {len(SIMULATED_HEADER)} fields, got {len(row)}", line)
        record_id = _parse_int(row[0], "record_id", line)
        if record_id in seen:
            raise DatasetFormatError(f"duplicate record_id {record_id}", line)
        seen.add(record_id)
        paper_id = _parse_int(row[1], "paper_id", line)
        if not row[2].strip():
            raise DatasetFormatError(f"record {record_id} has no true_author_id", line)
        true_id = _parse_int(row[2], "true_author_id", line)
        try:
            occurrences.append(NameOccurrence(record_id, paper_id, row[3], row[4], row[5], true_id))
        except ValueError as exc:
            raise DatasetFormatError(str(exc), line) from None
    return Dataset(tuple(occurrences), Provenance.SIMULATED, label)


def write_dataset(ds: Dataset, stream: TextIO) -> None:
    """Write ``ds`` in the schema matching its provenance.

    Empirical output has one row per paper, in order of each paper's first
    record, and needs a year for every paper. Reading it back reproduces
    ``ds`` when its record ids run 0, 1, 2, ... in paper order.

    Raises:
        DatasetFormatError: if an empirical paper has no year.
    """
    writer = csv.writer(stream, lineterminator="\n")
    if ds.is_simulated:
        writer.writerow(SIMULATED_HEADER)
        writer.writerows(
            (o.record_id, o.paper_id, o.true_author_id, o.last_name, o.first_initial, o.middle_token)
            for o in ds.occurrences
        )
        return
    writer.writerow(EMPIRICAL_HEADER)
    years = ds.years or {}
    for paper_id, occs in ds.papers().items():
        if paper_id not in years:
            raise DatasetFormatError(f"paper {paper_id} has no year; empirical output needs one per paper")
        authors = "; ".join(format_author_name(o.last_name, o.first_initial, o.middle_token) for o in occs)
        writer.writerow((paper_id, years[paper_id], authors))


def load_dataset(path: str | Path, format: Format | str | None = None, **kwargs) -> Dataset:
    """:func:`read_dataset` on a UTF-8 file."""
    with open(path, encoding="utf-8", newline="") as fh:
        return read_dataset(fh, format, **kwargs)


def save_dataset(ds: Dataset, path: str | Path) -> None:
    """:func:`write_dataset` to a UTF-8 file."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        write_dataset(ds, fh)
