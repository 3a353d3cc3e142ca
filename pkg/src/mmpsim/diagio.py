"""Diagnostics persistence: one CSV row per record.

The header is fixed; absent quantities are written as empty fields; values
carry 17 significant digits so a round-trip reproduces every float64
bit-exactly.
"""

from __future__ import annotations

from .norms import RECORD_COLUMNS, DiagnosticsRecord

CSV_HEADER = ",".join(RECORD_COLUMNS)


def _format(value: float | None) -> str:
    return "" if value is None else f"{value:.17g}"


def format_record(record: DiagnosticsRecord) -> str:
    return ",".join(_format(getattr(record, name)) for name in RECORD_COLUMNS)


def write_diagnostics(records, path, append: bool = False) -> None:
    mode = "a" if append else "w"
    with open(path, mode, encoding="utf-8", newline="") as fh:
        if not append:
            fh.write(CSV_HEADER + "\n")
        for record in records:
            fh.write(format_record(record) + "\n")


def read_diagnostics(path) -> list[DiagnosticsRecord]:
    with open(path, encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh]
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"{path}: not a diagnostics CSV "
                         f"(expected header {CSV_HEADER!r})")
    records = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        cells = line.split(",")
        if len(cells) != len(RECORD_COLUMNS):
            raise ValueError(f"{path}:{lineno}: expected "
                             f"{len(RECORD_COLUMNS)} fields, got {len(cells)}")
        kwargs = {name: (None if cell == "" else float(cell))
                  for name, cell in zip(RECORD_COLUMNS, cells)}
        if kwargs["t"] is None or kwargs["l2_energy"] is None:
            raise ValueError(f"{path}:{lineno}: t and l2_energy are required")
        records.append(DiagnosticsRecord(**kwargs))
    return records
