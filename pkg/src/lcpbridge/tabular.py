"""Partial-model inference from tabular exports (CSV files or a workbook).

Mirrors what low-code platforms do when initializing a project from a data
source: each table becomes a class, each column a property, and the cell
values drive type detection. Associations cannot be observed this way, so
the loss report always flags them as unknown.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path

from . import xlsx
from .errors import TabularError
from .loss import LossReport
from .model import (
    Class,
    DomainModel,
    Property,
    primitive_type,
    require_valid,
    sanitize_identifier,
)

SAMPLE_LIMIT = 1000  # rows read per table before sampling stops

_INT_RE = re.compile(r"[+-]?\d+\Z")
_FLOAT_RE = re.compile(r"[+-]?(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?\Z")
_BOOL_TOKENS = frozenset(("true", "false"))
_DATE_FORMATS = ("%d/%m/%Y", "%Y-%m-%d")
_TIME_SUFFIXES = ("%H:%M", "%H:%M:%S")


@dataclass(frozen=True)
class TableColumn:
    header: str
    values: tuple[str, ...]


@dataclass(frozen=True)
class Table:
    name: str
    columns: tuple[TableColumn, ...]


@dataclass(frozen=True)
class TabularSource:
    tables: tuple[Table, ...]


def _check_headers(headers: list[str], where: str) -> None:
    seen: dict[str, str] = {}
    for header in headers:
        low = header.strip().lower()
        if low in seen:
            raise TabularError(
                f"DUPLICATE_HEADER: {where} repeats column {header!r} "
                f"(clashes with {seen[low]!r})")
        seen[low] = header


def _table_from_rows(name: str, rows: list[list[str]], where: str) -> Table:
    if not rows or not any(cell.strip() for cell in rows[0]):
        raise TabularError(f"{where} has no header row")
    headers = [h.strip() for h in rows[0]]
    _check_headers(headers, where)
    columns = []
    for idx, header in enumerate(headers):
        values = tuple(
            row[idx] if idx < len(row) else ""
            for row in rows[1:SAMPLE_LIMIT + 1]
        )
        columns.append(TableColumn(header=header, values=values))
    return Table(name=name, columns=tuple(columns))


def _load_csv(path: Path) -> Table:
    try:
        with open(path, newline="", encoding="utf-8-sig") as handle:
            rows = list(csv.reader(handle))
    except OSError as exc:
        raise TabularError(f"cannot read {path}: {exc}") from exc
    return _table_from_rows(path.stem, rows, str(path))


def load_tabular(paths) -> TabularSource:
    """Load CSV files and/or workbooks; one table per file or sheet."""
    tables: list[Table] = []
    names: set[str] = set()

    def add(table: Table):
        if table.name.lower() in names:
            raise TabularError(f"duplicate table name {table.name!r}")
        names.add(table.name.lower())
        tables.append(table)

    for raw_path in paths:
        path = Path(raw_path)
        if not path.exists():
            raise TabularError(f"cannot read {path}: no such file")
        suffix = path.suffix.lower()
        if suffix == ".csv":
            add(_load_csv(path))
        elif suffix == ".xlsx":
            try:
                sheets = xlsx.read_workbook(path)
            except Exception as exc:
                raise TabularError(f"cannot read workbook {path}: {exc}") from exc
            for sheet in sheets:
                if not sheet.rows:
                    continue  # blank placeholder sheet
                add(_table_from_rows(sheet.name, sheet.rows, f"{path}:{sheet.name}"))
        else:
            raise TabularError(f"unsupported tabular input {path} (expected .csv or .xlsx)")
    return TabularSource(tables=tuple(tables))


# ---------------------------------------------------------------------------
# Type inference


def _all_parse(values, predicate) -> bool:
    return all(predicate(v) for v in values)


def _is_bool(value: str) -> bool:
    return value.strip().lower() in _BOOL_TOKENS


def _is_int(value: str) -> bool:
    return bool(_INT_RE.match(value.strip()))


def _is_float(value: str) -> bool:
    return bool(_FLOAT_RE.match(value.strip()))


def _is_date(value: str) -> bool:
    value = value.strip()
    for fmt in _DATE_FORMATS:
        try:
            datetime.strptime(value, fmt)
            return True
        except ValueError:
            continue
    return False


def _is_datetime(value: str) -> bool:
    value = value.strip()
    for date_fmt in _DATE_FORMATS:
        for time_fmt in _TIME_SUFFIXES:
            try:
                datetime.strptime(value, f"{date_fmt} {time_fmt}")
                return True
            except ValueError:
                continue
    return False


def infer_column_type(values) -> tuple[str, bool]:
    """Apply the precedence ladder; returns (primitive name, defaulted flag).

    Empty cells are ignored. A column with no usable values defaults to str.
    """
    usable = [v for v in values if v.strip()]
    if not usable:
        return "str", True
    if _all_parse(usable, _is_bool):
        return "bool", False
    if _all_parse(usable, _is_int):
        return "int", False
    if _all_parse(usable, _is_float):
        return "float", False
    if _all_parse(usable, _is_date):
        return "date", False
    if _all_parse(usable, _is_datetime):
        return "datetime", False
    return "str", False


def _unique_name(base: str, taken: set[str]) -> str:
    name = base
    counter = 2
    while name.lower() in taken:
        name = f"{base}_{counter}"
        counter += 1
    taken.add(name.lower())
    return name


def infer_model(source: TabularSource, name: str = "Imported",
                suggest_references: bool = False) -> tuple[DomainModel, LossReport]:
    """One class per table, one property per column, types from the ladder.

    No associations are ever fabricated. With ``suggest_references`` on, a
    column whose header matches another table's name yields a
    REFERENCE_CANDIDATE suggestion in the loss report, nothing more.
    """
    loss = LossReport()
    table_names = {t.name.lower() for t in source.tables}
    taken_classes: set[str] = set()
    classes = []
    for table in source.tables:
        class_name = sanitize_identifier(table.name)
        class_name = _unique_name(class_name, taken_classes)
        if class_name != table.name:
            loss.add("class", table.name, "RENAMED", "info", f"sanitized to {class_name}")
        taken_props: set[str] = set()
        properties = []
        for column in table.columns:
            prop_name = sanitize_identifier(column.header)
            prop_name = _unique_name(prop_name, taken_props)
            if prop_name != column.header:
                loss.add("property", f"{table.name}.{column.header}", "RENAMED", "info",
                         f"sanitized to {prop_name}")
            primitive, defaulted = infer_column_type(column.values)
            if defaulted:
                loss.add("property", f"{table.name}.{column.header}", "TYPE_DEFAULTED",
                         "warning", "no values to sample; str assumed")
            properties.append(Property(name=prop_name, type=primitive_type(primitive)))
            if suggest_references and column.header.strip().lower() in table_names \
                    and column.header.strip().lower() != table.name.lower():
                loss.add("property", f"{table.name}.{column.header}", "REFERENCE_CANDIDATE",
                         "info", "header matches another table; possible many-to-one")
        classes.append(Class(name=class_name, properties=tuple(properties)))

    loss.add("model", name, "ASSOCIATIONS_UNKNOWN", "warning",
             "tabular sources carry no explicit relationships between classes")
    model = DomainModel(name=sanitize_identifier(name), classes=tuple(classes))
    return require_valid(model, "inferred tabular model"), loss
