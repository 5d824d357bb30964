"""Structured-workbook generation for platforms that infer models from data.

One sheet per class, one column per property, dropdowns wired across sheets
for many-to-one ends, a bridge sheet per many-to-many association, and one
sample data row so the importing platform can detect types and links. The
sibling ``.manifest.json`` is the canonical description of what was
generated and is what tests verify; the xlsx container realizes it.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from . import xlsx
from .errors import NameCollisionError
from .loss import LossReport
from .model import Association, DomainModel, Property, require_valid

SHEET_NAME_MAX = 31  # hard container limit

CELL_FORMATS = {
    "str": "General",
    "int": "0",
    "float": "0.00",
    "bool": "General",
    "date": "DD/MM/YYYY",
    "datetime": "DD/MM/YYYY HH:MM",
    "time": "General",
    "binary": "General",
}

SAMPLE_VALUES = {
    "str": "Sample",
    "int": "1",
    "float": "1.5",
    "bool": "TRUE",
    "date": "01/01/2024",
    "datetime": "01/01/2024 00:00",
    "time": "12:00:00",
    "binary": "",
}

BOOL_OPTIONS = ("TRUE", "FALSE")
DATA_ROWS = 1000  # rows covered by each dropdown validation


@dataclass(frozen=True)
class SheetDropdown:
    source_sheet: str

    def as_dict(self):
        return {"kind": "sheet", "source_sheet": self.source_sheet}


@dataclass(frozen=True)
class ListDropdown:
    options: tuple[str, ...]

    def as_dict(self):
        return {"kind": "list", "options": list(self.options)}


@dataclass(frozen=True)
class ManifestColumn:
    header: str
    cell_format: str = "General"
    validation: SheetDropdown | ListDropdown | None = None

    def as_dict(self):
        return {
            "header": self.header,
            "cell_format": self.cell_format,
            "validation": self.validation.as_dict() if self.validation else None,
        }


@dataclass
class ManifestSheet:
    name: str
    kind: str  # "class" | "bridge"
    columns: list[ManifestColumn] = field(default_factory=list)
    sample_row: list[str] | None = None

    def as_dict(self):
        return {
            "name": self.name,
            "kind": self.kind,
            "columns": [c.as_dict() for c in self.columns],
            "sample_row": list(self.sample_row) if self.sample_row is not None else None,
        }


@dataclass
class WorkbookManifest:
    workbook_name: str
    sheets: list[ManifestSheet] = field(default_factory=list)

    def sheet_named(self, name: str) -> ManifestSheet | None:
        for sheet in self.sheets:
            if sheet.name == name:
                return sheet
        return None

    def as_dict(self):
        return {"workbook_name": self.workbook_name,
                "sheets": [s.as_dict() for s in self.sheets]}

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True) + "\n"

    def validate(self) -> list[str]:
        problems = []
        names = set()
        for sheet in self.sheets:
            if sheet.name in names:
                problems.append(f"duplicate sheet name {sheet.name!r}")
            names.add(sheet.name)
        for sheet in self.sheets:
            if sheet.sample_row is not None and len(sheet.sample_row) != len(sheet.columns):
                problems.append(f"sheet {sheet.name!r}: sample row length "
                                f"{len(sheet.sample_row)} != column count {len(sheet.columns)}")
            headers = set()
            for column in sheet.columns:
                if column.header.lower() in headers:
                    problems.append(f"sheet {sheet.name!r}: duplicate header {column.header!r}")
                headers.add(column.header.lower())
                if isinstance(column.validation, SheetDropdown) \
                        and column.validation.source_sheet not in names:
                    problems.append(f"sheet {sheet.name!r}, column {column.header!r}: "
                                    f"dropdown source {column.validation.source_sheet!r} missing")
        return problems


def _sheet_name(raw: str, taken: dict[str, str]) -> str:
    name = raw
    if len(name) > SHEET_NAME_MAX:
        digest = hashlib.sha1(raw.encode("utf-8")).hexdigest()[:6].upper()
        name = name[:SHEET_NAME_MAX - 6] + digest
    if name in taken:
        raise NameCollisionError(f"sheet name {name!r} generated twice", taken[name], raw)
    taken[name] = raw
    return name


def _classify(assoc: Association) -> str:
    many1 = assoc.end1.multiplicity.is_many
    many2 = assoc.end2.multiplicity.is_many
    if many1 and many2:
        return "many-to-many"
    if many1 or many2:
        return "many-to-one"
    return "one-to-one"


def plan_workbook(model: DomainModel, include_sample_row: bool = True
                  ) -> tuple[WorkbookManifest, LossReport]:
    """Lay out sheets, columns, validations and the sample row for a model."""
    require_valid(model, "model for workbook planning")
    loss = LossReport()
    manifest = WorkbookManifest(workbook_name=model.name)
    enum_literals = {e.name: e.literals for e in model.enumerations}
    taken: dict[str, str] = {}

    # inherited columns repeat on the child sheet (transitively)
    parents = {g.specific: g.general for g in model.generalizations}
    classes_by_name = {c.name: c for c in model.classes}

    def effective_properties(class_name: str) -> list[Property]:
        chain = []
        node = class_name
        while node is not None:
            chain.append(node)
            node = parents.get(node)
        # root-first column order; a redeclared name keeps its slot but the
        # nearer class's version wins
        props: dict[str, Property] = {}
        for ancestor in reversed(chain):
            for prop in classes_by_name[ancestor].properties:
                props[prop.name.lower()] = prop
        return list(props.values())

    sheet_of_class: dict[str, str] = {}
    for cls in model.classes:
        sheet_name = _sheet_name(cls.name, taken)
        if sheet_name != cls.name:
            loss.add("class", cls.name, "RENAMED", "info", f"sheet {sheet_name}")
        sheet_of_class[cls.name] = sheet_name
        sheet = ManifestSheet(name=sheet_name, kind="class",
                              sample_row=[] if include_sample_row else None)
        for prop in effective_properties(cls.name):
            if prop.type.kind == "enumeration":
                literals = enum_literals.get(prop.type.enum_name, ())
                column = ManifestColumn(header=prop.name, cell_format="General",
                                        validation=ListDropdown(tuple(literals)))
                sample = literals[0] if literals else ""
            else:
                primitive = prop.type.primitive
                validation = ListDropdown(BOOL_OPTIONS) if primitive == "bool" else None
                column = ManifestColumn(header=prop.name,
                                        cell_format=CELL_FORMATS[primitive],
                                        validation=validation)
                sample = SAMPLE_VALUES[primitive]
            sheet.columns.append(column)
            if include_sample_row:
                sheet.sample_row.append(sample)
        manifest.sheets.append(sheet)
        if cls.name in parents:
            loss.add("class", cls.name, "GENERALIZATION_FLATTENED", "warning",
                     f"columns of {parents[cls.name]} repeated on sheet {sheet_name}")

    bridge_sheets: list[ManifestSheet] = []
    dropdown_samples: list[tuple[ManifestSheet, str]] = []

    def add_dropdown(host_class: str, target_class: str, header: str):
        host_sheet = manifest.sheet_named(sheet_of_class[host_class])
        taken_headers = {c.header.lower() for c in host_sheet.columns}
        unique = header
        counter = 2
        while unique.lower() in taken_headers:
            unique = f"{header}_{counter}"
            counter += 1
        if unique != header:
            loss.add("association", header, "RENAMED", "info",
                     f"dropdown column stored as {unique!r} on sheet {host_sheet.name}")
        host_sheet.columns.append(ManifestColumn(
            header=unique, cell_format="General",
            validation=SheetDropdown(sheet_of_class[target_class])))
        if include_sample_row:
            dropdown_samples.append((host_sheet, sheet_of_class[target_class]))

    for assoc in model.associations:
        kind = _classify(assoc)
        end1, end2 = assoc.end1, assoc.end2
        if kind == "many-to-many":
            base = f"{sheet_of_class[end1.class_name]}_{sheet_of_class[end2.class_name]}".upper()
            if base in taken:
                base = f"{base}_{assoc.name}".upper()
            name = _sheet_name(base, taken)
            bridge = ManifestSheet(name=name, kind="bridge",
                                   sample_row=[] if include_sample_row else None)
            same_class = end1.class_name == end2.class_name
            for end in (end1, end2):
                header = end.role if same_class else end.class_name.lower()
                bridge.columns.append(ManifestColumn(
                    header=header, cell_format="General",
                    validation=SheetDropdown(sheet_of_class[end.class_name])))
                if include_sample_row:
                    dropdown_samples.append((bridge, sheet_of_class[end.class_name]))
            bridge_sheets.append(bridge)
            loss.add("association", assoc.name, "ASSOCIATIONS_UNKNOWN", "warning",
                     f"survives only as bridge sheet {name}; the platform must "
                     "infer it from the sample data")
        elif kind == "many-to-one":
            many_end, one_end = (end1, end2) if end1.multiplicity.is_many else (end2, end1)
            add_dropdown(many_end.class_name, one_end.class_name, one_end.role)
            loss.add("association", assoc.name, "ASSOCIATIONS_UNKNOWN", "warning",
                     f"survives only as dropdown column {one_end.role!r} on sheet "
                     f"{sheet_of_class[many_end.class_name]}")
        else:  # one-to-one, hosted on the alphabetically-first class
            first, second = sorted((end1, end2), key=lambda e: (e.class_name, e.role))
            add_dropdown(first.class_name, second.class_name, second.role)
            loss.add("association", assoc.name, "ONE_TO_ONE_FLATTENED", "warning",
                     "encoded like many-to-one; uniqueness of the link is not conveyed")
            loss.add("association", assoc.name, "ASSOCIATIONS_UNKNOWN", "warning",
                     f"survives only as dropdown column {second.role!r} on sheet "
                     f"{sheet_of_class[first.class_name]}")

    manifest.sheets.extend(bridge_sheets)

    # dropdown samples point at the referenced sheet's first sample value
    for host_sheet, source_name in dropdown_samples:
        source = manifest.sheet_named(source_name)
        value = source.sample_row[0] if source.sample_row else ""
        host_sheet.sample_row.append(value)

    problems = manifest.validate()
    if problems:
        raise NameCollisionError("; ".join(problems), "-", "-")
    return manifest, loss


def emit_workbook(manifest: WorkbookManifest, path: str | Path) -> tuple[Path, Path]:
    """Write the xlsx container and its canonical manifest JSON.

    A zero-sheet manifest still produces a workbook with one blank sheet
    (the container format requires at least one), while the manifest JSON
    keeps the true zero-sheet description.
    """
    problems = manifest.validate()
    if problems:
        raise NameCollisionError("; ".join(problems), "-", "-")
    path = Path(path)

    sheets: list[xlsx.SheetData] = []
    for sheet in manifest.sheets:
        data = xlsx.SheetData(name=sheet.name)
        header_row = [xlsx.CellValue(text=c.header) for c in sheet.columns]
        data.rows.append(header_row)
        if sheet.sample_row is not None and sheet.columns:
            cells = []
            for column, value in zip(sheet.columns, sheet.sample_row):
                fmt = column.cell_format
                if fmt == "0" or fmt == "0.00":
                    cells.append(xlsx.CellValue(text=value, kind="number", number_format=fmt))
                elif isinstance(column.validation, ListDropdown) \
                        and tuple(column.validation.options) == BOOL_OPTIONS:
                    cells.append(xlsx.CellValue(text=value, kind="bool", number_format=fmt))
                else:
                    cells.append(xlsx.CellValue(text=value, number_format=fmt))
            data.rows.append(cells)
        for index, column in enumerate(sheet.columns, start=1):
            if isinstance(column.validation, SheetDropdown):
                formula = f"'{column.validation.source_sheet}'!$A$2:$A${DATA_ROWS + 1}"
                data.validations.append(xlsx.ListValidation(
                    column=index, first_row=2, last_row=DATA_ROWS + 1, formula=formula))
            elif isinstance(column.validation, ListDropdown):
                options = ",".join(column.validation.options)
                data.validations.append(xlsx.ListValidation(
                    column=index, first_row=2, last_row=DATA_ROWS + 1,
                    formula=f'"{options}"'))
        sheets.append(data)

    xlsx.write_workbook(path, sheets)
    manifest_path = Path(str(path) + ".manifest.json")
    manifest_path.write_text(manifest.to_json(), encoding="utf-8")
    return path, manifest_path


def expected_dropdown_count(model: DomainModel) -> int:
    """Sheet-sourced dropdowns: one per single-column association, two per bridge."""
    count = 0
    for assoc in model.associations:
        kind = _classify(assoc)
        count += 2 if kind == "many-to-many" else 1
    return count
