"""Minimal OOXML spreadsheet container support (no third-party writer).

An ``.xlsx`` file is a zip of XML parts; this module writes and reads just
the subset the toolkit needs: sheets with inline-string/number/boolean
cells, per-cell number formats, and list data validations. Output is
byte-deterministic (fixed zip timestamps, no compression entropy sources),
which the migration determinism guarantee relies on.
"""

from __future__ import annotations

import re
import zipfile
from dataclasses import dataclass, field
from pathlib import Path
from xml.etree import ElementTree as ET
from xml.sax.saxutils import escape

NS_MAIN = "http://schemas.openxmlformats.org/spreadsheetml/2006/main"
NS_REL = "http://schemas.openxmlformats.org/officeDocument/2006/relationships"
NS_PKG_REL = "http://schemas.openxmlformats.org/package/2006/relationships"

# Number formats used by the workbook generator. Ids >= 164 are the custom
# range; 0/1/2 are builtin General, "0" and "0.00".
_CUSTOM_FORMATS = {
    "DD/MM/YYYY": 164,
    "DD/MM/YYYY HH:MM": 165,
}
_BUILTIN_FORMATS = {"General": 0, "0": 1, "0.00": 2}

_CELL_REF_RE = re.compile(r"([A-Z]+)(\d+)")
_EPOCH = (1980, 1, 1, 0, 0, 0)


def column_letter(index: int) -> str:
    """1-based column index to spreadsheet letters (1 -> A, 27 -> AA)."""
    letters = ""
    while index > 0:
        index, rem = divmod(index - 1, 26)
        letters = chr(ord("A") + rem) + letters
    return letters


def _column_index(letters: str) -> int:
    index = 0
    for ch in letters:
        index = index * 26 + (ord(ch) - ord("A") + 1)
    return index


@dataclass
class CellValue:
    """A typed cell for the writer."""

    text: str
    kind: str = "inline"  # inline | number | bool
    number_format: str = "General"


@dataclass
class ListValidation:
    column: int  # 1-based
    first_row: int
    last_row: int
    formula: str  # e.g. "'Library'!$A$2:$A$1000" or "\"TRUE,FALSE\""


@dataclass
class SheetData:
    name: str
    rows: list[list[CellValue]] = field(default_factory=list)
    validations: list[ListValidation] = field(default_factory=list)


def _style_index(number_format: str, styles: dict[str, int]) -> int:
    if number_format not in styles:
        raise ValueError(f"unregistered number format {number_format!r}")
    return styles[number_format]


def _styles_xml(formats: list[str]) -> tuple[str, dict[str, int]]:
    custom = [f for f in formats if f in _CUSTOM_FORMATS]
    num_fmts = "".join(
        f'<numFmt numFmtId="{_CUSTOM_FORMATS[f]}" formatCode="{escape(f, {chr(34): "&quot;"})}"/>'
        for f in sorted(set(custom), key=_CUSTOM_FORMATS.get)
    )
    num_fmt_block = f'<numFmts count="{len(set(custom))}">{num_fmts}</numFmts>' if custom else ""

    style_of: dict[str, int] = {}
    xfs = []
    for fmt in formats:
        if fmt in style_of:
            continue
        fmt_id = _CUSTOM_FORMATS.get(fmt, _BUILTIN_FORMATS.get(fmt))
        if fmt_id is None:
            raise ValueError(f"unsupported number format {fmt!r}")
        apply_attr = ' applyNumberFormat="1"' if fmt_id else ""
        xfs.append(f'<xf numFmtId="{fmt_id}" fontId="0" fillId="0" borderId="0"{apply_attr}/>')
        style_of[fmt] = len(xfs) - 1
    xml = (
        '<?xml version="1.0" encoding="UTF-8" standalone="yes"?>'
        f'<styleSheet xmlns="{NS_MAIN}">'
        f"{num_fmt_block}"
        '<fonts count="1"><font><sz val="11"/><name val="Calibri"/></font></fonts>'
        '<fills count="1"><fill><patternFill patternType="none"/></fill></fills>'
        '<borders count="1"><border/></borders>'
        '<cellStyleXfs count="1"><xf numFmtId="0"/></cellStyleXfs>'
        f'<cellXfs count="{len(xfs)}">{"".join(xfs)}</cellXfs>'
        "</styleSheet>"
    )
    return xml, style_of


def _sheet_xml(sheet: SheetData, styles: dict[str, int]) -> str:
    rows_xml = []
    for r, row in enumerate(sheet.rows, start=1):
        cells = []
        for c, cell in enumerate(row, start=1):
            ref = f"{column_letter(c)}{r}"
            style = _style_index(cell.number_format, styles)
            style_attr = f' s="{style}"' if style else ""
            if cell.kind == "number":
                cells.append(f'<c r="{ref}"{style_attr}><v>{escape(cell.text)}</v></c>')
            elif cell.kind == "bool":
                value = "1" if cell.text.strip().upper() in ("TRUE", "1") else "0"
                cells.append(f'<c r="{ref}" t="b"{style_attr}><v>{value}</v></c>')
            else:
                cells.append(
                    f'<c r="{ref}" t="inlineStr"{style_attr}>'
                    f"<is><t xml:space=\"preserve\">{escape(cell.text)}</t></is></c>"
                )
        rows_xml.append(f'<row r="{r}">{"".join(cells)}</row>')

    validations = ""
    if sheet.validations:
        items = []
        for v in sheet.validations:
            col = column_letter(v.column)
            sqref = f"{col}{v.first_row}:{col}{v.last_row}"
            items.append(
                f'<dataValidation type="list" allowBlank="1" showDropDown="0" sqref="{sqref}">'
                f"<formula1>{escape(v.formula)}</formula1></dataValidation>"
            )
        validations = (
            f'<dataValidations count="{len(sheet.validations)}">{"".join(items)}</dataValidations>'
        )

    return (
        '<?xml version="1.0" encoding="UTF-8" standalone="yes"?>'
        f'<worksheet xmlns="{NS_MAIN}">'
        f'<sheetData>{"".join(rows_xml)}</sheetData>'
        f"{validations}"
        "</worksheet>"
    )


def write_workbook(path: str | Path, sheets: list[SheetData]) -> None:
    """Write the sheets as an .xlsx file; at least one sheet is emitted."""
    if not sheets:
        sheets = [SheetData(name="Sheet1", rows=[])]

    formats = ["General", "0", "0.00", "DD/MM/YYYY", "DD/MM/YYYY HH:MM"]
    styles_xml, style_of = _styles_xml(formats)

    sheet_entries = []
    rel_entries = []
    for i, sheet in enumerate(sheets, start=1):
        safe_name = escape(sheet.name, {'"': "&quot;"})
        sheet_entries.append(
            f'<sheet name="{safe_name}" sheetId="{i}" r:id="rId{i}"/>')
        rel_entries.append(
            f'<Relationship Id="rId{i}" '
            f'Type="{NS_REL}/worksheet" Target="worksheets/sheet{i}.xml"/>')
    styles_rid = len(sheets) + 1
    rel_entries.append(
        f'<Relationship Id="rId{styles_rid}" Type="{NS_REL}/styles" Target="styles.xml"/>')

    content_types = (
        '<?xml version="1.0" encoding="UTF-8" standalone="yes"?>'
        '<Types xmlns="http://schemas.openxmlformats.org/package/2006/content-types">'
        '<Default Extension="rels" '
        'ContentType="application/vnd.openxmlformats-package.relationships+xml"/>'
        '<Default Extension="xml" ContentType="application/xml"/>'
        '<Override PartName="/xl/workbook.xml" ContentType="application/vnd.'
        'openxmlformats-officedocument.spreadsheetml.sheet.main+xml"/>'
        + "".join(
            f'<Override PartName="/xl/worksheets/sheet{i}.xml" ContentType="application/vnd.'
            "openxmlformats-officedocument.spreadsheetml.worksheet+xml\"/>"
            for i in range(1, len(sheets) + 1)
        )
        + '<Override PartName="/xl/styles.xml" ContentType="application/vnd.'
        'openxmlformats-officedocument.spreadsheetml.styles+xml"/>'
        "</Types>"
    )
    root_rels = (
        '<?xml version="1.0" encoding="UTF-8" standalone="yes"?>'
        f'<Relationships xmlns="{NS_PKG_REL}">'
        f'<Relationship Id="rId1" Type="{NS_REL}/officeDocument" Target="xl/workbook.xml"/>'
        "</Relationships>"
    )
    workbook_xml = (
        '<?xml version="1.0" encoding="UTF-8" standalone="yes"?>'
        f'<workbook xmlns="{NS_MAIN}" xmlns:r="{NS_REL}">'
        f'<sheets>{"".join(sheet_entries)}</sheets>'
        "</workbook>"
    )
    workbook_rels = (
        '<?xml version="1.0" encoding="UTF-8" standalone="yes"?>'
        f'<Relationships xmlns="{NS_PKG_REL}">{"".join(rel_entries)}</Relationships>'
    )

    parts: list[tuple[str, str]] = [
        ("[Content_Types].xml", content_types),
        ("_rels/.rels", root_rels),
        ("xl/workbook.xml", workbook_xml),
        ("xl/_rels/workbook.xml.rels", workbook_rels),
        ("xl/styles.xml", styles_xml),
    ]
    for i, sheet in enumerate(sheets, start=1):
        parts.append((f"xl/worksheets/sheet{i}.xml", _sheet_xml(sheet, style_of)))

    with zipfile.ZipFile(path, "w", zipfile.ZIP_DEFLATED) as zf:
        for name, data in parts:
            info = zipfile.ZipInfo(name, date_time=_EPOCH)
            info.compress_type = zipfile.ZIP_DEFLATED
            info.external_attr = 0o600 << 16
            zf.writestr(info, data.encode("utf-8"))


# ---------------------------------------------------------------------------
# Reading


@dataclass
class SheetContent:
    name: str
    rows: list[list[str]]
    validations: list[dict]


def _cell_text(cell: ET.Element, shared: list[str]) -> str:
    kind = cell.get("t", "n")
    if kind == "inlineStr":
        node = cell.find(f"{{{NS_MAIN}}}is")
        return "".join(t.text or "" for t in node.iter(f"{{{NS_MAIN}}}t")) if node is not None else ""
    value = cell.findtext(f"{{{NS_MAIN}}}v", default="")
    if kind == "s":
        try:
            return shared[int(value)]
        except (ValueError, IndexError):
            return ""
    if kind == "b":
        return "TRUE" if value.strip() == "1" else "FALSE"
    if kind == "str":
        return value
    # plain number: keep integral values free of a trailing .0
    if value and "." in value:
        try:
            as_float = float(value)
            if as_float == int(as_float) and "e" not in value.lower():
                return str(int(as_float))
        except ValueError:
            pass
    return value


def read_workbook(path: str | Path) -> list[SheetContent]:
    """Read sheet names, cell grid (as display strings) and list validations."""
    with zipfile.ZipFile(path) as zf:
        workbook = ET.fromstring(zf.read("xl/workbook.xml"))
        rels = ET.fromstring(zf.read("xl/_rels/workbook.xml.rels"))
        targets = {}
        for rel in rels.iter(f"{{{NS_PKG_REL}}}Relationship"):
            target = rel.get("Target", "")
            if target.startswith("/"):
                target = target.lstrip("/")
            else:
                target = "xl/" + target
            targets[rel.get("Id")] = target

        shared: list[str] = []
        if "xl/sharedStrings.xml" in zf.namelist():
            sst = ET.fromstring(zf.read("xl/sharedStrings.xml"))
            for si in sst.iter(f"{{{NS_MAIN}}}si"):
                shared.append("".join(t.text or "" for t in si.iter(f"{{{NS_MAIN}}}t")))

        sheets = []
        for sheet in workbook.iter(f"{{{NS_MAIN}}}sheet"):
            rid = sheet.get(f"{{{NS_REL}}}id")
            data = ET.fromstring(zf.read(targets[rid]))
            grid: list[list[str]] = []
            for row in data.iter(f"{{{NS_MAIN}}}row"):
                row_index = int(row.get("r", len(grid) + 1))
                while len(grid) < row_index:
                    grid.append([])
                cells = grid[row_index - 1]
                for cell in row.iter(f"{{{NS_MAIN}}}c"):
                    ref = cell.get("r", "")
                    match = _CELL_REF_RE.match(ref)
                    col = _column_index(match.group(1)) if match else len(cells) + 1
                    while len(cells) < col:
                        cells.append("")
                    cells[col - 1] = _cell_text(cell, shared)
            validations = []
            for dv in data.iter(f"{{{NS_MAIN}}}dataValidation"):
                validations.append({
                    "type": dv.get("type", ""),
                    "sqref": dv.get("sqref", ""),
                    "formula": dv.findtext(f"{{{NS_MAIN}}}formula1", default=""),
                })
            sheets.append(SheetContent(name=sheet.get("name", ""), rows=grid,
                                       validations=validations))
    return sheets
