"""Structured workbook: the import path for platforms that only ingest data.

Sheets mirror classes, dropdowns encode many-to-one links across sheets,
many-to-many becomes a bridge sheet, and a single sample row gives the
importing platform enough evidence to detect column types. The manifest
JSON written next to the workbook is the canonical description of all of
that structure.
"""

import json
import tempfile
from pathlib import Path

from lcpbridge import emit_workbook, load_tabular, parse_pivot_text, plan_workbook

model = parse_pivot_text("""
model Clinic

class Patient {
  name: str
  born: date
}

class Doctor {
  name: str
}

class Visit {
  at: datetime
  billed: float
}

association VisitPatient {
  visits: Visit [0..*]
  patient: Patient [1..1] nav
}

association Advisors {
  patients: Patient [0..*]
  doctors: Doctor [0..*]
}
""")

manifest, loss = plan_workbook(model)

print("sheets in the workbook:")
for sheet in manifest.sheets:
    headers = ", ".join(c.header for c in sheet.columns)
    print(f"  [{sheet.kind:6}] {sheet.name}: {headers}")
    print(f"           sample row: {sheet.sample_row}")

print()
print("--- loss report " + "-" * 48)
print(loss.summary())

with tempfile.TemporaryDirectory() as tmp:
    book_path, manifest_path = emit_workbook(manifest, Path(tmp) / "clinic.xlsx")
    size = book_path.stat().st_size
    print()
    print(f"wrote {book_path.name} ({size} bytes) + {manifest_path.name}")

    payload = json.loads(manifest_path.read_text())
    visit_sheet = next(s for s in payload["sheets"] if s["name"] == "Visit")
    dropdown = next(c for c in visit_sheet["columns"] if c["validation"])
    print(f"Visit.{dropdown['header']} validates against:",
          dropdown["validation"]["source_sheet"])

    # the workbook is read back by the tabular loader, closing the loop
    tables = load_tabular([book_path]).tables
    print("reloading the workbook finds tables:",
          ", ".join(t.name for t in tables))
