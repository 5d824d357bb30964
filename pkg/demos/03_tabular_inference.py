"""Partial-model inference from CSV files.

Platforms with no real model export often still export data. Each file
becomes a class, each column a property, and the values drive type
detection. Associations cannot be seen in flat files, which is exactly
what the loss report says.
"""

import tempfile
from pathlib import Path

from lcpbridge import infer_model, load_tabular, print_pivot_text

with tempfile.TemporaryDirectory() as tmp:
    root = Path(tmp)
    (root / "Employee.csv").write_text(
        "name,hired,salary,remote\n"
        "Ada,01/03/2020,5200.50,true\n"
        "Grace,15/07/2018,6100,false\n",
        encoding="utf-8")
    (root / "Department.csv").write_text(
        "title,budget\nEngineering,250000\nDesign,80000\n",
        encoding="utf-8")

    source = load_tabular(sorted(root.glob("*.csv")))
    model, loss = infer_model(source, name="Company")

print("--- inferred pivot model " + "-" * 40)
print(print_pivot_text(model))

print("--- loss report " + "-" * 48)
print(loss.summary())

# hired parsed as date (DD/MM/YYYY), salary widened to float because one
# value has decimals, remote recognized as bool. The ASSOCIATIONS_UNKNOWN
# warning is structural: no flat export can say how Employee relates to
# Department. The screenshot path (demo 05) is how that gap gets filled.
