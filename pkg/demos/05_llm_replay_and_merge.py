"""The screenshot path, fully offline: replay client + partial-model merge.

A vision model turns a diagram screenshot into PlantUML. Tests and demos
never call a live endpoint: the replay client returns stored completions
keyed by a digest of the exact request. This demo stores a canned answer,
then runs the same prompt-build / invoke / extract / merge sequence the
real pipeline uses.
"""

import tempfile
from pathlib import Path

from lcpbridge import (
    ReplayVisionClient,
    VisionRequest,
    build_prompt,
    extract_model,
    invoke_vision_model,
    merge_models,
    print_pivot_text,
)
from lcpbridge.llm import ImagePayload, load_prompt_context
from lcpbridge.model import Class, DomainModel, Property, primitive_type

FAKE_SCREENSHOT = b"\x89PNG\r\n\x1a\n...not a real image, any bytes work..."

# What the platform's CSV export gave us: classes without relationships.
partial = DomainModel("Campus", classes=(
    Class("Student", (Property("name", primitive_type("str")),)),
    Class("Course", (Property("title", primitive_type("str")),)),
))

# What the vision model would answer for our screenshot.
CANNED = """\
@startuml
class Student {
  name : string
}
class Course {
  title : string
}
Student "0..*" -- "1..*" Course : Enrollment
@enduml
"""

context = load_prompt_context("powerapps")
prompt = build_prompt(context, partial)
request = VisionRequest(prompt_text=prompt,
                        images=(ImagePayload(FAKE_SCREENSHOT, "image/png"),))

with tempfile.TemporaryDirectory() as tmp:
    store = ReplayVisionClient(Path(tmp))
    fixture = store.store(request, CANNED)
    print(f"fixture stored as {fixture.name}")

    completion = invoke_vision_model(request, store)
    inferred = extract_model(completion).model
    merged, report = merge_models(partial, inferred)

print()
print("--- merged model " + "-" * 47)
print(print_pivot_text(merged))
print("associations added by the image:", report.added_associations)
print("conflicts:", len(report.conflicts))

# The partial model always wins conflicts: it came from real exported
# data, while the completion is a reading of a picture.
