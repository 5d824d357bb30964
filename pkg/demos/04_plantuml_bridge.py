"""PlantUML as the interchange notation for vision-model output.

The parser is built for noisy input: it skips what it cannot use (and says
so), declares classes that only appear in relationship lines, and maps
loose type names onto the pivot's primitives.
"""

from lcpbridge import emit_plantuml, parse_plantuml, print_pivot_text

NOISY = """
Some prose around the diagram does not matter once the markers are found.

@startuml
skinparam classAttributeIconSize 0
title Campus model

class Student {
  name : String
  enrolled : date
  +gpa() : float
}
class Course
enum Grade { A, B, C, F }

Student "0..*" --> "1..*" Course : enrollment
Person <|-- Student
note right: drawn by a vision model
@enduml
"""

result = parse_plantuml(NOISY)

print("--- recovered pivot model " + "-" * 38)
print(print_pivot_text(result.model))

print("--- skipped lines " + "-" * 46)
for line in result.skipped:
    print(f"  line {line.line_no}: {line.text}")

print()
print("loss entries:", len(result.loss))
print()

# The emitter writes the same subset back out, so a pivot model can be
# pasted into any PlantUML renderer (or into a prompt) at any time:
print("--- emitted PlantUML " + "-" * 43)
print(emit_plantuml(result.model))
