"""PlantUML class-diagram subset: parser into the pivot model and emitter.

PlantUML is the interchange format for the vision-model export path, so the
parser is deliberately forgiving: unsupported lines are skipped and reported
rather than rejected, classes mentioned only in relationship lines are
auto-declared, and unknown attribute types degrade to ``str`` with a loss
entry. The emitter produces a deterministic subset that the parser maps back
to an equal model.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import PlantUmlError
from .loss import LossReport
from .model import (
    PRIMITIVES,
    Association,
    AssociationEnd,
    Class,
    DomainModel,
    Enumeration,
    Generalization,
    Multiplicity,
    Property,
    enum_type,
    primitive_type,
    require_valid,
    sanitize_identifier,
)

START_MARKER = "@startuml"
END_MARKER = "@enduml"

# Frozen token table; anything not listed (and not a declared enum) becomes
# str with a TYPE_COERCED entry. Pivot primitive names map to themselves so
# emitted models parse back unchanged.
_TYPE_TABLE = {
    "string": "str",
    "text": "str",
    "integer": "int",
    "double": "float",
    "decimal": "float",
    "boolean": "bool",
    "timestamp": "datetime",
}
_TYPE_TABLE.update({p: p for p in PRIMITIVES})

_CLASS_RE = re.compile(
    r'^(?:abstract\s+)?class\s+(?:"([^"]+)"\s+as\s+(\w+)|"([^"]+)"|([\w.]+))\s*(\{)?\s*(.*)$'
)
_ENUM_RE = re.compile(r'^enum\s+(?:"([^"]+)"|([\w.]+))\s*(\{)?\s*(.*)$')
_GEN_RE = re.compile(r'^([\w."]+)\s+(<\|-+|-+\|>)\s+([\w."]+)\s*$')
_ASSOC_RE = re.compile(
    r'^([\w."]+)\s+(?:"([^"]*)"\s+)?([o*]?(?:<-+|-+>|-+)[o*]?)\s+(?:"([^"]*)"\s+)?([\w."]+)'
    r'\s*(?::\s*(.+))?$'
)
_ATTR_RE = re.compile(r"^[+\-#~]?\s*([\w ]+?)\s*:\s*(.+?)\s*$")
_STEREOTYPE_RE = re.compile(r"<<\s*(\w+)\s*>>")
_SKIP_PREFIXES = ("skinparam", "title", "note", "legend", "hide", "show",
                  "scale", "left to right", "top to bottom", "!")


@dataclass
class SkippedLine:
    line_no: int
    text: str


@dataclass
class PlantUmlImport:
    """Parse outcome: the model plus everything the parser set aside."""

    model: DomainModel
    skipped: list[SkippedLine] = field(default_factory=list)
    loss: LossReport = field(default_factory=LossReport)
    warnings: list[str] = field(default_factory=list)


def parse_multiplicity(token: str) -> Multiplicity:
    """Map a quoted PlantUML multiplicity to explicit bounds."""
    token = token.strip()
    if not token:
        return Multiplicity(0, None)
    if token == "*":
        return Multiplicity(0, None)
    if ".." in token:
        low_text, _, high_text = token.partition("..")
        try:
            lower = int(low_text)
            upper = None if high_text.strip() == "*" else int(high_text)
        except ValueError:
            raise PlantUmlError(f"malformed multiplicity {token!r}")
        return Multiplicity(lower, upper)
    try:
        exact = int(token)
    except ValueError:
        raise PlantUmlError(f"malformed multiplicity {token!r}")
    return Multiplicity(exact, exact if exact > 0 else None)


class _Builder:
    def __init__(self):
        self.class_order: list[str] = []
        self.class_props: dict[str, list[Property]] = {}
        self.enum_order: list[str] = []
        self.enum_literals: dict[str, list[str]] = {}
        self.associations: list[Association] = []
        self.generalizations: list[Generalization] = []
        self.parents: dict[str, str] = {}
        self.assoc_names: set[str] = set()
        self.skipped: list[SkippedLine] = []
        self.loss = LossReport()
        self.warnings: list[str] = []

    def ensure_class(self, name: str) -> str:
        clean = sanitize_identifier(name)
        if clean != name:
            self.loss.add("class", name, "RENAMED", "info", f"sanitized to {clean}")
        if clean not in self.class_props:
            self.class_order.append(clean)
            self.class_props[clean] = []
        return clean

    def ensure_enum(self, name: str) -> str:
        clean = sanitize_identifier(name)
        if clean != name:
            self.loss.add("enumeration", name, "RENAMED", "info", f"sanitized to {clean}")
        if clean not in self.enum_literals:
            self.enum_order.append(clean)
            self.enum_literals[clean] = []
        return clean

    def resolve_type(self, token: str, owner: str, prop: str):
        token = token.strip()
        for name in self.enum_order:
            if name == token:
                return enum_type(name)
        mapped = _TYPE_TABLE.get(token.lower())
        if mapped:
            return primitive_type(mapped)
        for name in self.enum_order:
            if name.lower() == token.lower():
                return enum_type(name)
        self.loss.add("property", f"{owner}.{prop}", "TYPE_COERCED", "warning",
                      f"unknown type {token!r} stored as str")
        return primitive_type("str")

    def add_property(self, class_name: str, raw_name: str, type_token: str):
        name = sanitize_identifier(raw_name)
        if name != raw_name:
            self.loss.add("property", f"{class_name}.{raw_name}", "RENAMED", "info",
                          f"sanitized to {name}")
        existing = {p.name.lower() for p in self.class_props[class_name]}
        if name.lower() in existing:
            self.warnings.append(f"duplicate attribute {class_name}.{name} ignored")
            return
        is_id = False
        stereotype = _STEREOTYPE_RE.search(type_token)
        if stereotype:
            is_id = stereotype.group(1).lower() in ("id", "pk", "key", "unique")
            type_token = _STEREOTYPE_RE.sub("", type_token).strip()
        self.class_props[class_name].append(
            Property(name=name, type=self.resolve_type(type_token, class_name, name),
                     is_id=is_id))

    def add_generalization(self, general: str, specific: str):
        general = self.ensure_class(general)
        specific = self.ensure_class(specific)
        if specific in self.parents:
            if self.parents[specific] != general:
                self.warnings.append(
                    f"extra parent {general} for {specific} dropped (single inheritance)")
                self.loss.add("generalization", f"{specific}->{general}", "DROPPED",
                              "warning", "second parent not representable")
            return
        self.parents[specific] = general
        self.generalizations.append(Generalization(general=general, specific=specific))

    def unique_assoc_name(self, base: str) -> str:
        name = base
        counter = 2
        while name in self.assoc_names:
            name = f"{base}_{counter}"
            counter += 1
        self.assoc_names.add(name)
        return name

    def add_association(self, left: str, m_left: str, arrow: str, m_right: str,
                        right: str, label: str | None):
        left = self.ensure_class(left)
        right = self.ensure_class(right)
        if label:
            base = sanitize_identifier(label.strip().strip("<>").strip())
        else:
            base = f"{left}_{right}"
        name = self.unique_assoc_name(base)
        role1 = sanitize_identifier(left.lower())
        role2 = sanitize_identifier(right.lower())
        if role1 == role2:
            role2 += "_2"
        core = arrow.strip("o*")
        nav1 = core.startswith("<")
        nav2 = core.endswith(">")
        if not nav1 and not nav2:
            nav1 = nav2 = True
        self.associations.append(Association(
            name=name,
            end1=AssociationEnd(role=role1, class_name=left,
                                multiplicity=parse_multiplicity(m_left or ""), navigable=nav1),
            end2=AssociationEnd(role=role2, class_name=right,
                                multiplicity=parse_multiplicity(m_right or ""), navigable=nav2),
        ))

    def build(self, name: str) -> DomainModel:
        classes = tuple(Class(name=c, properties=tuple(self.class_props[c]))
                        for c in self.class_order)
        enums = tuple(Enumeration(name=e, literals=tuple(self.enum_literals[e]))
                      for e in self.enum_order)
        return DomainModel(name=name, classes=classes,
                           associations=tuple(self.associations),
                           generalizations=tuple(self.generalizations),
                           enumerations=enums)


def parse_plantuml(text: str, model_name: str | None = None) -> PlantUmlImport:
    """Parse one @startuml block into a validated pivot model."""
    if text.count(START_MARKER) == 0 or END_MARKER not in text:
        raise PlantUmlError("missing @startuml/@enduml markers")
    if text.count(START_MARKER) > 1:
        raise PlantUmlError("more than one @startuml block")

    start = text.index(START_MARKER)
    end = text.index(END_MARKER, start)
    header = text[start + len(START_MARKER):].split("\n", 1)[0].strip()
    if model_name is None:
        model_name = sanitize_identifier(header) if header else "Model"
    body = text[start:end].split("\n")[1:]

    builder = _Builder()
    current_class: str | None = None
    current_enum: str | None = None
    skip_until: str | None = None  # closing token of an unsupported block

    def skip(line_no, line):
        builder.skipped.append(SkippedLine(line_no, line))

    for offset, raw in enumerate(body, start=2):
        line = raw.strip()
        if not line:
            continue
        if skip_until is not None:
            skip(offset, line)
            if line == skip_until or (skip_until == "}" and line.endswith("}")):
                skip_until = None
            continue
        if current_enum is not None:
            if line == "}":
                current_enum = None
                continue
            literal = sanitize_identifier(line.strip(","))
            if literal not in builder.enum_literals[current_enum]:
                builder.enum_literals[current_enum].append(literal)
            continue
        if current_class is not None:
            if line == "}":
                current_class = None
                continue
            if "(" in line or ")" in line:
                skip(offset, line)  # method, not a structural attribute
                continue
            attr = _ATTR_RE.match(line)
            if attr:
                builder.add_property(current_class, attr.group(1), attr.group(2))
            else:
                skip(offset, line)
            continue

        if line.startswith("'") or line.startswith(_SKIP_PREFIXES):
            skip(offset, line)
            if line.startswith("note") and ":" not in line:
                skip_until = "end note"  # multi-line note body
            continue

        match = _ENUM_RE.match(line)
        if match:
            name = builder.ensure_enum(match.group(1) or match.group(2))
            rest = match.group(4).strip()
            inline = rest.rstrip("}").strip()
            if inline:
                for literal in re.split(r"[,;]", inline):
                    literal = literal.strip()
                    if not literal:
                        continue
                    literal = sanitize_identifier(literal)
                    if literal not in builder.enum_literals[name]:
                        builder.enum_literals[name].append(literal)
            if match.group(3) and not rest.endswith("}"):
                current_enum = name
            continue

        match = _CLASS_RE.match(line)
        if match:
            name = match.group(2) or match.group(1) or match.group(3) or match.group(4)
            name = builder.ensure_class(name)
            rest = match.group(6).strip()
            inline = rest.rstrip("}").strip()
            if inline:
                for chunk in re.split(r"[;,]", inline):
                    attr = _ATTR_RE.match(chunk.strip())
                    if attr:
                        builder.add_property(name, attr.group(1), attr.group(2))
            if match.group(5) and not rest.endswith("}"):
                current_class = name
            continue

        match = _GEN_RE.match(line)
        if match:
            left, arrow, right = match.groups()
            left, right = left.strip('"'), right.strip('"')
            if arrow.startswith("<|"):
                builder.add_generalization(general=left, specific=right)
            else:
                builder.add_generalization(general=right, specific=left)
            continue

        match = _ASSOC_RE.match(line)
        if match:
            left, m_left, arrow, m_right, right, label = match.groups()
            left, right = left.strip('"'), right.strip('"')
            if not left or not right:
                raise PlantUmlError(f"relationship with empty class name: {line!r}")
            builder.add_association(left, m_left, arrow, m_right, right, label)
            continue

        skip(offset, line)
        if line.endswith("{"):
            skip_until = "}"  # unsupported block (interface, struct...)

    model = builder.build(model_name)
    require_valid(model, "parsed PlantUML")
    return PlantUmlImport(model=model, skipped=builder.skipped,
                          loss=builder.loss, warnings=builder.warnings)


def emit_plantuml(model: DomainModel) -> str:
    """Render a valid model as PlantUML; parse_plantuml maps it back."""
    require_valid(model, "model to emit")
    lines = [START_MARKER]
    for enum in model.enumerations:
        lines.append(f"enum {enum.name} {{")
        lines.extend(f"  {literal}" for literal in enum.literals)
        lines.append("}")
    for cls in model.classes:
        if not cls.properties:
            lines.append(f"class {cls.name}")
            continue
        lines.append(f"class {cls.name} {{")
        for prop in cls.properties:
            marker = " <<id>>" if prop.is_id else ""
            lines.append(f"  {prop.name} : {prop.type.display()}{marker}")
        lines.append("}")
    for gen in model.generalizations:
        lines.append(f"{gen.general} <|-- {gen.specific}")
    for assoc in model.associations:
        e1, e2 = assoc.end1, assoc.end2
        if e1.navigable and not e2.navigable:
            arrow = "<--"
        elif e2.navigable and not e1.navigable:
            arrow = "-->"
        else:
            arrow = "--"
        lines.append(
            f'{e1.class_name} "{e1.multiplicity.display()}" {arrow} '
            f'"{e2.multiplicity.display()}" {e2.class_name} : {assoc.name}'
        )
    lines.append(END_MARKER)
    return "\n".join(lines) + "\n"
