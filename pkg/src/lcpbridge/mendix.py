"""Mendix project-export (JSON) to pivot model transformation.

The accepted document is the simplified stand-in schema documented in
``docs/mendix-export.schema.json``: top-level ``domainModel`` with entities,
associations (``parent``/``child``/``type``/``owner``) and enumerations.
Entities map to classes, attributes to properties, and association
multiplicities follow the (type, owner) decision table below.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import MendixImportError
from .loss import LossReport
from .model import (
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

# Mendix attribute type -> (pivot primitive, loss detail or None)
ATTRIBUTE_TYPES = {
    "String": ("str", None),
    "HashedString": ("str", "hashing semantics lost"),
    "Integer": ("int", None),
    "Long": ("int", None),
    "AutoNumber": ("int", "auto-increment semantics lost"),
    "Decimal": ("float", None),
    "Boolean": ("bool", None),
    "DateTime": ("datetime", None),
    "Binary": ("binary", None),
}

# (association type, owner) -> (child-end multiplicity, parent-end multiplicity)
CARDINALITY_TABLE = {
    ("Reference", "Default"): (Multiplicity(0, None), Multiplicity(0, 1)),
    ("Reference", "Both"): (Multiplicity(0, 1), Multiplicity(0, 1)),
    ("ReferenceSet", "Default"): (Multiplicity(0, None), Multiplicity(0, None)),
    ("ReferenceSet", "Both"): (Multiplicity(0, None), Multiplicity(0, None)),
}


@dataclass(frozen=True)
class MendixAttribute:
    name: str
    type: str
    enum_ref: str | None = None


@dataclass(frozen=True)
class MendixEntity:
    name: str
    attributes: tuple[MendixAttribute, ...] = ()
    generalization: str | None = None


@dataclass(frozen=True)
class MendixAssociation:
    name: str
    parent: str
    child: str
    type: str = "Reference"
    owner: str = "Default"


@dataclass(frozen=True)
class MendixEnumeration:
    name: str
    values: tuple[str, ...] = ()


@dataclass(frozen=True)
class MendixExport:
    name: str
    entities: tuple[MendixEntity, ...] = ()
    associations: tuple[MendixAssociation, ...] = ()
    enumerations: tuple[MendixEnumeration, ...] = ()
    warnings: tuple[str, ...] = ()


def _require(mapping: dict, key: str, where: str):
    if key not in mapping or mapping[key] in (None, ""):
        raise MendixImportError(f"missing mandatory field {key!r} in {where}")
    return mapping[key]


def parse_mendix_export(document: str | bytes | dict) -> MendixExport:
    """Read an export document into memory, checking referential integrity.

    Unknown fields are ignored but listed in the result's warnings.
    """
    if isinstance(document, (str, bytes)):
        try:
            payload = json.loads(document)
        except json.JSONDecodeError as exc:
            raise MendixImportError(f"malformed JSON: {exc}") from exc
    else:
        payload = document
    if not isinstance(payload, dict) or "domainModel" not in payload:
        raise MendixImportError("document has no top-level 'domainModel' object")
    dm = payload["domainModel"]

    warnings: list[str] = []

    def note_unknown(mapping: dict, known: set[str], where: str):
        for key in mapping:
            if key not in known:
                warnings.append(f"ignored unknown field {key!r} in {where}")

    note_unknown(dm, {"name", "entities", "associations", "enumerations"}, "domainModel")

    entities = []
    for raw in dm.get("entities", []):
        name = _require(raw, "name", "entity")
        note_unknown(raw, {"name", "attributes", "generalization"}, f"entity {name}")
        attributes = []
        for attr in raw.get("attributes", []):
            attr_name = _require(attr, "name", f"attribute of {name}")
            attr_type = _require(attr, "type", f"attribute {name}.{attr_name}")
            note_unknown(attr, {"name", "type", "enum_ref"}, f"attribute {name}.{attr_name}")
            attributes.append(MendixAttribute(attr_name, attr_type, attr.get("enum_ref")))
        entities.append(MendixEntity(name, tuple(attributes), raw.get("generalization")))

    associations = []
    for raw in dm.get("associations", []):
        name = _require(raw, "name", "association")
        note_unknown(raw, {"name", "parent", "child", "type", "owner"}, f"association {name}")
        associations.append(MendixAssociation(
            name=name,
            parent=_require(raw, "parent", f"association {name}"),
            child=_require(raw, "child", f"association {name}"),
            type=raw.get("type", "Reference"),
            owner=raw.get("owner", "Default"),
        ))

    enumerations = []
    for raw in dm.get("enumerations", []):
        name = _require(raw, "name", "enumeration")
        note_unknown(raw, {"name", "values"}, f"enumeration {name}")
        enumerations.append(MendixEnumeration(name, tuple(raw.get("values", []))))

    export = MendixExport(
        name=dm.get("name", "DomainModel"),
        entities=tuple(entities),
        associations=tuple(associations),
        enumerations=tuple(enumerations),
        warnings=tuple(warnings),
    )
    _check_references(export)
    return export


def load_mendix_export(path: str | Path) -> MendixExport:
    return parse_mendix_export(Path(path).read_text(encoding="utf-8"))


def _check_references(export: MendixExport) -> None:
    entity_names = {e.name for e in export.entities}
    enum_names = {e.name for e in export.enumerations}
    seen = set()
    for entity in export.entities:
        if entity.name in seen:
            raise MendixImportError(f"duplicate entity name {entity.name!r}")
        seen.add(entity.name)
        if entity.generalization is not None and entity.generalization not in entity_names:
            raise MendixImportError(
                f"entity {entity.name!r} generalizes absent entity {entity.generalization!r}")
        for attr in entity.attributes:
            if attr.type == "Enumeration":
                if not attr.enum_ref:
                    raise MendixImportError(
                        f"attribute {entity.name}.{attr.name} of type Enumeration lacks enum_ref")
                if attr.enum_ref not in enum_names:
                    raise MendixImportError(
                        f"attribute {entity.name}.{attr.name} references absent "
                        f"enumeration {attr.enum_ref!r}")
    for assoc in export.associations:
        for end in (assoc.parent, assoc.child):
            if end not in entity_names:
                raise MendixImportError(
                    f"association {assoc.name!r} references absent entity {end!r}")


@dataclass
class _Namer:
    """Sanitize foreign names once, recording renames."""

    loss: LossReport
    kind: str
    mapping: dict = field(default_factory=dict)

    def clean(self, name: str) -> str:
        if name not in self.mapping:
            cleaned = sanitize_identifier(name)
            if cleaned != name:
                self.loss.add(self.kind, name, "RENAMED", "info", f"sanitized to {cleaned}")
            self.mapping[name] = cleaned
        return self.mapping[name]


def mendix_to_pivot(export: MendixExport) -> tuple[DomainModel, LossReport]:
    """Apply the concept mapping: entities, attributes, enums, associations."""
    loss = LossReport()
    class_namer = _Namer(loss, "class")
    enum_namer = _Namer(loss, "enumeration")

    enumerations = []
    for enum in export.enumerations:
        literals = []
        for value in enum.values:
            cleaned = sanitize_identifier(value)
            if cleaned != value:
                loss.add("literal", f"{enum.name}.{value}", "RENAMED", "info",
                         f"sanitized to {cleaned}")
            if cleaned not in literals:
                literals.append(cleaned)
        enumerations.append(Enumeration(name=enum_namer.clean(enum.name),
                                        literals=tuple(literals)))

    classes = []
    generalizations = []
    for entity in export.entities:
        class_name = class_namer.clean(entity.name)
        properties = []
        for attr in entity.attributes:
            prop_name = sanitize_identifier(attr.name)
            if prop_name != attr.name:
                loss.add("property", f"{entity.name}.{attr.name}", "RENAMED", "info",
                         f"sanitized to {prop_name}")
            if attr.type == "Enumeration":
                type_ref = enum_type(enum_namer.clean(attr.enum_ref))
            elif attr.type in ATTRIBUTE_TYPES:
                primitive, detail = ATTRIBUTE_TYPES[attr.type]
                type_ref = primitive_type(primitive)
                if detail:
                    loss.add("property", f"{entity.name}.{attr.name}", "TYPE_COERCED",
                             "warning", f"{attr.type} -> {primitive}: {detail}")
            else:
                type_ref = primitive_type("str")
                loss.add("property", f"{entity.name}.{attr.name}", "TYPE_COERCED",
                         "warning", f"unknown Mendix type {attr.type!r} stored as str")
            properties.append(Property(name=prop_name, type=type_ref))
        classes.append(Class(name=class_name, properties=tuple(properties)))
        if entity.generalization is not None:
            generalizations.append(Generalization(
                general=class_namer.clean(entity.generalization), specific=class_name))

    associations = []
    for assoc in export.associations:
        key = (assoc.type, assoc.owner)
        if key not in CARDINALITY_TABLE:
            loss.add("association", assoc.name, "TYPE_COERCED", "warning",
                     f"unknown (type, owner) pair {key!r}; treated as (Reference, Default)")
            key = ("Reference", "Default")
        child_mult, parent_mult = CARDINALITY_TABLE[key]
        both = assoc.owner == "Both"
        child_class = class_namer.clean(assoc.child)
        parent_class = class_namer.clean(assoc.parent)
        child_role = sanitize_identifier(child_class.lower())
        parent_role = sanitize_identifier(parent_class.lower())
        if child_role == parent_role:
            parent_role += "_parent"
        associations.append(Association(
            name=sanitize_identifier(assoc.name),
            end1=AssociationEnd(role=child_role, class_name=child_class,
                                multiplicity=child_mult, navigable=both),
            end2=AssociationEnd(role=parent_role, class_name=parent_class,
                                multiplicity=parent_mult, navigable=True),
        ))

    model = DomainModel(
        name=sanitize_identifier(export.name),
        classes=tuple(classes),
        associations=tuple(associations),
        generalizations=tuple(generalizations),
        enumerations=tuple(enumerations),
    )
    return require_valid(model, "Mendix-derived model"), loss
