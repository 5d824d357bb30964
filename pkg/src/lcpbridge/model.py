"""Pivot structural metamodel: classes, associations, generalizations, enums.

All model types are immutable plain data. Construction never raises;
``validate_model`` is the single well-formedness gate and reports violations
as data. Platform adapters build these types and generators consume them.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

PRIMITIVES = ("str", "int", "float", "bool", "date", "datetime", "time", "binary")

# Words the pivot concrete syntax claims for itself. Element names drawn from
# foreign platforms are sanitized away from these so every valid model can be
# printed and re-parsed.
RESERVED_WORDS = frozenset(
    ("model", "enum", "class", "extends", "association", "id", "nav") + PRIMITIVES
)

_IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


def is_identifier(name: str) -> bool:
    return bool(_IDENT_RE.match(name))


def sanitize_identifier(name: str, fallback: str = "Unnamed") -> str:
    """Coerce a foreign name into a pivot identifier.

    Spaces and punctuation become underscores; a non-letter start gets an
    ``X`` prefix; reserved words get a trailing underscore. Deterministic,
    so repeated runs rename identically. Callers record a RENAMED loss entry
    when the result differs from the input.
    """
    cleaned = re.sub(r"[^A-Za-z0-9_]", "_", name.strip())
    cleaned = re.sub(r"_+", "_", cleaned).strip("_") or fallback
    if not cleaned[0].isalpha():
        cleaned = "X" + cleaned
    if cleaned.lower() in RESERVED_WORDS:
        cleaned += "_"
    return cleaned


@dataclass(frozen=True)
class TypeRef:
    """Reference to a primitive type or a declared enumeration."""

    kind: str  # "primitive" | "enumeration"
    primitive: str | None = None
    enum_name: str | None = None

    def key(self) -> tuple:
        return (self.kind, self.primitive, self.enum_name)

    def display(self) -> str:
        return self.primitive if self.kind == "primitive" else (self.enum_name or "?")


def primitive_type(name: str) -> TypeRef:
    if name not in PRIMITIVES:
        raise ValueError(f"not a pivot primitive: {name!r}")
    return TypeRef(kind="primitive", primitive=name)


def enum_type(name: str) -> TypeRef:
    return TypeRef(kind="enumeration", enum_name=name)


@dataclass(frozen=True)
class Property:
    name: str
    type: TypeRef
    is_id: bool = False


@dataclass(frozen=True)
class Class:
    name: str
    properties: tuple[Property, ...] = ()

    def property_names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.properties)


UNBOUNDED = None  # sentinel value for Multiplicity.upper


@dataclass(frozen=True)
class Multiplicity:
    lower: int
    upper: int | None  # None = unbounded (*)

    @property
    def is_many(self) -> bool:
        return self.upper is None or self.upper > 1

    def display(self) -> str:
        upper = "*" if self.upper is None else str(self.upper)
        return f"{self.lower}..{upper}"


MANY = Multiplicity(0, None)
OPTIONAL_ONE = Multiplicity(0, 1)
EXACTLY_ONE = Multiplicity(1, 1)


@dataclass(frozen=True)
class AssociationEnd:
    role: str
    class_name: str
    multiplicity: Multiplicity = MANY
    navigable: bool = True


@dataclass(frozen=True)
class Association:
    name: str
    end1: AssociationEnd
    end2: AssociationEnd

    @property
    def ends(self) -> tuple[AssociationEnd, AssociationEnd]:
        return (self.end1, self.end2)


@dataclass(frozen=True)
class Generalization:
    general: str  # parent class name
    specific: str  # child class name


@dataclass(frozen=True)
class Enumeration:
    name: str
    literals: tuple[str, ...] = ()


@dataclass(frozen=True)
class DomainModel:
    name: str
    classes: tuple[Class, ...] = ()
    associations: tuple[Association, ...] = ()
    generalizations: tuple[Generalization, ...] = ()
    enumerations: tuple[Enumeration, ...] = ()

    def class_named(self, name: str) -> Class | None:
        for cls in self.classes:
            if cls.name == name:
                return cls
        return None

    def enum_named(self, name: str) -> Enumeration | None:
        for enum in self.enumerations:
            if enum.name == name:
                return enum
        return None

    def parent_of(self, class_name: str) -> str | None:
        for gen in self.generalizations:
            if gen.specific == class_name:
                return gen.general
        return None


def empty_model(name: str = "Model") -> DomainModel:
    return DomainModel(name=name)


# ---------------------------------------------------------------------------
# Validation


@dataclass(frozen=True)
class Violation:
    rule: str
    element: str
    message: str

    def __str__(self) -> str:
        return f"{self.rule} [{self.element}]: {self.message}"


@dataclass
class ValidationResult:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def rules(self) -> set[str]:
        return {v.rule for v in self.violations}

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return "\n".join(str(v) for v in self.violations)


def _check_name(value: str, kind: str, out: list[Violation], rule: str = "BAD_IDENTIFIER"):
    if not is_identifier(value):
        out.append(Violation(rule, value or f"<empty {kind}>",
                             f"{kind} name must start with a letter and use letters/digits/underscore"))


def validate_model(model: DomainModel) -> ValidationResult:
    """Check every pivot invariant; violations are returned, never raised."""
    out: list[Violation] = []

    _check_name(model.name, "model", out)

    class_names: dict[str, str] = {}  # lowercase -> declared
    for cls in model.classes:
        _check_name(cls.name, "class", out)
        low = cls.name.lower()
        if low in class_names:
            out.append(Violation("DUPLICATE_CLASS_NAME", cls.name,
                                 f"clashes with class {class_names[low]!r} (names compare case-insensitively)"))
        else:
            class_names[low] = cls.name

    enum_names: dict[str, str] = {}
    for enum in model.enumerations:
        _check_name(enum.name, "enumeration", out)
        low = enum.name.lower()
        if low in enum_names:
            out.append(Violation("DUPLICATE_ENUM_NAME", enum.name, "enumeration name repeated"))
        elif low in class_names:
            out.append(Violation("DUPLICATE_ENUM_NAME", enum.name,
                                 f"clashes with class {class_names[low]!r}"))
        else:
            enum_names[low] = enum.name
        if enum.name in PRIMITIVES:
            # such an enum could never be referenced: the concrete syntax
            # resolves primitive names first
            out.append(Violation("RESERVED_ENUM_NAME", enum.name,
                                 "enumeration may not shadow a primitive type name"))
        if not enum.literals:
            out.append(Violation("EMPTY_ENUM", enum.name, "enumeration needs at least one literal"))
        seen_lits = set()
        for lit in enum.literals:
            _check_name(lit, "literal", out)
            if lit in seen_lits:
                out.append(Violation("DUPLICATE_LITERAL", f"{enum.name}.{lit}", "literal repeated"))
            seen_lits.add(lit)

    declared_enums = {e.name for e in model.enumerations}
    declared_classes = {c.name for c in model.classes}

    for cls in model.classes:
        prop_names = set()
        id_props = [p.name for p in cls.properties if p.is_id]
        if len(id_props) > 1:
            out.append(Violation("MULTIPLE_ID_PROPERTIES", cls.name,
                                 f"more than one id property: {', '.join(id_props)}"))
        for prop in cls.properties:
            _check_name(prop.name, "property", out)
            low = prop.name.lower()
            if low in prop_names:
                out.append(Violation("DUPLICATE_PROPERTY_NAME", f"{cls.name}.{prop.name}",
                                     "property name repeated within class (case-insensitive)"))
            prop_names.add(low)
            t = prop.type
            if t.kind == "primitive":
                if t.primitive not in PRIMITIVES or t.enum_name is not None:
                    out.append(Violation("BAD_TYPE", f"{cls.name}.{prop.name}",
                                         f"malformed primitive type reference {t!r}"))
            elif t.kind == "enumeration":
                if not t.enum_name or t.primitive is not None:
                    out.append(Violation("BAD_TYPE", f"{cls.name}.{prop.name}",
                                         f"malformed enumeration type reference {t!r}"))
                elif t.enum_name not in declared_enums:
                    out.append(Violation("UNKNOWN_ENUM", f"{cls.name}.{prop.name}",
                                         f"references absent enumeration {t.enum_name!r}"))
            else:
                out.append(Violation("BAD_TYPE", f"{cls.name}.{prop.name}",
                                     f"unknown type kind {t.kind!r}"))

    for assoc in model.associations:
        _check_name(assoc.name, "association", out)
        for end in assoc.ends:
            _check_name(end.role, "role", out)
            if end.class_name not in declared_classes:
                out.append(Violation("DANGLING_END", f"{assoc.name}.{end.role}",
                                     f"references absent class {end.class_name!r}"))
            m = end.multiplicity
            if m.lower < 0 or (m.upper is not None and (m.upper < 1 or m.lower > m.upper)):
                out.append(Violation("BAD_MULTIPLICITY", f"{assoc.name}.{end.role}",
                                     f"bounds {m.display()} out of order"))
        if assoc.end1.class_name == assoc.end2.class_name and assoc.end1.role == assoc.end2.role:
            out.append(Violation("DUPLICATE_ROLE", assoc.name,
                                 "self-association ends need distinct role names"))

    children_seen: dict[str, str] = {}
    edges: dict[str, str] = {}  # specific -> general, for cycle walk
    for gen in model.generalizations:
        label = f"{gen.specific}->{gen.general}"
        if gen.general == gen.specific:
            out.append(Violation("SELF_GENERALIZATION", label, "a class cannot specialize itself"))
            continue
        for name in (gen.general, gen.specific):
            if name not in declared_classes:
                out.append(Violation("DANGLING_GENERALIZATION", label,
                                     f"references absent class {name!r}"))
        if gen.specific in children_seen:
            # single inheritance: the concrete syntax can express at most one
            # parent per class, so a second one would be unprintable
            out.append(Violation("MULTIPLE_PARENTS", gen.specific,
                                 f"already specializes {children_seen[gen.specific]!r}"))
        else:
            children_seen[gen.specific] = gen.general
            edges[gen.specific] = gen.general

    for start in edges:
        seen = {start}
        node = edges.get(start)
        while node is not None:
            if node in seen:
                out.append(Violation("GENERALIZATION_CYCLE", start,
                                     "generalization graph contains a cycle"))
                break
            seen.add(node)
            node = edges.get(node)

    return ValidationResult(out)


def require_valid(model: DomainModel, context: str = "model") -> DomainModel:
    """Raise InvalidModelError unless the model validates; convenience gate."""
    from .errors import InvalidModelError

    result = validate_model(model)
    if not result.ok:
        raise InvalidModelError(f"{context} failed validation", result.violations)
    return model


# ---------------------------------------------------------------------------
# Structural equality


def _end_key(end: AssociationEnd) -> tuple:
    # Roles and navigability are presentation-level: the PlantUML interchange
    # syntax cannot carry them, so they stay out of the equivalence.
    # Unbounded upper sorts as -1 to keep keys comparable.
    upper = -1 if end.multiplicity.upper is None else end.multiplicity.upper
    return (end.class_name, end.multiplicity.lower, upper)


def _assoc_key(assoc: Association) -> tuple:
    ends = sorted([_end_key(assoc.end1), _end_key(assoc.end2)])
    return (assoc.name, tuple(ends))


def _class_key(cls: Class) -> tuple:
    props = sorted((p.name, p.type.key(), p.is_id) for p in cls.properties)
    return (cls.name, tuple(props))


def model_equal(a: DomainModel, b: DomainModel) -> bool:
    """Equality up to collection ordering; the model's own name is ignored."""
    if sorted(map(_class_key, a.classes)) != sorted(map(_class_key, b.classes)):
        return False
    if sorted(map(_assoc_key, a.associations)) != sorted(map(_assoc_key, b.associations)):
        return False
    gens_a = sorted((g.general, g.specific) for g in a.generalizations)
    gens_b = sorted((g.general, g.specific) for g in b.generalizations)
    if gens_a != gens_b:
        return False
    enums_a = sorted((e.name, frozenset(e.literals)) for e in a.enumerations)
    enums_b = sorted((e.name, frozenset(e.literals)) for e in b.enumerations)
    return enums_a == enums_b


__all__ = [
    "PRIMITIVES", "RESERVED_WORDS", "UNBOUNDED", "MANY", "OPTIONAL_ONE", "EXACTLY_ONE",
    "TypeRef", "primitive_type", "enum_type", "Property", "Class", "Multiplicity",
    "AssociationEnd", "Association", "Generalization", "Enumeration", "DomainModel",
    "empty_model", "Violation", "ValidationResult", "validate_model", "require_valid",
    "model_equal", "is_identifier", "sanitize_identifier",
]
