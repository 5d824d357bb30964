"""Relational DDL generation for Oracle-Apex-style import.

The classic class-diagram-to-relational mapping: one table per class with a
surrogate key, foreign keys for many-to-one and one-to-one associations,
junction tables for many-to-many, and class-table inheritance where the
child's primary key is also a foreign key to the parent. The ``ansi``
dialect keeps the script runnable on an embedded engine (sqlite) for
verification; ``oracle`` is what ships.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .errors import NameCollisionError
from .loss import LossReport
from .model import Association, DomainModel, require_valid

MAX_NAME = 30  # classic Oracle identifier limit

# pivot primitive -> Oracle column type (the plan stores Oracle flavor)
SQL_TYPES = {
    "str": "VARCHAR2(255)",
    "int": "NUMBER(10)",
    "float": "NUMBER(18,4)",
    "bool": "NUMBER(1)",
    "date": "DATE",
    "datetime": "TIMESTAMP",
    "time": "VARCHAR2(8)",
    "binary": "BLOB",
}

_ANSI_TYPES = {
    "VARCHAR2(255)": "VARCHAR(255)",
    "NUMBER(10)": "NUMERIC(10)",
    "NUMBER(18,4)": "NUMERIC(18,4)",
    "NUMBER(1)": "NUMERIC(1)",
    "VARCHAR2(8)": "VARCHAR(8)",
}

DIALECTS = ("oracle", "ansi")


def sql_name(name: str) -> str:
    """Upper snake case, truncated to 30 chars with a stable hash suffix."""
    flat = []
    prev_lower = False
    for ch in name:
        if ch.isupper() and prev_lower:
            flat.append("_")
        flat.append(ch.upper())
        prev_lower = ch.islower() or ch.isdigit()
    result = "".join(flat).replace("__", "_")
    if len(result) > MAX_NAME:
        digest = hashlib.sha1(result.encode("utf-8")).hexdigest()[:6].upper()
        result = result[:MAX_NAME - 6] + digest
    return result


@dataclass(frozen=True)
class ColumnPlan:
    name: str
    sql_type: str
    nullable: bool = True
    unique: bool = False
    default: str | None = None
    check: str | None = None  # column-scoped membership/range predicate


@dataclass(frozen=True)
class ForeignKeyPlan:
    column: str
    ref_table: str
    ref_column: str
    unique: bool = False


@dataclass
class TablePlan:
    name: str
    columns: list[ColumnPlan] = field(default_factory=list)
    primary_key: list[str] = field(default_factory=lambda: ["ID"])
    foreign_keys: list[ForeignKeyPlan] = field(default_factory=list)
    checks: list[str] = field(default_factory=list)
    identity_pk: bool = True  # surrogate key filled by the database

    def column_names(self) -> set[str]:
        return {c.name for c in self.columns}


@dataclass
class RelationalSchemaPlan:
    tables: list[TablePlan] = field(default_factory=list)

    def table_named(self, name: str) -> TablePlan | None:
        for table in self.tables:
            if table.name == name:
                return table
        return None

    def validate(self) -> list[str]:
        problems = []
        names = set()
        for table in self.tables:
            if len(table.name) > MAX_NAME:
                problems.append(f"table name too long: {table.name}")
            if table.name in names:
                problems.append(f"duplicate table name: {table.name}")
            names.add(table.name)
            for col in table.columns:
                if len(col.name) > MAX_NAME:
                    problems.append(f"column name too long: {table.name}.{col.name}")
        for table in self.tables:
            for fk in table.foreign_keys:
                target = self.table_named(fk.ref_table)
                if target is None:
                    problems.append(f"FK {table.name}.{fk.column} references absent "
                                    f"table {fk.ref_table}")
                elif fk.ref_column not in target.column_names():
                    problems.append(f"FK {table.name}.{fk.column} references absent "
                                    f"column {fk.ref_table}.{fk.ref_column}")
        return problems


def _classify(assoc: Association) -> str:
    many1 = assoc.end1.multiplicity.is_many
    many2 = assoc.end2.multiplicity.is_many
    if many1 and many2:
        return "many-to-many"
    if many1 or many2:
        return "many-to-one"
    return "one-to-one"


def _quoted_literal(value: str) -> str:
    return "'" + value.replace("'", "''") + "'"


def plan_relational(model: DomainModel) -> tuple[RelationalSchemaPlan, LossReport]:
    """Derive the table layout for a valid pivot model."""
    require_valid(model, "model for relational planning")
    loss = LossReport()
    plan = RelationalSchemaPlan()

    table_of_class: dict[str, TablePlan] = {}
    used_table_names: dict[str, str] = {}  # sql name -> source element

    def claim_table_name(sql: str, source: str) -> str:
        if sql in used_table_names:
            raise NameCollisionError(
                f"table name {sql!r} generated twice", used_table_names[sql], source)
        used_table_names[sql] = source
        return sql

    enum_literals = {e.name: e.literals for e in model.enumerations}

    for cls in model.classes:
        table_name = claim_table_name(sql_name(cls.name), cls.name)
        if table_name != cls.name:
            loss.add("class", cls.name, "RENAMED", "info", f"table {table_name}")
        table = TablePlan(name=table_name)
        table.columns.append(ColumnPlan(name="ID", sql_type="NUMBER(10)", nullable=False))
        used_columns: dict[str, str] = {"ID": "(surrogate key)"}
        for prop in cls.properties:
            col_name = sql_name(prop.name)
            if col_name in used_columns:
                raise NameCollisionError(
                    f"column name {col_name!r} generated twice in table {table_name}",
                    used_columns[col_name], prop.name)
            used_columns[col_name] = prop.name
            if prop.type.kind == "enumeration":
                literals = enum_literals.get(prop.type.enum_name, ())
                membership = ", ".join(_quoted_literal(l) for l in literals)
                table.columns.append(ColumnPlan(
                    name=col_name, sql_type="VARCHAR2(255)",
                    nullable=not prop.is_id, unique=prop.is_id,
                    check=f'"{col_name}" IN ({membership})'))
            else:
                primitive = prop.type.primitive
                sql_type = SQL_TYPES[primitive]
                check = f'"{col_name}" IN (0, 1)' if primitive == "bool" else None
                if primitive == "time":
                    loss.add("property", f"{cls.name}.{prop.name}", "TYPE_COERCED",
                             "warning", "time stored as 8-char text")
                table.columns.append(ColumnPlan(
                    name=col_name, sql_type=sql_type,
                    nullable=not prop.is_id, unique=prop.is_id, check=check))
        plan.tables.append(table)
        table_of_class[cls.name] = table

    for gen in model.generalizations:
        child = table_of_class[gen.specific]
        parent = table_of_class[gen.general]
        child.identity_pk = False  # shares the parent's key value
        child.foreign_keys.append(ForeignKeyPlan(
            column="ID", ref_table=parent.name, ref_column="ID"))
        loss.add("generalization", f"{gen.specific}->{gen.general}", "GENERALIZATION_FLATTENED",
                 "info", "class-table inheritance: child key doubles as FK to parent")

    def fk_column_name(table: TablePlan, ref_class: str, role: str,
                       prefer_role: bool = False) -> str:
        # self-associations name the column after the role (MANAGER_ID, not
        # PERSON_ID); otherwise the referenced class names it
        candidates = [sql_name(role) + "_ID", sql_name(ref_class) + "_ID"] \
            if prefer_role else [sql_name(ref_class) + "_ID", sql_name(role) + "_ID"]
        for candidate in candidates:
            if candidate not in table.column_names():
                return candidate
        raise NameCollisionError(
            f"cannot place FK column in {table.name}: both candidates taken",
            candidates[0], candidates[1])

    junctions: list[TablePlan] = []
    for assoc in model.associations:
        kind = _classify(assoc)
        end1, end2 = assoc.end1, assoc.end2
        if kind == "many-to-many":
            base = f"{sql_name(end1.class_name)}_{sql_name(end2.class_name)}"
            if len(base) > MAX_NAME:
                base = sql_name(base)
            if base in used_table_names:
                base = sql_name(f"{base}_{assoc.name}")
            junction = TablePlan(name=claim_table_name(base, assoc.name),
                                 primary_key=[], identity_pk=False)
            same_class = end1.class_name == end2.class_name
            for end in (end1, end2):
                source = end.role if same_class else end.class_name
                col = sql_name(source) + "_ID"
                junction.columns.append(ColumnPlan(name=col, sql_type="NUMBER(10)",
                                                   nullable=False))
                junction.primary_key.append(col)
                junction.foreign_keys.append(ForeignKeyPlan(
                    column=col, ref_table=table_of_class[end.class_name].name,
                    ref_column="ID"))
            junctions.append(junction)
            for end in (end1, end2):
                if end.multiplicity.lower > 0:
                    loss.add("association", assoc.name, "MULTIPLICITY_RELAXED", "info",
                             f"lower bound {end.multiplicity.lower} on {end.role} not enforced")
        elif kind == "many-to-one":
            many_end, one_end = (end1, end2) if end1.multiplicity.is_many else (end2, end1)
            host = table_of_class[many_end.class_name]
            col = fk_column_name(host, one_end.class_name, one_end.role,
                                 prefer_role=many_end.class_name == one_end.class_name)
            host.columns.append(ColumnPlan(
                name=col, sql_type="NUMBER(10)", nullable=one_end.multiplicity.lower == 0))
            host.foreign_keys.append(ForeignKeyPlan(
                column=col, ref_table=table_of_class[one_end.class_name].name,
                ref_column="ID"))
            if many_end.multiplicity.lower > 0:
                loss.add("association", assoc.name, "MULTIPLICITY_RELAXED", "info",
                         f"lower bound {many_end.multiplicity.lower} on {many_end.role} "
                         "not enforced")
        else:  # one-to-one: host deterministically on the alphabetically-first class
            first, second = sorted((end1, end2), key=lambda e: (e.class_name, e.role))
            host = table_of_class[first.class_name]
            col = fk_column_name(host, second.class_name, second.role,
                                 prefer_role=first.class_name == second.class_name)
            host.columns.append(ColumnPlan(
                name=col, sql_type="NUMBER(10)",
                nullable=second.multiplicity.lower == 0, unique=True))
            host.foreign_keys.append(ForeignKeyPlan(
                column=col, ref_table=table_of_class[second.class_name].name,
                ref_column="ID", unique=True))

    plan.tables.extend(junctions)
    problems = plan.validate()
    if problems:
        raise NameCollisionError("; ".join(problems), "-", "-")
    return plan, loss


# ---------------------------------------------------------------------------
# Emission


def _render_type(sql_type: str, dialect: str) -> str:
    if dialect == "ansi":
        return _ANSI_TYPES.get(sql_type, sql_type)
    return sql_type


def _constraint_name(prefix: str, *parts: str) -> str:
    raw = "_".join((prefix,) + parts)
    return sql_name(raw)


def _emit_table(table: TablePlan, dialect: str, inline_fks: bool) -> str:
    body: list[tuple[str, str]] = []  # (definition, trailing comment)
    for col in table.columns:
        parts = [f'  "{col.name}" {_render_type(col.sql_type, dialect)}']
        comment = ""
        if col.name == "ID" and len(table.primary_key) == 1 \
                and table.primary_key[0] == "ID" and table.identity_pk:
            if dialect == "oracle":
                parts.append("GENERATED BY DEFAULT AS IDENTITY")
            else:
                parts.append("NOT NULL")
                comment = "populate from a sequence or the application"
        elif not col.nullable:
            parts.append("NOT NULL")
        if col.default is not None:
            parts.append(f"DEFAULT {col.default}")
        body.append((" ".join(parts), comment))
    if table.primary_key:
        cols = ", ".join(f'"{c}"' for c in table.primary_key)
        body.append((f'  CONSTRAINT "{_constraint_name("PK", table.name)}" '
                     f"PRIMARY KEY ({cols})", ""))
    for col in table.columns:
        if col.unique:
            body.append((f'  CONSTRAINT "{_constraint_name("UQ", table.name, col.name)}" '
                         f'UNIQUE ("{col.name}")', ""))
    for col in table.columns:
        if col.check:
            body.append((f'  CONSTRAINT "{_constraint_name("CK", table.name, col.name)}" '
                         f"CHECK ({col.check})", ""))
    for i, check in enumerate(table.checks, start=1):
        body.append((f'  CONSTRAINT "{_constraint_name("CK", table.name, str(i))}" '
                     f"CHECK ({check})", ""))
    if inline_fks:
        for fk in table.foreign_keys:
            name = _constraint_name("FK", table.name, fk.column)
            body.append((f'  CONSTRAINT "{name}" FOREIGN KEY ("{fk.column}") '
                         f'REFERENCES "{fk.ref_table}" ("ID")', ""))

    lines = [f'CREATE TABLE "{table.name}" (']
    for i, (definition, comment) in enumerate(body):
        comma = "," if i < len(body) - 1 else ""
        suffix = f" -- {comment}" if comment else ""
        lines.append(definition + comma + suffix)
    lines.append(");")
    return "\n".join(lines)


def _table_order(plan: RelationalSchemaPlan) -> list[TablePlan]:
    """Parents before children, junctions (no identity, composite PK) last."""
    class_tables = [t for t in plan.tables if t.primary_key == ["ID"]]
    junction_tables = [t for t in plan.tables if t.primary_key != ["ID"]]

    parent_of = {}
    for table in class_tables:
        for fk in table.foreign_keys:
            if fk.column == "ID":
                parent_of[table.name] = fk.ref_table

    def depth(table: TablePlan) -> int:
        d = 0
        node = table.name
        while node in parent_of:
            node = parent_of[node]
            d += 1
        return d

    ordered = sorted(class_tables, key=lambda t: (depth(t), plan.tables.index(t)))
    return ordered + junction_tables


def emit_sql(plan: RelationalSchemaPlan, dialect: str = "oracle") -> str:
    """Deterministic DDL script for the plan.

    oracle: CREATE TABLEs followed by ALTER TABLE ... ADD CONSTRAINT for
    every foreign key (safe for cycles). ansi: foreign keys are inlined in
    the CREATE statements because the embedded verification engine does not
    support adding constraints afterwards.
    """
    if dialect not in DIALECTS:
        raise ValueError(f"unknown dialect {dialect!r}; expected one of {DIALECTS}")
    problems = plan.validate()
    if problems:
        raise NameCollisionError("; ".join(problems), "-", "-")
    if not plan.tables:
        return ""
    inline = dialect == "ansi"
    statements = [_emit_table(t, dialect, inline) for t in _table_order(plan)]
    if not inline:
        for table in _table_order(plan):
            for fk in table.foreign_keys:
                name = _constraint_name("FK", table.name, fk.column)
                statements.append(
                    f'ALTER TABLE "{table.name}" ADD CONSTRAINT "{name}" '
                    f'FOREIGN KEY ("{fk.column}") REFERENCES "{fk.ref_table}" ("ID");')
    return "\n\n".join(statements) + "\n"


def expected_fk_count(model: DomainModel) -> int:
    """many-to-one + one-to-one + 2 x many-to-many + generalizations."""
    count = len(model.generalizations)
    for assoc in model.associations:
        kind = _classify(assoc)
        if kind == "many-to-many":
            count += 2
        else:
            count += 1
    return count


def expected_table_count(model: DomainModel) -> int:
    return len(model.classes) + sum(
        1 for a in model.associations if _classify(a) == "many-to-many")
