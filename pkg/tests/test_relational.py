"""Relational planning and DDL emission, verified on an embedded engine."""

import random
import sqlite3

import pytest

from lcpbridge.errors import NameCollisionError
from lcpbridge.model import (
    Association,
    AssociationEnd,
    Class,
    DomainModel,
    Enumeration,
    Multiplicity,
    Property,
    empty_model,
    enum_type,
    primitive_type,
)
from lcpbridge.relational import (
    RelationalSchemaPlan,
    emit_sql,
    expected_fk_count,
    expected_table_count,
    plan_relational,
    sql_name,
)

from generators import random_model


def run_script(script: str) -> sqlite3.Connection:
    conn = sqlite3.connect(":memory:")
    conn.executescript(script)
    return conn


def introspect_tables(conn) -> list[str]:
    rows = conn.execute(
        "SELECT name FROM sqlite_master WHERE type='table' ORDER BY name").fetchall()
    return [r[0] for r in rows]


def introspect_fk_count(conn) -> int:
    total = 0
    for table in introspect_tables(conn):
        fks = conn.execute(f'PRAGMA foreign_key_list("{table}")').fetchall()
        total += len({row[0] for row in fks})  # group composite FKs by id
    return total


def _m(c1, c2, m1, m2, name="A1", r1="left", r2="right"):
    return Association(name, AssociationEnd(r1, c1, m1), AssociationEnd(r2, c2, m2))


class TestPlan:
    def test_single_class(self):
        model = DomainModel("M", classes=(
            Class("Book", (Property("title", primitive_type("str")),)),))
        plan, loss = plan_relational(model)
        assert [t.name for t in plan.tables] == ["BOOK"]
        book = plan.tables[0]
        assert [c.name for c in book.columns] == ["ID", "TITLE"]
        assert book.primary_key == ["ID"]

    def test_many_to_one_fk_on_many_side(self):
        model = DomainModel("M", classes=(Class("Book"), Class("Library")),
                            associations=(_m("Book", "Library",
                                             Multiplicity(0, None), Multiplicity(0, 1)),))
        plan, _ = plan_relational(model)
        book = plan.table_named("BOOK")
        fk_col = next(c for c in book.columns if c.name == "LIBRARY_ID")
        assert fk_col.nullable
        assert book.foreign_keys[0].ref_table == "LIBRARY"

    def test_mandatory_one_end_not_null(self):
        model = DomainModel("M", classes=(Class("Book"), Class("Library")),
                            associations=(_m("Book", "Library",
                                             Multiplicity(0, None), Multiplicity(1, 1)),))
        plan, _ = plan_relational(model)
        fk_col = next(c for c in plan.table_named("BOOK").columns
                      if c.name == "LIBRARY_ID")
        assert not fk_col.nullable

    def test_many_to_many_junction(self):
        model = DomainModel("M", classes=(Class("Book"), Class("Author")),
                            associations=(_m("Book", "Author",
                                             Multiplicity(0, None), Multiplicity(0, None)),))
        plan, _ = plan_relational(model)
        junction = plan.table_named("BOOK_AUTHOR")
        assert junction is not None
        assert junction.primary_key == ["BOOK_ID", "AUTHOR_ID"]
        assert len(junction.foreign_keys) == 2

    def test_one_to_one_unique_fk(self):
        model = DomainModel("M", classes=(Class("Person"), Class("Passport")),
                            associations=(_m("Person", "Passport",
                                             Multiplicity(1, 1), Multiplicity(0, 1)),))
        plan, _ = plan_relational(model)
        # host = alphabetically first class
        passport = plan.table_named("PASSPORT")
        fk_col = next(c for c in passport.columns if c.name.endswith("_ID"))
        assert fk_col.unique
        assert passport.foreign_keys[0].unique

    def test_generalization_shared_key(self):
        model = DomainModel("M", classes=(Class("Media"), Class("Book")),
                            generalizations=(
                                __import__("lcpbridge.model", fromlist=["Generalization"])
                                .Generalization("Media", "Book"),))
        plan, _ = plan_relational(model)
        book = plan.table_named("BOOK")
        assert book.foreign_keys[0].column == "ID"
        assert book.foreign_keys[0].ref_table == "MEDIA"
        assert not book.identity_pk

    def test_enum_property_membership_check(self):
        model = DomainModel("M",
                            classes=(Class("Ticket", (Property("status", enum_type("S")),)),),
                            enumerations=(Enumeration("S", ("OPEN", "CLOSED")),))
        plan, _ = plan_relational(model)
        col = next(c for c in plan.table_named("TICKET").columns if c.name == "STATUS")
        assert col.check == '"STATUS" IN (\'OPEN\', \'CLOSED\')'

    def test_time_property_coerced_with_loss(self):
        model = DomainModel("M", classes=(
            Class("Slot", (Property("starts", primitive_type("time")),)),))
        plan, loss = plan_relational(model)
        col = next(c for c in plan.table_named("SLOT").columns if c.name == "STARTS")
        assert col.sql_type == "VARCHAR2(8)"
        assert loss.with_reason("TYPE_COERCED")

    def test_column_collision_reports_both_names(self):
        model = DomainModel("M", classes=(
            Class("T", (Property("a_b", primitive_type("int")),
                        Property("aB", primitive_type("int")),)),))
        with pytest.raises(NameCollisionError) as err:
            plan_relational(model)
        assert err.value.first and err.value.second

    def test_self_association_role_columns(self):
        model = DomainModel("M", classes=(Class("Person"),),
                            associations=(_m("Person", "Person",
                                             Multiplicity(0, None), Multiplicity(0, 1),
                                             r1="reports", r2="manager"),))
        plan, _ = plan_relational(model)
        person = plan.table_named("PERSON")
        assert any(c.name == "MANAGER_ID" for c in person.columns)


class TestNames:
    def test_upper_snake(self):
        assert sql_name("BookAuthor") == "BOOK_AUTHOR"
        assert sql_name("pages") == "PAGES"
        assert sql_name("Sales_Order") == "SALES_ORDER"

    def test_truncation_is_stable_and_bounded(self):
        long_name = "AVeryLongClassNameThatKeepsGoingAndGoing"
        first = sql_name(long_name)
        assert len(first) <= 30
        assert first == sql_name(long_name)
        other = sql_name(long_name + "More")
        assert first != other  # hash suffix keeps them apart


class TestEmit:
    def test_empty_plan(self):
        plan, _ = plan_relational(empty_model("M"))
        assert emit_sql(plan, dialect="ansi") == ""

    def test_single_table_no_alter(self):
        model = DomainModel("M", classes=(Class("Book"),))
        plan, _ = plan_relational(model)
        script = emit_sql(plan, dialect="oracle")
        assert script.count("CREATE TABLE") == 1
        assert "ALTER TABLE" not in script

    def test_oracle_uses_identity_and_alter(self, library_model):
        plan, _ = plan_relational(library_model)
        script = emit_sql(plan, dialect="oracle")
        assert "GENERATED BY DEFAULT AS IDENTITY" in script
        assert "ALTER TABLE" in script
        assert "VARCHAR2" in script

    def test_ansi_runs_on_sqlite(self, library_model):
        plan, _ = plan_relational(library_model)
        conn = run_script(emit_sql(plan, dialect="ansi"))
        tables = introspect_tables(conn)
        assert set(tables) == {"AUTHOR", "BOOK", "BOOK_AUTHOR", "LIBRARY"}

    def test_self_association_cycle_accepted(self):
        model = DomainModel("M", classes=(Class("Person"),),
                            associations=(_m("Person", "Person",
                                             Multiplicity(0, None), Multiplicity(0, 1),
                                             r1="reports", r2="manager"),))
        plan, _ = plan_relational(model)
        for dialect in ("oracle", "ansi"):
            script = emit_sql(plan, dialect=dialect)
            if dialect == "ansi":
                run_script(script)
        # oracle flavor: FK arrives via ALTER after the create
        oracle = emit_sql(plan, dialect="oracle")
        assert oracle.index("CREATE TABLE") < oracle.index("ALTER TABLE")

    def test_determinism(self, library_model):
        plan1, _ = plan_relational(library_model)
        plan2, _ = plan_relational(library_model)
        for dialect in ("oracle", "ansi"):
            assert emit_sql(plan1, dialect=dialect) == emit_sql(plan2, dialect=dialect)

    def test_unknown_dialect(self, library_model):
        plan, _ = plan_relational(library_model)
        with pytest.raises(ValueError):
            emit_sql(plan, dialect="postgres")


class TestEngineOracle:
    def test_random_models_execute_and_counts_match(self):
        rng = random.Random(31)
        for _ in range(30):
            model = random_model(rng)
            plan, _ = plan_relational(model)
            conn = run_script(emit_sql(plan, dialect="ansi"))
            tables = introspect_tables(conn)
            assert len(tables) == expected_table_count(model)
            assert introspect_fk_count(conn) == expected_fk_count(model)
            conn.close()

    def test_id_values_and_checks_enforced(self, library_model):
        plan, _ = plan_relational(library_model)
        conn = run_script(emit_sql(plan, dialect="ansi"))
        conn.execute("PRAGMA foreign_keys = ON")
        conn.execute('INSERT INTO "LIBRARY" ("ID", "NAME") VALUES (1, \'Central\')')
        conn.execute('INSERT INTO "BOOK" ("ID", "TITLE", "PAGES", "STATUS", '
                     '"PUBLISHED", "LIBRARY_ID") '
                     "VALUES (1, 'Dune', 412, 'AVAILABLE', '01/08/1965', 1)")
        with pytest.raises(sqlite3.IntegrityError):
            conn.execute('INSERT INTO "BOOK" ("ID", "STATUS") VALUES (2, \'NOT_A_STATUS\')')
        with pytest.raises(sqlite3.IntegrityError):
            conn.execute('INSERT INTO "BOOK" ("ID", "LIBRARY_ID") VALUES (3, 99)')
