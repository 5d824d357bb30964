"""Relational DDL from a pivot model, checked on an embedded engine.

One table per class with a surrogate key, a foreign key per many-to-one,
a junction table per many-to-many, and class-table inheritance. The same
plan renders as Oracle-flavored SQL (what ships) or ANSI (what the demo
executes on sqlite to prove the script is well-formed).
"""

import sqlite3

from lcpbridge import emit_sql, parse_pivot_text, plan_relational

model = parse_pivot_text("""
model Tickets

enum Severity { LOW, HIGH, BLOCKER }

class Product {
  code: str id
}

class Ticket {
  subject: str
  severity: Severity
  opened: datetime
}

class Agent {
  name: str
}

association TicketProduct {
  tickets: Ticket [0..*]
  product: Product [1..1] nav
}

association Assignment {
  tickets: Ticket [0..*]
  agents: Agent [0..*]
}
""")

plan, loss = plan_relational(model)
oracle_sql = emit_sql(plan, dialect="oracle")
ansi_sql = emit_sql(plan, dialect="ansi")

print("--- Oracle dialect (shipped) " + "-" * 35)
print(oracle_sql)

conn = sqlite3.connect(":memory:")
conn.executescript(ansi_sql)
tables = [r[0] for r in conn.execute(
    "SELECT name FROM sqlite_master WHERE type='table' ORDER BY name")]
print("--- ANSI dialect executed on sqlite " + "-" * 28)
print("tables created:", ", ".join(tables))

conn.execute("PRAGMA foreign_keys = ON")
conn.execute('INSERT INTO "PRODUCT" ("ID", "CODE") VALUES (1, \'P-100\')')
conn.execute('INSERT INTO "TICKET" ("ID", "SUBJECT", "SEVERITY", "PRODUCT_ID") '
             "VALUES (1, 'It is broken', 'BLOCKER', 1)")
print("insert with valid enum literal and FK: ok")

try:
    conn.execute('INSERT INTO "TICKET" ("ID", "SEVERITY") VALUES (2, \'WONTFIX\')')
except sqlite3.IntegrityError as exc:
    print("insert with bad enum literal rejected:", exc)
