"""Formal export path: a Mendix project JSON becomes a pivot model.

The mapping is direct for entities, attributes, enumerations and
generalizations; association multiplicities come from the Mendix
(type, owner) pair. Whatever does not survive intact lands in the loss
report instead of disappearing silently.
"""

from lcpbridge import mendix_to_pivot, parse_mendix_export, print_pivot_text

EXPORT = {
    "domainModel": {
        "name": "Shop",
        "entities": [
            {"name": "Customer", "attributes": [
                {"name": "name", "type": "String"},
                {"name": "customer since", "type": "DateTime"},
            ]},
            {"name": "Order", "attributes": [
                {"name": "number", "type": "AutoNumber"},
                {"name": "total", "type": "Decimal"},
            ]},
            {"name": "PriorityOrder", "generalization": "Order"},
        ],
        "associations": [
            # each Order references one Customer; a Customer has many Orders
            {"name": "Order_Customer", "parent": "Customer", "child": "Order",
             "type": "Reference", "owner": "Default"},
        ],
        "enumerations": [],
    }
}

export = parse_mendix_export(EXPORT)
model, loss = mendix_to_pivot(export)

print("--- pivot model " + "-" * 48)
print(print_pivot_text(model))

print("--- what changed on the way " + "-" * 36)
print(loss.summary())

# Points to notice in the output:
#  * "customer since" was renamed: pivot identifiers cannot carry spaces.
#  * AutoNumber became int, with a warning that auto-increment semantics
#    are gone.
#  * The Reference/Default association reads: each Order has 0..1 Customer,
#    a Customer has 0..* Orders.
