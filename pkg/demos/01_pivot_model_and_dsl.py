"""The pivot model and its textual syntax.

Every migration passes through one LCP-independent structural model. This
demo builds one in code, validates it, prints it as editable `.bml` text,
and shows that parsing the text gives the same model back.
"""

from lcpbridge import model_equal, parse_pivot_text, print_pivot_text, validate_model
from lcpbridge.model import (
    Association,
    AssociationEnd,
    Class,
    DomainModel,
    Enumeration,
    Multiplicity,
    Property,
    enum_type,
    primitive_type,
)

# A small rental domain: two classes, an enum, one many-to-one association.
model = DomainModel(
    name="Rentals",
    classes=(
        Class("Car", (
            Property("plate", primitive_type("str"), is_id=True),
            Property("state", enum_type("CarState")),
        )),
        Class("Booking", (
            Property("starts", primitive_type("date")),
            Property("days", primitive_type("int")),
        )),
    ),
    associations=(
        Association(
            "CarBookings",
            AssociationEnd("bookings", "Booking", Multiplicity(0, None)),
            AssociationEnd("car", "Car", Multiplicity(1, 1)),
        ),
    ),
    enumerations=(Enumeration("CarState", ("AVAILABLE", "RENTED", "SERVICE")),),
)

print("validation:", validate_model(model))
print()

text = print_pivot_text(model)
print("--- model.bml " + "-" * 50)
print(text)

reparsed = parse_pivot_text(text)
print("round trip preserves the model:", model_equal(model, reparsed))

# The validator reports problems as data rather than raising, so a pipeline
# can show every issue at once:
broken = DomainModel("Broken", classes=(Class("X"), Class("x")))
print()
print("a broken model reports:")
print(validate_model(broken))
