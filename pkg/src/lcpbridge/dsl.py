"""Textual concrete syntax for the pivot model (`.bml` files).

The syntax exists so intermediate models can be inspected and hand-edited
between the import and generation legs of a migration::

    model Library

    enum Status { AVAILABLE, LOANED }

    class Book {
      title: str
      status: Status
    }

    class Ebook extends Book {}

    association BookLibrary {
      books: Book [0..*] nav
      library: Library [0..1] nav
    }

`#` starts a line comment. Parsing and printing are pure and inverse of each
other up to declaration ordering.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DslSyntaxError
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
)

_PUNCT = ("..", "{", "}", "[", "]", ":", ",", "*")


@dataclass(frozen=True)
class _Token:
    kind: str  # IDENT | INT | PUNCT | EOF
    text: str
    line: int
    column: int


def _tokenize(source: str) -> list[_Token]:
    tokens: list[_Token] = []
    line = 1
    col = 1
    i = 0
    n = len(source)
    while i < n:
        ch = source[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and source[i] != "\n":
                i += 1
            continue
        if source.startswith("..", i):
            tokens.append(_Token("PUNCT", "..", line, col))
            i += 2
            col += 2
            continue
        if ch in "{}[]:,*":
            tokens.append(_Token("PUNCT", ch, line, col))
            i += 1
            col += 1
            continue
        if ch.isdigit():
            start = i
            while i < n and source[i].isdigit():
                i += 1
            text = source[start:i]
            tokens.append(_Token("INT", text, line, col))
            col += len(text)
            continue
        if ch.isalpha() or ch == "_":
            start = i
            while i < n and (source[i].isalnum() or source[i] == "_"):
                i += 1
            text = source[start:i]
            tokens.append(_Token("IDENT", text, line, col))
            col += len(text)
            continue
        raise DslSyntaxError(f"unexpected character {ch!r}", line, col)
    tokens.append(_Token("EOF", "", line, col))
    return tokens


class _Parser:
    """Recursive descent over the token stream; keywords are contextual."""

    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self, ahead: int = 0) -> _Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def fail(self, expected: tuple[str, ...]):
        tok = self.peek()
        got = "end of input" if tok.kind == "EOF" else repr(tok.text)
        raise DslSyntaxError(f"unexpected {got}", tok.line, tok.column, expected)

    def expect_word(self, word: str) -> _Token:
        tok = self.peek()
        if tok.kind == "IDENT" and tok.text == word:
            return self.advance()
        self.fail((repr(word),))

    def expect_punct(self, text: str) -> _Token:
        tok = self.peek()
        if tok.kind == "PUNCT" and tok.text == text:
            return self.advance()
        self.fail((repr(text),))

    def expect_ident(self, what: str) -> str:
        tok = self.peek()
        if tok.kind == "IDENT":
            return self.advance().text
        self.fail((what,))

    def expect_int(self) -> int:
        tok = self.peek()
        if tok.kind == "INT":
            return int(self.advance().text)
        self.fail(("integer",))

    # grammar -------------------------------------------------------------

    def model(self) -> DomainModel:
        self.expect_word("model")
        name = self.expect_ident("model name")
        classes: list[Class] = []
        associations: list[Association] = []
        generalizations: list[Generalization] = []
        enumerations: list[Enumeration] = []
        while self.peek().kind != "EOF":
            tok = self.peek()
            if tok.kind != "IDENT":
                self.fail(("'enum'", "'class'", "'association'"))
            if tok.text == "enum":
                enumerations.append(self.enum_decl())
            elif tok.text == "class":
                cls, gen = self.class_decl()
                classes.append(cls)
                if gen is not None:
                    generalizations.append(gen)
            elif tok.text == "association":
                associations.append(self.assoc_decl())
            else:
                self.fail(("'enum'", "'class'", "'association'"))
        return DomainModel(
            name=name,
            classes=tuple(classes),
            associations=tuple(associations),
            generalizations=tuple(generalizations),
            enumerations=tuple(enumerations),
        )

    def enum_decl(self) -> Enumeration:
        self.expect_word("enum")
        name = self.expect_ident("enumeration name")
        self.expect_punct("{")
        literals = [self.expect_ident("literal")]
        while self.peek().text == ",":
            self.advance()
            literals.append(self.expect_ident("literal"))
        self.expect_punct("}")
        return Enumeration(name=name, literals=tuple(literals))

    def class_decl(self) -> tuple[Class, Generalization | None]:
        self.expect_word("class")
        name = self.expect_ident("class name")
        gen = None
        if self.peek().kind == "IDENT" and self.peek().text == "extends":
            self.advance()
            parent = self.expect_ident("parent class name")
            gen = Generalization(general=parent, specific=name)
        self.expect_punct("{")
        props: list[Property] = []
        while not (self.peek().kind == "PUNCT" and self.peek().text == "}"):
            props.append(self.prop())
        self.expect_punct("}")
        return Class(name=name, properties=tuple(props)), gen

    def prop(self) -> Property:
        name = self.expect_ident("property name")
        self.expect_punct(":")
        type_name = self.expect_ident("type name")
        if type_name in PRIMITIVES:
            type_ref = primitive_type(type_name)
        else:
            type_ref = enum_type(type_name)
        is_id = False
        # `id` is a flag only when it does not begin the next property
        if (self.peek().kind == "IDENT" and self.peek().text == "id"
                and self.peek(1).text != ":"):
            self.advance()
            is_id = True
        return Property(name=name, type=type_ref, is_id=is_id)

    def assoc_decl(self) -> Association:
        self.expect_word("association")
        name = self.expect_ident("association name")
        self.expect_punct("{")
        end1 = self.end()
        end2 = self.end()
        self.expect_punct("}")
        return Association(name=name, end1=end1, end2=end2)

    def end(self) -> AssociationEnd:
        role = self.expect_ident("role name")
        self.expect_punct(":")
        class_name = self.expect_ident("class name")
        self.expect_punct("[")
        lower = self.expect_int()
        self.expect_punct("..")
        if self.peek().text == "*":
            self.advance()
            upper = None
        else:
            upper = self.expect_int()
        self.expect_punct("]")
        navigable = False
        if self.peek().kind == "IDENT" and self.peek().text == "nav":
            self.advance()
            navigable = True
        return AssociationEnd(role=role, class_name=class_name,
                              multiplicity=Multiplicity(lower, upper), navigable=navigable)


def parse_pivot_text(source: str) -> DomainModel:
    """Parse pivot DSL text into a validated model.

    Raises DslSyntaxError with line/column on grammar problems and
    InvalidModelError when the parsed model breaks a metamodel invariant.
    """
    parser = _Parser(_tokenize(source))
    model = parser.model()
    return require_valid(model, "parsed pivot text")


def print_pivot_text(model: DomainModel) -> str:
    """Render a valid model back to DSL text; inverse of parse_pivot_text."""
    require_valid(model, "model to print")
    out = [f"model {model.name}"]

    if model.enumerations:
        out.append("")
        for enum in model.enumerations:
            out.append(f"enum {enum.name} {{ {', '.join(enum.literals)} }}")

    parents = {g.specific: g.general for g in model.generalizations}
    for cls in model.classes:
        out.append("")
        head = f"class {cls.name}"
        if cls.name in parents:
            head += f" extends {parents[cls.name]}"
        if not cls.properties:
            out.append(head + " {}")
            continue
        out.append(head + " {")
        for prop in cls.properties:
            line = f"  {prop.name}: {prop.type.display()}"
            if prop.is_id:
                line += " id"
            out.append(line)
        out.append("}")

    for assoc in model.associations:
        out.append("")
        out.append(f"association {assoc.name} {{")
        for end in assoc.ends:
            line = f"  {end.role}: {end.class_name} [{end.multiplicity.display()}]"
            if end.navigable:
                line += " nav"
            out.append(line)
        out.append("}")

    return "\n".join(out) + "\n"


def load_pivot_file(path) -> DomainModel:
    with open(path, encoding="utf-8") as handle:
        return parse_pivot_text(handle.read())


def save_pivot_file(model: DomainModel, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(print_pivot_text(model))
