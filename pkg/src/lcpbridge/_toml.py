"""Tiny TOML-subset reader (stdlib tomllib is unavailable on Python 3.10).

Supports exactly what the shipped data/config files use: ``[dotted.tables]``,
string / boolean / integer values, arrays of strings, and ``#`` comments.
"""

from __future__ import annotations


class TomlError(ValueError):
    pass


def _parse_scalar(text: str, line_no: int):
    text = text.strip()
    if text.startswith("["):
        if not text.endswith("]"):
            raise TomlError(f"line {line_no}: unterminated array")
        inner = text[1:-1].strip()
        if not inner:
            return []
        items = []
        for chunk in _split_array(inner, line_no):
            items.append(_parse_scalar(chunk, line_no))
        return items
    if text.startswith('"') and text.endswith('"') and len(text) >= 2:
        return text[1:-1].replace('\\"', '"').replace("\\\\", "\\")
    if text == "true":
        return True
    if text == "false":
        return False
    try:
        return int(text)
    except ValueError:
        raise TomlError(f"line {line_no}: cannot parse value {text!r}")


def _split_array(inner: str, line_no: int) -> list[str]:
    chunks = []
    depth = 0
    in_string = False
    current = []
    for ch in inner:
        if ch == '"' and (not current or current[-1] != "\\"):
            in_string = not in_string
        if ch == "," and depth == 0 and not in_string:
            chunks.append("".join(current))
            current = []
            continue
        if not in_string:
            if ch == "[":
                depth += 1
            elif ch == "]":
                depth -= 1
        current.append(ch)
    if current:
        chunks.append("".join(current))
    return [c for c in (c.strip() for c in chunks) if c]


def _strip_comment(line: str) -> str:
    out = []
    in_string = False
    for ch in line:
        if ch == '"':
            in_string = not in_string
        if ch == "#" and not in_string:
            break
        out.append(ch)
    return "".join(out)


def loads(text: str) -> dict:
    root: dict = {}
    current = root
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = root
            for part in line[1:-1].strip().split("."):
                part = part.strip().strip('"')
                if not part:
                    raise TomlError(f"line {line_no}: empty table name component")
                current = current.setdefault(part, {})
                if not isinstance(current, dict):
                    raise TomlError(f"line {line_no}: table clashes with a value")
            continue
        if "=" not in line:
            raise TomlError(f"line {line_no}: expected key = value")
        key, _, value = line.partition("=")
        key = key.strip().strip('"')
        current[key] = _parse_scalar(value, line_no)
    return root


def load(path) -> dict:
    with open(path, encoding="utf-8") as handle:
        return loads(handle.read())
