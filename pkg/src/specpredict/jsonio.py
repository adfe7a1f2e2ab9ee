"""Deterministic JSON and CSV emission.

Output must be byte-identical across runs for identical inputs, so floats
are always printed with 17 significant digits (enough to round-trip any
double) and dict field order is preserved as written.
"""

from __future__ import annotations

import math


def format_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite number {x!r}")
    return format(float(x), ".17g")


def _escape(s: str) -> str:
    out = []
    for ch in s:
        if ch == '"':
            out.append('\\"')
        elif ch == "\\":
            out.append("\\\\")
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    return "".join(out)


def dumps_canonical(obj, indent: int = 0, _level: int = 0) -> str:
    """JSON text with pinned float formatting; insertion order is kept."""
    pad = " " * (indent * (_level + 1)) if indent else ""
    close_pad = " " * (indent * _level) if indent else ""
    sep = ",\n" if indent else ", "
    colon = ": "
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, str):
        return '"' + _escape(obj) + '"'
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        body = sep.join(
            pad + dumps_canonical(v, indent, _level + 1) for v in obj
        )
        if indent:
            return "[\n" + body + "\n" + close_pad + "]"
        return "[" + body + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        body = sep.join(
            pad + '"' + _escape(str(k)) + '"' + colon + dumps_canonical(v, indent, _level + 1)
            for k, v in obj.items()
        )
        if indent:
            return "{\n" + body + "\n" + close_pad + "}"
        return "{" + body + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def format_csv_row(values) -> str:
    parts = []
    for v in values:
        if isinstance(v, float):
            parts.append(format_float(v))
        else:
            parts.append(str(v))
    return ",".join(parts)
