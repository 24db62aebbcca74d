"""Deterministic serialization for output files.

Floats are rendered with 17 significant digits so every value round-trips
bit-exactly through text; repeated runs with identical inputs therefore
produce byte-identical files. No timestamps, no environment-dependent
content.
"""

from __future__ import annotations

import json


def fmt_float(x: float) -> str:
    """17-significant-digit decimal form; round-trips any binary64."""
    return format(float(x), ".17g")


def _render(obj, indent: int) -> str:
    pad = " " * indent
    inner = " " * (indent + 2)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f"{inner}{json.dumps(str(k))}: {_render(v, indent + 2)}"
            for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        seq = list(obj)
        if not seq:
            return "[]"
        # Scalar-only lists stay on one line; nested structures get split.
        if all(not isinstance(v, (dict, list, tuple)) for v in seq):
            return "[" + ", ".join(_render(v, indent) for v in seq) + "]"
        items = [f"{inner}{_render(v, indent + 2)}" for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, float):
        return fmt_float(obj)
    if isinstance(obj, int):
        return str(obj)
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    """Render a JSON document with deterministic float formatting."""
    return _render(obj, 0) + "\n"


def csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return fmt_float(v)
    return str(v)


def csv_lines(header: list[str], rows, comments: dict | None = None) -> str:
    """CSV text with optional leading `# key=value` comment lines."""
    out = []
    if comments:
        for k, v in comments.items():
            out.append(f"# {k}={csv_cell(v)}")
    out.append(",".join(header))
    for row in rows:
        out.append(",".join(csv_cell(v) for v in row))
    return "\n".join(out) + "\n"
