# app/labels.py

from typing import Any, Tuple


def label_text(label: Any) -> str:
    """Display text of an outcome label; pairs print as (x,y)."""
    if isinstance(label, tuple):
        return "(" + ",".join(label_text(part) for part in label) + ")"
    return str(label)


def standard_labels(n: int, prefix: str = "") -> Tuple[str, ...]:
    """'a','b','c',... (or 'u1','u2',... when a prefix is given)."""
    if prefix:
        return tuple(f"{prefix}{i + 1}" for i in range(n))
    if n > 26:
        return tuple(f"e{i}" for i in range(n))
    return tuple(chr(ord("a") + i) for i in range(n))
