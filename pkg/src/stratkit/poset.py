"""Finite posets: comparison results, covering relations and DOT output."""
from __future__ import annotations

import enum
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")


class OrderRelation(enum.Enum):
    GREATER = "greater"
    LESS = "less"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"

    def flip(self) -> "OrderRelation":
        if self is OrderRelation.GREATER:
            return OrderRelation.LESS
        if self is OrderRelation.LESS:
            return OrderRelation.GREATER
        return self


def covering_pairs(items: Sequence[T], compare: Callable[[T, T], OrderRelation]) -> list[tuple[int, int]]:
    """Index pairs (lo, hi) with items[lo] < items[hi] and nothing strictly between."""
    n = len(items)
    less = [[False] * n for _ in range(n)]
    for a in range(n):
        for b in range(n):
            if a != b and compare(items[a], items[b]) is OrderRelation.LESS:
                less[a][b] = True
    edges = []
    for a in range(n):
        for b in range(n):
            if less[a][b] and not any(less[a][c] and less[c][b] for c in range(n)):
                edges.append((a, b))
    return edges


def to_dot(labels: Sequence[str], edges: Sequence[tuple[int, int]], name: str = "hasse") -> str:
    """Edges point from the smaller element to the one covering it."""
    out = [f"digraph {name} {{", "  rankdir=BT;"]
    for i, label in enumerate(labels):
        esc = label.replace("\\", "\\\\").replace('"', '\\"')
        out.append(f'  n{i} [label="{esc}"];')
    for lo, hi in edges:
        out.append(f"  n{lo} -> n{hi};")
    out.append("}")
    return "\n".join(out) + "\n"
