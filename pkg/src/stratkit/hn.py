"""Harder-Narasimhan types: codimensions, the closure order, enumeration."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import floor
from typing import Any, Iterator

from ._json import parse_int
from .errors import InputError
from .poset import OrderRelation


def check_genus(g: int) -> int:
    if isinstance(g, bool) or not isinstance(g, int) or g < 2:
        raise InputError(f"genus must be an integer >= 2, got {g!r}")
    return g


@dataclass(frozen=True)
class HNType:
    """Ordered blocks (rank, degree) with strictly decreasing slopes."""

    blocks: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        blocks = tuple((int(n), int(d)) for n, d in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        if not blocks:
            raise InputError("an HN type needs at least one block")
        for n, _ in blocks:
            if n <= 0:
                raise InputError(f"block ranks must be positive, got {n}")
        for (n1, d1), (n2, d2) in zip(blocks, blocks[1:]):
            if d1 * n2 <= d2 * n1:
                raise InputError(f"slopes must strictly decrease: {d1}/{n1} then {d2}/{n2}")

    @property
    def rank(self) -> int:
        return sum(n for n, _ in self.blocks)

    @property
    def degree(self) -> int:
        return sum(d for _, d in self.blocks)

    @property
    def slopes(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(d, n) for n, d in self.blocks)

    @property
    def length(self) -> int:
        return len(self.blocks)

    def slope_vector(self) -> tuple[Fraction, ...]:
        """Each block slope repeated rank-many times (length = total rank)."""
        out: list[Fraction] = []
        for n, d in self.blocks:
            out.extend([Fraction(d, n)] * n)
        return tuple(out)

    def to_json(self) -> dict[str, Any]:
        return {"blocks": [[n, d] for n, d in self.blocks]}

    @classmethod
    def from_json(cls, obj: Any) -> "HNType":
        try:
            raw = obj["blocks"]
            blocks = tuple((parse_int(b[0], "rank"), parse_int(b[1], "degree")) for b in raw)
        except (KeyError, TypeError, IndexError) as exc:
            raise InputError(f"malformed HN type: {obj!r}") from exc
        return cls(blocks)

    def label(self) -> str:
        return "[" + ", ".join(f"({n},{d})" for n, d in self.blocks) + "]"


def semistable_type(n: int, d: int) -> HNType:
    return HNType(((n, d),))


def hn_codim(mu: HNType, g: int) -> int:
    """Complex codimension of the stratum of bundles with the given type."""
    check_genus(g)
    total = 0
    b = mu.blocks
    for i in range(len(b)):
        for j in range(i):
            ni, di = b[i]
            nj, dj = b[j]
            total += ni * dj - nj * di + ni * nj * (g - 1)
    return total


def coarse_codim(n1: int, d1: int, n: int, d: int, g: int) -> int:
    """Codimension attached to a maximal destabilizing subbundle of rank n1, degree d1."""
    check_genus(g)
    if not 0 < n1 < n:
        raise InputError(f"need 0 < n1 < n, got n1={n1}, n={n}")
    return n * d1 - n1 * d + n1 * (n - n1) * (g - 1)


def _prefix_sums(mu: HNType) -> list[Fraction]:
    out, acc = [], Fraction(0)
    for s in mu.slope_vector()[:-1]:
        acc += s
        out.append(acc)
    return out


def hn_compare(sigma: HNType, tau: HNType) -> OrderRelation:
    """Closure order: sigma >= tau when every prefix sum of its slope vector dominates."""
    if (sigma.rank, sigma.degree) != (tau.rank, tau.degree):
        raise InputError("HN types must share rank and degree to be compared")
    if sigma == tau:
        return OrderRelation.EQUAL
    ps, pt = _prefix_sums(sigma), _prefix_sums(tau)
    ge = all(a >= b for a, b in zip(ps, pt))
    le = all(a <= b for a, b in zip(ps, pt))
    if ge and le:
        # identical slope vectors force identical types
        return OrderRelation.EQUAL
    if ge:
        return OrderRelation.GREATER
    if le:
        return OrderRelation.LESS
    return OrderRelation.INCOMPARABLE


def _types(n: int, d: int, budget: int, g: int, bound: Fraction | None) -> Iterator[list[tuple[int, int]]]:
    # whole bundle as a single block
    if bound is None or Fraction(d, n) < bound:
        yield [(n, d)]
    for n1 in range(1, n):
        base = n1 * (n - n1) * (g - 1) - n1 * d
        # n*d1 + base <= budget and d1/n1 > d/n
        hi = floor(Fraction(budget - base, n))
        lo = floor(Fraction(n1 * d, n)) + 1
        for d1 in range(lo, hi + 1):
            s1 = Fraction(d1, n1)
            if bound is not None and s1 >= bound:
                break
            c = n * d1 + base
            for rest in _types(n - n1, d - d1, budget - c, g, s1):
                yield [(n1, d1)] + rest


def enumerate_hn_types(n: int, d: int, g: int, max_codim: int) -> list[HNType]:
    """All HN types of rank n and degree d with codimension at most max_codim.

    Sorted by codimension, then by block data, so the output is reproducible.
    """
    check_genus(g)
    if n <= 0:
        raise InputError(f"rank must be positive, got {n}")
    if max_codim < 0:
        return []
    found = {HNType(tuple(b)) for b in _types(n, d, max_codim, g, None)}
    return sorted(found, key=lambda mu: (hn_codim(mu, g), mu.blocks))
