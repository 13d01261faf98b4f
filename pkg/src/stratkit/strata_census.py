"""Counting data for the cohomology of moduli of bundles.

Two censuses live here: the table of stable-bundle families whose slant
products bound where relations among the generators can start, and the
reductive classes (polystable orbit types) with the dimension data of
their normal slices.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from math import factorial, prod
from typing import Any, Iterator

from itertools import permutations, product

from ._json import dumps, parse_int
from .errors import InputError, ValidationError
from .hn import HNType, check_genus, enumerate_hn_types, hn_codim, hn_compare
from .poset import OrderRelation


class DivisibilityError(ValidationError):
    kind = "divisibility"


class SlopeOrderError(ValidationError):
    kind = "slope_order"


class ZeroMultiplicityError(ValidationError):
    kind = "zero_multiplicity"


@dataclass(frozen=True)
class MumfordEntry:
    """One family of stable bundles (rank_hat, degree_hat) with its relation degrees."""

    rank_hat: int
    degree_hat: int
    r_range: tuple[int, ...]
    real_dim: int

    def to_json(self) -> dict[str, Any]:
        return {
            "rank_hat": self.rank_hat,
            "degree_hat": self.degree_hat,
            "r_range": list(self.r_range),
            "real_dim": self.real_dim,
        }


def mumford_census(n: int, d: int, g: int) -> list[MumfordEntry]:
    """Pairs (n_hat, d_hat) with 0 < n_hat < n and d/n < d_hat/n_hat < d/n + 1.

    For each pair the admissible relation degrees are the integers r with
    ``n*n_hat*(g-1) - d*n_hat + d_hat*n < r < n*n_hat*(g+1) - d*n_hat + d_hat*n``;
    the lower end is the rank of the index bundle of Hom(E_hat, E) minus one
    for generic pairs.  The same threshold is sometimes quoted with the
    degree terms in the opposite order, ``n*n_hat*(g-1) + n_hat*d - n*d_hat``;
    that form gives a different (generally negative) bound and is not used.
    ``real_dim`` is the real dimension 2(n_hat^2 (g-1) + 1) of the family.
    """
    check_genus(g)
    if n <= 0:
        raise InputError(f"rank must be positive, got {n}")
    out = []
    for nh in range(1, n):
        # n_hat*d < n*d_hat < n_hat*d + n*n_hat
        lo = (nh * d) // n + 1
        for dh in range(lo, lo + nh + 1):
            if not (nh * d < n * dh < nh * d + n * nh):
                continue
            base = dh * n - d * nh
            lower = n * nh * (g - 1) + base
            upper = n * nh * (g + 1) + base
            out.append(MumfordEntry(nh, dh, tuple(range(lower + 1, upper)), 2 * (nh * nh * g - nh * nh + 1)))
    return out


@dataclass(frozen=True)
class ReductiveClass:
    """Multiset of (multiplicity, rank) pairs describing a polystable bundle.

    Stored sorted by (rank, multiplicity) so equal multisets compare equal.
    """

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        pairs = tuple(sorted(((int(m), int(r)) for m, r in self.pairs), key=lambda p: (p[1], p[0])))
        if not pairs:
            raise InputError("a reductive class needs at least one summand")
        for m, r in pairs:
            if m <= 0 or r <= 0:
                raise InputError(f"multiplicities and ranks must be positive, got {(m, r)}")
        object.__setattr__(self, "pairs", pairs)

    @property
    def rank(self) -> int:
        return sum(m * r for m, r in self.pairs)

    def to_json(self) -> dict[str, Any]:
        return {"pairs": [[m, r] for m, r in self.pairs]}

    @classmethod
    def from_json(cls, obj: Any) -> "ReductiveClass":
        try:
            raw = obj["pairs"] if isinstance(obj, dict) else obj
            return cls(tuple((parse_int(p[0], "multiplicity"), parse_int(p[1], "rank")) for p in raw))
        except (KeyError, TypeError, IndexError) as exc:
            raise InputError(f"malformed reductive class: {obj!r}") from exc


def _multisets(total: int, parts: list[tuple[int, int]], start: int) -> Iterator[list[tuple[int, int]]]:
    # parts are candidate (m, r) pairs in a fixed order; choose a weakly increasing sequence
    if total == 0:
        yield []
        return
    for k in range(start, len(parts)):
        m, r = parts[k]
        if m * r <= total:
            for rest in _multisets(total - m * r, parts, k):
                yield [(m, r)] + rest


def census(n: int, d: int) -> list[ReductiveClass]:
    """All reductive classes of rank n: sum m_i n_i = n with n dividing n_i d."""
    if n <= 0:
        raise InputError(f"rank must be positive, got {n}")
    ranks = [r for r in range(1, n + 1) if (r * d) % n == 0]
    parts = [(m, r) for r in ranks for m in range(1, n // r + 1)]
    found = {ReductiveClass(tuple(ms)) for ms in _multisets(n, parts, 0)}
    return sorted(found, key=lambda c: c.pairs)


@dataclass(frozen=True)
class GroupData:
    """Stabilizer data of a reductive class at effective degree ``d_eff``."""

    cls: ReductiveClass
    p: int
    p_values: tuple[int, ...]
    dim_normal: int
    pi0_factors: tuple[int, ...] = field(default=())

    @property
    def pi0_order(self) -> int:
        return prod(factorial(k) for k in self.pi0_factors)

    @property
    def pi0_trivial(self) -> bool:
        return self.pi0_order == 1

    def to_json(self) -> dict[str, Any]:
        return {
            "class": self.cls.to_json(),
            "p": self.p,
            "p_values": list(self.p_values),
            "dim_normal": self.dim_normal,
            "pi0_factors": list(self.pi0_factors),
            "pi0_order": self.pi0_order,
        }


def group_data(cls: ReductiveClass, d_eff: int, g: int) -> GroupData:
    """Normal data of a reductive class after twisting to degree d_eff.

    Records the Euler characteristic p with its per-summand values p_i, then
    the normal dimension and the component group factors.

    ``dim_normal`` is sum(m_i^2 + p_i^2 - 1); the component group is the product
    of symmetric groups permuting summands with equal (m_i, n_i).
    """
    check_genus(g)
    n = cls.rank
    if d_eff <= n * (2 * g - 1):
        raise InputError(
            f"effective degree must exceed n(2g-1) = {n * (2 * g - 1)}; "
            f"twist by a line bundle of degree k to shift d by k*{n}"
        )
    p = d_eff + n * (1 - g)
    p_values = []
    for m, r in cls.pairs:
        if (r * p) % n:
            raise InputError(f"rank {r} summands need n | n_i d_eff (n={n}, d_eff={d_eff})")
        p_values.append(r * p // n)
    dim = sum(m * m + q * q - 1 for (m, _), q in zip(cls.pairs, p_values))
    counts = Counter(cls.pairs)
    factors = tuple(counts[k] for k in sorted(counts, key=lambda p: (p[1], p[0])))
    return GroupData(cls, p, tuple(p_values), dim, factors)


# ---------------------------------------------------------------------------
# Refined indices: HN blocks further split by Jordan-Holder data


@dataclass(frozen=True)
class JHBlock:
    """One HN block of degree d and rank n, split into stable atoms laid out by layer.

    ``mult[i][j]`` is the number of copies of atom i in layer j.
    """

    d: int
    n: int
    atoms: tuple[int, ...]
    mult: tuple[tuple[int, ...], ...]

    @property
    def q(self) -> int:
        return len(self.atoms)

    @property
    def r(self) -> int:
        return len(self.mult[0]) if self.mult else 0

    def row_sums(self) -> tuple[int, ...]:
        return tuple(sum(row) for row in self.mult)

    def is_trivial(self) -> bool:
        return self.mult == ((1,),)

    def to_json(self) -> dict[str, Any]:
        return {"d": self.d, "n": self.n, "atoms": list(self.atoms), "mult": [list(r) for r in self.mult]}


@dataclass(frozen=True)
class JHIndex:
    blocks: tuple[JHBlock, ...]

    @property
    def rank(self) -> int:
        return sum(b.n for b in self.blocks)

    @property
    def degree(self) -> int:
        return sum(b.d for b in self.blocks)

    def hn_shadow(self) -> HNType:
        return HNType(tuple((b.n, b.d) for b in self.blocks))

    def to_json(self) -> dict[str, Any]:
        return {"blocks": [b.to_json() for b in self.blocks]}

    def label(self) -> str:
        return dumps(self.to_json())


def _canonical_block(d: int, n: int, atoms: tuple[int, ...], mult: tuple[tuple[int, ...], ...]) -> JHBlock:
    order = sorted(range(len(atoms)), key=lambda i: (atoms[i], mult[i]))
    return JHBlock(d, n, tuple(atoms[i] for i in order), tuple(mult[i] for i in order))


def validate_jh_index(x: Any) -> JHIndex:
    """Check every constraint on a raw index and return its canonical representative.

    Accepts a JHIndex, or the JSON shape ``{"blocks": [{"d", "n", "atoms", "mult"}, ...]}``.
    Layers in which every multiplicity vanishes are rejected: they carry no
    information and would make the set of indices infinite.
    """
    if isinstance(x, JHIndex):
        x = x.to_json()
    try:
        raw_blocks = x["blocks"]
        if not isinstance(raw_blocks, list) or not raw_blocks:
            raise ValidationError("an index needs at least one block")
        blocks = []
        for bi, b in enumerate(raw_blocks):
            d = parse_int(b["d"], "d")
            n = parse_int(b["n"], "n")
            atoms = tuple(parse_int(a, "atom rank") for a in b["atoms"])
            mult = tuple(tuple(parse_int(v, "multiplicity") for v in row) for row in b["mult"])
            blocks.append((bi, d, n, atoms, mult))
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed index: {exc}") from exc
    out = []
    for bi, d, n, atoms, mult in blocks:
        if n <= 0:
            raise ValidationError(f"block {bi + 1}: rank must be positive")
        if not atoms:
            raise ValidationError(f"block {bi + 1}: needs at least one atom")
        if len(mult) != len(atoms):
            raise ValidationError(f"block {bi + 1}: one multiplicity row per atom is required")
        r = len(mult[0])
        if r == 0 or any(len(row) != r for row in mult):
            raise ValidationError(f"block {bi + 1}: multiplicity rows must share a positive length")
        if any(a <= 0 for a in atoms):
            raise ValidationError(f"block {bi + 1}: atom ranks must be positive")
        if any(v < 0 for row in mult for v in row):
            raise ValidationError(f"block {bi + 1}: multiplicities must be nonnegative")
        if any(sum(row) == 0 for row in mult):
            raise ZeroMultiplicityError(f"block {bi + 1}: every atom needs positive total multiplicity")
        if any(all(row[j] == 0 for row in mult) for j in range(r)):
            raise ValidationError(f"block {bi + 1}: empty layer")
        if sum(a * v for a, row in zip(atoms, mult) for v in row) != n:
            raise ValidationError(f"block {bi + 1}: atom ranks times multiplicities must sum to {n}")
        for a in atoms:
            if (d * a) % n:
                raise DivisibilityError(f"block {bi + 1}: atom degree {d}*{a}/{n} is not an integer")
        out.append(_canonical_block(d, n, atoms, mult))
    for b1, b2 in zip(out, out[1:]):
        if b1.d * b2.n <= b2.d * b1.n:
            raise SlopeOrderError(f"slopes must strictly decrease: {b1.d}/{b1.n} then {b2.d}/{b2.n}")
    return JHIndex(tuple(out))


def stable_index(n: int, d: int) -> JHIndex:
    return JHIndex((JHBlock(d, n, (n,), ((1,),)),))


def block_codim(b: JHBlock, g: int, variant: str = "statement") -> int:
    """Codimension of the locus with this Jordan-Holder data inside the semistable stratum.

    The two variants differ in the subtracted term: ``statement`` subtracts
    sum (m_ij n_i)^2, ``proof`` subtracts n_i^2 once for each nonzero m_ij.
    They agree whenever all multiplicities are at most one.
    """
    m, nn, r = b.mult, b.atoms, b.r
    chain = sum(row[j] * row[j + 1] for row in m for j in range(r - 1))
    cross = 0
    for i1 in range(b.q):
        for i2 in range(b.q):
            for j1 in range(r):
                for j2 in range(j1, r):
                    cross += m[i1][j1] * m[i2][j2] * nn[i1] * nn[i2]
    if variant == "statement":
        sub = sum((m[i][j] * nn[i]) ** 2 for i in range(b.q) for j in range(r))
    elif variant == "proof":
        sub = sum(nn[i] ** 2 for i in range(b.q) for j in range(r) if m[i][j])
    else:
        raise InputError(f"unknown codimension variant {variant!r}")
    return chain + (g - 1) * (cross - sub)


def jh_codim(x: JHIndex, g: int, variant: str = "statement") -> int:
    check_genus(g)
    return hn_codim(x.hn_shadow(), g) + sum(block_codim(b, g, variant) for b in x.blocks)


def _semistable_ge(a: JHBlock, b: JHBlock) -> bool:
    """Closure order on a single semistable block: a >= b."""
    sa = sum(s * s for s in a.row_sums())
    sb = sum(s * s for s in b.row_sums())
    if sa != sb:
        return sa > sb
    if sorted(a.atoms) != sorted(b.atoms) or a.r > b.r:
        return False
    # atoms are unlabelled: look for a rank-preserving matching of rows
    for perm in permutations(range(b.q)):
        if any(a.atoms[i] != b.atoms[perm[i]] for i in range(a.q)):
            continue
        ok = True
        for i in range(a.q):
            ra, rb = a.mult[i], b.mult[perm[i]]
            if sum(ra) != sum(rb):
                ok = False
                break
            pa = pb = 0
            for j in range(a.r):
                pa += ra[j]
                pb += rb[j]
                if pa < pb:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return True
    return False


def _block_compare(a: JHBlock, b: JHBlock) -> OrderRelation:
    if a == b:
        return OrderRelation.EQUAL
    ge, le = _semistable_ge(a, b), _semistable_ge(b, a)
    if ge and le:
        return OrderRelation.EQUAL
    if ge:
        return OrderRelation.GREATER
    if le:
        return OrderRelation.LESS
    return OrderRelation.INCOMPARABLE


def jh_compare(x: JHIndex, y: JHIndex) -> OrderRelation:
    """Closure order on refined indices.

    HN shadows are compared first; indices over the same shadow are compared
    block by block and are comparable only when all blocks move the same way.
    """
    if (x.rank, x.degree) != (y.rank, y.degree):
        raise InputError("indices must share rank and degree to be compared")
    sx, sy = x.hn_shadow(), y.hn_shadow()
    if sx != sy:
        return hn_compare(sx, sy)
    rels = {_block_compare(a, b) for a, b in zip(x.blocks, y.blocks)} - {OrderRelation.EQUAL}
    if not rels:
        return OrderRelation.EQUAL
    if len(rels) == 1:
        return rels.pop()
    return OrderRelation.INCOMPARABLE


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def semistable_blocks(n: int, d: int, g: int, max_codim: int) -> list[JHBlock]:
    """All canonical single-block data of rank n and degree d with block codimension <= max_codim."""
    found = set()
    for cls in census(n, d):
        atoms = tuple(r for m, r in cls.pairs)
        totals = tuple(m for m, r in cls.pairs)
        for r in range(1, sum(totals) + 1):
            rows_options = [list(_compositions(t, r)) for t in totals]
            for rows in product(*rows_options):
                if any(all(row[j] == 0 for row in rows) for j in range(r)):
                    continue
                b = _canonical_block(d, n, atoms, tuple(rows))
                if b not in found and block_codim(b, g) <= max_codim:
                    found.add(b)
    return sorted(found, key=lambda b: (block_codim(b, g), b.atoms, b.mult))


def enumerate_jh_indices(n: int, d: int, g: int, max_codim: int) -> list[JHIndex]:
    """All canonical refined indices of (n, d) with statement codimension <= max_codim."""
    check_genus(g)
    if max_codim < 0:
        return []
    out = []
    for mu in enumerate_hn_types(n, d, g, max_codim):
        budget = max_codim - hn_codim(mu, g)
        options = [semistable_blocks(nb, db, g, budget) for nb, db in mu.blocks]
        for combo in product(*options):
            if sum(block_codim(b, g) for b in combo) <= budget:
                out.append(JHIndex(tuple(combo)))
    return sorted(out, key=lambda x: (jh_codim(x, g), x.label()))
