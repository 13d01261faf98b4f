"""Weight vectors of strata, encoded by indexed partitions.

Setting: an orthogonal basis e_1..e_M with |e_j|^2 = 1/p_{i(j)}, where the
indices are grouped into blocks i (one block per stable summand, of size
equal to its multiplicity).  A beta vector is the closest point to 0 of the
convex hull of some differences e_a - e_b; it is encoded by an *indexed
partition*: components h = 1..L, each a chain of cells Delta_{h,m} for
consecutive integers m.  ``eps[h]`` is the weighted mean level of component h.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor, lcm
from typing import Any, Iterable, Sequence

from ._json import frac_str, parse_frac, parse_int
from .errors import InputError, InvariantError, ShapeError, StructureError, ValidationError
from .hn import check_genus
from .minnorm import MinNormCertificate, min_norm_point
from .poset import OrderRelation
from .strata_census import JHIndex


@dataclass(frozen=True)
class WeightSystem:
    """Block multiplicities m_i and inverse square norms p_i (as exact rationals)."""

    mults: tuple[int, ...]
    p: tuple[Fraction, ...]
    atom_ranks: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "mults", tuple(int(m) for m in self.mults))
        object.__setattr__(self, "p", tuple(Fraction(x) for x in self.p))
        if not self.mults or len(self.mults) != len(self.p):
            raise InputError("need one positive p value per block")
        if any(m <= 0 for m in self.mults):
            raise InputError("block multiplicities must be positive")
        if any(x <= 0 for x in self.p):
            raise InputError("p values must be positive")

    @property
    def q(self) -> int:
        return len(self.mults)

    @property
    def M(self) -> int:
        return sum(self.mults)

    @property
    def block_of(self) -> tuple[int, ...]:
        """Block (0-based) of each index 1..M, stored at position j-1."""
        return tuple(i for i, m in enumerate(self.mults) for _ in range(m))

    @property
    def index_p(self) -> tuple[Fraction, ...]:
        return tuple(self.p[i] for i in self.block_of)

    def metric(self) -> tuple[Fraction, ...]:
        return tuple(1 / x for x in self.index_p)

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"mults": list(self.mults), "p": [frac_str(x) for x in self.p]}
        if self.atom_ranks is not None:
            out["atom_ranks"] = list(self.atom_ranks)
        return out

    @classmethod
    def from_json(cls, obj: Any) -> "WeightSystem":
        try:
            return cls(
                tuple(parse_int(m, "multiplicity") for m in obj["mults"]),
                tuple(parse_frac(x) for x in obj["p"]),
                tuple(obj["atom_ranks"]) if "atom_ranks" in obj else None,
            )
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed weight system: {obj!r}") from exc


def build_weight_system(g: int, n: int, d: int, mults: Sequence[int], atoms: Sequence[int]) -> WeightSystem:
    """p_i = n_i (1 - g + d/n), the Euler characteristic of the twisted summand."""
    check_genus(g)
    if n <= 0:
        raise InputError("rank must be positive")
    if len(mults) != len(atoms) or not mults:
        raise InputError("need one multiplicity per atom")
    if any(m < 1 for m in mults) or any(a < 1 for a in atoms):
        raise InputError("multiplicities and atom ranks must be positive")
    for a in atoms:
        if (a * d) % n:
            raise InputError(f"n = {n} must divide n_i d = {a * d}")
    slope = Fraction(d, n)
    if slope <= g - 1:
        raise InputError(
            f"need d/n > g - 1 for positive weights (d/n = {slope}); "
            "twist by a line bundle of degree k, which replaces d by d + k n"
        )
    p = tuple(a * (1 - g + slope) for a in atoms)
    return WeightSystem(tuple(mults), p, tuple(atoms))


# ---------------------------------------------------------------------------
# indexed partitions


@dataclass(frozen=True)
class IndexedPartition:
    """Components h = 1..L; component h is (l1, cells) with cells[k] = Delta_{h, l1 + k}.

    Members are 1-based indices.
    """

    components: tuple[tuple[int, tuple[frozenset[int], ...]], ...]

    def __post_init__(self) -> None:
        comps = tuple((int(l1), tuple(frozenset(c) for c in cells)) for l1, cells in self.components)
        object.__setattr__(self, "components", comps)
        seen: set[int] = set()
        for l1, cells in comps:
            if not cells:
                raise StructureError("every component needs at least one cell")
            for c in cells:
                if not c:
                    raise StructureError("cells must be nonempty")
                if seen & c:
                    raise StructureError("cells overlap")
                seen |= c
        if seen != set(range(1, len(seen) + 1)):
            raise StructureError("cells must partition {1..M}")

    @property
    def L(self) -> int:
        return len(self.components)

    @property
    def M(self) -> int:
        return sum(len(c) for _, cells in self.components for c in cells)

    def l1(self, h: int) -> int:
        return self.components[h - 1][0]

    def l2(self, h: int) -> int:
        l1, cells = self.components[h - 1]
        return l1 + len(cells) - 1

    def cell(self, h: int, m: int) -> frozenset[int]:
        l1, cells = self.components[h - 1]
        return cells[m - l1]

    def cells(self) -> dict[tuple[int, int], frozenset[int]]:
        return {(h, l1 + k): c for h, (l1, cells) in enumerate(self.components, 1) for k, c in enumerate(cells)}

    def hebrew(self) -> list[tuple[int, int]]:
        """The labels (h, m) ordered by m first, then h."""
        return sorted(self.cells(), key=lambda hm: (hm[1], hm[0]))

    def to_json(self) -> dict[str, Any]:
        cells = [{"h": h, "m": m, "members": sorted(c)} for (h, m), c in sorted(self.cells().items())]
        return {"L": self.L, "cells": cells}

    @classmethod
    def from_json(cls, obj: Any) -> "IndexedPartition":
        try:
            entries = [(parse_int(c["h"], "h"), parse_int(c["m"], "m"), [parse_int(x, "member") for x in c["members"]]) for c in obj["cells"]]
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed partition: {obj!r}") from exc
        comps = _group_components(entries)
        hs = sorted(comps)
        if hs != list(range(1, len(hs) + 1)):
            raise StructureError("components must be numbered 1..L")
        if "L" in obj and obj["L"] != len(hs):
            raise StructureError("L does not match the number of components")
        return cls(tuple(comps[h] for h in hs))


def _group_components(entries: Iterable[tuple[Any, int, Iterable[int]]]) -> dict[Any, tuple[int, tuple[frozenset[int], ...]]]:
    grouped: dict[Any, dict[int, set[int]]] = defaultdict(dict)
    for h, m, members in entries:
        members = set(members)
        if m in grouped[h]:
            raise StructureError(f"component {h} lists level {m} twice")
        grouped[h][m] = members
    out = {}
    for h, levels in grouped.items():
        ms = sorted(levels)
        if ms != list(range(ms[0], ms[-1] + 1)):
            raise StructureError(f"component {h} has a gap in its levels {ms}")
        out[h] = (ms[0], tuple(frozenset(levels[m]) for m in ms))
    return out


def _cell_weight(cell: Iterable[int], ws: WeightSystem) -> Fraction:
    ip = ws.index_p
    return sum((ip[j - 1] for j in cell), Fraction(0))


def _mean_level(l1: int, cells: Sequence[frozenset[int]], ws: WeightSystem) -> Fraction:
    rs = [_cell_weight(c, ws) for c in cells]
    return sum((Fraction(l1 + k) * r for k, r in enumerate(rs)), Fraction(0)) / sum(rs, Fraction(0))


def eps_values(ip: IndexedPartition, ws: WeightSystem) -> tuple[Fraction, ...]:
    if ip.M != ws.M:
        raise ValidationError(f"partition covers {ip.M} indices but the weight system has {ws.M}")
    return tuple(_mean_level(l1, cells, ws) for l1, cells in ip.components)


def check_partition(ip: IndexedPartition, ws: WeightSystem) -> tuple[Fraction, ...]:
    eps = eps_values(ip, ws)
    for h, e in enumerate(eps, 1):
        if not Fraction(-1, 2) <= e < Fraction(1, 2):
            raise ValidationError(f"component {h} has mean level {e} outside [-1/2, 1/2)")
    for h in range(1, len(eps)):
        if not eps[h - 1] > eps[h]:
            raise ValidationError(f"mean levels must strictly decrease: {eps[h - 1]} then {eps[h]}")
    return eps


# ---------------------------------------------------------------------------
# combinatorics of labels in Hebrew order


def delta_from_labels(labels: Sequence[tuple[int, int]]) -> tuple[int, ...]:
    """delta(k) = #{(h',m'): m' < m+1, or m' = m+1 and h' < h} for the k-th label (h, m)."""
    return tuple(sum(1 for h2, m2 in labels if m2 < m + 1 or (m2 == m + 1 and h2 < h)) for h, m in labels)


def delta_prime_from_labels(labels: Sequence[tuple[int, int]]) -> tuple[int, ...]:
    """delta'(k) = 1 + #{(h',m'): m' < m-1, or m' = m-1 and h' <= h}."""
    return tuple(1 + sum(1 for h2, m2 in labels if m2 < m - 1 or (m2 == m - 1 and h2 <= h)) for h, m in labels)


def k_bounds(values: Sequence[Fraction]) -> tuple[int, int]:
    """(k_minus, k_plus) from the strictly decreasing values eps(h) - m in Hebrew order."""
    k_minus = sum(1 for v in values if v >= 0)
    k_plus = 1 + sum(1 for v in values if v > 0)
    return k_minus, k_plus


@dataclass(frozen=True)
class BetaData:
    partition: IndexedPartition
    index_p: tuple[Fraction, ...]
    block_of: tuple[int, ...]
    coords: tuple[Fraction, ...]
    normsq: Fraction
    eps: tuple[Fraction, ...]
    labels: tuple[tuple[int, int], ...]
    delta: tuple[int, ...]
    delta_prime: tuple[int, ...]
    k_minus: int
    k_plus: int
    cell_sizes: tuple[tuple[int, ...], ...]
    certificate: MinNormCertificate | None = field(default=None, compare=False)

    @property
    def t(self) -> int:
        return len(self.labels)

    @property
    def phi(self) -> dict[tuple[int, int], int]:
        return {hm: k for k, hm in enumerate(self.labels, 1)}

    def cell_value(self, k: int) -> Fraction:
        """beta . e_j / |beta|^2 for j in the k-th cell: eps(h) - m."""
        h, m = self.labels[k - 1]
        return self.eps[h - 1] - m

    def integer_form(self) -> tuple[int, tuple[int, ...]]:
        """(D, c) with coords = c / D, D > 0 minimal."""
        D = lcm(*(x.denominator for x in self.coords))
        return D, tuple(int(x * D) for x in self.coords)

    def to_json(self) -> dict[str, Any]:
        out = {
            "partition": self.partition.to_json(),
            "coords": [frac_str(x) for x in self.coords],
            "normsq": frac_str(self.normsq),
            "eps": [frac_str(x) for x in self.eps],
            "phi": [{"h": h, "m": m, "k": k} for k, (h, m) in enumerate(self.labels, 1)],
            "delta": list(self.delta),
            "delta_prime": list(self.delta_prime),
            "k_minus": self.k_minus,
            "k_plus": self.k_plus,
            "cell_sizes": [list(r) for r in self.cell_sizes],
        }
        if self.certificate is not None:
            out["certificate"] = {
                "point": [frac_str(x) for x in self.certificate.point],
                "normsq": frac_str(self.certificate.normsq),
                "coefficients": [frac_str(x) for x in self.certificate.coefficients],
            }
        return out


def beta_from_partition(ip: IndexedPartition, ws: WeightSystem) -> BetaData:
    """Closed form: coords_j = |beta|^2 (eps(h) - m) p_j with 1/|beta|^2 = sum (m - eps)^2 r_{h,m}."""
    eps = check_partition(ip, ws)
    cells = ip.cells()
    inv = Fraction(0)
    for (h, m), c in cells.items():
        inv += (m - eps[h - 1]) ** 2 * _cell_weight(c, ws)
    if inv == 0:
        raise ValidationError("the partition gives beta = 0")
    normsq = 1 / inv
    ip_ = ws.index_p
    coords = [Fraction(0)] * ws.M
    for (h, m), c in cells.items():
        for j in c:
            coords[j - 1] = normsq * (eps[h - 1] - m) * ip_[j - 1]
    labels = tuple(ip.hebrew())
    values = [eps[h - 1] - m for h, m in labels]
    k_minus, k_plus = k_bounds(values)
    blocks = ws.block_of
    sizes = tuple(tuple(sum(1 for j in cells[hm] if blocks[j - 1] == i) for i in range(ws.q)) for hm in labels)
    return BetaData(
        partition=ip,
        index_p=ip_,
        block_of=blocks,
        coords=tuple(coords),
        normsq=normsq,
        eps=eps,
        labels=labels,
        delta=delta_from_labels(labels),
        delta_prime=delta_prime_from_labels(labels),
        k_minus=k_minus,
        k_plus=k_plus,
        cell_sizes=sizes,
    )


def partition_from_beta(coords: Sequence, ws: WeightSystem) -> IndexedPartition:
    """Recover the indexed partition from the coordinates of beta.

    With x_j = coords_j / (p_j |beta|^2) one has x_j = eps(h) - m, so
    m = -floor(x_j + 1/2) and eps = x_j + m.  Indices are grouped by eps into
    components and by m into cells.
    """
    c = tuple(Fraction(x) for x in coords)
    if len(c) != ws.M:
        raise InputError(f"expected {ws.M} coordinates, got {len(c)}")
    ip_ = ws.index_p
    normsq = sum((x * x / p for x, p in zip(c, ip_)), Fraction(0))
    if normsq == 0:
        raise InputError("beta must be nonzero")
    comps: dict[Fraction, dict[int, set[int]]] = defaultdict(lambda: defaultdict(set))
    for j, (x, p) in enumerate(zip(c, ip_), 1):
        val = x / (p * normsq)
        m = -floor(val + Fraction(1, 2))
        comps[val + m][m].add(j)
    out = []
    for e in sorted(comps, reverse=True):
        levels = comps[e]
        ms = sorted(levels)
        if ms != list(range(ms[0], ms[-1] + 1)):
            raise ShapeError(f"levels {ms} of the component with mean {e} are not consecutive")
        cells = tuple(frozenset(levels[m]) for m in ms)
        if _mean_level(ms[0], cells, ws) != e:
            raise ShapeError(f"the component with offset {e} does not have mean level {e}")
        out.append((ms[0], cells))
    ip = IndexedPartition(tuple(out))
    check_partition(ip, ws)
    return ip


def canonicalize_partition(raw: Iterable[tuple[Any, int, Iterable[int]]], ws: WeightSystem) -> IndexedPartition:
    """Normalize raw cells (h, m, members) with arbitrary level offsets and component order.

    Each component is shifted so its mean level lies in [-1/2, 1/2),
    components with equal means are merged cell by cell, and the result is
    sorted by decreasing mean.
    """
    comps = _group_components(raw)
    members = set()
    for l1, cells in comps.values():
        for cell in cells:
            if not cell:
                raise StructureError("cells must be nonempty")
            if members & cell:
                raise StructureError("cells overlap")
            members |= cell
    if members != set(range(1, ws.M + 1)):
        raise StructureError(f"cells must partition {{1..{ws.M}}}")
    merged: dict[Fraction, dict[int, set[int]]] = defaultdict(lambda: defaultdict(set))
    for l1, cells in comps.values():
        mean = _mean_level(l1, cells, ws)
        shift = -floor(mean + Fraction(1, 2))
        for k, cell in enumerate(cells):
            merged[mean + shift][l1 + shift + k] |= cell
    out = []
    for e in sorted(merged, reverse=True):
        levels = merged[e]
        ms = sorted(levels)
        if ms != list(range(ms[0], ms[-1] + 1)):
            raise StructureError(f"components with mean {e} do not align into consecutive levels")
        out.append((ms[0], tuple(frozenset(levels[m]) for m in ms)))
    ip = IndexedPartition(tuple(out))
    check_partition(ip, ws)
    return ip


def support_pairs(ip: IndexedPartition) -> list[tuple[int, int]]:
    """S: pairs (a, b) with a in Delta_{h,m} and b in Delta_{h,m+1}."""
    out = []
    for l1, cells in ip.components:
        for lo, hi in zip(cells, cells[1:]):
            out.extend((a, b) for a in sorted(lo) for b in sorted(hi))
    return sorted(out)


def difference_vector(a: int, b: int, M: int) -> tuple[Fraction, ...]:
    v = [Fraction(0)] * M
    v[a - 1] += 1
    v[b - 1] -= 1
    return tuple(v)


@dataclass(frozen=True)
class BetaCertificate:
    ok: bool
    lambdas: dict[tuple[int, int], Fraction]
    failures: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.ok

    def to_json(self) -> dict[str, Any]:
        return {
            "ok": self.ok,
            "lambdas": [{"pair": [a, b], "value": frac_str(v)} for (a, b), v in sorted(self.lambdas.items())],
            "failures": list(self.failures),
        }


def verify_beta(bd: BetaData, ws: WeightSystem) -> BetaCertificate:
    """Check that bd.coords is the closest point to 0 of conv{e_a - e_b : (a, b) in S}.

    Two checks: beta . (e_a - e_b) = |beta|^2 on S, and an explicit convex
    combination with lam_ab = |beta|^2 p_a p_b sum_{k<=m} (eps - k) r_k / (r_m r_{m+1})
    reproduces beta.
    """
    ip = bd.partition
    failures = []
    try:
        eps = check_partition(ip, ws)
    except ValidationError as exc:
        return BetaCertificate(False, {}, (str(exc),))
    coords = tuple(Fraction(x) for x in bd.coords)
    if len(coords) != ws.M:
        return BetaCertificate(False, {}, ("coordinate count does not match the weight system",))
    ip_ = ws.index_p
    normsq = sum((x * x / p for x, p in zip(coords, ip_)), Fraction(0))
    if normsq == 0:
        return BetaCertificate(False, {}, ("beta is zero",))
    if normsq != bd.normsq:
        failures.append("stored |beta|^2 disagrees with the coordinates")
    for a, b in support_pairs(ip):
        # <beta, e_a - e_b> with |e_j|^2 = 1/p_j
        val = coords[a - 1] / ip_[a - 1] - coords[b - 1] / ip_[b - 1]
        if val != normsq:
            failures.append(f"beta.(e_{a} - e_{b}) = {val} differs from |beta|^2 = {normsq}")
    closed = beta_from_partition(ip, ws)
    lambdas: dict[tuple[int, int], Fraction] = {}
    for h, (l1, cells) in enumerate(ip.components, 1):
        rs = [_cell_weight(c, ws) for c in cells]
        acc = Fraction(0)
        for k in range(len(cells) - 1):
            acc += (eps[h - 1] - (l1 + k)) * rs[k]
            mu = closed.normsq * acc / (rs[k] * rs[k + 1])
            for a in cells[k]:
                for b in cells[k + 1]:
                    lambdas[(a, b)] = mu * ip_[a - 1] * ip_[b - 1]
    if any(v < 0 for v in lambdas.values()):
        failures.append("negative hull coefficient")
    if sum(lambdas.values(), Fraction(0)) != 1:
        failures.append("hull coefficients do not sum to one")
    rebuilt = [Fraction(0)] * ws.M
    for (a, b), v in lambdas.items():
        rebuilt[a - 1] += v
        rebuilt[b - 1] -= v
    if tuple(rebuilt) != coords:
        failures.append("beta is not the convex combination of its support weights")
    return BetaCertificate(not failures, lambdas, tuple(failures))


def pairing_table(bd: BetaData) -> dict[tuple[int, int], OrderRelation]:
    """Compare beta.(e_i - e_j) with |beta|^2 for i in cell k1, j in cell k2 (combinatorial rule).

    Equal iff same component and m' = m + 1; greater iff m' >= m + 2, or
    m' = m + 1 and h' > h; less otherwise.
    """
    out = {}
    for k1, (h, m) in enumerate(bd.labels, 1):
        for k2, (h2, m2) in enumerate(bd.labels, 1):
            if m2 == m + 1 and h2 == h:
                rel = OrderRelation.EQUAL
            elif m2 >= m + 2 or (m2 == m + 1 and h2 > h):
                rel = OrderRelation.GREATER
            else:
                rel = OrderRelation.LESS
            out[(k1, k2)] = rel
    return out


def pivot_range(bd: BetaData) -> tuple[int, int]:
    """Admissible pivot positions k1: delta'(k_minus) <= k1 <= k_plus."""
    lo, hi = bd.delta_prime[bd.k_minus - 1], bd.k_plus
    if lo > hi:
        raise InvariantError(f"empty pivot range ({lo}, {hi})")
    return lo, hi


# ---------------------------------------------------------------------------
# beta of a semistable refined index


@dataclass(frozen=True)
class FullGroupLabel:
    """Stratum label for a polystable index (one layer): there are no weights, beta is trivial."""

    mults: tuple[int, ...]
    atoms: tuple[int, ...]

    def to_json(self) -> dict[str, Any]:
        return {"full_group": {"mults": list(self.mults), "atoms": list(self.atoms)}}


def jh_weight_set(x: JHIndex, ws: WeightSystem) -> list[tuple[int, int]]:
    """Pairs (a, b) with a in layer j1 and b in layer j2 > j1 (any atoms)."""
    if len(x.blocks) != 1:
        raise InputError("only single-block (semistable) indices have a beta vector here")
    b = x.blocks[0]
    if ws.mults != b.row_sums() or (ws.atom_ranks is not None and tuple(ws.atom_ranks) != b.atoms):
        raise InputError("the weight system does not match the index atoms and multiplicities")
    layer = []
    for row in b.mult:
        for j, count in enumerate(row):
            layer.extend([j] * count)
    M = len(layer)
    return [(a, c) for a in range(1, M + 1) for c in range(1, M + 1) if layer[a - 1] < layer[c - 1]]


def beta_of_jh_index(x: JHIndex, ws: WeightSystem) -> BetaData | FullGroupLabel:
    pairs = jh_weight_set(x, ws)
    if not pairs:
        b = x.blocks[0]
        return FullGroupLabel(b.row_sums(), b.atoms)
    pts = [difference_vector(a, c, ws.M) for a, c in pairs]
    cert = min_norm_point(pts, ws.metric())
    ip = partition_from_beta(cert.point, ws)
    bd = beta_from_partition(ip, ws)
    if bd.coords != cert.point:
        raise InvariantError("closed-form beta disagrees with the min-norm point")
    return BetaData(**{**bd.__dict__, "certificate": cert})


@dataclass(frozen=True, order=True)
class GammaLabel:
    """Stratum label: blow-up stage, then |beta|^2 within the stage."""

    stage: int
    normsq: Fraction


def gamma_compare(a: GammaLabel, b: GammaLabel) -> OrderRelation:
    if a == b:
        return OrderRelation.EQUAL
    return OrderRelation.GREATER if (a.stage, a.normsq) > (b.stage, b.normsq) else OrderRelation.LESS
