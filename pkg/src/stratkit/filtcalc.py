"""Symbolic calculus of Jordan-Holder filtrations.

A filtration is recorded only through its successive quotients ("layers"),
each a multiset of stable atoms.  Atoms are opaque: two atoms are the same
bundle exactly when their ids agree.  A delta-filtration adds an increasing
map delta with delta(k) >= k, meaning that E_{delta(k)}/E_{k-1} splits as the
direct sum of its layers.
"""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor
from typing import Any, Iterable, Mapping, Sequence

from ._json import frac_str, parse_int
from .beta import delta_from_labels, delta_prime_from_labels, k_bounds
from .errors import InputError, ValidationError
from .hn import HNType


@dataclass(frozen=True, order=True)
class Atom:
    id: str
    rank: int
    degree: int

    def __post_init__(self) -> None:
        if not isinstance(self.id, str) or not self.id:
            raise InputError("atom ids must be nonempty strings")
        if self.rank <= 0:
            raise InputError(f"atom {self.id} must have positive rank")

    @property
    def slope(self) -> Fraction:
        return Fraction(self.degree, self.rank)

    def dual(self) -> "Atom":
        new_id = self.id[:-1] if self.id.endswith("*") else self.id + "*"
        return Atom(new_id, self.rank, -self.degree)

    def to_json(self) -> dict[str, Any]:
        return {"id": self.id, "rank": self.rank, "degree": self.degree}


Layer = tuple[tuple[Atom, int], ...]


def make_layer(content: Mapping[Atom, int] | Iterable[tuple[Atom, int]]) -> Layer:
    counts: Counter[Atom] = Counter()
    items = content.items() if isinstance(content, Mapping) else content
    for atom, mult in items:
        if mult < 0:
            raise InputError("multiplicities must be nonnegative")
        counts[atom] += mult
    by_id: dict[str, Atom] = {}
    for atom in counts:
        if by_id.setdefault(atom.id, atom) != atom:
            raise InputError(f"atom id {atom.id!r} used with two different (rank, degree)")
    return tuple(sorted((a, m) for a, m in counts.items() if m > 0))


def layer_rank(layer: Layer) -> int:
    return sum(a.rank * m for a, m in layer)


def layer_degree(layer: Layer) -> int:
    return sum(a.degree * m for a, m in layer)


@dataclass(frozen=True)
class FiltSpec:
    """Layers from the bottom (E_1) to the top (E/E_{t-1})."""

    layers: tuple[Layer, ...]

    def __post_init__(self) -> None:
        layers = tuple(make_layer(l) for l in self.layers)
        if any(not l for l in layers):
            raise ValidationError("layers must be nonempty")
        ids: dict[str, Atom] = {}
        for l in layers:
            for a, _ in l:
                if ids.setdefault(a.id, a) != a:
                    raise InputError(f"atom id {a.id!r} used with two different (rank, degree)")
        object.__setattr__(self, "layers", layers)

    @classmethod
    def of(cls, *layers: Mapping[Atom, int] | Iterable[Atom]) -> "FiltSpec":
        """Build from layers given as {atom: mult} maps or lists of atoms (repeats count)."""
        out = []
        for l in layers:
            out.append(make_layer(l) if isinstance(l, Mapping) else make_layer((a, 1) for a in l))
        return cls(tuple(out))

    @property
    def length(self) -> int:
        return len(self.layers)

    @property
    def rank(self) -> int:
        return sum(layer_rank(l) for l in self.layers)

    @property
    def degree(self) -> int:
        return sum(layer_degree(l) for l in self.layers)

    def atoms(self) -> set[Atom]:
        return {a for l in self.layers for a, _ in l}

    def slopes(self) -> set[Fraction]:
        return {a.slope for a in self.atoms()}

    def is_semistable(self) -> bool:
        return len(self.slopes()) <= 1

    @property
    def slope(self) -> Fraction | None:
        s = self.slopes()
        return next(iter(s)) if len(s) == 1 else None

    def to_json(self) -> dict[str, Any]:
        return {"layers": [[{"mult": m, "atom": a.to_json()} for a, m in l] for l in self.layers]}

    @classmethod
    def from_json(cls, obj: Any) -> "FiltSpec":
        try:
            layers = []
            for l in obj["layers"]:
                entries = []
                for e in l:
                    a = e["atom"]
                    entries.append((Atom(str(a["id"]), parse_int(a["rank"], "rank"), parse_int(a["degree"], "degree")), parse_int(e["mult"], "mult")))
                if any(m <= 0 for _, m in entries):
                    raise InputError("multiplicities must be positive")
                layers.append(make_layer(entries))
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed filtration: {obj!r}") from exc
        return cls(tuple(layers))


ZERO = FiltSpec(())


def gr_of(f: FiltSpec) -> Counter[Atom]:
    """Associated graded as a multiset atom -> multiplicity."""
    out: Counter[Atom] = Counter()
    for l in f.layers:
        for a, m in l:
            out[a] += m
    return out


def _common_slope(x: FiltSpec, y: FiltSpec) -> None:
    sx, sy = x.slopes(), y.slopes()
    if len(sx) > 1 or len(sy) > 1:
        raise InputError("direct sums are defined here for semistable filtrations only")
    if sx and sy and sx != sy:
        raise InputError(f"slope mismatch: {next(iter(sx))} vs {next(iter(sy))}")


def _union(a: Layer, b: Layer) -> Layer:
    return make_layer(list(a) + list(b))


def direct_sum(x: FiltSpec, y: FiltSpec, mode: str = "max") -> FiltSpec:
    """Maximal filtrations align at the bottom, minimal ones at the top."""
    _common_slope(x, y)
    t = max(x.length, y.length)
    if mode == "max":
        xs = list(x.layers) + [()] * (t - x.length)
        ys = list(y.layers) + [()] * (t - y.length)
    elif mode == "min":
        xs = [()] * (t - x.length) + list(x.layers)
        ys = [()] * (t - y.length) + list(y.layers)
    else:
        raise InputError(f"mode must be 'max' or 'min', got {mode!r}")
    return FiltSpec(tuple(_union(a, b) for a, b in zip(xs, ys)))


def dualize(f: FiltSpec) -> FiltSpec:
    return FiltSpec(tuple(make_layer((a.dual(), m) for a, m in l) for l in reversed(f.layers)))


def hn_shadow(f: FiltSpec) -> HNType | None:
    """Blocks of consecutive equal-slope layers; None when slopes do not decrease."""
    blocks: list[list[int]] = []
    last = None
    for l in f.layers:
        slopes = {a.slope for a, _ in l}
        if len(slopes) != 1:
            return None
        s = slopes.pop()
        if s == last:
            blocks[-1][0] += layer_rank(l)
            blocks[-1][1] += layer_degree(l)
        else:
            blocks.append([layer_rank(l), layer_degree(l)])
            last = s
    if not blocks:
        return None
    try:
        return HNType(tuple((n, d) for n, d in blocks))
    except InputError:
        return None


# ---------------------------------------------------------------------------
# delta-filtrations


@dataclass(frozen=True)
class DeltaFilt:
    spec: FiltSpec
    delta: tuple[int, ...]
    ties: tuple[Fraction, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        delta = tuple(int(k) for k in self.delta)
        object.__setattr__(self, "delta", delta)
        t = self.spec.length
        if len(delta) != t:
            raise ValidationError(f"delta needs {t} values, got {len(delta)}")
        for k, v in enumerate(delta, 1):
            if not k <= v <= t:
                raise ValidationError(f"need k <= delta(k) <= t, got delta({k}) = {v}")
        if any(a > b for a, b in zip(delta, delta[1:])):
            raise ValidationError("delta must be increasing")

    @property
    def t(self) -> int:
        return self.spec.length

    def chains(self) -> list[list[int]]:
        """Components of the graph with an edge k -> delta(k) + 1 whenever delta(k) < delta(k+1)."""
        t = self.t
        nxt = {}
        for k in range(1, t + 1):
            j = self.delta[k - 1] + 1
            if j <= t and (k == t or self.delta[k - 1] < self.delta[k]):
                nxt[k] = j
        starts = sorted(set(range(1, t + 1)) - set(nxt.values()))
        out = []
        for s in starts:
            chain = [s]
            while chain[-1] in nxt:
                chain.append(nxt[chain[-1]])
            out.append(chain)
        return out

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"spec": self.spec.to_json(), "delta": list(self.delta)}
        if self.ties:
            out["ties"] = [frac_str(e) for e in self.ties]
        return out

    @classmethod
    def from_json(cls, obj: Any) -> "DeltaFilt":
        try:
            return cls(FiltSpec.from_json(obj["spec"]), tuple(parse_int(k, "delta") for k in obj["delta"]))
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed delta-filtration: {obj!r}") from exc


@dataclass(frozen=True)
class Component:
    """A chain of layer positions with levels l1, l1+1, ... and its mean level."""

    positions: tuple[int, ...]
    l1: int
    eps: Fraction


def components(df: DeltaFilt) -> list[Component]:
    """Chains with levels normalized so each mean lies in [-1/2, 1/2), by decreasing mean."""
    ranks = [layer_rank(l) for l in df.spec.layers]
    out = []
    for chain in df.chains():
        rs = [ranks[k - 1] for k in chain]
        mean0 = Fraction(sum(j * r for j, r in enumerate(rs)), sum(rs))
        l1 = -floor(mean0 + Fraction(1, 2))
        out.append(Component(tuple(chain), l1, mean0 + l1))
    out.sort(key=lambda c: (-c.eps, c.positions))
    return out


def layer_labels(df: DeltaFilt) -> dict[int, tuple[int, int]]:
    """Position k -> (h, m) for the normalized components."""
    out = {}
    for h, c in enumerate(components(df), 1):
        for off, k in enumerate(c.positions):
            out[k] = (h, c.l1 + off)
    return out


def inv_triviality_sq(df: DeltaFilt) -> Fraction:
    """sum over components of sum_m (m - eps)^2 * rank; smaller means more trivial."""
    ranks = [layer_rank(l) for l in df.spec.layers]
    total = Fraction(0)
    for c in components(df):
        for off, k in enumerate(c.positions):
            total += (c.l1 + off - c.eps) ** 2 * ranks[k - 1]
    return total


def is_balanced(df: DeltaFilt) -> bool:
    comps = components(df)
    if any(a.eps == b.eps for a, b in zip(comps, comps[1:])):
        return False
    labels = layer_labels(df)
    order = sorted(labels, key=lambda k: (labels[k][1], labels[k][0]))
    return order == list(range(1, df.t + 1))


@dataclass(frozen=True)
class PivotData:
    k_minus: int
    k_plus: int
    lo: int
    hi: int
    delta: tuple[int, ...]

    def pivot(self, k1: int | None = None) -> tuple[int, ...]:
        """Indices k1-1, ..., delta(k1) of the filtration steps forming the pivot."""
        k1 = self.lo if k1 is None else k1
        if not self.lo <= k1 <= self.hi:
            raise InputError(f"k1 = {k1} outside the admissible range [{self.lo}, {self.hi}]")
        return tuple(range(k1 - 1, self.delta[k1 - 1] + 1))

    def to_json(self) -> dict[str, Any]:
        return {"k_minus": self.k_minus, "k_plus": self.k_plus, "range": [self.lo, self.hi], "pivot": list(self.pivot())}


def pivot_data(df: DeltaFilt) -> PivotData:
    labels = layer_labels(df)
    comps = components(df)
    seq = [labels[k] for k in range(1, df.t + 1)]
    values = [comps[h - 1].eps - m for h, m in seq]
    k_minus, k_plus = k_bounds(values)
    dprime = delta_prime_from_labels(seq)
    return PivotData(k_minus, k_plus, dprime[k_minus - 1], k_plus, df.delta)


@dataclass(frozen=True)
class Classification:
    balanced: bool
    inv_triviality_sq: Fraction
    pivot: PivotData | None
    hn_shadow: HNType | None
    inv_normsq: Fraction | None

    def to_json(self) -> dict[str, Any]:
        return {
            "balanced": self.balanced,
            "inv_triviality_sq": frac_str(self.inv_triviality_sq),
            "inv_normsq": None if self.inv_normsq is None else frac_str(self.inv_normsq),
            "pivot": None if self.pivot is None else self.pivot.to_json(),
            "hn_shadow": None if self.hn_shadow is None else self.hn_shadow.to_json(),
        }


def classify(df: DeltaFilt, context: tuple[int, int, int] | None = None) -> Classification:
    """Balancedness, inverse-square triviality, pivot range and HN shadow.

    ``context = (g, n, d)`` supplies the slope used to turn ranks into the
    weights p = rank (1 - g + d/n); ``inv_normsq`` is then 1/|beta|^2.
    """
    balanced = is_balanced(df)
    inv = inv_triviality_sq(df)
    inv_normsq = None
    if context is not None:
        g, n, d = context
        inv_normsq = (1 - g + Fraction(d, n)) * inv
    return Classification(balanced, inv, pivot_data(df) if balanced and df.t else None, hn_shadow(df.spec), inv_normsq)


def hebrew_delta(labels: Sequence[tuple[int, int]]) -> tuple[int, ...]:
    return delta_from_labels(labels)


def from_components(parts: Sequence[tuple[Fraction, Mapping[int, Layer]]]) -> DeltaFilt:
    """Balanced delta-filtration from components given as (eps, {level: layer}) with distinct eps."""
    parts = sorted(parts, key=lambda p: -p[0])
    cells = [(m, h, layer) for h, (_, levels) in enumerate(parts, 1) for m, layer in levels.items()]
    cells.sort(key=lambda c: (c[0], c[1]))
    labels = [(h, m) for m, h, _ in cells]
    return DeltaFilt(FiltSpec(tuple(layer for _, _, layer in cells)), delta_from_labels(labels))


def _level_maps(df: DeltaFilt) -> list[tuple[Fraction, dict[int, Layer]]]:
    out = []
    for c in components(df):
        out.append((c.eps, {c.l1 + off: df.spec.layers[k - 1] for off, k in enumerate(c.positions)}))
    return out


def balanced_merge(x: DeltaFilt, y: DeltaFilt) -> DeltaFilt:
    """Balanced delta-filtration of the direct sum.

    Components of both inputs are pooled; at each level the component with
    larger mean comes first.  Components with equal means are merged level by
    level (their levels always overlap once normalized), and those means are
    listed in ``ties``.
    """
    for f in (x, y):
        if f.t and not is_balanced(f):
            raise InputError("balanced_merge needs balanced inputs")
    _common_slope(x.spec, y.spec)
    pooled: dict[Fraction, dict[int, list[Layer]]] = defaultdict(lambda: defaultdict(list))
    counts: Counter[Fraction] = Counter()
    for f in (x, y):
        for eps, levels in _level_maps(f):
            counts[eps] += 1
            for m, layer in levels.items():
                pooled[eps][m].append(layer)
    parts = []
    for eps, levels in pooled.items():
        ms = sorted(levels)
        if ms != list(range(ms[0], ms[-1] + 1)):
            raise ValidationError("equal-mean components do not align")
        parts.append((eps, {m: make_layer([e for l in levels[m] for e in l]) for m in ms}))
    merged = from_components(parts)
    ties = tuple(sorted((e for e, c in counts.items() if c > 1), reverse=True))
    return DeltaFilt(merged.spec, merged.delta, ties)
