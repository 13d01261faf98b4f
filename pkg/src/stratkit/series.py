"""Truncated power series and equivariant Poincare series of bundle moduli."""
from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from typing import Any, Iterable, Iterator

from ._json import parse_int
from .errors import InputError
from .hn import HNType, check_genus, enumerate_hn_types, hn_codim


@dataclass(frozen=True)
class TruncatedSeries:
    """Integer power series in t known through t**truncation."""

    coeffs: tuple[int, ...]
    truncation: int

    def __post_init__(self) -> None:
        if self.truncation < 0:
            raise InputError("truncation must be nonnegative")
        c = tuple(int(x) for x in self.coeffs[: self.truncation + 1])
        c = c + (0,) * (self.truncation + 1 - len(c))
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def one(cls, K: int) -> "TruncatedSeries":
        return cls((1,), K)

    @classmethod
    def monomial(cls, k: int, K: int, coeff: int = 1) -> "TruncatedSeries":
        if k > K:
            return cls((), K)
        return cls((0,) * k + (coeff,), K)

    def __getitem__(self, k: int) -> int:
        return self.coeffs[k] if 0 <= k <= self.truncation else 0

    def __iter__(self) -> Iterator[int]:
        # iterate over the known coefficients only; indexing past them gives 0
        return iter(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def truncate(self, K: int) -> "TruncatedSeries":
        if K > self.truncation:
            raise InputError("cannot extend a truncated series")
        return TruncatedSeries(self.coeffs, K)

    def _align(self, other: "TruncatedSeries") -> int:
        return min(self.truncation, other.truncation)

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        K = self._align(other)
        return TruncatedSeries(tuple(self[k] + other[k] for k in range(K + 1)), K)

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries(tuple(-c for c in self.coeffs), self.truncation)

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return self + (-other)

    def __mul__(self, other: "TruncatedSeries | int") -> "TruncatedSeries":
        if isinstance(other, int):
            return TruncatedSeries(tuple(other * c for c in self.coeffs), self.truncation)
        K = self._align(other)
        out = [0] * (K + 1)
        a, b = self.coeffs, other.coeffs
        for i in range(K + 1):
            if a[i]:
                ai = a[i]
                for j in range(K + 1 - i):
                    if b[j]:
                        out[i + j] += ai * b[j]
        return TruncatedSeries(tuple(out), K)

    __rmul__ = __mul__

    def shift(self, k: int) -> "TruncatedSeries":
        """Multiply by t**k."""
        return TruncatedSeries((0,) * k + self.coeffs, self.truncation)

    def inverse(self) -> "TruncatedSeries":
        if self.coeffs[0] not in (1, -1):
            raise InputError("only series with constant term +-1 are invertible over the integers")
        K, a, c0 = self.truncation, self.coeffs, self.coeffs[0]
        out = [0] * (K + 1)
        out[0] = c0
        for k in range(1, K + 1):
            s = sum(a[j] * out[k - j] for j in range(1, k + 1))
            out[k] = -c0 * s
        return TruncatedSeries(tuple(out), K)

    def __truediv__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return self * other.inverse()

    def trimmed(self) -> tuple[int, ...]:
        c = list(self.coeffs)
        while c and c[-1] == 0:
            c.pop()
        return tuple(c)

    def to_json(self) -> dict[str, Any]:
        return {"coeffs": list(self.coeffs), "truncation": self.truncation}

    @classmethod
    def from_json(cls, obj: Any) -> "TruncatedSeries":
        try:
            coeffs = [parse_int(c, "coefficient") for c in obj["coeffs"]]
            K = parse_int(obj["truncation"], "truncation")
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed series: {obj!r}") from exc
        return cls(tuple(coeffs), K)


def is_palindromic(coeffs: Iterable[int], degree: int) -> bool:
    c = list(coeffs) + [0] * (degree + 1)
    return all(c[k] == c[degree - k] for k in range(degree + 1))


def generator_degrees(n: int, g: int) -> dict[str, list[int]]:
    """Cohomological degrees of the free generators of H*(BG) for the rank-n gauge group.

    ``a``: one even class 2r for 1 <= r <= n.  ``b``: 2g odd classes 2r-1 for each r.
    ``f``: one even class 2r-2 for 2 <= r <= n.
    """
    check_genus(g)
    if n <= 0:
        raise InputError(f"rank must be positive, got {n}")
    return {
        "a": [2 * r for r in range(1, n + 1)],
        "b": [2 * r - 1 for r in range(1, n + 1) for _ in range(2 * g)],
        "f": [2 * r - 2 for r in range(2, n + 1)],
    }


def _free_algebra_series(degrees: dict[str, list[int]], K: int) -> TruncatedSeries:
    num = TruncatedSeries.one(K)
    den = TruncatedSeries.one(K)
    for deg in degrees["b"]:
        num = num * (TruncatedSeries.one(K) + TruncatedSeries.monomial(deg, K))
    for deg in degrees["a"] + degrees["f"]:
        den = den * (TruncatedSeries.one(K) - TruncatedSeries.monomial(deg, K))
    return num / den


def default_truncation(n: int, g: int) -> int:
    """Real dimension of the coprime moduli space plus two."""
    env = os.environ.get("STRATKIT_TRUNCATION")
    if env is not None:
        try:
            K = int(env)
        except ValueError as exc:
            raise InputError(f"STRATKIT_TRUNCATION must be an integer, got {env!r}") from exc
        if K < 0:
            raise InputError("STRATKIT_TRUNCATION must be nonnegative")
        return K
    return 2 * (n * n * (g - 1) + 1) + 2


def _resolve(n: int, g: int, K: int | None) -> int:
    check_genus(g)
    if n <= 0:
        raise InputError(f"rank must be positive, got {n}")
    if K is None:
        K = default_truncation(n, g)
    if K < 0:
        raise InputError("truncation must be nonnegative")
    return K


def poincare_BG(n: int, g: int, K: int | None = None) -> TruncatedSeries:
    """Poincare series of the classifying space of the rank-n gauge group."""
    K = _resolve(n, g, K)
    return _bg_cached(n, g, K)


@lru_cache(maxsize=None)
def _bg_cached(n: int, g: int, K: int) -> TruncatedSeries:
    return _free_algebra_series(generator_degrees(n, g), K)


def poincare_Css(n: int, d: int, g: int, K: int | None = None) -> TruncatedSeries:
    """Equivariant Poincare series of the semistable stratum, via the stratum recursion."""
    K = _resolve(n, g, K)
    return _css_cached(n, d % n, g, K)


@lru_cache(maxsize=None)
def _css_cached(n: int, d: int, g: int, K: int) -> TruncatedSeries:
    # keyed on d mod n: tensoring by a degree-one line bundle identifies d and d+n
    total = _bg_cached(n, g, K)
    if n == 1:
        return total
    max_codim = K // 2
    for mu in enumerate_hn_types(n, d, g, max_codim):
        if mu.length == 1:
            continue
        c = hn_codim(mu, g)
        term = TruncatedSeries.one(K)
        for nb, db in mu.blocks:
            term = term * _css_cached(nb, db % nb, g, K)
        total = total - term.shift(2 * c)
    return total


def poincare_M(n: int, d: int, g: int, K: int | None = None) -> TruncatedSeries:
    """Poincare series of the moduli space of stable bundles; needs gcd(n, d) = 1."""
    K = _resolve(n, g, K)
    if gcd(n, d) != 1:
        raise InputError(f"the moduli space is smooth and fine only for coprime rank and degree; gcd({n}, {d}) != 1")
    css = poincare_Css(n, d, g, K)
    return css * (TruncatedSeries.one(K) - TruncatedSeries.monomial(2, K))


def moduli_dimension(n: int, g: int) -> int:
    """Complex dimension of the coprime moduli space."""
    return n * n * (g - 1) + 1


def stratum_terms(n: int, d: int, g: int, K: int | None = None) -> list[tuple[HNType, int]]:
    """Unstable strata contributing below the truncation, with their codimensions."""
    K = _resolve(n, g, K)
    return [(mu, hn_codim(mu, g)) for mu in enumerate_hn_types(n, d, g, K // 2) if mu.length > 1]
