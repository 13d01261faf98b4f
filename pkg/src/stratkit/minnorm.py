"""Exact minimum-norm point of the convex hull of finitely many rational points.

Two independent routes are provided.  ``wolfe`` runs Wolfe's active-set
method in exact arithmetic.  ``face_search`` solves the affine least-norm
problem on every affinely independent subset and keeps the best feasible one;
it is exponential and meant for small inputs and as a cross-check.

The inner product is diagonal, ``<u, v> = sum_j w_j u_j v_j`` with rational
weights ``w_j > 0``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import lcm
from typing import Sequence

from .errors import InputError, InvariantError

Vector = tuple[Fraction, ...]


@dataclass(frozen=True)
class MinNormCertificate:
    point: Vector
    normsq: Fraction
    coefficients: tuple[Fraction, ...]  # one per input point, lexicographically least
    method: str

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.coefficients) if c)


def _prepare(points: Sequence[Sequence], metric: Sequence | None) -> tuple[list[Vector], Vector]:
    if not points:
        raise InputError("need at least one point")
    pts = [tuple(Fraction(x) for x in p) for p in points]
    dim = len(pts[0])
    if any(len(p) != dim for p in pts):
        raise InputError("all points must have the same dimension")
    if metric is None:
        w = (Fraction(1),) * dim
    else:
        w = tuple(Fraction(x) for x in metric)
        if len(w) != dim:
            raise InputError("metric length must match the dimension")
        if any(x <= 0 for x in w):
            raise InputError("metric weights must be positive")
    return pts, w


def inner(u: Sequence[Fraction], v: Sequence[Fraction], w: Sequence[Fraction]) -> Fraction:
    return sum((wi * ui * vi for wi, ui, vi in zip(w, u, v) if ui and vi), Fraction(0))


def _combo(lam: Sequence[Fraction], pts: Sequence[Vector]) -> Vector:
    dim = len(pts[0])
    used = [(l, p) for l, p in zip(lam, pts) if l]
    return tuple(sum((l * p[k] for l, p in used if p[k]), Fraction(0)) for k in range(dim))


def solve_linear(A: list[list[Fraction]], b: list[Fraction]) -> list[Fraction] | None:
    """Unique solution of a square system, or None when it is singular."""
    n = len(A)
    M = [list(row) + [bi] for row, bi in zip(A, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            return None
        M[col], M[piv] = M[piv], M[col]
        inv = 1 / M[col][col]
        pivot_row = [x * inv for x in M[col]]
        M[col] = pivot_row
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], pivot_row)]
    return [M[r][n] for r in range(n)]


def _bareiss(A: list[list[int]], b: list[int]) -> tuple[list[int], int] | None:
    """Fraction-free solve of an integer square system: returns (numerators, denominator)."""
    n = len(A)
    M = [row[:] + [bi] for row, bi in zip(A, b)]
    prev = 1
    sign = 1
    for k in range(n):
        if M[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if M[r][k] != 0), None)
            if swap is None:
                return None
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        pk = M[k][k]
        rowk = M[k]
        for i in range(k + 1, n):
            rowi = M[i]
            a = rowi[k]
            for j in range(k + 1, n + 1):
                rowi[j] = (rowi[j] * pk - a * rowk[j]) // prev
            rowi[k] = 0
        prev = pk
    det = M[n - 1][n - 1]
    # back substitution; x_i = num_i / det stays integral by Cramer's rule
    x = [0] * n
    for i in range(n - 1, -1, -1):
        s = M[i][n] * det - sum(M[i][j] * x[j] for j in range(i + 1, n))
        x[i] = s // M[i][i]
    return x, det


def _affine_min(S: Sequence[int], gram: list[list[Fraction]]) -> tuple[list[Fraction], Fraction] | None:
    """Least-norm point of the affine hull of the points S: barycentric weights and norm squared."""
    k = len(S)
    A = [[gram[a][b] for b in S] + [Fraction(1)] for a in S]
    A.append([Fraction(1)] * k + [Fraction(0)])
    rhs = [Fraction(0)] * k + [Fraction(1)]
    sol = solve_linear(A, rhs)
    if sol is None:
        return None
    # G mu + nu 1 = 0 and sum(mu) = 1 give |x|^2 = -nu
    return sol[:k], -sol[k]


def wolfe(points: Sequence[Sequence], metric: Sequence | None = None) -> MinNormCertificate:
    pts, w = _prepare(points, metric)
    n = len(pts)
    gram = [[inner(p, q, w) for q in pts] for p in pts]
    j0 = min(range(n), key=lambda j: (gram[j][j], j))
    S, lam = [j0], [Fraction(1)]
    for _ in range(10_000):
        # <x, p_j> and |x|^2 from the Gram matrix, x = sum lam_i p_{S_i}
        scores = [sum((l * gram[i][j] for l, i in zip(lam, S)), Fraction(0)) for j in range(n)]
        xx = sum((l * scores[i] for l, i in zip(lam, S)), Fraction(0))
        j = min(range(n), key=lambda i: (scores[i], i))
        if scores[j] >= xx or j in S:
            break
        S.append(j)
        lam.append(Fraction(0))
        while True:
            res = _affine_min(S, gram)
            if res is None:
                raise InvariantError("working set lost affine independence")
            mu, _ = res
            if all(m > 0 for m in mu):
                lam = mu
                break
            blocking = [l / (l - m) for l, m in zip(lam, mu) if m <= 0 and l - m > 0]
            theta = min(blocking) if blocking else Fraction(0)
            lam = [(1 - theta) * l + theta * m for l, m in zip(lam, mu)]
            keep = [i for i, l in enumerate(lam) if l > 0]
            if len(keep) == len(lam):
                raise InvariantError("minor cycle failed to drop a point")
            S = [S[i] for i in keep]
            lam = [lam[i] for i in keep]
    else:
        raise InvariantError("Wolfe iteration limit reached")
    x = _combo(lam, [pts[i] for i in S])
    return _finish(pts, w, x, "wolfe")


def _scaled_integers(pts: list[Vector], w: Vector) -> tuple[list[list[int]], list[int]]:
    L = lcm(*(x.denominator for p in pts for x in p))
    W = lcm(*(x.denominator for x in w))
    return [[int(x * L) for x in p] for p in pts], [int(x * W) for x in w]


def face_search(points: Sequence[Sequence], metric: Sequence | None = None) -> MinNormCertificate:
    pts, w = _prepare(points, metric)
    ipts, iw = _scaled_integers(pts, w)
    n, dim = len(pts), len(w)
    gram = [[sum(wk * a[k] * b[k] for k, wk in enumerate(iw)) for b in ipts] for a in ipts]
    best: tuple[Fraction, tuple[int, ...], list[Fraction]] | None = None
    for size in range(1, min(n, dim + 1) + 1):
        for S in combinations(range(n), size):
            A = [[gram[a][b] for b in S] + [1] for a in S]
            A.append([1] * size + [0])
            sol = _bareiss(A, [0] * size + [1])
            if sol is None:
                continue
            num, det = sol
            if any(x * det < 0 for x in num[:size]):
                continue
            val = Fraction(-num[size], det)
            if best is None or val < best[0]:
                best = (val, S, [Fraction(x, det) for x in num[:size]])
    if best is None:
        raise InvariantError("no feasible face found")
    _, S, mu = best
    x = _combo(mu, [pts[i] for i in S])
    return _finish(pts, w, x, "faces")


def min_norm_point(
    points: Sequence[Sequence], metric: Sequence | None = None, method: str = "auto", cap: int = 10
) -> MinNormCertificate:
    """Minimum-norm point with a certificate.

    ``method="auto"`` uses the exhaustive face search for at most ``cap``
    points and Wolfe's method otherwise.
    """
    if method == "auto":
        method = "faces" if len(points) <= cap else "wolfe"
    if method == "faces":
        return face_search(points, metric)
    if method == "wolfe":
        return wolfe(points, metric)
    raise InputError(f"unknown method {method!r}")


def _finish(pts: list[Vector], w: Vector, x: Vector, method: str) -> MinNormCertificate:
    xx = inner(x, x, w)
    pairings = [inner(x, p, w) for p in pts]
    active = [j for j, v in enumerate(pairings) if v == xx]
    if any(v < xx for v in pairings):
        raise InvariantError("optimality condition fails at the computed point")
    lam = lexmin_coefficients([pts[j] for j in active], x)
    coeffs = [Fraction(0)] * len(pts)
    for j, l in zip(active, lam):
        coeffs[j] = l
    res = MinNormCertificate(x, xx, tuple(coeffs), method)
    problems = certificate_problems(res, pts, w)
    if problems:
        raise InvariantError("; ".join(problems))
    return res


def certificate_problems(res: MinNormCertificate, points: Sequence[Sequence], metric: Sequence | None = None) -> list[str]:
    """Everything wrong with a claimed result; an empty list means it is certified."""
    pts, w = _prepare(points, metric)
    out = []
    lam = res.coefficients
    if len(lam) != len(pts):
        return ["coefficient count does not match the number of points"]
    if any(l < 0 for l in lam):
        out.append("negative coefficient")
    if sum(lam) != 1:
        out.append("coefficients do not sum to one")
    if _combo(lam, pts) != tuple(res.point):
        out.append("coefficients do not reproduce the point")
    xx = inner(res.point, res.point, w)
    if xx != res.normsq:
        out.append("stored norm is wrong")
    if any(inner(res.point, p, w) < xx for p in pts):
        out.append("some point has <v, x> < |x|^2")
    return out


def lexmin_coefficients(pts: Sequence[Vector], x: Vector) -> list[Fraction]:
    """Lexicographically least convex weights lam >= 0 with sum lam_i pts_i = x."""
    k = len(pts)
    if k == 0:
        raise InvariantError("no active points")
    dim = len(x)
    A = [[p[r] for p in pts] for r in range(dim)] + [[Fraction(1)] * k]
    b = list(x) + [Fraction(1)]
    direct = _unique_solution(A, b)
    if direct is not None:
        return direct
    return _lex_simplex(A, b)


def _unique_solution(A: list[list[Fraction]], b: list[Fraction]) -> list[Fraction] | None:
    """Solution of a consistent system when its columns are independent, else None."""
    M = [row[:] + [bi] for row, bi in zip(A, b)]
    k = len(A[0])
    r = 0
    for col in range(k):
        piv = next((i for i in range(r, len(M)) if M[i][col] != 0), None)
        if piv is None:
            return None
        M[r], M[piv] = M[piv], M[r]
        inv = 1 / M[r][col]
        M[r] = [v * inv for v in M[r]]
        for i in range(len(M)):
            if i != r and M[i][col] != 0:
                f = M[i][col]
                M[i] = [a - f * c for a, c in zip(M[i], M[r])]
        r += 1
    return [M[i][k] for i in range(k)]


def _lex_simplex(A: list[list[Fraction]], b: list[Fraction]) -> list[Fraction]:
    """Lexicographically least point of {x >= 0 : A x = b} (assumed nonempty and bounded).

    Phase one finds a basis; phase two minimizes the cost vector
    (eps, eps^2, ...) for infinitesimal eps, whose reduced costs only need the
    smallest basic index touched by each column.  Bland's rule prevents cycling.
    """
    m, k = len(A), len(A[0])
    T = []
    for i, (row, bi) in enumerate(zip(A, b)):
        if bi < 0:
            row, bi = [-a for a in row], -bi
        T.append(list(row) + [Fraction(int(i == j)) for j in range(m)] + [bi])
    basis = [k + i for i in range(m)]

    def pivot(r: int, col: int) -> None:
        inv = 1 / T[r][col]
        T[r] = [v * inv for v in T[r]]
        for i in range(len(T)):
            if i != r and T[i][col] != 0:
                f = T[i][col]
                T[i] = [a - f * c for a, c in zip(T[i], T[r])]
        basis[r] = col

    def leave(col: int) -> int:
        best = None
        for i in range(len(T)):
            if T[i][col] > 0:
                ratio = T[i][-1] / T[i][col]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            raise InvariantError("linear program is unbounded")
        return best[1]

    # phase one: minimize the sum of artificials
    while True:
        ncols = k + m
        entering = None
        for col in range(ncols):
            if col in basis:
                continue
            red = (Fraction(1) if col >= k else Fraction(0)) - sum(
                (T[i][col] for i in range(len(T)) if basis[i] >= k), Fraction(0)
            )
            if red < 0:
                entering = col
                break
        if entering is None:
            break
        pivot(leave(entering), entering)
    if any(T[i][-1] != 0 for i in range(len(T)) if basis[i] >= k):
        raise InvariantError("linear program is infeasible")
    for i in range(len(T)):
        if basis[i] >= k:
            col = next((j for j in range(k) if T[i][j] != 0), None)
            if col is not None:
                pivot(i, col)
    keep = [i for i in range(len(T)) if basis[i] < k]
    T[:] = [T[i][:k] + [T[i][-1]] for i in keep]
    basis[:] = [basis[i] for i in keep]

    # phase two: lexicographic objective
    while True:
        entering = None
        for col in range(k):
            if col in basis:
                continue
            touched = [(basis[i], T[i][col]) for i in range(len(T)) if T[i][col] != 0 and basis[i] < col]
            if touched and min(touched)[1] > 0:
                entering = col
                break
        if entering is None:
            break
        pivot(leave(entering), entering)
    x = [Fraction(0)] * k
    for i, j in enumerate(basis):
        x[j] = T[i][-1]
    return x
