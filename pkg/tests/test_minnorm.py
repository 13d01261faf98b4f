from fractions import Fraction as F
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stratkit.errors import InputError
from stratkit.minnorm import (
    certificate_problems,
    face_search,
    inner,
    lexmin_coefficients,
    min_norm_point,
    solve_linear,
    wolfe,
)

from conftest import random_point_set


def test_two_unit_vectors():
    res = min_norm_point([(1, 0), (0, 1)], [1, 1])
    assert res.point == (F(1, 2), F(1, 2))
    assert res.normsq == F(1, 2)


def test_origin_inside_hull():
    res = min_norm_point([(1, 0), (-1, 0)], [1, 1])
    assert res.point == (0, 0)
    assert res.normsq == 0
    assert res.coefficients == (F(1, 2), F(1, 2))


def test_two_weight_example():
    pts = [(1, 0, -1), (0, 1, -1)]
    for method in ("wolfe", "faces"):
        res = min_norm_point(pts, [F(1, 2)] * 3, method=method)
        assert res.point == (F(1, 2), F(1, 2), F(-1))
        assert res.normsq == F(3, 4)


def test_dependent_chain_weights():
    # e1 - e3 is the sum of the other two generators
    pts = [(1, -1, 0), (0, 1, -1), (1, 0, -1)]
    a = wolfe(pts, [F(1, 2)] * 3)
    b = face_search(pts, [F(1, 2)] * 3)
    assert a.point == b.point == (F(1, 2), 0, F(-1, 2))
    assert a.normsq == F(1, 4)


def test_bad_inputs():
    with pytest.raises(InputError):
        min_norm_point([])
    with pytest.raises(InputError):
        min_norm_point([(1, 2), (1,)])
    with pytest.raises(InputError):
        min_norm_point([(1, 2)], [1, 0])
    with pytest.raises(InputError):
        min_norm_point([(1, 2)], method="simplex")


def test_certificate_detects_tampering():
    pts = [(1, 0), (0, 1)]
    res = min_norm_point(pts)
    assert certificate_problems(res, pts) == []
    bad = type(res)((F(1), F(0)), F(1), (F(1), F(0)), "faces")
    assert certificate_problems(bad, pts)


def _lexmin_by_vertices(pts, x):
    # vertices of {lam >= 0, sum lam = 1, sum lam p = x} have affinely independent support
    k = len(pts)
    best = None
    for size in range(1, k + 1):
        for S in combinations(range(k), size):
            rows = [[pts[j][r] for j in S] for r in range(len(x))] + [[F(1)] * size]
            rhs = list(x) + [F(1)]
            # square subsystem by trying row subsets
            for R in combinations(range(len(rows)), size):
                sol = solve_linear([rows[r] for r in R], [rhs[r] for r in R])
                if sol is None:
                    continue
                if any(v < 0 for v in sol):
                    continue
                if any(sum(rows[r][c] * sol[c] for c in range(size)) != rhs[r] for r in range(len(rows))):
                    continue
                lam = [F(0)] * k
                for j, v in zip(S, sol):
                    lam[j] = v
                if best is None or lam < best:
                    best = lam
                break
    return best


def test_lexmin_against_vertex_enumeration(rng):
    for _ in range(150):
        dim = rng.randint(1, 3)
        k = rng.randint(1, 5)
        pts = [tuple(F(rng.randint(-2, 2)) for _ in range(dim)) for _ in range(k)]
        w = [F(1)] * dim
        x = face_search(pts, w).point
        active = [p for p in pts if inner(p, x, w) == inner(x, x, w)]
        assert lexmin_coefficients(active, x) == _lexmin_by_vertices(active, x)


def test_wolfe_matches_face_search(rng):
    for _ in range(300):
        pts, w = random_point_set(rng)
        a, b = wolfe(pts, w), face_search(pts, w)
        assert a.point == b.point
        assert a.normsq == b.normsq
        assert a.coefficients == b.coefficients


rational = st.fractions(min_value=-3, max_value=3, max_denominator=3)


@st.composite
def point_sets(draw):
    dim = draw(st.integers(1, 4))
    k = draw(st.integers(1, 5))
    pts = [tuple(draw(rational) for _ in range(dim)) for _ in range(k)]
    w = [draw(st.fractions(min_value=F(1, 3), max_value=3, max_denominator=3)) for _ in range(dim)]
    return pts, w


@settings(max_examples=150, deadline=None)
@given(point_sets(), st.fractions(min_value=F(1, 4), max_value=4, max_denominator=4))
def test_metric_scaling(ps, c):
    pts, w = ps
    a = min_norm_point(pts, w)
    b = min_norm_point(pts, [c * x for x in w])
    assert a.point == b.point
    assert b.normsq == c * a.normsq


@settings(max_examples=150, deadline=None)
@given(point_sets())
def test_certificates_hold(ps):
    pts, w = ps
    for method in ("wolfe", "faces"):
        res = min_norm_point(pts, w, method=method)
        assert certificate_problems(res, pts, w) == []
        assert all(inner(p, res.point, w) >= res.normsq for p in pts)


@settings(max_examples=100, deadline=None)
@given(point_sets(), st.randoms(use_true_random=False))
def test_point_order_does_not_change_minimizer(ps, r):
    pts, w = ps
    shuffled = list(pts)
    r.shuffle(shuffled)
    assert min_norm_point(pts, w).point == min_norm_point(shuffled, w).point
