from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from partition_fixtures import suite
from stratkit.beta import (
    FullGroupLabel,
    GammaLabel,
    IndexedPartition,
    WeightSystem,
    beta_from_partition,
    beta_of_jh_index,
    build_weight_system,
    canonicalize_partition,
    gamma_compare,
    partition_from_beta,
    pairing_table,
    pivot_range,
    verify_beta,
)
from stratkit.errors import InputError, ShapeError, StructureError, ValidationError
from stratkit.minnorm import min_norm_point
from stratkit.poset import OrderRelation
from stratkit.strata_census import validate_jh_index

P2 = WeightSystem((1, 1), (2, 2))
P3 = WeightSystem((1, 1, 1), (2, 2, 2))
CHAIN2 = IndexedPartition(((-1, ({1}, {2})),))
TWO_ONE = IndexedPartition(((0, ({1, 2}, {3})),))
CHAIN3 = IndexedPartition(((-1, ({1}, {2}, {3})),))

SMALL = list(suite(max_M=4))


def jh(mult):
    return validate_jh_index({"blocks": [{"d": 0, "n": sum(mult), "atoms": [1], "mult": [list(mult)]}]})


def test_weight_system_examples():
    ws = build_weight_system(2, 2, 6, (2,), (1,))
    assert ws.M == 2 and ws.p == (2,)
    assert build_weight_system(2, 4, 8, (1, 1), (1, 1)).p == (1, 1)
    with pytest.raises(InputError, match="twist"):
        build_weight_system(2, 2, 2, (2,), (1,))
    with pytest.raises(InputError):
        build_weight_system(2, 2, 5, (1,), (1,))
    with pytest.raises(InputError):
        build_weight_system(1, 2, 6, (1,), (1,))


def test_beta_examples():
    a = beta_from_partition(CHAIN2, P2)
    assert a.coords == (1, -1) and a.normsq == 1
    b = beta_from_partition(TWO_ONE, P3)
    assert b.coords == (F(1, 2), F(1, 2), -1) and b.normsq == F(3, 4) and b.eps == (F(1, 3),)
    c = beta_from_partition(CHAIN3, P3)
    assert c.coords == (F(1, 2), 0, F(-1, 2)) and c.normsq == F(1, 4) and c.eps == (0,)


def test_beta_examples_match_minnorm():
    for ip, ws in [(CHAIN2, P2), (TWO_ONE, P3), (CHAIN3, P3)]:
        pts = []
        for _, cells in ip.components:
            for lo, hi in zip(cells, cells[1:]):
                for i in lo:
                    for j in hi:
                        pts.append(tuple(F(int(k == i) - int(k == j)) for k in range(1, ws.M + 1)))
        assert min_norm_point(pts, ws.metric()).point == beta_from_partition(ip, ws).coords


def test_invalid_partitions():
    with pytest.raises(ValidationError):
        beta_from_partition(IndexedPartition(((0, ({1}, {2})),)), P2)  # eps = 1/2
    with pytest.raises(StructureError):
        IndexedPartition(((0, ({1}, set())),))
    with pytest.raises(StructureError):
        IndexedPartition(((0, ({1}, {3})),))
    with pytest.raises(ValidationError):
        beta_from_partition(CHAIN2, P3)


def test_partition_from_beta_examples():
    assert partition_from_beta((F(1, 2), F(1, 2), -1), P3) == TWO_ONE
    assert partition_from_beta((1, -1), P2) == CHAIN2
    with pytest.raises(InputError):
        partition_from_beta((0, 0), P2)
    with pytest.raises(ShapeError):
        partition_from_beta((1, 0, 0), P3)


def test_canonicalize_examples():
    assert canonicalize_partition([(1, -1, [1]), (1, 0, [2])], P2) == CHAIN2
    assert canonicalize_partition([("a", 0, [1]), ("a", 1, [2])], P2) == CHAIN2
    ws = WeightSystem((1,) * 4, (1,) * 4)
    merged = canonicalize_partition([(1, 0, [1]), (1, 1, [2]), (2, 5, [3]), (2, 6, [4])], ws)
    assert merged == IndexedPartition(((-1, ({1, 3}, {2, 4})),))
    with pytest.raises(StructureError):
        canonicalize_partition([(1, 0, [1]), (1, 2, [2])], P2)
    with pytest.raises(StructureError):
        canonicalize_partition([(1, 0, [1])], P2)


def test_canonicalize_merges_then_sorts():
    # normalized level ranges all contain 0, so equal means always align
    ws = WeightSystem((1,) * 5, (1, 1, 1, 1, 2))
    raw = [(3, 0, [5]), (1, -1, [1]), (1, 0, [2]), (2, 3, [3]), (2, 4, [4])]
    out = canonicalize_partition(raw, ws)
    assert out == IndexedPartition(((0, ({5},)), (-1, ({1, 3}, {2, 4}))))


def test_verify_examples():
    cert = verify_beta(beta_from_partition(CHAIN2, P2), P2)
    assert cert and cert.lambdas == {(1, 2): 1}
    cert = verify_beta(beta_from_partition(TWO_ONE, P3), P3)
    assert cert and cert.lambdas == {(1, 3): F(1, 2), (2, 3): F(1, 2)}
    good = beta_from_partition(TWO_ONE, P3)
    fake = type(good)(**{**good.__dict__, "coords": (F(1), F(0), F(-1)), "normsq": F(1)})
    bad = verify_beta(fake, P3)
    assert not bad and bad.failures


def test_pairing_examples():
    t = pairing_table(beta_from_partition(CHAIN2, P2))
    assert t[(1, 2)] is OrderRelation.EQUAL
    t3 = pairing_table(beta_from_partition(CHAIN3, P3))
    assert t3[(1, 3)] is OrderRelation.GREATER
    assert all(t3[(k, k)] is OrderRelation.LESS for k in (1, 2, 3))


def test_pivot_examples():
    a = beta_from_partition(CHAIN2, P2)
    assert (a.k_minus, a.k_plus) == (1, 2) and pivot_range(a) == (1, 2)
    c = beta_from_partition(CHAIN3, P3)
    assert (c.k_minus, c.k_plus) == (2, 2) and pivot_range(c) == (2, 2)
    b = beta_from_partition(TWO_ONE, P3)
    assert (b.k_minus, b.k_plus) == (1, 2) and pivot_range(b) == (1, 2)


def test_beta_of_index_examples():
    assert beta_of_jh_index(jh((1, 1)), WeightSystem((2,), (2,))).coords == (1, -1)
    assert beta_of_jh_index(jh((2, 1)), WeightSystem((3,), (2,))).coords == (F(1, 2), F(1, 2), -1)
    assert beta_of_jh_index(jh((1, 1, 1)), WeightSystem((3,), (2,))).coords == (F(1, 2), 0, F(-1, 2))
    assert isinstance(beta_of_jh_index(jh((2,)), WeightSystem((2,), (2,))), FullGroupLabel)
    with pytest.raises(InputError):
        beta_of_jh_index(jh((1, 1)), WeightSystem((3,), (2,)))


def test_gamma_order():
    assert gamma_compare(GammaLabel(1, F(1)), GammaLabel(1, F(1, 2))) is OrderRelation.GREATER
    assert gamma_compare(GammaLabel(0, F(9)), GammaLabel(1, F(1, 2))) is OrderRelation.LESS
    assert gamma_compare(GammaLabel(2, F(1)), GammaLabel(2, F(1))) is OrderRelation.EQUAL


def test_json_roundtrip():
    bd = beta_from_partition(TWO_ONE, P3)
    assert IndexedPartition.from_json(TWO_ONE.to_json()) == TWO_ONE
    assert WeightSystem.from_json(P3.to_json()) == P3
    assert bd.to_json()["coords"] == ["1/2", "1/2", "-1/1"]


# --- properties over the exhaustive small suite


def _cases():
    for p, comps, _ in SMALL:
        ws = WeightSystem((1,) * len(p), p)
        yield ws, IndexedPartition(comps)


def test_suite_nonempty():
    assert len(SMALL) > 1000


def test_roundtrip_and_closed_form_invariants():
    for ws, ip in _cases():
        bd = beta_from_partition(ip, ws)
        assert partition_from_beta(bd.coords, ws) == ip
        # beta / |beta|^2 = sum (eps - m) e_j / |e_j|^2
        for (h, m), cell in ip.cells().items():
            for j in cell:
                assert bd.coords[j - 1] / bd.normsq == (bd.eps[h - 1] - m) * ws.index_p[j - 1]
        assert verify_beta(bd, ws)


def test_pairing_matches_direct_evaluation():
    for ws, ip in _cases():
        bd = beta_from_partition(ip, ws)
        cells = ip.cells()
        for (k1, k2), rel in pairing_table(bd).items():
            i = min(cells[bd.labels[k1 - 1]])
            j = min(cells[bd.labels[k2 - 1]])
            val = bd.coords[i - 1] / ws.index_p[i - 1] - bd.coords[j - 1] / ws.index_p[j - 1]
            want = OrderRelation.EQUAL if val == bd.normsq else OrderRelation.GREATER if val > bd.normsq else OrderRelation.LESS
            assert rel is want


def test_delta_duality_and_monotonicity():
    for ws, ip in _cases():
        bd = beta_from_partition(ip, ws)
        t = bd.t
        d, dp = bd.delta, bd.delta_prime
        for k in range(t):
            assert d[k] >= k + 1 and dp[k] <= k + 1
            if k:
                assert d[k] >= d[k - 1] and dp[k] >= dp[k - 1]
        for k1 in range(1, t + 1):
            for k2 in range(1, t + 1):
                assert (k1 < dp[k2 - 1]) == (k2 > d[k1 - 1])
        phi = bd.phi
        for h, m in phi:
            if (h, m + 1) in phi:
                assert d[phi[h, m] - 1] == phi[h, m + 1] - 1


def test_pivot_signs():
    for ws, ip in _cases():
        bd = beta_from_partition(ip, ws)
        for k in range(1, bd.t + 1):
            v = bd.cell_value(k)
            assert (v < 0) == (k > bd.k_minus)
            assert (v > 0) == (k < bd.k_plus)
        lo, hi = pivot_range(bd)
        assert 1 <= lo <= hi <= bd.t


def test_rank_form_of_norm():
    # p_i = n_i c with c = 1 - g + d/n; here g = 2, n = 6, d = 9 so c = 1/2
    c = F(1, 2)
    for ws, ip in _cases():
        ranks = [int(p / c) for p in ws.index_p]
        bd = beta_from_partition(ip, WeightSystem(ws.mults, tuple(r * c for r in ranks)))
        rank_sum = sum((m - bd.eps[h - 1]) ** 2 * sum(ranks[j - 1] for j in cell) for (h, m), cell in ip.cells().items())
        assert 1 / bd.normsq == c * rank_sum


def test_canonicalize_idempotent_on_suite():
    for ws, ip in _cases():
        raw = [(h, m, sorted(cell)) for (h, m), cell in ip.cells().items()]
        assert canonicalize_partition(raw, ws) == ip


@settings(max_examples=300, deadline=None)
@given(st.data())
def test_canonicalize_shift_and_shuffle(data):
    ws, ip = SMALL_CASES[data.draw(st.integers(0, len(SMALL_CASES) - 1))]
    shifts = [data.draw(st.integers(-3, 3)) for _ in range(ip.L)]
    names = data.draw(st.permutations(list(range(ip.L))))
    raw = [(names[h - 1], m + shifts[h - 1], sorted(cell)) for (h, m), cell in ip.cells().items()]
    once = canonicalize_partition(raw, ws)
    assert once == ip
    again = canonicalize_partition([(h, m, sorted(c)) for (h, m), c in once.cells().items()], ws)
    assert again == once


SMALL_CASES = list(_cases())
