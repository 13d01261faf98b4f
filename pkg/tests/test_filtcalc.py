from collections import Counter
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from merge_oracle import balanced_inputs, schedule_layers, schedule_ranks, schedules, score
from stratkit.beta import IndexedPartition, WeightSystem, beta_from_partition, pivot_range
from stratkit.errors import InputError, ValidationError
from stratkit.filtcalc import (
    ZERO,
    Atom,
    DeltaFilt,
    FiltSpec,
    balanced_merge,
    classify,
    components,
    direct_sum,
    dualize,
    gr_of,
    hn_shadow,
    inv_triviality_sq,
    is_balanced,
    layer_labels,
    layer_rank,
)
from stratkit.hn import HNType

a, b, c, d = (Atom(name, 1, 0) for name in "abcd")


def test_gr_examples():
    assert gr_of(FiltSpec.of([a], [b])) == Counter({a: 1, b: 1})
    assert gr_of(FiltSpec.of({a: 2})) == Counter({a: 2})
    assert gr_of(FiltSpec.of([a], [a, b])) == Counter({a: 2, b: 1})


def test_direct_sum_examples():
    assert direct_sum(FiltSpec.of([a], [b]), FiltSpec.of([c], [d]), "max") == FiltSpec.of([a, c], [b, d])
    assert direct_sum(FiltSpec.of([a], [b]), FiltSpec.of([c]), "max") == FiltSpec.of([a, c], [b])
    assert direct_sum(FiltSpec.of([a], [b]), FiltSpec.of([c]), "min") == FiltSpec.of([a], [b, c])
    with pytest.raises(InputError):
        direct_sum(FiltSpec.of([a]), FiltSpec.of([Atom("e", 1, 1)]))
    with pytest.raises(InputError):
        direct_sum(FiltSpec.of([a]), FiltSpec.of([c]), "middle")


def test_dualize_examples():
    assert dualize(FiltSpec.of([a], [b])) == FiltSpec.of([b.dual()], [a.dual()])
    f = FiltSpec.of([a], [b], [c])
    assert dualize(dualize(f)) == f
    assert dualize(FiltSpec.of({a: 2})) == FiltSpec.of({a.dual(): 2})
    assert a.dual().id == "a*" and a.dual().dual() == a


def test_spec_validation():
    with pytest.raises(ValidationError):
        FiltSpec.of([a], [])
    with pytest.raises(InputError):
        FiltSpec.of([a], [Atom("a", 2, 0)])
    with pytest.raises(InputError):
        Atom("x", 0, 1)
    with pytest.raises(ValidationError):
        DeltaFilt(FiltSpec.of([a], [b]), (2, 1))
    with pytest.raises(ValidationError):
        DeltaFilt(FiltSpec.of([a], [b]), (3, 3))


def test_hn_shadow():
    f = FiltSpec.of([Atom("x", 1, 2)], [Atom("y", 1, 0)], [Atom("z", 2, 0)])
    assert hn_shadow(f) == HNType(((1, 2), (3, 0)))
    assert hn_shadow(FiltSpec.of([Atom("y", 1, 0)], [Atom("x", 1, 2)])) is None


def test_classify_examples():
    two = classify(DeltaFilt(FiltSpec.of([a], [b]), (1, 2)))
    assert two.balanced and two.inv_triviality_sq == F(1, 2)
    r21 = DeltaFilt(FiltSpec.of({Atom("big", 2, 0): 1}, [b]), (1, 2))
    assert classify(r21).inv_triviality_sq == F(2, 3)
    assert components(r21)[0].eps == F(1, 3)


def example_pieces(r1, r2):
    """D1 subset E1 and D2 subset E2 with stable pieces of ranks r1 = (D1, E1/D1), r2 = (D2, E2/D2)."""
    D1, Q1 = Atom("D1", r1[0], 0), Atom("Q1", r1[1], 0)
    D2, Q2 = Atom("D2", r2[0], 0), Atom("Q2", r2[1], 0)
    return D1, Q1, D2, Q2


def test_equal_ratio_refinements_unbalanced():
    D1, Q1, D2, Q2 = example_pieces((1, 1), (1, 1))
    filt2 = DeltaFilt(FiltSpec.of([D1], [D2], [Q1], [Q2]), (2, 3, 4, 4))
    filt3 = DeltaFilt(FiltSpec.of([D2], [D1], [Q2], [Q1]), (2, 3, 4, 4))
    filt1 = DeltaFilt(FiltSpec.of([D1, D2], [Q1, Q2]), (1, 2))
    assert not is_balanced(filt2) and not is_balanced(filt3)
    assert is_balanced(filt1)
    x = DeltaFilt(FiltSpec.of([D1], [Q1]), (1, 2))
    y = DeltaFilt(FiltSpec.of([D2], [Q2]), (1, 2))
    merged = balanced_merge(x, y)
    assert merged == filt1 and merged.ties == (F(-1, 2),)


def test_unequal_ratio_merge_interleaves():
    D1, Q1, D2, Q2 = example_pieces((1, 1), (1, 2))
    x = DeltaFilt(FiltSpec.of([D1], [Q1]), (1, 2))
    y = DeltaFilt(FiltSpec.of([D2], [Q2]), (1, 2))
    merged = balanced_merge(x, y)
    assert merged.spec == FiltSpec.of([D2], [D1], [Q2], [Q1])
    assert merged.delta == (2, 3, 4, 4) and merged.ties == ()
    filt2 = DeltaFilt(FiltSpec.of([D1], [D2], [Q1], [Q2]), (2, 3, 4, 4))
    assert is_balanced(merged) and not is_balanced(filt2)
    assert inv_triviality_sq(merged) < inv_triviality_sq(DeltaFilt(FiltSpec.of([D1, D2], [Q1, Q2]), (1, 2)))


def test_merge_with_zero():
    x = DeltaFilt(FiltSpec.of([a], [b]), (1, 2))
    assert balanced_merge(x, DeltaFilt(ZERO, ())) == x
    assert balanced_merge(DeltaFilt(ZERO, ()), x) == x


def test_merge_rejects_unbalanced():
    D1, Q1, D2, Q2 = example_pieces((1, 1), (1, 1))
    bad = DeltaFilt(FiltSpec.of([D1], [D2], [Q1], [Q2]), (2, 3, 4, 4))
    with pytest.raises(InputError):
        balanced_merge(bad, DeltaFilt(FiltSpec.of([c]), (1,)))


def test_json_roundtrip():
    f = DeltaFilt(FiltSpec.of({Atom("p", 2, 1): 2}, [Atom("q", 2, 1)]), (1, 2))
    assert DeltaFilt.from_json(f.to_json()) == f
    assert FiltSpec.from_json(f.spec.to_json()) == f.spec


# --- laws

atom_pool = [Atom(f"s{i}", r, r) for i, r in enumerate((1, 1, 2, 3, 1, 2))]
layers_st = st.lists(st.dictionaries(st.sampled_from(atom_pool), st.integers(1, 3), min_size=1, max_size=3), max_size=4)


def specs(draw_layers):
    return FiltSpec.of(*draw_layers)


@settings(max_examples=200, deadline=None)
@given(layers_st, layers_st, st.sampled_from(["max", "min"]))
def test_sum_laws(lx, ly, mode):
    x, y = specs(lx), specs(ly)
    s = direct_sum(x, y, mode)
    assert gr_of(s) == gr_of(x) + gr_of(y)
    assert s.rank == x.rank + y.rank and s.degree == x.degree + y.degree
    assert s.length == max(x.length, y.length)
    assert dualize(direct_sum(x, y, "max")) == direct_sum(dualize(x), dualize(y), "min")
    assert dualize(dualize(s)) == s
    assert gr_of(dualize(x)) == Counter({k.dual(): v for k, v in gr_of(x).items()})
    assert direct_sum(x, ZERO, mode) == x


XS = balanced_inputs("x", max_layers=2) + [f for f in balanced_inputs("x") if f.t == 3][::5]
YS = balanced_inputs("y", max_layers=2) + [f for f in balanced_inputs("y") if f.t == 3][::7]


def test_small_inputs_are_balanced():
    assert all(is_balanced(f) for f in XS + YS)


def test_merge_minimal_among_balanced_alternatives():
    for x in XS:
        for y in YS:
            m = balanced_merge(x, y)
            v = inv_triviality_sq(m)
            assert is_balanced(m)
            assert m.spec.rank == x.spec.rank + y.spec.rank
            assert gr_of(m.spec) == gr_of(x.spec) + gr_of(y.spec)
            found = False
            for seq, dl in schedules(x, y):
                bal, inv = score(schedule_ranks(seq, x, y), dl)
                assert not (bal and inv < v)
                if bal and inv == v and dl == m.delta and schedule_layers(seq, x, y) == m.spec.layers:
                    found = True
            assert found


def test_oracle_scorer_agrees_with_module():
    x, y = XS[-1], YS[-1]
    for seq, dl in schedules(x, y):
        df = DeltaFilt(FiltSpec(schedule_layers(seq, x, y)), dl)
        assert score(schedule_ranks(seq, x, y), dl) == (is_balanced(df), inv_triviality_sq(df))


def _partition_of(df):
    labels = layer_labels(df)
    comps = {}
    for k, (h, m) in labels.items():
        comps.setdefault(h, {})[m] = {k}
    return IndexedPartition(tuple((min(lv), tuple(lv[m] for m in sorted(lv))) for h, lv in sorted(comps.items())))


def test_normsq_matches_beta_module():
    # g = 2, d/n = 3, so p = rank * 2
    g, n, dd = 2, 2, 6
    for f in balanced_inputs("z", slope=(3, 1), ranks=(1, 2, 3)):
        rep = classify(f, (g, n, dd))
        assert rep.balanced
        if rep.inv_triviality_sq == 0:
            continue  # a single split layer: beta is 0
        ranks = [layer_rank(l) for l in f.spec.layers]
        ws = WeightSystem((1,) * f.t, tuple(2 * r for r in ranks))
        bd = beta_from_partition(_partition_of(f), ws)
        assert 1 / bd.normsq == rep.inv_normsq
        assert (rep.pivot.lo, rep.pivot.hi) == pivot_range(bd)
        assert rep.hn_shadow == HNType(((sum(ranks), 3 * sum(ranks)),))


def test_pivot_layers_within_range():
    for f in balanced_inputs("w"):
        p = classify(f).pivot
        for k1 in range(p.lo, p.hi + 1):
            steps = p.pivot(k1)
            assert steps[0] == k1 - 1 and steps[-1] == f.delta[k1 - 1]
        with pytest.raises(InputError):
            p.pivot(p.hi + 1)
