"""
Symbolic filtrations and balanced merges
========================================

"""

from stratkit.filtcalc import Atom, DeltaFilt, FiltSpec, balanced_merge, classify, direct_sum, dualize, gr_of

# Stable pieces of slope 3.
d1, q1 = Atom("D1", 1, 3), Atom("Q1", 1, 3)
d2, q2 = Atom("D2", 1, 3), Atom("Q2", 2, 6)

e1 = FiltSpec.of([d1], [q1])
e2 = FiltSpec.of([d2], [q2])

# Maximal filtrations add up aligned at the bottom, minimal ones at the top.
print(direct_sum(e1, e2, "max").to_json())
print(dualize(direct_sum(e1, e2, "max")) == direct_sum(dualize(e1), dualize(e2), "min"))
print(gr_of(e1))

# Each piece is a nonsplit two-step chain: delta = (1, 2).
x = DeltaFilt(e1, (1, 2))
y = DeltaFilt(e2, (1, 2))

# The chain with the larger mean level steps first.
m = balanced_merge(x, y)
print([layer[0][0].id for layer in m.spec.layers], m.delta)

# Genus 2, rank 5, degree 15: the weights are rank * (1 - 2 + 3).
report = classify(m, (2, 5, 15))
print(report.to_json())
