"""
Harder-Narasimhan types of rank 2 bundles
=========================================

"""

# An HN type is a list of (rank, degree) blocks with strictly decreasing slopes.
from stratkit import HNType, enumerate_hn_types, hn_codim, hn_compare

# Rank 2, degree 1, genus 2: everything up to complex codimension 5.
for mu in enumerate_hn_types(2, 1, 2, 5):
    print(mu.label(), "codim", hn_codim(mu, 2))

# More unstable types are larger; the semistable type (the open stratum) is the least.
top = HNType(((2, 1),))
split = HNType(((1, 1), (1, 0)))
print(hn_compare(split, top).value)

# Twisting by a line bundle shifts every degree and leaves codimensions alone.
print(hn_codim(HNType(((1, 3), (1, 2))), 2))
