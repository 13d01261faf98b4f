"""
Reductive classes and refined stratum indices
=============================================

"""

from stratkit import ReductiveClass, census, group_data, mumford_census
from stratkit.strata_census import enumerate_jh_indices, jh_codim, jh_compare, stable_index

# Unordered lists (multiplicity, rank) describing the polystable bundles of rank 2, degree 0.
for cls in census(2, 0):
    print(cls.to_json())

# Two copies of distinct line bundles, after twisting to degree 8 in genus 2.
gd = group_data(ReductiveClass(((1, 1), (1, 1))), 8, 2)
print(gd.to_json())

# Rank bookkeeping for the relations among the generators.
for entry in mumford_census(3, 1, 2):
    print(entry.to_json())

# Semistable refinements in rank 2, degree 0: atoms and how they are layered.
for x in enumerate_jh_indices(2, 0, 2, 2):
    print(x.label(), jh_codim(x, 2))

# The stable index is the least element; every refinement compares greater.
xs = enumerate_jh_indices(2, 0, 2, 2)
print([jh_compare(stable_index(2, 0), x).value for x in xs])
