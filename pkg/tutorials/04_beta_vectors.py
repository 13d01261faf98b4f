"""
Beta vectors from indexed partitions
====================================

"""

from fractions import Fraction

from stratkit.beta import (
    IndexedPartition,
    WeightSystem,
    beta_from_partition,
    canonicalize_partition,
    partition_from_beta,
    pivot_range,
    verify_beta,
)

# Three weights of square norm 1/2 each.
ws = WeightSystem((1, 1, 1), (2, 2, 2))

# Indices 1 and 2 at level 0 and index 3 at level 1, in a single component.
ip = IndexedPartition(((0, ({1, 2}, {3})),))
bd = beta_from_partition(ip, ws)
print(bd.coords, bd.normsq, bd.eps)

# The coordinates determine the partition again.
print(partition_from_beta(bd.coords, ws) == ip)

# The certificate lists the convex weights on the support differences.
print(verify_beta(bd, ws).to_json())

# A raw partition at the wrong levels is shifted back into place.
raw = [("a", 7, [1, 2]), ("a", 8, [3])]
print(canonicalize_partition(raw, ws) == ip)

print(bd.delta, bd.delta_prime, pivot_range(bd))

# Claiming a different point is caught.
fake = type(bd)(**{**bd.__dict__, "coords": (Fraction(1), Fraction(0), Fraction(-1)), "normsq": Fraction(1)})
print(verify_beta(fake, ws).failures)
