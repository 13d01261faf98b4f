"""
Closest point to the origin of a convex hull
============================================

"""

from fractions import Fraction as F

from stratkit.minnorm import face_search, min_norm_point, wolfe

pts = [(1, 0, -1), (0, 1, -1)]
metric = (F(1, 2),) * 3

# The active-set method and the exhaustive face search agree exactly.
a = wolfe(pts, metric)
b = face_search(pts, metric)
print(a.point, a.normsq, a.coefficients)
print(a.point == b.point)

# When the hull contains the origin the answer is the origin.
print(min_norm_point([(1, 0), (-1, 0)]).point)

# Dependent points: the coefficients are the lexicographically least choice.
r = min_norm_point([(1, -1, 0), (0, 1, -1), (1, 0, -1)])
print(r.point, r.coefficients)
