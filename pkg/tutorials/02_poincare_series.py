"""
Betti numbers from the stratification
=====================================

"""

# The equivariant series of the semistable stratum is what remains of the
# classifying-space series once the unstable strata are taken away.
from stratkit.series import generator_degrees, is_palindromic, poincare_BG, poincare_M

print(generator_degrees(2, 2))

# Classifying space of the gauge group, rank 2, genus 2, through t^12.
print(list(poincare_BG(2, 2, 12)))

# Coprime rank and degree: the moduli space is smooth and compact.
pm = poincare_M(2, 1, 2)
print(list(pm.trimmed()))
print(is_palindromic(pm.trimmed(), 10))

# Rank 3 in genus 2 has real dimension 2 * (9 + 1) = 20.
print(list(poincare_M(3, 1, 2).trimmed()))
