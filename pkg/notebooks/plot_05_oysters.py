"""
Oyster partitions and lower bounds
==================================

Oysters are partitions assembled from a core and a shell in Frobenius
coordinates.  Their dimensions bound the top coefficients ``a_{p+2q}^{p,q}``
from below; here the bounds are compared with computed values.
"""

from krizconf.cohomology import Engine
from krizconf.partitions import enumerate_oyster, oyster_listing, oyster_lower_bound, to_frobenius

for la in enumerate_oyster(2, 1, 16)[:5]:
    print(la, to_frobenius(la))

for row in oyster_listing(2, 3):
    print(row)

###############################################################################
# Compare with the computed coefficients.

engine = Engine()
for p, q in [(1, 1), (2, 1), (1, 2), (2, 2), (3, 1), (0, 3)]:
    bound, poly = oyster_lower_bound(p, q)
    a = engine.cohomology("graded", p + 2 * q, p, q)
    print(f"(p,q)=({p},{q})  bound {bound:4d}  a = {a:4d}  term {poly}")
