"""
The Kriz model of an elliptic curve
===================================

Build the cohomology ring of an elliptic curve, look at the diagonal class
and apply the differential to a few monomials of ``E(C, n)``.
"""

from krizconf.kriz import G, Lab, Monomial, build_basis, canonicalize, differential
from krizconf.ring import diagonal, elliptic_curve_ring

R = elliptic_curve_ring()
print("basis:", R.names, "degrees:", R.degrees, "weights:", R.weights)

# The diagonal class as a sum of b_left (x) b_right
for left, right, c in diagonal(R).terms:
    print(f"  {int(c):+} {R.names[left]} (x) {R.names[right]}")

###############################################################################
# Monomials are monotone forests with labels on the roots.  Products of
# generators are rewritten into that basis with Koszul signs.

e = canonicalize(R, 3, [G(1, 3), G(2, 3)])
print("G13 G23 =", e)

e = canonicalize(R, 2, [Lab("x", 2), G(1, 2)])
print("x@2 G12 =", e)

###############################################################################
# The differential removes one edge at a time and inserts the diagonal.

m = Monomial(2, ((1, 2),), ())
print("d G12 =", differential(R, m))
print("gr d G12 =", differential(R, m, mode="graded"))

###############################################################################
# d o d vanishes on every basis monomial of E^{0,2}(C, 3).

for m in build_basis(R, 3, 0, 2):
    assert not differential(R, differential(R, m))
print("d o d = 0 on", len(build_basis(R, 3, 0, 2)), "monomials")
