"""
Torus weights and SL2 multiplicities
====================================

The differential preserves the torus weight, so every piece splits into
weight spaces.  Consecutive differences of weight-space dimensions give the
multiplicities of the irreducible SL2 modules.
"""

from krizconf.cohomology import Engine, highest_weight_dims, weight_cohom

engine = Engine()

for (r, p, q) in [(3, 1, 1), (4, 2, 1), (5, 2, 2)]:
    dims = {w: weight_cohom(None, r, p, q, w, full_support=True, engine=engine)
            for w in range(-p, p + 1)}
    print(f"a_{r}^{{{p},{q}}} by weight:", dims)
    mult = highest_weight_dims(None, r, p, q, full_support=True, engine=engine)
    print("   SL2 multiplicities (highest weight -> count):", mult)
