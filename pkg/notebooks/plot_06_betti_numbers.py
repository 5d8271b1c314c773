"""
Betti numbers as binomial polynomials
=====================================

Assemble ``b_k(n) = sum_{p+q=k} sum_i a_i^{p,q} binom(n, i)`` and evaluate.
"""

from krizconf.cohomology import Engine, betti_polynomials, cohom_dims

engine = Engine()
betti = betti_polynomials(4, engine=engine)
for k, poly in betti.items():
    print(f"b_{k}(n) = {poly}")

###############################################################################
# Check against the Poincare polynomials from the full complexes.

for n in range(2, 6):
    poincare = cohom_dims(None, n, engine).poincare()
    print(n, [betti[k](n) for k in range(5)], poincare[:5])
