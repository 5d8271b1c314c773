"""
Binomial coefficients from quotient complexes
=============================================

For each ``r`` the full-support quotient complex computes the coefficient
``a_r^{p,q}`` of ``binom(n, r)`` in ``dim H^{p,q}(conf(C, n))``.  Summing them
recovers the full tables, which is checked here for ``n <= 5``.
"""

from krizconf.binomial import fit_binomial
from krizconf.cohomology import (Engine, cohom_dims, graded_coefficients, primed_coefficients,
                                 verify_strictness)

engine = Engine()

for r in range(3, 7):
    print(f"primed coefficients, r = {r}")
    print(primed_coefficients(None, r, engine).to_markdown())

###############################################################################
# The coefficients reassemble the full tables exactly.

for n in range(2, 6):
    print(verify_strictness(None, n, engine))

###############################################################################
# The same polynomial can be read off by fitting the computed dimensions.

values = {n: cohom_dims(None, n, engine)[2, 1] for n in range(0, 6)}
print("dim H^{2,1}(conf(C,n)) =", fit_binomial(values, 5))
print("from coefficients:      ",
      {r: graded_coefficients(None, r, engine)[2, 1] for r in range(2, 5)})
