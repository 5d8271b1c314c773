"""
Bigraded cohomology of conf(C, n)
=================================

Compute ``dim H^{p,q}(conf(C, n))`` from the full Kriz complex and divide out
the factor ``(1 + t)^2`` contributed by the curve itself.
"""

import time

from krizconf.cohomology import Engine, cohom_dims, deconvolve_by_C

engine = Engine()

for n in range(2, 6):
    t0 = time.time()
    full = cohom_dims(None, n, engine)
    quotient = deconvolve_by_C(full)
    print(f"conf(C,{n})/C  ({time.time() - t0:.1f}s)")
    print(quotient.to_markdown())

###############################################################################
# Poincare polynomials: the full space is (1 + t)^2 times the quotient.

full = cohom_dims(None, 4, engine)
print("conf(C,4):  ", full.poincare())
print("conf(C,4)/C:", deconvolve_by_C(full).poincare())

###############################################################################
# Each piece splits by torus weight before any rank is taken.

piece = engine.piece("full", 4, 2, 2)
print("H^{2,2}(conf(C,4)):", piece)
for w in (-2, -1, 0, 1, 2):
    print(f"  weight {w:+}:", engine.cohomology("full", 4, 2, 2, w))
