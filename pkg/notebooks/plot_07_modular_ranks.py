"""
Certified ranks over prime fields
=================================

Ranks are taken modulo two primes near ``2^31`` and accepted when they
agree.  An exact fraction-free elimination serves as a reference.
"""

import numpy as np

from krizconf.kriz import differential_matrix
from krizconf.linalg import SparseIntMatrix, rank, rank_mod_p, rational_rank
from krizconf.ring import elliptic_curve_ring

R = elliptic_curve_ring()
M = differential_matrix(R, 4, 0, 2, weight=0)
print(M, rank(M), "exact:", rational_rank(M))

###############################################################################
# A prime dividing an entry can lose rank; a second prime catches it.

p = 2147483647
A = SparseIntMatrix.from_dense([[p, 0], [0, 1]])
print("mod p:", rank_mod_p(A, p), "certificate:", rank(A))

###############################################################################
# Random sparse integer matrices against the exact rank.

rng = np.random.default_rng(0)
for _ in range(5):
    dense = rng.integers(-2, 3, size=(30, 25)) * (rng.random((30, 25)) < 0.15)
    A = SparseIntMatrix.from_dense(dense.tolist())
    print(rank(A).rank, rational_rank(A), np.linalg.matrix_rank(dense))
