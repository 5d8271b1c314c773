import random

import pytest
from hypothesis import given, settings, strategies as st

from krizconf.kriz import differential_matrix
from krizconf.linalg import (DEFAULT_PRIMES, RankCertificate, SparseIntMatrix, rank, rank_mod_p,
                             rational_rank)

P = DEFAULT_PRIMES[0]


def dense_matrices(max_rows=9, max_cols=9):
    values = st.sampled_from([0, 0, 0, 0, 1, -1, 2, -3, 7])
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(values, min_size=c, max_size=c), min_size=r, max_size=r)))


def test_zero_and_identity():
    assert rank_mod_p(SparseIntMatrix(3, 4), P) == 0
    assert rank_mod_p(SparseIntMatrix.identity(5), P) == 5
    assert rational_rank(SparseIntMatrix.identity(5)) == 5
    assert rational_rank(SparseIntMatrix(3, 3)) == 0


def test_empty():
    cert = rank(SparseIntMatrix(3, 0))
    assert cert.rank == 0 and cert.agreed


def test_kriz_column(R):
    M = differential_matrix(R, 2, 0, 1, "full", weight=0)
    assert rank_mod_p(M, P) == 1
    assert rank_mod_p(M, P, "markowitz") == 1


def test_engineered_collision():
    M = SparseIntMatrix(1, 1, ((0, 0, P),))
    assert rank_mod_p(M, P) == 0
    cert = rank(M)
    assert cert.rank == 1
    assert cert.agreed
    assert cert.discrepancies == 1
    assert cert.modular_ranks[0] == 0


def test_two_agreeing_primes_are_trusted():
    # both primes divide the entry, so the consensus rule accepts rank 0
    primes = (2147483647, 2147483629)
    cert = rank(SparseIntMatrix(1, 1, ((0, 0, primes[0] * primes[1]),)), primes)
    assert cert.rank == 0 and cert.agreed


def test_no_agreement_is_flagged(monkeypatch):
    import krizconf.linalg as linalg

    answers = iter(range(100))
    monkeypatch.setattr(linalg, "rank_mod_p", lambda M, p: next(answers))
    cert = linalg.rank(SparseIntMatrix.identity(2))
    assert not cert.agreed
    assert len(cert.primes_used) == 2 + len(linalg.EXTRA_PRIMES)
    assert cert.rank == max(cert.modular_ranks)


def test_certificate_round_trip():
    cert = RankCertificate(3, (5, 7), True, modular_ranks=(3, 3))
    assert RankCertificate.from_dict(cert.to_dict()) == cert


def test_matrix_validation():
    with pytest.raises(ValueError):
        SparseIntMatrix(2, 2, ((0, 0, 1), (0, 0, 2)))
    with pytest.raises(ValueError):
        SparseIntMatrix(2, 2, ((0, 0, 0),))
    with pytest.raises(IndexError):
        SparseIntMatrix(2, 2, ((2, 0, 1),))


def test_rational_guard():
    with pytest.raises(ValueError, match="guard"):
        rational_rank(SparseIntMatrix(3000, 2000))


def test_large_prime_rejected():
    with pytest.raises(ValueError):
        rank_mod_p(SparseIntMatrix.identity(2), 1 << 31 | 1)


@settings(max_examples=200, deadline=None)
@given(dense_matrices())
def test_modular_matches_rational(dense):
    M = SparseIntMatrix.from_dense(dense)
    exact = rational_rank(M)
    assert rank(M).rank == exact
    assert rank_mod_p(M, P) == exact
    assert rank_mod_p(M, P, "markowitz") == exact


@settings(max_examples=100, deadline=None)
@given(dense_matrices(), st.randoms(use_true_random=False))
def test_transpose_and_permutation_invariance(dense, rnd):
    M = SparseIntMatrix.from_dense(dense)
    r = rank_mod_p(M, P)
    assert rank_mod_p(M.transpose(), P) == r
    rows = list(range(M.rows))
    cols = list(range(M.cols))
    rnd.shuffle(rows)
    rnd.shuffle(cols)
    assert rank_mod_p(M.permute(rows, cols), P) == r


def test_low_rank_products():
    rng = random.Random(3)
    for _ in range(20):
        k = rng.randint(1, 6)
        A = SparseIntMatrix.from_dense([[rng.randint(-3, 3) for _ in range(k)] for _ in range(12)])
        B = SparseIntMatrix.from_dense([[rng.randint(-3, 3) for _ in range(10)] for _ in range(k)])
        C = A.matmul(B)
        assert rank(C).rank == rational_rank(C) <= k


@pytest.mark.parametrize("n", [2, 3, 4])
def test_exactness_bound(R, n):
    for q in range(1, n):
        for p in range(0, 2 * (n - q) + 1):
            into = differential_matrix(R, n, p - 2, q + 1) if p >= 2 and q + 1 < n else None
            out = differential_matrix(R, n, p, q)
            dim = out.cols
            r_in = rank(into).rank if into is not None else 0
            assert r_in + rank(out).rank <= dim
