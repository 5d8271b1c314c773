"""Exact ranks of sparse integer matrices.

Ranks are computed over prime fields by sparse Gaussian elimination and
certified by agreement of two independent primes.  A dense fraction-free
(Bareiss) elimination over the integers serves as an oracle on small inputs.
"""

from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass, field

import numba as nb
import numpy as np

log = logging.getLogger(__name__)

DEFAULT_PRIMES = (2147483647, 2147483629)
# fallbacks, tried in order when the defaults disagree
EXTRA_PRIMES = (2147483587, 2147483579, 2147483563, 2147483549, 2147483543, 2147483497)
RATIONAL_GUARD = 4_000_000


class SparseIntMatrix:
    """Integer matrix in compressed sparse column form.

    ``entries`` lists ``(row, col, value)`` triples in column-major order.
    Values must fit in 64 bits.
    """

    __slots__ = ("rows", "cols", "colptr", "rowidx", "values", "_entries")

    def __init__(self, rows: int, cols: int, entries=()):
        e = np.array(list(entries), dtype=object).reshape(-1, 3)
        if any(abs(int(v)) >= 1 << 63 for v in e[:, 2]):
            raise OverflowError("entries must fit in 64 bits")
        e = e.astype(np.int64)
        r, c, v = e[:, 0], e[:, 1], e[:, 2]
        if len(e) and (r.min() < 0 or r.max() >= rows or c.min() < 0 or c.max() >= cols):
            bad = np.flatnonzero((r < 0) | (r >= rows) | (c < 0) | (c >= cols))[0]
            raise IndexError(f"entry ({r[bad]}, {c[bad]}) outside a {rows}x{cols} matrix")
        if (v == 0).any():
            raise ValueError("explicit zero entry")
        self._set(rows, cols, r, c, v)
        if len(np.unique(self.colptr_key())) != len(self.values):
            raise ValueError("duplicate entry")

    def _set(self, rows, cols, r, c, v):
        order = np.lexsort((r, c))
        self.rows, self.cols = int(rows), int(cols)
        self.rowidx = np.ascontiguousarray(r[order], dtype=np.int64)
        self.values = np.ascontiguousarray(v[order], dtype=np.int64)
        self.colptr = np.zeros(self.cols + 1, np.int64)
        np.cumsum(np.bincount(c, minlength=self.cols), out=self.colptr[1:])
        self._entries = None

    def colptr_key(self):
        cols = np.repeat(np.arange(self.cols, dtype=np.int64), np.diff(self.colptr))
        return cols * max(self.rows, 1) + self.rowidx

    @classmethod
    def from_coo(cls, rows: int, cols: int, r, c, v) -> "SparseIntMatrix":
        """Build from triples, summing duplicates and dropping zeros."""
        r = np.asarray(r, np.int64)
        c = np.asarray(c, np.int64)
        v = np.asarray(v, np.int64)
        key = c * max(rows, 1) + r
        uniq, inverse = np.unique(key, return_inverse=True)
        sums = np.zeros(len(uniq), np.int64)
        np.add.at(sums, inverse, v)
        keep = sums != 0
        uniq, sums = uniq[keep], sums[keep]
        M = cls.__new__(cls)
        M._set(rows, cols, uniq % max(rows, 1), uniq // max(rows, 1), sums)
        return M

    @classmethod
    def from_columns(cls, rows: int, columns) -> "SparseIntMatrix":
        entries = [(r, c, int(v)) for c, col in enumerate(columns) for r, v in col.items() if v]
        return cls(rows, len(columns), entries)

    @classmethod
    def from_dense(cls, dense) -> "SparseIntMatrix":
        dense = [list(row) for row in dense]
        rows = len(dense)
        cols = len(dense[0]) if rows else 0
        entries = [(r, c, int(v)) for r, row in enumerate(dense) for c, v in enumerate(row) if v]
        return cls(rows, cols, entries)

    @classmethod
    def identity(cls, k: int) -> "SparseIntMatrix":
        return cls(k, k, [(i, i, 1) for i in range(k)])

    @property
    def entries(self) -> tuple[tuple[int, int, int], ...]:
        if self._entries is None:
            cols = np.repeat(np.arange(self.cols), np.diff(self.colptr))
            self._entries = tuple(zip(self.rowidx.tolist(), cols.tolist(), self.values.tolist()))
        return self._entries

    @property
    def nnz(self) -> int:
        return len(self.values)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __eq__(self, other):
        if not isinstance(other, SparseIntMatrix):
            return NotImplemented
        return (self.shape == other.shape and np.array_equal(self.colptr, other.colptr)
                and np.array_equal(self.rowidx, other.rowidx)
                and np.array_equal(self.values, other.values))

    def __repr__(self):
        return f"SparseIntMatrix({self.rows}x{self.cols}, nnz={self.nnz})"

    def transpose(self) -> "SparseIntMatrix":
        cols = np.repeat(np.arange(self.cols, dtype=np.int64), np.diff(self.colptr))
        return SparseIntMatrix.from_coo(self.cols, self.rows, cols, self.rowidx, self.values)

    def permute(self, row_perm, col_perm) -> "SparseIntMatrix":
        cols = np.repeat(np.arange(self.cols, dtype=np.int64), np.diff(self.colptr))
        rp = np.asarray(row_perm, np.int64)
        cp = np.asarray(col_perm, np.int64)
        return SparseIntMatrix.from_coo(self.rows, self.cols, rp[self.rowidx], cp[cols], self.values)

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for r, c, v in self.entries:
            out[r][c] = v
        return out

    def matmul(self, other: "SparseIntMatrix") -> "SparseIntMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        r, c, v = _spgemm(self.colptr, self.rowidx, self.values,
                          other.colptr, other.rowidx, other.values, self.rows)
        return SparseIntMatrix.from_coo(self.rows, other.cols, r, c, v)

    def is_zero(self) -> bool:
        return self.nnz == 0


@nb.njit(cache=True)
def _spgemm(ap, ai, av, bp, bi, bv, nrows):
    """Product of two CSC matrices as COO triples (no duplicates)."""
    ncols = len(bp) - 1
    acc = np.zeros(nrows, np.int64)
    used = np.zeros(nrows, np.bool_)
    touched = np.empty(nrows, np.int64)
    out_r = []
    out_c = []
    out_v = []
    for j in range(ncols):
        nt = 0
        for t in range(bp[j], bp[j + 1]):
            k = bi[t]
            w = bv[t]
            for s in range(ap[k], ap[k + 1]):
                i = ai[s]
                if not used[i]:
                    used[i] = True
                    touched[nt] = i
                    nt += 1
                acc[i] += av[s] * w
        for x in range(nt):
            i = touched[x]
            if acc[i] != 0:
                out_r.append(i)
                out_c.append(j)
                out_v.append(acc[i])
            acc[i] = 0
            used[i] = False
    return (np.array(out_r, dtype=np.int64), np.array(out_c, dtype=np.int64),
            np.array(out_v, dtype=np.int64))


@dataclass(frozen=True)
class RankCertificate:
    rank: int
    primes_used: tuple[int, ...]
    agreed: bool
    method: str = "modular-consensus"
    modular_ranks: tuple[int, ...] = field(default=())
    discrepancies: int = 0

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "primes": list(self.primes_used),
            "agreed": self.agreed,
            "method": self.method,
            "modular_ranks": list(self.modular_ranks),
            "discrepancies": self.discrepancies,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RankCertificate":
        return cls(
            rank=int(data["rank"]),
            primes_used=tuple(data["primes"]),
            agreed=bool(data["agreed"]),
            method=data.get("method", "modular-consensus"),
            modular_ranks=tuple(data.get("modular_ranks", ())),
            discrepancies=int(data.get("discrepancies", 0)),
        )


@nb.njit(cache=True)
def _heap_push(h, n, v):
    h[n] = v
    i = n
    while i > 0:
        up = (i - 1) >> 1
        if h[up] <= h[i]:
            break
        h[up], h[i] = h[i], h[up]
        i = up
    return n + 1


@nb.njit(cache=True)
def _heap_pop(h, n):
    top = h[0]
    n -= 1
    h[0] = h[n]
    i = 0
    while True:
        left = 2 * i + 1
        s = i
        if left < n and h[left] < h[s]:
            s = left
        if left + 1 < n and h[left + 1] < h[s]:
            s = left + 1
        if s == i:
            break
        h[s], h[i] = h[i], h[s]
        i = s
    return top, n


@nb.njit(cache=True)
def _echelon_rank(colptr, rowidx, values, nrows, p):
    """Left-looking elimination over the columns of a CSC matrix.

    Each column is scattered into a dense buffer and reduced against earlier
    pivot columns in order of creation, so one pass suffices.  The pivot of a
    reduced column is its largest surviving row index.
    """
    ncols = len(colptr) - 1
    x = np.zeros(nrows, np.int64)
    mark = np.zeros(nrows, np.bool_)
    touched = np.empty(nrows, np.int64)
    pivot_of_row = -np.ones(nrows, np.int64)
    row_of_pivot = np.empty(min(nrows, ncols) + 1, np.int64)
    cap = max(1024, 4 * len(rowidx))
    sidx = np.empty(cap, np.int64)
    sval = np.empty(cap, np.int64)
    sptr = np.zeros(min(nrows, ncols) + 2, np.int64)
    heap = np.empty(nrows, np.int64)
    queued = np.zeros(nrows + 1, np.bool_)
    rank = 0
    for c in range(ncols):
        nt = 0
        hn = 0
        for t in range(colptr[c], colptr[c + 1]):
            r = rowidx[t]
            x[r] = values[t] % p
            if not mark[r]:
                mark[r] = True
                touched[nt] = r
                nt += 1
            pv = pivot_of_row[r]
            if pv >= 0 and not queued[pv]:
                queued[pv] = True
                hn = _heap_push(heap, hn, pv)
        while hn > 0:
            pv, hn = _heap_pop(heap, hn)
            queued[pv] = False
            f = x[row_of_pivot[pv]]
            if f == 0:
                continue
            for t in range(sptr[pv], sptr[pv + 1]):
                r = sidx[t]
                x[r] = (x[r] - f * sval[t]) % p
                if not mark[r]:
                    mark[r] = True
                    touched[nt] = r
                    nt += 1
                q = pivot_of_row[r]
                if q > pv and not queued[q] and x[r] != 0:
                    queued[q] = True
                    hn = _heap_push(heap, hn, q)
        best = -1
        count = 0
        for k in range(nt):
            r = touched[k]
            if x[r] != 0:
                count += 1
                if r > best:
                    best = r
        if best >= 0:
            inv = 1
            b = x[best]
            e = p - 2
            while e > 0:
                if e & 1:
                    inv = inv * b % p
                b = b * b % p
                e >>= 1
            start = sptr[rank]
            if start + count > cap:
                while start + count > cap:
                    cap *= 2
                grown_i = np.empty(cap, np.int64)
                grown_v = np.empty(cap, np.int64)
                grown_i[:start] = sidx[:start]
                grown_v[:start] = sval[:start]
                sidx = grown_i
                sval = grown_v
            pos = start
            for k in range(nt):
                r = touched[k]
                if x[r] != 0:
                    sidx[pos] = r
                    sval[pos] = x[r] * inv % p
                    pos += 1
            sptr[rank + 1] = pos
            pivot_of_row[best] = rank
            row_of_pivot[rank] = best
            rank += 1
        for k in range(nt):
            r = touched[k]
            x[r] = 0
            mark[r] = False
    return rank


def _csc(M: SparseIntMatrix):
    return M.colptr, M.rowidx, M.values


def rank_mod_p(M: SparseIntMatrix, p: int, method: str = "echelon") -> int:
    """Rank of ``M`` over GF(p).

    ``echelon`` (default) reduces columns left to right, pivoting on the
    largest row index; on differential matrices whose bases are ordered
    consistently this keeps fill-in small.  ``markowitz`` is a pure-Python
    elimination with Markowitz-style pivots, kept as an independent check.
    """
    if p >= 1 << 31:
        raise ValueError("primes must be below 2^31 so products fit in 64 bits")
    if method == "markowitz":
        return _rank_markowitz(M, p)
    if method != "echelon":
        raise ValueError(f"unknown method {method!r}")
    if not M.nnz:
        return 0
    colptr, rowidx, values = _csc(M)
    return int(_echelon_rank(colptr, rowidx, values, M.rows, p))


def _rank_markowitz(M: SparseIntMatrix, p: int) -> int:
    """Rank over GF(p) by sparse elimination with Markowitz-style pivots.

    Each step picks a shortest remaining row and, inside it, the column with
    the fewest remaining entries.  Columns holding a single entry are cleared
    first since they pivot without fill-in.
    """
    rows: dict[int, dict[int, int]] = {}
    cols: dict[int, set[int]] = {}
    for r, c, v in M.entries:
        v %= p
        if v:
            rows.setdefault(r, {})[c] = v
            cols.setdefault(c, set()).add(r)

    rank = 0

    def drop_row(r):
        for c in rows.pop(r):
            s = cols[c]
            s.discard(r)
            if not s:
                del cols[c]

    # columns with one entry: pivot without touching any other row
    changed = True
    while changed:
        changed = False
        for c in [c for c, s in cols.items() if len(s) == 1]:
            s = cols.get(c)
            if s is None or len(s) != 1:
                continue
            (r,) = s
            drop_row(r)
            rank += 1
            changed = True

    heap = [(len(row), r) for r, row in rows.items()]
    heapq.heapify(heap)
    while heap:
        length, r = heapq.heappop(heap)
        row = rows.get(r)
        if row is None or len(row) != length:
            continue
        if not row:
            del rows[r]
            continue
        pc = min(row, key=lambda c: len(cols[c]))
        pv = row[pc]
        inv = pow(pv, p - 2, p)
        pivot_items = list(row.items())
        targets = [t for t in cols[pc] if t != r]
        drop_row(r)
        rank += 1
        for t in targets:
            trow = rows[t]
            factor = trow[pc] * inv % p
            for c, v in pivot_items:
                nv = (trow.get(c, 0) - factor * v) % p
                if nv:
                    if c not in trow:
                        cols.setdefault(c, set()).add(t)
                    trow[c] = nv
                elif c in trow:
                    del trow[c]
                    s = cols[c]
                    s.discard(t)
                    if not s:
                        del cols[c]
            if trow:
                heapq.heappush(heap, (len(trow), t))
            else:
                del rows[t]
    return rank


def rank(M: SparseIntMatrix, primes=DEFAULT_PRIMES) -> RankCertificate:
    """Rank over the rationals, certified by two primes that agree.

    Modular ranks never exceed the rational rank, so on disagreement the
    larger value is trusted and further primes are tried until two agree.
    """
    primes = tuple(primes)
    if M.rows == 0 or M.cols == 0 or not M.nnz:
        return RankCertificate(0, primes[:2], True, modular_ranks=(0, 0)[: len(primes[:2])])
    queue = list(primes) + [p for p in EXTRA_PRIMES if p not in primes]
    used: list[int] = []
    found: list[int] = []
    discrepancies = 0
    while queue:
        p = queue.pop(0)
        r = rank_mod_p(M, p)
        used.append(p)
        found.append(r)
        if len(found) >= 2:
            best = max(found)
            if found.count(best) >= 2:
                discrepancies = sum(1 for x in found if x != best)
                if discrepancies:
                    log.warning("modular ranks disagree %s; consensus %d", found, best)
                return RankCertificate(best, tuple(used), True, modular_ranks=tuple(found),
                                       discrepancies=discrepancies)
    best = max(found)
    log.error("no two primes agree on the rank: %s", found)
    return RankCertificate(best, tuple(used), False, modular_ranks=tuple(found),
                           discrepancies=len(found) - 1)


def rational_rank(M: SparseIntMatrix) -> int:
    """Exact rank over the rationals by fraction-free Bareiss elimination."""
    if M.rows * M.cols > RATIONAL_GUARD:
        raise ValueError(
            f"{M.rows}x{M.cols} exceeds the dense guard of {RATIONAL_GUARD} entries"
        )
    a = M.to_dense()
    nrows, ncols = M.rows, M.cols
    rk = 0
    prev = 1
    for c in range(ncols):
        piv = next((r for r in range(rk, nrows) if a[r][c] != 0), None)
        if piv is None:
            continue
        a[rk], a[piv] = a[piv], a[rk]
        pivot_row = a[rk]
        pv = pivot_row[c]
        for r in range(rk + 1, nrows):
            row = a[r]
            f = row[c]
            if f == 0:
                for j in range(c + 1, ncols):
                    row[j] = row[j] * pv // prev
            else:
                for j in range(c + 1, ncols):
                    row[j] = (row[j] * pv - f * pivot_row[j]) // prev
            row[c] = 0
        prev = pv
        rk += 1
        if rk == nrows:
            break
    return rk
