"""Partition combinatorics: hook lengths, Littlewood-Richardson coefficients,
Frobenius coordinates, the ``Q(2q)`` family, core/shell/oyster partitions and
labelled partitions.

Partitions are plain tuples of weakly decreasing positive integers.
Frobenius coordinates use the convention in which row ``i`` has length
``a_i + i - 1`` and column ``i`` has length ``b_i + i - 1``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from math import comb, factorial, prod

from .binomial import BinomialPolynomial


def _clean(parts) -> tuple[int, ...]:
    return tuple(x for x in parts if x > 0)


@lru_cache(maxsize=None)
def partitions(n: int, max_part: int | None = None) -> tuple[tuple[int, ...], ...]:
    """All partitions of ``n`` in reverse lexicographic order."""
    if max_part is None:
        max_part = n
    if n == 0:
        return ((),)
    out = []
    for first in range(min(n, max_part), 0, -1):
        for rest in partitions(n - first, first):
            out.append((first,) + rest)
    return tuple(out)


def conjugate(la) -> tuple[int, ...]:
    la = _clean(la)
    if not la:
        return ()
    return tuple(sum(1 for x in la if x > j) for j in range(la[0]))


def hooks(la):
    la = _clean(la)
    conj = conjugate(la)
    for i, row in enumerate(la):
        for j in range(row):
            yield (i, j), row - j + conj[j] - i - 1


@lru_cache(maxsize=None)
def hook_dim(la) -> int:
    """Dimension of the Specht module ``V_la``: ``N! / prod(hooks)``."""
    la = _clean(la)
    return factorial(sum(la)) // prod(h for _, h in hooks(la))


def schur_eval_ones(la, n: int) -> int:
    """``s_la(1^n)``, the dimension of the Schur functor applied to ``Q^n``."""
    la = _clean(la)
    if len(la) > n:
        return 0
    num = 1
    den = 1
    for (i, j), h in hooks(la):
        num *= n + j - i
        den *= h
    return num // den


def dim_C(la, n: int) -> int:
    """Dimension of the simple ``F``-module ``C_la`` on ``[n]``."""
    la = _clean(la)
    k = sum(la)
    if la and la[0] <= 1:
        raise ValueError("C_la needs la_1 > 1")
    return comb(n, k) * hook_dim(la) if n >= k else 0


def dim_D(k: int, n: int) -> int:
    """Dimension of the simple ``F``-module ``D_k`` on ``[n]``."""
    if k == 0:
        return 1 if n == 0 else 0
    return comb(n - 1, k - 1) if n >= k else 0


def double_factorial(m: int) -> int:
    return prod(range(m, 0, -2)) if m > 0 else 1


# ----------------------------------------------------------------------------
# Littlewood-Richardson

@lru_cache(maxsize=None)
def lr_coefficient(la, mu, nu) -> int:
    """Number of LR skew tableaux of shape ``la/mu`` and content ``nu``."""
    la, mu, nu = _clean(la), _clean(mu), _clean(nu)
    if sum(mu) + sum(nu) != sum(la):
        return 0
    if len(mu) > len(la) or any(m > l for m, l in zip(mu, la)):
        return 0
    if not nu:
        return 1
    mu_full = mu + (0,) * (len(la) - len(mu))
    # reading order: rows top to bottom, each row right to left
    cells = [(i, j) for i in range(len(la)) for j in range(la[i] - 1, mu_full[i] - 1, -1)]
    filling: dict = {}
    counts = [0] * (len(nu) + 1)
    top = len(nu)

    def rec(t):
        if t == len(cells):
            return 1
        i, j = cells[t]
        hi = top
        right = filling.get((i, j + 1))
        if right is not None:
            hi = min(hi, right)
        lo = 1
        above = filling.get((i - 1, j))
        if above is not None:
            lo = above + 1
        total = 0
        for v in range(lo, hi + 1):
            if counts[v] >= nu[v - 1]:
                continue
            if v > 1 and counts[v] + 1 > counts[v - 1]:
                continue
            counts[v] += 1
            filling[(i, j)] = v
            total += rec(t + 1)
            del filling[(i, j)]
            counts[v] -= 1
        return total

    return rec(0)


def lr_product(mu, nu) -> dict[tuple[int, ...], int]:
    """``V_mu . V_nu`` (induction product) as ``{la: multiplicity}``."""
    mu, nu = _clean(mu), _clean(nu)
    size = sum(mu) + sum(nu)
    out = {}
    for la in partitions(size):
        if len(la) < len(mu) or any(m > l for m, l in zip(mu, la)):
            continue
        c = lr_coefficient(la, mu, nu)
        if c:
            out[la] = c
    return out


# ----------------------------------------------------------------------------
# Frobenius coordinates

class FrobeniusError(ValueError):
    pass


@dataclass(frozen=True)
class FrobeniusCoords:
    a: tuple[int, ...]
    b: tuple[int, ...]

    def __str__(self):
        return f"({','.join(map(str, self.a))} | {','.join(map(str, self.b))})"

    @property
    def size(self) -> int:
        return sum(x + y - 1 for x, y in zip(self.a, self.b))


def to_frobenius(la) -> FrobeniusCoords:
    la = _clean(la)
    conj = conjugate(la)
    d = sum(1 for i, x in enumerate(la) if x > i)
    return FrobeniusCoords(
        tuple(la[i] - i for i in range(d)),
        tuple(conj[i] - i for i in range(d)),
    )


def from_frobenius(a, b) -> tuple[int, ...]:
    """Partition with the given coordinates; raises if none exists."""
    a, b = tuple(a), tuple(b)
    if len(a) != len(b):
        raise FrobeniusError("coordinate lists differ in length")
    d = len(a)
    if any(x <= 0 for x in a + b):
        raise FrobeniusError(f"({a} | {b}) has nonpositive coordinates")
    if any(a[i] <= a[i + 1] or b[i] <= b[i + 1] for i in range(d - 1)):
        raise FrobeniusError(f"({a} | {b}) is not strictly decreasing")
    rows = [a[i] + i for i in range(d)]
    cols = [b[j] + j for j in range(d)]
    depth = max(cols, default=0)
    for i in range(d, depth):
        rows.append(sum(1 for c in cols if c > i))
    la = _clean(rows)
    if to_frobenius(la) != FrobeniusCoords(a, b):
        raise FrobeniusError(f"no partition has coordinates ({a} | {b})")
    return la


# ----------------------------------------------------------------------------
# Q(2q), cores, shells, oysters

def in_Q(la) -> bool:
    """Diagonal hooks with arm = leg + 1, i.e. coordinates ``(a | a - 1)``."""
    fr = to_frobenius(la)
    return all(x == y + 1 for x, y in zip(fr.a, fr.b))


@lru_cache(maxsize=None)
def enumerate_Q(m: int) -> tuple[tuple[int, ...], ...]:
    if m % 2:
        raise ValueError("Q(m) needs m even")
    return tuple(la for la in partitions(m) if in_Q(la))


def is_core(la, k: int) -> bool:
    """``la`` has exactly ``k`` parts and removing its first column lands in ``Q``."""
    la = _clean(la)
    if len(la) != k:
        return False
    mu = _clean(x - 1 for x in la)
    return sum(mu) % 2 == 0 and in_Q(mu)


def shell_core_split(la, a: int):
    """Split the coordinates of ``la`` after the ``a``-th; ``None`` if too short."""
    fr = to_frobenius(la)
    if len(fr.a) < a:
        return None
    shell = FrobeniusCoords(fr.a[:a], fr.b[:a])
    core = from_frobenius(fr.a[a:], fr.b[a:]) if len(fr.a) > a else ()
    return shell, core


def is_oyster(la, k: int, a: int) -> bool:
    split = shell_core_split(la, a)
    if split is None:
        return False
    shell, core = split
    if any(c != d + 3 for c, d in zip(shell.a, shell.b)):
        return False
    if a and shell.b[-1] <= k:
        return False
    return is_core(core, k)


def enumerate_oyster(k: int, a: int, N: int) -> list[tuple[int, ...]]:
    """All ``(k, a)``-oyster partitions of ``N``."""
    if k < 0 or a < 0 or N < 0:
        return []
    return [la for la in partitions(N) if is_oyster(la, k, a)]


def oyster_lower_bound(p: int, q: int) -> tuple[int, BinomialPolynomial]:
    """Dimension of the oyster summands inside the top graded piece of ``H^{p,q}``.

    Returns the ``S_{p+2q}``-dimension and the matching coefficient of
    ``C(n, p + 2q)``.
    """
    N = p + 2 * q
    total = 0
    for a in range(p // 2 + 1):
        k = p - 2 * a
        for la in enumerate_oyster(k, a, N):
            total += hook_dim(la) * (k + 1)
    return total, BinomialPolynomial({N: total})


def oyster_listing(p: int, q: int) -> list[dict]:
    out = []
    N = p + 2 * q
    for a in range(p // 2 + 1):
        k = p - 2 * a
        for la in enumerate_oyster(k, a, N):
            out.append({
                "k": k, "a": a, "partition": la, "frobenius": str(to_frobenius(la)),
                "dim": hook_dim(la), "sl2_dim": k + 1,
            })
    return out


# ----------------------------------------------------------------------------
# labelled partitions

@dataclass(frozen=True)
class LabelledPartition:
    """Blocks ``(size, label)``; labels are ring basis indices."""

    blocks: tuple[tuple[int, int], ...]

    @property
    def n(self) -> int:
        return sum(s for s, _ in self.blocks)

    def p(self, ring) -> int:
        return sum(ring.degrees[lab] for _, lab in self.blocks)

    @property
    def q(self) -> int:
        return self.n - len(self.blocks)

    def f(self, ring) -> int:
        return sum(1 for s, lab in self.blocks if s == 1 and lab == ring.unit)

    def z_order(self) -> int:
        mult = Counter(self.blocks)
        return prod(s for s, _ in self.blocks) * prod(factorial(m) for m in mult.values())

    def weight(self, ring) -> int:
        return sum(ring.weights[lab] for _, lab in self.blocks)

    def induced_dim(self) -> int:
        return factorial(self.n) // self.z_order()


def labelled_partitions(ring, n: int, p: int | None = None, q: int | None = None,
                        full_support: bool = False, weight: int | None = None):
    """Labelled partitions of ``n`` with the requested invariants."""
    k = len(ring)
    types = [(s, lab) for s in range(n, 0, -1) for lab in range(k)
             if not (full_support and s == 1 and lab == ring.unit)]
    blocks_wanted = None if q is None else n - q

    def rec(t, left, acc):
        if left == 0:
            lp = LabelledPartition(tuple(acc))
            if blocks_wanted is not None and len(acc) != blocks_wanted:
                return
            if p is not None and lp.p(ring) != p:
                return
            if weight is not None and lp.weight(ring) != weight:
                return
            yield lp
            return
        if t == len(types):
            return
        if blocks_wanted is not None and len(acc) >= blocks_wanted:
            return
        s, lab = types[t]
        for m in range(left // s, -1, -1):
            acc.extend([types[t]] * m)
            yield from rec(t + 1, left - m * s, acc)
            del acc[len(acc) - m:]

    yield from rec(0, n, [])


def labelled_partition_dim(ring, n: int, p: int, q: int, full_support: bool = False,
                           weight: int | None = None) -> int:
    """``sum n!/|Z(la)|`` over labelled partitions with ``p(la) = p``, ``q(la) = q``."""
    return sum(lp.induced_dim() for lp in labelled_partitions(ring, n, p, q, full_support, weight))


def top_graded_dim(p: int, q: int) -> int:
    """Dimension of the top graded piece of ``E^{p,q}`` for the elliptic curve on ``p + 2q`` points.

    Sum over ``a`` of ``(sum_{la in Q(2q)} V_la) . V_(2^a, 1^k)`` tensored with
    the ``(k+1)``-dimensional SL2 representation, ``k = p - 2a``.
    """
    total = 0
    for a in range(p // 2 + 1):
        k = p - 2 * a
        column = (2,) * a + (1,) * k
        for la in enumerate_Q(2 * q):
            for nu, c in lr_product(la, column).items():
                total += c * hook_dim(nu) * (k + 1)
    return total
