"""The Kriz model E(X, n) in its monotone-forest basis.

A basis monomial is a product ``G_{a_1 b_1} ... G_{a_q b_q} * labels`` where the
edges have ``a_k < b_k`` and strictly increasing, pairwise distinct ``b_k``.  The
edges form a forest whose trees are rooted at their minima; cohomology labels
sit on the roots only (unit labels are never stored).

Signs follow the bigraded Koszul rule: swapping factors of bidegrees
``(p, q)`` and ``(p', q')`` costs ``(-1)^(p p' + q q')``.  Edge generators are
``(0, 1)``, labels ``(deg, 0)``, so edges anticommute with each other and
commute with labels.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import NamedTuple, Sequence

import numba as nb
import numpy as np

from .ring import RingPresentation, diagonal


class Monomial(NamedTuple):
    n: int
    edges: tuple[tuple[int, int], ...]
    labels: tuple[tuple[int, int], ...] = ()

    @property
    def q(self) -> int:
        return len(self.edges)

    def p(self, ring: RingPresentation) -> int:
        return sum(ring.degrees[lab] for _, lab in self.labels)

    def weight(self, ring: RingPresentation) -> int:
        return sum(ring.weights[lab] for _, lab in self.labels)

    def level(self) -> int:
        """Filtration level: ``n`` minus the number of bare singleton points."""
        return filtration_level(self.n, self.edges, self.labels)

    def roots(self) -> list[int]:
        nonroots = {b for _, b in self.edges}
        return [v for v in range(1, self.n + 1) if v not in nonroots]

    def render(self, ring: RingPresentation) -> str:
        words = []
        if self.edges:
            words.append("".join(f"G({a},{b})" for a, b in self.edges))
        words += [f"{ring.names[lab]}@{v}" for v, lab in self.labels]
        return " ".join(words) if words else "1"


def filtration_level(n, edges, labels) -> int:
    touched = set()
    for a, b in edges:
        touched.add(a)
        touched.add(b)
    for v, _ in labels:
        touched.add(v)
    return len(touched)


# ----------------------------------------------------------------------------
# generators as raw factors

class G(NamedTuple):
    i: int
    j: int


class Lab(NamedTuple):
    """A label ``b@v``: basis element ``b`` (index or name) placed at point ``v``."""

    label: object
    vertex: int


def _label_index(ring, label) -> int:
    return ring.index(label) if isinstance(label, str) else int(label)


# ----------------------------------------------------------------------------
# straightening

def _sort_edges(edges: list) -> tuple[list, int] | tuple[None, int]:
    es = list(edges)
    sign = 1
    for i in range(1, len(es)):
        j = i
        while j > 0 and (es[j][1], es[j][0]) < (es[j - 1][1], es[j - 1][0]):
            es[j], es[j - 1] = es[j - 1], es[j]
            sign = -sign
            j -= 1
    for i in range(1, len(es)):
        if es[i] == es[i - 1]:
            return None, 0
    return es, sign


def straighten(edges: Sequence[tuple[int, int]]) -> dict[tuple, int]:
    """Express a product of edge generators in the monotone-forest basis.

    Edges are ``(i, j)`` pairs with ``i < j`` and multiply left to right.
    Returns ``{sorted edge tuple: integer coefficient}``.
    """
    result: dict[tuple, int] = {}
    stack = [(list(edges), 1)]
    while stack:
        es, s = stack.pop()
        es, sign = _sort_edges(es)
        if es is None:
            continue
        s *= sign
        for t in range(len(es) - 1):
            if es[t][1] == es[t + 1][1]:
                (i, k), (j, _) = es[t], es[t + 1]
                # G_ik G_jk = G_ij G_jk - G_ij G_ik   (i < j < k)
                stack.append((es[:t] + [(i, j), (j, k)] + es[t + 2:], s))
                stack.append((es[:t] + [(i, j), (i, k)] + es[t + 2:], -s))
                break
        else:
            key = tuple(es)
            result[key] = result.get(key, 0) + s
    return {k: v for k, v in result.items() if v}


def _root_map(n, edges) -> list[int]:
    parent = list(range(n + 1))
    for a, b in edges:
        parent[b] = a
    root = parent[:]
    for v in range(1, n + 1):
        r = v
        while parent[r] != r:
            r = parent[r]
        root[v] = r
    return root


def _collect_labels(ring, factors) -> list[tuple[tuple, object]]:
    """Sort ``(root, label)`` factors by root with Koszul signs and multiply collisions.

    Returns a list of ``(label tuple, coefficient)``.
    """
    odd = [ring.degrees[lab] % 2 for _, lab in factors]
    order = sorted(range(len(factors)), key=lambda t: factors[t][0])
    sign = 1
    for x in range(len(order)):
        for y in range(x + 1, len(order)):
            if order[x] > order[y] and odd[order[x]] and odd[order[y]]:
                sign = -sign
    # group consecutive factors sharing a root
    groups: list[tuple[int, list[int]]] = []
    for t in order:
        v, lab = factors[t]
        if groups and groups[-1][0] == v:
            groups[-1][1].append(lab)
        else:
            groups.append((v, [lab]))
    partial: list[tuple[tuple, object]] = [((), sign)]
    for v, labs in groups:
        value = {labs[0]: 1}
        for lab in labs[1:]:
            value = ring.multiply(value, {lab: 1})
            if not value:
                return []
        partial = [
            (pre + (((v, lab),) if lab != ring.unit else ()), c * coef)
            for pre, c in partial
            for lab, coef in value.items()
        ]
    return partial


def _normalize(n, ring, coeff, edge_factors, label_factors, out: dict):
    for edges, s in straighten(edge_factors).items():
        root = _root_map(n, edges)
        slid = [(root[v], lab) for v, lab in label_factors]
        for labels, c in _collect_labels(ring, slid):
            key = Monomial(n, edges, labels)
            out[key] = out.get(key, 0) + coeff * s * c


# ----------------------------------------------------------------------------
# elements

class Element:
    """Finite rational linear combination of basis monomials of E(X, n)."""

    __slots__ = ("ring", "n", "terms")

    def __init__(self, ring: RingPresentation, n: int, terms=None):
        self.ring = ring
        self.n = n
        clean = {}
        for m, c in (terms or {}).items():
            if c:
                if isinstance(c, Fraction) and c.denominator == 1:
                    c = int(c)
                clean[m] = c
        self.terms: dict[Monomial, object] = clean

    @classmethod
    def from_monomial(cls, ring, m: Monomial, coeff=1):
        return cls(ring, m.n, {m: coeff})

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.terms
        if not isinstance(other, Element):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __add__(self, other):
        _check_ambient(self, other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Element(self.ring, self.n, out)

    def __neg__(self):
        return Element(self.ring, self.n, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return Element(self.ring, self.n, {m: c * v for m, v in self.terms.items()})

    def __rmul__(self, c):
        return self.scale(c)

    def __mul__(self, other):
        if isinstance(other, Element):
            return multiply(self, other)
        return self.scale(other)

    def bidegrees(self) -> set[tuple[int, int]]:
        return {(m.p(self.ring), m.q) for m in self.terms}

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c} * {m.render(self.ring)}" for m, c in sorted(self.terms.items()))

    __repr__ = __str__


def _check_ambient(e1: Element, e2: Element):
    if e1.n != e2.n:
        raise ValueError(f"ambient mismatch: E(X,{e1.n}) vs E(X,{e2.n})")


def canonicalize(ring: RingPresentation, n: int, factors) -> Element:
    """Image of the ordered product of raw generators in the canonical basis."""
    edge_factors = []
    label_factors = []
    for f in factors:
        if isinstance(f, G):
            i, j = f
            if not (1 <= i <= n and 1 <= j <= n) or i == j:
                raise IndexError(f"edge G({i},{j}) out of range for n={n}")
            edge_factors.append((min(i, j), max(i, j)))
        else:
            lab, v = f
            if not 1 <= v <= n:
                raise IndexError(f"point {v} out of range for n={n}")
            label_factors.append((v, _label_index(ring, lab)))
    out: dict = {}
    _normalize(n, ring, 1, edge_factors, label_factors, out)
    return Element(ring, n, out)


def _factors(m: Monomial):
    return [G(a, b) for a, b in m.edges] + [Lab(lab, v) for v, lab in m.labels]


def multiply(e1: Element, e2: Element) -> Element:
    _check_ambient(e1, e2)
    ring = e1.ring
    out: dict = {}
    for m1, c1 in e1.terms.items():
        for m2, c2 in e2.terms.items():
            _normalize(
                e1.n, ring, c1 * c2,
                list(m1.edges) + list(m2.edges),
                list(m1.labels) + list(m2.labels),
                out,
            )
    return Element(ring, e1.n, out)


# ----------------------------------------------------------------------------
# differential

class _DiffContext:
    """Precomputed ring data for the differential."""

    def __init__(self, ring: RingPresentation):
        self.ring = ring
        diag = diagonal(ring).terms
        self.odd = [d % 2 for d in ring.degrees]
        self.unit = ring.unit
        prod = {}
        for i in range(len(ring)):
            for j in range(len(ring)):
                prod[(i, j)] = tuple(ring.product(i, j).items())
        coeffs = [c for *_, c in diag] + [c for out in prod.values() for _, c in out]
        self.integral = all(Fraction(c).denominator == 1 for c in coeffs)
        if self.integral:
            # plain ints are far cheaper than Fractions in the inner loop
            diag = tuple((l, r, int(c)) for l, r, c in diag)
            prod = {k: tuple((t, int(c)) for t, c in out) for k, out in prod.items()}
        self.diag = diag
        self.prod = prod


_CONTEXTS: dict = {}


def _context(ring) -> _DiffContext:
    ctx = _CONTEXTS.get(id(ring))
    if ctx is None or ctx.ring is not ring:
        ctx = _DiffContext(ring)
        _CONTEXTS[id(ring)] = ctx
    return ctx


def differential_terms(ring: RingPresentation, m: Monomial, graded: bool = False) -> dict:
    """``d(m)`` as ``{Monomial: coefficient}``.

    Leibniz over the edge factors: deleting the k-th edge ``(a, b)`` carries
    sign ``(-1)^(k-1)`` and inserts the diagonal ``b_l@a * b_l^*@b`` in front
    of the labels.  In graded mode terms whose filtration level drops are
    discarded.
    """
    ctx = _context(ring)
    n, edges, labels = m
    out: dict = {}
    if not edges:
        return out
    odd = ctx.odd
    prod = ctx.prod
    unit = ctx.unit
    label_at = dict(labels)
    for k, (a, b) in enumerate(edges):
        rest = edges[:k] + edges[k + 1:]
        parent = {y: x for x, y in rest}
        ra = a
        while ra in parent:
            ra = parent[ra]
        # the level drops exactly when a or b ends up a bare singleton
        b_alone = a_alone = False
        if graded:
            in_rest = {v for e in rest for v in e}
            b_alone = b not in in_rest
            a_alone = a not in in_rest
        sgn_k = -1 if k % 2 else 1
        # existing labels strictly below each insertion point (by root index)
        old = label_at.get(ra)
        for left, right, c in ctx.diag:
            # sequence: (ra, left), (b, right), labels...  -> sort by root
            sign = sgn_k
            if odd[left]:
                for v, lab in labels:
                    if v < ra and odd[lab]:
                        sign = -sign
            if odd[right]:
                for v, lab in labels:
                    if v < b and odd[lab]:
                        sign = -sign
                if b < ra and odd[left]:
                    sign = -sign
            # merge left label with the label already sitting at ra
            if old is None:
                merged = ((left, 1),)
            else:
                merged = prod[(left, old)]
            for lab_a, c2 in merged:
                if (b_alone and right == unit) or (a_alone and lab_a == unit):
                    continue
                new = {v: lab for v, lab in labels if v != ra}
                if lab_a != unit:
                    new[ra] = lab_a
                if right != unit:
                    new[b] = right
                new_labels = tuple(sorted(new.items()))
                key = Monomial(n, rest, new_labels)
                val = out.get(key, 0) + sign * c * c2
                if val:
                    out[key] = val
                else:
                    del out[key]
    return out


def differential(ring: RingPresentation, m, mode: str = "full") -> Element:
    if mode not in ("full", "graded"):
        raise ValueError(f"unknown mode {mode!r}")
    graded = mode == "graded"
    if isinstance(m, Monomial):
        return Element(ring, m.n, differential_terms(ring, m, graded))
    out: dict = {}
    for mono, c in m.terms.items():
        for key, v in differential_terms(ring, mono, graded).items():
            out[key] = out.get(key, 0) + c * v
    return Element(ring, m.n, out)


# ----------------------------------------------------------------------------
# F-module structure

def apply_map(ring: RingPresentation, f, m, target_n: int | None = None) -> Element:
    """``f_*`` for a map of finite sets ``f: [n] -> [target_n]``.

    ``f`` is a mapping or a sequence with ``f[i-1]`` the image of ``i``.
    """
    if isinstance(m, Element):
        n = m.n
        terms = m.terms.items()
    else:
        n = m.n
        terms = [(m, 1)]
    image = {i: (f[i] if isinstance(f, dict) else f[i - 1]) for i in range(1, n + 1)}
    if target_n is None:
        target_n = max(image.values(), default=0)
    out: dict = {}
    for mono, c in terms:
        edge_factors = []
        for a, b in mono.edges:
            fa, fb = image[a], image[b]
            if fa == fb:
                break
            edge_factors.append((min(fa, fb), max(fa, fb)))
        else:
            label_factors = [(image[v], lab) for v, lab in mono.labels]
            _normalize(target_n, ring, c, edge_factors, label_factors, out)
    return Element(ring, target_n, out)


# ----------------------------------------------------------------------------
# bases

def _forests(n: int, q: int):
    """Monotone forests on [n] with q edges, as sorted edge tuples."""
    def rec(v, remaining, acc):
        if v > n:
            if remaining == 0:
                yield tuple(acc)
            return
        if n - v + 1 > remaining:
            yield from rec(v + 1, remaining, acc)
        if remaining:
            for a in range(1, v):
                acc.append((a, v))
                yield from rec(v + 1, remaining - 1, acc)
                acc.pop()
    if 0 <= q < max(n, 1):
        yield from rec(2, q, [])


def _label_choices(ring, singleton_flags, p, weight, full_support):
    """Label tuples for roots in order; ``singleton_flags[t]`` marks bare roots.

    Each tuple gives the ring index on every root, units included.
    """
    degs = ring.degrees
    wts = ring.weights
    k = len(ring)
    options = [[lab for lab in range(k) if not (full_support and bare and lab == ring.unit)]
               for bare in singleton_flags]
    results = []
    maxdeg = max(degs)
    nroots = len(singleton_flags)

    def rec(t, p_left, acc, w_acc):
        if t == nroots:
            if p_left == 0 and (weight is None or w_acc == weight):
                results.append(tuple(acc))
            return
        if p_left > maxdeg * (nroots - t) or p_left < 0:
            return
        for lab in options[t]:
            acc.append(lab)
            rec(t + 1, p_left - degs[lab], acc, w_acc + (wts[lab] if wts is not None else 0))
            acc.pop()

    rec(0, p, [], 0)
    return results


def build_basis(ring: RingPresentation, n: int, p: int, q: int,
                weight: int | None = None, full_support: bool = False) -> list[Monomial]:
    """Deterministically ordered basis of ``E^{p,q}(X, n)`` (optionally filtered).

    ``full_support`` keeps the monomials of filtration level ``n``, which span
    ``E(X, n) / F_{n-1} E(X, n)``.
    """
    if weight is not None and ring.weights is None:
        raise ValueError("ring carries no weights")
    if n == 0:
        return [Monomial(0, (), ())] if p == 0 and q == 0 and (weight in (None, 0)) else []
    unit = ring.unit
    patterns: dict = {}
    out = []
    for edges in _forests(n, q):
        nonroots = {b for _, b in edges}
        touched = nonroots | {a for a, _ in edges}
        roots = [v for v in range(1, n + 1) if v not in nonroots]
        flags = tuple(v not in touched for v in roots)
        choices = patterns.get(flags)
        if choices is None:
            choices = patterns[flags] = _label_choices(ring, flags, p, weight, full_support)
        for labs in choices:
            labels = tuple((v, lab) for v, lab in zip(roots, labs) if lab != unit)
            out.append(Monomial(n, edges, labels))
    out.sort(key=lambda m: (m.edges, m.labels))
    return out


def bidegree_range(ring: RingPresentation, n: int):
    """All ``(p, q)`` with possibly nonzero ``E^{p,q}(X, n)``."""
    top = ring.top_degree
    for q in range(0, max(n, 1)):
        for p in range(0, top * (n - q) + 1):
            yield p, q


def weights_for(ring: RingPresentation, n: int, p: int, q: int):
    """Weights that can occur in ``E^{p,q}(X, n)``; ``[None]`` for unweighted rings."""
    if ring.weights is None:
        return [None]
    roots = n - q
    lo = min(ring.weights) * roots
    hi = max(ring.weights) * roots
    return [w for w in range(lo, hi + 1)]


def differential_matrix(ring: RingPresentation, n: int, p: int, q: int, mode: str = "full",
                        weight: int | None = None, full_support: bool | None = None):
    """Matrix of ``d: E^{p,q} -> E^{p+top, q-1}`` in the bases of :func:`build_basis`.

    Graded mode works on the full-support quotient complex by default.
    """
    if full_support is None:
        full_support = mode == "graded"
    source = build_basis(ring, n, p, q, weight, full_support)
    target = build_basis(ring, n, p + ring.top_degree, q - 1, weight, full_support) if q > 0 else []
    return _assemble(ring, source, target, mode == "graded")


def _assemble(ring, source, target, graded):
    from .linalg import SparseIntMatrix

    if source and _context(ring).integral and _fits_codes(ring, source[0].n):
        return _assemble_coded(ring, source, target, graded)
    index = {m: r for r, m in enumerate(target)}
    columns = []
    for m in source:
        col = {}
        for key, c in differential_terms(ring, m, graded).items():
            r = index.get(key)
            if r is None:
                if graded:
                    # lower support vanishes in the quotient
                    continue
                raise AssertionError(f"d({m}) leaves the target basis at {key}")
            col[r] = c
        if any(isinstance(c, Fraction) for c in col.values()):
            scale = 1
            for c in col.values():
                scale = scale * Fraction(c).denominator // gcd(scale, Fraction(c).denominator)
            col = {r: int(c * scale) for r, c in col.items()}
        columns.append(col)
    return SparseIntMatrix.from_columns(len(target), columns)


# ----------------------------------------------------------------------------
# compiled assembly
#
# A monomial on [n] is packed into one integer: vertex v contributes the digit
# parent(v) * L + label(v) in base (n + 1) * L, where L is the ring rank,
# parent 0 marks a root and unlabelled vertices carry the unit.

def _fits_codes(ring, n) -> bool:
    return n > 0 and ((n + 1) * len(ring)) ** n < 1 << 62


def _arrays(ring, monos, n):
    par = np.zeros((len(monos), n + 1), np.int64)
    lab = np.full((len(monos), n + 1), ring.unit, np.int64)
    for i, m in enumerate(monos):
        row_p, row_l = par[i], lab[i]
        for a, b in m.edges:
            row_p[b] = a
        for v, x in m.labels:
            row_l[v] = x
    return par, lab


def _powers(ring, n):
    base = (n + 1) * len(ring)
    return np.array([0] + [base ** (v - 1) for v in range(1, n + 1)], np.int64)


def _ring_tables(ring):
    ctx = _context(ring)
    L = len(ring)
    width = max(len(out) for out in ctx.prod.values())
    prod_lab = np.zeros((L, L, width), np.int64)
    prod_c = np.zeros((L, L, width), np.int64)
    prod_len = np.zeros((L, L), np.int64)
    for (i, j), out in ctx.prod.items():
        prod_len[i, j] = len(out)
        for t, (x, c) in enumerate(out):
            prod_lab[i, j, t] = x
            prod_c[i, j, t] = c
    diag = np.array(ctx.diag, np.int64).reshape(-1, 3)
    return np.array(ctx.odd, np.int64), diag, prod_lab, prod_c, prod_len


@nb.njit(cache=True)
def _diff_coo(par, lab, pw, L, unit, odd, diag, prod_lab, prod_c, prod_len, graded):
    m, width = par.shape
    n = width - 1
    cap = 0
    for i in range(m):
        q = 0
        for v in range(1, n + 1):
            if par[i, v]:
                q += 1
        cap += q * diag.shape[0] * prod_lab.shape[2]
    cols = np.empty(cap, np.int64)
    codes = np.empty(cap, np.int64)
    vals = np.empty(cap, np.int64)
    out = 0
    children = np.zeros(n + 1, np.int64)
    for i in range(m):
        code = 0
        for v in range(1, n + 1):
            code += (par[i, v] * L + lab[i, v]) * pw[v]
            children[v] = 0
        for v in range(1, n + 1):
            if par[i, v]:
                children[par[i, v]] += 1
        k = 0
        for b in range(1, n + 1):
            a = par[i, b]
            if a == 0:
                continue
            ra = a
            while par[i, ra]:
                ra = par[i, ra]
            b_alone = graded and children[b] == 0
            a_alone = graded and par[i, a] == 0 and children[a] == 1
            below_ra = 0
            below_b = 0
            for v in range(1, b):
                if odd[lab[i, v]]:
                    below_b += 1
                    if v < ra:
                        below_ra += 1
            old = lab[i, ra]
            rest = code - a * L * pw[b] - unit * pw[b]
            for d in range(diag.shape[0]):
                left, right, c = diag[d, 0], diag[d, 1], diag[d, 2]
                sign = -1 if k % 2 else 1
                if odd[left] and below_ra % 2:
                    sign = -sign
                if odd[right]:
                    if below_b % 2:
                        sign = -sign
                    if b < ra and odd[left]:
                        sign = -sign
                for t in range(prod_len[left, old]):
                    lab_a = prod_lab[left, old, t]
                    if (b_alone and right == unit) or (a_alone and lab_a == unit):
                        continue
                    cols[out] = i
                    codes[out] = rest + right * pw[b] + (lab_a - old) * pw[ra]
                    vals[out] = sign * c * prod_c[left, old, t]
                    out += 1
            k += 1
    return cols[:out], codes[:out], vals[:out]


def _assemble_coded(ring, source, target, graded):
    from .linalg import SparseIntMatrix

    n = source[0].n
    pw = _powers(ring, n)
    odd, diag, prod_lab, prod_c, prod_len = _ring_tables(ring)
    par, lab = _arrays(ring, source, n)
    cols, codes, vals = _diff_coo(par, lab, pw, len(ring), ring.unit, odd, diag,
                                  prod_lab, prod_c, prod_len, graded)
    tpar, tlab = _arrays(ring, target, n)
    tcodes = ((tpar * len(ring) + tlab) * pw).sum(axis=1) if len(target) else np.zeros(0, np.int64)
    order = np.argsort(tcodes)
    sorted_codes = tcodes[order]
    pos = np.searchsorted(sorted_codes, codes)
    pos_c = np.minimum(pos, max(len(sorted_codes) - 1, 0))
    found = (pos < len(sorted_codes)) & (sorted_codes[pos_c] == codes) if len(sorted_codes) else \
        np.zeros(len(codes), bool)
    if not found.all():
        if not graded:
            bad = int(np.flatnonzero(~found)[0])
            raise AssertionError(f"d({source[cols[bad]]}) leaves the target basis")
        cols, vals, pos_c = cols[found], vals[found], pos_c[found]
    rows = order[pos_c] if len(pos_c) else pos_c
    return SparseIntMatrix.from_coo(len(target), len(source), rows, cols, vals)
