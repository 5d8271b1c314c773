from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from krizconf.kriz import (Element, G, Lab, Monomial, apply_map, build_basis, canonicalize,
                           differential, differential_matrix, differential_terms, multiply,
                           straighten)
from krizconf.partitions import labelled_partition_dim
from krizconf.ring import genus_two_ring

ONE, X, Y, XY = range(4)


def mono(n, edges=(), labels=()):
    return Monomial(n, tuple(edges), tuple(sorted(labels)))


def elem(R, n, terms):
    return Element(R, n, {mono(n, *k): c for k, c in terms.items()})


# -- canonicalize -------------------------------------------------------------

def _quotient_oracle(raw_monomials, relations, basis, target):
    """Coordinates of ``target`` in ``basis`` modulo the span of ``relations``.

    Everything is a vector over ``raw_monomials``; solved by exact elimination.
    """
    idx = {m: i for i, m in enumerate(raw_monomials)}
    size = len(raw_monomials)

    def vec(d):
        v = [Fraction(0)] * size
        for m, c in d.items():
            v[idx[m]] += c
        return v

    # unknowns: coefficients on basis and on relations; solve sum = target
    cols = [vec({b: 1}) for b in basis] + [vec(r) for r in relations]
    rhs = vec({target: 1})
    rows = [[cols[j][i] for j in range(len(cols))] + [rhs[i]] for i in range(size)]
    pivots = []
    r = 0
    for c in range(len(cols)):
        piv = next((k for k in range(r, size) if rows[k][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        rows[r] = [v / rows[r][c] for v in rows[r]]
        for k in range(size):
            if k != r and rows[k][c] != 0:
                f = rows[k][c]
                rows[k] = [a - f * b for a, b in zip(rows[k], rows[r])]
        pivots.append(c)
        r += 1
    sol = [Fraction(0)] * len(cols)
    for k, c in enumerate(pivots):
        sol[c] = rows[k][-1]
    return {b: sol[i] for i, b in enumerate(basis) if sol[i]}


def test_three_term_example(R):
    # raw words: ordered pairs of edges; G_ab G_cd = -G_cd G_ab
    u12_13, u12_23, u13_23 = "G12G13", "G12G23", "G13G23"
    raw = [u12_13, u12_23, u13_23]
    # G12 G23 - G12 G13 + G23 G13 = 0, with G23 G13 = -G13 G23
    relation = {u12_23: 1, u12_13: -1, u13_23: -1}
    coords = _quotient_oracle(raw, [relation], [u12_13, u12_23], u13_23)
    expected = {mono(3, [(1, 2), (1, 3)]): coords[u12_13], mono(3, [(1, 2), (2, 3)]): coords[u12_23]}
    got = canonicalize(R, 3, [G(1, 3), G(2, 3)])
    assert got.terms == expected
    assert got.terms == {mono(3, [(1, 2), (1, 3)]): -1, mono(3, [(1, 2), (2, 3)]): 1}


def test_label_slide_example(R):
    # raw span {x1 G, x2 G, y1 G, y2 G} modulo G(x1 - x2), G(y1 - y2)
    raw = ["x1G", "x2G", "y1G", "y2G"]
    relations = [{"x1G": 1, "x2G": -1}, {"y1G": 1, "y2G": -1}]
    coords = _quotient_oracle(raw, relations, ["x1G", "y1G"], "x2G")
    assert coords == {"x1G": 1}
    got = canonicalize(R, 2, [Lab("x", 2), G(1, 2)])
    assert got.terms == {mono(2, [(1, 2)], [(1, X)]): 1}


def test_repeated_edge_vanishes(R):
    assert canonicalize(R, 2, [G(1, 2), G(1, 2)]) == 0
    assert canonicalize(R, 2, [G(2, 1), G(1, 2)]) == 0


def test_reversed_edge_is_unsigned(R):
    assert canonicalize(R, 2, [G(2, 1)]) == canonicalize(R, 2, [G(1, 2)])


def test_cycle_vanishes(R):
    assert canonicalize(R, 3, [G(1, 2), G(2, 3), G(1, 3)]) == 0


def test_label_collision_multiplies(R):
    got = canonicalize(R, 2, [Lab("y", 1), Lab("x", 2), G(1, 2)])
    # y@1 x@1 = -xy@1
    assert got.terms == {mono(2, [(1, 2)], [(1, XY)]): -1}


def test_index_out_of_range(R):
    with pytest.raises(IndexError):
        canonicalize(R, 2, [G(1, 3)])
    with pytest.raises(IndexError):
        canonicalize(R, 2, [Lab("x", 0)])


def test_straighten_is_basis_valued():
    out = straighten([(2, 4), (1, 4), (3, 4)])
    for edges in out:
        seconds = [b for _, b in edges]
        assert seconds == sorted(set(seconds))


# -- multiply -----------------------------------------------------------------

def test_multiply_examples(R):
    x1 = elem(R, 2, {((), ((1, X),)): 1})
    g = elem(R, 2, {(((1, 2),),): 1})
    one = elem(R, 2, {((),): 1})
    assert multiply(x1, g).terms == {mono(2, [(1, 2)], [(1, X)]): 1}
    assert multiply(one, g) == g
    assert multiply(g, g) == 0
    with pytest.raises(ValueError):
        multiply(g, elem(R, 3, {((),): 1}))


def _all_monomials(R, n):
    return [m for q in range(n) for p in range(2 * (n - q) + 1) for m in build_basis(R, n, p, q)]


@settings(max_examples=150, deadline=None)
@given(st.data())
def test_multiply_graded_commutative(R, data):
    basis = _all_monomials(R, 3)
    m1 = data.draw(st.sampled_from(basis))
    m2 = data.draw(st.sampled_from(basis))
    e1, e2 = Element.from_monomial(R, m1), Element.from_monomial(R, m2)
    sign = (-1) ** (m1.p(R) * m2.p(R) + m1.q * m2.q)
    assert multiply(e1, e2) == multiply(e2, e1).scale(sign)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_multiply_associative(R, data):
    basis = _all_monomials(R, 3)
    a, b, c = (Element.from_monomial(R, data.draw(st.sampled_from(basis))) for _ in range(3))
    assert multiply(multiply(a, b), c) == multiply(a, multiply(b, c))


# -- differential -------------------------------------------------------------

def test_d_G12_full(R):
    got = differential(R, mono(2, [(1, 2)]), "full")
    assert got.terms == {
        mono(2, (), [(1, XY)]): 1,
        mono(2, (), [(2, XY)]): 1,
        mono(2, (), [(1, X), (2, Y)]): -1,
        mono(2, (), [(1, Y), (2, X)]): 1,
    }


def test_d_G12_matches_expansion(R):
    # (x1 - x2)(y1 - y2) through canonicalize
    lhs = Element(R, 2, {})
    for (a, b), c in {((1, 1), (1, 2)): 1, ((1, 1), (2, 2)): -1,
                      ((2, 1), (1, 2)): -1, ((2, 1), (2, 2)): 1}.items():
        lhs = lhs + canonicalize(R, 2, [Lab(a[1], a[0]), Lab(b[1], b[0])]).scale(c)
    assert differential(R, mono(2, [(1, 2)])) == lhs


def test_d_G12_graded(R):
    got = differential(R, mono(2, [(1, 2)]), "graded")
    assert got.terms == {mono(2, (), [(1, X), (2, Y)]): -1, mono(2, (), [(1, Y), (2, X)]): 1}


def test_d_x1_G12(R):
    # d(x_i G_ij) = x_i x_j y_j - x_i x_j y_i
    got = differential(R, mono(2, [(1, 2)], [(1, X)]))
    want = (canonicalize(R, 2, [Lab("x", 1), Lab("x", 2), Lab("y", 2)])
            - canonicalize(R, 2, [Lab("x", 1), Lab("x", 2), Lab("y", 1)]))
    assert got == want


def test_d_no_edges(R):
    assert differential(R, mono(3, (), [(1, X), (3, XY)])) == 0


def test_d_bad_mode(R):
    with pytest.raises(ValueError):
        differential(R, mono(2, [(1, 2)]), "other")


@pytest.mark.parametrize("n", [2, 3, 4])
def test_d_is_a_derivation(R, n):
    basis = _all_monomials(R, n)
    for m in basis[::7]:
        if not m.edges:
            continue
        # split off the first edge: m = G_e * rest
        head = Element.from_monomial(R, mono(n, m.edges[:1]))
        rest = Element.from_monomial(R, mono(n, m.edges[1:], m.labels))
        assert multiply(head, rest) == Element.from_monomial(R, m)
        lhs = differential(R, m)
        rhs = multiply(differential(R, head), rest) - multiply(head, differential(R, rest))
        assert lhs == rhs, m


@pytest.mark.parametrize("n", [3, 4])
def test_filtration_monotone_and_graded_part(R, n):
    for m in _all_monomials(R, n):
        full = differential_terms(R, m, False)
        graded = differential_terms(R, m, True)
        assert all(t.level() <= m.level() for t in full)
        assert graded == {t: c for t, c in full.items() if t.level() == m.level()}


@pytest.mark.parametrize("n", [3, 4])
def test_d_preserves_weight_and_shifts_bidegree(R, n):
    for m in _all_monomials(R, n):
        for t in differential_terms(R, m):
            assert (t.p(R), t.q) == (m.p(R) + 2, m.q - 1)
            assert t.weight(R) == m.weight(R)


# -- apply_map ----------------------------------------------------------------

def test_apply_identity(R):
    for m in _all_monomials(R, 3):
        assert apply_map(R, (1, 2, 3), m, 3).terms == {m: 1}


def test_apply_collapse_edge(R):
    assert apply_map(R, (1, 1), mono(2, [(1, 2)]), 1) == 0


def test_apply_collapse_labels(R):
    got = apply_map(R, (1, 1), mono(2, (), [(1, X), (2, Y)]), 1)
    assert got.terms == {mono(1, (), [(1, XY)]): 1}


def test_apply_triggers_straightening(R):
    # 1 -> 1, 2 -> 3, 3 -> 2 sends G12 G13 to G13 G12 = -G12 G13
    got = apply_map(R, (1, 3, 2), mono(3, [(1, 2), (1, 3)]), 3)
    assert got.terms == {mono(3, [(1, 2), (1, 3)]): -1}
    got = apply_map(R, (3, 2, 1), mono(3, [(1, 2), (1, 3)]), 3)
    assert got == canonicalize(R, 3, [G(2, 3), G(1, 3)])


def test_functoriality_small(R):
    from krizconf.checks import functoriality
    assert functoriality(R, 3, 3).ok


def test_functoriality_fails_for_genus_two():
    from krizconf.checks import functoriality
    # the collapse of two points multiplies the diagonal class, chi = -2
    ring = genus_two_ring()
    f = (1, 1)
    m = mono(2, [(1, 2)])
    lhs = apply_map(ring, f, differential(ring, m), 1)
    rhs = differential(ring, apply_map(ring, f, m, 1))
    assert lhs != rhs
    assert lhs.terms == {mono(1, (), [(1, ring.fundamental)]): -2}
    assert functoriality(ring, 2, 2, expect=False).ok


# -- bases and matrices ---------------------------------------------------------

def test_basis_examples(R):
    assert build_basis(R, 2, 0, 1) == [mono(2, [(1, 2)])]
    assert build_basis(R, 3, 0, 2) == [mono(3, [(1, 2), (1, 3)]), mono(3, [(1, 2), (2, 3)])]


def test_basis_order_is_lexicographic(R):
    basis = build_basis(R, 4, 2, 1)
    assert basis == sorted(basis, key=lambda m: (m.edges, m.labels))


@pytest.mark.parametrize("n", range(0, 6))
def test_basis_matches_labelled_partitions(R, n):
    for q in range(max(n, 1)):
        for p in range(2 * (n - q) + 1):
            assert len(build_basis(R, n, p, q)) == labelled_partition_dim(R, n, p, q)
            assert (len(build_basis(R, n, p, q, full_support=True))
                    == labelled_partition_dim(R, n, p, q, full_support=True))


def test_basis_weight_filter(R):
    total = sum(len(build_basis(R, 3, 2, 1, w)) for w in range(-2, 3))
    assert total == len(build_basis(R, 3, 2, 1))


def test_full_matrix_G12(R):
    M = differential_matrix(R, 2, 0, 1, "full", weight=0)
    target = build_basis(R, 2, 2, 0, 0)
    assert M.shape == (4, 1)
    entries = {target[r]: v for r, c, v in M.entries}
    assert entries == {
        mono(2, (), [(1, XY)]): 1,
        mono(2, (), [(2, XY)]): 1,
        mono(2, (), [(1, X), (2, Y)]): -1,
        mono(2, (), [(1, Y), (2, X)]): 1,
    }


def test_graded_matrix_G12(R):
    M = differential_matrix(R, 2, 0, 1, "graded", weight=0)
    target = build_basis(R, 2, 2, 0, 0, full_support=True)
    assert M.shape == (2, 1)
    assert {target[r]: v for r, c, v in M.entries} == {
        mono(2, (), [(1, X), (2, Y)]): -1,
        mono(2, (), [(1, Y), (2, X)]): 1,
    }
    # without the weight filter the weight +-2 rows are present but zero
    assert differential_matrix(R, 2, 0, 1, "graded").shape == (4, 1)


@pytest.mark.parametrize("mode", ["full", "graded"])
@pytest.mark.parametrize("n", [3, 4])
def test_consecutive_matrices_compose_to_zero(R, mode, n):
    for q in range(2, n):
        for p in range(0, 2 * (n - q) + 1):
            A = differential_matrix(R, n, p, q, mode)
            B = differential_matrix(R, n, p + 2, q - 1, mode)
            assert B.matmul(A).is_zero()


def test_render(R):
    assert mono(4, [(1, 2), (1, 3)], [(1, X), (4, Y)]).render(R) == "G(1,2)G(1,3) x@1 y@4"
    e = Element.from_monomial(R, mono(4, [(1, 2), (1, 3)], [(1, X), (4, Y)]), -1)
    assert str(e) == "-1 * G(1,2)G(1,3) x@1 y@4"


# -- compiled assembly --------------------------------------------------------

def _reference_matrix(R, source, target, graded):
    from krizconf.linalg import SparseIntMatrix

    index = {m: r for r, m in enumerate(target)}
    columns = []
    for m in source:
        col = {}
        for key, c in differential_terms(R, m, graded).items():
            if key in index:
                col[index[key]] = c
            else:
                assert graded
        columns.append(col)
    return SparseIntMatrix.from_columns(len(target), columns)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
@pytest.mark.parametrize("graded", [False, True])
def test_coded_assembly_matches_reference(R, n, graded):
    from krizconf.kriz import _assemble_coded, bidegree_range

    for p, q in bidegree_range(R, n):
        if q == 0:
            continue
        src = build_basis(R, n, p, q, None, graded)
        tgt = build_basis(R, n, p + 2, q - 1, None, graded)
        if src:
            assert _assemble_coded(R, src, tgt, graded) == _reference_matrix(R, src, tgt, graded)
