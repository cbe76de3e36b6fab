from __future__ import annotations

import random
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from arrh.arrangement import (MultiArrangement, characteristic_polynomial, clique_complex,
                              essentialize, graphic_arrangement, integer_roots, intersection_lattice,
                              irreducible_components, irreducible_factors, new_multiarrangement,
                              product_arrangement, restriction, subarrangement, ziegler_restriction)
from arrh.families import (CYCLE_CHORD_EDGES, arrt, boolean, braid, braid_essential, cycle_chord, x3,
                           xrt, ziegler_pair)
from arrh.linalg import GF, QQ
from oracles import brute_rank, random_forms


def brute_flats(A):
    """Closed index sets by rank, from ranks of all subsets."""
    n = A.size
    forms = [list(f) for f in A.forms]
    out = {}
    for k in range(n + 1):
        for S in combinations(range(n), k):
            r = brute_rank([forms[i] for i in S]) if S else 0
            closed = frozenset(j for j in range(n)
                               if brute_rank([forms[i] for i in S] + [forms[j]]) == r)
            out.setdefault(r, set()).add(closed)
    return out


def whitney_chi(A):
    """chi(t) = sum over subsets B of (-1)^|B| t^(l - rank B), as a coefficient list."""
    ell = A.nvars
    forms = [list(f) for f in A.forms]
    coeffs = [0] * (ell + 1)
    for k in range(A.size + 1):
        for S in combinations(range(A.size), k):
            r = brute_rank([forms[i] for i in S]) if S else 0
            coeffs[ell - r] += (-1) ** k
    return coeffs


def test_construction_errors():
    with pytest.raises(ValueError):
        new_multiarrangement(QQ, [(1, 0), (2, 0)])
    with pytest.raises(ValueError):
        new_multiarrangement(QQ, [(0, 0)])
    with pytest.raises(ValueError):
        new_multiarrangement(QQ, [(1, 0)], [0])
    with pytest.raises(ValueError):
        GF(4)
    A = new_multiarrangement(QQ, [(1, 0, 0), (0, 1, 0), (0, 0, 1)])
    assert A.is_simple() and A.total_multiplicity == 3 and A.size == 3
    assert x3(2).size == 6


def test_x3_lattice():
    L = intersection_lattice(x3(2))
    assert len(L.flats(2)) == 9
    assert sorted(X.label() for X in L.triple_flats()) == ["124", "135", "236"]
    assert sum(1 for X in L.flats(2) if len(X) == 2) == 6


def test_boolean_lattice_and_chi():
    A = boolean(3)
    L = intersection_lattice(A)
    assert len(L.flats(2)) == 3 and len(L.flats(3)) == 1
    assert L.mu(L.center) == -1
    assert characteristic_polynomial(A) == [-1, 3, -3, 1]
    assert integer_roots(characteristic_polynomial(A)) == [1, 1, 1]


def test_ziegler_pair_lattice():
    A, _ = ziegler_pair(conic=True)
    L = intersection_lattice(A)
    doubles = [X for X in L.flats(2) if len(X) == 2]
    assert len(doubles) == 18
    assert sorted(X.label() for X in L.triple_flats()) == ["138", "145", "256", "289", "367", "479"]


def test_rank_and_essential():
    assert boolean(3).rank() == 3 and boolean(3).is_essential()
    A = MultiArrangement(QQ, [(1, 0, 0), (0, 1, 0)])
    assert A.rank() == 2 and not A.is_essential()
    X = arrt(4, 2)
    assert X.nvars == 5 and X.rank() == 5 and X.is_essential()


def test_subarrangement_and_restriction():
    A = x3(2)
    L = intersection_lattice(A)
    X = L.flat([0, 1, 3])
    sub = subarrangement(A, X, L)
    assert sub.size == 3 and sub.rank() == 2
    assert subarrangement(A, L.center, L) == A
    R = restriction(A, L.flat([0]), L)
    assert R.nvars == 2 and R.is_simple()
    with pytest.raises(ValueError):
        restriction(A, L.center, L)


def test_arrt_localizations_at_h0():
    """Rank-3 flats through x0 = 0 localize to A1^3, A1 x A2, deleted A3 or A3."""
    A = arrt(3, -1)
    L = intersection_lattice(A)
    allowed = {(3, 0), (4, 1), (5, 2), (6, 4)}
    seen = set()
    for X in L.flats(3):
        if 0 not in X.indices:
            continue
        sub = A.select(X.key)
        kind = (sub.size, len(intersection_lattice(sub).triple_flats()))
        assert kind in allowed, kind
        seen.add(kind)
    assert seen


def _normalized_set(A):
    out = []
    for f, m in zip(A.forms, A.mults):
        lead = next(c for c in f if c)
        out.append((tuple(c / lead for c in f), m))
    return sorted(out)


@pytest.mark.parametrize("r", [3, 4])
def test_ziegler_restriction_of_arrt(r):
    Z = ziegler_restriction(arrt(r, 2), 0)
    assert Z.nvars == r
    assert _normalized_set(Z) == _normalized_set(xrt(r, 2, doubled=True))


def test_ziegler_restriction_small_cases():
    Z = ziegler_restriction(boolean(3), 0)
    assert Z.size == 2 and Z.mults == (1, 1)
    B = braid(4)
    h = next(i for i, f in enumerate(B.forms) if list(f) == [1, -1, 0, 0])
    Z = ziegler_restriction(B, h)
    assert Z.total_multiplicity == 5
    assert Z.rank() == 2
    with pytest.raises(IndexError):
        ziegler_restriction(boolean(3), 5)
    with pytest.raises(ValueError):
        ziegler_restriction(boolean(3, [2, 1, 1]), 0)


def test_irreducible_factors():
    assert len(irreducible_factors(boolean(3))) == 3
    A = MultiArrangement(QQ, [(1, 0, 0), (0, 1, 0), (1, -1, 0), (0, 0, 1)])
    assert irreducible_components(A) == [[0, 1, 2], [3]]
    assert len(irreducible_factors(x3(2))) == 1


def test_graphic_arrangements():
    A = graphic_arrangement(CYCLE_CHORD_EDGES)
    E = essentialize(A)[0]
    assert E.size == 5 and E.rank() == 3
    assert len(intersection_lattice(A).triple_flats()) == 2
    assert len(intersection_lattice(cycle_chord()).triple_flats()) == 2
    tri = graphic_arrangement([(1, 2), (2, 3), (1, 3)])
    assert tri.rank() == 2
    assert len(clique_complex([(1, 2), (2, 3), (1, 3)])[2]) == 1
    K4 = graphic_arrangement(list(combinations(range(1, 5), 2)))
    assert K4.size == 6 and K4.rank() == 3
    with pytest.raises(ValueError):
        graphic_arrangement([(1, 1)])
    with pytest.raises(ValueError):
        graphic_arrangement([(1, 2), (2, 1)])


def test_characteristic_polynomials():
    chi = characteristic_polynomial(braid_essential())
    assert integer_roots(chi) == [1, 2, 3]
    # seven lines x y z (x - 2y)(x + 2y)(y - z)(x - z): does not factor over Z
    A = MultiArrangement(QQ, [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, -2, 0), (1, 2, 0), (0, 1, -1), (1, 0, -1)])
    assert integer_roots(characteristic_polynomial(A)) is None
    with pytest.raises(ValueError):
        characteristic_polynomial(boolean(2, [2, 1]))


@given(st.integers(0, 10 ** 6))
@settings(max_examples=30, deadline=None)
def test_lattice_against_brute_force(seed):
    rng = random.Random(seed)
    ell = rng.randint(2, 4)
    A = MultiArrangement(QQ, random_forms(rng, ell, rng.randint(ell, 7)))
    L = intersection_lattice(A)
    brute = brute_flats(A)
    for k in range(L.rank + 1):
        assert {X.indices for X in L.flats(k)} == brute[k]
    # Mobius recursion and characteristic polynomial (Whitney's subset formula)
    for X in L.flats():
        if X.rank:
            assert sum(L.mu(Y) for Y in L.flats() if Y.indices <= X.indices) == 0
    chi = characteristic_polynomial(A, L)
    want = whitney_chi(A)
    assert chi + [0] * (len(want) - len(chi)) == want
    # every flat: |A_X| >= rank X; joins of flats are flats
    for X in L.flats():
        assert len(X) >= X.rank
    for X, Y in combinations(L.flats(2), 2):
        assert L.is_flat(L.closure(X.indices | Y.indices).indices)


@given(st.integers(0, 10 ** 6))
@settings(max_examples=30, deadline=None)
def test_ziegler_count_and_factor_spans(seed):
    rng = random.Random(seed)
    ell = rng.randint(2, 4)
    A = MultiArrangement(QQ, random_forms(rng, ell, rng.randint(ell, 7)))
    for h in range(A.size):
        if A.size > 1:
            assert ziegler_restriction(A, h).total_multiplicity == A.size - 1
    groups = irreducible_components(A)
    ranks = [brute_rank([list(A.forms[i]) for i in g]) for g in groups]
    assert sum(ranks) == A.rank()
    # finest: no group splits further
    for g in groups:
        assert len(irreducible_components(A.select(g))) == 1


def test_triangles_are_triple_flats():
    rng = random.Random(3)
    for _ in range(5):
        n = rng.randint(3, 6)
        edges = [e for e in combinations(range(1, n + 1), 2) if rng.random() < 0.6] or [(1, 2)]
        A = graphic_arrangement(edges)
        L = intersection_lattice(A)
        triangles = {frozenset(t) for t in combinations(range(len(edges)), 3)
                     if len({v for i in t for v in edges[i]}) == 3}
        assert {X.indices for X in L.triple_flats()} == triangles


def test_product_arrangement():
    P = product_arrangement(boolean(2), braid_essential())
    assert P.nvars == 5 and P.size == 8
    assert len(irreducible_components(P)) == 3
