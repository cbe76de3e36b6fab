from __future__ import annotations

import random
from itertools import combinations

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from arrh.arrangement import MultiArrangement, essentialize, graphic_arrangement, intersection_lattice
from arrh.complexes import (build_J_complex, build_S_complex, formality_profile, graphic_D_description,
                            is_k_formal, is_totally_formal, relation_space)
from arrh.families import CYCLE_CHORD_EDGES, boolean, cycle_chord, x3, ziegler_pair
from arrh.linalg import QQ
from oracles import brute_rank, pad, random_forms, simplicial_cohomology

K4_EDGES = list(combinations(range(1, 5), 2))
C4_EDGES = [(1, 2), (2, 3), (3, 4), (1, 4)]
WHEEL4_EDGES = [(0, i) for i in range(1, 5)] + C4_EDGES


def pencil(k):
    """k + 2 lines through the origin of the plane."""
    return MultiArrangement(QQ, [(1, 0), (0, 1)] + [(1, j) for j in range(1, k + 1)])


def test_relation_spaces():
    assert relation_space(boolean(3)) == []
    for k in range(1, 5):
        assert len(relation_space(pencil(k))) == k
    S = build_S_complex(x3(2))
    J = build_J_complex(x3(2))
    assert [(sorted(key), w) for key, w in J.block_sizes(2)] == [([0, 1, 3], 1), ([0, 2, 4], 1), ([1, 2, 5], 1)]
    assert S.module_ranks()[2] == 3


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_rank_two_shape(k):
    S = build_S_complex(pencil(k))
    assert S.module_ranks() == [2, k + 2, k]
    assert S.cohomology() == [0, 0, 0]
    assert S.composites_vanish()


def test_ziegler_pair_non_conic_shape():
    A, _ = ziegler_pair(conic=False)
    S = build_S_complex(A)
    assert S.module_ranks()[:3] == [3, 9, 6]
    assert S.cohomology()[1] == 0


def test_ziegler_pair_conic_drops_rank():
    A, _ = ziegler_pair(conic=True)
    S = build_S_complex(A)
    assert S.differential_ranks()[1] == 5
    assert S.cohomology()[1] == 1
    assert not formality_profile(S).is_formal


def test_formality_examples():
    assert formality_profile(build_S_complex(x3(2))).is_formal
    assert build_S_complex(graphic_arrangement(C4_EDGES)).cohomology()[1] != 0
    assert build_S_complex(boolean(3)).cohomology() == [0, 0, 0, 0]
    assert is_totally_formal(graphic_arrangement(K4_EDGES))[0]
    assert is_totally_formal(pencil(3))[0]


def test_wheel_is_k_formal_but_not_totally_formal():
    A = graphic_arrangement(WHEEL4_EDGES)
    S = build_S_complex(A)
    assert all(formality_profile(S).k_formal.values())
    assert all(is_k_formal(A, k, S) for k in range(2, 5))
    ok, X, i = is_totally_formal(A, S)
    assert not ok and X is not None and i >= 1


def test_j_generators_x3():
    J = build_J_complex(x3(2))
    assert J.generator_count(1) == 6
    assert J.generator_count(2) == 9
    assert set(J.to_json()["2"]) == {"124", "135", "236"}


def test_graphic_d_description():
    _, _, d = graphic_D_description([(1, 2), (2, 3), (1, 3)])
    assert sorted(len(s) for s in d) == [2, 2, 2, 3]
    _, _, d = graphic_D_description(K4_EDGES)
    assert sum(1 for s in d if len(s) == 3) == 4
    assert sum(1 for s in d if len(s) == 4) == 1
    assert len(d[(1, 2, 3, 4)]) == 6
    _, _, d = graphic_D_description(CYCLE_CHORD_EDGES)
    assert sorted(s for s in d if len(s) == 3) == [(1, 2, 3), (1, 3, 4)]
    assert not any(len(s) == 4 for s in d)


@pytest.mark.parametrize("A", [x3(2), cycle_chord(), essentialize(graphic_arrangement(K4_EDGES))[0]],
                         ids=["x3", "cycle_chord", "K4"])
def test_euler_characteristic_vanishes(A):
    ranks = build_S_complex(A).module_ranks()
    assert sum((-1) ** k * r for k, r in enumerate(ranks)) == 0


def test_restriction_matches_localization():
    A = x3(2)
    S = build_S_complex(A)
    L = S.lattice
    for X in L.flats(2) + L.flats(3):
        R = S.restrict(X)
        B = build_S_complex(A.select(X.key))
        assert R.module_ranks() == B.module_ranks()
        assert R.cohomology() == B.cohomology()


def test_json_shape():
    data = build_S_complex(x3(2)).to_json()
    assert data["module_ranks"] == [3, 6, 3, 0]
    assert len(data["differentials"]) == 3


def _random_arrangement(seed):
    rng = random.Random(seed)
    ell = rng.randint(2, 4)
    return MultiArrangement(QQ, random_forms(rng, ell, rng.randint(ell, 7)))


@given(st.integers(0, 10 ** 6))
@settings(max_examples=25, deadline=None)
def test_differentials_compose_to_zero(seed):
    A = _random_arrangement(seed)
    assert build_S_complex(A).composites_vanish()


@given(st.integers(0, 10 ** 6), st.integers(0, 100))
@settings(max_examples=25, deadline=None)
def test_random_relation_basis_keeps_cohomology(seed, basis_seed):
    A = _random_arrangement(seed)
    assert build_S_complex(A, seed=basis_seed).cohomology() == build_S_complex(A).cohomology()
    assert build_S_complex(A, seed=basis_seed).composites_vanish()


@given(st.integers(0, 10 ** 6))
@settings(max_examples=25, deadline=None)
def test_first_cohomology_counts_missing_relations(seed):
    """H^1 = dim F(A) minus the span of relations supported on rank-2 flats."""
    A = _random_arrangement(seed)
    L = intersection_lattice(A)
    forms = [list(f) for f in A.forms]
    n = A.size
    total = n - brute_rank(forms)
    local = []
    for X in L.flats(2):
        idx = sorted(X.indices)
        if len(idx) < 3:
            continue
        # dependencies among the forms of X, embedded in Q^n
        M = sympy.Matrix([forms[i] for i in idx]).T
        for v in M.nullspace():
            row = [0] * n
            for i, c in zip(idx, v):
                row[i] = c
            local.append(row)
    spanned = brute_rank(local) if local else 0
    assert build_S_complex(A).cohomology()[1] == total - spanned


def test_graphic_equivalence_random_graphs():
    rng = random.Random(5)
    for _ in range(6):
        n = rng.randint(3, 6)
        edges = [e for e in combinations(range(1, n + 1), 2) if rng.random() < 0.55] or [(1, 2)]
        verts = sorted({v for e in edges for v in e})
        got, want = pad(build_S_complex(graphic_arrangement(edges)).cohomology(),
                        simplicial_cohomology(verts, edges))
        assert got == want
