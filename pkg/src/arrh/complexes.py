"""The scalar complex S^bullet and the generator complex J^bullet.

Level k of S has one block per flat of rank k.  Level 0 is the ambient
coordinate space, level 1 has one coordinate per hyperplane, and for k >= 1
the rows of delta^k belonging to a flat X of rank k+1 are a row-reduced
basis of the linear relations among the rows of delta^(k-1) that belong to
flats of rank k below X.

J^k sits inside S^k tensored with the polynomial ring.  Level 1 is generated
by the powers alpha_H^m(H); each flat X of rank k+1 receives the images of
the level-k generators of the flats below it.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import linalg
from .arrangement import Flat, IntersectionLattice, MultiArrangement, intersection_lattice
from .poly import PolyVector


class ScalarComplex:
    """Block-structured scalar matrices delta^0, ..., delta^(r-1)."""

    def __init__(self, A: MultiArrangement, L: IntersectionLattice, levels, row_blocks, flats):
        self.arrangement = A
        self.lattice = L
        self.field = A.field
        self.levels = levels            # levels[k] = rows of delta^k
        self.row_blocks = row_blocks    # row_blocks[k][flat key] = (start, stop)
        self.flats = flats              # flats[k] = flats of rank k with a block (k >= 1)

    @property
    def top(self) -> int:
        return len(self.levels)

    def module_ranks(self) -> list[int]:
        """rank of S^k for k = 0 .. r."""
        ranks = [self.arrangement.nvars]
        for rows in self.levels:
            ranks.append(len(rows))
        return ranks

    def col_blocks(self, k: int) -> dict:
        if k == 0:
            return {frozenset(): (0, self.arrangement.nvars)}
        return self.row_blocks[k - 1]

    def ncols(self, k: int) -> int:
        return self.module_ranks()[k]

    def differential_ranks(self) -> list[int]:
        out = []
        for k, rows in enumerate(self.levels):
            out.append(linalg.rank(rows, self.field, self.ncols(k)) if rows else 0)
        return out

    def cohomology(self) -> list[int]:
        """dim H^i of the scalar complex for i = 0 .. r."""
        ranks = self.module_ranks()
        dr = self.differential_ranks()
        out = []
        for i, n in enumerate(ranks):
            outgoing = dr[i] if i < len(dr) else 0
            incoming = dr[i - 1] if i >= 1 else 0
            out.append(n - outgoing - incoming)
        return out

    def block(self, k: int, X: Flat, Y: Flat):
        """Submatrix of delta^k with rows of X (rank k+1) and columns of Y (rank k)."""
        r0, r1 = self.row_blocks[k][X.indices]
        c0, c1 = self.col_blocks(k)[Y.indices]
        return [row[c0:c1] for row in self.levels[k][r0:r1]]

    def composites_vanish(self) -> bool:
        for k in range(1, len(self.levels)):
            A, B = self.levels[k], self.levels[k - 1]
            if A and B and not linalg.is_zero_matrix(linalg.matmul(A, B, self.field)):
                return False
        return True

    def restrict(self, X: Flat) -> "ScalarComplex":
        """The sub-complex of flats below X, which is S^bullet of A_X."""
        levels, row_blocks, flats = [], [], []
        keep_cols = list(range(self.arrangement.nvars))
        for k, rows in enumerate(self.levels):
            if k + 1 > X.rank:
                break
            new_rows = []
            blocks = {}
            kept = []
            keep_rows = []
            for F in self.flats[k + 1]:
                if F.indices <= X.indices:
                    r0, r1 = self.row_blocks[k][F.indices]
                    blocks[F.indices] = (len(keep_rows), len(keep_rows) + r1 - r0)
                    keep_rows.extend(range(r0, r1))
                    kept.append(F)
            for i in keep_rows:
                row = rows[i]
                new_rows.append([row[j] for j in keep_cols])
            levels.append(new_rows)
            row_blocks.append(blocks)
            flats.append(kept)
            keep_cols = keep_rows
        return ScalarComplex(self.arrangement, self.lattice, levels, row_blocks, [None] + flats)

    def to_json(self) -> dict:
        f = self.field
        return {
            "module_ranks": self.module_ranks(),
            "differentials": [
                {
                    "level": k,
                    "rows": [[f.to_str(x) for x in row] for row in rows],
                    "row_blocks": {Flat(key, k + 1).label(): list(span)
                                   for key, span in self.row_blocks[k].items()},
                }
                for k, rows in enumerate(self.levels)
            ],
        }


def relation_space(A: MultiArrangement):
    """Rows spanning F(A) = kernel of e_H -> alpha_H, row reduced."""
    rows = [list(f) for f in A.forms]
    ker = linalg.left_kernel(rows, A.field, A.nvars)
    if not ker:
        return []
    return linalg.rref(ker, A.field, A.size)[0]


def _canonical_relations(vectors, field, ncols, randomize=None):
    ker = linalg.left_kernel(vectors, field, ncols)
    if not ker:
        return []
    if randomize is not None:
        # an arbitrary invertible change of basis of the relation space
        n = len(ker)
        while True:
            T = [[field(randomize.randint(-5, 5)) for _ in range(n)] for _ in range(n)]
            if linalg.rank(T, field, n) == n:
                break
        return linalg.matmul(T, ker, field)
    return linalg.rref(ker, field, len(vectors))[0]


def build_S_complex(A: MultiArrangement, L: IntersectionLattice | None = None,
                    seed: int | None = None) -> ScalarComplex:
    """Scalar complex with canonical relation bases.

    ``seed`` replaces each canonical block basis by a random basis of the same
    relation space; cohomology must not change (used in tests).
    """
    L = L or intersection_lattice(A)
    field = A.field
    rng = random.Random(seed) if seed is not None else None
    levels = [[list(f) for f in A.forms]]
    row_blocks = [{frozenset([i]): (i, i + 1) for i in range(A.size)}]
    flats = [None, L.flats(1)]
    for k in range(1, L.rank):
        prev_rows = levels[k - 1]
        prev_blocks = row_blocks[k - 1]
        ncols = len(prev_rows)
        rows, blocks, kept = [], {}, []
        for X in L.flats(k + 1):
            idx = []
            for Y in L.flats(k):
                if Y.indices < X.indices and Y.indices in prev_blocks:
                    r0, r1 = prev_blocks[Y.indices]
                    idx.extend(range(r0, r1))
            if not idx:
                continue
            vecs = [prev_rows[i] for i in idx]
            width = len(vecs[0])
            rels = _canonical_relations(vecs, field, width, rng)
            if not rels:
                continue
            start = len(rows)
            zero = field(0)
            for c in rels:
                row = [zero] * ncols
                for j, cj in zip(idx, c):
                    row[j] = cj
                rows.append(row)
            blocks[X.indices] = (start, len(rows))
            kept.append(X)
        levels.append(rows)
        row_blocks.append(blocks)
        flats.append(kept)
    return ScalarComplex(A, L, levels, row_blocks, flats)


@dataclass
class FormalityProfile:
    module_ranks: list
    differential_ranks: list
    cohomology: list
    is_essential: bool
    k_formal: dict          # k -> bool for 2 <= k <= r

    @property
    def is_formal(self) -> bool:
        return self.k_formal.get(2, True)

    def to_json(self) -> dict:
        return {
            "module_ranks": self.module_ranks,
            "differential_ranks": self.differential_ranks,
            "cohomology": self.cohomology,
            "is_essential": self.is_essential,
            "k_formal": {str(k): v for k, v in self.k_formal.items()},
        }


def formality_profile(S: ScalarComplex, rank: int | None = None) -> FormalityProfile:
    coh = S.cohomology()
    r = len(S.levels) if rank is None else rank
    flags = {}
    for k in range(2, r + 1):
        flags[k] = all(coh[i] == 0 for i in range(1, k))
    return FormalityProfile(S.module_ranks(), S.differential_ranks(), coh, coh[0] == 0, flags)


def is_k_formal(A: MultiArrangement, k: int, S: ScalarComplex | None = None) -> bool:
    S = S or build_S_complex(A)
    coh = S.cohomology()
    return all(coh[i] == 0 for i in range(1, min(k, len(coh))))


def is_totally_formal(A: MultiArrangement, S: ScalarComplex | None = None):
    """(True, None, None) or (False, failing flat, failing cohomology index)."""
    S = S or build_S_complex(A)
    L = S.lattice
    for k in range(3, L.rank + 1):
        for X in L.flats(k):
            coh = S.restrict(X).cohomology()
            for i in range(1, X.rank):
                if coh[i]:
                    return False, X, i
    return True, None, None


# ---------------------------------------------------------------------------
# the generator complex J


class GradedSubmoduleComplex:
    """Generators of J^k, k = 1 .. r, stored per flat block."""

    def __init__(self, S: ScalarComplex, mults):
        self.scalar = S
        self.mults = tuple(mults)
        A = S.arrangement
        self.arrangement = A
        self.field = A.field
        self.nvars = A.nvars
        # gens[k][flat key] = list of PolyVector, for k = 1 .. r
        self.gens = {1: {}}
        for i, m in enumerate(self.mults):
            self.gens[1][frozenset([i])] = [PolyVector([A.form_poly(i) ** m], m)]
        for k in range(1, S.top):
            nxt = {}
            for X in S.flats[k + 1]:
                out = []
                for Y in S.flats[k]:
                    if not Y.indices < X.indices:
                        continue
                    B = S.block(k, X, Y)
                    for g in self.gens[k].get(Y.indices, []):
                        v = g.apply_matrix(B)
                        if not v.is_zero():
                            out.append(v)
                if out:
                    nxt[X.indices] = out
            self.gens[k + 1] = nxt

    @property
    def top(self) -> int:
        return max(self.gens)

    def block_sizes(self, k: int) -> list[tuple]:
        """(flat key, block width) for level k in S-order."""
        S = self.scalar
        if k == 0:
            return [(frozenset(), S.arrangement.nvars)]
        return [(F.indices, b - a) for F in S.flats[k]
                for a, b in [S.row_blocks[k - 1][F.indices]]]

    def generator_count(self, k: int) -> int:
        return sum(len(v) for v in self.gens.get(k, {}).values())

    def image(self, k: int, key, g: PolyVector) -> dict:
        """delta^k applied to a level-k generator in block ``key``: {target key: PolyVector}."""
        S = self.scalar
        out = {}
        if k >= S.top:
            return out
        Y = S.lattice.flat(key)
        for X in S.flats[k + 1]:
            if key < X.indices:
                v = g.apply_matrix(S.block(k, X, Y))
                if not v.is_zero():
                    out[X.indices] = v
        return out

    def to_json(self) -> dict:
        names = self.arrangement.names
        return {
            str(k): {
                Flat(key, k).label(): [[p.to_str(names) for p in g.entries] for g in gl]
                for key, gl in blocks.items()
            }
            for k, blocks in sorted(self.gens.items())
        }


def build_J_complex(A: MultiArrangement, m=None, S: ScalarComplex | None = None) -> GradedSubmoduleComplex:
    S = S or build_S_complex(A)
    return GradedSubmoduleComplex(S, A.mults if m is None else m)


def graphic_D_description(edges, mults=None, field=None):
    """For each simplex of the clique complex, the powered forms generating J(sigma)."""
    from .arrangement import clique_complex, graph_vertices, graphic_arrangement
    from .linalg import QQ

    field = field or QQ
    edges = [tuple(e) for e in edges]
    A = graphic_arrangement(edges, mults, field)
    vs = graph_vertices(edges)
    edge_index = {frozenset(e): i for i, e in enumerate(edges)}
    out = {}
    for level in clique_complex(edges)[1:]:
        for simplex in level:
            gens = []
            for a in range(len(simplex)):
                for b in range(a + 1, len(simplex)):
                    i = edge_index[frozenset((simplex[a], simplex[b]))]
                    gens.append(A.form_poly(i) ** A.mults[i])
            out[simplex] = gens
    return A, vs, out
