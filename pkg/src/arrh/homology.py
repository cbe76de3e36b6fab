"""Degree-by-degree cohomology of the generator complex J^bullet.

H^i_d = dim J^i_d - rank(delta^i on J^i_d) - rank(delta^(i-1) on J^(i-1)_d),
with J^0 = 0.  Level 1 cohomology is D(A, m) for essential formal A; levels
2..r vanish exactly when (A, m) is free (for essential, totally formal A).
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from itertools import combinations

from . import linalg
from .arrangement import MultiArrangement, essentialize, intersection_lattice
from .complexes import (GradedSubmoduleComplex, build_J_complex, build_S_complex,
                        is_totally_formal)
from .poly import monomial_basis, monomial_index, num_monomials


def _sparse_terms(v):
    """[(entry index, exponent, coefficient)] for a PolyVector."""
    out = []
    for i, p in enumerate(v.entries):
        for e, c in p.terms.items():
            out.append((i, e, c))
    return out


class _DegreeEngine:
    """Ranks of J^k_d and of its image under delta^k, memoised per cell."""

    def __init__(self, J: GradedSubmoduleComplex):
        self.J = J
        self.field = J.field
        self.n = J.nvars
        self._gen_terms = {}
        self._img_terms = {}
        self._offsets = {}
        for k, blocks in J.gens.items():
            self._gen_terms[k] = {key: [(g.degree, _sparse_terms(g)) for g in gl]
                                  for key, gl in blocks.items()}
            imgs = []
            for key, gl in blocks.items():
                for g in gl:
                    comp = J.image(k, key, g)
                    if comp:
                        imgs.append((g.degree, {t: _sparse_terms(v) for t, v in comp.items()}))
            self._img_terms[k] = imgs
        self._dim = {}
        self._rk = {}

    def _block_layout(self, k):
        if k not in self._offsets:
            sizes = self.J.block_sizes(k)
            off, pos = {}, 0
            for key, width in sizes:
                off[key] = (pos, width)
                pos += width
            self._offsets[k] = (off, pos)
        return self._offsets[k]

    def _rows(self, items, d, offset_of):
        """Rows mono * v for each (degree, terms) item, as sparse dicts."""
        idx = monomial_index(self.n, d)
        nd = len(idx)
        rows = []
        for deg, terms in items:
            if deg > d:
                continue
            for mono in monomial_basis(self.n, d - deg):
                row = {}
                for key, (i, e, c) in terms:
                    col = offset_of(key, i) * nd + idx[tuple(a + b for a, b in zip(e, mono))]
                    row[col] = row[col] + c if col in row else c
                rows.append(row)
        return rows

    def dim_J(self, k: int, d: int) -> int:
        """dim of J^k in degree d, summed over flat blocks."""
        if (k, d) in self._dim:
            return self._dim[(k, d)]
        total = 0
        nd = num_monomials(self.n, d)
        for key, gl in self._gen_terms.get(k, {}).items():
            width = len(self.J.gens[k][key][0].entries)
            items = [(deg, [(None, t) for t in terms]) for deg, terms in gl]
            rows = self._rows(items, d, lambda _key, i: i)
            total += linalg.sparse_rank(rows, width * nd, self.field)
        self._dim[(k, d)] = total
        return total

    def rank_delta(self, k: int, d: int) -> int:
        """rank of delta^k restricted to J^k_d."""
        if (k, d) in self._rk:
            return self._rk[(k, d)]
        imgs = self._img_terms.get(k, [])
        if not imgs:
            self._rk[(k, d)] = 0
            return 0
        off, total_width = self._block_layout(k + 1)
        items = []
        for deg, comp in imgs:
            items.append((deg, [(key, t) for key, terms in comp.items() for t in terms]))
        rows = self._rows(items, d, lambda key, i: off[key][0] + i)
        r = linalg.sparse_rank(rows, total_width * num_monomials(self.n, d), self.field)
        self._rk[(k, d)] = r
        return r

    def cohomology(self, k: int, d: int) -> int:
        incoming = self.rank_delta(k - 1, d) if k >= 2 else 0
        return self.dim_J(k, d) - self.rank_delta(k, d) - incoming


@dataclass
class HomologyTable:
    dims: dict                      # (level, degree) -> dim, levels 2..r
    degree_bound: int
    levels: list
    h1: dict = dc_field(default_factory=dict)       # degree -> dim H^1
    j_dims: dict = dc_field(default_factory=dict)   # (level, degree) -> dim J^level_d

    def nonzero(self) -> list:
        return sorted(key for key, v in self.dims.items() if v)

    def first_nonzero(self):
        nz = sorted(self.nonzero(), key=lambda t: (t[1], t[0]))
        return nz[0] if nz else None

    def is_zero(self) -> bool:
        return not self.nonzero()

    def level(self, i: int) -> dict:
        return {d: self.dims[(i, d)] for d in range(self.degree_bound + 1) if (i, d) in self.dims}

    def to_json(self) -> dict:
        return {
            "degree_bound": self.degree_bound,
            "levels": {str(i): {str(d): v for d, v in sorted(self.level(i).items())}
                       for i in self.levels},
            "h1": {str(d): v for d, v in sorted(self.h1.items())},
            "index_note": "level i of J corresponds to H^(i-1) of the derivation complex",
        }


def level_degree_component(J: GradedSubmoduleComplex, k: int, d: int):
    """Basis of J^k_d inside the level-k free module in degree d."""
    n = J.nvars
    nd = num_monomials(n, d)
    out = []
    pos = 0
    for key, width in J.block_sizes(k):
        rows = []
        for g in J.gens.get(k, {}).get(key, []):
            if g.degree > d:
                continue
            for mono in monomial_basis(n, d - g.degree):
                v = g.times_monomial(mono).to_vector(d)
                rows.append(v)
        if rows:
            basis, _ = linalg.rref(rows, J.field, width * nd)
            zero = J.field(0)
            for b in basis:
                out.append([zero] * pos + b + [zero] * 0)
        pos += width * nd
    total = pos
    return [v + [J.field(0)] * (total - len(v)) for v in out]


def _degree_row(args):
    J, d, levels = args
    eng = _DegreeEngine(J)
    return d, {k: eng.cohomology(k, d) for k in levels}, eng.cohomology(1, d), \
        {k: eng.dim_J(k, d) for k in [1] + levels}


def homology_table(J: GradedSubmoduleComplex, d_max: int, stop_at_first: bool = False,
                   jobs: int = 1) -> HomologyTable:
    r = J.scalar.top
    levels = list(range(2, r + 1))
    table = HomologyTable({}, d_max, levels)
    if jobs > 1 and not stop_at_first:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for d, row, h1, jd in pool.map(_degree_row, [(J, d, levels) for d in range(d_max + 1)]):
                for k, v in row.items():
                    table.dims[(k, d)] = v
                table.h1[d] = h1
                for k, v in jd.items():
                    table.j_dims[(k, d)] = v
        return table
    eng = _DegreeEngine(J)
    for d in range(d_max + 1):
        table.h1[d] = eng.cohomology(1, d)
        table.j_dims[(1, d)] = eng.dim_J(1, d)
        for k in levels:
            table.dims[(k, d)] = eng.cohomology(k, d)
            table.j_dims[(k, d)] = eng.dim_J(k, d)
        if stop_at_first and any(table.dims[(k, d)] for k in levels):
            table.degree_bound = d
            break
    return table


def default_dmax(A: MultiArrangement, m=None) -> int:
    m = A.mults if m is None else m
    return sum(m) + A.rank()


@dataclass
class HomologyVerdict:
    status: str                 # "NotFree" | "VanishesUpTo" | "NotFormal"
    level: int | None = None
    degree: int | None = None
    flat: tuple | None = None
    table: HomologyTable | None = None
    degree_bound: int | None = None

    def to_json(self) -> dict:
        out = {"status": self.status, "degree_bound": self.degree_bound}
        if self.level is not None:
            out["level"] = self.level
        if self.degree is not None:
            out["degree"] = self.degree
        if self.flat is not None:
            out["flat"] = [i + 1 for i in self.flat]
        return out


def freeness_by_homology(A: MultiArrangement, m=None, d_max: int | None = None,
                         stop_at_first: bool = True, jobs: int = 1) -> HomologyVerdict:
    if m is not None:
        A = A.with_multiplicities(m)
    if not A.is_essential():
        A = essentialize(A)[0]
    d_max = default_dmax(A) if d_max is None else d_max
    S = build_S_complex(A)
    ok, X, level = is_totally_formal(A, S)
    if not ok:
        return HomologyVerdict("NotFormal", level=level, flat=X.key, degree_bound=d_max)
    J = build_J_complex(A, A.mults, S)
    table = homology_table(J, d_max, stop_at_first=stop_at_first, jobs=jobs)
    hit = table.first_nonzero()
    if hit:
        return HomologyVerdict("NotFree", level=hit[0], degree=hit[1], table=table, degree_bound=d_max)
    return HomologyVerdict("VanishesUpTo", table=table, degree_bound=d_max)


def local_freeness(A: MultiArrangement, m=None):
    """(True, None) or (False, witness flat key): freeness of every proper A_X."""
    from .analyzer import decide_freeness

    if m is not None:
        A = A.with_multiplicities(m)
    L = intersection_lattice(A)
    for k in range(3, L.rank):
        for X in L.flats(k):
            v = decide_freeness(A.select(X.indices))
            if v.status != "Free":
                return False, X.key
    return True, None


def _is_generic(A: MultiArrangement, indices, r) -> bool:
    forms = [list(A.forms[i]) for i in indices]
    for sub in combinations(forms, r):
        if linalg.rank(list(sub), A.field, A.nvars) < r:
            return False
    return True


@dataclass
class PdimBounds:
    lower: int
    upper: int
    heuristic: bool
    witness: tuple | None = None

    def to_json(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "heuristic": self.heuristic,
                "witness_flat": [i + 1 for i in self.witness] if self.witness else None}


def pdim_lower_bound(A: MultiArrangement):
    """max r(X) - 2 over closed generic flats with |A_X| > r(X)."""
    L = intersection_lattice(A)
    best, witness = 0, None
    for k in range(2, L.rank + 1):
        for X in L.flats(k):
            if len(X) > k and k - 2 > best and _is_generic(A, X.key, k):
                best, witness = k - 2, X.key
    return best, witness


def pdim_bounds(A: MultiArrangement, m=None, table: HomologyTable | None = None,
                free: bool | None = None) -> PdimBounds:
    """Projective dimension bounds from closed generic flats and the homology table.

    A nonzero module is given projective dimension l (its largest possible
    value, attained by nonzero finite-length modules).  The upper bound is a
    proof only when the table is known to be complete, which a truncated
    table cannot establish; it is flagged heuristic unless ``free`` is given.
    """
    if m is not None:
        A = A.with_multiplicities(m)
    r = A.rank()
    cap = max(r - 2, 0)
    lower, witness = pdim_lower_bound(A)
    if free:
        return PdimBounds(0, 0, False, None)
    heuristic = True
    upper = cap
    if table is not None:
        ell = r
        nonzero_levels = sorted({i for (i, d), v in table.dims.items() if v})
        if not nonzero_levels:
            upper = 0
        else:
            upper = min(cap, max(ell - i for i in nonzero_levels))
            window = range(max(0, table.degree_bound - ell + 1), table.degree_bound + 1)
            heuristic = not all(table.dims.get((i, d), 0) == 0
                                for i in nonzero_levels for d in window)
            heuristic = heuristic or table.degree_bound < ell
    upper = max(upper, lower)
    return PdimBounds(lower, upper, heuristic, witness)
