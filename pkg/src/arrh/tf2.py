"""Arrangements whose scalar complex stops at level 2 (TF2 arrangements).

Here freeness is combinatorial: a simple TF2 arrangement is free exactly when
it has r - 1 triple points, and free multiplicities are classified through
the reduced codimension-two incidence graph (a tree when A is free, a
graph with one cycle when |A| = sum(|A_X| - 1)).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import combinations

import networkx as nx

from . import linalg
from .arrangement import (MultiArrangement, essentialize, intersection_lattice,
                          is_irreducible, restriction)
from .complexes import build_J_complex, build_S_complex, is_totally_formal
from .derivations import Derivation, DerivationSolver, free_basis_search, rank2_exponents
from .families import arrt, xrt
from .poly import Poly, monomial_basis, monomial_index, num_monomials


class NotTF2(ValueError):
    """Raised when an operation needs a (free / irreducible) TF2 arrangement."""


class TotallyNonFree(ValueError):
    """More triple points than the rank: no multiplicity is free."""

    def __init__(self, rank, triples):
        super().__init__(f"rank {rank} < {triples} triple points: totally non-free")
        self.rank = rank
        self.triples = triples


def triple_flats(A: MultiArrangement, L=None):
    L = L or intersection_lattice(A)
    return L.triple_flats()


def is_TF2(A: MultiArrangement, S=None) -> bool:
    """Totally formal with every scalar level above 2 equal to zero."""
    if not A.is_essential():
        A = essentialize(A)[0]
    S = S or build_S_complex(A)
    if any(S.module_ranks()[3:]):
        return False
    return is_totally_formal(A, S)[0]


def _require_irreducible_tf2(A: MultiArrangement):
    if not A.is_essential():
        A = essentialize(A)[0]
    if not is_irreducible(A):
        raise NotTF2("arrangement is not irreducible")
    if not is_TF2(A):
        raise NotTF2("arrangement is not TF2")
    return A


@dataclass
class Tf2Combinatorics:
    size: int
    rank: int
    triples: int
    sum_excess: int                 # sum over triple flats of |A_X| - 1
    identity_holds: bool            # |A| = r - #T + sum(|A_X| - 1)
    bound_holds: bool               # |A| <= 1 + sum(|A_X| - 1)
    free: bool
    supersolvable: bool
    h2_degree1: int                 # sum(|A_X| - 1) - |A| + 1

    def to_json(self) -> dict:
        return dict(self.__dict__)


def tf2_freeness_combinatorial(A: MultiArrangement) -> Tf2Combinatorics:
    A = _require_irreducible_tf2(A)
    L = intersection_lattice(A)
    T = L.triple_flats()
    r = L.rank
    excess = sum(len(X) - 1 for X in T)
    free = len(T) == r - 1
    ss = False
    if free:
        ss = supersolvable_filtration(A).verified
    return Tf2Combinatorics(A.size, r, len(T), excess, A.size == r - len(T) + excess,
                            A.size <= 1 + excess, free, ss, excess - A.size + 1)


@dataclass
class Filtration:
    flats: list                     # keys of X_1 .. X_(r-1)
    steps: list                     # index sets A_1 .. A_r
    rank_property: bool
    intersection_property: bool

    @property
    def verified(self) -> bool:
        return self.rank_property and self.intersection_property

    def to_json(self) -> dict:
        return {"flats": [[i + 1 for i in k] for k in self.flats],
                "steps": [sorted(i + 1 for i in s) for s in self.steps],
                "rank_property": self.rank_property,
                "intersection_property": self.intersection_property}


def _check_filtration(A, L, steps):
    rp = all(linalg.rank([list(A.forms[i]) for i in s], A.field, A.nvars) == k + 1
             for k, s in enumerate(steps))
    ip = True
    for k in range(1, len(steps)):
        new = steps[k] - steps[k - 1]
        for h1, h2 in combinations(sorted(new), 2):
            if not (L.closure([h1, h2]).indices & steps[k - 1]):
                ip = False
    return rp, ip and steps[-1] == frozenset(range(A.size))


def supersolvable_filtration(A: MultiArrangement) -> Filtration:
    """Order the triple flats so each meets the union of the earlier ones."""
    if not A.is_essential():
        A = essentialize(A)[0]
    L = intersection_lattice(A)
    T = L.triple_flats()
    r = L.rank
    if len(T) != r - 1:
        raise NotTF2("supersolvable filtration needs exactly r - 1 triple flats")

    def extend(order, covered):
        if len(order) == len(T):
            return order
        for X in T:
            if X in order or not (X.indices & covered):
                continue
            got = extend(order + [X], covered | X.indices)
            if got:
                return got
        return None

    for X1 in T:
        order = extend([X1], X1.indices)
        if not order:
            continue
        steps = [frozenset([min(X1.indices)]), X1.indices]
        for X in order[1:]:
            steps.append(steps[-1] | X.indices)
        rp, ip = _check_filtration(A, L, steps)
        if rp and ip:
            return Filtration([X.key for X in order], steps, rp, ip)
    raise NotTF2("no supersolvable ordering of the triple flats")


# ---------------------------------------------------------------------------
# incidence graphs


@dataclass
class IncidenceGraph:
    full: nx.Graph
    reduced: nx.Graph

    @property
    def is_tree(self) -> bool:
        return self.reduced.number_of_nodes() > 0 and nx.is_tree(self.reduced)

    def cycles(self) -> list:
        return nx.cycle_basis(self.reduced)

    def unique_cycle(self):
        """The cycle as an alternating list [H_0, X_0, H_1, X_1, ...] or None."""
        cyc = self.cycles()
        if len(cyc) != 1:
            return None
        c = cyc[0]
        start = next(i for i, v in enumerate(c) if v[0] == "H")
        return c[start:] + c[:start]

    def to_json(self) -> dict:
        def name(v):
            return v[1] + 1 if v[0] == "H" else "X" + "".join(str(i + 1) for i in v[1])

        return {
            "edges": sorted([sorted([str(name(u)), str(name(v))]) for u, v in self.full.edges]),
            "reduced_edges": sorted([sorted([str(name(u)), str(name(v))]) for u, v in self.reduced.edges]),
            "is_tree": self.is_tree,
            "cycle": [str(name(v)) for v in (self.unique_cycle() or [])],
        }


def incidence_graphs(A: MultiArrangement, L=None) -> IncidenceGraph:
    L = L or intersection_lattice(A)
    G = nx.Graph()
    for X in L.triple_flats():
        G.add_node(("X", X.key))
        for h in X.key:
            G.add_edge(("X", X.key), ("H", h))
    R = G.copy()
    R.remove_nodes_from([v for v in G if v[0] == "H" and G.degree(v) <= 1])
    return IncidenceGraph(G, R)


# ---------------------------------------------------------------------------
# rank-2 generators of the closed subarrangements


def lift_derivation(theta: Derivation, basis, pivots, nvars: int) -> Derivation:
    """Lift a derivation of an essentialization back to the ambient coordinates.

    The essential coordinates are the linear forms ``basis`` (row reduced
    with pivots ``pivots``); the lift acts on the pivot variables only.
    """
    field = theta.field
    images = [Poly.linear(field, list(b)) for b in basis]
    coeffs = [Poly(field, nvars) for _ in range(nvars)]
    for k, p in enumerate(pivots):
        coeffs[p] = theta.coeffs[k].substitute_linear(images)
    return Derivation(coeffs, theta.degree)


def rank2_generators(A: MultiArrangement, indices):
    """The two non-trivial basis derivations of the closed subarrangement on ``indices``, lifted."""
    sub = A.select(indices)
    ess, basis, piv = essentialize(sub)
    res = free_basis_search(ess)
    if not res.free:
        raise ArithmeticError("rank-2 subarrangement without a basis")
    gens = sorted(res.basis, key=lambda t: t.degree)
    return [lift_derivation(t, basis, piv, A.nvars) for t in gens]


# ---------------------------------------------------------------------------
# Thm: free multiplicities on free TF2 arrangements (orientations of a tree)


@dataclass
class Tf2Classification:
    status: str                                 # "Free" | "NotFree"
    route: str                                  # "tree" | "cycle"
    witness: dict = dc_field(default_factory=dict)

    @property
    def free(self) -> bool:
        return self.status == "Free"

    def to_json(self) -> dict:
        return {"status": self.status, "route": self.route, "witness": self.witness}


def _char0(A):
    if A.field.characteristic:
        raise ValueError("the TF2 multiplicity classifiers are stated in characteristic 0")


def classify_free_tf2_multiplicity(A: MultiArrangement, m=None) -> Tf2Classification:
    """Free iff some root flat orients the reduced tree so that every edge
    H -> X has m(H) among the exponents of (A_X, m_X)."""
    if m is not None:
        A = A.with_multiplicities(m)
    _char0(A)
    A = _require_irreducible_tf2(A)
    L = intersection_lattice(A)
    if len(L.triple_flats()) != L.rank - 1:
        raise NotTF2("the underlying arrangement is not free")
    G = incidence_graphs(A, L)
    if not G.is_tree:
        raise NotTF2("reduced incidence graph is not a tree")
    exps = {X.key: rank2_exponents(A.select(X.key)) for X in L.triple_flats()}
    tried = []
    for root in sorted(v for v in G.reduced if v[0] == "X"):
        bad = None
        directed = []
        for parent, child in nx.bfs_edges(G.reduced, root):
            if parent[0] == "H":
                h, X = parent[1], child[1]
                ok = A.mults[h] in exps[X]
                directed.append([h + 1, [i + 1 for i in X], A.mults[h], list(exps[X]), ok])
                if not ok and bad is None:
                    bad = (h, X)
        if bad is None:
            return Tf2Classification("Free", "tree", {
                "root": [i + 1 for i in root[1]], "edges": directed,
                "exponents": {"".join(map(str, (i + 1 for i in k))): list(v) for k, v in exps.items()}})
        tried.append({"root": [i + 1 for i in root[1]], "fails_at": [bad[0] + 1, [i + 1 for i in bad[1]]]})
    return Tf2Classification("NotFree", "tree", {"orientations": tried})


# ---------------------------------------------------------------------------
# Thm: free multiplicities on TF2 arrangements whose graph has one cycle


def classify_nonfree_tf2_multiplicity(A: MultiArrangement, m=None) -> Tf2Classification:
    """Cycle conditions: m = 1 off the cycle, m = n on it, and per cycle flat
    X_i every extra form is alpha_i + beta alpha_(i+1) with B_i = (-beta)^(n-1)
    constant; free iff additionally prod B_i != 1."""
    if m is not None:
        A = A.with_multiplicities(m)
    _char0(A)
    A = _require_irreducible_tf2(A)
    L = intersection_lattice(A)
    T = L.triple_flats()
    r = L.rank
    if len(T) > r:
        raise TotallyNonFree(r, len(T))
    if len(T) != r:
        raise NotTF2("the cycle classifier needs exactly r triple flats")
    G = incidence_graphs(A, L)
    cyc = G.unique_cycle()
    if cyc is None:
        raise NotTF2("reduced incidence graph does not have a unique cycle")
    hs = [v[1] for v in cyc[0::2]]
    xs = [v[1] for v in cyc[1::2]]
    k = len(hs)
    mults = A.mults
    detail = {"cycle_hyperplanes": [h + 1 for h in hs],
              "cycle_flats": [[i + 1 for i in X] for X in xs]}
    off = [i for i in range(A.size) if i not in hs and mults[i] != 1]
    if off:
        detail["failed"] = "multiplicity off the cycle is not 1"
        detail["hyperplanes"] = [i + 1 for i in off]
        return Tf2Classification("NotFree", "cycle", detail)
    ns = {mults[h] for h in hs}
    if len(ns) != 1:
        detail["failed"] = "multiplicities on the cycle are not constant"
        return Tf2Classification("NotFree", "cycle", detail)
    n = ns.pop()
    detail["n"] = n
    field = A.field
    Bs = []
    for i in range(k):
        X = xs[i]
        a, b = A.forms[hs[i]], A.forms[hs[(i + 1) % k]]
        vals = set()
        for h in X:
            if h in (hs[i], hs[(i + 1) % k]):
                continue
            # solve alpha_h = c (a + beta b)
            sol = linalg.solve(linalg.transpose([list(a), list(b)]), list(A.forms[h]), field, 2)
            c, cb = sol
            beta = cb / c
            vals.add((-beta) ** (n - 1))
        if len(vals) != 1:
            detail["failed"] = "B is not constant on a cycle flat"
            detail["flat"] = [j + 1 for j in X]
            detail["B_values"] = sorted(field.to_str(v) for v in vals)
            return Tf2Classification("NotFree", "cycle", detail)
        Bs.append(vals.pop())
    prod = field(1)
    for B in Bs:
        prod = prod * B
    detail["B"] = [field.to_str(B) for B in Bs]
    detail["product"] = field.to_str(prod)
    if prod == 1:
        detail["failed"] = "product of the B_i equals 1"
        return Tf2Classification("NotFree", "cycle", detail)
    return Tf2Classification("Free", "cycle", detail)


# ---------------------------------------------------------------------------
# presentation of H^2 for TF2 arrangements


def _graded_rank(columns, col_degrees, row_degrees, d, field, nvars):
    """rank in degree d of the map whose column j (a list of Polys) sits in degree col_degrees[j]."""
    offsets, pos = [], 0
    for t in row_degrees:
        offsets.append(pos)
        pos += num_monomials(nvars, d - t)
    rows = []
    for col, s in zip(columns, col_degrees):
        if d < s:
            continue
        for mono in monomial_basis(nvars, d - s):
            row = {}
            for i, p in enumerate(col):
                if not p.terms:
                    continue
                idx = monomial_index(nvars, d - row_degrees[i])
                for e, c in p.terms.items():
                    j = offsets[i] + idx[tuple(a + b for a, b in zip(e, mono))]
                    row[j] = row[j] + c if j in row else c
            rows.append(row)
    return linalg.sparse_rank(rows, pos, field), pos


@dataclass
class Tf2Presentation:
    arrangement: MultiArrangement
    kappa: int
    edges: list                     # [(flat key, h)]
    columns: list                   # labels: ("H", h) | ("theta", key) | ("psi", key)
    matrix: list                    # matrix[row][col] Poly
    col_degrees: list
    row_degrees: list
    generator_degrees: dict         # flat key -> (deg theta, deg psi)

    def coker_dims(self, d_max: int) -> dict:
        A = self.arrangement
        cols = [[self.matrix[i][j] for i in range(len(self.edges))] for j in range(len(self.columns))]
        out = {}
        for d in range(d_max + 1):
            rk, total = _graded_rank(cols, self.col_degrees, self.row_degrees, d, A.field, A.nvars)
            out[d] = total - rk
        return out

    def to_json(self, d_max: int | None = None) -> dict:
        names = self.arrangement.names

        def lab(c):
            return c[0] + "_" + (str(c[1] + 1) if c[0] == "H" else "".join(str(i + 1) for i in c[1]))

        out = {
            "kappa": self.kappa,
            "rows": [["".join(str(i + 1) for i in X), h + 1] for X, h in self.edges],
            "columns": [lab(c) for c in self.columns],
            "matrix": [[p.to_str(names) for p in row] for row in self.matrix],
            "generator_degrees": {"".join(str(i + 1) for i in k): list(v)
                                  for k, v in self.generator_degrees.items()},
        }
        if d_max is not None:
            out["coker_dims"] = {str(d): v for d, v in self.coker_dims(d_max).items()}
        return out


def h2_presentation(A: MultiArrangement, m=None) -> Tf2Presentation:
    """Matrix M with coker M = H^2 of the generator complex.

    Rows are the incidences [X, H] (H < X, X a triple flat), in degree m(H).
    Column [H] has 1 on every row [X, H]; columns (X, theta) and (X, psi)
    carry theta(alpha_H) / alpha_H^m(H) on the rows of X, for the two basis
    derivations of (A_X, m_X).
    """
    if m is not None:
        A = A.with_multiplicities(m)
    A = _require_irreducible_tf2(A)
    if A.rank() < 3:
        raise NotTF2("rank at least 3 required")
    L = intersection_lattice(A)
    T = L.triple_flats()
    field, n = A.field, A.nvars
    edges = [(X.key, h) for X in T for h in X.key]
    columns = [("H", h) for h in range(A.size)]
    col_deg = list(A.mults)
    gen_deg = {}
    gen_cols = []
    for X in T:
        thetas = rank2_generators(A, X.key)
        gen_deg[X.key] = tuple(t.degree for t in thetas)
        for name, t in zip(("theta", "psi"), thetas):
            columns.append((name, X.key))
            col_deg.append(t.degree)
            gen_cols.append((X.key, t))
    zero = Poly(field, n)
    one = Poly.const(field, n, 1)
    matrix = []
    for X, h in edges:
        row = [one if c == ("H", h) else zero for c in columns[:A.size]]
        for key, t in gen_cols:
            if key != X:
                row.append(zero)
                continue
            v = t.apply(A.forms[h])
            q = v
            for _ in range(A.mults[h]):
                q = q.div_linear(A.forms[h]) if q.terms else q
            row.append(q)
        matrix.append(row)
    kappa = sum(len(X) for X in T) - A.size
    return Tf2Presentation(A, kappa, edges, columns, matrix, col_deg,
                           [A.mults[h] for _, h in edges], gen_deg)


# ---------------------------------------------------------------------------
# rank-4 interval scan


def interval_obstruction_scan(B: MultiArrangement) -> list[dict]:
    """Intervals [X, Y] with r(Y) - r(X) = 3 that certify B is not free.

    For X = 0 the closed subarrangement B_Y is simple, so an irreducible TF2
    B_Y with more than r - 1 triple points is already non-free, and freeness
    passes to localizations.  For X a hyperplane the restriction carries
    Ziegler multiplicities, so only a totally non-free (B_Y)^X, with more
    triple points than rank, obstructs.
    """
    if B.rank() != 4:
        raise ValueError("rank-4 arrangement required")
    B = B.simple()
    L = intersection_lattice(B)
    hits = []
    for k in (0, 1):
        for Y in L.flats(k + 3):
            BY = B.select(Y.key)
            pos = {h: i for i, h in enumerate(Y.key)}
            LY = intersection_lattice(BY)
            for X in L.flats(k):
                if not X.indices <= Y.indices:
                    continue
                if k == 0:
                    A = essentialize(BY)[0]
                else:
                    A = restriction(BY, LY.flat(pos[h] for h in X.key), LY)
                    A = essentialize(A)[0]
                if A.rank() != 3:
                    continue
                T = intersection_lattice(A).triple_flats()
                bound = 2 if k == 0 else 3
                if len(T) > bound and is_irreducible(A) and is_TF2(A):
                    hits.append({"X": [i + 1 for i in X.key], "Y": [i + 1 for i in Y.key],
                                 "triples": len(T), "rank": 3,
                                 "kind": "localization" if k == 0 else "restriction"})
    return hits


# ---------------------------------------------------------------------------
# the A_{r,t} / X_{r,t} family


def xrt_family(r: int, t):
    """(A_{r,t}, its Ziegler restriction to x0 = 0 with multiplicities)."""
    from .arrangement import ziegler_restriction

    A = arrt(r, t)
    return A, ziegler_restriction(A, 0)


def xrt_report(r: int, t, d_max: int | None = None, decide: bool = True) -> dict:
    from .analyzer import decide_freeness
    from .homology import homology_table

    A, Z = xrt_family(r, t)
    X = xrt(r, t)
    out = {"r": r, "t": A.field.to_str(A.field(t))}
    try:
        cls = classify_nonfree_tf2_multiplicity(Z)
        out["restriction_classifier"] = cls.to_json()
    except (NotTF2, TotallyNonFree) as exc:
        out["restriction_classifier"] = {"status": "NotApplicable", "reason": str(exc)}
    if decide:
        out["arrangement_verdict"] = decide_freeness(A).to_json()
    d_gen = 4 if d_max is None else d_max
    solver = DerivationSolver(X)
    degs = []
    for d in range(d_gen + 1):
        degs.extend(t.degree for t in solver.new_generators(d))
    out["restriction_generator_degrees"] = sorted(degs)
    J = build_J_complex(X)
    d_h = (X.total_multiplicity + r) if d_max is None else d_max
    table = homology_table(J, d_h)
    out["restriction_h2"] = {str(d): table.dims.get((2, d), 0) for d in range(d_h + 1)}
    out["degree_bound"] = d_h
    return out


# ---------------------------------------------------------------------------
# rank-3 complex built from the rank-2 generators (non-TF2 inputs)


def _graded_kernel(columns, col_degrees, row_degrees, d_max, field, nvars):
    """Per degree, the kernel of the map in source coordinates and its new generators."""
    kernels = {}
    new = {}
    for d in range(d_max + 1):
        src_off, pos = [], 0
        for s in col_degrees:
            src_off.append(pos)
            pos += num_monomials(nvars, d - s)
        tgt_off, tpos = [], 0
        for t in row_degrees:
            tgt_off.append(tpos)
            tpos += num_monomials(nvars, d - t)
        # matrix with one column per source monomial; solve for its kernel
        eqs = [dict() for _ in range(tpos)]
        for j, (col, s) in enumerate(zip(columns, col_degrees)):
            if d < s:
                continue
            for a, mono in enumerate(monomial_basis(nvars, d - s)):
                for i, p in enumerate(col):
                    if not p.terms:
                        continue
                    idx = monomial_index(nvars, d - row_degrees[i])
                    for e, c in p.terms.items():
                        rr = tgt_off[i] + idx[tuple(x + y for x, y in zip(e, mono))]
                        eqs[rr][src_off[j] + a] = eqs[rr].get(src_off[j] + a, field(0)) + c
        if pos == 0:
            kernels[d] = ([], [])
            new[d] = []
            continue
        ker = linalg.sparse_nullspace(eqs, pos, field) if tpos else [
            [field(int(i == j)) for i in range(pos)] for j in range(pos)]
        R, piv = linalg.rref(ker, field, pos) if ker else ([], [])
        kernels[d] = (R, piv)
        # generators: modulo x_k * (kernel in degree d - 1)
        prods = []
        if d >= 1 and kernels[d - 1][0]:
            lo_off, lpos = [], 0
            for s in col_degrees:
                lo_off.append(lpos)
                lpos += num_monomials(nvars, d - 1 - s)
            for k in range(nvars):
                for v in kernels[d - 1][0]:
                    w = [field(0)] * pos
                    for j, s in enumerate(col_degrees):
                        if d - 1 < s:
                            continue
                        lo = monomial_basis(nvars, d - 1 - s)
                        hi_idx = monomial_index(nvars, d - s)
                        for a, e in enumerate(lo):
                            c = v[lo_off[j] + a]
                            if c:
                                f = e[:k] + (e[k] + 1,) + e[k + 1:]
                                w[src_off[j] + hi_idx[f]] = c
                    prods.append([w[q] for q in piv])
        prods = [p for p in prods if any(p)]
        taken = set(linalg.rref(prods, field, len(piv))[1]) if prods else set()
        new[d] = [R[i] for i in range(len(R)) if i not in taken]
    return kernels, new


def terao_rank3_complex(A: MultiArrangement, d_max: int | None = None) -> dict:
    """The complex D-bar -> sum_X S(-|A_X|+1) -> S(-1)^(kappa-e) -> J_3 for simple rank-3 A.

    The middle term is the degree-one part of the incidence module modulo
    the constant images of the hyperplane columns and of the Euler
    derivations; the last map sends [X, H] to delta^2 delta^1 alpha_H.
    Exactness is checked degree by degree up to ``d_max``.
    """
    if not A.is_essential():
        A = essentialize(A)[0]
    A = A.simple()
    if A.rank() != 3:
        raise ValueError("rank-3 arrangement required")
    S = build_S_complex(A)
    if not is_totally_formal(A, S)[0]:
        raise ValueError("arrangement is not formal")
    if not any(S.module_ranks()[3:]):
        raise NotTF2("TF2 input: use h2_presentation")
    field, n = A.field, A.nvars
    L = S.lattice
    T = L.triple_flats()
    d_max = (A.size + 3) if d_max is None else d_max
    edges = [(X.key, h) for X in T for h in X.key]
    row_of = {e: i for i, e in enumerate(edges)}
    kappa = sum(len(X) for X in T) - A.size
    # constant columns: iota (hyperplanes) and the Euler derivation of each flat
    iota = []
    for h in range(A.size):
        v = [field(0)] * len(edges)
        for X in T:
            if h in X.key:
                v[row_of[(X.key, h)]] = field(1)
        iota.append(v)
    euler = []
    for X in T:
        v = [field(0)] * len(edges)
        for h in X.key:
            v[row_of[(X.key, h)]] = field(1)
        euler.append(v)
    rk_iota = linalg.rank(iota, field, len(edges))
    W, wpiv = linalg.rref(iota + euler, field, len(edges))
    e = len(W) - rk_iota
    quotient = [j for j in range(len(edges)) if j not in set(wpiv)]

    def project(col):
        """Reduce a polynomial column modulo the constant span W; keep quotient coordinates."""
        col = list(col)
        for w, p in zip(W, wpiv):
            c = col[p]
            if c.terms:
                for j in range(len(edges)):
                    if w[j]:
                        col[j] = col[j] - c * w[j]
        return [col[j] for j in quotient]

    # middle map: the non-Euler generator theta_X of each triple flat
    mid_cols, mid_deg = [], []
    for X in T:
        theta = rank2_generators(A, X.key)[1]
        col = [Poly(field, n) for _ in edges]
        for h in X.key:
            col[row_of[(X.key, h)]] = theta.apply(A.forms[h]).div_linear(A.forms[h])
        mid_cols.append(project(col))
        mid_deg.append(theta.degree)
    q = len(quotient)
    # last map into J_3: e_[X,H] -> delta^2[:, X] delta^1[X, H] alpha_H
    d2 = S.levels[2]
    top_width = len(d2)
    delta_cols = []
    for j in quotient:
        X, h = edges[j]
        r0, r1 = S.row_blocks[1][frozenset(X)]
        vec = [Poly(field, n) for _ in range(top_width)]
        for rrow in range(top_width):
            c = field(0)
            for s in range(r0, r1):
                if d2[rrow][s] and S.levels[1][s][h]:
                    c = c + d2[rrow][s] * S.levels[1][s][h]
            if c:
                vec[rrow] = Poly.linear(field, A.forms[h]) * c
        delta_cols.append(vec)
    J = build_J_complex(A, None, S)
    from .homology import _DegreeEngine

    eng = _DegreeEngine(J)
    kernels, new = _graded_kernel(mid_cols, mid_deg, [1] * q, d_max, field, n)
    dsolver = DerivationSolver(A)
    degrees = []
    for d in range(d_max + 1):
        rk_mid, c1 = _graded_rank(mid_cols, mid_deg, [1] * q, d, field, n)
        rk_delta, _ = _graded_rank(delta_cols, [1] * q, [0] * top_width, d, field, n)
        c2 = sum(num_monomials(n, d - s) for s in mid_deg)
        j3 = eng.dim_J(3, d)
        dbar = dsolver.dim(d) - num_monomials(n, d - 1)
        degrees.append({
            "degree": d, "C2": c2, "C1": c1, "J3": j3,
            "rank_middle": rk_mid, "rank_last": rk_delta,
            "kernel_middle": c2 - rk_mid, "dbar": dbar,
            "exact_at_C1": c1 - rk_delta == rk_mid,
            "surjective": rk_delta == j3,
            "kernel_is_dbar": c2 - rk_mid == dbar,
        })
    # pruning: kernel generators with constant entries cancel against C2 summands
    ker_gens = []
    pruned = []
    for d, gens in new.items():
        for g in gens:
            ker_gens.append(d)
        same = [j for j, s in enumerate(mid_deg) if s == d]
        if gens and same:
            offs, pos = [], 0
            for s in mid_deg:
                offs.append(pos)
                pos += num_monomials(n, d - s)
            consts = [[g[offs[j]] for j in same] for g in gens]
            r = linalg.rank(consts, field, len(same)) if consts else 0
            pruned.extend([d] * r)
    rem_ker = list(ker_gens)
    rem_c2 = sorted(mid_deg)
    for d in pruned:
        rem_ker.remove(d)
        rem_c2.remove(d)
    return {
        "kappa": kappa, "e": e, "quotient_rank": q, "kappa_minus_e": kappa - e,
        "C2_degrees": sorted(mid_deg),
        "kernel_generator_degrees": sorted(ker_gens),
        "pruned_degrees": pruned,
        "pruned_shape": {"kernel": sorted(rem_ker), "C2": rem_c2, "C1": [1] * q},
        "degrees": degrees,
        "exact": all(r["exact_at_C1"] and r["surjective"] and r["kernel_is_dbar"] for r in degrees),
        "degree_bound": d_max,
        "label_note": ("the cokernel of the middle map is the module the last map lands in, "
                       "J at level 3; it is labelled J3 here, although the same module is "
                       "also referred to as J2 in one formulation"),
    }
