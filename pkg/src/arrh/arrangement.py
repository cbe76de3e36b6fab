"""Central multi-arrangements and their intersection lattices."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from . import linalg
from .linalg import Field, QQ
from .poly import Poly, default_names, product


def _normalized(form):
    lead = next(c for c in form if c)
    return tuple(c / lead for c in form)


class MultiArrangement:
    """Hyperplanes V(alpha_H) with positive multiplicities m(H).

    ``forms`` is a sequence of coefficient vectors of length ``nvars``.
    """

    __slots__ = ("field", "nvars", "forms", "mults", "names")

    def __init__(self, field: Field, forms, mults=None, names=None):
        forms = [tuple(field(c) for c in f) for f in forms]
        if not forms:
            raise ValueError("an arrangement needs at least one hyperplane")
        nvars = len(forms[0])
        if nvars < 1 or any(len(f) != nvars for f in forms):
            raise ValueError("all forms must have the same positive length")
        if mults is None:
            mults = [1] * len(forms)
        mults = [int(m) for m in mults]
        if len(mults) != len(forms):
            raise ValueError("forms and multiplicities differ in length")
        if any(m < 1 for m in mults):
            raise ValueError("multiplicities must be positive")
        seen = {}
        for i, f in enumerate(forms):
            if not any(f):
                raise ValueError(f"form {i + 1} is zero")
            key = _normalized(f)
            if key in seen:
                raise ValueError(f"forms {seen[key] + 1} and {i + 1} are proportional")
            seen[key] = i
        self.field = field
        self.nvars = nvars
        self.forms = tuple(forms)
        self.mults = tuple(mults)
        self.names = list(names) if names else default_names(nvars)

    # basic data -----------------------------------------------------------
    def __len__(self):
        return len(self.forms)

    @property
    def size(self) -> int:
        return len(self.forms)

    @property
    def total_multiplicity(self) -> int:
        return sum(self.mults)

    def is_simple(self) -> bool:
        return all(m == 1 for m in self.mults)

    def form_poly(self, i: int) -> Poly:
        return Poly.linear(self.field, self.forms[i])

    def defining_polynomial(self) -> Poly:
        return product((self.form_poly(i) ** m for i, m in enumerate(self.mults)),
                       self.field, self.nvars)

    def with_multiplicities(self, mults) -> "MultiArrangement":
        return MultiArrangement(self.field, self.forms, mults, self.names)

    def simple(self) -> "MultiArrangement":
        return self.with_multiplicities([1] * self.size)

    def select(self, indices) -> "MultiArrangement":
        idx = sorted(indices)
        return MultiArrangement(self.field, [self.forms[i] for i in idx],
                                [self.mults[i] for i in idx], self.names)

    def rank(self) -> int:
        return linalg.rank([list(f) for f in self.forms], self.field, self.nvars)

    def is_essential(self) -> bool:
        return self.rank() == self.nvars

    def form_str(self, i: int) -> str:
        return self.form_poly(i).to_str(self.names)

    def polynomial_str(self) -> str:
        parts = []
        for i, m in enumerate(self.mults):
            s = self.form_str(i)
            if len([c for c in self.forms[i] if c]) > 1:
                s = f"({s})"
            parts.append(s + (f"^{m}" if m > 1 else ""))
        return " ".join(parts)

    def __eq__(self, other):
        return (isinstance(other, MultiArrangement) and self.field == other.field
                and self.forms == other.forms and self.mults == other.mults)

    def __hash__(self):
        return hash((self.field, self.forms, self.mults))

    def __repr__(self):
        return f"MultiArrangement({self.field.name}, {self.polynomial_str()})"


def new_multiarrangement(field: Field, forms, multiplicities=None) -> MultiArrangement:
    return MultiArrangement(field, forms, multiplicities)


# ---------------------------------------------------------------------------
# span bookkeeping


def _reduce(vec, basis, pivots):
    """Reduce ``vec`` against an RREF basis; returns the remainder."""
    v = list(vec)
    for row, pc in zip(basis, pivots):
        c = v[pc]
        if c:
            v = [a - c * b for a, b in zip(v, row)]
    return v


def _extend_rref(basis, pivots, vec, field):
    """Add ``vec`` to an RREF basis (assumed independent); returns new basis, pivots."""
    rows = [list(r) for r in basis] + [list(vec)]
    return linalg.rref(rows, field, len(vec), backend="python")


@dataclass(frozen=True)
class Flat:
    indices: frozenset
    rank: int
    basis: tuple = dc_field(compare=False, hash=False, default=())
    pivots: tuple = dc_field(compare=False, hash=False, default=())

    @property
    def key(self) -> tuple:
        return tuple(sorted(self.indices))

    def label(self) -> str:
        """1-based hyperplane labels, e.g. '124' (comma separated past 9)."""
        k = self.key
        if not k:
            return "V"
        if len(k) and max(k) < 9:
            return "".join(str(i + 1) for i in k)
        return ",".join(str(i + 1) for i in k)

    def __len__(self):
        return len(self.indices)

    def __le__(self, other):
        return self.indices <= other.indices

    def __lt__(self, other):
        return self.indices < other.indices


class IntersectionLattice:
    """Ranked lattice of flats of a central arrangement."""

    def __init__(self, A: MultiArrangement):
        self.arrangement = A
        field = A.field
        n = A.nvars
        forms = [list(f) for f in A.forms]
        bottom = Flat(frozenset(), 0, (), ())
        levels = [[bottom]]
        by_key = {bottom.indices: bottom}
        current = []
        for i, f in enumerate(forms):
            basis, piv = linalg.rref([f], field, n, backend="python")
            fl = Flat(frozenset([i]), 1, tuple(tuple(r) for r in basis), tuple(piv))
            current.append(fl)
            by_key[fl.indices] = fl
        while current:
            levels.append(sorted(current, key=lambda F: F.key))
            nxt = {}
            for X in current:
                for i in range(len(forms)):
                    if i in X.indices:
                        continue
                    cand = None
                    for Y in nxt.values():
                        if X.indices < Y.indices and i in Y.indices:
                            cand = Y
                            break
                    if cand is not None:
                        continue
                    basis, piv = _extend_rref(X.basis, X.pivots, forms[i], field)
                    members = frozenset(
                        j for j, g in enumerate(forms)
                        if j in X.indices or j == i or not any(_reduce(g, basis, piv)))
                    if members not in nxt:
                        nxt[members] = Flat(members, X.rank + 1,
                                            tuple(tuple(r) for r in basis), tuple(piv))
            for k, F in nxt.items():
                by_key[k] = F
            current = list(nxt.values())
        self.flats_by_rank = levels
        self._by_key = by_key
        self.mobius = self._compute_mobius()

    def _compute_mobius(self):
        mu = {frozenset(): 1}
        for level in self.flats_by_rank[1:]:
            for X in level:
                s = 0
                for lower in self.flats_by_rank[:X.rank]:
                    for Y in lower:
                        if Y.indices <= X.indices:
                            s += mu[Y.indices]
                mu[X.indices] = -s
        return mu

    @property
    def rank(self) -> int:
        return len(self.flats_by_rank) - 1

    @property
    def center(self) -> Flat:
        return self.flats_by_rank[-1][0]

    def flats(self, rank: int | None = None) -> list[Flat]:
        if rank is None:
            return [X for level in self.flats_by_rank for X in level]
        if rank < 0 or rank >= len(self.flats_by_rank):
            return []
        return list(self.flats_by_rank[rank])

    def flat(self, indices) -> Flat:
        key = frozenset(indices)
        if key not in self._by_key:
            raise KeyError(f"{sorted(key)} is not a flat")
        return self._by_key[key]

    def is_flat(self, indices) -> bool:
        return frozenset(indices) in self._by_key

    def below(self, X: Flat, rank: int | None = None) -> list[Flat]:
        """Flats Y with Y < X (optionally of one rank)."""
        ranks = range(X.rank) if rank is None else [rank]
        out = []
        for k in ranks:
            for Y in self.flats(k):
                if Y.indices < X.indices:
                    out.append(Y)
        return out

    def closure(self, indices) -> Flat:
        """Smallest flat containing the given hyperplanes."""
        A = self.arrangement
        idx = sorted(indices)
        if not idx:
            return self.flats_by_rank[0][0]
        basis, piv = linalg.rref([list(A.forms[i]) for i in idx], A.field, A.nvars, backend="python")
        members = frozenset(j for j, g in enumerate(A.forms) if not any(_reduce(g, basis, piv)))
        return self._by_key[members]

    def join(self, X: Flat, Y: Flat) -> Flat:
        return self.closure(X.indices | Y.indices)

    def triple_flats(self) -> list[Flat]:
        return [X for X in self.flats(2) if len(X) >= 3]

    def mu(self, X: Flat) -> int:
        return self.mobius[X.indices]

    def profile(self) -> list[list[int]]:
        """Per rank, the sorted multiset of flat sizes (a lattice fingerprint)."""
        return [sorted(len(X) for X in level) for level in self.flats_by_rank]


def intersection_lattice(A: MultiArrangement) -> IntersectionLattice:
    return IntersectionLattice(A)


def rank(A: MultiArrangement) -> int:
    return A.rank()


def is_essential(A: MultiArrangement) -> bool:
    return A.is_essential()


def subarrangement(A: MultiArrangement, X: Flat, L: IntersectionLattice | None = None) -> MultiArrangement:
    """Closed subarrangement A_X with multiplicities m_X."""
    L = L or intersection_lattice(A)
    if not L.is_flat(X.indices):
        raise ValueError("not a flat of this arrangement")
    return A.select(X.indices)


def flat_coordinates(A: MultiArrangement, X: Flat):
    """Basis vectors of the subspace X (columns of the coordinate map)."""
    if X.rank == 0:
        return [[A.field(int(i == j)) for i in range(A.nvars)] for j in range(A.nvars)]
    return linalg.kernel([list(r) for r in X.basis], A.field, A.nvars, backend="python")


def _traces(A: MultiArrangement, X: Flat):
    coords = flat_coordinates(A, X)
    traces = []
    counts = []
    origin = []
    index = {}
    for i, f in enumerate(A.forms):
        if i in X.indices:
            continue
        t = tuple(sum((a * b for a, b in zip(f, v)), A.field(0)) for v in coords)
        key = _normalized(t)
        if key in index:
            counts[index[key]] += 1
            origin[index[key]].append(i)
        else:
            index[key] = len(traces)
            traces.append(t)
            counts.append(1)
            origin.append([i])
    return traces, counts, origin


def restriction(A: MultiArrangement, X: Flat, L: IntersectionLattice | None = None) -> MultiArrangement:
    """Simple arrangement A^X of distinct traces, in coordinates on X.

    Coordinates on X are the free (non-pivot) variables of the row-reduced
    equations of X, so a flat V(x_0) gets coordinates x_1, ..., x_{l-1}.
    """
    L = L or intersection_lattice(A)
    if not L.is_flat(X.indices):
        raise ValueError("not a flat of this arrangement")
    if X.rank == L.rank:
        raise ValueError("restriction to the center is empty")
    traces, _, _ = _traces(A, X)
    return MultiArrangement(A.field, traces)


def ziegler_restriction(A: MultiArrangement, h: int) -> MultiArrangement:
    """Restriction to H_h with multiplicity m^H(X) = #{H' : H' cap H = X}."""
    if not A.is_simple():
        raise ValueError("Ziegler restriction needs a simple arrangement")
    if not 0 <= h < A.size:
        raise IndexError("hyperplane index out of range")
    if A.size < 2:
        raise ValueError("Ziegler restriction of a single hyperplane is empty")
    basis, piv = linalg.rref([list(A.forms[h])], A.field, A.nvars, backend="python")
    H = Flat(frozenset([h]), 1, tuple(tuple(r) for r in basis), tuple(piv))
    traces, counts, _ = _traces(A, H)
    return MultiArrangement(A.field, traces, counts)


def essentialize(A: MultiArrangement):
    """Essential version of A in r = rank(A) coordinates.

    Returns (A_ess, basis, pivots): ``basis`` is the RREF basis of the span
    of the forms and a form alpha becomes (alpha[p] for p in pivots).
    """
    basis, piv = linalg.rref([list(f) for f in A.forms], A.field, A.nvars, backend="python")
    forms = [[f[p] for p in piv] for f in A.forms]
    names = [A.names[p] for p in piv] if len(A.names) == A.nvars else None
    return MultiArrangement(A.field, forms, A.mults, names), basis, piv


def irreducible_components(A: MultiArrangement) -> list[list[int]]:
    """Index groups of the finest direct-sum decomposition of A.

    Two hyperplanes are in one group iff some circuit contains both; the
    groups are found from the fundamental circuits of a greedy basis.
    """
    field = A.field
    n = A.size
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    basis_idx = []
    rows = []
    for i, f in enumerate(A.forms):
        trial = rows + [list(f)]
        if linalg.rank(trial, field, A.nvars, backend="python") > len(rows):
            rows = trial
            basis_idx.append(i)
    bt = linalg.transpose(rows, A.nvars)
    for i, f in enumerate(A.forms):
        if i in basis_idx:
            continue
        coeffs = linalg.solve(bt, list(f), field, len(basis_idx), backend="python")
        for b, c in zip(basis_idx, coeffs):
            if c:
                parent[find(b)] = find(i)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values())


def irreducible_factors(A: MultiArrangement) -> list[MultiArrangement]:
    return [A.select(g) for g in irreducible_components(A)]


def is_irreducible(A: MultiArrangement) -> bool:
    return len(irreducible_components(A)) == 1


# ---------------------------------------------------------------------------
# characteristic polynomial


def characteristic_polynomial(A: MultiArrangement, L: IntersectionLattice | None = None) -> list[int]:
    """Coefficients c[k] of t^k in sum_X mu(X) t^(dim X)."""
    if not A.is_simple():
        raise ValueError("characteristic polynomial is defined here for simple arrangements only")
    L = L or intersection_lattice(A)
    coeffs = [0] * (A.nvars + 1)
    for X in L.flats():
        coeffs[A.nvars - X.rank] += L.mu(X)
    return coeffs


def integer_roots(coeffs: list[int]):
    """Roots if the polynomial splits into integer linear factors, else None."""
    c = list(coeffs)
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    roots = []
    while len(c) > 1 and c[0] == 0:
        roots.append(0)
        c = c[1:]
    while len(c) > 1:
        const = c[0]
        found = None
        for d in range(1, abs(const) + 1):
            if const % d:
                continue
            for r in (d, -d):
                if sum(a * r ** k for k, a in enumerate(c)) == 0:
                    found = r
                    break
            if found is not None:
                break
        if found is None:
            return None
        roots.append(found)
        # synthetic division by (t - found), coefficients low to high
        hi = c[::-1]
        q = [hi[0]]
        for a in hi[1:-1]:
            q.append(a + found * q[-1])
        c = q[::-1]
    if abs(c[0]) != 1:
        return None
    return sorted(roots)


def characteristic_polynomial_str(coeffs: list[int]) -> str:
    parts = []
    for k in range(len(coeffs) - 1, -1, -1):
        a = coeffs[k]
        if not a:
            continue
        mono = "" if k == 0 else ("t" if k == 1 else f"t^{k}")
        if mono and abs(a) == 1:
            s = ("-" if a < 0 else "") + mono
        else:
            s = f"{a}{mono}"
        parts.append(s)
    return " + ".join(parts).replace("+ -", "- ") or "0"


# ---------------------------------------------------------------------------
# graphic arrangements


def _check_graph(edges):
    seen = set()
    for u, v in edges:
        if u == v:
            raise ValueError(f"loop at vertex {u}")
        key = frozenset((u, v))
        if key in seen:
            raise ValueError(f"repeated edge {u}-{v}")
        seen.add(key)


def graph_vertices(edges, vertices=None) -> list:
    vs = set(vertices or [])
    for u, v in edges:
        vs.update((u, v))
    return sorted(vs)


def graphic_arrangement(edges, mults=None, field: Field = QQ, vertices=None) -> MultiArrangement:
    """Forms x_i - x_j (i before j) for each edge of a simple graph."""
    edges = [tuple(e) for e in edges]
    _check_graph(edges)
    vs = graph_vertices(edges, vertices)
    pos = {v: i for i, v in enumerate(vs)}
    forms = []
    for u, v in edges:
        i, j = sorted((pos[u], pos[v]))
        f = [0] * len(vs)
        f[i] = 1
        f[j] = -1
        forms.append(f)
    names = [f"x{v}" for v in vs]
    return MultiArrangement(field, forms, mults, names)


def clique_complex(edges, vertices=None) -> list[list[tuple]]:
    """All cliques of the graph grouped by dimension (k-simplex = k+1 vertices)."""
    edges = [tuple(e) for e in edges]
    _check_graph(edges)
    vs = graph_vertices(edges, vertices)
    adj = {v: set() for v in vs}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    levels = [[(v,) for v in vs]]
    while True:
        nxt = []
        for s in levels[-1]:
            for w in vs:
                if w > s[-1] and all(w in adj[u] for u in s):
                    nxt.append(s + (w,))
        if not nxt:
            break
        levels.append(nxt)
    return levels


def generic_arrangement(n: int, nvars: int, field: Field = QQ) -> MultiArrangement:
    """n forms in general position from the moment curve (1, s, s^2, ...)."""
    forms = []
    for s in range(1, n + 1):
        forms.append([s ** k for k in range(nvars)])
    return MultiArrangement(field, forms)


def product_arrangement(A: MultiArrangement, B: MultiArrangement) -> MultiArrangement:
    """A x B in nvars(A) + nvars(B) variables."""
    if A.field != B.field:
        raise ValueError("product of arrangements over different fields")
    z = A.field(0)
    forms = [list(f) + [z] * B.nvars for f in A.forms] + [[z] * A.nvars + list(f) for f in B.forms]
    return MultiArrangement(A.field, forms, list(A.mults) + list(B.mults))
