"""Logarithmic derivations of a multi-arrangement, degree by degree.

A derivation theta = sum_i f_i d/dx_i of degree d (all f_i homogeneous of
degree d) lies in D(A, m) when alpha_H^m(H) divides theta(alpha_H) for every
H.  Each degree is one scalar linear system: the kernel of [B | diag(alpha^m)]
acting on (f, h), projected to the f-part.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import lru_cache

from . import linalg
from .arrangement import MultiArrangement, essentialize
from .linalg import Field, QQ
from .poly import Poly, default_names, monomial_basis, monomial_index, num_monomials


class Derivation:
    """theta = sum_i coeffs[i] d/dx_i with homogeneous coefficients of one degree."""

    __slots__ = ("coeffs", "degree", "field", "nvars")

    def __init__(self, coeffs: list[Poly], degree: int | None = None):
        if not coeffs:
            raise ValueError("a derivation needs at least one coefficient")
        self.coeffs = list(coeffs)
        self.field = coeffs[0].field
        self.nvars = coeffs[0].nvars
        if len(self.coeffs) != self.nvars:
            raise ValueError("one coefficient per variable is required")
        degs = {p.degree() for p in self.coeffs if p.terms}
        if degree is None:
            if len(degs) > 1:
                raise ValueError("coefficients of different degrees")
            degree = degs.pop() if degs else 0
        elif degs and degs != {degree}:
            raise ValueError("coefficients do not have the stated degree")
        if any(not p.is_homogeneous() for p in self.coeffs):
            raise ValueError("coefficients must be homogeneous")
        self.degree = degree

    @classmethod
    def from_vector(cls, field: Field, nvars: int, degree: int, vec) -> "Derivation":
        n = num_monomials(nvars, degree)
        return cls([Poly.from_vector(field, nvars, degree, vec[i * n:(i + 1) * n])
                    for i in range(nvars)], degree)

    def to_vector(self) -> list:
        out = []
        for p in self.coeffs:
            out.extend(p.to_vector(self.degree) if p.terms else
                       [self.field(0)] * num_monomials(self.nvars, self.degree))
        return out

    def apply(self, form) -> Poly:
        """theta(alpha) for a linear form given by its coefficients."""
        acc = Poly(self.field, self.nvars)
        for a, p in zip(form, self.coeffs):
            if a:
                acc = acc + p * a
        return acc

    def apply_poly(self, f: Poly) -> Poly:
        """theta(f) for an arbitrary polynomial (Leibniz rule)."""
        acc = Poly(self.field, self.nvars)
        for i, p in enumerate(self.coeffs):
            if not p.terms:
                continue
            terms = {}
            for e, c in f.terms.items():
                if e[i]:
                    g = list(e)
                    g[i] -= 1
                    terms[tuple(g)] = c * e[i]
            acc = acc + p * Poly(self.field, self.nvars, terms)
        return acc

    def is_zero(self) -> bool:
        return all(not p.terms for p in self.coeffs)

    def is_member(self, A: MultiArrangement) -> bool:
        return all(self.apply(f).divisible_by_power(f, m) for f, m in zip(A.forms, A.mults))

    def psi(self, A: MultiArrangement) -> Poly:
        """Sum of theta(alpha_H) over the hyperplanes."""
        acc = Poly(self.field, self.nvars)
        for f in A.forms:
            acc = acc + self.apply(f)
        return acc

    def to_strs(self, names=None) -> list[str]:
        return [p.to_str(names) for p in self.coeffs]

    def to_str(self, names=None) -> str:
        names = names or default_names(self.nvars)
        parts = []
        for p, n in zip(self.coeffs, names):
            if p.terms:
                s = p.to_str(names)
                parts.append(f"({s})*d{n}" if len(p.terms) > 1 else f"{s}*d{n}")
        return " + ".join(parts) if parts else "0"

    def __eq__(self, other):
        return isinstance(other, Derivation) and self.coeffs == other.coeffs

    def __repr__(self):
        return f"Derivation(deg={self.degree}, {self.to_str()})"


def euler_derivation(field: Field, nvars: int) -> Derivation:
    return Derivation([Poly.var(field, nvars, i) for i in range(nvars)], 1)


# ---------------------------------------------------------------------------
# the degree-d linear system


class DerivationSolver:
    """Cached row-reduced bases of D(A, m)_d for one multi-arrangement."""

    def __init__(self, A: MultiArrangement):
        self.A = A
        self.field = A.field
        self.n = A.nvars
        self._powers = [A.form_poly(i) ** m for i, m in enumerate(A.mults)]
        self._cache = {}

    def system(self, d: int):
        """Sparse rows of [B | -diag(alpha^m)] in degree d and the column count."""
        A, n = self.A, self.n
        nd = num_monomials(n, d)
        idx = monomial_index(n, d)
        col = n * nd
        h_offsets = []
        for m in A.mults:
            h_offsets.append(col)
            col += num_monomials(n, d - m)
        rows = []
        for j, (form, m) in enumerate(zip(A.forms, A.mults)):
            eqs = [dict() for _ in range(nd)]
            for i, a in enumerate(form):
                if a:
                    for r in range(nd):
                        eqs[r][i * nd + r] = a
            if d >= m:
                off = h_offsets[j]
                for k, nu in enumerate(monomial_basis(n, d - m)):
                    for e, c in self._powers[j].terms.items():
                        r = idx[tuple(x + y for x, y in zip(e, nu))]
                        eqs[r][off + k] = -c
            rows.extend(eqs)
        return rows, col

    def basis(self, d: int):
        """(RREF coefficient vectors of D_d, pivot columns)."""
        if d < 0:
            return [], []
        if d in self._cache:
            return self._cache[d]
        rows, ncols = self.system(d)
        width = self.n * num_monomials(self.n, d)
        ker = linalg.sparse_nullspace(rows, ncols, self.field)
        fparts = [v[:width] for v in ker]
        # h is determined by f, so the projection is injective
        R, piv = linalg.rref(fparts, self.field, width) if fparts else ([], [])
        if len(R) != len(fparts):
            raise ArithmeticError("kernel projection lost rank")
        self._cache[d] = (R, piv)
        return R, piv

    def dim(self, d: int) -> int:
        return len(self.basis(d)[0])

    def derivations(self, d: int) -> list[Derivation]:
        return [Derivation.from_vector(self.field, self.n, d, v) for v in self.basis(d)[0]]

    def _shift_maps(self, d: int):
        """For each variable, the index map degree d-1 -> degree d under x_k *."""
        return _shift_maps(self.n, d)

    def products_from_below(self, d: int):
        """Vectors x_k * b for b in the basis of D_(d-1)."""
        below = self.basis(d - 1)[0]
        if not below:
            return []
        n = self.n
        lo, hi = num_monomials(n, d - 1), num_monomials(n, d)
        zero = self.field(0)
        out = []
        for k, smap in enumerate(self._shift_maps(d)):
            for v in below:
                w = [zero] * (n * hi)
                for i in range(n):
                    base_lo, base_hi = i * lo, i * hi
                    for a in range(lo):
                        c = v[base_lo + a]
                        if c:
                            w[base_hi + smap[a]] = c
                out.append(w)
        return out

    def new_generators(self, d: int) -> list[Derivation]:
        """A basis of D_d modulo S_1 * D_(d-1), chosen among the RREF basis of D_d."""
        R, piv = self.basis(d)
        if not R:
            return []
        prods = self.products_from_below(d)
        coords = [[w[q] for q in piv] for w in prods]
        coords = [c for c in coords if any(c)]
        taken = set(linalg.rref(coords, self.field, len(piv))[1]) if coords else set()
        return [Derivation.from_vector(self.field, self.n, d, R[i])
                for i in range(len(R)) if i not in taken]


@lru_cache(maxsize=None)
def _shift_maps(n: int, d: int):
    lo = monomial_basis(n, d - 1)
    idx = monomial_index(n, d)
    maps = []
    for k in range(n):
        maps.append(tuple(idx[e[:k] + (e[k] + 1,) + e[k + 1:]] for e in lo))
    return tuple(maps)


def _with_mults(A: MultiArrangement, m):
    return A if m is None else A.with_multiplicities(m)


def derivation_space(A: MultiArrangement, m=None, d: int = 0) -> list[Derivation]:
    """Basis of D(A, m)_d (row reduced, hence canonical)."""
    return DerivationSolver(_with_mults(A, m)).derivations(d)


def derivation_dims(A: MultiArrangement, m=None, d_max: int = 0) -> list[int]:
    solver = DerivationSolver(_with_mults(A, m))
    return [solver.dim(d) for d in range(d_max + 1)]


def minimal_generators(A: MultiArrangement, m=None, d_max: int | None = None) -> list[Derivation]:
    A = _with_mults(A, m)
    d_max = A.total_multiplicity if d_max is None else d_max
    solver = DerivationSolver(A)
    out = []
    for d in range(d_max + 1):
        out.extend(solver.new_generators(d))
    return out


def minimal_generator_degrees(A: MultiArrangement, m=None, d_max: int | None = None) -> list[int]:
    return sorted(t.degree for t in minimal_generators(A, m, d_max))


# ---------------------------------------------------------------------------
# Saito's criterion


def poly_det(matrix: list[list[Poly]], field: Field, nvars: int) -> Poly:
    """Determinant of a square polynomial matrix by cofactor expansion over column subsets."""
    n = len(matrix)
    if n == 0:
        return Poly.const(field, nvars, 1)
    memo = {}

    def minor(row, cols):
        if row == n:
            return Poly.const(field, nvars, 1)
        key = (row, cols)
        if key in memo:
            return memo[key]
        acc = Poly(field, nvars)
        sign = 1
        for c in range(n):
            if cols & (1 << c):
                continue
            entry = matrix[row][c]
            if entry.terms:
                sub = minor(row + 1, cols | (1 << c))
                if sub.terms:
                    term = entry * sub
                    acc = acc + term if sign > 0 else acc - term
            sign = -sign    # alternates over the columns still available
        memo[key] = acc
        return acc

    return minor(0, 0)


def coefficient_determinant(thetas: list[Derivation]) -> Poly:
    t0 = thetas[0]
    return poly_det([t.coeffs for t in thetas], t0.field, t0.nvars)


def scalar_ratio(f: Poly, g: Poly):
    """c with f = c * g, or None when no such constant exists."""
    if not g.terms:
        return f.field(0) if not f.terms else None
    e, b = next(iter(g.terms.items()))
    c = f.coefficient(e) / b
    return c if f == g * c else None


def saito_check(A: MultiArrangement, m=None, thetas: list[Derivation] = ()) -> bool:
    """True iff the coefficient determinant of ``thetas`` is a nonzero multiple of Q(A, m)."""
    A = _with_mults(A, m)
    thetas = list(thetas)
    if len(thetas) != A.nvars:
        raise ValueError(f"expected {A.nvars} derivations, got {len(thetas)}")
    for t in thetas:
        if t.nvars != A.nvars:
            raise ValueError("derivation in the wrong number of variables")
        if not t.is_member(A):
            raise ValueError(f"{t.to_str(A.names)} is not in D(A, m)")
    det = coefficient_determinant(thetas)
    c = scalar_ratio(det, A.defining_polynomial())
    return c is not None and bool(c)


# ---------------------------------------------------------------------------
# free basis search


@dataclass
class FreeBasisResult:
    status: str                         # "Free" | "NotFound"
    basis: list = dc_field(default_factory=list)
    exponents: tuple = ()
    reason: str = ""
    degree_reached: int = 0
    generator_degrees: list = dc_field(default_factory=list)

    @property
    def free(self) -> bool:
        return self.status == "Free"

    def to_json(self, names=None) -> dict:
        return {
            "status": self.status,
            "exponents": list(self.exponents),
            "basis": [t.to_strs(names) for t in self.basis],
            "reason": self.reason,
            "degree_reached": self.degree_reached,
        }


def free_basis_search(A: MultiArrangement, m=None, d_max: int | None = None) -> FreeBasisResult:
    """Look for a homogeneous basis of D(A, m) among its minimal generators.

    Minimal generators are collected degree by degree.  A free module has
    exactly l of them with degree sum |m|; the search stops as soon as that
    is reached (and then checks Saito's criterion) or ruled out.
    """
    A = _with_mults(A, m)
    ell = A.nvars
    total = A.total_multiplicity
    d_max = total if d_max is None else min(d_max, total)
    solver = DerivationSolver(A)
    gens: list[Derivation] = []
    for d in range(d_max + 1):
        gens.extend(solver.new_generators(d))
        degs = [t.degree for t in gens]
        if len(gens) > ell:
            return FreeBasisResult("NotFound", reason=f"more than {ell} minimal generators",
                                   degree_reached=d, generator_degrees=degs)
        if len(gens) == ell:
            if sum(degs) != total:
                return FreeBasisResult("NotFound", reason="degree sum differs from |m|",
                                       degree_reached=d, generator_degrees=degs)
            if saito_check(A, None, gens):
                exps = tuple(sorted(degs, reverse=True))
                return FreeBasisResult("Free", list(gens), exps, "Saito criterion",
                                       degree_reached=d, generator_degrees=degs)
            return FreeBasisResult("NotFound", reason="determinant is not a multiple of Q",
                                   degree_reached=d, generator_degrees=degs)
        if sum(degs) + (ell - len(gens)) * (d + 1) > total:
            return FreeBasisResult("NotFound", reason="remaining generators cannot reach |m|",
                                   degree_reached=d, generator_degrees=degs)
    return FreeBasisResult("NotFound", reason="degree bound reached",
                           degree_reached=d_max, generator_degrees=[t.degree for t in gens])


# ---------------------------------------------------------------------------
# rank two


def _rank2_essential(A: MultiArrangement) -> MultiArrangement:
    if A.rank() != 2:
        raise ValueError(f"rank must be 2, got {A.rank()}")
    return A if A.nvars == 2 else essentialize(A)[0]


def rank2_exponents(A: MultiArrangement, m=None) -> tuple:
    """Exponents (d1 >= d2) of a rank-2 multi-arrangement."""
    A = _rank2_essential(_with_mults(A, m))
    res = free_basis_search(A)
    if not res.free:
        raise ArithmeticError("rank-2 multi-arrangement reported without a basis")
    d1, d2 = res.exponents
    if d1 + d2 != A.total_multiplicity:
        raise ArithmeticError("rank-2 exponents do not sum to |m|")
    return d1, d2


def rank2_has_exponent(A: MultiArrangement, m=None, e: int = 0) -> bool:
    return e in rank2_exponents(A, m)


def pencil(field: Field, n: int, roots, mult_xy: int | None = None, mults=None) -> MultiArrangement:
    """x^n y^n prod(x - a_i y), or arbitrary multiplicities when ``mults`` is given."""
    forms = [(1, 0), (0, 1)] + [(1, -field(a)) for a in roots]
    if mults is None:
        mults = [n, n] + [1] * len(roots)
    return MultiArrangement(field, forms, mults)


def nn11_closed_form(n: int, roots, field: Field = QQ, verify: bool = True):
    """Exponents of x^n y^n prod_{i<=k}(x - a_i y), k <= n.

    Returns (exponents, route) with route "closed" when all a_i^(n-1) agree
    and are nonzero (exponents (n+k, n)) and "generic" otherwise.  With
    ``verify`` the closed form is re-derived by the generic solver.
    """
    roots = [field(a) for a in roots]
    k = len(roots)
    if n < 1 or k < 1 or k > n:
        raise ValueError("need 1 <= k <= n")
    if any(not a for a in roots) or len(set(roots)) != k:
        raise ValueError("roots must be distinct and nonzero")
    A = pencil(field, n, roots)
    powers = {a ** (n - 1) for a in roots}
    if len(powers) == 1 and next(iter(powers)):
        exps = (n + k, n)
        if verify and rank2_exponents(A) != exps:
            raise ArithmeticError("closed form disagrees with the generic solver")
        return exps, "closed"
    return rank2_exponents(A), "generic"


def nn11_derivation(n: int, a, field: Field = QQ) -> Derivation:
    """x^n d/dx + a^(n-1) y^n d/dy."""
    a = field(a)
    return Derivation([Poly.monomial(field, (n, 0)), Poly.monomial(field, (0, n), a ** (n - 1))], n)


def wakamiko_has_exponent(m_x: int, m_y: int, m_z: int, characteristic: int = 0) -> bool:
    """Whether m_z is an exponent of three lines with multiplicities (m_x, m_y, m_z)."""
    if characteristic:
        raise ValueError("the three-line criterion holds in characteristic 0 only; "
                         "use rank2_has_exponent")
    if min(m_x, m_y, m_z) < 1:
        raise ValueError("multiplicities must be positive")
    return m_x + m_y + m_z <= 2 * m_z + 1


def three_lines(m_x: int, m_y: int, m_z: int, field: Field = QQ) -> MultiArrangement:
    """x^m_x y^m_y (x - y)^m_z, the last line playing the role of z."""
    return MultiArrangement(field, [(1, 0), (0, 1), (1, -1)], [m_x, m_y, m_z])


def nonvanishing_check(A: MultiArrangement, m=None, theta: Derivation | None = None) -> bool:
    """True iff theta(alpha_i) != 0 for every hyperplane of a rank-2 non-boolean A.

    Only membership of theta is enforced.  The sharper hypothesis
    theta(alpha_j) = c alpha_j^m(j) for some j is not required, since a
    minimal generator of degree above every m(j) can never satisfy it.
    """
    A = _with_mults(A, m)
    if A.rank() != 2:
        raise ValueError("rank-2 input required")
    if A.size < 3:
        raise ValueError("boolean input: the nonvanishing statement does not apply")
    if theta is None or not theta.is_member(A):
        raise ValueError("theta must be a derivation of D(A, m)")
    return all(theta.apply(f).terms for f in A.forms)
