"""Sparse multivariate polynomials with exact coefficients.

A :class:`Poly` maps exponent tuples to nonzero field elements.  Homogeneous
pieces are converted to and from coefficient vectors indexed by
:func:`monomial_basis`, which fixes the graded lexicographic order used
everywhere else in the package.
"""

from __future__ import annotations

from functools import lru_cache
from math import comb

from .linalg import Field


@lru_cache(maxsize=None)
def _monomials(nvars: int, degree: int) -> tuple:
    if nvars == 1:
        return ((degree,),)
    out = []
    for a in range(degree, -1, -1):
        for rest in _monomials(nvars - 1, degree - a):
            out.append((a,) + rest)
    return tuple(out)


def monomial_basis(nvars: int, degree: int) -> list[tuple]:
    """Exponent vectors of total degree ``degree`` in lex-descending order.

    >>> monomial_basis(2, 2)
    [(2, 0), (1, 1), (0, 2)]
    """
    if nvars < 1:
        raise ValueError("need at least one variable")
    if degree < 0:
        return []
    return list(_monomials(nvars, degree))


@lru_cache(maxsize=None)
def monomial_index(nvars: int, degree: int) -> dict:
    return {m: i for i, m in enumerate(_monomials(nvars, degree))}


def num_monomials(nvars: int, degree: int) -> int:
    if degree < 0:
        return 0
    return comb(degree + nvars - 1, nvars - 1)


def _add_exp(a, b):
    return tuple(x + y for x, y in zip(a, b))


class Poly:
    """Polynomial in ``nvars`` variables over ``field``."""

    __slots__ = ("field", "nvars", "terms")

    def __init__(self, field: Field, nvars: int, terms: dict | None = None):
        self.field = field
        self.nvars = nvars
        self.terms = {k: v for k, v in (terms or {}).items() if v}

    # constructors -------------------------------------------------------
    @classmethod
    def zero(cls, field, nvars):
        return cls(field, nvars)

    @classmethod
    def const(cls, field, nvars, c):
        return cls(field, nvars, {(0,) * nvars: field(c)})

    @classmethod
    def var(cls, field, nvars, i):
        e = [0] * nvars
        e[i] = 1
        return cls(field, nvars, {tuple(e): field(1)})

    @classmethod
    def monomial(cls, field, exps, c=1):
        return cls(field, len(exps), {tuple(exps): field(c)})

    @classmethod
    def linear(cls, field, coeffs):
        n = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            if c:
                e = [0] * n
                e[i] = 1
                terms[tuple(e)] = field(c)
        return cls(field, n, terms)

    @classmethod
    def from_vector(cls, field, nvars, degree, vec):
        basis = _monomials(nvars, degree)
        return cls(field, nvars, {m: field(c) for m, c in zip(basis, vec) if c})

    # basic queries ------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        degs = {sum(e) for e in self.terms}
        return len(degs) <= 1

    def coefficient(self, exps):
        return self.terms.get(tuple(exps), self.field(0))

    def leading_coefficient(self):
        """Coefficient of the lex-largest monomial."""
        if not self.terms:
            return self.field(0)
        return self.terms[max(self.terms, key=lambda e: (sum(e), e))]

    def to_vector(self, degree: int) -> list:
        idx = monomial_index(self.nvars, degree)
        vec = [self.field(0)] * len(idx)
        for e, c in self.terms.items():
            if sum(e) != degree:
                raise ValueError("polynomial is not homogeneous of the requested degree")
            vec[idx[e]] = c
        return vec

    # arithmetic ---------------------------------------------------------
    def _check(self, other):
        if other.nvars != self.nvars:
            raise ValueError("polynomials in different numbers of variables")
        if other.field != self.field:
            raise ValueError("polynomials over different fields")

    def _lift(self, other):
        if isinstance(other, Poly):
            self._check(other)
            return other
        return Poly.const(self.field, self.nvars, other)

    def __add__(self, other):
        other = self._lift(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms[e] + c if e in terms else c
        return Poly(self.field, self.nvars, terms)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.field, self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = self.field(other)
            if not c:
                return Poly(self.field, self.nvars)
            return Poly(self.field, self.nvars, {e: v * c for e, v in self.terms.items()})
        self._check(other)
        terms = {}
        for a, c in self.terms.items():
            for b, d in other.terms.items():
                e = _add_exp(a, b)
                v = c * d
                terms[e] = terms[e] + v if e in terms else v
        return Poly(self.field, self.nvars, terms)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = Poly.const(self.field, self.nvars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        if not other:
            return not self.terms
        return self == Poly.const(self.field, self.nvars, other)

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def scale_exponent_shift(self, exps):
        """Multiply by the monomial x^exps."""
        return Poly(self.field, self.nvars, {_add_exp(e, exps): c for e, c in self.terms.items()})

    def evaluate(self, point):
        total = self.field(0)
        for e, c in self.terms.items():
            v = c
            for x, k in zip(point, e):
                if k:
                    v = v * x ** k
            total = total + v
        return total

    def substitute_linear(self, images: list[Poly]):
        """Replace x_i by the polynomial ``images[i]``."""
        if len(images) != self.nvars:
            raise ValueError("wrong number of images")
        target = images[0].nvars if images else 0
        out = Poly(self.field, target)
        powers: dict = {}
        for e, c in self.terms.items():
            term = Poly.const(self.field, target, c)
            for i, k in enumerate(e):
                if k:
                    key = (i, k)
                    if key not in powers:
                        powers[key] = images[i] ** k
                    term = term * powers[key]
            out = out + term
        return out

    def div_linear(self, coeffs):
        """Exact quotient by the linear form with ``coeffs``, or None."""
        j = next((i for i, c in enumerate(coeffs) if c), None)
        if j is None:
            raise ZeroDivisionError("division by the zero form")
        if not self.terms:
            return Poly(self.field, self.nvars)
        aj = self.field(coeffs[j])
        rest = {}
        for i, c in enumerate(coeffs):
            if i != j and c:
                rest[i] = self.field(c)
        # slice self by the exponent of x_j
        slices: dict[int, dict] = {}
        for e, c in self.terms.items():
            k = e[j]
            slices.setdefault(k, {})[e[:j] + (0,) + e[j + 1:]] = c
        top = max(slices)
        if top == 0:
            return None
        inv = self.field(1) / aj
        q: dict[int, dict] = {}
        carry: dict = {}
        # c_k - beta * q_k, processed from the top exponent downwards
        for k in range(top, 0, -1):
            cur = dict(slices.get(k, {}))
            for e, v in carry.items():
                cur[e] = cur[e] - v if e in cur else -v
            qk = {e: v * inv for e, v in cur.items() if v}
            q[k - 1] = qk
            # beta * q_{k-1} feeds the next lower slice
            carry = {}
            for e, v in qk.items():
                for i, b in rest.items():
                    f = list(e)
                    f[i] += 1
                    f = tuple(f)
                    w = b * v
                    carry[f] = carry[f] + w if f in carry else w
        rem = dict(slices.get(0, {}))
        for e, v in carry.items():
            rem[e] = rem[e] - v if e in rem else -v
        if any(rem.values()):
            return None
        terms = {}
        for k, qk in q.items():
            for e, v in qk.items():
                if v:
                    f = list(e)
                    f[j] = k
                    terms[tuple(f)] = v
        return Poly(self.field, self.nvars, terms)

    def divisible_by_power(self, coeffs, m: int) -> bool:
        g = self
        for _ in range(m):
            if not g.terms:
                return True
            g = g.div_linear(coeffs)
            if g is None:
                return False
        return True

    def to_str(self, names=None) -> str:
        if not self.terms:
            return "0"
        names = names or default_names(self.nvars)
        parts = []
        for e in sorted(self.terms, key=lambda e: (sum(e), e), reverse=True):
            c = self.terms[e]
            mono = "*".join(f"{n}^{k}" if k > 1 else n for n, k in zip(names, e) if k)
            cs = str(c)
            if not mono:
                parts.append(cs)
            elif cs == "1":
                parts.append(mono)
            elif cs == "-1":
                parts.append("-" + mono)
            else:
                if "/" in cs or (cs.startswith("-") and "/" in cs):
                    cs = f"({cs})"
                parts.append(f"{cs}*{mono}")
        s = " + ".join(parts)
        return s.replace("+ -", "- ")

    def __repr__(self):
        return f"Poly({self.to_str()})"


def default_names(n: int) -> list[str]:
    if n <= 3:
        return ["x", "y", "z"][:n]
    if n == 4:
        return ["x", "y", "z", "w"]
    return [f"x{i}" for i in range(n)]


def product(polys, field: Field, nvars: int) -> Poly:
    out = Poly.const(field, nvars, 1)
    for p in polys:
        out = out * p
    return out


class PolyVector:
    """Homogeneous element of a graded free module.

    Entry i lives in S(-shift_i), so it has total degree ``degree - shift_i``.
    """

    __slots__ = ("entries", "shifts", "degree")

    def __init__(self, entries: list[Poly], degree: int, shifts: list[int] | None = None):
        self.entries = list(entries)
        self.shifts = list(shifts) if shifts is not None else [0] * len(self.entries)
        self.degree = degree
        for p, s in zip(self.entries, self.shifts):
            if p.terms and (not p.is_homogeneous() or p.degree() != degree - s):
                raise ValueError("PolyVector entries are not homogeneous of the stated degree")

    @property
    def ambient_rank(self) -> int:
        return len(self.entries)

    def is_zero(self) -> bool:
        return all(not p.terms for p in self.entries)

    def to_vector(self, degree: int | None = None) -> list:
        d = self.degree if degree is None else degree
        out = []
        for p, s in zip(self.entries, self.shifts):
            if d - s < 0:
                continue
            if p.terms and d != self.degree:
                raise ValueError("degree mismatch")
            out.extend(p.to_vector(d - s) if p.terms else
                       [p.field(0)] * num_monomials(p.nvars, d - s))
        return out

    def times_monomial(self, exps):
        return PolyVector([p.scale_exponent_shift(exps) for p in self.entries],
                          self.degree + sum(exps), self.shifts)

    def apply_matrix(self, rows) -> "PolyVector":
        """Scalar matrix times this vector (shifts must agree)."""
        if not self.entries:
            raise ValueError("empty PolyVector")
        f = self.entries[0].field
        n = self.entries[0].nvars
        out = []
        for row in rows:
            acc = Poly(f, n)
            for a, p in zip(row, self.entries):
                if a and p.terms:
                    acc = acc + p * a
            out.append(acc)
        return PolyVector(out, self.degree, [self.shifts[0]] * len(out))

    def evaluate(self, point):
        return [p.evaluate(point) for p in self.entries]

    def __repr__(self):
        return f"PolyVector(deg={self.degree}, {[p.to_str() for p in self.entries]})"
