"""Exact scalar arithmetic over Q and prime fields, and dense linear algebra.

Field elements are ``fractions.Fraction`` over Q and :class:`FpElement` over
GF(p).  Matrices are plain lists of rows.  Rank, row reduction, kernels and
solving go through python-flint when it is importable (``fmpz_mat`` after
clearing denominators, ``nmod_mat`` modulo p); a pure-Python elimination is
always available and is used for tiny matrices and as a cross-check.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt

try:
    import flint
except ImportError:  # pragma: no cover - flint is a declared dependency
    flint = None

# below this many entries the pure-Python path is faster than converting
_FLINT_MIN_ENTRIES = 64


class FieldMismatch(ValueError):
    pass


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    for q in range(3, isqrt(p) + 1, 2):
        if p % q == 0:
            return False
    return True


class FpElement:
    """An element of GF(p), stored as a reduced integer."""

    __slots__ = ("v", "p")

    def __init__(self, v: int, p: int):
        self.v = v % p
        self.p = p

    def _coerce(self, other):
        if isinstance(other, FpElement):
            if other.p != self.p:
                raise FieldMismatch(f"GF({self.p}) element combined with GF({other.p}) element")
            return other.v
        if isinstance(other, int):
            return other
        if isinstance(other, Fraction):
            if other.denominator == 1:
                return other.numerator
            den = other.denominator % self.p
            if den == 0:
                raise ZeroDivisionError(f"denominator divisible by {self.p}")
            return other.numerator * pow(den, -1, self.p)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FpElement(self.v + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FpElement(self.v - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FpElement(o - self.v, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FpElement(self.v * o, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        o %= self.p
        if o == 0:
            raise ZeroDivisionError(f"division by zero in GF({self.p})")
        return FpElement(self.v * pow(o, -1, self.p), self.p)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if self.v == 0:
            raise ZeroDivisionError(f"division by zero in GF({self.p})")
        return FpElement(o * pow(self.v, -1, self.p), self.p)

    def __neg__(self):
        return FpElement(-self.v, self.p)

    def __pos__(self):
        return self

    def __pow__(self, e: int):
        if e < 0:
            if self.v == 0:
                raise ZeroDivisionError(f"division by zero in GF({self.p})")
            return FpElement(pow(pow(self.v, -1, self.p), -e, self.p), self.p)
        return FpElement(pow(self.v, e, self.p), self.p)

    def __eq__(self, other):
        if isinstance(other, FpElement):
            return self.p == other.p and self.v == other.v
        if isinstance(other, int):
            return (self.v - other) % self.p == 0
        return NotImplemented

    def __hash__(self):
        return hash((self.v, self.p))

    def __bool__(self):
        return self.v != 0

    def __int__(self):
        return self.v

    def __repr__(self):
        return f"FpElement({self.v}, {self.p})"

    def __str__(self):
        return str(self.v)


class Field:
    """The field Q (``p == 0``) or GF(p) for a prime p."""

    __slots__ = ("p",)

    def __init__(self, p: int = 0):
        if p != 0 and not is_prime(p):
            raise ValueError(f"GF({p}): {p} is not prime")
        self.p = p

    @property
    def characteristic(self) -> int:
        return self.p

    @property
    def name(self) -> str:
        return "Q" if self.p == 0 else f"GF({self.p})"

    def __call__(self, x):
        """Convert an int, Fraction, FpElement or string like ``'-3/4'``."""
        if isinstance(x, str):
            x = Fraction(x.strip())
        if self.p == 0:
            if isinstance(x, FpElement):
                raise FieldMismatch("GF(p) element used over Q")
            if isinstance(x, bool) or not isinstance(x, (int, Fraction)):
                raise TypeError(f"cannot convert {x!r} to a rational")
            return Fraction(x)
        if isinstance(x, FpElement):
            if x.p != self.p:
                raise FieldMismatch(f"GF({x.p}) element used over GF({self.p})")
            return x
        if isinstance(x, Fraction):
            den = x.denominator % self.p
            if den == 0:
                raise ZeroDivisionError(f"{x} has no image in GF({self.p})")
            return FpElement(x.numerator * pow(den, -1, self.p), self.p)
        if isinstance(x, bool) or not isinstance(x, int):
            raise TypeError(f"cannot convert {x!r} to GF({self.p})")
        return FpElement(x, self.p)

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    def contains(self, x) -> bool:
        if self.p == 0:
            return isinstance(x, Fraction)
        return isinstance(x, FpElement) and x.p == self.p

    def to_str(self, x) -> str:
        return str(self(x))

    def elements(self):
        """All elements of a prime field (refused over Q)."""
        if self.p == 0:
            raise ValueError("Q is infinite")
        return [self(i) for i in range(self.p)]

    def __eq__(self, other):
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self):
        return hash(("Field", self.p))

    def __repr__(self):
        return self.name


QQ = Field(0)


def GF(p: int) -> Field:
    return Field(p)


def parse_field(text: str) -> Field:
    """Parse ``Q`` or ``GF(p)``."""
    t = text.strip().replace(" ", "")
    if t in ("Q", "QQ"):
        return QQ
    if t.upper().startswith("GF(") and t.endswith(")"):
        try:
            p = int(t[3:-1])
        except ValueError:
            raise ValueError(f"bad field descriptor {text!r}") from None
        return Field(p)
    raise ValueError(f"bad field descriptor {text!r}")


def infer_field(rows) -> Field:
    """Field shared by all entries; ints alone are read as rationals."""
    p = None
    for row in rows:
        for x in row:
            if isinstance(x, FpElement):
                q = x.p
            elif isinstance(x, (int, Fraction)) and not isinstance(x, bool):
                q = 0 if isinstance(x, Fraction) else None
            else:
                raise TypeError(f"not a field element: {x!r}")
            if q is None:
                continue
            if p is None:
                p = q
            elif p != q:
                raise FieldMismatch("matrix mixes entries of different fields")
    return Field(p or 0)


# ---------------------------------------------------------------------------
# pure-Python elimination


def _rref_python(rows, field: Field, ncols: int):
    """Gauss-Jordan elimination; returns (reduced nonzero rows, pivot columns)."""
    A = [[field(x) for x in row] for row in rows]
    pivots = []
    r = 0
    nrows = len(A)
    for c in range(ncols):
        piv = None
        for i in range(r, nrows):
            if A[i][c]:
                piv = i
                break
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = 1 / A[r][c] if field.p == 0 else field(1) / A[r][c]
        A[r] = [x * inv for x in A[r]]
        prow = A[r]
        for i in range(nrows):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], prow)]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return A[:r], pivots


def bareiss_rank(rows) -> int:
    """Rank of an integer matrix by fraction-free elimination."""
    A = [list(r) for r in rows]
    if not A:
        return 0
    m, n = len(A), len(A[0])
    prev = 1
    r = 0
    for c in range(n):
        piv = None
        for i in range(r, m):
            if A[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        for i in range(r + 1, m):
            A[i] = [(A[r][c] * A[i][j] - A[i][c] * A[r][j]) // prev for j in range(n)]
        prev = A[r][c]
        r += 1
        if r == m:
            break
    return r


def bareiss_det(rows) -> int:
    """Determinant of a square integer matrix by Bareiss elimination."""
    A = [list(r) for r in rows]
    n = len(A)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k] != 0), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


# ---------------------------------------------------------------------------
# flint bridge


def _integer_rows(rows):
    out = []
    for row in rows:
        den = 1
        for x in row:
            if isinstance(x, Fraction) and x.denominator != 1:
                den = den * x.denominator // gcd(den, x.denominator)
        if den == 1:
            out.append([int(x) for x in row])
        else:
            out.append([int(x * den) for x in row])
    return out


def _to_flint(rows, field: Field, ncols: int):
    if field.p == 0:
        return flint.fmpz_mat(len(rows), ncols, [v for r in _integer_rows(rows) for v in r])
    p = field.p
    return flint.nmod_mat(len(rows), ncols, [int(x) % p for r in rows for x in r], p)


def _use_flint(rows, ncols, backend):
    if backend == "python" or flint is None:
        return False
    if backend == "flint":
        return True
    return len(rows) * ncols >= _FLINT_MIN_ENTRIES


def _ncols(rows, ncols):
    if ncols is not None:
        return ncols
    if not rows:
        raise ValueError("column count needed for an empty matrix")
    return len(rows[0])


def rank(rows, field: Field | None = None, ncols: int | None = None, backend: str = "auto") -> int:
    if not rows:
        return 0
    ncols = _ncols(rows, ncols)
    field = field or infer_field(rows)
    if ncols == 0:
        return 0
    if _use_flint(rows, ncols, backend):
        return int(_to_flint(rows, field, ncols).rank())
    if field.p == 0 and backend == "python":
        return bareiss_rank(_integer_rows(rows))
    return len(_rref_python(rows, field, ncols)[1])


def rref(rows, field: Field | None = None, ncols: int | None = None, backend: str = "auto"):
    """Reduced row echelon form: (nonzero rows as field elements, pivot columns)."""
    ncols = _ncols(rows, ncols)
    if not rows:
        return [], []
    field = field or infer_field(rows)
    if not _use_flint(rows, ncols, backend):
        return _rref_python(rows, field, ncols)
    M = _to_flint(rows, field, ncols)
    if field.p == 0:
        R, den, rk = M.rref()
        den = int(den)
        out = [[Fraction(int(R[i, j]), den) for j in range(ncols)] for i in range(rk)]
    else:
        R, rk = M.rref()
        out = [[field(int(R[i, j])) for j in range(ncols)] for i in range(rk)]
    pivots = []
    for row in out:
        pivots.append(next(j for j, x in enumerate(row) if x))
    return out, pivots


def kernel(rows, field: Field | None = None, ncols: int | None = None, backend: str = "auto"):
    """Basis of {v : M v = 0}, one vector per free column (free entry 1)."""
    ncols = _ncols(rows, ncols)
    field = field or (infer_field(rows) if rows else QQ)
    R, pivots = rref(rows, field, ncols, backend)
    pivset = set(pivots)
    zero, one = field(0), field(1)
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        v = [zero] * ncols
        v[f] = one
        for row, pc in zip(R, pivots):
            if row[f]:
                v[pc] = -row[f]
        basis.append(v)
    return basis


def left_kernel(rows, field: Field | None = None, ncols: int | None = None, backend: str = "auto"):
    """Basis of {c : sum_i c_i row_i = 0}."""
    if not rows:
        return []
    ncols = _ncols(rows, ncols)
    return kernel(transpose(rows, ncols), field, len(rows), backend)


def solve(rows, rhs, field: Field | None = None, ncols: int | None = None, backend: str = "auto"):
    """A particular solution of M v = rhs, or None when inconsistent."""
    ncols = _ncols(rows, ncols)
    field = field or infer_field(list(rows) + [list(rhs)])
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    R, pivots = rref(aug, field, ncols + 1, backend)
    if pivots and pivots[-1] == ncols:
        return None
    v = [field(0)] * ncols
    for row, pc in zip(R, pivots):
        v[pc] = row[ncols]
    return v


def rank_kernel_solve(matrix, rhs=None, field: Field | None = None, ncols: int | None = None,
                      backend: str = "auto"):
    """(rank, kernel basis, particular solution or None)."""
    ncols = _ncols(matrix, ncols)
    entries = list(matrix) + ([list(rhs)] if rhs is not None else [])
    field = field or (infer_field(entries) if entries else QQ)
    R, pivots = rref(matrix, field, ncols, backend) if matrix else ([], [])
    ker = kernel(matrix, field, ncols, backend) if matrix else [
        [field(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    sol = None
    if rhs is not None:
        sol = solve(matrix, rhs, field, ncols, backend) if matrix else [field(0)] * ncols
    return len(pivots), ker, sol


def det(rows, field: Field | None = None, backend: str = "auto"):
    n = len(rows)
    if n == 0:
        return (field or QQ)(1)
    if any(len(r) != n for r in rows):
        raise ValueError("determinant of a non-square matrix")
    field = field or infer_field(rows)
    if field.p == 0:
        ints = []
        scale = Fraction(1)
        for row in rows:
            den = 1
            for x in row:
                if isinstance(x, Fraction):
                    den = den * x.denominator // gcd(den, x.denominator)
            scale /= den
            ints.append([int(x * den) for x in row])
        if _use_flint(ints, n, backend):
            d = int(flint.fmpz_mat(ints).det())
        else:
            d = bareiss_det(ints)
        return Fraction(d) * scale
    if _use_flint(rows, n, backend):
        return field(int(_to_flint(rows, field, n).det()))
    R = [[field(x) for x in row] for row in rows]
    d = field(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if R[i][c]), None)
        if piv is None:
            return field(0)
        if piv != c:
            R[c], R[piv] = R[piv], R[c]
            d = -d
        d = d * R[c][c]
        inv = field(1) / R[c][c]
        for i in range(c + 1, n):
            if R[i][c]:
                f = R[i][c] * inv
                R[i] = [a - f * b for a, b in zip(R[i], R[c])]
    return d


def transpose(rows, ncols: int | None = None):
    if not rows:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*rows)]


def matmul(A, B, field: Field):
    """Product of two scalar matrices given as row lists."""
    if not A:
        return []
    inner = len(B)
    ncols = len(B[0]) if B else 0
    zero = field(0)
    out = []
    for row in A:
        acc = [zero] * ncols
        for k in range(inner):
            a = row[k]
            if a:
                bk = B[k]
                acc = [x + a * y for x, y in zip(acc, bk)]
        out.append(acc)
    return out


def matvec(A, v, field: Field):
    zero = field(0)
    out = []
    for row in A:
        s = zero
        for a, b in zip(row, v):
            if a and b:
                s = s + a * b
        out.append(s)
    return out


def is_zero_matrix(A) -> bool:
    return all(not x for row in A for x in row)


def sparse_rank(rows, ncols: int, field: Field) -> int:
    """Rank of a matrix given as a list of {column: value} dicts."""
    rows = [r for r in rows if r]
    if not rows or ncols == 0:
        return 0
    if flint is not None:
        if field.p == 0:
            flat = []
            for r in rows:
                den = 1
                for x in r.values():
                    if isinstance(x, Fraction) and x.denominator != 1:
                        den = den * x.denominator // gcd(den, x.denominator)
                line = [0] * ncols
                for j, x in r.items():
                    line[j] = int(x * den) if den != 1 else int(x)
                flat.extend(line)
            return int(flint.fmpz_mat(len(rows), ncols, flat).rank())
        p = field.p
        flat = []
        for r in rows:
            line = [0] * ncols
            for j, x in r.items():
                line[j] = int(x) % p
            flat.extend(line)
        return int(flint.nmod_mat(len(rows), ncols, flat, p).rank())
    dense = []
    for r in rows:
        line = [field(0)] * ncols
        for j, x in r.items():
            line[j] = field(x)
        dense.append(line)
    return rank(dense, field, ncols, backend="python")


def _sparse_to_flint(rows, ncols: int, field: Field):
    flat = []
    for r in rows:
        den = 1
        if field.p == 0:
            for x in r.values():
                if isinstance(x, Fraction) and x.denominator != 1:
                    den = den * x.denominator // gcd(den, x.denominator)
        line = [0] * ncols
        for j, x in r.items():
            line[j] = (int(x * den) if den != 1 else int(x)) if field.p == 0 else int(x) % field.p
        flat.extend(line)
    if field.p == 0:
        return flint.fmpz_mat(len(rows), ncols, flat)
    return flint.nmod_mat(len(rows), ncols, flat, field.p)


def sparse_nullspace(rows, ncols: int, field: Field):
    """Some basis of {v : M v = 0} for M given as {column: value} dicts.

    Unlike :func:`kernel` the basis is not canonical; it is meant for large
    systems whose kernel is post-processed (projected and row reduced).
    """
    rows = [r for r in rows if r]
    if not rows:
        return [[field(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    if flint is None:
        dense = []
        for r in rows:
            line = [field(0)] * ncols
            for j, x in r.items():
                line[j] = field(x)
            dense.append(line)
        return kernel(dense, field, ncols, backend="python")
    X, nullity = _sparse_to_flint(rows, ncols, field).nullspace()
    nullity = int(nullity)
    return [[field(int(X[i, j])) for i in range(ncols)] for j in range(nullity)]
