"""Named arrangement families used by the examples, the tests and the CLI."""

from __future__ import annotations

from itertools import product as iproduct

from . import linalg
from .arrangement import (MultiArrangement, generic_arrangement, graphic_arrangement,
                          intersection_lattice)
from .linalg import Field, QQ


def x3(t=2, n: int = 1, field: Field = QQ) -> MultiArrangement:
    """x^n y^n z^n (x - t y)(x + z)(y + z)."""
    t = field(t)
    if not t:
        raise ValueError("t must be nonzero")
    return MultiArrangement(field, [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, -t, 0), (1, 0, 1), (0, 1, 1)],
                            [n, n, n, 1, 1, 1])


def two_pencils(alpha=2, beta=-2, mults=(3, 3, 3, 1, 1, 3), field: Field = QQ) -> MultiArrangement:
    """x, y, z, x - alpha z, x - beta z, y - z: a 4-line and a 3-line pencil sharing z."""
    a, b = field(alpha), field(beta)
    return MultiArrangement(field, [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 0, -a), (1, 0, -b), (0, 1, -1)],
                            list(mults))


def triangle_cycle(n: int = 3, alpha=2, beta=-2, field: Field = QQ) -> MultiArrangement:
    """x^n y^n z^n (x - alpha y)(x - beta y)(y - z)(x - z): three triple points in a cycle."""
    a, b = field(alpha), field(beta)
    return MultiArrangement(field, [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, -a, 0), (1, -b, 0),
                                    (0, 1, -1), (1, 0, -1)], [n, n, n, 1, 1, 1, 1])


def arrt(r: int, t=-1, field: Field = QQ) -> MultiArrangement:
    """A_{r,t} in x0..xr: x0, x_i -+ x0, x_i - x_(i+1), x_r - t x1 (x0 first)."""
    if r < 3:
        raise ValueError("r must be at least 3")
    t = field(t)
    if not t:
        raise ValueError("t must be nonzero")
    n = r + 1

    def form(**kw):
        f = [field(0)] * n
        for i, c in kw.items():
            f[int(i[1:])] = field(c)
        return f

    forms = [form(x0=1)]
    for i in range(1, r + 1):
        forms.append(form(**{f"x{i}": 1, "x0": -1}))
        forms.append(form(**{f"x{i}": 1, "x0": 1}))
    for i in range(1, r):
        forms.append(form(**{f"x{i}": 1, f"x{i + 1}": -1}))
    last = form(**{f"x{r}": 1})
    last[1] = -t
    forms.append(last)
    return MultiArrangement(field, forms, names=[f"x{i}" for i in range(n)])


def xrt(r: int, t=2, doubled: bool = False, field: Field = QQ) -> MultiArrangement:
    """X_{r,t} in x1..xr: x_i, x_i - x_(i+1), x_r - t x1; ``doubled`` puts m = 2 on the x_i."""
    if r < 3:
        raise ValueError("r must be at least 3")
    t = field(t)
    if not t:
        raise ValueError("t must be nonzero")
    forms = []
    for i in range(r):
        f = [field(0)] * r
        f[i] = field(1)
        forms.append(f)
    for i in range(r - 1):
        f = [field(0)] * r
        f[i], f[i + 1] = field(1), field(-1)
        forms.append(f)
    f = [field(0)] * r
    f[r - 1], f[0] = field(1), -t
    forms.append(f)
    mults = [2] * r + [1] * r if doubled else None
    return MultiArrangement(field, forms, mults, names=[f"x{i}" for i in range(1, r + 1)])


def boolean(ell: int, mults=None, field: Field = QQ) -> MultiArrangement:
    forms = [[int(i == j) for j in range(ell)] for i in range(ell)]
    return MultiArrangement(field, forms, mults)


def braid(n: int, field: Field = QQ) -> MultiArrangement:
    """x_i - x_j for i < j in n variables (not essential)."""
    edges = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    return graphic_arrangement(edges, field=field)


def braid_essential(field: Field = QQ) -> MultiArrangement:
    """The rank-3 braid arrangement xyz(x-y)(x-z)(y-z)."""
    return MultiArrangement(field, [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, -1, 0), (1, 0, -1), (0, 1, -1)])


def cycle_chord(mults=None, field: Field = QQ) -> MultiArrangement:
    """x y z (x - y)(y - z): the 4-cycle with a chord, triple points on y."""
    return MultiArrangement(field, [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, -1, 0), (0, 1, -1)], mults)


CYCLE_CHORD_EDGES = [(1, 2), (2, 3), (3, 4), (4, 1), (1, 3)]


def path_of_triangles(mults=None, field: Field = QQ) -> MultiArrangement:
    """x y z w (x - y)(y - z)(z - w)."""
    forms = [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1),
             (1, -1, 0, 0), (0, 1, -1, 0), (0, 0, 1, -1)]
    return MultiArrangement(field, forms, mults)


def pencil3(m_x: int, m_y: int, m_z: int, field: Field = QQ) -> MultiArrangement:
    """x^a y^b (x - y)^c."""
    return MultiArrangement(field, [(1, 0), (0, 1), (1, -1)], [m_x, m_y, m_z])


def generic(n: int, ell: int, field: Field = QQ) -> MultiArrangement:
    return generic_arrangement(n, ell, field)


# ---------------------------------------------------------------------------
# the Ziegler pair: nine lines, six triple points


# hexagon vertices and the lines through them (1-based line labels)
ZIEGLER_VERTEX_LINES = [(1, 4, 5), (1, 3, 8), (2, 8, 9), (2, 5, 6), (3, 6, 7), (4, 7, 9)]
# line label -> the two hexagon vertices (0-based) it joins
ZIEGLER_LINE_VERTICES = {1: (0, 1), 8: (1, 2), 2: (2, 3), 6: (3, 4), 7: (4, 5), 4: (5, 0),
                         5: (0, 3), 3: (1, 4), 9: (2, 5)}


def _cross(u, v):
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


def _veronese(p):
    x, y, z = p
    return [x * x, x * y, y * y, x * z, y * z, z * z]


def on_conic(points, field: Field = QQ) -> bool:
    """Six points lie on a conic iff their Veronese images are dependent."""
    return linalg.det([[field(c) for c in _veronese(p)] for p in points], field) == 0


def ziegler_from_points(points, field: Field = QQ) -> MultiArrangement:
    forms = []
    for label in range(1, 10):
        a, b = ZIEGLER_LINE_VERTICES[label]
        forms.append(tuple(field(c) for c in _cross(points[a], points[b])))
    return MultiArrangement(field, forms)


def _ziegler_profile_ok(A: MultiArrangement) -> bool:
    L = intersection_lattice(A)
    triples = sorted(X.key for X in L.triple_flats())
    want = sorted(tuple(sorted(i - 1 for i in v)) for v in ZIEGLER_VERTEX_LINES)
    return L.rank == 3 and triples == want and all(len(X) <= 3 for X in L.flats(2))


def ziegler_pair(conic: bool = True, field: Field = QQ, grid=range(-4, 5)):
    """(arrangement, hexagon vertices) realizing the nine-line lattice.

    The conic realization puts the six vertices on y z = x^2 at parameters
    searched over a small integer grid; the other perturbs one vertex off
    the conic.  Both must reproduce exactly the six prescribed triple points.
    """
    for params in iproduct(grid, repeat=6):
        if len(set(params)) < 6:
            continue
        pts = [(field(1), field(s), field(s * s)) for s in params]
        try:
            A = ziegler_from_points(pts, field)
        except ValueError:
            continue
        if not _ziegler_profile_ok(A):
            continue
        if conic:
            return A, pts
        for k in range(5):
            for shift in (1, -1, 2, -2, 3):
                moved = list(pts)
                x, y, z = moved[k]
                moved[k] = (x, y, z + field(shift))
                if on_conic(moved, field):
                    continue
                try:
                    B = ziegler_from_points(moved, field)
                except ValueError:
                    continue
                if _ziegler_profile_ok(B):
                    return B, moved
    raise LookupError("no realization found on the search grid")


# ---------------------------------------------------------------------------
# registry for the command line


FAMILIES = {
    "x3": "x^n y^n z^n (x - t y)(x + z)(y + z); params t, mult n",
    "two-pencils": "x y z (x - a z)(x - b z)(y - z); params a, b, mult list m",
    "triangle-cycle": "x^n y^n z^n (x - a y)(x - b y)(y - z)(x - z); params a, b, mult n",
    "arrt": "A_{r,t}; params r, t",
    "xrt": "X_{r,t}; params r, t, mult doubled=0|1",
    "boolean": "coordinate hyperplanes; param l, mult list m",
    "braid": "rank-3 braid arrangement",
    "cycle-chord": "x y z (x - y)(y - z); mult list m",
    "path-triangles": "x y z w (x - y)(y - z)(z - w); mult list m",
    "ziegler": "nine lines with six triple points; param conic=1|0",
    "generic": "n generic hyperplanes in l variables; params n, l",
}


def build_family(name: str, params: dict, mults: dict, field: Field = QQ) -> MultiArrangement:
    """Build a named family; ``params`` and ``mults`` hold strings from the command line."""
    P = {k: field(v) for k, v in params.items()}

    def ints(key, default):
        return int(str(params.get(key, default)))

    def mult_list(default=None):
        if "m" not in mults:
            return default
        return [int(x) for x in str(mults["m"]).split(",")]

    n = int(str(mults.get("n", 1)))
    if name == "x3":
        return x3(P.get("t", field(2)), n, field)
    if name == "two-pencils":
        return two_pencils(P.get("a", field(2)), P.get("b", field(-2)),
                           mult_list([3, 3, 3, 1, 1, 3]), field)
    if name == "triangle-cycle":
        return triangle_cycle(int(str(mults.get("n", 3))), P.get("a", field(2)), P.get("b", field(-2)), field)
    if name == "arrt":
        return arrt(ints("r", 3), P.get("t", field(-1)), field)
    if name == "xrt":
        return xrt(ints("r", 3), P.get("t", field(2)), bool(int(str(mults.get("doubled", 0)))), field)
    if name == "boolean":
        return boolean(ints("l", 3), mult_list(), field)
    if name == "braid":
        return braid_essential(field)
    if name == "cycle-chord":
        return cycle_chord(mult_list(), field)
    if name == "path-triangles":
        return path_of_triangles(mult_list(), field)
    if name == "ziegler":
        return ziegler_pair(bool(ints("conic", 1)), field)[0]
    if name == "generic":
        return generic(ints("n", 4), ints("l", 3), field)
    raise ValueError(f"unknown family {name!r}; known: {', '.join(sorted(FAMILIES))}")

