"""The freeness decision pipeline and its certificates.

Every Free verdict carries a Saito basis or a TF2 classifier witness, every
NotFree verdict carries a certificate that :func:`validate_certificate` can
re-check from scratch, and Undetermined is reported when the degree bound
is exhausted without either.
"""

from __future__ import annotations

import os
import random
import time
from dataclasses import dataclass, field as dc_field
from itertools import combinations, product as iproduct

from . import linalg
from .arrangement import (MultiArrangement, characteristic_polynomial, essentialize,
                          intersection_lattice, irreducible_components, ziegler_restriction)
from .complexes import build_S_complex, is_totally_formal
from .derivations import Derivation, free_basis_search, saito_check
from .homology import default_dmax, freeness_by_homology
from .poly import Poly

VERSION = 1


@dataclass
class FreenessVerdict:
    status: str                         # "Free" | "NotFree" | "Undetermined"
    kind: str                           # certificate kind
    data: dict = dc_field(default_factory=dict)
    exponents: tuple | None = None
    degree_bound: int | None = None
    timings: dict = dc_field(default_factory=dict)
    basis: list | None = None           # Derivations backing a Saito certificate
    subject: MultiArrangement | None = None
    inner: list = dc_field(default_factory=list)   # sub-verdicts the certificate relies on

    @property
    def free(self) -> bool:
        return self.status == "Free"

    def to_json(self, timings: bool = False) -> dict:
        names = self.subject.names if self.subject is not None else None
        data = dict(self.data)
        if self.basis is not None:
            data["basis"] = [t.to_strs(names) for t in self.basis]
        if self.inner:
            data["inner"] = [v.to_json(timings) for v in self.inner]
        out = {
            "version": VERSION,
            "status": self.status,
            "certificate": {"kind": self.kind, "data": data},
            "degree_bound": self.degree_bound,
            "timings": {k: round(v, 4) for k, v in self.timings.items()} if timings else {},
        }
        if self.exponents is not None:
            out["exponents"] = list(self.exponents)
        return out


def _verdict(status, kind, A, data=None, **kw):
    return FreenessVerdict(status, kind, data or {}, subject=A, **kw)


# ---------------------------------------------------------------------------
# combinatorial gates


def _generic_flat(A: MultiArrangement, X) -> bool:
    forms = [list(A.forms[i]) for i in X.key]
    k = X.rank
    return all(linalg.rank(list(sub), A.field, A.nvars) == k for sub in combinations(forms, k))


def circuit_bound_flat(A: MultiArrangement, L=None):
    """A closed generic flat X with r(X) >= 3 and |A_X| > r(X), or None."""
    L = L or intersection_lattice(A)
    for k in range(3, L.rank + 1):
        for X in L.flats(k):
            if len(X) > k and _generic_flat(A, X):
                return X
    return None


def generic_non_separator(A: MultiArrangement, L=None):
    """A hyperplane on only double points whose removal keeps the rank, or None."""
    L = L or intersection_lattice(A)
    r = L.rank
    if r < 2:
        return None
    for h in range(A.size):
        if any(h in X.indices and len(X) > 2 for X in L.flats(2)):
            continue
        rest = [list(A.forms[i]) for i in range(A.size) if i != h]
        if rest and linalg.rank(rest, A.field, A.nvars) == r:
            return h
    return None


# ---------------------------------------------------------------------------
# lifting a basis through essentialization


def _lift_basis(A: MultiArrangement, basis, pivots, inner_basis):
    from .tf2 import lift_derivation

    field, n = A.field, A.nvars
    lifted = [lift_derivation(t, basis, pivots, n) for t in inner_basis]
    for v in linalg.kernel([list(f) for f in A.forms], field, n):
        lifted.append(Derivation([Poly.const(field, n, c) for c in v], 0))
    return lifted


# ---------------------------------------------------------------------------
# the pipeline


def decide_freeness(A: MultiArrangement, m=None, d_max: int | None = None,
                    use_tf2_fast_path: bool = True, jobs: int = 1) -> FreenessVerdict:
    if m is not None:
        A = A.with_multiplicities(m)
    t0 = time.perf_counter()
    v = _decide(A, d_max, use_tf2_fast_path, jobs)
    v.timings["total"] = time.perf_counter() - t0
    return v


def _decide(A, d_max, fast, jobs) -> FreenessVerdict:
    timings = {}

    def tick(name, start):
        timings[name] = time.perf_counter() - start

    # (a) essential, irreducible
    if not A.is_essential():
        ess, basis, piv = essentialize(A)
        inner = decide_freeness(ess, None, d_max, fast, jobs)
        data = {"reason": "not essential", "center_dimension": A.nvars - ess.nvars}
        exps = None
        lifted = None
        if inner.free:
            exps = tuple(sorted(list(inner.exponents) + [0] * (A.nvars - ess.nvars), reverse=True))
            if inner.basis is not None:
                lifted = _lift_basis(A, basis, piv, inner.basis)
        return _verdict(inner.status, "NotEssentialReduction", A, data, exponents=exps,
                        degree_bound=inner.degree_bound, basis=lifted, inner=[inner])
    comps = irreducible_components(A)
    if len(comps) > 1:
        subs = [decide_freeness(A.select(c), None, d_max, fast, jobs) for c in comps]
        data = {"reason": "reducible", "factors": [[i + 1 for i in c] for c in comps]}
        bad = [s for s in subs if not s.free]
        if bad:
            status = "NotFree" if any(s.status == "NotFree" for s in bad) else "Undetermined"
            return _verdict(status, "NotEssentialReduction", A, data, inner=subs,
                            degree_bound=max((s.degree_bound or 0) for s in subs))
        exps = tuple(sorted((e for s in subs for e in s.exponents if e), reverse=True))
        res = free_basis_search(A, d_max=max(exps))
        if not res.free or tuple(res.exponents) != exps:
            raise ArithmeticError("product of free factors without a matching basis")
        return _verdict("Free", "NotEssentialReduction", A, data, exponents=exps,
                        basis=res.basis, inner=subs)
    r = A.nvars
    # (b) rank at most two
    if r <= 2:
        res = free_basis_search(A)
        return _verdict("Free", "SaitoBasis", A, {"reason": "rank at most 2"},
                        exponents=res.exponents, basis=res.basis, timings=timings)
    # (c) gates
    start = time.perf_counter()
    L = intersection_lattice(A)
    X = circuit_bound_flat(A, L)
    if X is not None:
        return _verdict("NotFree", "CircuitBound", A,
                        {"flat": [i + 1 for i in X.key], "rank": X.rank, "size": len(X),
                         "pdim_lower_bound": X.rank - 2}, timings=timings)
    h = generic_non_separator(A, L)
    if h is not None:
        return _verdict("NotFree", "GenericHyperplane", A, {"hyperplane": h + 1}, timings=timings)
    S = build_S_complex(A, L)
    ok, Xf, level = is_totally_formal(A, S)
    if not ok:
        return _verdict("NotFree", "NotFormal", A,
                        {"flat": [i + 1 for i in Xf.key], "level": level}, timings=timings)
    tick("gates", start)
    # (d) TF2 fast path
    if fast and A.field.characteristic == 0 and not any(S.module_ranks()[3:]):
        start = time.perf_counter()
        v = _tf2_path(A, L)
        tick("tf2", start)
        if v is not None:
            v.timings.update(timings)
            return v
    # (e) closed rank-3 subarrangements
    if r >= 4:
        start = time.perf_counter()
        for X in L.flats(3):
            sub = decide_freeness(A.select(X.key), None, d_max, fast, jobs)
            if sub.status == "NotFree":
                tick("subarrangements", start)
                return _verdict("NotFree", "SubarrangementNotFree", A,
                                {"flat": [i + 1 for i in X.key]}, inner=[sub], timings=timings)
        tick("subarrangements", start)
    # (g) Saito search before the homology scan: it is cheap and settles free inputs
    start = time.perf_counter()
    res = free_basis_search(A)
    tick("saito", start)
    if res.free:
        return _verdict("Free", "SaitoBasis", A, {"reason": res.reason},
                        exponents=res.exponents, basis=res.basis,
                        degree_bound=res.degree_reached, timings=timings)
    # (f) truncated homology
    start = time.perf_counter()
    bound = default_dmax(A) if d_max is None else d_max
    hv = freeness_by_homology(A, d_max=bound, stop_at_first=True, jobs=jobs)
    tick("homology", start)
    if hv.status == "NotFree":
        dim = hv.table.dims[(hv.level, hv.degree)]
        return _verdict("NotFree", "NonzeroHomology", A,
                        {"level": hv.level, "degree": hv.degree, "dim": dim,
                         "saito_search": res.reason},
                        degree_bound=bound, timings=timings)
    if hv.status == "NotFormal":
        return _verdict("NotFree", "NotFormal", A, {"flat": [i + 1 for i in hv.flat], "level": hv.level},
                        timings=timings)
    return _verdict("Undetermined", "NonzeroHomology", A,
                    {"reason": "homology vanishes up to the bound and no Saito basis was found",
                     "saito_search": res.reason}, degree_bound=bound, timings=timings)


def _tf2_path(A: MultiArrangement, L):
    from .tf2 import classify_free_tf2_multiplicity, classify_nonfree_tf2_multiplicity

    T = L.triple_flats()
    r = L.rank
    counts = {"rank": r, "triples": len(T), "size": A.size,
              "sum_excess": sum(len(X) - 1 for X in T)}
    if A.is_simple() and len(T) >= r:
        counts["h2_degree1"] = counts["sum_excess"] - A.size + 1
        return _verdict("NotFree", "EulerCharObstruction", A, counts)
    if len(T) == r - 1:
        c = classify_free_tf2_multiplicity(A)
    elif len(T) == r:
        c = classify_nonfree_tf2_multiplicity(A)
    elif len(T) > r:
        counts["totally_non_free"] = True
        return _verdict("NotFree", "TF2Classifier", A, counts)
    else:
        return None
    data = dict(counts, **c.to_json())
    if c.free:
        return _verdict("Free", "TF2Classifier", A, data, exponents=_tf2_exponents(A))
    kind = "CycleConditionFailed" if c.route == "cycle" else "TF2Classifier"
    return _verdict("NotFree", kind, A, data)


def _tf2_exponents(A):
    """Exponents for a classifier-certified free multiplicity (by the Saito search)."""
    res = free_basis_search(A)
    return tuple(res.exponents) if res.free else None


# ---------------------------------------------------------------------------
# Yoshinaga's criterion through the Ziegler restriction


def _poly_from_roots(roots):
    c = [1]
    for a in roots:
        nxt = [0] * (len(c) + 1)
        for k, v in enumerate(c):
            nxt[k + 1] += v
            nxt[k] -= a * v
        c = nxt
    return c


def yoshinaga_check(A: MultiArrangement, h: int = 0, d_max: int | None = None) -> FreenessVerdict:
    """Freeness of a simple A from its Ziegler multirestriction to H_h (characteristic 0)."""
    if A.field.characteristic:
        raise ValueError("the restriction criterion is used in characteristic 0 only")
    if not A.is_simple():
        raise ValueError("simple arrangement required")
    if not A.is_essential():
        A = essentialize(A)[0]
    Z = ziegler_restriction(A, h)
    vz = decide_freeness(Z, None, d_max)
    data = {"hyperplane": h + 1, "restriction": Z.polynomial_str()}
    if vz.status == "NotFree":
        data["failed"] = "Ziegler restriction is not free"
        return _verdict("NotFree", "SubarrangementNotFree", A, data, inner=[vz])
    if vz.status != "Free":
        return _verdict("Undetermined", "SubarrangementNotFree", A, data, inner=[vz])
    zexps = [e for e in vz.exponents if e]
    data["restriction_exponents"] = list(vz.exponents)
    L = intersection_lattice(A)
    if L.rank >= 4:
        for X in L.flats(3):
            if h not in X.indices:
                continue
            sub = decide_freeness(A.select(X.key))
            if sub.status == "NotFree":
                data["failed"] = "closed rank-3 subarrangement through H is not free"
                data["flat"] = [i + 1 for i in X.key]
                return _verdict("NotFree", "SubarrangementNotFree", A, data, inner=[sub])
            if sub.status != "Free":
                return _verdict("Undetermined", "SubarrangementNotFree", A, data, inner=[sub])
    chi = characteristic_polynomial(A, L)
    expected = _poly_from_roots([1] + zexps)
    expected += [0] * (len(chi) - len(expected))
    if chi != expected:
        data["failed"] = "characteristic polynomial does not factor by the restriction exponents"
        data["chi"] = chi
        return _verdict("NotFree", "EulerCharObstruction", A, data, inner=[vz])
    exps = tuple(sorted([1] + zexps, reverse=True))
    res = free_basis_search(A, d_max=max(exps))
    if not res.free or tuple(res.exponents) != exps:
        raise ArithmeticError("restriction criterion and Saito search disagree")
    data["route"] = "restriction"
    return _verdict("Free", "SaitoBasis", A, data, exponents=exps, basis=res.basis, inner=[vz])


# ---------------------------------------------------------------------------
# certificate re-validation


def validate_certificate(v: FreenessVerdict) -> bool:
    """Re-check a verdict's certificate independently of the pipeline."""
    from .tf2 import (TotallyNonFree, classify_free_tf2_multiplicity,
                      classify_nonfree_tf2_multiplicity, is_TF2)
    from .homology import _DegreeEngine
    from .complexes import build_J_complex

    A = v.subject
    if v.status == "Undetermined":
        return True
    if v.basis is not None:
        if not saito_check(A, None, v.basis):
            return False
        if v.exponents is not None and sorted(t.degree for t in v.basis) != sorted(v.exponents):
            return False
    kind = v.kind
    if kind == "NotEssentialReduction":
        return all(validate_certificate(s) for s in v.inner) and (
            v.status != "Free" or all(s.free for s in v.inner))
    if kind == "SaitoBasis":
        return v.status == "Free" and v.basis is not None
    if kind == "TF2Classifier" and v.status == "Free":
        c = classify_free_tf2_multiplicity(A) if v.data.get("route") == "tree" else \
            classify_nonfree_tf2_multiplicity(A)
        return c.free
    L = intersection_lattice(A)
    if kind == "CircuitBound":
        X = L.flat(i - 1 for i in v.data["flat"])
        return X.rank >= 3 and len(X) > X.rank and _generic_flat(A, X)
    if kind == "GenericHyperplane":
        h = v.data["hyperplane"] - 1
        if any(h in X.indices and len(X) > 2 for X in L.flats(2)):
            return False
        rest = [list(A.forms[i]) for i in range(A.size) if i != h]
        return linalg.rank(rest, A.field, A.nvars) == L.rank >= 2
    if kind == "NotFormal":
        X = L.flat(i - 1 for i in v.data["flat"])
        S = build_S_complex(A, L)
        return S.restrict(X).cohomology()[v.data["level"]] != 0
    if kind == "NonzeroHomology":
        eng = _DegreeEngine(build_J_complex(A))
        return eng.cohomology(v.data["level"], v.data["degree"]) == v.data["dim"] > 0
    if kind == "SubarrangementNotFree":
        return bool(v.inner) and v.inner[0].status == "NotFree" and validate_certificate(v.inner[0])
    if kind == "EulerCharObstruction":
        if "chi" in v.data:
            return characteristic_polynomial(A, L) == v.data["chi"] and bool(v.inner) and \
                validate_certificate(v.inner[0])
        T = L.triple_flats()
        return A.is_simple() and is_TF2(A) and len(T) >= L.rank
    if kind == "TF2Classifier":
        if v.data.get("totally_non_free"):
            try:
                classify_nonfree_tf2_multiplicity(A)
            except TotallyNonFree:
                return True
            return False
        return not classify_free_tf2_multiplicity(A).free
    if kind == "CycleConditionFailed":
        return not classify_nonfree_tf2_multiplicity(A).free
    return False


# ---------------------------------------------------------------------------
# sampling parameterized families


def default_seed() -> int:
    return int(os.environ.get("ARRH_SEED", "0"))


def moduli_sample(family, params: dict, trials: int, seed: int | None = None,
                  reference: dict | None = None, **decide_kw) -> dict:
    """Sample parameter tuples, keep those with the reference lattice, and partition by verdict.

    ``family`` maps a parameter dict to a MultiArrangement; ``params`` maps
    each parameter name to a list of candidate values.  Tuples whose
    lattice profile differs from the reference (or that fail to build) are
    recorded as degenerate.
    """
    seed = default_seed() if seed is None else seed
    rng = random.Random(seed)
    names = sorted(params)
    if reference is None:
        for choice in iproduct(*(params[k] for k in names)):
            try:
                family(dict(zip(names, choice)))
            except ValueError:
                continue
            reference = dict(zip(names, choice))
            break
        else:
            raise ValueError("no parameter tuple builds an arrangement")
    ref_profile = intersection_lattice(family(reference)).profile()
    out = {"seed": seed, "free": [], "not_free": [], "undetermined": [], "degenerate": []}
    seen = set()
    for _ in range(trials):
        choice = tuple(rng.choice(params[k]) for k in names)
        if choice in seen:
            continue
        seen.add(choice)
        p = dict(zip(names, choice))
        label = {k: str(x) for k, x in p.items()}
        try:
            A = family(p)
        except ValueError:
            out["degenerate"].append(label)
            continue
        if intersection_lattice(A).profile() != ref_profile:
            out["degenerate"].append(label)
            continue
        v = decide_freeness(A, **decide_kw)
        key = {"Free": "free", "NotFree": "not_free"}.get(v.status, "undetermined")
        out[key].append(label)
    if not (out["free"] or out["not_free"] or out["undetermined"]):
        raise ValueError("no valid samples")
    return out
