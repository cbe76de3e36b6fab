"""Command-line front end.

Exit codes: 0 when a verdict or report was produced (NotFree included),
2 when a freeness question is left Undetermined, 1 on input errors.
"""

from __future__ import annotations

import json
import sys
from fractions import Fraction

import click

from . import __version__
from .analyzer import decide_freeness, default_seed, moduli_sample, yoshinaga_check
from .arrangement import (MultiArrangement, characteristic_polynomial, characteristic_polynomial_str,
                          essentialize, integer_roots, intersection_lattice, irreducible_components)
from .complexes import build_J_complex, build_S_complex, formality_profile, is_totally_formal
from .derivations import free_basis_search, minimal_generator_degrees, rank2_exponents
from .families import FAMILIES, build_family
from .homology import default_dmax, homology_table, pdim_bounds
from .linalg import parse_field
from .textformat import ParseError, parse_arrangement, parse_product, serialize
from .tf2 import (NotTF2, TotallyNonFree, classify_free_tf2_multiplicity,
                  classify_nonfree_tf2_multiplicity, h2_presentation, incidence_graphs, is_TF2,
                  supersolvable_filtration, terao_rank3_complex, tf2_freeness_combinatorial, xrt_report)

EXIT_OK, EXIT_INPUT, EXIT_UNDETERMINED = 0, 1, 2


class InputError(click.ClickException):
    exit_code = EXIT_INPUT


def _pairs(items, what):
    out = {}
    for item in items:
        if "=" not in item:
            raise InputError(f"--{what} expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def input_options(f):
    f = click.option("--file", "path", type=click.Path(exists=True, dir_okay=False),
                     help="arrangement file")(f)
    f = click.option("--family", help="named family: " + ", ".join(sorted(FAMILIES)))(f)
    f = click.option("--param", multiple=True, help="family parameter key=value (p/q allowed)")(f)
    f = click.option("--mult", multiple=True, help="family multiplicity key=value")(f)
    f = click.option("--field", "field_name", default=None, help="Q or GF(p) for families")(f)
    return f


def output_options(f):
    f = click.option("--json", "as_json", is_flag=True, help="print a JSON report")(f)
    return f


def load(path, family, param, mult, field_name) -> MultiArrangement:
    if bool(path) == bool(family):
        raise InputError("give exactly one of --file or --family")
    try:
        if path:
            A = parse_arrangement(path)
            if field_name and parse_field(field_name) != A.field:
                raise InputError(f"--field {field_name} conflicts with the file's field {A.field.name}")
            return A
        field = parse_field(field_name or "Q")
        return build_family(family, _pairs(param, "param"), _pairs(mult, "mult"), field)
    except ParseError as exc:
        raise InputError(f"{path}: {exc}" if path else str(exc)) from None
    except (ValueError, ZeroDivisionError, LookupError) as exc:
        raise InputError(str(exc)) from None


def _render(obj, indent=0):
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and not _flat_list(v):
                lines.append(f"{pad}{k}:")
                lines.extend(_render(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)) and v and not _flat_list(v):
                lines.append(f"{pad}-")
                lines.extend(_render(v, indent + 1))
            else:
                lines.append(f"{pad}- {_scalar(v)}")
    else:
        lines.append(pad + _scalar(obj))
    return lines


def _flat_list(v):
    return isinstance(v, list) and all(not isinstance(x, (dict, list)) for x in v)


def _scalar(v):
    if isinstance(v, list):
        return "[" + ", ".join(_scalar(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{}"
    return str(v)


def emit(report: dict, as_json: bool, headline: str | None = None):
    if as_json:
        click.echo(json.dumps(report, indent=2, sort_keys=True))
        return
    if headline:
        click.echo(headline)
    click.echo("\n".join(_render(report)))


def _header(A: MultiArrangement) -> dict:
    return {"version": 1, "field": A.field.name, "vars": A.nvars,
            "arrangement": A.polynomial_str(), "rank": A.rank()}


@click.group()
@click.version_option(__version__, prog_name="arrh")
def cli():
    """Exact computations on multi-arrangements of hyperplanes."""


# ---------------------------------------------------------------------------


@cli.command()
@input_options
@output_options
def lattice(path, family, param, mult, field_name, as_json):
    """Intersection lattice, characteristic polynomial and irreducible factors."""
    A = load(path, family, param, mult, field_name)
    L = intersection_lattice(A)
    report = _header(A)
    report["flats"] = {str(k): [X.label() for X in L.flats(k)] for k in range(1, L.rank + 1)}
    report["triple_flats"] = [X.label() for X in L.triple_flats()]
    report["profile"] = [len(L.flats(k)) for k in range(L.rank + 1)]
    if A.is_simple():
        chi = characteristic_polynomial(A, L)
        roots = integer_roots(chi)
        report["characteristic_polynomial"] = characteristic_polynomial_str(chi)
        report["factors_over_Z"] = roots is not None
        if roots is not None:
            report["roots"] = roots
    report["irreducible_components"] = [[i + 1 for i in c] for c in irreducible_components(A)]
    emit(report, as_json)
    return EXIT_OK


@cli.command()
@input_options
@output_options
def formality(path, family, param, mult, field_name, as_json):
    """k-formality from the scalar complex, and total formality."""
    A = load(path, family, param, mult, field_name)
    E = essentialize(A)[0] if not A.is_essential() else A
    S = build_S_complex(E)
    prof = formality_profile(S)
    ok, X, i = is_totally_formal(E, S)
    report = _header(A)
    report.update(prof.to_json())
    report["totally_formal"] = ok
    if not ok:
        report["failing_flat"] = [h + 1 for h in X.key]
        report["failing_level"] = i
    emit(report, as_json)
    return EXIT_OK


@cli.command()
@input_options
@output_options
@click.option("--generators", is_flag=True, help="also print the generators of J")
def complex(path, family, param, mult, field_name, as_json, generators):
    """The scalar complex S (and optionally the generator complex J)."""
    A = load(path, family, param, mult, field_name)
    E = essentialize(A)[0] if not A.is_essential() else A
    S = build_S_complex(E)
    report = _header(A)
    report["S"] = S.to_json()
    report["S_cohomology"] = S.cohomology()
    report["composites_vanish"] = S.composites_vanish()
    if generators:
        report["J"] = build_J_complex(E, E.mults, S).to_json()
    emit(report, as_json)
    return EXIT_OK


@cli.command()
@input_options
@output_options
@click.option("--dmax", type=int, default=None, help="top degree (default |m| + rank)")
@click.option("--jobs", type=int, default=1, help="worker processes")
def homology(path, family, param, mult, field_name, as_json, dmax, jobs):
    """Degree-by-degree cohomology table of the generator complex J."""
    A = load(path, family, param, mult, field_name)
    E = essentialize(A)[0] if not A.is_essential() else A
    d_max = default_dmax(E) if dmax is None else dmax
    S = build_S_complex(E)
    ok, X, i = is_totally_formal(E, S)
    J = build_J_complex(E, E.mults, S)
    table = homology_table(J, d_max, jobs=jobs)
    report = _header(A)
    report["totally_formal"] = ok
    if not ok:
        report["note"] = ("not totally formal: vanishing of the table does not decide freeness; "
                          f"flat {X.label()} fails at level {i}")
    report["table"] = table.to_json()
    report["pdim"] = pdim_bounds(E, None, table if ok else None).to_json()
    emit(report, as_json)
    return EXIT_OK


@cli.command()
@input_options
@output_options
@click.option("--dmax", type=int, default=None, help="degree bound for searches")
@click.option("--jobs", type=int, default=1, help="worker processes")
@click.option("--no-fast-path", is_flag=True, help="skip the TF2 combinatorial classifiers")
@click.option("--timings", is_flag=True, help="include timings in the JSON report")
def freeness(path, family, param, mult, field_name, as_json, dmax, jobs, no_fast_path, timings):
    """Decide freeness and print a certificate."""
    A = load(path, family, param, mult, field_name)
    v = decide_freeness(A, d_max=dmax, use_tf2_fast_path=not no_fast_path, jobs=jobs)
    report = v.to_json(timings=timings)
    report["arrangement"] = A.polynomial_str()
    head = f"{v.status}" + (f" exponents {tuple(v.exponents)}" if v.exponents else "") + f" [{v.kind}]"
    emit(report, as_json, head)
    return EXIT_UNDETERMINED if v.status == "Undetermined" else EXIT_OK


@cli.command()
@input_options
@output_options
@click.option("--dmax", type=int, default=8, help="top degree of the H^2 presentation table")
def tf2(path, family, param, mult, field_name, as_json, dmax):
    """TF2 combinatorics, incidence graph, multiplicity classifiers and H^2 presentation."""
    A = load(path, family, param, mult, field_name)
    report = _header(A)
    simple = A.simple()
    if not is_TF2(simple):
        report["tf2"] = False
        emit(report, as_json)
        return EXIT_OK
    report["tf2"] = True
    comb = None
    try:
        comb = tf2_freeness_combinatorial(simple)
        report["combinatorics"] = comb.to_json()
        if comb.free:
            report["filtration"] = supersolvable_filtration(simple).to_json()
    except NotTF2 as exc:
        report["combinatorics"] = {"note": str(exc)}
    report["incidence_graph"] = incidence_graphs(essentialize(simple)[0]).to_json()
    if A.field.characteristic == 0 and comb is not None:
        try:
            if comb.triples == comb.rank - 1:
                report["classifier"] = classify_free_tf2_multiplicity(A).to_json()
            else:
                report["classifier"] = classify_nonfree_tf2_multiplicity(A).to_json()
        except (NotTF2, TotallyNonFree, ValueError) as exc:
            report["classifier"] = {"status": "NotApplicable", "reason": str(exc)}
    try:
        report["h2_presentation"] = h2_presentation(A).to_json(dmax)
    except (NotTF2, ValueError) as exc:
        report["h2_presentation"] = {"note": str(exc)}
    emit(report, as_json)
    return EXIT_OK


@cli.command()
@input_options
@output_options
@click.option("--rank2", "product", default=None, help='product string, e.g. "x^3 y^3 (x-y)^3"')
@click.option("--dmax", type=int, default=None, help="degree bound")
def exponents(path, family, param, mult, field_name, as_json, product, dmax):
    """Exponents (free case) and minimal generator degrees."""
    if product is not None:
        if path or family:
            raise InputError("--rank2 cannot be combined with --file or --family")
        try:
            A = parse_product(product, parse_field(field_name or "Q"))
        except (ParseError, ValueError) as exc:
            raise InputError(str(exc)) from None
    else:
        A = load(path, family, param, mult, field_name)
    report = _header(A)
    if A.rank() <= 2:
        exps = rank2_exponents(A)
        report["exponents"] = list(exps)
        emit(report, as_json, "exponents " + str(tuple(exps)))
        return EXIT_OK
    v = decide_freeness(A, d_max=dmax)
    report["status"] = v.status
    if v.exponents is not None:
        report["exponents"] = list(v.exponents)
    bound = dmax if dmax is not None else (max(v.exponents) if v.exponents else A.total_multiplicity)
    report["minimal_generator_degrees"] = minimal_generator_degrees(A, None, bound)
    report["generator_degree_bound"] = bound
    emit(report, as_json)
    return EXIT_UNDETERMINED if v.status == "Undetermined" else EXIT_OK


@cli.command()
@input_options
@output_options
@click.option("--dmax", type=int, default=None, help="top degree of the search")
def saito(path, family, param, mult, field_name, as_json, dmax):
    """Search for a free basis and verify it by Saito's criterion."""
    A = load(path, family, param, mult, field_name)
    res = free_basis_search(A, None, dmax)
    report = _header(A)
    report["search"] = res.to_json(A.names)
    emit(report, as_json, "basis found" if res.free else "no basis found up to the degree bound")
    return EXIT_OK if res.free else EXIT_UNDETERMINED


@cli.command()
@input_options
@output_options
@click.option("--hyperplane", type=int, default=1, help="1-based index of H")
@click.option("--dmax", type=int, default=None)
def yoshinaga(path, family, param, mult, field_name, as_json, hyperplane, dmax):
    """Freeness through the Ziegler multirestriction to one hyperplane."""
    A = load(path, family, param, mult, field_name)
    if not 1 <= hyperplane <= A.size:
        raise InputError(f"--hyperplane must lie in 1..{A.size}")
    try:
        v = yoshinaga_check(A, hyperplane - 1, dmax)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    report = v.to_json()
    report["arrangement"] = A.polynomial_str()
    emit(report, as_json, f"{v.status} [{v.kind}]")
    return EXIT_UNDETERMINED if v.status == "Undetermined" else EXIT_OK


@cli.command()
@click.option("--r", "r", type=int, required=True)
@click.option("--t", "t", default="2", help="nonzero rational parameter")
@click.option("--dmax", type=int, default=None)
@click.option("--no-decide", is_flag=True, help="skip the freeness decision for A_{r,t}")
@output_options
def xrt(r, t, dmax, no_decide, as_json):
    """Report on A_{r,t} and its simple restriction X_{r,t}."""
    try:
        report = xrt_report(r, Fraction(t), dmax, decide=not no_decide)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    report["version"] = 1
    emit(report, as_json)
    return EXIT_OK


@cli.command()
@input_options
@output_options
@click.option("--dmax", type=int, default=None)
def terao3(path, family, param, mult, field_name, as_json, dmax):
    """The rank-3 complex built from the rank-2 localizations (non-TF2 inputs)."""
    A = load(path, family, param, mult, field_name)
    try:
        report = terao_rank3_complex(A, dmax)
    except (NotTF2, ValueError) as exc:
        raise InputError(str(exc)) from None
    report = {**_header(A), **report}
    emit(report, as_json)
    return EXIT_OK


def _value_list(spec: str):
    if ".." in spec:
        lo, hi = spec.split("..", 1)
        return [Fraction(i) for i in range(int(lo), int(hi) + 1)]
    return [Fraction(x) for x in spec.split(",")]


@cli.command()
@click.option("--family", required=True, help="named family")
@click.option("--param", multiple=True, help="name=lo..hi or name=v1,v2,... (values to sample)")
@click.option("--mult", multiple=True, help="family multiplicity key=value")
@click.option("--field", "field_name", default="Q")
@click.option("--trials", type=int, default=20)
@click.option("--seed", type=int, default=None, help="default: ARRH_SEED or 0")
@output_options
def sample(family, param, mult, field_name, trials, seed, as_json):
    """Sample a parameterized family and partition parameters by verdict."""
    try:
        field = parse_field(field_name)
        ranges = {k: _value_list(v) for k, v in _pairs(param, "param").items()}
        mults = _pairs(mult, "mult")
        if family not in FAMILIES:
            raise ValueError(f"unknown family {family!r}")
        out = moduli_sample(lambda p: build_family(family, p, mults, field), ranges, trials,
                            default_seed() if seed is None else seed)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(str(exc)) from None
    out["version"] = 1
    out["family"] = family
    emit(out, as_json)
    return EXIT_UNDETERMINED if out["undetermined"] else EXIT_OK


@cli.command()
@input_options
def canonical(path, family, param, mult, field_name):
    """Print the arrangement in the canonical text format."""
    click.echo(serialize(load(path, family, param, mult, field_name)), nl=False)
    return EXIT_OK


def main(argv=None) -> int:
    try:
        rv = cli.main(args=argv, prog_name="arrh", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return EXIT_INPUT
    except click.exceptions.Abort:
        return EXIT_INPUT
    return rv if isinstance(rv, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
