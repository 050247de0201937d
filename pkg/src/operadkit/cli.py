"""Command-line front end.

Every computation in the library is reachable here; outputs are JSON
(canonical machine format), CSV, or aligned text.  Expensive homology
runs are cached content-addressed under the cache directory (override
with OPERADKIT_CACHE_DIR, disable with --no-cache).  Exit codes: 0 on
success, 1 when a verification fails, 2 on usage errors.
"""

from __future__ import annotations

import hashlib
import json
import os
import sys
from pathlib import Path

import click

from . import __version__

CACHE_ENV = "OPERADKIT_CACHE_DIR"


def _cache_dir() -> Path:
    root = os.environ.get(CACHE_ENV)
    if root:
        return Path(root)
    return Path.home() / ".cache" / "operadkit"


def _cache_lookup(op: str, params: dict) -> tuple[Path, str | None]:
    key = json.dumps({"op": op, "params": params, "version": __version__},
                     sort_keys=True)
    digest = hashlib.sha256(key.encode()).hexdigest()
    path = _cache_dir() / f"{digest}.json"
    if path.exists():
        return path, path.read_text()
    return path, None


def _cache_store(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(text)
    tmp.replace(path)


def _operad_by_name(name: str, max_arity: int):
    from .operads import comm_operad, assoc_operad, lie_operad
    from .cobar import liec_cooperad, cobar_operad
    if name == "comm":
        return comm_operad(max_arity)
    if name == "assoc":
        return assoc_operad(max_arity)
    if name == "lie":
        return lie_operad(max_arity)
    if name == "cobar-liec":
        return cobar_operad(liec_cooperad(max_arity), max_arity)
    raise click.UsageError(f"unknown operad {name!r}")


def _cooperad_by_name(name: str, max_arity: int):
    from .cobar import liec_cooperad, asc_cooperad, commc_cooperad
    table = {"liec": liec_cooperad, "asc": asc_cooperad,
             "commc": commc_cooperad}
    if name not in table:
        raise click.UsageError(f"unknown cooperad {name!r}")
    return table[name](max_arity)


def _load_betti(path: str | None):
    from .strata import BettiTable
    if path is None:
        return BettiTable()
    return BettiTable.from_csv(Path(path).read_text())


def _emit_table(entries: dict, fmt: str, meta: dict) -> str:
    if fmt == "json":
        return json.dumps(
            {**meta,
             "entries": [[p, q, d] for (p, q), d in sorted(entries.items())]},
            indent=1) + "\n"
    if fmt == "csv":
        lines = ["p,q,dim"]
        lines += [f"{p},{q},{d}" for (p, q), d in sorted(entries.items())]
        return "\n".join(lines) + "\n"
    from .strata import table_to_text
    return table_to_text(entries)


format_option = click.option(
    "--format", "fmt", type=click.Choice(["json", "csv", "text"]),
    default="text", show_default=True)


def _require_desk_scale(**bounds):
    """Validate parameter ranges before dispatch; everything here is
    exact arithmetic, so the guards are what keeps runtimes sane."""
    for label, (value, lo, hi) in bounds.items():
        if not (lo <= value <= hi):
            raise click.UsageError(
                f"--{label} must be between {lo} and {hi} (got {value})")


@click.group()
@click.version_option(__version__)
def main():
    """Exact-arithmetic operad, cobar and moduli-strata computations."""


@main.command()
@click.option("--n", type=int, required=True, help="number of leaves")
@click.option("--edges", type=int, default=None, help="internal edge count")
@click.option("--count", is_flag=True, help="print the count only")
@format_option
def trees(n, edges, count, fmt):
    """Enumerate leaf-labeled rooted trees."""
    from .treegraph import enumerate_trees, enumerate_trees_all, encode_tree
    _require_desk_scale(n=(n, 2, 8))
    if edges is None:
        groups = enumerate_trees_all(n)
        items = [t for e in sorted(groups) for t in groups[e]]
    else:
        items = enumerate_trees(n, edges)
    if count:
        click.echo(str(len(items)))
        return
    if fmt == "json":
        click.echo(json.dumps(
            {"n": n, "edges": edges, "count": len(items),
             "trees": [encode_tree(t) for t in items]}, indent=1))
    else:
        for t in items:
            click.echo(encode_tree(t))


@main.command()
@click.option("--g", type=int, required=True)
@click.option("--n", type=int, required=True)
@click.option("--max-edges", type=int, default=None)
@click.option("--count", is_flag=True)
@format_option
def graphs(g, n, max_edges, count, fmt):
    """Enumerate stable graphs of genus g with n legs."""
    from .treegraph import (enumerate_stable_graphs, automorphism_group,
                            encode_graph, GraphError)
    _require_desk_scale(g=(g, 0, 2), n=(n, 0, 6))
    if 3 * g - 3 + n > 3:
        raise click.UsageError(
            "graph censuses are desk scale: need 3g - 3 + n <= 3")
    if max_edges is None:
        max_edges = 3 * g - 3 + n
    try:
        items = enumerate_stable_graphs(g, n, max_edges)
    except GraphError as ex:
        raise click.UsageError(str(ex))
    if count:
        click.echo(str(len(items)))
        return
    rows = [(encode_graph(G), len(G.edges), len(automorphism_group(G)))
            for G in items]
    if fmt == "json":
        click.echo(json.dumps(
            {"g": g, "n": n, "count": len(rows),
             "graphs": [{"graph": enc, "edges": e, "aut_order": a}
                        for enc, e, a in rows]}, indent=1))
    else:
        for enc, e, a in rows:
            click.echo(f"{enc}  edges={e} aut={a}")


@main.command()
@click.option("--operad", "name",
              type=click.Choice(["comm", "assoc", "lie", "cobar-liec"]),
              required=True)
@click.option("--max-arity", type=int, default=4, show_default=True)
def axioms(name, max_arity):
    """Verify the operad axioms; exit 1 on any violation."""
    from .operads import check_axioms
    _require_desk_scale(**{"max-arity": (max_arity, 1,
                                         4 if name == "cobar-liec" else 6)})
    O = _operad_by_name(name, max_arity)
    report = check_axioms(O, max_arity)
    click.echo(f"checked {report.checked} instances up to arity {max_arity}")
    if report.ok:
        click.echo("all axioms hold")
        return
    for v in report.violations[:10]:
        click.echo(str(v))
    click.echo(f"{len(report.violations)} violations")
    sys.exit(1)


@main.command("free-dims")
@click.option("--operad", "name", type=click.Choice(["comm", "assoc", "lie"]),
              required=True)
@click.option("--d", type=int, required=True, help="generator dimension")
@click.option("--max-arity", type=int, default=6, show_default=True)
def free_dims(name, d, max_arity):
    """Multilinear-part dimensions of the free algebra on d generators."""
    from .operads import free_algebra_dims
    _require_desk_scale(d=(d, 0, 6), **{"max-arity": (max_arity, 1, 8)})
    O = _operad_by_name(name, max_arity)
    dims = free_algebra_dims(O, d, max_arity)
    click.echo(",".join(str(x) for x in dims))


@main.command()
@click.option("--cooperad", "name",
              type=click.Choice(["liec", "asc", "commc"]), required=True)
@click.option("--arity", type=int, required=True)
@format_option
def cobar(name, arity, fmt):
    """Dimensions of the cobar complex by internal edge count."""
    from .cobar import cobar_dims, CobarError
    _require_desk_scale(arity=(arity, 2, 7 if name != "asc" else 5))
    try:
        C = _cooperad_by_name(name, arity)
        dims = cobar_dims(C, arity)
    except CobarError as ex:
        raise click.UsageError(str(ex))
    if fmt == "json":
        click.echo(json.dumps({"cooperad": name, "arity": arity,
                               "dims": {str(e): d for e, d in dims.items()}},
                              indent=1))
    else:
        for e in sorted(dims):
            click.echo(f"e={e}: {dims[e]}")


@main.command("cobar-homology")
@click.option("--cooperad", "name",
              type=click.Choice(["liec", "asc", "commc"]), required=True)
@click.option("--arity", type=int, required=True)
@click.option("--no-cache", is_flag=True)
@format_option
def cobar_homology_cmd(name, arity, no_cache, fmt):
    """Betti numbers of the cobar complex (cached)."""
    from .cobar import cobar_homology, CobarError
    _require_desk_scale(arity=(arity, 2, 6 if name != "asc" else 5))
    params = {"cooperad": name, "arity": arity}
    path, cached = (None, None)
    if not no_cache:
        path, cached = _cache_lookup("cobar-homology", params)
    if cached is not None:
        payload = json.loads(cached)
    else:
        try:
            C = _cooperad_by_name(name, arity)
            betti = cobar_homology(C, arity)
        except CobarError as ex:
            raise click.UsageError(str(ex))
        payload = {"cooperad": name, "arity": arity,
                   "betti": {str(e): b for e, b in betti.items()},
                   "total": sum(betti.values())}
        if path is not None:
            _cache_store(path, json.dumps(payload, sort_keys=True))
    if fmt == "json":
        click.echo(json.dumps(payload, indent=1, sort_keys=True))
    else:
        for e in sorted(payload["betti"], key=int):
            click.echo(f"e={e}: {payload['betti'][e]}")
        click.echo(f"total: {payload['total']}")


@main.command()
@click.option("--g", type=int, default=0, show_default=True)
@click.option("--n", type=int, required=True)
@click.option("--betti", "betti_path", type=click.Path(exists=True),
              default=None, help="CSV of open Betti numbers (g,n,k,dim)")
@click.option("--aut-mode", type=click.Choice(["degree0", "ignore"]),
              default="degree0", show_default=True)
@format_option
def e1(g, n, betti_path, aut_mode, fmt):
    """First-page dimension table of the stratification sequence."""
    from .strata import e1_table, StrataError
    _require_desk_scale(g=(g, 0, 2), n=(n, 1, 8))
    if 3 * g - 3 + n > 5:
        raise click.UsageError("need 3g - 3 + n <= 5 at genus >= 1")
    try:
        table = e1_table(g, n, _load_betti(betti_path), aut_mode=aut_mode)
    except StrataError as ex:
        raise click.UsageError(str(ex))
    click.echo(_emit_table(table.entries, fmt,
                           {"format": "operadkit-e1", "g": g, "n": n}),
               nl=False)


@main.command("betti-predict")
@click.option("--n", type=int, required=True)
@format_option
def betti_predict(n, fmt):
    """Predicted even Betti numbers of the genus-0 compactification."""
    from .strata import predict_compactified_betti, StrataError
    _require_desk_scale(n=(n, 3, 8))
    try:
        pred = predict_compactified_betti(n)
    except StrataError as ex:
        click.echo(str(ex), err=True)
        sys.exit(1)
    if fmt == "json":
        click.echo(json.dumps({"n": n, "even_betti": list(pred)}))
    else:
        click.echo(",".join(str(h) for h in pred))


@main.command("middle-row")
@click.option("--arity", type=int, required=True)
@format_option
def middle_row_cmd(arity, fmt):
    """Compare the q=0 strata row with the cobar dimensions; exit 1 on
    mismatch."""
    from .strata import middle_row, StrataError
    _require_desk_scale(arity=(arity, 2, 7))
    try:
        rep = middle_row(arity)
    except StrataError as ex:
        raise click.UsageError(str(ex))
    if fmt == "json":
        click.echo(json.dumps({
            "arity": arity,
            "e1_row": {str(p): d for p, d in sorted(rep.e1_dims.items())},
            "cobar": {str(p): d for p, d in sorted(rep.cobar_dims.items())},
            "equal": rep.equal}, indent=1))
    else:
        ps = sorted(set(rep.e1_dims) | set(rep.cobar_dims), reverse=True)
        click.echo("p:     " + " ".join(f"{p:>6}" for p in ps))
        click.echo("e1:    " + " ".join(f"{rep.e1_dims.get(p, 0):>6}" for p in ps))
        click.echo("cobar: " + " ".join(f"{rep.cobar_dims.get(p, 0):>6}" for p in ps))
        click.echo("equal" if rep.equal else "MISMATCH")
    if not rep.equal:
        sys.exit(1)


@main.command("dual-e1")
@click.option("--g", type=int, default=0, show_default=True)
@click.option("--n", type=int, required=True)
@format_option
def dual_e1(g, n, fmt):
    """Dual (logarithmic) first page; exit 1 if the column Euler check
    against the open Betti numbers fails."""
    from .strata import dual_e1_table, dual_euler_check, StrataError
    _require_desk_scale(g=(g, 0, 0), n=(n, 3, 8))
    try:
        table = dual_e1_table(g, n)
    except StrataError as ex:
        raise click.UsageError(str(ex))
    click.echo(_emit_table(table.entries, fmt,
                           {"format": "operadkit-dual-e1", "g": g, "n": n}),
               nl=False)
    if not dual_euler_check(table, n):
        click.echo("Euler-characteristic consistency FAILED", err=True)
        sys.exit(1)


@main.command("check-ainf")
@click.argument("family_file", type=click.Path(exists=True))
@click.option("--max-arity", type=int, default=None)
def check_ainf_cmd(family_file, max_arity):
    """Check the homotopy-associativity relations of a map family."""
    from .hoalg import map_family_from_json, check_ainf, HoalgError
    try:
        fam = map_family_from_json(Path(family_file).read_text())
    except (HoalgError, json.JSONDecodeError, ValueError) as ex:
        raise click.UsageError(str(ex))
    residuals = check_ainf(fam, max_arity)
    if not residuals:
        click.echo("all relations hold")
        return
    for r in residuals[:10]:
        click.echo(str(r))
    click.echo(f"{len(residuals)} failing instances")
    sys.exit(1)


@main.command("check-cinf")
@click.argument("family_file", type=click.Path(exists=True))
@click.option("--max-arity", type=int, default=None)
def check_cinf_cmd(family_file, max_arity):
    """Check homotopy associativity plus shuffle vanishing."""
    from .hoalg import map_family_from_json, check_cinf, HoalgError
    try:
        fam = map_family_from_json(Path(family_file).read_text())
    except (HoalgError, json.JSONDecodeError, ValueError) as ex:
        raise click.UsageError(str(ex))
    report = check_cinf(fam, max_arity)
    if report.ok:
        click.echo("all relations and shuffle vanishing hold")
        return
    click.echo(f"{len(report.ainf_residuals)} relation failures, "
               f"{len(report.shuffle_violations)} shuffle violations")
    sys.exit(1)


def _filtered_fixture(fixture, fixture_file, max_arity):
    from .filtration import (filtered_operad_from_json, degree_filtration,
                             moduli_chain_standin, FiltrationError)
    if fixture_file is not None:
        try:
            return filtered_operad_from_json(Path(fixture_file).read_text())
        except (FiltrationError, ValueError) as ex:
            raise click.UsageError(str(ex))
    if fixture == "end":
        from fractions import Fraction
        from .operads import GradedSpace, endomorphism_operad
        from .qlinalg import SparseMatrix
        V = GradedSpace(("e0", "e1"), (0, 1))
        q = SparseMatrix.from_dict(2, 2, {(0, 1): Fraction(1)})
        return degree_filtration(endomorphism_operad(V, max_arity, q=q))
    if fixture == "standin":
        return moduli_chain_standin(max_arity)
    raise click.UsageError(f"unknown fixture {fixture!r}")


@main.command()
@click.option("--r", type=int, required=True, help="page index")
@click.option("--fixture", type=click.Choice(["end", "standin"]),
              default="end", show_default=True)
@click.option("--file", "fixture_file", type=click.Path(exists=True),
              default=None, help="filtered operad JSON")
@click.option("--max-arity", type=int, default=3, show_default=True)
@format_option
def er(r, fixture, fixture_file, max_arity, fmt):
    """Dimensions of a spectral-sequence page per arity and bigrade."""
    from .filtration import er_term
    _require_desk_scale(r=(r, 0, 20), **{"max-arity": (max_arity, 1, 4)})
    F = _filtered_fixture(fixture, fixture_file, max_arity)
    term = er_term(F, r)
    data = {n: {f"{p},{q}": d for (p, q), d in sorted(term.dims(n).items())}
            for n in F.arities()}
    if fmt == "json":
        click.echo(json.dumps({"r": r, "dims": data}, indent=1))
    else:
        for n, dims in data.items():
            click.echo(f"arity {n}: " + (", ".join(
                f"E[{pq}]={d}" for pq, d in dims.items()) or "0"))


@main.command()
@click.option("--r", type=int, required=True)
@click.option("--k", type=int, required=True)
@click.option("--fixture", type=click.Choice(["end", "standin"]),
              default="standin", show_default=True)
@click.option("--file", "fixture_file", type=click.Path(exists=True),
              default=None)
@click.option("--max-arity", type=int, default=3, show_default=True)
@format_option
def dk(r, k, fixture, fixture_file, max_arity, fmt):
    """Bigraded suboperad slice of a page, with closure certificate."""
    from .filtration import er_term, suboperad_dk
    _require_desk_scale(r=(r, 0, 20), k=(k, -20, 20),
                        **{"max-arity": (max_arity, 1, 4)})
    F = _filtered_fixture(fixture, fixture_file, max_arity)
    slices = suboperad_dk(er_term(F, r), k)
    data = {n: {f"{p},{q}": d for (p, q), d in sorted(sel.items())}
            for n, sel in slices.slices.items()}
    if fmt == "json":
        click.echo(json.dumps({"r": r, "k": k, "slices": data,
                               "certificate": slices.certificate}, indent=1))
    else:
        for n, sel in data.items():
            click.echo(f"arity {n}: " + (", ".join(
                f"D[{pq}]={d}" for pq, d in sel.items()) or "0"))
        click.echo("closure certificate: "
                   + ("ok" if slices.certificate else "FAILED"))
    if not slices.certificate:
        sys.exit(1)


@main.command("pipeline-cinf")
@click.option("--max-arity", type=int, default=4, show_default=True)
@click.option("--dim", type=int, default=3, show_default=True,
              help="dimension of the truncated polynomial algebra")
def pipeline_cinf(max_arity, dim):
    """End-to-end: stand-in operad, commutative toy algebra, induced
    operations, homotopy checks.  Exit 1 if any verification fails."""
    from fractions import Fraction
    from .operads import GradedSpace
    from .qlinalg import SparseMatrix
    from .filtration import (moduli_chain_standin, commutative_toy_algebra,
                             check_filtered_algebra, induce_cinf,
                             FiltrationError)
    _require_desk_scale(dim=(dim, 1, 4),
                        **{"max-arity": (max_arity, 2, 6)})
    F = moduli_chain_standin(max_arity)
    V = GradedSpace(tuple(f"x{k}" for k in range(dim)), (0,) * dim)
    q = SparseMatrix.zero(dim, dim)
    m2 = {}
    for a in range(dim):
        for b in range(dim):
            if a + b < dim:
                m2[(a + b, (a, b))] = Fraction(1)
    A = commutative_toy_algebra(F, V, q, m2)
    report = check_filtered_algebra(F, A, max_arity=min(max_arity, 3))
    click.echo(f"filtration predicate: {'ok' if report.filtration_ok else 'FAILED'}")
    click.echo(f"operad morphism:      {'ok' if report.morphism_ok else 'FAILED'}")
    try:
        result = induce_cinf(F, A, max_arity)
    except FiltrationError as ex:
        click.echo(str(ex), err=True)
        sys.exit(1)
    click.echo(f"induced operations at arities: {sorted(result.family.maps)}")
    click.echo(f"relation residuals:   {len(result.ainf_residuals)}")
    click.echo(f"shuffle violations:   "
               f"{len(result.cinf_report.shuffle_violations)}")
    if not (report.ok and result.ok):
        sys.exit(1)
    click.echo("pipeline verified")


if __name__ == "__main__":
    main()
