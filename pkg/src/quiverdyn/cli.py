"""Command-line workbench.

Every subcommand reads JSON inputs, runs one pipeline stage, and writes a
JSON report (plus TSV tables where a table is natural) into the output
directory. Reports embed a hash of the invocation configuration and the
random seed, so identical inputs and seed produce byte-identical files.

Exit codes: 0 all checks passed, 1 a check failed, 2 input error.
"""

from __future__ import annotations

import hashlib
import os
import sys
from fractions import Fraction

import click
import numpy as np

from . import __version__, fileio
from .builders import build_quoq, build_subq, enumerate_fibrations
from .casestudy import casestudy_s10 as _run_casestudy
from .centermanifold import check_cm_equivariance, cm_taylor
from .errors import ParseError, QuiverdynError
from .lsreduction import (check_reduced_equivariance, find_branches_1param,
                          ls_reduce)
from .network import check_admissible, validate_coloured_network
from .normalform import normal_form, verify_normal_form
from .spectral import (check_endomorphism, joint_spectrum, sn_decomposition)
from .tuples import SAMPLED_DEFAULTS, check_equivariance


def _num(x):
    """Serialize an exact or float scalar for reports."""
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, complex):
        return {"re": float(x.real), "im": float(x.imag)}
    return float(x)


def _seed(cli_seed):
    env = os.environ.get("QUIVERDYN_SEED")
    if env is not None:
        return int(env)
    return cli_seed


def _config_hash(config):
    blob = fileio.dumps_canonical(config)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


def _emit(out, command, config, payload, passed, tables=None):
    os.makedirs(out, exist_ok=True)
    report = {
        "schema_version": fileio.SCHEMA_VERSION,
        "tool_version": __version__,
        "command": command,
        "config": config,
        "config_hash": _config_hash(config),
        "seed": config.get("seed"),
        "passed": bool(passed),
    }
    report.update(payload)
    path = os.path.join(out, f"{command}.json")
    fileio.dump_json(report, path)
    for name, (header, rows) in (tables or {}).items():
        tsv = os.path.join(out, f"{command}.{name}.tsv")
        with open(tsv, "w", encoding="utf-8") as fh:
            fh.write("\t".join(header) + "\n")
            for row in rows:
                fh.write("\t".join(str(c) for c in row) + "\n")
    click.echo(f"{command}: {'PASS' if passed else 'FAIL'} -> {path}")
    return 0 if passed else 1


def _load_network(path):
    return fileio.network_from_json(fileio.load_json(path))


def _load_tuple(path):
    return fileio.tuple_from_json(fileio.load_json(path))


@click.group()
def main():
    """Quiver representations of network dynamical systems."""


def _common(fn):
    fn = click.option("--out", "-o", default="reports", show_default=True,
                      help="output directory")(fn)
    fn = click.option("--seed", default=0, show_default=True, type=int,
                      help="random seed (env QUIVERDYN_SEED overrides)")(fn)
    return fn


@main.command()
@click.argument("network", type=click.Path(exists=True))
@_common
def validate(network, out, seed):
    """Check the colour-consistency conditions of a network file."""
    N = _load_network(network)
    errors = validate_coloured_network(N)
    config = {"command": "validate", "network": network, "seed": _seed(seed)}
    payload = {"errors": [str(e) for e in errors],
               "nodes": len(N.nodes), "edges": len(N.edges)}
    sys.exit(_emit(out, "validate", config, payload, not errors))


@main.command()
@click.argument("network", type=click.Path(exists=True))
@_common
def subq(network, out, seed):
    """Build the quiver of subnetworks with projection matrices."""
    N = _load_network(network)
    quiver, rep, vertex_subsets = build_subq(N)
    config = {"command": "subq", "network": network, "seed": _seed(seed)}
    payload = {
        "representation": fileio.representation_to_json(rep),
        "vertex_subsets": {v: list(s) for v, s in vertex_subsets.items()},
        "n_vertices": len(quiver.vertices),
        "n_arrows": len(quiver.arrows),
    }
    rows = [(a, s, t) for a, s, t in quiver.arrows]
    sys.exit(_emit(out, "subq", config, payload, True,
                   {"arrows": (("arrow", "source", "target"), rows)}))


@main.command()
@click.argument("network", type=click.Path(exists=True))
@_common
def quoq(network, out, seed):
    """Build the quiver of quotient networks with lifting matrices."""
    N = _load_network(network)
    quiver, rep, catalog, arrow_fibs = build_quoq(N)
    config = {"command": "quoq", "network": network, "seed": _seed(seed)}
    width = max(2, len(str(len(catalog.quotients))))
    partitions = {}
    for i, nm in enumerate(catalog.witnesses):
        classes = {}
        for n, c in nm.items():
            classes.setdefault(c, []).append(n)
        partitions[f"q{str(i + 1).zfill(width)}"] = sorted(
            sorted(v) for v in classes.values())
    payload = {
        "representation": fileio.representation_to_json(rep),
        "partitions": partitions,
        "n_quotients": len(catalog.quotients),
        "n_arrows": len(quiver.arrows),
    }
    rows = [(a, s, t, dict(arrow_fibs[a].node_map))
            for a, s, t in quiver.arrows]
    sys.exit(_emit(out, "quoq", config, payload, True,
                   {"arrows": (("arrow", "source", "target", "node_map"),
                               rows)}))


@main.command()
@click.argument("source", type=click.Path(exists=True))
@click.argument("target", type=click.Path(exists=True))
@click.option("--surjective", is_flag=True, help="only surjective fibrations")
@_common
def fibrations(source, target, surjective, out, seed):
    """Enumerate graph fibrations between two network files."""
    Ns, Nt = _load_network(source), _load_network(target)
    fibs = enumerate_fibrations(Ns, Nt, surjective_only=surjective)
    config = {"command": "fibrations", "source": source, "target": target,
              "surjective": surjective, "seed": _seed(seed)}
    payload = {"count": len(fibs),
               "fibrations": [{"node_map": dict(f.node_map),
                               "edge_map": dict(f.edge_map)} for f in fibs]}
    rows = [(i, dict(f.node_map)) for i, f in enumerate(fibs)]
    sys.exit(_emit(out, "fibrations", config, payload, True,
                   {"maps": (("index", "node_map"), rows)}))


@main.command("check-equivariance")
@click.argument("pvf", type=click.Path(exists=True))
@click.option("--mode", type=click.Choice(["exact", "sampled"]),
              default="exact", show_default=True)
@click.option("--tol", default=SAMPLED_DEFAULTS["tol"], show_default=True)
@click.option("--samples", default=SAMPLED_DEFAULTS["samples"],
              show_default=True)
@_common
def check_equivariance_cmd(pvf, mode, tol, samples, out, seed):
    """Verify arrow-intertwining of a polynomial tuple file."""
    F = _load_tuple(pvf)
    rpt = check_equivariance(F, mode=mode, tol=tol, samples=samples,
                             seed=_seed(seed))
    config = {"command": "check-equivariance", "pvf": pvf, "mode": mode,
              "tol": tol, "samples": samples, "seed": _seed(seed)}
    payload = {"per_arrow": {a: _num(r) for a, r in rpt.per_arrow.items()},
               "max_residual": _num(rpt.max_residual())}
    sys.exit(_emit(out, "check-equivariance", config, payload, rpt.passed))


@main.command("check-admissible")
@click.argument("network", type=click.Path(exists=True))
@click.argument("mapfile", type=click.Path(exists=True))
@click.option("--tol", default=1e-9, show_default=True)
@_common
def check_admissible_cmd(network, mapfile, tol, out, seed):
    """Check dependency and groupoid-symmetry of a total-space map."""
    N = _load_network(network)
    pm, param_dim = fileio.network_map_from_json(fileio.load_json(mapfile))
    rpt = check_admissible(N, pm, param_dim=param_dim, tol=tol)
    config = {"command": "check-admissible", "network": network,
              "map": mapfile, "tol": tol, "seed": _seed(seed)}
    payload = {
        "dependency_errors": [str(e) for e in rpt.dependency_errors],
        "groupoid_errors": [str(e) for e in rpt.groupoid_errors],
        "skipped_ambiguous": len(rpt.skipped_ambiguous),
        "max_residual": _num(rpt.max_residual),
    }
    sys.exit(_emit(out, "check-admissible", config, payload, rpt.ok))


@main.command()
@click.argument("rep_file", type=click.Path(exists=True))
@click.argument("endo_file", type=click.Path(exists=True))
@_common
def spectrum(rep_file, endo_file, out, seed):
    """Joint eigenvalue clusters of an endomorphism tuple."""
    rep = fileio.representation_from_json(fileio.load_json(rep_file))
    L = fileio.endomorphism_from_json(fileio.load_json(endo_file), rep)
    endo = check_endomorphism(rep, L)
    clusters = joint_spectrum(L)
    config = {"command": "spectrum", "representation": rep_file,
              "endomorphism": endo_file, "seed": _seed(seed)}
    payload = {
        "endomorphism_check": {a: _num(r) for a, r in endo.per_arrow.items()},
        "clusters": [{
            "value": _num(c.value),
            "is_pair": c.is_pair,
            "factor": [_num(x) for x in c.factor] if c.factor else None,
            "multiplicity": dict(sorted(c.multiplicity.items())),
        } for c in clusters],
    }
    rows = [(i, _num(c.value), c.is_pair,
             dict(sorted(c.multiplicity.items())))
            for i, c in enumerate(clusters)]
    sys.exit(_emit(out, "spectrum", config, payload, endo.passed,
                   {"clusters": (("index", "value", "pair", "multiplicity"),
                                 rows)}))


@main.command()
@click.argument("rep_file", type=click.Path(exists=True))
@click.argument("endo_file", type=click.Path(exists=True))
@_common
def sn(rep_file, endo_file, out, seed):
    """Semisimple/nilpotent decomposition of an endomorphism tuple."""
    rep = fileio.representation_from_json(fileio.load_json(rep_file))
    L = fileio.endomorphism_from_json(fileio.load_json(endo_file), rep)
    S, N = sn_decomposition(L)
    okS = check_endomorphism(rep, S)
    okN = check_endomorphism(rep, N)
    config = {"command": "sn", "representation": rep_file,
              "endomorphism": endo_file, "seed": _seed(seed)}
    payload = {
        "semisimple": fileio.endomorphism_to_json(S),
        "nilpotent": fileio.endomorphism_to_json(N),
        "semisimple_endomorphism": okS.passed,
        "nilpotent_endomorphism": okN.passed,
    }
    sys.exit(_emit(out, "sn", config, payload, okS.passed and okN.passed))


@main.command("ls-reduce")
@click.argument("pvf", type=click.Path(exists=True))
@click.option("--samples", default=100, show_default=True)
@click.option("--tol", default=1e-8, show_default=True)
@_common
def ls_reduce_cmd(pvf, samples, tol, out, seed):
    """Lyapunov-Schmidt reduction and reduced-equivariance check."""
    F = _load_tuple(pvf)
    red = ls_reduce(F)
    rpt = check_reduced_equivariance(red, samples=samples, tol=tol,
                                     seed=_seed(seed))
    config = {"command": "ls-reduce", "pvf": pvf, "samples": samples,
              "tol": tol, "seed": _seed(seed)}
    payload = {
        "kernel_dims": {v: red.kernel_dim(v)
                        for v in red.representation.quiver.vertices},
        "per_arrow_residual": {a: _num(r) for a, r in rpt.per_arrow.items()},
        "neighbourhood_radius": {
            v: red.vertex_data[v].radius
            for v in red.representation.quiver.vertices},
        "radius_is_heuristic": True,
    }
    sys.exit(_emit(out, "ls-reduce", config, payload, rpt.passed))


def _synchrony_groups(red, vertex, branch, tol=1e-6):
    lam, root = branch.points[0]
    x = red.lift(vertex, root, [lam])
    scale = max(1.0, float(np.max(np.abs(x), initial=0.0)))
    groups = []
    for i in range(len(x)):
        for g in groups:
            if abs(x[i] - x[g[0]]) <= tol * scale:
                g.append(i)
                break
        else:
            groups.append([i])
    return [g for g in groups if len(g) > 1]


@main.command()
@click.argument("pvf", type=click.Path(exists=True))
@click.option("--vertex", required=True, help="vertex id to trace branches at")
@click.option("--lam-min", default=1e-4, show_default=True)
@click.option("--lam-max", default=1e-2, show_default=True)
@click.option("--grid", default=20, show_default=True)
@_common
def branches(pvf, vertex, lam_min, lam_max, grid, out, seed):
    """Trace and classify bifurcation branches of the reduced equation."""
    F = _load_tuple(pvf)
    red = ls_reduce(F)
    brs = find_branches_1param(red, vertex, (lam_min, lam_max), grid)
    config = {"command": "branches", "pvf": pvf, "vertex": vertex,
              "lam_min": lam_min, "lam_max": lam_max, "grid": grid,
              "seed": _seed(seed)}
    rows = []
    payload_branches = []
    for i, b in enumerate(brs):
        sync = _synchrony_groups(red, vertex, b)
        rows.append((vertex, i, b.exponents, b.coefficients, sync))
        payload_branches.append({
            "exponents": b.exponents,
            "coefficients": b.coefficients,
            "r_squared": b.r_squared,
            "classified": b.classified,
            "synchrony_groups": sync,
        })
    payload = {"branches": payload_branches, "count": len(brs)}
    passed = all(b.classified for b in brs)
    sys.exit(_emit(out, "branches", config, payload, passed,
                   {"table": (("vertex", "branch", "exponent",
                               "coefficients", "synchrony"), rows)}))


@main.command("cm-reduce")
@click.argument("pvf", type=click.Path(exists=True))
@click.option("--degree", default=4, show_default=True)
@_common
def cm_reduce(pvf, degree, out, seed):
    """Center-manifold Taylor jet and coefficient-level equivariance."""
    F = _load_tuple(pvf)
    exp = cm_taylor(F, degree)
    rpt = check_cm_equivariance(exp)
    config = {"command": "cm-reduce", "pvf": pvf, "degree": degree,
              "seed": _seed(seed)}
    coeff_rows = []
    for v, vd in sorted(exp.vertices.items()):
        for i, p in enumerate(vd.phi):
            for e, c in p.sorted_terms():
                coeff_rows.append((v, "phi", i, list(e), _num(c)))
        for i, p in enumerate(vd.reduced):
            for e, c in p.sorted_terms():
                coeff_rows.append((v, "reduced", i, list(e), _num(c)))
    payload = {
        "degree": degree,
        "center_dims": {v: vd.center_dim
                        for v, vd in sorted(exp.vertices.items())},
        "per_arrow_residual": {a: _num(r) for a, r in rpt.per_arrow.items()},
    }
    sys.exit(_emit(out, "cm-reduce", config, payload, rpt.passed,
                   {"coefficients": (("vertex", "kind", "component",
                                      "exponents", "coefficient"),
                                     coeff_rows)}))


@main.command("normal-form")
@click.argument("pvf", type=click.Path(exists=True))
@click.option("--grade", default=2, show_default=True)
@_common
def normal_form_cmd(pvf, grade, out, seed):
    """Lie-transform normal form with per-grade verification."""
    F = _load_tuple(pvf)
    res = normal_form(F, grade)
    rpt = verify_normal_form(res)
    config = {"command": "normal-form", "pvf": pvf, "grade": grade,
              "seed": _seed(seed)}
    rows = []
    for v, pm in sorted(res.transformed.components.items()):
        for i, p in enumerate(pm.outputs):
            for e, c in p.sorted_terms():
                rows.append((v, "transformed", i, list(e), _num(c)))
    for k, G in sorted(res.generators.items()):
        for v, pm in sorted(G.components.items()):
            for i, p in enumerate(pm.outputs):
                for e, c in p.sorted_terms():
                    rows.append((v, f"generator_{k}", i, list(e), _num(c)))
    eq_ok = all(rpt["equivariance"][k]["generator"].passed
                and rpt["equivariance"][k]["transformed_grade"].passed
                for k in range(1, grade + 1)) \
        and rpt["equivariance"]["full"].passed
    comm_ok = all(
        (r == 0 if isinstance(r, Fraction) else float(r) <= 1e-10)
        for r in rpt["commutator"].values())
    payload = {
        "grade": grade,
        "kernel_residuals": {k: _num(r)
                             for k, r in res.kernel_residuals.items()},
        "commutator_residuals": {k: _num(r)
                                 for k, r in rpt["commutator"].items()},
        "equivariance_passed": eq_ok,
    }
    sys.exit(_emit(out, "normal-form", config, payload, eq_ok and comm_ok,
                   {"coefficients": (("vertex", "kind", "component",
                                      "exponents", "coefficient"), rows)}))


@main.command("casestudy-s10")
@click.option("--f", "f_text", required=True,
              help="e.g. 'f(x,y) = lambda*x - x^2 + y'")
@click.option("--g", "g_text", required=True,
              help="e.g. 'g(y,x) = -1*y + x'")
@click.option("--case", "case", required=True,
              type=click.Choice(["a=0", "b=0", "ab-cd=0"]))
@_common
def casestudy_cmd(f_text, g_text, case, out, seed):
    """Run the three-vertex steady-state case study end to end."""
    rpt = _run_casestudy(f_text, g_text, case)
    config = {"command": "casestudy-s10", "f": f_text, "g": g_text,
              "case": case, "seed": _seed(seed)}
    rows = []
    for i, (b, s) in enumerate(zip(rpt.branches, rpt.synchrony)):
        rows.append(("N1", i, b.exponents, b.coefficients,
                     s["equal_groups"], s["zero_coordinates"]))
    payload = {
        "case": rpt.case,
        "coefficients": [_num(x) for x in rpt.coefficients],
        "equivariance_passed": rpt.equivariance_passed,
        "kernel_dims": rpt.kernel_dims,
        "restricted_maps": {a: fileio.encode_matrix(m)
                            for a, m in rpt.restricted_maps.items()},
        "decoupled": rpt.decoupled,
        "identity_restriction": rpt.identity_restriction,
        "reduced_equivariance_residual": rpt.reduced_equivariance_residual,
        "branch_count": len(rpt.branches),
    }
    passed = rpt.equivariance_passed and \
        rpt.reduced_equivariance_residual <= 1e-8 and \
        all(b.classified for b in rpt.branches)
    sys.exit(_emit(out, "casestudy-s10", config, payload, passed,
                   {"branches": (("vertex", "branch", "exponents",
                                  "coefficients", "equal_groups",
                                  "zero_coordinates"), rows)}))


def run():
    """Entry point with the documented exit-code contract."""
    try:
        main(standalone_mode=False)
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    except SystemExit:
        raise
    except click.ClickException as exc:
        exc.show()
        sys.exit(2)
    except ParseError as exc:
        click.echo(f"input error: {exc}", err=True)
        sys.exit(2)
    except QuiverdynError as exc:
        click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    run()
