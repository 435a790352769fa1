"""Batch command-line front end.

Every subcommand writes a JSON run report (to ``--report`` or stdout).  Reports
and certificates hold no timestamps, so identical invocations produce identical
bytes; wall time goes to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from .certificates import canonical_json, provenance_hash
from .coloring import (ColoringCertificate, check_admissible, color_dickson, color_graph,
                       phi_automorphism_sampled, verify_graph_coloring, verify_pi_f_coloring)
from .finite_field import ff_build, field_from_descriptor, monomial, prime_factors
from .graphs import (AGraph, Graph, build_er, build_er_star, build_polarity_graph, build_uq,
                     build_uq_star, check_c4_free, check_nsq_identity, degree_law, read_dimacs,
                     write_dimacs)
from .independent_sets import (construct_thm1, construct_thm2, construct_thm3, greedy_independent,
                               hoffman_bound, max_independent_exact, unitary_absolute_set)
from .planes import (build_coordinatized_plane, build_division_ring, build_pi_f,
                     verify_plane_axioms)
from .polarities import (absolute_points, orthogonal_polarity_dickson, orthogonal_polarity_pi_f,
                         polarity_pi_d, verify_polarity)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


def prime_power(q: int) -> tuple[int, int]:
    fs = prime_factors(q) if q > 1 else []
    if len(fs) != 1:
        raise UsageError(f"{q} is not a prime power")
    p, n = fs[0], 0
    while q % p == 0:
        q //= p
        n += 1
    return p, n


def _field(q: int):
    return ff_build(*prime_power(q))


# -- graph registry -----------------------------------------------------------------

PG2_MODELS = {"er": build_er, "er_star": build_er_star, "uq": build_uq, "uq_star": build_uq_star}


def plane_from_provenance(prov: dict):
    model = prov["model"]
    if model == "pi_f":
        return build_pi_f(field_from_descriptor(prov["field"]), prov["f"])
    if model in ("plane_section3", "plane_dickson"):
        ring = prov["ring"]
        base = field_from_descriptor(ring["base"])
        D = build_division_ring(ring["kind"], base, a=ring.get("a"), r=ring.get("r"))
        if D.descriptor() != ring:
            raise UsageError("ring descriptor does not match its canonical rebuild")
        return build_coordinatized_plane(D, check=False)
    raise UsageError(f"unknown plane model {model!r}")


POLARITIES = {"omega_pi_f": orthogonal_polarity_pi_f, "omega_pi_d": polarity_pi_d,
              "omega_dickson": orthogonal_polarity_dickson}


def graph_from_provenance(prov: dict) -> Graph:
    """Rebuild a materialized polarity graph from the provenance it carries."""
    if prov.get("model") in PG2_MODELS:
        return PG2_MODELS[prov["model"]](field_from_descriptor(prov["field"]))
    if "plane" in prov and prov.get("polarity") in POLARITIES:
        P = plane_from_provenance(prov["plane"])
        return build_polarity_graph(P, POLARITIES[prov["polarity"]](P), verify=False)
    raise UsageError("provenance does not describe a rebuildable graph")


# -- subcommands --------------------------------------------------------------------

def _graph_checks(G: Graph) -> dict:
    out = {}
    for name, fn in (("c4_free", check_c4_free), ("nsq_identity", check_nsq_identity),
                     ("degree_law", degree_law)):
        cert = fn(G)
        out[name] = {"passed": cert.passed, "details": cert.details, "witness": cert.witness}
    return out


def _write_dimacs(G: Graph, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            write_dimacs(G, fh)


def cmd_build(args) -> tuple[dict, bool]:
    model = args.model.replace("-", "_")
    if model in PG2_MODELS:
        if args.q is None:
            raise UsageError(f"--q is required for model {args.model}")
        G = PG2_MODELS[model](_field(args.q))
        checks = _graph_checks(G)
        _write_dimacs(G, args.out)
        result = {"graph": {"n": G.n, "m": G.m, "loops": int(G.loops.size),
                            "provenance": G.provenance, "provenance_hash": G.provenance_hash},
                  "checks": checks}
        return result, all(c["passed"] for c in checks.values())
    if model == "a_q2_d":
        pair = check_admissible(args.p, args.n, args.s)
        A = AGraph(ff_build(pair.p, 2 * pair.n), pair.d)
        alpha = int(A.ctx.exp(1))
        phi = phi_automorphism_sampled(A, alpha, seed=args.seed)
        result = {"graph": {"n": A.n, "implicit": True, "provenance": A.provenance,
                            "provenance_hash": provenance_hash(A.provenance)},
                  "pair": pair.to_dict(), "phi_sample": phi}
        return result, phi["edges_preserved"] and phi["non_edges_preserved"]
    if args.p is None or args.n is None:
        raise UsageError(f"--p and --n are required for model {args.model}")
    if model == "pi_f":
        F = ff_build(args.p, args.n)
        P = build_pi_f(F, monomial(args.degree))
        pol = orthogonal_polarity_pi_f(P)
    elif model == "pi_d":
        P = build_coordinatized_plane(build_division_ring("section3", ff_build(args.p, 2 * args.n)))
        pol = polarity_pi_d(P)
    elif model == "dickson":
        D = build_division_ring("dickson", ff_build(args.p, args.n), r=args.r)
        P = build_coordinatized_plane(D)
        pol = orthogonal_polarity_dickson(P)
    else:
        raise UsageError(f"unknown model {args.model!r}")
    axioms = verify_plane_axioms(P, seed=args.seed)
    polcert = verify_polarity(pol, seed=args.seed)
    absolute = absolute_points(pol)
    result = {"plane": P.summary(), "axioms": axioms.to_dict(), "polarity": polcert.to_dict(),
              "absolute": absolute.to_dict()}
    ok = axioms.passed and polcert.passed
    if P.materialized:
        G = build_polarity_graph(P, pol, verify=False)
        checks = _graph_checks(G)
        _write_dimacs(G, args.out)
        result["graph"] = {"n": G.n, "m": G.m, "provenance_hash": G.provenance_hash}
        result["checks"] = checks
        ok = ok and all(c["passed"] for c in checks.values())
    return result, ok


def _write_text(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text)


def cmd_indep(args) -> tuple[dict, bool]:
    c = args.construction
    if c == "thm1":
        p, n = prime_power(args.q)
        cert = construct_thm1(ff_build(p, 2 * n), monomial(args.degree))
    elif c == "thm2":
        P = build_coordinatized_plane(build_division_ring("section3", ff_build(args.p, 2 * args.n)))
        cert = construct_thm2(P)
    elif c == "thm3":
        cert = construct_thm3(_field(args.q), provider=args.provider)
    elif c == "absolute":
        cert = unitary_absolute_set(_field(args.q))
    elif c == "oracle":
        if not args.input:
            raise UsageError("oracle needs --in GRAPH.dimacs")
        with open(args.input) as fh:
            G = read_dimacs(fh)
        cert = max_independent_exact(G.without_loops(), limit=args.limit)
    else:
        raise UsageError(f"unknown construction {c!r}")
    _write_text(args.out, cert.to_json() + "\n")
    summary = {"size": cert.size, "verified": cert.verified, "absolute_free": cert.absolute_free,
               "provenance_hash": cert.provenance_hash, "bound_context": cert.bound_context,
               "details": cert.details}
    return {"certificate": summary}, cert.verified


def cmd_color(args) -> tuple[dict, bool]:
    if args.pipeline == "planar":
        cert = color_graph(check_admissible(args.p, args.n, args.s), verify=args.verify,
                           seed=args.seed)
    else:
        cert = color_dickson(args.p, args.n, r=args.r, verify=args.verify, seed=args.seed)
    _write_text(args.out, cert.to_json() + "\n")
    _write_text(args.csv, cert.to_csv())
    summary = {"palettes": cert.palettes, "total_colors": cert.total_colors,
               "verified": cert.verified, "provenance_hash": cert.provenance_hash,
               "details": cert.details}
    ok = cert.details["verification"]["proper"]
    return {"certificate": summary}, bool(ok and (cert.verified or args.verify == "sample"))


SWEEP_HEADER = ["q", "model", "construction", "construction_size", "oracle_alpha",
                "hoffman_closed_form", "ratio_to_q32", "reason"]


def sweep_rows(model: str, qs, limit: int = 200) -> list[list]:
    rows = []
    for q in qs:
        hb = hoffman_bound(q)
        row = {"q": q, "model": model, "construction": "", "construction_size": "",
               "oracle_alpha": "", "hoffman_closed_form": f"{hb.closed_value:.6f}",
               "ratio_to_q32": "", "reason": ""}
        try:
            F = _field(q)
            if model in ("uq", "uq_star"):
                if model == "uq":
                    cert = unitary_absolute_set(F)
                    row["construction"] = "absolute_set"
                else:
                    cert = construct_thm3(F)
                    row["construction"] = "thm3"
                size = cert.size
            else:
                G = PG2_MODELS[model](F)
                size = len(greedy_independent(G.without_loops()))
                row["construction"] = "greedy"
                if G.n <= limit:
                    row["oracle_alpha"] = max_independent_exact(G.without_loops()).details["alpha"]
                else:
                    row["reason"] = f"oracle skipped: {G.n} vertices > {limit}"
            row["construction_size"] = size
            best = row["oracle_alpha"] if row["oracle_alpha"] != "" else size
            row["ratio_to_q32"] = f"{best / q ** 1.5:.6f}"
        except (ValueError, KeyError) as exc:
            row["reason"] = f"skipped: {exc}"
        rows.append([row[h] for h in SWEEP_HEADER])
    return rows


def cmd_sweep(args) -> tuple[dict, bool]:
    qs = [int(t) for t in args.qs.split(",") if t.strip()] if args.qs else []
    rows = sweep_rows(args.model.replace("-", "_"), qs)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    w.writerows(rows)
    _write_text(args.out, buf.getvalue())
    return {"rows": len(rows), "csv": buf.getvalue() if not args.out else args.out}, True


def verify_file(path: str, graph_path: str | None = None) -> dict:
    """Re-verify a certificate or DIMACS graph using only the files."""
    text = Path(path).read_text()
    if not text.lstrip().startswith("{"):
        G = read_dimacs(io.StringIO(text))
        checks = _graph_checks(G)
        return {"file": path, "type": "dimacs",
                "passed": all(c["passed"] for c in checks.values()), "checks": checks}
    d = json.loads(text)
    prov = d["provenance"]
    if provenance_hash(prov) != d["provenance_hash"]:
        return {"file": path, "type": d.get("kind"), "passed": False,
                "reason": "provenance hash mismatch"}
    if d["kind"] == "independent_set":
        # the oracle works on a loop-stripped copy of the graph it was given
        base = {k: v for k, v in prov.items() if k != "loops_stripped"}
        if graph_path:
            with open(graph_path) as fh:
                G = read_dimacs(fh)
            if provenance_hash(G.provenance) != provenance_hash(base):
                return {"file": path, "type": "independent_set", "passed": False,
                        "reason": "graph file has a different provenance"}
        else:
            G = graph_from_provenance(base)
        if prov.get("loops_stripped"):
            G = G.without_loops()
        vs = d.get("vertices")
        if vs is None:
            return {"file": path, "type": "independent_set", "passed": False,
                    "reason": "vertex ids were hashed; re-run the construction"}
        independent = G.is_independent(vs)
        loop_free = not bool(G.loop_mask[vs].any()) if G.loops is not None else False
        passed = independent and len(vs) == d["size"] and (loop_free or not d["absolute_free"])
        return {"file": path, "type": "independent_set", "passed": bool(passed),
                "size": len(vs), "independent": independent, "absolute_free": loop_free}
    if d["kind"] == "coloring":
        colors = ColoringCertificate.colors_from_dict(d)
        pipeline = prov["coloring"]["pipeline"]
        if pipeline == "planar":
            plane = prov["plane"]
            check = verify_pi_f_coloring(field_from_descriptor(plane["field"]), plane["f"], colors)
        else:
            check = verify_graph_coloring(graph_from_provenance(prov), colors)
        total = int(sum(d["palettes"].values()))
        within = int(np.unique(colors).size) <= total
        return {"file": path, "type": "coloring", "passed": bool(check["proper"] and within),
                "edges_checked": check["edges_checked"], "witness": check["witness"]}
    raise UsageError(f"unknown certificate kind {d.get('kind')!r}")


def cmd_verify(args) -> tuple[dict, bool]:
    results = [verify_file(p, args.graph) for p in args.files]
    return {"results": results}, all(r["passed"] for r in results)


# -- parser -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for every sampled check")
    common.add_argument("--threads", type=int, default=1,
                        help="worker cap (the pipelines are single-process numpy)")
    common.add_argument("--report", help="write the run report here instead of stdout")

    ap = argparse.ArgumentParser(prog="polarity-lab",
                                 description="Polarity graphs: construction, independent sets, colorings.")
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", parents=[common], help="build a graph or plane and check it")
    b.add_argument("--model", required=True,
                   choices=["er", "er-star", "uq", "uq-star", "pi-f", "pi-d", "dickson", "a-q2-d"])
    b.add_argument("--q", type=int)
    b.add_argument("--p", type=int)
    b.add_argument("--n", type=int)
    b.add_argument("--s", type=int)
    b.add_argument("--r", type=int, default=1)
    b.add_argument("--degree", type=int, default=2, help="f = X^degree for pi-f")
    b.add_argument("--out", help="DIMACS output path")
    b.set_defaults(func=cmd_build)

    i = sub.add_parser("indep", parents=[common], help="independent-set constructions")
    i.add_argument("construction", choices=["thm1", "thm2", "thm3", "absolute", "oracle"])
    i.add_argument("--q", type=int, help="thm1: subfield order q (plane order q^2); else field order")
    i.add_argument("--p", type=int, default=3)
    i.add_argument("--n", type=int, default=1)
    i.add_argument("--degree", type=int, default=2)
    i.add_argument("--provider", default="auto", choices=["auto", "exact", "thm1", "greedy"])
    i.add_argument("--in", dest="input")
    i.add_argument("--limit", type=int, default=200)
    i.add_argument("--out", help="certificate path")
    i.set_defaults(func=cmd_indep)

    c = sub.add_parser("color", parents=[common], help="coloring pipelines")
    c.add_argument("pipeline", choices=["planar", "dickson"])
    c.add_argument("--p", type=int, required=True)
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--s", type=int, default=1)
    c.add_argument("--r", type=int, default=1)
    c.add_argument("--verify", choices=["full", "sample"], default="full")
    c.add_argument("--out", help="certificate path")
    c.add_argument("--csv", help="two-column vertex,color export")
    c.set_defaults(func=cmd_color)

    s = sub.add_parser("sweep", parents=[common], help="bound-vs-construction table")
    s.add_argument("--model", default="er", choices=["er", "er-star", "uq", "uq-star"])
    s.add_argument("--qs", default="", help="comma-separated orders")
    s.add_argument("--out", help="CSV path")
    s.set_defaults(func=cmd_sweep)

    v = sub.add_parser("verify", parents=[common], help="re-verify certificate or DIMACS files")
    v.add_argument("files", nargs="+")
    v.add_argument("--graph", help="DIMACS graph for an independent-set certificate")
    v.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.threads < 1:
        print("error: --threads must be positive", file=sys.stderr)
        return EXIT_USAGE
    os.environ.setdefault("OMP_NUM_THREADS", str(args.threads))
    params = {k: v for k, v in sorted(vars(args).items())
              if k not in ("func", "report", "threads")}
    start = time.perf_counter()
    try:
        result, ok = args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = {"command": args.command, "params": params, "seed": args.seed,
              "passed": bool(ok), "result": result}
    text = canonical_json(report) + "\n"
    if args.report:
        Path(args.report).write_text(text)
    else:
        sys.stdout.write(text)
    print(f"wall time {time.perf_counter() - start:.2f}s", file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    raise SystemExit(main())
