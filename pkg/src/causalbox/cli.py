"""Command-line front end.

Subcommands wire the file formats to the library operations:

    graph check|mdag|districts|dsep   structural queries on a graph file
    constraints enumerate             equality constraints of the model
    hyper build                       Bell-type hypergraph lift
    project                           diagonal post-selection of a lifted table
    member --model {I,N,NS,PS,C}      hierarchy membership tests
    score --functional {chsh,gyni,instrumental}
    optimize                          maximize a functional over vertices
    vertices                          enumerate polytope vertices
    decompose-ns                      PR-plus-local decomposition
    fixtures emit NAME                write built-in boxes and graphs

Exit codes: 0 success or member, 2 not-member or constraint violated,
1 usage or input error.  ``--format machine`` prints deterministic JSON.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import boxes
from .constraints import check_nested, enumerate_constraints, i_member
from .fileio import (
    FileFormatError,
    graph_to_dict,
    kernel_to_dict,
    load_graph,
    load_kernel,
)
from .graphs import (
    CiConstraint,
    build_hypergraph,
    d_separated,
    districts,
    to_mdag,
    validate,
)
from .lift import instrumental_score, ns_member, ps_member
from .polytope import (
    classical_member,
    decompose_ns_box,
    enumerate_classical_vertices,
    enumerate_h_vertices,
    functional_from_indicator,
    maximize_functional,
)
from .tables import Kernel, project, uniform_table

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_REJECTED = 2

_FIXTURES = {
    "pr-box": lambda args: boxes.pr_box(args.alpha, args.beta, args.gamma),
    "local-box": lambda args: boxes.local_box(args.index),
    "gyni-box": lambda args: boxes.gyni_box(),
    "gyni-projected": lambda args: boxes.gyni_projected(),
    "swapping-box": lambda args: boxes.swapping_box(),
    "chsh-graph": lambda args: boxes.chsh_graph(),
    "instrumental-graph": lambda args: boxes.instrumental_graph(),
    "mediation-graph": lambda args: boxes.mediation_graph(),
    "gyni-graph": lambda args: boxes.gyni_graph(),
    "tripartite-bell-graph": lambda args: boxes.tripartite_bell_graph(),
    "swapping-graph": lambda args: boxes.swapping_graph(),
    "triangle-graph": lambda args: boxes.triangle_graph(),
}


class _UsageError(Exception):
    pass


def _emit(args, payload: dict, text: str) -> None:
    if args.format == "machine":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text)


def _frac(value: Fraction) -> str:
    return str(value)


def _parse_fixed(raw: str | None) -> set[str]:
    if not raw:
        return set()
    # tolerate name=value tokens; only the names matter for conditioning sets
    return {token.split("=")[0].strip() for token in raw.split(",") if token.strip()}


def _load_graph(args):
    if not args.graph:
        raise _UsageError("missing --graph PATH")
    try:
        return load_graph(args.graph)
    except FileNotFoundError:
        raise _UsageError(f"graph file not found: {args.graph}")
    except (FileFormatError, json.JSONDecodeError) as exc:
        raise _UsageError(f"bad graph file {args.graph}: {exc}")


def _load_dist(args, attr="dist"):
    path = getattr(args, attr.replace("-", "_"), None)
    if not path:
        raise _UsageError(f"missing --{attr} PATH")
    try:
        return load_kernel(path)
    except FileNotFoundError:
        raise _UsageError(f"distribution file not found: {path}")
    except (FileFormatError, json.JSONDecodeError) as exc:
        raise _UsageError(f"bad distribution file {path}: {exc}")


def _as_joint(dist: Kernel, dag) -> Kernel:
    """Accept either a joint table over the observed vertices or a
    conditional on the graph's setting variables with uniform settings."""
    if dist.is_prob_table:
        return dist
    from .tables import join_inputs

    return join_inputs(dist, uniform_table(dist.index_vars))


def _cmd_graph(args) -> int:
    dag = _load_graph(args)
    if args.graph_cmd == "check":
        report = validate(dag)
        _emit(args, {"valid": not report, "violations": report},
              "valid" if not report else "\n".join(report))
        return EXIT_OK if not report else EXIT_REJECTED
    if args.graph_cmd == "mdag":
        m = to_mdag(dag, _parse_fixed(args.fixed))
        payload = {
            "random": list(m.random_vertices),
            "fixed": list(m.fixed_vertices),
            "edges": sorted([a, b] for a, b in m.edges),
            "faces": sorted(sorted(f) for f in m.faces),
        }
        text = (
            f"random: {', '.join(m.random_vertices)}\n"
            f"fixed: {', '.join(m.fixed_vertices) or '(none)'}\n"
            f"edges: {', '.join(f'{a}->{b}' for a, b in sorted(m.edges)) or '(none)'}\n"
            f"faces: {'; '.join(','.join(sorted(f)) for f in sorted(m.faces, key=sorted)) or '(none)'}"
        )
        _emit(args, payload, text)
        return EXIT_OK
    if args.graph_cmd == "districts":
        parts = districts(to_mdag(dag, _parse_fixed(args.fixed)))
        payload = {"districts": [sorted(d) for d in parts]}
        _emit(args, payload, "\n".join(",".join(sorted(d)) for d in parts))
        return EXIT_OK
    if args.graph_cmd == "dsep":
        if not args.a or not args.b:
            raise _UsageError("dsep requires --a and --b vertex names")
        try:
            separated = d_separated(
                dag, {args.a}, {args.b}, _parse_fixed(args.fixed)
            )
        except (KeyError, ValueError) as exc:
            raise _UsageError(str(exc))
        _emit(args, {"d_separated": separated},
              "d-separated" if separated else "d-connected")
        return EXIT_OK if separated else EXIT_REJECTED
    raise _UsageError("unknown graph subcommand")


def _cmd_constraints(args) -> int:
    dag = _load_graph(args)
    records = enumerate_constraints(dag)
    lines = [str(r) for r in records]
    payload = {"constraints": []}
    for r in records:
        if isinstance(r, CiConstraint):
            payload["constraints"].append(
                {"kind": "ci", "a": r.a, "b": r.b, "given": sorted(r.given)}
            )
        else:
            payload["constraints"].append(
                {
                    "kind": "verma",
                    "recipe": str(r).split("VERMA: ")[1].rsplit(" _||_", 1)[0],
                    "independent_of": sorted(r.independent_of),
                }
            )
    _emit(args, payload, "\n".join(lines) if lines else "(no constraints)")
    return EXIT_OK


def _cmd_hyper(args) -> int:
    dag = _load_graph(args)
    h = build_hypergraph(dag)
    payload = {
        "graph": graph_to_dict(h.base),
        "copy_map": {u: list(pair) for u, pair in sorted(h.copy_map.items())},
    }
    text_lines = [f"copies: {', '.join(sorted(h.copy_map)) or '(none; graph is Bell-type)'}"]
    for u, (src, child) in sorted(h.copy_map.items()):
        text_lines.append(f"  {u}: copy of {src} feeding {child}")
    if args.format == "machine":
        _emit(args, payload, "")
    else:
        print("\n".join(text_lines))
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(payload["graph"], fh, indent=2, sort_keys=True)
            fh.write("\n")
    return EXIT_OK


def _cmd_project(args) -> int:
    dag = _load_graph(args)
    dist = _load_dist(args)
    h = build_hypergraph(dag)
    if sorted(dist.var_names()) != sorted(h.base.observed()) or not dist.is_prob_table:
        raise _UsageError(
            "project expects a joint table over the lifted graph's observed vertices"
        )
    try:
        projected = project(dist, h.copies)
    except ValueError as exc:
        raise _UsageError(str(exc))
    payload = kernel_to_dict(projected)
    _emit(args, payload, json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_member(args) -> int:
    dag = _load_graph(args)
    dist = _load_dist(args)
    model = args.model
    if model in ("I", "N", "PS"):
        joint = _as_joint(dist, dag)
        if model == "I":
            verdict = i_member(joint, dag)
        elif model == "N":
            verdict = check_nested(joint, dag)
        else:
            certificate = None
            if args.certificate:
                certificate = load_kernel(args.certificate)
            ps = ps_member(joint, dag, certificate=certificate)
            if ps.status == "unsupported":
                print(f"unsupported: {ps.reason}", file=sys.stderr)
                return EXIT_ERROR
            payload = {"member": ps.member}
            if ps.member and ps.certificate is not None:
                payload["certificate"] = kernel_to_dict(ps.certificate)
                if ps.scale is not None:
                    payload["scale"] = _frac(ps.scale)
            _emit(
                args,
                payload,
                "member of PS(G)" if ps.member else "not in PS(G): LP infeasible",
            )
            return EXIT_OK if ps.member else EXIT_REJECTED
        payload = {"member": verdict.member}
        if not verdict.member:
            payload["violations"] = [str(v) for v in verdict.violations]
        name = "I(G)" if model == "I" else "N(G)"
        text = f"member of {name}" if verdict.member else "\n".join(
            [f"not in {name}:"] + [f"  {v}" for v in verdict.violations]
        )
        _emit(args, payload, text)
        return EXIT_OK if verdict.member else EXIT_REJECTED
    if model == "NS":
        h = build_hypergraph(dag)
        if not dist.index_vars:
            raise _UsageError("NS membership expects a conditional box")
        ok = ns_member(dist, h)
        _emit(args, {"member": ok}, "no-signalling" if ok else "signalling")
        return EXIT_OK if ok else EXIT_REJECTED
    if model == "C":
        verdict = classical_member(dist, dag)
        payload = {"member": verdict.member}
        if verdict.member:
            payload["weights"] = [_frac(w) for w in verdict.weights]
        _emit(
            args,
            payload,
            "member of C(G)" if verdict.member else "not in C(G): LP infeasible",
        )
        return EXIT_OK if verdict.member else EXIT_REJECTED
    raise _UsageError(f"unknown model {model}")


def _functional_for(name: str, template: Kernel):
    if name == "chsh":
        weight = Fraction(1, 4)
        return functional_from_indicator(
            template,
            lambda v: weight if (v["A"] ^ v["B"]) == (v["X"] & v["Y"]) else 0,
        )
    if name == "gyni":
        weight = Fraction(1, 8)
        return functional_from_indicator(
            template,
            lambda v: weight
            if v["A"] == v["Y"] and v["B"] == v["Z"] and v["C"] == v["X"]
            else 0,
        )
    raise _UsageError(f"no vertex functional named {name}")


def _cmd_score(args) -> int:
    dist = _load_dist(args)
    if args.functional == "chsh":
        value = boxes.chsh_score(dist)
    elif args.functional == "instrumental":
        value = instrumental_score(dist)
    elif args.functional == "gyni":
        names = set(dist.var_names())
        if not {"A", "B", "C", "X", "Y", "Z"} <= names:
            raise _UsageError("gyni score expects variables A,B,C,X,Y,Z")
        value = Fraction(0)
        for x in range(2):
            for y in range(2):
                for z in range(2):
                    value += Fraction(1, 8) * dist.value(
                        {"A": y, "B": z, "C": x, "X": x, "Y": y, "Z": z}
                    )
    else:
        raise _UsageError(f"unknown functional {args.functional}")
    _emit(args, {"score": _frac(value)}, f"{value}")
    return EXIT_OK


def _cmd_optimize(args) -> int:
    dag = _load_graph(args)
    if args.lift:
        vertices = enumerate_h_vertices(build_hypergraph(dag), jobs=args.jobs)
    else:
        vertices = enumerate_classical_vertices(dag, jobs=args.jobs)
    try:
        functional = _functional_for(args.functional, vertices[0].table)
    except KeyError as exc:
        raise _UsageError(
            f"functional {args.functional} needs a vertex named {exc}; "
            "use a graph with the standard variable names (A,B|X,Y for chsh, "
            "A,B,C|X,Y,Z for gyni)"
        )
    value, best = maximize_functional(functional, vertices)
    payload = {
        "value": _frac(value),
        "argmax": kernel_to_dict(best.table),
    }
    _emit(args, payload, f"maximum {value}")
    return EXIT_OK


def _cmd_vertices(args) -> int:
    dag = _load_graph(args)
    if args.lift:
        vertices = enumerate_h_vertices(build_hypergraph(dag), jobs=args.jobs)
    else:
        vertices = enumerate_classical_vertices(dag, jobs=args.jobs)
    payload = {
        "count": len(vertices),
        "vertices": [kernel_to_dict(v.table) for v in vertices],
    }
    _emit(args, payload, f"{len(vertices)} vertices")
    return EXIT_OK


def _cmd_decompose(args) -> int:
    dist = _load_dist(args)
    from .polytope import NotNoSignallingError

    try:
        pr_index, weights = decompose_ns_box(dist)
    except NotNoSignallingError as exc:
        raise _UsageError(str(exc))
    payload = {
        "pr_box": list(pr_index) if pr_index else None,
        "pr_weight": _frac(weights[0]),
        "local_weights": [_frac(w) for w in weights[1:]],
    }
    lines = []
    if pr_index:
        lines.append(f"PR{pr_index} with weight {weights[0]}")
    else:
        lines.append("locals only")
    for i, w in enumerate(weights[1:]):
        if w:
            fa, fb = boxes.local_responses(i)
            lines.append(f"local {i} ({fa},{fb}): {w}")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def _cmd_fixtures(args) -> int:
    name = args.name
    if name not in _FIXTURES:
        raise _UsageError(
            f"unknown fixture {name}; available: {', '.join(sorted(_FIXTURES))}"
        )
    obj = _FIXTURES[name](args)
    if isinstance(obj, Kernel):
        payload = kernel_to_dict(obj)
    else:
        payload = graph_to_dict(obj)
    text = json.dumps(payload, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument(
        "--format", choices=("text", "machine"), default="text",
        help="output style; machine prints deterministic JSON",
    )
    parser = argparse.ArgumentParser(
        prog="causalbox",
        description="Exact membership tests for the causal-model hierarchy "
        "C(G), PS(G), N(G), I(G) on discrete DAGs with latent root variables.",
    )
    sub = parser.add_subparsers(dest="cmd")

    def common(p, graph=True, dist=False):
        if graph:
            p.add_argument("--graph", help="graph file (JSON)")
        if dist:
            p.add_argument("--dist", help="distribution file (JSON)")

    g = sub.add_parser("graph", help="structural queries")
    gsub = g.add_subparsers(dest="graph_cmd")
    for name in ("check", "mdag", "districts", "dsep"):
        p = gsub.add_parser(name, parents=[fmt])
        common(p)
        p.add_argument("--fixed", help="comma-separated vertex names")
        if name == "dsep":
            p.add_argument("--a", help="first vertex")
            p.add_argument("--b", help="second vertex")

    c = sub.add_parser("constraints", help="equality constraints")
    csub = c.add_subparsers(dest="constraints_cmd")
    p = csub.add_parser("enumerate", parents=[fmt])
    common(p)

    p = sub.add_parser("hyper", help="hypergraph lift")
    hsub = p.add_subparsers(dest="hyper_cmd")
    p = hsub.add_parser("build", parents=[fmt])
    common(p)
    p.add_argument("--out", help="write the lifted graph file here")

    p = sub.add_parser("project", help="diagonal post-selection", parents=[fmt])
    common(p, dist=True)

    p = sub.add_parser("member", help="hierarchy membership", parents=[fmt])
    common(p, dist=True)
    p.add_argument("--model", required=True, choices=("I", "N", "NS", "PS", "C"))
    p.add_argument("--certificate", help="candidate lift table for PS certificate mode")

    p = sub.add_parser(
        "score", help="evaluate a functional on a distribution", parents=[fmt]
    )
    common(p, graph=False, dist=True)
    p.add_argument(
        "--functional", required=True, choices=("chsh", "gyni", "instrumental")
    )

    p = sub.add_parser(
        "optimize", help="maximize a functional over vertices", parents=[fmt]
    )
    common(p)
    p.add_argument("--functional", required=True, choices=("chsh", "gyni"))
    p.add_argument("--lift", action="store_true", help="use hypergraph vertices")
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("vertices", help="enumerate polytope vertices", parents=[fmt])
    common(p)
    p.add_argument("--lift", action="store_true", help="use hypergraph vertices")
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser(
        "decompose-ns", help="PR-plus-local decomposition", parents=[fmt]
    )
    common(p, graph=False, dist=True)

    p = sub.add_parser("fixtures", help="built-in boxes and graphs")
    fsub = p.add_subparsers(dest="fixtures_cmd")
    p = fsub.add_parser(
        "emit",
        parents=[fmt],
        description="Write a built-in box or graph. Boxes: pr-box (--alpha "
        "--beta --gamma select the PR family member), local-box (--index "
        "0..15 encodes i = 4*f_a + f_b with response functions ordered "
        "const0, const1, id, not), gyni-box, gyni-projected, swapping-box. "
        "Graphs: chsh-, instrumental-, mediation-, gyni-, tripartite-bell-, "
        "swapping-, triangle-graph.",
    )
    p.add_argument("name")
    p.add_argument("--alpha", type=int, default=0)
    p.add_argument("--beta", type=int, default=0)
    p.add_argument("--gamma", type=int, default=0)
    p.add_argument(
        "--index", type=int, default=0,
        help="local box number, i = 4*f_a + f_b over (const0, const1, id, not)",
    )
    p.add_argument("--out", help="write to a file instead of stdout")
    return parser


_DISPATCH = {
    "graph": _cmd_graph,
    "constraints": _cmd_constraints,
    "hyper": _cmd_hyper,
    "project": _cmd_project,
    "member": _cmd_member,
    "score": _cmd_score,
    "optimize": _cmd_optimize,
    "vertices": _cmd_vertices,
    "decompose-ns": _cmd_decompose,
    "fixtures": _cmd_fixtures,
}


def dispatch(argv) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.cmd:
        parser.print_help()
        return EXIT_ERROR
    if args.cmd == "graph" and not getattr(args, "graph_cmd", None):
        print("usage: causalbox graph {check,mdag,districts,dsep} ...", file=sys.stderr)
        return EXIT_ERROR
    if args.cmd == "constraints" and not getattr(args, "constraints_cmd", None):
        print("usage: causalbox constraints enumerate ...", file=sys.stderr)
        return EXIT_ERROR
    if args.cmd == "hyper" and not getattr(args, "hyper_cmd", None):
        print("usage: causalbox hyper build ...", file=sys.stderr)
        return EXIT_ERROR
    if args.cmd == "fixtures" and not getattr(args, "fixtures_cmd", None):
        print("usage: causalbox fixtures emit NAME ...", file=sys.stderr)
        return EXIT_ERROR
    try:
        return _DISPATCH[args.cmd](args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except FileFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, KeyError) as exc:
        # semantic mismatches between inputs (wrong variables, cardinalities,
        # unsupported structure) are input errors, not crashes
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
