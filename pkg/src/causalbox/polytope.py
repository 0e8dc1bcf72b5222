"""Classical polytope machinery: deterministic vertices, exact membership
LPs, linear-functional optimization and the bipartite no-signalling
decomposition.

The classical distribution set of a single-latent graph is a convex polytope
whose vertices arise from deterministic response strategies on the Bell-type
hypergraph, projected back through the diagonal post-selection.  Membership
of a conditional table is then an exact linear-programming feasibility
question over convex weights of those vertices.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product as _iterproduct
from typing import Callable, Mapping, Sequence

from .boxes import ns_box_vertices, pr_box
from .graphs import (
    CausalDag,
    HyperDag,
    MultiLatentError,
    bell_inputs,
    bell_outputs,
    build_hypergraph,
    is_bell_type,
)
from .linprog import LinearSystem, lp_solve
from .tables import Kernel, assignments, join_inputs, project, split_joint, uniform_table

__all__ = [
    "Vertex",
    "NotNoSignallingError",
    "DecompositionNotFoundError",
    "enumerate_h_vertices",
    "enumerate_classical_vertices",
    "classical_member",
    "maximize_functional",
    "functional_from_indicator",
    "decompose_ns_box",
    "MemberVerdict",
]


class NotNoSignallingError(ValueError):
    """The box violates a no-signalling equality."""


class DecompositionNotFoundError(RuntimeError):
    """No PR-plus-local decomposition found; this contradicts the geometric
    decomposition guarantee for bipartite no-signalling boxes and signals a
    bug."""


@dataclass(frozen=True)
class Vertex:
    """Deterministic strategy with its induced conditional table.

    ``responses`` maps every output vertex to a tuple listing its value for
    each joint assignment of its observed parents (mixed-radix order).
    """

    responses: Mapping[str, tuple[int, ...]]
    table: Kernel


def _response_functions(dag: CausalDag, output: str) -> list[tuple[int, ...]]:
    parents = sorted(p for p in dag.parents(output) if p in set(dag.observed()))
    domain = 1
    for p in parents:
        domain *= dag.cardinality(p)
    card = dag.cardinality(output)
    return [resp for resp in _iterproduct(range(card), repeat=domain)]


def _observed_parents(dag: CausalDag, v: str) -> list[str]:
    observed = set(dag.observed())
    return sorted(p for p in dag.parents(v) if p in observed)


def _strategy_table(
    dag: CausalDag, outputs: list[str], inputs: list[str], responses: dict
) -> Kernel:
    out_vars = tuple((v, dag.cardinality(v)) for v in outputs)
    in_vars = tuple((v, dag.cardinality(v)) for v in inputs)

    def fn(a):
        for v in outputs:
            parents = _observed_parents(dag, v)
            pos = 0
            for p in parents:
                pos = pos * dag.cardinality(p) + a[p]
            if a[v] != responses[v][pos]:
                return Fraction(0)
        return Fraction(1)

    return Kernel.from_function(out_vars, in_vars, fn)


def _vertex_chunk(args) -> list[Vertex]:
    dag, outputs, inputs, combos = args
    out = []
    for combo in combos:
        responses = dict(zip(outputs, combo))
        out.append(Vertex(responses, _strategy_table(dag, outputs, inputs, responses)))
    return out


def enumerate_h_vertices(h: HyperDag, jobs: int = 1) -> list[Vertex]:
    """Deterministic strategies of a Bell-type single-latent hypergraph.

    Every output vertex independently picks a response function of its
    observed parents; the count is the product over outputs of
    cardinality ** (parent assignment count).  ``jobs`` > 1 builds the
    strategy tables in parallel worker processes.
    """
    if len(h.base.latent()) > 1:
        raise MultiLatentError("vertex enumeration requires at most one latent vertex")
    if not is_bell_type(h.base):
        raise ValueError("hypergraph base is not Bell-type")
    inputs = bell_inputs(h.base)
    outputs = bell_outputs(h.base)
    choices = [_response_functions(h.base, v) for v in outputs]
    combos = list(_iterproduct(*choices))
    if jobs > 1 and len(combos) > 1:
        from concurrent.futures import ProcessPoolExecutor

        step = (len(combos) + jobs - 1) // jobs
        chunks = [
            (h.base, outputs, inputs, combos[i : i + step])
            for i in range(0, len(combos), step)
        ]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_vertex_chunk, chunks))
        return [v for part in parts for v in part]
    return _vertex_chunk((h.base, outputs, inputs, combos))


def enumerate_classical_vertices(g: CausalDag, jobs: int = 1) -> list[Vertex]:
    """Vertices of the classical polytope of a single-latent graph.

    Each hypergraph strategy is lifted to a joint with uniform inputs,
    projected through the diagonal event and split back into a conditional
    on the original graph's setting variables; exact duplicates collapse.
    """
    if jobs == 1:
        return list(_classical_vertices_cached(g))
    return _enumerate_classical_vertices(g, jobs)


@lru_cache(maxsize=None)
def _classical_vertices_cached(g: CausalDag) -> tuple[Vertex, ...]:
    return tuple(_enumerate_classical_vertices(g, 1))


def _enumerate_classical_vertices(g: CausalDag, jobs: int) -> list[Vertex]:
    if len(g.latent()) > 1:
        raise MultiLatentError("classical vertices require at most one latent vertex")
    h = build_hypergraph(g)
    g_inputs = bell_inputs(g)
    g_outputs = bell_outputs(g)
    h_inputs = bell_inputs(h.base)
    seen = {}
    for hv in enumerate_h_vertices(h, jobs=jobs):
        joint = join_inputs(
            hv.table, uniform_table(tuple((v, h.base.cardinality(v)) for v in h_inputs))
        )
        projected = project(joint, h.copies)
        if g_inputs:
            table, _ = split_joint(projected, g_inputs)
        else:
            table = projected
        key = (table.outcome_vars, table.index_vars, table.entries)
        if key not in seen:
            seen[key] = Vertex(hv.responses, table)
    return list(seen.values())


@dataclass(frozen=True)
class MemberVerdict:
    member: bool
    weights: tuple[Fraction, ...] | None = None


def _as_conditional(p: Kernel, template: Kernel) -> Kernel:
    """Bring ``p`` to the conditional shape of the vertex tables."""
    if p.index_vars == template.index_vars and p.outcome_vars == template.outcome_vars:
        return p
    index_names = [n for n, _ in template.index_vars]
    if p.is_prob_table and index_names:
        kernel, _ = split_joint(p, index_names)
        p = kernel
    if set(p.var_names()) != set(template.var_names()):
        raise ValueError("distribution variables do not match the graph's vertices")
    # reorder variables to the template layout
    def fn(a):
        return p.value(a)

    return Kernel.from_function(template.outcome_vars, template.index_vars, fn)


def classical_member(p: Kernel, g: CausalDag) -> MemberVerdict:
    """Exact membership of a conditional table in the classical polytope.

    Solves the feasibility LP p = sum_i w_i vertex_i with w >= 0 summing to
    one, row-wise over the setting variables; returns the weights on
    success.  Joint tables are split on the graph's setting variables first.
    """
    vertices = enumerate_classical_vertices(g)
    return _convex_member(p, [v.table for v in vertices])


def _convex_member(p: Kernel, tables: list[Kernel]) -> MemberVerdict:
    target = _as_conditional(p, tables[0])
    names = [f"w{i}" for i in range(len(tables))]
    system = LinearSystem(tuple(names))
    system.add_equality({n: Fraction(1) for n in names}, Fraction(1))
    layout = list(assignments(target.variables))
    for values in layout:
        env = dict(zip(target.var_names(), values))
        coeffs = {}
        for name, table in zip(names, tables):
            c = table.value(env)
            if c:
                coeffs[name] = c
        system.add_equality(coeffs, target.value(env))
    result = lp_solve(system)
    if not result.is_optimal:
        return MemberVerdict(False)
    return MemberVerdict(True, tuple(result.assignment[n] for n in names))


def functional_from_indicator(
    template: Kernel, indicator: Callable[[Mapping[str, int]], Fraction]
) -> dict[tuple[int, ...], Fraction]:
    """Coefficient map over table cells from a callable on assignments."""
    out = {}
    for values in assignments(template.variables):
        env = dict(zip(template.var_names(), values))
        c = Fraction(indicator(env))
        if c:
            out[values] = c
    return out


def maximize_functional(
    functional: Mapping[tuple[int, ...], Fraction], vertices: Sequence[Vertex | Kernel]
) -> tuple[Fraction, Vertex | Kernel]:
    """Maximize a linear functional over a finite vertex list.

    The maximum of a linear functional over a polytope is attained at a
    vertex, so this is exact polytope optimization.
    """
    if not vertices:
        raise ValueError("vertex list is empty")
    best = None
    best_v = None
    for v in vertices:
        table = v.table if isinstance(v, Vertex) else v
        names = table.var_names()
        score = Fraction(0)
        for values, coeff in functional.items():
            score += coeff * table.value(dict(zip(names, values)))
        if best is None or score > best:
            best, best_v = score, v
    return best, best_v


def _is_ns_bipartite(q: Kernel) -> bool:
    if len(q.outcome_vars) != 2 or len(q.index_vars) != 2:
        return False
    (a_n, a_c), (b_n, b_c) = q.outcome_vars
    (x_n, x_c), (y_n, y_c) = q.index_vars
    if (a_c, b_c, x_c, y_c) != (2, 2, 2, 2):
        return False
    for a in range(2):
        for x in range(2):
            vals = {
                sum(
                    q.value({a_n: a, b_n: b, x_n: x, y_n: y}) for b in range(2)
                )
                for y in range(2)
            }
            if len(vals) > 1:
                return False
    for b in range(2):
        for y in range(2):
            vals = {
                sum(
                    q.value({a_n: a, b_n: b, x_n: x, y_n: y}) for a in range(2)
                )
                for x in range(2)
            }
            if len(vals) > 1:
                return False
    return True


def decompose_ns_box(q: Kernel):
    """Decompose a bipartite no-signalling box into at most one PR box plus
    local deterministic boxes.

    Tries a locals-only decomposition first, then each (alpha, beta, gamma)
    PR box in lexicographic order; the first feasible exact decomposition is
    returned as ``(pr_index_or_None, weights)`` where ``weights`` lists the
    PR weight (zero for locals-only) followed by the sixteen local weights.
    """
    if not _is_ns_bipartite(q):
        raise NotNoSignallingError("box is not a bipartite no-signalling kernel")
    locals_ = ns_box_vertices()[:16]
    verdict = _convex_member(q, locals_)
    if verdict.member:
        return None, (Fraction(0),) + verdict.weights
    for alpha in (0, 1):
        for beta in (0, 1):
            for gamma in (0, 1):
                candidates = [pr_box(alpha, beta, gamma)] + locals_
                verdict = _convex_member(q, candidates)
                if verdict.member:
                    return (alpha, beta, gamma), verdict.weights
    raise DecompositionNotFoundError(
        "no-signalling box admits no PR-plus-local decomposition"
    )
