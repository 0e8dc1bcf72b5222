"""Causal DAGs with latent root variables, mDAGs, districts and d-separation.

The central object is :class:`CausalDag`: a DAG over named vertices, each
either observed (with a finite cardinality) or latent.  Latent vertices are
restricted to root positions; all semantics of the library live at the level
of distributions over the observed vertices.

The module also provides the marginal DAG (:class:`MDag`) abstraction, where
latent common causes are collapsed into bidirected faces of a simplicial
complex, the district partition derived from those faces, and the Bell-type
hypergraph lift (:class:`HyperDag`) in which every mediating observed vertex
has its outgoing edges rerouted through fresh root copies.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Mapping

__all__ = [
    "OBSERVED",
    "LATENT",
    "VertexSpec",
    "CausalDag",
    "MDag",
    "HyperDag",
    "CiConstraint",
    "CycleError",
    "UnknownVertexError",
    "FixedNotParentlessError",
    "NotADistrictError",
    "MultiLatentError",
    "validate",
    "topological_order",
    "to_mdag",
    "districts",
    "subgraph",
    "marginal_mdag",
    "d_separated",
    "ci_constraints",
    "build_hypergraph",
    "is_bell_type",
    "bell_inputs",
    "bell_outputs",
]

OBSERVED = "observed"
LATENT = "latent"


class CycleError(ValueError):
    """The graph contains a directed cycle."""


class UnknownVertexError(KeyError):
    """A referenced vertex does not exist."""


class FixedNotParentlessError(ValueError):
    """A requested fixed vertex has parents."""


class NotADistrictError(ValueError):
    """The given vertex set is not a district of the mDAG."""


class MultiLatentError(ValueError):
    """Operation requires at most one latent vertex."""


@dataclass(frozen=True)
class VertexSpec:
    name: str
    kind: str
    cardinality: int | None = None

    def __post_init__(self):
        if self.kind not in (OBSERVED, LATENT):
            raise ValueError(f"kind must be {OBSERVED!r} or {LATENT!r}")


@dataclass(frozen=True)
class CausalDag:
    """Directed graph over observed and latent vertices.

    The constructor does not enforce the model invariants; use
    :func:`validate` to obtain a report.  Operations other than ``validate``
    assume a valid graph.
    """

    vertices: tuple[VertexSpec, ...]
    edges: frozenset[tuple[str, str]]

    def __init__(
        self,
        vertices: Iterable[VertexSpec | tuple],
        edges: Iterable[tuple[str, str]] = (),
    ):
        specs = []
        for v in vertices:
            if isinstance(v, VertexSpec):
                specs.append(v)
            else:
                specs.append(VertexSpec(*v))
        object.__setattr__(self, "vertices", tuple(specs))
        object.__setattr__(self, "edges", frozenset((str(a), str(b)) for a, b in edges))

    # -- lookups -----------------------------------------------------------

    def names(self) -> list[str]:
        return [v.name for v in self.vertices]

    def spec(self, name: str) -> VertexSpec:
        for v in self.vertices:
            if v.name == name:
                return v
        raise UnknownVertexError(name)

    def has_vertex(self, name: str) -> bool:
        return any(v.name == name for v in self.vertices)

    def observed(self) -> list[str]:
        return [v.name for v in self.vertices if v.kind == OBSERVED]

    def latent(self) -> list[str]:
        return [v.name for v in self.vertices if v.kind == LATENT]

    def cardinality(self, name: str) -> int:
        spec = self.spec(name)
        if spec.cardinality is None:
            raise ValueError(f"latent vertex {name} carries no cardinality")
        return spec.cardinality

    def observed_vars(self) -> list[tuple[str, int]]:
        """(name, cardinality) pairs for observed vertices, in vertex order."""
        return [
            (v.name, v.cardinality) for v in self.vertices if v.kind == OBSERVED
        ]

    def parents(self, name: str) -> set[str]:
        return {a for a, b in self.edges if b == name}

    def children(self, name: str) -> set[str]:
        return {b for a, b in self.edges if a == name}

    def descendants(self, name: str) -> set[str]:
        """All vertices reachable by directed paths, including ``name``."""
        seen = {name}
        frontier = [name]
        while frontier:
            v = frontier.pop()
            for c in self.children(v):
                if c not in seen:
                    seen.add(c)
                    frontier.append(c)
        return seen


def validate(dag: CausalDag) -> list[str]:
    """Report every violated graph invariant; an empty list means valid."""
    report = []
    names = dag.names()
    if len(set(names)) != len(names):
        report.append("duplicate vertex names")
    known = set(names)
    for a, b in sorted(dag.edges):
        if a not in known or b not in known:
            report.append(f"edge ({a}, {b}) references unknown vertex")
    for v in dag.vertices:
        if v.kind == OBSERVED and (v.cardinality is None or v.cardinality < 1):
            report.append(f"observed vertex {v.name} needs a positive cardinality")
        if v.kind == LATENT and v.cardinality is not None:
            report.append(f"latent vertex {v.name} must not carry a cardinality")
    for v in dag.vertices:
        if v.kind == LATENT and v.name in known:
            if any(b == v.name for a, b in dag.edges):
                report.append(f"latent vertex {v.name} has incoming edge")
            if not any(a == v.name for a, b in dag.edges):
                report.append(f"latent vertex {v.name} has no outgoing edge")
    try:
        topological_order(dag)
    except CycleError:
        report.append("cycle detected")
    except UnknownVertexError:
        pass
    return report


def topological_order(dag: CausalDag) -> list[str]:
    """Topological order of all vertices, lexicographic tie-break.

    Deterministic: among vertices whose parents are all placed, the
    lexicographically smallest name comes next.
    """
    names = dag.names()
    known = set(names)
    for a, b in dag.edges:
        if a not in known or b not in known:
            raise UnknownVertexError(f"edge ({a}, {b}) references unknown vertex")
    remaining = dict.fromkeys(names)
    for n in remaining:
        remaining[n] = len(dag.parents(n))
    order = []
    ready = sorted(n for n, deg in remaining.items() if deg == 0)
    while ready:
        v = ready.pop(0)
        order.append(v)
        del remaining[v]
        changed = False
        for c in dag.children(v):
            if c in remaining:
                remaining[c] -= 1
                if remaining[c] == 0:
                    ready.append(c)
                    changed = True
        if changed:
            ready.sort()
    if remaining:
        raise CycleError(f"cycle detected among {sorted(remaining)}")
    return order


@dataclass(frozen=True)
class MDag:
    """Marginal DAG: directed edges over random and fixed vertices plus a
    simplicial complex of bidirected faces, stored by its maximal faces.

    Every random vertex belongs to at least one face (a singleton face is
    implied for vertices in no larger face); fixed vertices have no incoming
    edges.
    """

    random_vertices: tuple[str, ...]
    fixed_vertices: tuple[str, ...]
    edges: frozenset[tuple[str, str]]
    faces: frozenset[frozenset[str]]

    def __init__(self, random_vertices, fixed_vertices, edges, faces):
        rnd = tuple(sorted(random_vertices))
        fixed = tuple(sorted(fixed_vertices))
        edges = frozenset(edges)
        rset = set(rnd)
        # normalize: keep only maximal faces over random vertices, add
        # singletons for uncovered vertices
        cleaned = {frozenset(f) & rset for f in faces}
        cleaned = {f for f in cleaned if f}
        maximal = {
            f for f in cleaned if not any(f < g for g in cleaned)
        }
        covered = set().union(*maximal) if maximal else set()
        for v in rnd:
            if v not in covered:
                maximal.add(frozenset([v]))
        object.__setattr__(self, "random_vertices", rnd)
        object.__setattr__(self, "fixed_vertices", fixed)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "faces", frozenset(maximal))
        fset = set(fixed)
        if rset & fset:
            raise ValueError("random and fixed vertices overlap")
        for a, b in edges:
            if b in fset:
                raise ValueError(f"fixed vertex {b} has an incoming edge")
            if a not in rset | fset or b not in rset:
                raise ValueError(f"edge ({a}, {b}) leaves the vertex pool")

    def parents(self, name: str) -> set[str]:
        return {a for a, b in self.edges if b == name}

    def children(self, name: str) -> set[str]:
        return {b for a, b in self.edges if a == name}

    def parents_of(self, group: Iterable[str]) -> set[str]:
        group = set(group)
        return {a for a, b in self.edges if b in group} - group

    def bidirected(self, u: str, v: str) -> bool:
        pair = {u, v}
        return any(pair <= f for f in self.faces)

    def canonical(self) -> tuple:
        """Hashable canonical form, used for memoization."""
        return (
            self.random_vertices,
            self.fixed_vertices,
            tuple(sorted(self.edges)),
            tuple(sorted(tuple(sorted(f)) for f in self.faces)),
        )


def to_mdag(dag: CausalDag, fixed: Iterable[str] = ()) -> MDag:
    """Marginal DAG of ``dag``: latent vertices abstracted into faces.

    Each latent vertex's set of observed children becomes a maximal face.
    ``fixed`` must be parentless observed vertices.
    """
    fixed = set(fixed)
    observed = set(dag.observed())
    for w in fixed:
        if w not in observed:
            raise UnknownVertexError(f"fixed vertex {w} is not observed")
        if dag.parents(w):
            raise FixedNotParentlessError(f"fixed vertex {w} has parents")
    random_vertices = observed - fixed
    edges = {
        (a, b)
        for a, b in dag.edges
        if a in observed and b in random_vertices
    }
    faces = set()
    for lam in dag.latent():
        face = frozenset(dag.children(lam) & random_vertices)
        if face:
            faces.add(face)
    return MDag(random_vertices, fixed, edges, faces)


def districts(m: MDag) -> list[frozenset[str]]:
    """Partition of the random vertices into districts.

    Two vertices share a district iff they are connected through a chain of
    bidirected faces.  Districts are returned sorted by smallest member.
    """
    parent = {v: v for v in m.random_vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for face in m.faces:
        members = sorted(face)
        for u, v in zip(members, members[1:]):
            parent[find(u)] = find(v)
    groups: dict[str, set[str]] = {}
    for v in m.random_vertices:
        groups.setdefault(find(v), set()).add(v)
    return sorted((frozenset(g) for g in groups.values()), key=lambda d: min(d))


def subgraph(m: MDag, district: frozenset[str]) -> MDag:
    """Subgraph associated with a district: the district becomes the random
    set and its parents become the fixed set; edges and faces are inherited."""
    if district not in districts(m):
        raise NotADistrictError(f"{sorted(district)} is not a district")
    fixed = m.parents_of(district)
    edges = {(a, b) for a, b in m.edges if b in district and (a in district or a in fixed)}
    faces = {f & district for f in m.faces}
    return MDag(district, fixed, edges, faces)


def marginal_mdag(m: MDag, drop: str) -> MDag:
    """mDAG after marginalizing a childless random vertex.

    Former fixed vertices that no longer parent any remaining random vertex
    drop out of the graph; that shrinkage is what surfaces Verma constraints.
    """
    if drop not in m.random_vertices:
        raise UnknownVertexError(drop)
    if m.children(drop):
        raise ValueError(f"{drop} is not childless")
    remaining = set(m.random_vertices) - {drop}
    fixed = m.parents_of(remaining)
    edges = {(a, b) for a, b in m.edges if b in remaining and (a in remaining or a in fixed)}
    faces = {f & remaining for f in m.faces}
    return MDag(remaining, fixed, edges, faces)


# -- d-separation ----------------------------------------------------------


def d_separated(
    dag: CausalDag, a: Iterable[str], b: Iterable[str], z: Iterable[str]
) -> bool:
    """Whether vertex sets ``a`` and ``b`` are d-separated given ``z``.

    Latent vertices participate as ordinary path vertices.  A path is active
    given ``z`` when every collider on it is in ``z`` or has a descendant in
    ``z``, and no non-collider on it is in ``z``; the sets are d-separated
    when no active path connects them.

    Implemented as the standard reachability search over (vertex, direction)
    states, linear in the size of the graph.
    """
    a, b, z = set(a), set(b), set(z)
    known = set(dag.names())
    for group in (a, b, z):
        unknown = group - known
        if unknown:
            raise UnknownVertexError(f"unknown vertices {sorted(unknown)}")
    if (a & b) or (a & z) or (b & z):
        raise ValueError("a, b, z must be pairwise disjoint")
    if not a or not b:
        return True
    # vertices with a descendant in z (including z itself)
    anc_of_z = set()
    frontier = list(z)
    anc_of_z |= z
    while frontier:
        v = frontier.pop()
        for p in dag.parents(v):
            if p not in anc_of_z:
                anc_of_z.add(p)
                frontier.append(p)
    # states: (vertex, "up") approaching from a child, (vertex, "down")
    # approaching from a parent
    start = [(v, "up") for v in a]
    seen = set(start)
    frontier = list(start)
    while frontier:
        v, direction = frontier.pop()
        if v in b:
            return False
        moves = []
        if direction == "up":
            if v not in z:
                moves += [(p, "up") for p in dag.parents(v)]
                moves += [(c, "down") for c in dag.children(v)]
        else:
            if v not in z:
                moves += [(c, "down") for c in dag.children(v)]
            if v in anc_of_z:
                moves += [(p, "up") for p in dag.parents(v)]
        for state in moves:
            if state not in seen:
                seen.add(state)
                frontier.append(state)
    return True


@dataclass(frozen=True, order=True)
class CiConstraint:
    """Conditional independence statement ``a`` independent of ``b`` given
    ``given``, with singleton a < b lexicographically."""

    a: str
    b: str
    given: frozenset[str] = frozenset()

    def sort_key(self):
        return (self.a, self.b, tuple(sorted(self.given)))

    def __str__(self):
        if self.given:
            return f"CI: {self.a} _||_ {self.b} | {', '.join(sorted(self.given))}"
        return f"CI: {self.a} _||_ {self.b}"


def ci_constraints(dag: CausalDag) -> list[CiConstraint]:
    """All singleton-pair conditional independences among observed vertices.

    Enumerates statements (A indep B | Z) with A, B single observed vertices
    and Z ranging over subsets of the remaining observed vertices, filtered
    by d-separation.  Set-valued statements are recovered by conjunction.
    """
    return list(_ci_constraints_cached(dag))


@lru_cache(maxsize=None)
def _ci_constraints_cached(dag: CausalDag) -> tuple[CiConstraint, ...]:
    observed = sorted(dag.observed())
    found = []
    for a, b in combinations(observed, 2):
        rest = [v for v in observed if v not in (a, b)]
        for r in range(len(rest) + 1):
            for given in combinations(rest, r):
                if d_separated(dag, {a}, {b}, set(given)):
                    found.append(CiConstraint(a, b, frozenset(given)))
    return tuple(sorted(found, key=CiConstraint.sort_key))


# -- hypergraph lift -------------------------------------------------------


@dataclass(frozen=True)
class HyperDag:
    """Bell-type lift of a causal DAG.

    ``copy_map`` sends each added root vertex to its ``(source, child)``
    pair: the copy inherits the source's cardinality and feeds exactly the
    one former child.
    """

    base: CausalDag
    copy_map: Mapping[str, tuple[str, str]]

    @property
    def copies(self) -> dict[str, str]:
        """copy name -> source name, the projection's diagonal pairing."""
        return {u: src for u, (src, _child) in self.copy_map.items()}


def _fresh_name(base: str, taken: set[str]) -> str:
    name = base
    while name in taken:
        name += "_"
    return name


def build_hypergraph(dag: CausalDag) -> HyperDag:
    """Reroute every mediating observed vertex through fresh root copies.

    An observed vertex with both incoming edges (from anywhere) and outgoing
    edges to observed vertices has those outgoing edges removed; each former
    child instead receives an edge from a fresh root copy of the vertex.
    The result is Bell-type: no observed vertex keeps both incoming edges
    and observed children.
    """
    observed = set(dag.observed())
    targets = [
        v
        for v in sorted(observed)
        if dag.parents(v) and (dag.children(v) & observed)
    ]
    vertices = list(dag.vertices)
    edges = set(dag.edges)
    taken = set(dag.names())
    copy_map: dict[str, tuple[str, str]] = {}
    for v in targets:
        for child in sorted(dag.children(v) & observed):
            edges.discard((v, child))
            u = _fresh_name(f"{v}_{child}", taken)
            taken.add(u)
            vertices.append(VertexSpec(u, OBSERVED, dag.cardinality(v)))
            edges.add((u, child))
            copy_map[u] = (v, child)
    return HyperDag(CausalDag(vertices, edges), copy_map)


def is_bell_type(dag: CausalDag) -> bool:
    """No observed vertex has both incoming edges and observed children."""
    observed = set(dag.observed())
    return not any(
        dag.parents(v) and (dag.children(v) & observed) for v in observed
    )


def bell_inputs(dag: CausalDag) -> list[str]:
    """Observed root vertices with at least one child: the setting variables."""
    return sorted(
        v for v in dag.observed() if not dag.parents(v) and dag.children(v)
    )


def bell_outputs(dag: CausalDag) -> list[str]:
    """Observed vertices that are not setting variables: the outcome variables.

    Isolated observed roots count as outputs with an empty input set.
    """
    ins = set(bell_inputs(dag))
    return sorted(v for v in dag.observed() if v not in ins)
