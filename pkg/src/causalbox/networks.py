"""Classical Bayesian networks over causal DAGs.

A :class:`ClassicalNetwork` equips every vertex of a DAG, latent vertices
included, with an exact-rational conditional probability table.  Its joint
distribution over the observed vertices is the classical model of the graph;
the set of all such distributions is the classical polytope of the DAG.

The module also provides the lift of a network onto the hypergraph of its
graph: copies become independent uniform roots and rerouted children read
their former parent's value from the copy.  Projecting the lifted joint on
the diagonal event recovers the original observed joint exactly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .graphs import OBSERVED, CausalDag, HyperDag, topological_order
from .tables import Kernel, assignments

__all__ = ["ClassicalNetwork", "random_network", "lift_network"]


@dataclass(frozen=True)
class ClassicalNetwork:
    """A DAG plus one CPT per vertex.

    Each CPT is a kernel with the vertex as single outcome variable and its
    parents (sorted by name) as index variables.  Latent vertices get an
    explicit cardinality here, fixed by their CPT.
    """

    dag: CausalDag
    cpts: Mapping[str, Kernel]

    def __post_init__(self):
        for v in self.dag.names():
            if v not in self.cpts:
                raise ValueError(f"missing CPT for {v}")
            cpt = self.cpts[v]
            if [n for n, _ in cpt.outcome_vars] != [v]:
                raise ValueError(f"CPT for {v} must have {v} as its only outcome")
            if [n for n, _ in cpt.index_vars] != sorted(self.dag.parents(v)):
                raise ValueError(f"CPT for {v} must be indexed by its sorted parents")

    def cardinality(self, name: str) -> int:
        return self.cpts[name].outcome_vars[0][1]

    def joint_observed(self) -> Kernel:
        """Exact joint distribution of the observed vertices.

        Sums the product of all CPTs over the latent assignments.
        """
        order = topological_order(self.dag)
        all_vars = [(v, self.cardinality(v)) for v in order]
        observed = [v for v in order if self.dag.spec(v).kind == OBSERVED]
        obs_vars = [(v, self.cardinality(v)) for v in observed]
        table: dict[tuple[int, ...], Fraction] = {}
        for values in assignments(all_vars):
            a = dict(zip(order, values))
            p = Fraction(1)
            for v in order:
                p *= self.cpts[v].value({k: a[k] for k in (v, *self.dag.parents(v))})
                if p == 0:
                    break
            if p == 0:
                continue
            key = tuple(a[v] for v in observed)
            table[key] = table.get(key, Fraction(0)) + p
        return Kernel.from_mapping(obs_vars, (), table)


def random_network(
    dag: CausalDag,
    rng: random.Random,
    latent_cardinality: int = 4,
    weight_range: int = 8,
) -> ClassicalNetwork:
    """Random full-support rational CPTs for every vertex.

    Entries are drawn as integer weights in [1, weight_range] and normalized
    exactly, so every CPT row is a reduced rational distribution.
    """
    cpts = {}
    card = {
        v.name: (v.cardinality if v.kind == OBSERVED else latent_cardinality)
        for v in dag.vertices
    }
    for v in dag.names():
        parents = sorted(dag.parents(v))
        index_vars = tuple((p, card[p]) for p in parents)
        rows = {}
        for idx in assignments(index_vars):
            weights = [rng.randint(1, weight_range) for _ in range(card[v])]
            total = sum(weights)
            for value, w in enumerate(weights):
                rows[(value,) + idx] = Fraction(w, total)
        cpts[v] = Kernel.from_mapping(((v, card[v]),), index_vars, rows)
    return ClassicalNetwork(dag, cpts)


def lift_network(net: ClassicalNetwork, hyper: HyperDag) -> ClassicalNetwork:
    """Lift a network onto the hypergraph of its DAG.

    Copy vertices become independent uniform roots; a child whose edge was
    rerouted reads the copy's value where it used to read the source's.
    The projection of the lifted observed joint on the diagonal event equals
    the original observed joint exactly.
    """
    renamed: dict[str, dict[str, str]] = {}
    for u, (source, child) in hyper.copy_map.items():
        renamed.setdefault(child, {})[source] = u
    cpts: dict[str, Kernel] = {}
    for v in hyper.base.names():
        if v in hyper.copy_map:
            source, _ = hyper.copy_map[v]
            card = net.cardinality(source)
            cpts[v] = Kernel.from_function(
                ((v, card),), (), lambda a: Fraction(1, card)
            )
            continue
        old = net.cpts[v]
        swap = renamed.get(v, {})
        if not swap:
            cpts[v] = old
            continue
        new_index = tuple(
            sorted(((swap.get(n, n), c) for n, c in old.index_vars))
        )
        back = {swap.get(n, n): n for n, _ in old.index_vars}

        def fn(a, old=old, back=back, v=v):
            lookup = {back[n]: val for n, val in a.items() if n != v}
            lookup[v] = a[v]
            return old.value(lookup)

        cpts[v] = Kernel.from_function(old.outcome_vars, new_index, fn)
    return ClassicalNetwork(hyper.base, cpts)
