"""Equality constraints of the nested Markov model.

The recursion alternates two moves on marginal DAGs, mirroring the model's
recursive definition: factorize the current kernel over districts, and
marginalize childless random vertices.  Whenever a derived kernel still
references a conditioning variable that the graph no longer licenses, and no
chain of conditional-independence rewrites removes that reference, the
kernel together with the offending variables is emitted as a Verma record.
Conditional-independence statements themselves are enumerated directly by
d-separation and merged into the record list.

A distribution lies in the nested Markov model of a graph iff it satisfies
every record exactly; :func:`check_nested` evaluates that with exact
arithmetic and returns concrete witnesses for violated records.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .graphs import (
    CausalDag,
    CiConstraint,
    MDag,
    NotADistrictError,
    ci_constraints,
    d_separated,
    districts,
    marginal_mdag,
    subgraph,
    to_mdag,
    topological_order,
)
from .recipes import (
    Evaluator,
    Expr,
    FactorExpr,
    ProductExpr,
    QuotientExpr,
    SumExpr,
    canonical,
    factor,
    free_vars,
    product,
    quotient,
    render,
    simplify,
    sum_over,
)
from .tables import Kernel, ZeroConditioningError, assignments, marginalize

__all__ = [
    "VermaConstraint",
    "ConstraintRecord",
    "NestedVerdict",
    "Violation",
    "district_kernel",
    "district_kernel_recipe",
    "enumerate_constraints",
    "check_nested",
    "i_member",
    "reduce_expr",
]


@dataclass(frozen=True)
class VermaConstraint:
    """A derived kernel that must not depend on some of its index variables."""

    recipe: Expr
    independent_of: frozenset[str]

    def sort_key(self):
        return (tuple(sorted(self.independent_of)), str(canonical(self.recipe)))

    def __str__(self):
        return f"VERMA: {render(self.recipe)} _||_ {', '.join(sorted(self.independent_of))}"


ConstraintRecord = CiConstraint | VermaConstraint


# -- conditional-independence rewrites ---------------------------------------


def _reduce_factor(f: FactorExpr, dag: CausalDag) -> Expr:
    """Drop d-separated conditioning variables from one conditional."""
    given = list(f.given)
    changed = True
    while changed:
        changed = False
        for w in sorted(given):
            rest = set(given) - {w}
            if d_separated(dag, set(f.outcomes), {w}, rest):
                given.remove(w)
                changed = True
    return factor(f.outcomes, given)


def _expandable(f: FactorExpr, extra: set[str], dag: CausalDag) -> FactorExpr | None:
    """Conditioning set extension p(O|G) -> p(O|G, extra), justified by
    d-separation, or None if some variable cannot be added."""
    given = set(f.given)
    for e in sorted(extra):
        if e in given or e in f.outcomes:
            return None
        if not d_separated(dag, set(f.outcomes), {e}, given):
            return None
        given.add(e)
    return FactorExpr(f.outcomes, tuple(given))


def _merge_in_products(e: Expr, dag: CausalDag) -> Expr:
    """Try one chain merge p(O1|G) p(O2|G,O1) -> p(O1,O2|G) somewhere,
    extending conditioning sets by d-separated variables where needed."""
    if isinstance(e, ProductExpr):
        parts = list(e.factors)
        for j, fj in enumerate(parts):
            if not isinstance(fj, FactorExpr):
                continue
            for i, fi in enumerate(parts):
                if i == j or not isinstance(fi, FactorExpr):
                    continue
                if not set(fi.outcomes) <= set(fj.given):
                    continue
                if not set(fi.given) <= set(fj.given):
                    continue
                extra = set(fj.given) - set(fi.given) - set(fi.outcomes)
                expanded = _expandable(fi, extra, dag) if extra else fi
                if expanded is None:
                    continue
                merged = factor(
                    fi.outcomes + fj.outcomes,
                    tuple(set(fj.given) - set(fi.outcomes)),
                )
                rest = [p for k, p in enumerate(parts) if k not in (i, j)]
                return product(rest + [merged])
        return product(
            [_merge_in_products(p, dag) for p in e.factors]
        )
    if isinstance(e, SumExpr):
        return SumExpr(e.var, _merge_in_products(e.body, dag))
    if isinstance(e, QuotientExpr):
        return quotient(_merge_in_products(e.num, dag), _merge_in_products(e.den, dag))
    return e


def _harmonize_quotient(e: Expr, dag: CausalDag) -> Expr:
    """Align a quotient of single conditionals so it collapses to one
    conditional: p(N|G,H) / p(D|G) with D within N becomes p(N-D|G,H,D)
    when the denominator extends to p(D|G,H)."""
    if isinstance(e, QuotientExpr):
        num = _harmonize_quotient(e.num, dag)
        den = _harmonize_quotient(e.den, dag)
        if (
            isinstance(num, FactorExpr)
            and isinstance(den, FactorExpr)
            and set(den.outcomes) < set(num.outcomes)
            and set(den.given) <= set(num.given)
        ):
            extra = set(num.given) - set(den.given)
            expanded = _expandable(den, extra, dag) if extra else den
            if expanded is not None:
                rest = tuple(o for o in num.outcomes if o not in den.outcomes)
                return factor(rest, num.given + den.outcomes)
        return quotient(num, den)
    if isinstance(e, ProductExpr):
        return product([_harmonize_quotient(p, dag) for p in e.factors])
    if isinstance(e, SumExpr):
        return SumExpr(e.var, _harmonize_quotient(e.body, dag))
    return e


def _reduce_all_factors(e: Expr, dag: CausalDag) -> Expr:
    if isinstance(e, FactorExpr):
        return _reduce_factor(e, dag)
    if isinstance(e, ProductExpr):
        return product([_reduce_all_factors(p, dag) for p in e.factors])
    if isinstance(e, SumExpr):
        return SumExpr(e.var, _reduce_all_factors(e.body, dag))
    return quotient(
        _reduce_all_factors(e.num, dag), _reduce_all_factors(e.den, dag)
    )


def reduce_expr(e: Expr, dag: CausalDag) -> Expr:
    """Normalize a recipe modulo the graph's conditional independences.

    Alternates structural simplification with d-separation justified
    rewrites (conditioning-set reduction, chain merges, quotient collapse)
    until a fixed point.  Sound for every distribution satisfying the CI
    constraints of the graph, which are checked alongside the Verma records.
    """
    e = simplify(e)
    seen = {canonical(e)}
    while True:
        e2 = simplify(_reduce_all_factors(e, dag))
        e2 = simplify(_merge_in_products(e2, dag))
        e2 = simplify(_harmonize_quotient(e2, dag))
        key = canonical(e2)
        if key in seen:
            return e2
        seen.add(key)
        e = e2


# -- kernels -------------------------------------------------------------------


def _observed_order(dag: CausalDag, order=None) -> list[str]:
    if order is None:
        order = topological_order(dag)
    observed = set(dag.observed())
    out = [v for v in order if v in observed]
    if set(out) != observed:
        raise ValueError("order must cover all observed vertices")
    return out


def _chain_expr(order: list[str]) -> Expr:
    parts = []
    for i, v in enumerate(order):
        parts.append(factor((v,), tuple(order[:i])))
    return product(parts)


def _kernel_conditional(k: Expr, v: str, order: list[str], present: list[str]) -> Expr:
    """Conditional of the current kernel on its random predecessors."""
    pos = present.index(v)
    later = present[pos + 1 :]
    num = simplify(sum_over(later, k))
    den = simplify(sum_over([v] + later, k))
    return simplify(quotient(num, den))


def district_kernel_recipe(
    dag: CausalDag, district: frozenset[str], order=None
) -> Expr:
    """Symbolic recipe of a top-level district kernel: the ordered product
    of chain conditionals, normalized modulo conditional independences."""
    order = _observed_order(dag, order)
    m = to_mdag(dag)
    if district not in districts(m):
        raise NotADistrictError(f"{sorted(district)} is not a district")
    k = _chain_expr(order)
    parts = [
        _kernel_conditional(k, v, order, order) for v in order if v in district
    ]
    return reduce_expr(product(parts), dag)


def district_kernel(
    table: Kernel, dag: CausalDag, district: frozenset[str], order=None
) -> Kernel:
    """Evaluate a district's kernel on a concrete observed joint.

    Returns the kernel over the district indexed by its parents.  Raises
    :class:`ZeroConditioningError` if a required conditional is undefined,
    and ``ValueError`` if the recipe still depends on other variables (it
    cannot for distributions generated from the graph).
    """
    order = _observed_order(dag, order)
    m = to_mdag(dag)
    recipe = district_kernel_recipe(dag, district, order)
    outs = tuple((v, table.cardinality(v)) for v in sorted(district))
    index = tuple((v, table.cardinality(v)) for v in sorted(m.parents_of(district)))
    extra = sorted(
        free_vars(recipe) - {n for n, _ in outs} - {n for n, _ in index}
    )
    extra_vars = tuple((v, table.cardinality(v)) for v in extra)
    ev = Evaluator(table)
    entries = {}
    for values in assignments(outs + index):
        env = dict(zip([n for n, _ in outs + index], values))
        results = []
        for extra_values in assignments(extra_vars):
            env.update(zip(extra, extra_values))
            results.append(ev.evaluate(recipe, env))
        defined = [r for r in results if r is not None]
        if not defined:
            raise ZeroConditioningError(env)
        if any(r != defined[0] for r in defined):
            raise ValueError(
                f"district kernel not well-defined: recipe varies with {extra}"
            )
        entries[values] = defined[0]
    return Kernel.from_mapping(outs, index, entries)


# -- enumeration ---------------------------------------------------------------


def enumerate_constraints(dag: CausalDag) -> list[ConstraintRecord]:
    """All equality constraints of the nested Markov model of ``dag``.

    Conditional independences come from d-separation; Verma records come
    from the district and marginalization recursion.  Records are
    canonicalized and deduplicated; CI-implied kernels reduce away and are
    not reported twice.
    """
    return list(_enumerate_constraints_cached(dag))


@lru_cache(maxsize=None)
def _enumerate_constraints_cached(dag: CausalDag) -> tuple[ConstraintRecord, ...]:
    order = _observed_order(dag)
    verma: dict[tuple, VermaConstraint] = {}
    visited: set[tuple] = set()
    stack: list[tuple[MDag, Expr]] = [(to_mdag(dag), _chain_expr(order))]
    while stack:
        m, k = stack.pop()
        k = reduce_expr(k, dag)
        key = (m.canonical(), canonical(k))
        if key in visited:
            continue
        visited.add(key)
        excess = free_vars(k) - set(m.random_vertices) - set(m.fixed_vertices)
        if excess:
            record = VermaConstraint(k, frozenset(excess))
            verma.setdefault((canonical(k), record.independent_of), record)
        present = [v for v in order if v in m.random_vertices]
        parts = districts(m)
        if len(parts) > 1:
            for d in parts:
                sub = subgraph(m, d)
                kd = product(
                    [_kernel_conditional(k, v, order, present) for v in present if v in d]
                )
                stack.append((sub, kd))
        for v in present:
            if not m.children(v):
                stack.append((marginal_mdag(m, v), simplify(SumExpr(v, k))))
    records: list[ConstraintRecord] = list(ci_constraints(dag))
    records.extend(sorted(verma.values(), key=VermaConstraint.sort_key))
    return tuple(records)


# -- membership ---------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    record: ConstraintRecord
    witness: dict

    def __str__(self):
        return f"{self.record}  violated at {self.witness}"


@dataclass(frozen=True)
class NestedVerdict:
    member: bool
    violations: tuple[Violation, ...] = ()
    indeterminate: tuple[ConstraintRecord, ...] = ()


def _ci_violation(table: Kernel, record: CiConstraint) -> dict | None:
    names = set(table.var_names())
    a, b, z = {record.a}, {record.b}, set(record.given)
    other = names - a - b - z
    p_abz = marginalize(table, other)
    p_az = marginalize(p_abz, b)
    p_bz = marginalize(p_abz, a)
    p_z = marginalize(p_az, a)
    for assign, v_abz in p_abz.cells():
        v_z = p_z.value({k: assign[k] for k in z}) if z else Fraction(1)
        if v_z == 0:
            continue
        v_az = p_az.value({k: assign[k] for k in a | z})
        v_bz = p_bz.value({k: assign[k] for k in b | z})
        if v_abz * v_z != v_az * v_bz:
            return assign
    return None


def _verma_violation(
    ev: Evaluator, record: VermaConstraint
) -> tuple[dict | None, bool]:
    """Returns (witness or None, saw_indeterminate)."""
    names = sorted(free_vars(record.recipe))
    indep = sorted(record.independent_of)
    others = [v for v in names if v not in record.independent_of]
    other_vars = [(v, ev.cardinality(v)) for v in others]
    indep_vars = [(v, ev.cardinality(v)) for v in indep]
    saw_none = False
    for base_values in assignments(other_vars):
        env = dict(zip(others, base_values))
        reference: tuple[dict, Fraction] | None = None
        for indep_values in assignments(indep_vars):
            env.update(zip(indep, indep_values))
            value = ev.evaluate(record.recipe, env)
            if value is None:
                saw_none = True
                continue
            if reference is None:
                reference = (dict(zip(indep, indep_values)), value)
            elif value != reference[1]:
                witness = {
                    "context": dict(zip(others, base_values)),
                    "assignments": [reference[0], dict(zip(indep, indep_values))],
                    "values": [reference[1], value],
                }
                return witness, saw_none
    return None, saw_none


def i_member(table: Kernel, dag: CausalDag) -> NestedVerdict:
    """Membership in the independence model: every d-separation statement
    of the graph holds exactly on the table."""
    if not table.is_prob_table:
        raise ValueError("i_member expects a joint probability table")
    violations = []
    for record in ci_constraints(dag):
        witness = _ci_violation(table, record)
        if witness is not None:
            violations.append(Violation(record, witness))
    return NestedVerdict(not violations, tuple(violations))


def check_nested(table: Kernel, dag: CausalDag) -> NestedVerdict:
    """Exact nested Markov membership of an observed joint distribution.

    Evaluates every record from :func:`enumerate_constraints`.  Records
    whose evaluation hits a zero-probability conditional are reported as
    indeterminate and treated as satisfied (equality on a measure-zero
    context is vacuous).
    """
    if not table.is_prob_table:
        raise ValueError("check_nested expects a joint probability table")
    expected = sorted(dag.observed())
    if sorted(table.var_names()) != expected:
        raise ValueError(
            f"table variables {sorted(table.var_names())} do not match observed vertices {expected}"
        )
    records = enumerate_constraints(dag)
    violations: list[Violation] = []
    indeterminate: list[ConstraintRecord] = []
    ev = Evaluator(table)
    for record in records:
        if isinstance(record, CiConstraint):
            witness = _ci_violation(table, record)
            if witness is not None:
                violations.append(Violation(record, witness))
        else:
            witness, saw_none = _verma_violation(ev, record)
            if witness is not None:
                violations.append(Violation(record, witness))
            elif saw_none:
                indeterminate.append(record)
    return NestedVerdict(not violations, tuple(violations), tuple(indeterminate))
