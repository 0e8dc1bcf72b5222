"""Symbolic kernel recipes over an observed joint distribution.

The nested Markov recursion derives probability kernels from the observed
joint by chain-rule factorization, marginalization of childless vertices and
district extraction.  This module represents such kernels as small
expression trees built from conditionals of the base distribution:

* :class:`FactorExpr` - a conditional p(outcomes | given) of the base joint,
* :class:`ProductExpr` - a product of sub-expressions,
* :class:`SumExpr` - a sum over all values of one bound variable,
* :class:`QuotientExpr` - an exact quotient.

Structural simplification keeps recipes in the familiar flat form
``sum_{a} p(a|x) p(c|x,a,b)`` wherever the underlying identities allow:
summing a variable that appears only as the outcome of one factor drops that
factor, factors independent of the bound variables are pulled out of sums,
common factors cancel in quotients, and quotients of nested conditionals
collapse to a single conditional.

Evaluation against a concrete table is exact; a conditional whose
conditioning event has probability zero makes the enclosing expression
indeterminate unless an exactly zero factor already annihilates the term.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .tables import Kernel, marginalize

__all__ = [
    "Expr",
    "FactorExpr",
    "ProductExpr",
    "SumExpr",
    "QuotientExpr",
    "UNIT",
    "factor",
    "product",
    "sum_over",
    "quotient",
    "simplify",
    "free_vars",
    "canonical",
    "render",
    "Evaluator",
]


@dataclass(frozen=True)
class FactorExpr:
    """Conditional p(outcomes | given) of the base observed joint."""

    outcomes: tuple[str, ...]
    given: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "outcomes", tuple(sorted(self.outcomes)))
        object.__setattr__(self, "given", tuple(sorted(self.given)))
        if set(self.outcomes) & set(self.given):
            raise ValueError("outcomes and given overlap")


@dataclass(frozen=True)
class ProductExpr:
    factors: tuple["Expr", ...]


@dataclass(frozen=True)
class SumExpr:
    var: str
    body: "Expr"


@dataclass(frozen=True)
class QuotientExpr:
    num: "Expr"
    den: "Expr"


Expr = FactorExpr | ProductExpr | SumExpr | QuotientExpr

UNIT = ProductExpr(())


def factor(outcomes: Iterable[str], given: Iterable[str] = ()) -> Expr:
    outcomes = tuple(outcomes)
    if not outcomes:
        return UNIT
    return FactorExpr(outcomes, tuple(given))


def product(parts: Iterable[Expr]) -> Expr:
    flat: list[Expr] = []
    for p in parts:
        if isinstance(p, ProductExpr):
            flat.extend(p.factors)
        else:
            flat.append(p)
    if len(flat) == 1:
        return flat[0]
    return ProductExpr(tuple(flat))


def sum_over(variables: Iterable[str], body: Expr) -> Expr:
    e = body
    for v in sorted(variables, reverse=True):
        e = SumExpr(v, e)
    return e


def quotient(num: Expr, den: Expr) -> Expr:
    if den == UNIT:
        return num
    return QuotientExpr(num, den)


def free_vars(e: Expr) -> frozenset[str]:
    if isinstance(e, FactorExpr):
        return frozenset(e.outcomes) | frozenset(e.given)
    if isinstance(e, ProductExpr):
        out: frozenset[str] = frozenset()
        for f in e.factors:
            out |= free_vars(f)
        return out
    if isinstance(e, SumExpr):
        return free_vars(e.body) - {e.var}
    return free_vars(e.num) | free_vars(e.den)


def canonical(e: Expr):
    """Hashable normal form: factor lists and bound variables sorted."""
    if isinstance(e, FactorExpr):
        return ("p", e.outcomes, e.given)
    if isinstance(e, ProductExpr):
        return ("*",) + tuple(sorted(canonical(f) for f in e.factors))
    if isinstance(e, SumExpr):
        return ("sum", e.var, canonical(e.body))
    return ("/", canonical(e.num), canonical(e.den))


# -- simplification ----------------------------------------------------------


def _split_sum_nest(e: Expr) -> tuple[list[str], Expr]:
    bound = []
    while isinstance(e, SumExpr):
        bound.append(e.var)
        e = e.body
    return bound, e


def _collapse_sums(bound: list[str], core: Expr) -> tuple[list[str], Expr]:
    """Drop bound variables that only appear as the outcomes of one factor."""
    parts = list(core.factors) if isinstance(core, ProductExpr) else [core]
    changed = True
    while changed:
        changed = False
        for v in list(bound):
            hits = [
                i
                for i, f in enumerate(parts)
                if v in free_vars(f)
            ]
            if len(hits) != 1:
                continue
            f = parts[hits[0]]
            if isinstance(f, FactorExpr) and v in f.outcomes:
                rest = tuple(o for o in f.outcomes if o != v)
                parts[hits[0]] = factor(rest, f.given)
                bound.remove(v)
                changed = True
    return bound, product([p for p in parts if p != UNIT])


def simplify(e: Expr) -> Expr:
    if isinstance(e, FactorExpr):
        return e if e.outcomes else UNIT
    if isinstance(e, ProductExpr):
        return product(simplify(f) for f in e.factors)
    if isinstance(e, SumExpr):
        bound, core = _split_sum_nest(e)
        core = simplify(core)
        inner_bound, inner_core = _split_sum_nest(core)
        bound += inner_bound
        core = inner_core
        bound, core = _collapse_sums(bound, core)
        if not bound:
            return core
        # pull factors not mentioning any bound variable out of the sum
        parts = list(core.factors) if isinstance(core, ProductExpr) else [core]
        outside = [p for p in parts if not (free_vars(p) & set(bound))]
        inside = [p for p in parts if free_vars(p) & set(bound)]
        if outside and inside:
            return product(outside + [sum_over(bound, product(inside))])
        if not inside:
            # bound variables vanished without a collapse; keep the sum to
            # preserve the expression's value (cannot happen for recipes
            # built by this library, sums are only introduced over free
            # variables)
            return sum_over(bound, core)
        return sum_over(bound, product(inside))
    # quotient
    num = simplify(e.num)
    den = simplify(e.den)
    if den == UNIT:
        return num
    if canonical(num) == canonical(den):
        return UNIT
    num_parts = list(num.factors) if isinstance(num, ProductExpr) else [num]
    den_parts = list(den.factors) if isinstance(den, ProductExpr) else [den]
    # cancel identical factors
    changed = False
    for d in list(den_parts):
        for i, n in enumerate(num_parts):
            if canonical(n) == canonical(d):
                num_parts.pop(i)
                den_parts.remove(d)
                changed = True
                break
    if changed:
        return simplify(
            quotient(product(num_parts) if num_parts else UNIT,
                     product(den_parts) if den_parts else UNIT)
        )
    # quotient of nested conditionals: p(O, O' | G) / p(O | G) = p(O' | G, O)
    if (
        len(num_parts) == 1
        and len(den_parts) == 1
        and isinstance(num_parts[0], FactorExpr)
        and isinstance(den_parts[0], FactorExpr)
    ):
        n, d = num_parts[0], den_parts[0]
        if n.given == d.given and set(d.outcomes) < set(n.outcomes):
            rest = tuple(o for o in n.outcomes if o not in d.outcomes)
            return factor(rest, n.given + d.outcomes)
    return quotient(num, den)


# -- rendering ---------------------------------------------------------------


def render(e: Expr) -> str:
    if isinstance(e, FactorExpr):
        if e.given:
            return f"p({','.join(e.outcomes)}|{','.join(e.given)})"
        return f"p({','.join(e.outcomes)})"
    if isinstance(e, ProductExpr):
        if not e.factors:
            return "1"
        return " ".join(
            f"[{render(f)}]" if isinstance(f, (QuotientExpr, SumExpr)) else render(f)
            for f in e.factors
        )
    if isinstance(e, SumExpr):
        bound, core = _split_sum_nest(e)
        return f"sum_{{{','.join(bound)}}} {render(core)}"
    return f"[{render(e.num)}] / [{render(e.den)}]"


# -- evaluation ---------------------------------------------------------------


class Evaluator:
    """Exact evaluation of recipes against a base probability table.

    ``evaluate`` returns ``None`` for indeterminate expressions, i.e. when a
    conditional's conditioning event has probability zero and no exactly
    zero factor annihilates the term first.
    """

    def __init__(self, table: Kernel):
        if not table.is_prob_table:
            raise ValueError("recipes evaluate against a joint probability table")
        self._table = table
        self._names = set(table.var_names())
        self._margins: dict[frozenset[str], Kernel] = {}

    def cardinality(self, name: str) -> int:
        return self._table.cardinality(name)

    def _margin(self, keep: frozenset[str]) -> Kernel:
        if keep not in self._margins:
            drop = [n for n in self._table.var_names() if n not in keep]
            self._margins[keep] = marginalize(self._table, drop)
        return self._margins[keep]

    def _factor_value(self, f: FactorExpr, env: Mapping[str, int]) -> Fraction | None:
        keep = frozenset(f.outcomes) | frozenset(f.given)
        unknown = keep - self._names
        if unknown:
            raise KeyError(f"recipe references unknown variables {sorted(unknown)}")
        joint = self._margin(keep).value({v: env[v] for v in keep})
        if not f.given:
            return joint
        denom = self._margin(frozenset(f.given)).value({v: env[v] for v in f.given})
        if denom == 0:
            return None
        return joint / denom

    def evaluate(self, e: Expr, env: Mapping[str, int]) -> Fraction | None:
        if isinstance(e, FactorExpr):
            return self._factor_value(e, env)
        if isinstance(e, ProductExpr):
            acc = Fraction(1)
            pending = False
            for f in e.factors:
                v = self.evaluate(f, env)
                if v is None:
                    pending = True
                elif v == 0:
                    return Fraction(0)
                else:
                    acc *= v
            return None if pending else acc
        if isinstance(e, SumExpr):
            total = Fraction(0)
            env2 = dict(env)
            for value in range(self.cardinality(e.var)):
                env2[e.var] = value
                v = self.evaluate(e.body, env2)
                if v is None:
                    return None
                total += v
            return total
        den = self.evaluate(e.den, env)
        if den is None or den == 0:
            return None
        num = self.evaluate(e.num, env)
        if num is None:
            return None
        return num / den
