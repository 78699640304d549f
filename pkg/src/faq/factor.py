"""Sparse factor tables in listing representation.

A factor maps tuples over its edge's variables to nonzero domain values;
absent tuples are implicitly the additive identity.  All transforms produce
new factors (factors are immutable after build), and rows stay sorted under
the fixed per-query variable ordering because edges are always stored as
subsequences of that ordering.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .algebra import Aggregate, SemiringContext, Value, value_power
from .errors import DataError, InternalError


@dataclass(frozen=True)
class VariableDomain:
    """A variable's value set: an explicit finite list, or the active domain.

    values is a sorted tuple for explicit domains and None for active domains
    (the values appearing in stored rows).  Explicit domains must be nonempty;
    a variable aggregated with a product aggregate must have one.
    """

    var: str
    values: tuple | None = None

    def __post_init__(self):
        if self.values is not None:
            if len(self.values) == 0:
                raise DataError(f"explicit domain of {self.var!r} is empty")
            if len(set(self.values)) != len(self.values):
                raise DataError(f"explicit domain of {self.var!r} has duplicates")

    @property
    def explicit(self) -> bool:
        return self.values is not None


@dataclass(frozen=True, eq=True)
class Factor:
    """Sparse table over the ordered variable set `edge`.

    rows never store the context zero (canonical form), and row keys are
    unique tuples with one component per edge variable.
    """

    edge: tuple[str, ...]
    rows: Mapping[tuple, Value]
    context: SemiringContext

    def sorted_items(self):
        return sorted(self.rows.items())

    def __len__(self):
        return len(self.rows)

    def __repr__(self):
        return f"Factor(edge={self.edge}, rows={dict(self.sorted_items())})"


def build_factor(
    edge: Iterable[str],
    raw_rows: Mapping[tuple, Value] | Iterable[tuple],
    context: SemiringContext,
) -> Factor:
    """Canonicalize raw rows into a factor: drop zeros, reject duplicates."""
    edge = tuple(edge)
    if len(set(edge)) != len(edge):
        raise DataError(f"edge {edge} repeats a variable")
    items = raw_rows.items() if isinstance(raw_rows, Mapping) else raw_rows
    rows = {}
    for key, value in items:
        key = tuple(key)
        if len(key) != len(edge):
            raise DataError(
                f"row {key} has arity {len(key)}, edge {edge} expects {len(edge)}"
            )
        if not context.validate(value):
            raise DataError(f"value {value!r} outside carrier of {context.name!r}")
        if key in rows:
            raise DataError(f"duplicate key {key} for edge {edge}")
        rows[key] = value
    for key in [k for k, v in rows.items() if context.is_zero(v)]:
        del rows[key]
    return Factor(edge=edge, rows=rows, context=context)


def factor_size(f: Factor) -> int:
    """Number of nonzero points of the factor."""
    return len(f.rows)


def _positions(edge: tuple[str, ...], subset: Iterable[str]) -> tuple[int, ...]:
    index = {v: i for i, v in enumerate(edge)}
    try:
        return tuple(index[v] for v in subset)
    except KeyError as exc:
        raise DataError(f"variable {exc.args[0]!r} not in edge {edge}") from None


def indicator_projection(f: Factor, target: Iterable[str]) -> Factor:
    """0/1-valued projection of f's support onto a subset of its edge.

    The output maps a target tuple to the multiplicative identity exactly when
    some stored row of f extends it.
    """
    target = tuple(target)
    pos = _positions(f.edge, target)
    one = f.context.one
    rows = {}
    for key in f.rows:
        rows[tuple(key[p] for p in pos)] = one
    return Factor(edge=target, rows=rows, context=f.context)


def semiring_marginalize(f: Factor, var: str, op: Aggregate) -> Factor:
    """Fold `var` away with a semiring aggregate, grouping by residual key."""
    if op.is_product:
        raise DataError(
            f"aggregate {op.name!r} is the product; use product_marginalize"
        )
    (pos,) = _positions(f.edge, (var,))
    residual_edge = f.edge[:pos] + f.edge[pos + 1 :]
    plus = op.fn
    rows: dict[tuple, Value] = {}
    for key, value in f.rows.items():
        rkey = key[:pos] + key[pos + 1 :]
        if rkey in rows:
            rows[rkey] = plus(rows[rkey], value)
        else:
            rows[rkey] = value
    ctx = f.context
    for key in [k for k, v in rows.items() if ctx.is_zero(v)]:
        del rows[key]
    return Factor(edge=residual_edge, rows=rows, context=ctx)


def product_marginalize(f: Factor, var: str, dom: VariableDomain) -> Factor:
    """Product-fold `var` over its full explicit domain.

    A residual key survives only if the factor stores a row for every domain
    value of `var` at that key; a missing value annihilates the whole group.
    """
    if not dom.explicit:
        raise DataError(
            f"product marginalization over {var!r} needs an explicit domain"
        )
    (pos,) = _positions(f.edge, (var,))
    residual_edge = f.edge[:pos] + f.edge[pos + 1 :]
    domain = set(dom.values)
    groups: dict[tuple, dict] = {}
    for key, value in f.rows.items():
        x = key[pos]
        if x not in domain:
            raise InternalError(
                f"stored value {x!r} of {var!r} outside declared domain"
            )
        groups.setdefault(key[:pos] + key[pos + 1 :], {})[x] = value
    ctx = f.context
    times = ctx.product
    rows = {}
    for rkey, slice_vals in groups.items():
        if len(slice_vals) != len(domain):
            continue
        acc = ctx.one
        for x in dom.values:
            acc = times(acc, slice_vals[x])
        if not ctx.is_zero(acc):
            rows[rkey] = acc
    return Factor(edge=residual_edge, rows=rows, context=ctx)


def power_factor(f: Factor, exponent: int, idempotence_shortcut: bool = True) -> Factor:
    """Raise every value to the given product-power, preserving the edge.

    With the shortcut enabled this is the identity transform (row for row)
    whenever all values lie in the product-idempotent subset.
    """
    if exponent < 1:
        raise DataError("power-factor exponent must be >= 1")
    if exponent == 1:
        return f
    ctx = f.context
    if idempotence_shortcut and all(ctx.product_idempotent(v) for v in f.rows.values()):
        return f
    rows = {}
    for key, value in f.rows.items():
        v = value_power(ctx, value, exponent, idempotence_shortcut=idempotence_shortcut)
        if not ctx.is_zero(v):
            rows[key] = v
    return Factor(edge=f.edge, rows=rows, context=ctx)


def reorder_factor(f: Factor, edge: Iterable[str]) -> Factor:
    """Permute the factor's key components into a new ordering of its edge."""
    edge = tuple(edge)
    if set(edge) != set(f.edge) or len(edge) != len(f.edge):
        raise DataError(f"{edge} is not a reordering of {f.edge}")
    if edge == f.edge:
        return f
    pos = _positions(f.edge, edge)
    rows = {tuple(key[p] for p in pos): value for key, value in f.rows.items()}
    return Factor(edge=edge, rows=rows, context=f.context)


def active_values(factors: Iterable[Factor], var: str) -> set:
    """Union of the values `var` takes across the given factors' rows."""
    seen = set()
    for f in factors:
        if var in f.edge:
            (pos,) = _positions(f.edge, (var,))
            for key in f.rows:
                seen.add(key[pos])
    return seen
