"""Brute-force reference evaluator.

Evaluates the query definition literally: for every free assignment it folds
the nested per-variable aggregates right to left over full assignments of the
bound variables, multiplying all factor values with absent rows counting as
zero.  No joins, projections, or orderings are involved, so this is a
structurally independent ground truth for differential tests.
"""

from __future__ import annotations

import itertools

from .errors import OracleExplosionError, QueryValidationError
from .factor import Factor, active_values
from .query import Instance

ASSIGNMENT_GUARD = 10_000_000


def enumeration_domains(instance: Instance) -> dict:
    """Encoded enumeration domain per variable: explicit, or active values."""
    doms = {}
    for var in instance.query.variables:
        vd = instance.domains.get(var)
        if vd is not None and vd.explicit:
            doms[var] = tuple(vd.values)
        else:
            doms[var] = tuple(sorted(active_values(instance.factors.values(), var)))
    return doms


def brute_force_eval(
    instance: Instance,
    bound_order=None,
    guard: int = ASSIGNMENT_GUARD,
) -> Factor:
    """Exhaustively evaluate the query; refuses beyond `guard` assignments.

    bound_order optionally permutes the aggregate nesting (each variable keeps
    its own aggregate); by default the declared order is used.
    """
    query = instance.query
    ctx = instance.context
    bound = [bv.var for bv in query.bound_vars]
    if bound_order is not None:
        if sorted(bound_order) != sorted(bound):
            raise QueryValidationError("bound_order must permute the bound variables")
        bound = list(bound_order)
    doms = enumeration_domains(instance)

    total = 1
    for var in query.variables:
        total *= len(doms[var])
    if total > guard:
        raise OracleExplosionError(total, guard)

    index = {v: i for i, v in enumerate(query.variables)}
    factor_slots = []
    for f in instance.factors.values():
        factor_slots.append((f, tuple(index[v] for v in f.edge)))

    assignment = [None] * len(query.variables)
    times = ctx.product
    zero = ctx.zero

    def term():
        value = ctx.one
        for f, slots in factor_slots:
            v = f.rows.get(tuple(assignment[s] for s in slots))
            if v is None:
                return zero
            value = times(value, v)
            if ctx.is_zero(value):
                return zero
        return value

    aggs = [query.aggregate_of(v) for v in bound]
    slots_of = [index[v] for v in bound]

    def fold(i: int):
        if i == len(bound):
            return term()
        agg = aggs[i]
        acc = ctx.one if agg.is_product else zero
        slot = slots_of[i]
        for x in doms[bound[i]]:
            assignment[slot] = x
            acc = agg.fn(acc, fold(i + 1))
        assignment[slot] = None
        return acc

    free_slots = [index[v] for v in query.free_vars]
    rows = {}
    free_domains = [doms[v] for v in query.free_vars]
    for free_key in itertools.product(*free_domains):
        for slot, x in zip(free_slots, free_key):
            assignment[slot] = x
        value = fold(0)
        if not ctx.is_zero(value):
            rows[free_key] = value
    return Factor(edge=query.free_vars, rows=rows, context=ctx)
