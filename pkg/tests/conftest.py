"""Shared builders: paper-derived fixtures and randomized instance generators."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from faq.algebra import BOOL_OR_AND, MAX_PLUS, MAX_PROD, NAT_SUM_PROD
from faq.frontend import bind_instance
from faq.query import FactorDecl, make_query


def aggregate_sql_query():
    """The seven-relation aggregate query: free (b, d), sum over the rest."""
    return make_query(
        NAT_SUM_PROD,
        ("b", "d"),
        [("a", "sum"), ("c", "sum"), ("e", "sum"), ("f", "sum"), ("g", "sum"), ("h", "sum")],
        [
            FactorDecl("R", ("a", "b")),
            FactorDecl("S", ("a", "c")),
            FactorDecl("T", ("b", "c", "d", "e")),
            FactorDecl("U", ("d", "f")),
            FactorDecl("V", ("e", "f")),
            FactorDecl("W", ("e", "g")),
            FactorDecl("Y", ("f", "h")),
        ],
    )


PINNED_SQL_ORDER = tuple("bdcaefgh")  # h eliminated first


def evo_example_query():
    """sum a, sum d, max b, sum c over edges {a,b}, {a,c}, {c,d}."""
    return make_query(
        NAT_SUM_PROD,
        (),
        [("a", "sum"), ("d", "sum"), ("b", "max"), ("c", "sum")],
        [
            FactorDecl("p1", ("a", "b")),
            FactorDecl("p2", ("a", "c")),
            FactorDecl("p3", ("c", "d")),
        ],
    )


@pytest.fixture
def sql_query():
    return aggregate_sql_query()


@pytest.fixture
def evo_query():
    return evo_example_query()


def random_rows(rng, decl, domains, n_rows, value_fn, active_span=4):
    rows = {}
    for _ in range(n_rows):
        key = tuple(
            rng.choice(domains[v]) if v in domains else rng.randrange(active_span)
            for v in decl.vars
        )
        rows[key] = value_fn()
    return rows


def random_value_fn(rng, context):
    if context is BOOL_OR_AND:
        return lambda: True
    if context is NAT_SUM_PROD:
        return lambda: rng.randint(1, 3)
    if context is MAX_PROD:
        return lambda: Fraction(rng.randint(1, 6), rng.randint(1, 3))
    if context is MAX_PLUS:
        return lambda: Fraction(rng.randint(-4, 4))
    raise AssertionError(context.name)


def random_instance(rng, context, max_vars=6, max_factors=5, max_rows=12):
    """A random valid instance: mixed aggregates, explicit and active domains,
    isolated bound variables, possibly empty factors."""
    n = rng.randint(1, max_vars)
    vars = [f"v{i}" for i in range(n)]
    n_free = rng.randint(0, min(2, n))
    free, bound_pool = vars[:n_free], vars[n_free:]
    semiring = [a.name for a in context.aggregates if a.is_semiring]
    product = [a.name for a in context.aggregates if a.is_product]
    bound = []
    for v in bound_pool:
        if rng.random() < 0.25 and product:
            bound.append((v, rng.choice(product)))
        else:
            bound.append((v, rng.choice(semiring)))
    if bound and not any(a in semiring for _, a in bound):
        i = rng.randrange(len(bound))
        bound[i] = (bound[i][0], rng.choice(semiring))
    domains = {}
    for v, a in bound:
        if a in product or rng.random() < 0.3:
            domains[v] = tuple(range(rng.randint(1, 4)))
    decls, covered = [], set()
    for i in range(rng.randint(1, max_factors)):
        edge = tuple(rng.sample(vars, rng.randint(1, min(3, n))))
        decls.append(FactorDecl(f"F{i}", edge))
        covered |= set(edge)
    pad = 0
    for v in vars:
        if v not in covered and (v in free or v not in domains):
            decls.append(FactorDecl(f"P{pad}", (v,)))
            covered.add(v)
            pad += 1
    value_fn = random_value_fn(rng, context)
    raw = {
        d.name: random_rows(rng, d, domains, rng.randint(0, max_rows), value_fn)
        for d in decls
    }
    query = make_query(context, tuple(free), bound, decls, domains)
    return bind_instance(query, raw)


def triangle_instance(n, seed, context=BOOL_OR_AND):
    """Three binary relations over a domain sized so density stays moderate."""
    import math

    rng = random.Random(seed)
    m = 2 * math.isqrt(n) + 2

    def rel():
        rows = set()
        while len(rows) < n:
            rows.add((rng.randrange(m), rng.randrange(m)))
        return {t: True for t in rows}

    query = make_query(
        context,
        ("a", "b", "c"),
        [],
        [
            FactorDecl("R", ("a", "b")),
            FactorDecl("S", ("b", "c")),
            FactorDecl("T", ("c", "a")),
        ],
    )
    return bind_instance(query, {"R": rel(), "S": rel(), "T": rel()})
