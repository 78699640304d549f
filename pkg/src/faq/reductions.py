"""Instance generators for classic problems expressed as aggregate queries.

Each generator reduces a problem to a query plus factor data and comes with
the problem-native computation used to cross-check the engine: chained matrix
multiplication, componentwise max-of-products estimation, and counting the
satisfying assignments of a quantified conjunctive formula.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import DataError
from .frontend import bind_instance
from .query import FactorDecl, Instance, make_query
from .algebra import MAX_PROD, NAT_SUM_PROD, RAT_SUM_PROD


def mcm_instance(matrices: Sequence[Sequence[Sequence]]) -> Instance:
    """Chain of matrices as a query: one variable per dimension boundary,
    free endpoints, summed interior; the output factor encodes the product."""
    if not matrices:
        raise DataError("matrix chain is empty")
    dims = [len(matrices[0])]
    for i, m in enumerate(matrices):
        rows = len(m)
        if rows == 0 or any(len(r) != len(m[0]) for r in m):
            raise DataError(f"matrix {i} is ragged or empty")
        if rows != dims[-1]:
            raise DataError(f"matrix {i} has {rows} rows, expected {dims[-1]}")
        dims.append(len(m[0]))

    n = len(matrices)
    vars = [f"x{i}" for i in range(1, n + 2)]
    free = (vars[0], vars[-1])
    bound = [(v, "sum") for v in vars[1:-1]]
    decls = []
    raw_rows = {}
    for i, m in enumerate(matrices):
        name = f"A{i + 1}"
        decls.append(FactorDecl(name, (vars[i], vars[i + 1]), f"{name.lower()}.tsv"))
        raw_rows[name] = {
            (r, c): Fraction(m[r][c])
            for r in range(dims[i])
            for c in range(dims[i + 1])
        }
    # Endpoint domains are explicit so all-zero rows and columns round-trip.
    domains = {vars[0]: tuple(range(dims[0])), vars[-1]: tuple(range(dims[-1]))}
    query = make_query(RAT_SUM_PROD, free, bound, decls, domains)
    return bind_instance(query, raw_rows)


def decode_matrix(instance: Instance, output) -> list[list[Fraction]]:
    """Expand the output factor of an mcm_instance back to a dense matrix."""
    free = instance.query.free_vars
    row_dom = instance.domains[free[0]].values
    col_dom = instance.domains[free[1]].values
    rd, cd = instance.dicts[free[0]], instance.dicts[free[1]]
    dense = [[Fraction(0)] * len(col_dom) for _ in row_dom]
    for key, value in output.rows.items():
        dense[rd.decode(key[0])][cd.decode(key[1])] = Fraction(value)
    return dense


def multiply_chain(matrices: Sequence[Sequence[Sequence]]) -> list[list[Fraction]]:
    """Plain nested-loop matrix chain product, used as the native oracle."""
    result = [[Fraction(v) for v in row] for row in matrices[0]]
    for m in matrices[1:]:
        rows, mid, cols = len(result), len(m), len(m[0])
        nxt = [[Fraction(0)] * cols for _ in range(rows)]
        for r in range(rows):
            for k in range(mid):
                a = result[r][k]
                if a:
                    for c in range(cols):
                        nxt[r][c] += a * Fraction(m[k][c])
        result = nxt
    return result


def map_instance(
    edges: Mapping[str, tuple[str, ...]],
    rows: Mapping[str, Mapping],
    free: Sequence[str] = (),
) -> Instance:
    """Max-of-products estimation over nonnegative factors: free query
    variables keep their values, all others are maximized away."""
    all_vars = sorted({v for vs in edges.values() for v in vs})
    bound = [(v, "max") for v in all_vars if v not in free]
    decls = [
        FactorDecl(name, tuple(vs), f"{name.lower()}.tsv")
        for name, vs in edges.items()
    ]
    converted = {
        name: {tuple(k): Fraction(v) for k, v in factor_rows.items()}
        for name, factor_rows in rows.items()
    }
    query = make_query(MAX_PROD, tuple(free), bound, decls)
    return bind_instance(query, converted)


def qcq_count_instance(
    quantifiers: Sequence[tuple[str, str]],
    relations: Mapping[str, tuple[tuple[str, ...], set]],
    free: Sequence[str] = (),
) -> Instance:
    """Count the free-variable tuples satisfying a quantified conjunction.

    quantifiers is a sequence of (variable, 'exists'|'forall') pairs, outer
    first; relations map names to (variables, set of 0/1 key tuples).  All
    variables range over {0, 1}.  The count pops out as the scalar output of
    a query with no free variables: the formula's free variables are summed,
    'exists' maximizes, and 'forall' multiplies.
    """
    bound = [(v, "sum") for v in free]
    for var, q in quantifiers:
        if q == "exists":
            bound.append((var, "max"))
        elif q == "forall":
            bound.append((var, "prod"))
        else:
            raise DataError(f"unknown quantifier {q!r}")
    decls = []
    raw_rows = {}
    for name, (vars, tuples) in relations.items():
        decls.append(FactorDecl(name, tuple(vars), f"{name.lower()}.tsv"))
        raw_rows[name] = {tuple(t): 1 for t in tuples}
    domains = {v: (0, 1) for v, _ in bound}
    query = make_query(NAT_SUM_PROD, (), bound, decls, domains)
    return bind_instance(query, raw_rows)


def qcq_scalar(output) -> int:
    """Read the count out of a qcq_count_instance output factor."""
    return output.rows.get((), 0)


def qcq_native_count(
    quantifiers: Sequence[tuple[str, str]],
    relations: Mapping[str, tuple[tuple[str, ...], set]],
    free: Sequence[str] = (),
) -> int:
    """Exhaustive quantifier evaluation over {0,1} assignments."""

    def holds(assignment: dict, remaining: list) -> bool:
        if not remaining:
            for vars, tuples in relations.values():
                if tuple(assignment[v] for v in vars) not in tuples:
                    return False
            return True
        var, q = remaining[0]
        results = (
            holds({**assignment, var: x}, remaining[1:]) for x in (0, 1)
        )
        return any(results) if q == "exists" else all(results)

    count = 0
    free = list(free)

    def over_free(i: int, assignment: dict):
        nonlocal count
        if i == len(free):
            if holds(assignment, list(quantifiers)):
                count += 1
            return
        for x in (0, 1):
            over_free(i + 1, {**assignment, free[i]: x})

    over_free(0, {})
    return count


def random_mcm_chain(rng: random.Random, max_len=3, max_dim=4) -> list:
    length = rng.randint(1, max_len)
    dims = [rng.randint(1, max_dim) for _ in range(length + 1)]
    return [
        [[rng.randint(-4, 4) for _ in range(dims[i + 1])] for _ in range(dims[i])]
        for i in range(length)
    ]


def random_qcq(rng: random.Random, max_quant=3, max_rel=3):
    n_free = rng.randint(0, 2)
    n_quant = rng.randint(1, max_quant)
    free = [f"x{i}" for i in range(n_free)]
    qvars = [f"y{i}" for i in range(n_quant)]
    quantifiers = [(v, rng.choice(["exists", "forall"])) for v in qvars]
    if not free and all(q == "forall" for _, q in quantifiers):
        # at least one semiring aggregate is required of any query
        flip = rng.randrange(n_quant)
        quantifiers[flip] = (quantifiers[flip][0], "exists")
    all_vars = free + qvars
    relations = {}
    for r in range(rng.randint(1, max_rel)):
        arity = rng.randint(1, min(3, len(all_vars)))
        vars = tuple(rng.sample(all_vars, arity))
        universe = [tuple(bits) for bits in itertools.product((0, 1), repeat=arity)]
        tuples = {t for t in universe if rng.random() < 0.6}
        relations[f"R{r}"] = (vars, tuples)
    # every variable must occur somewhere; pad with unary relations
    covered = {v for vars, _ in relations.values() for v in vars}
    pad = 0
    for v in all_vars:
        if v not in covered:
            relations[f"P{pad}"] = ((v,), {(0,), (1,)})
            pad += 1
    return quantifiers, relations, free
