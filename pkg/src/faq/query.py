"""Query structure and bound instances.

FAQQuery is the parsed shape of a query: context, free variables, bound
variables in aggregate order (outermost first), explicit domains, and factor
declarations.  An Instance binds a query to concrete factor data: values are
dictionary-encoded per variable (codes assigned in sorted raw order, so the
encoded ordering matches the decoded one), factor edges are normalized to the
query's variable sequence, and explicit domains are encoded alongside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .algebra import Aggregate, SemiringContext
from .errors import DataError, QueryValidationError
from .factor import Factor, VariableDomain, build_factor
from .hypergraph import Edge, Hypergraph


@dataclass(frozen=True)
class BoundVar:
    var: str
    aggregate: str


@dataclass(frozen=True)
class FactorDecl:
    name: str
    vars: tuple[str, ...]
    path: str | None = None


@dataclass(frozen=True)
class FAQQuery:
    context: SemiringContext
    free_vars: tuple[str, ...]
    bound_vars: tuple[BoundVar, ...]
    raw_domains: dict
    factors: tuple[FactorDecl, ...]

    @property
    def variables(self) -> tuple[str, ...]:
        return self.free_vars + tuple(bv.var for bv in self.bound_vars)

    @property
    def var_index(self) -> dict:
        return {v: i for i, v in enumerate(self.variables)}

    @property
    def product_vars(self) -> frozenset:
        return frozenset(
            bv.var for bv in self.bound_vars if self.aggregate_of(bv.var).is_product
        )

    def aggregate_of(self, var: str) -> Aggregate:
        for bv in self.bound_vars:
            if bv.var == var:
                return self.context.aggregate(bv.aggregate)
        raise KeyError(var)

    def sort_edge(self, vars: Iterable[str]) -> tuple[str, ...]:
        index = self.var_index
        return tuple(sorted(vars, key=index.__getitem__))

    def hypergraph(self) -> Hypergraph:
        return Hypergraph(
            vertices=frozenset(self.variables),
            edges=tuple(Edge.of(d.name, d.vars) for d in self.factors),
        )

    def declared_vars(self, factor_name: str) -> tuple[str, ...]:
        for d in self.factors:
            if d.name == factor_name:
                return d.vars
        raise KeyError(factor_name)


def make_query(
    context: SemiringContext,
    free_vars: Iterable[str],
    bound_vars: Iterable[tuple[str, str]],
    factors: Iterable[FactorDecl],
    raw_domains: Mapping | None = None,
) -> FAQQuery:
    """Validate and assemble a query.

    Raises QueryValidationError on: duplicate variables, unknown aggregates,
    undeclared edge variables, product aggregates without an explicit domain,
    variables in no edge and without a domain, or no semiring aggregate among
    the bound variables.
    """
    free_vars = tuple(free_vars)
    bound = tuple(BoundVar(v, a) for v, a in bound_vars)
    factors = tuple(factors)
    raw_domains = dict(raw_domains or {})

    names = list(free_vars) + [bv.var for bv in bound]
    if len(set(names)) != len(names):
        raise QueryValidationError("duplicate variable declaration")
    declared = set(names)
    for var, values in raw_domains.items():
        if var not in declared:
            raise QueryValidationError(f"domain for undeclared variable {var!r}")
        if len(values) == 0:
            raise QueryValidationError(f"empty explicit domain for {var!r}")

    seen_factors = set()
    in_edge = set()
    for decl in factors:
        if decl.name in seen_factors:
            raise QueryValidationError(f"duplicate factor name {decl.name!r}")
        seen_factors.add(decl.name)
        if not decl.vars:
            raise QueryValidationError(f"factor {decl.name!r} has an empty edge")
        if len(set(decl.vars)) != len(decl.vars):
            raise QueryValidationError(f"factor {decl.name!r} repeats a variable")
        for v in decl.vars:
            if v not in declared:
                raise QueryValidationError(
                    f"undeclared variable {v!r} in edge of {decl.name!r}"
                )
            in_edge.add(v)

    semiring_seen = False
    for bv in bound:
        agg = context.aggregate(bv.aggregate)
        semiring_seen = semiring_seen or agg.is_semiring
        if agg.is_product and bv.var not in raw_domains:
            raise QueryValidationError(
                f"product aggregate over {bv.var!r} needs an explicit domain"
            )
        if bv.var not in in_edge and bv.var not in raw_domains:
            raise QueryValidationError(
                f"variable {bv.var!r} is in no edge and has no domain"
            )
    if bound and not semiring_seen:
        raise QueryValidationError("no semiring aggregate among bound variables")
    for v in free_vars:
        if v not in in_edge:
            raise QueryValidationError(f"free variable {v!r} appears in no edge")

    return FAQQuery(
        context=context,
        free_vars=free_vars,
        bound_vars=bound,
        raw_domains=raw_domains,
        factors=factors,
    )


@dataclass(frozen=True)
class ValueDict:
    """Per-variable dictionary between raw values and dense integer codes.

    Codes follow the sorted order of the raw values, so sorting encoded keys
    and sorting decoded keys agree.
    """

    values: tuple

    def encode(self, raw):
        lo, hi = 0, len(self.values)
        while lo < hi:
            mid = (lo + hi) // 2
            if self.values[mid] < raw:
                lo = mid + 1
            else:
                hi = mid
        if lo < len(self.values) and self.values[lo] == raw:
            return lo
        raise KeyError(raw)

    def decode(self, code):
        return self.values[code]


@dataclass
class Instance:
    """A query bound to dictionary-encoded factor data."""

    query: FAQQuery
    factors: dict
    dicts: dict
    domains: dict

    @property
    def context(self) -> SemiringContext:
        return self.query.context

    def factor_sizes(self) -> dict:
        return {name: len(f.rows) for name, f in self.factors.items()}

    def data_hypergraph(self) -> Hypergraph:
        """Query hypergraph with rational log2-size edge weights."""
        sizes = self.factor_sizes()
        edges = []
        for d in self.query.factors:
            n = sizes[d.name]
            weight = (
                Fraction(math.log2(n)).limit_denominator(1 << 20)
                if n > 1
                else Fraction(0)
            )
            edges.append(Edge.of(d.name, d.vars, weight))
        return Hypergraph(
            vertices=frozenset(self.query.variables), edges=tuple(edges)
        )


def build_instance(query: FAQQuery, raw_rows: Mapping) -> Instance:
    """Dictionary-encode raw factor rows and explicit domains for a query.

    raw_rows maps each declared factor name to a mapping (or iterable of
    pairs) from raw key tuples, in the factor's declared variable order, to
    carrier values.
    """
    per_var_values: dict[str, set] = {v: set() for v in query.variables}
    for var, values in query.raw_domains.items():
        per_var_values[var].update(values)

    normalized: dict[str, list] = {}
    for decl in query.factors:
        if decl.name not in raw_rows:
            raise DataError(f"no data supplied for factor {decl.name!r}")
        rows = raw_rows[decl.name]
        items = rows.items() if isinstance(rows, Mapping) else rows
        collected = []
        for key, value in items:
            key = tuple(key)
            if len(key) != len(decl.vars):
                raise DataError(
                    f"factor {decl.name!r}: row {key} has arity {len(key)}, "
                    f"expected {len(decl.vars)}"
                )
            for var, raw in zip(decl.vars, key):
                if var in query.raw_domains and raw not in per_var_values[var]:
                    raise DataError(
                        f"factor {decl.name!r}: value {raw!r} of {var!r} outside "
                        f"its declared domain"
                    )
                per_var_values[var].add(raw)
            collected.append((key, value))
        normalized[decl.name] = collected

    dicts = {}
    for var, values in per_var_values.items():
        try:
            ordered = tuple(sorted(values))
        except TypeError:
            raise DataError(f"mixed value types for variable {var!r}") from None
        dicts[var] = ValueDict(ordered)

    factors = {}
    for decl in query.factors:
        edge = query.sort_edge(decl.vars)
        perm = [decl.vars.index(v) for v in edge]
        var_dicts = [dicts[v] for v in edge]
        encoded = []
        for key, value in normalized[decl.name]:
            encoded.append(
                (tuple(d.encode(key[p]) for d, p in zip(var_dicts, perm)), value)
            )
        factors[decl.name] = build_factor(edge, encoded, query.context)

    domains = {}
    for var in query.variables:
        if var in query.raw_domains:
            codes = tuple(sorted(dicts[var].encode(r) for r in query.raw_domains[var]))
            domains[var] = VariableDomain(var, codes)
        else:
            domains[var] = VariableDomain(var, None)

    return Instance(query=query, factors=factors, dicts=dicts, domains=domains)
