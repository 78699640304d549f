"""Variable-ordering search: precedence poset, linear extensions, and exact or
greedy width minimization.

The poset is a sound under-approximation of the orderings equivalent to the
query's declared aggregate nesting:

* Product-aggregate variables are barriers.  Raising a factor to a domain-size
  power does not commute with the other aggregates, so every variable declared
  before a product run must stay before it and everything after stays after;
  only the consecutive product variables themselves commute.
* Within a run of semiring variables, two variables may be reordered when they
  are disconnected given the variables already fixed outside them; conditioned
  connectivity is computed over all not-yet-fixed bound variables, with free
  variables fixed from the start.  Each connected component is led by the
  shortest prefix of its leading same-aggregate run whose fixing splits the
  remainder (the whole run if none does, the whole component if it shares one
  aggregate); the prefix is an antichain preceding the component's remaining
  variables, and the construction recurses below it.

Every linear extension is validated against the brute-force evaluator by the
test suite rather than by proof.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .errors import QueryValidationError
from .hypergraph import (
    Hypergraph,
    OrderingAnalysis,
    analyze_ordering,
    eliminate_step,
    fractional_edge_cover,
)
from .query import FAQQuery


@dataclass(frozen=True)
class VariableOrdering:
    """A permutation of the query variables whose prefix is the free set."""

    variables: tuple[str, ...]
    free_count: int

    @property
    def free_prefix(self) -> tuple[str, ...]:
        return self.variables[: self.free_count]

    @property
    def suffix(self) -> tuple[str, ...]:
        return self.variables[self.free_count :]


def validate_ordering(query: FAQQuery, variables: Sequence[str]) -> VariableOrdering:
    variables = tuple(variables)
    if sorted(variables) != sorted(query.variables):
        raise QueryValidationError(
            f"ordering {variables} is not a permutation of the query variables"
        )
    f = len(query.free_vars)
    if set(variables[:f]) != set(query.free_vars):
        raise QueryValidationError(
            "free variables must form the prefix of the ordering"
        )
    return VariableOrdering(variables=variables, free_count=f)


def identity_ordering(query: FAQQuery) -> VariableOrdering:
    return VariableOrdering(query.variables, len(query.free_vars))


@dataclass(frozen=True)
class PrecedencePoset:
    """Precedence over bound variables; the free block precedes all of them.

    precedes holds the full transitive relation as (u, v) pairs: u must be
    aggregated outside v.
    """

    free_vars: tuple[str, ...]
    elements: tuple[str, ...]
    precedes: frozenset

    def predecessors(self, v) -> set:
        return {u for u, w in self.precedes if w == v}

    def maximal_among(self, remaining: set) -> list:
        return [
            v
            for v in self.elements
            if v in remaining
            and not any(u in remaining for w, u in self.precedes if w == v)
        ]

    def is_extension(self, suffix: Sequence[str]) -> bool:
        pos = {v: i for i, v in enumerate(suffix)}
        if set(pos) != set(self.elements) or len(suffix) != len(self.elements):
            return False
        return all(pos[u] < pos[v] for u, v in self.precedes)


def _components(bound_vars: set, conditioned: set, edges: list[frozenset]) -> list[set]:
    """Connected components of the not-yet-conditioned bound variables."""
    alive = bound_vars - conditioned
    parent = {v: v for v in alive}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for edge in edges:
        members = [v for v in edge if v in parent]
        for a, b in zip(members, members[1:]):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
    comps: dict = {}
    for v in alive:
        comps.setdefault(find(v), set()).add(v)
    return list(comps.values())


def build_precedence_poset(query: FAQQuery) -> PrecedencePoset:
    """Construct the sound ordering poset for a query's bound variables."""
    bound = [bv.var for bv in query.bound_vars]
    bound_set = set(bound)
    product_vars = query.product_vars
    agg_of = {bv.var: bv.aggregate for bv in query.bound_vars}
    edges = [frozenset(d.vars) for d in query.factors]
    covers: set[tuple] = set()

    def component_of(v, comps):
        for comp in comps:
            if v in comp:
                return frozenset(comp)
        raise AssertionError(v)

    def handle_component(seq: list, conditioned: set):
        if len(seq) <= 1:
            return
        lead = agg_of[seq[0]]
        run = []
        for v in seq:
            if agg_of[v] != lead:
                break
            run.append(v)
        if len(run) == len(seq):
            return
        chosen_prefix = None
        groups = None
        for j in range(1, len(run) + 1):
            prefix = run[:j]
            rest = seq[j:]
            comps = _components(bound_set, conditioned | set(prefix), edges)
            by_comp: dict = {}
            for v in rest:
                by_comp.setdefault(component_of(v, comps), []).append(v)
            if len(by_comp) > 1 or j == len(run):
                chosen_prefix = prefix
                groups = list(by_comp.values())
                break
        for p in chosen_prefix:
            for u in seq[len(chosen_prefix) :]:
                covers.add((p, u))
        sub_conditioned = conditioned | set(chosen_prefix)
        for group in groups:
            handle_component(group, sub_conditioned)

    def handle_segment(seq: list, conditioned: set):
        comps = _components(bound_set, conditioned, edges)
        by_comp: dict = {}
        for v in seq:
            by_comp.setdefault(component_of(v, comps), []).append(v)
        for group in by_comp.values():
            handle_component(group, conditioned)

    conditioned: set = set()
    i = 0
    while i < len(bound):
        if bound[i] in product_vars:
            j = i
            while j < len(bound) and bound[j] in product_vars:
                j += 1
            run, before, after = bound[i:j], bound[:i], bound[j:]
            for r in run:
                for u in before:
                    covers.add((u, r))
                for w in after:
                    covers.add((r, w))
            conditioned.update(run)
            i = j
        else:
            j = i
            while j < len(bound) and bound[j] not in product_vars:
                j += 1
            handle_segment(bound[i:j], set(conditioned))
            conditioned.update(bound[i:j])
            i = j

    # Transitive closure, so extension checks and maximal-element queries can
    # look at single pairs.
    succ = {v: {w for u, w in covers if u == v} for v in bound}
    changed = True
    while changed:
        changed = False
        for v in bound:
            extra = set()
            for w in succ[v]:
                extra |= succ[w] - succ[v]
            if extra:
                succ[v] |= extra
                changed = True
    closure = frozenset((v, w) for v in bound for w in succ[v])
    for v in bound:
        if (v, v) in closure:
            raise AssertionError("precedence poset has a cycle")
    return PrecedencePoset(
        free_vars=query.free_vars, elements=tuple(bound), precedes=closure
    )


def enumerate_orderings(poset: PrecedencePoset, limit: int) -> Iterator[VariableOrdering]:
    """Yield distinct linear extensions, lexicographic in declared positions."""
    if limit < 1:
        raise ValueError("limit must be >= 1")
    elements = poset.elements
    preds = {v: poset.predecessors(v) for v in elements}
    emitted = 0
    chosen: list = []
    used: set = set()

    def extend() -> Iterator[tuple]:
        if len(chosen) == len(elements):
            yield tuple(chosen)
            return
        for v in elements:
            if v in used or not preds[v] <= used:
                continue
            chosen.append(v)
            used.add(v)
            yield from extend()
            chosen.pop()
            used.discard(v)

    f = len(poset.free_vars)
    for suffix in extend():
        yield VariableOrdering(poset.free_vars + suffix, f)
        emitted += 1
        if emitted >= limit:
            return


@dataclass(frozen=True)
class OptimizeResult:
    ordering: VariableOrdering
    width: Fraction
    mode_used: str
    cap_exceeded: bool
    analysis: OrderingAnalysis


def ordering_width(query: FAQQuery, ordering: VariableOrdering) -> OrderingAnalysis:
    return analyze_ordering(
        query.hypergraph(), ordering.variables, query.product_vars
    )


def faqw_of_ordering(query: FAQQuery, ordering: VariableOrdering) -> Fraction:
    """Width of one ordering: max subquery cover number over its steps."""
    if sorted(ordering.variables) != sorted(query.variables):
        raise QueryValidationError("ordering is not a permutation of the variables")
    if set(ordering.free_prefix) != set(query.free_vars):
        raise QueryValidationError("free variables must form the ordering prefix")
    return ordering_width(query, ordering).faqw


def _greedy_ordering(
    query: FAQQuery, poset: PrecedencePoset, h: Hypergraph
) -> VariableOrdering:
    product_vars = query.product_vars
    remaining = set(poset.elements)
    current = h
    suffix: list = []
    while remaining:
        best = None
        for var in sorted(poset.maximal_among(remaining)):
            mode = "product" if var in product_vars else "semiring"
            step = eliminate_step(current, var, mode)
            cost = (
                Fraction(0)
                if mode == "product"
                else fractional_edge_cover(step.subquery).objective
            )
            if best is None or (cost, var) < (best[0], best[1]):
                best = (cost, var, step)
        _, var, step = best
        suffix.insert(0, var)
        remaining.discard(var)
        current = step.successor
    return VariableOrdering(
        query.free_vars + tuple(suffix), len(query.free_vars)
    )


def optimize_ordering(
    query: FAQQuery,
    mode: str = "exact",
    cap: int = 10_000,
    data_sizes: dict | None = None,
) -> OptimizeResult:
    """Search the poset's linear extensions for a minimum-width ordering.

    Exact mode enumerates every extension up to `cap` and minimizes the
    width, breaking ties by lexicographic ordering; past the cap it falls
    back to greedy and flags it.  Greedy builds the ordering back to front,
    eliminating at each step a poset-maximal variable of minimum subquery
    cover number (given data_sizes, cover weights use actual log sizes).
    """
    if mode not in ("exact", "greedy"):
        raise QueryValidationError(f"unknown optimizer mode {mode!r}")
    poset = build_precedence_poset(query)
    h = query.hypergraph()
    greedy_h = h
    if data_sizes is not None:
        import math

        from .hypergraph import Edge

        edges = []
        for d in query.factors:
            n = data_sizes.get(d.name, 1)
            w = Fraction(math.log2(n)).limit_denominator(1 << 20) if n > 1 else Fraction(0)
            edges.append(Edge.of(d.name, d.vars, w))
        greedy_h = Hypergraph(vertices=h.vertices, edges=tuple(edges))

    if mode == "exact":
        best = None
        count = 0
        for ordering in enumerate_orderings(poset, cap + 1):
            count += 1
            if count > cap:
                best = None
                break
            width = ordering_width(query, ordering).faqw
            key = (width, ordering.variables)
            if best is None or key < best[0]:
                best = (key, ordering)
        if best is not None:
            ordering = best[1]
            return OptimizeResult(
                ordering=ordering,
                width=best[0][0],
                mode_used="exact",
                cap_exceeded=False,
                analysis=ordering_width(query, ordering),
            )
        ordering = _greedy_ordering(query, poset, greedy_h)
        analysis = ordering_width(query, ordering)
        return OptimizeResult(ordering, analysis.faqw, "greedy", True, analysis)

    ordering = _greedy_ordering(query, poset, greedy_h)
    analysis = ordering_width(query, ordering)
    return OptimizeResult(ordering, analysis.faqw, "greedy", False, analysis)
