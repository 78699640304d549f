"""Query hypergraphs, fractional edge covers, elimination steps, and tree
decompositions.

Edges carry optional exact-rational size weights; a weight of None means the
symbolic uniform unit (so the cover objective is the fractional edge cover
number rho*).  Eliminating a variable in semiring mode builds the one-variable
subquery hypergraph: the incident edges, full copies of non-incident edges
swallowed by the union (which are then removed from the successor), and
support projections of the remaining overlapping edges.  Product mode just
shrinks the incident edges.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DataError, InternalError
from .lp import solve_cover


@dataclass(frozen=True)
class Edge:
    name: str
    vars: frozenset
    weight: Fraction | None = None

    @staticmethod
    def of(name: str, vars: Iterable[str], weight: Fraction | None = None) -> "Edge":
        return Edge(name=name, vars=frozenset(vars), weight=weight)


@dataclass(frozen=True)
class Hypergraph:
    vertices: frozenset
    edges: tuple[Edge, ...]

    def __post_init__(self):
        names = [e.name for e in self.edges]
        if len(set(names)) != len(names):
            raise InternalError(f"duplicate edge names in hypergraph: {names}")
        for e in self.edges:
            if not e.vars <= self.vertices:
                raise InternalError(f"edge {e.name} not contained in vertex set")

    def incident(self, var) -> tuple[Edge, ...]:
        return tuple(e for e in self.edges if var in e.vars)

    def edge(self, name: str) -> Edge:
        for e in self.edges:
            if e.name == name:
                return e
        raise KeyError(name)


def make_hypergraph(
    edges: Iterable[tuple[str, Iterable[str]]], extra_vertices: Iterable[str] = ()
) -> Hypergraph:
    """Build a hypergraph from (name, vars) pairs with uniform weights."""
    es = tuple(Edge.of(name, vs) for name, vs in edges)
    vertices = frozenset(extra_vertices).union(*(e.vars for e in es)) if es else frozenset(extra_vertices)
    return Hypergraph(vertices=vertices, edges=es)


@dataclass(frozen=True)
class FractionalEdgeCover:
    """A nonnegative rational weighting of edges covering every vertex."""

    lam: dict
    objective: Fraction

    def is_feasible(self, h: Hypergraph, restrict_to=None) -> bool:
        verts = restrict_to if restrict_to is not None else h.vertices
        if any(self.lam.get(e.name, ZERO) < 0 for e in h.edges):
            return False
        for v in verts:
            total = sum(self.lam.get(e.name, ZERO) for e in h.edges if v in e.vars)
            if total < 1:
                return False
        return True


ZERO = Fraction(0)


def fractional_edge_cover(h: Hypergraph, restrict_to=None) -> FractionalEdgeCover:
    """Optimal vertex of the fractional edge cover LP, in exact rationals.

    With uniform (None) weights the objective is the fractional edge cover
    number rho* of the covered vertex set; with rational log-size weights it
    is the data-aware output-size exponent bound.
    """
    verts = sorted(restrict_to if restrict_to is not None else h.vertices)
    weights = [e.weight if e.weight is not None else Fraction(1) for e in h.edges]
    objective, lam = solve_cover(verts, [e.vars for e in h.edges], weights)
    return FractionalEdgeCover(
        lam={e.name: l for e, l in zip(h.edges, lam)}, objective=objective
    )


def rho_star(h: Hypergraph, restrict_to=None) -> Fraction:
    return fractional_edge_cover(h, restrict_to).objective


@dataclass(frozen=True)
class EliminationStep:
    """One variable-elimination step over a hypergraph.

    In semiring mode the subquery joins the boundary edges, the absorbed
    subset edges, and projection edges, and the successor replaces all of
    them by the union edge minus the variable.  In product mode the incident
    edges shrink in place and the subquery is empty.
    """

    var: str
    mode: str
    boundary: tuple[Edge, ...]
    U: frozenset
    absorbed: tuple[Edge, ...]
    projections: tuple[tuple[Edge, Edge], ...]
    subquery: Hypergraph
    new_edge: Edge | None
    successor: Hypergraph


def eliminate_step(
    h: Hypergraph, var, mode: str = "semiring", new_edge_name: str | None = None
) -> EliminationStep:
    if var not in h.vertices:
        raise DataError(f"variable {var!r} not in hypergraph")
    if mode not in ("semiring", "product"):
        raise ValueError(f"unknown elimination mode {mode!r}")
    boundary = h.incident(var)
    rest_vertices = h.vertices - {var}

    if mode == "product":
        shrunk = tuple(
            Edge(e.name, e.vars - {var}, e.weight) if var in e.vars else e
            for e in h.edges
        )
        successor = Hypergraph(vertices=rest_vertices, edges=shrunk)
        return EliminationStep(
            var=var,
            mode=mode,
            boundary=boundary,
            U=frozenset().union(*(e.vars for e in boundary)) if boundary else frozenset(),
            absorbed=(),
            projections=(),
            subquery=Hypergraph(vertices=frozenset(), edges=()),
            new_edge=None,
            successor=successor,
        )

    U = frozenset().union(*(e.vars for e in boundary)) if boundary else frozenset()
    absorbed = []
    projections = []
    boundary_names = {e.name for e in boundary}
    for e in h.edges:
        if e.name in boundary_names or not e.vars & U:
            continue
        if e.vars <= U:
            absorbed.append(e)
        else:
            proj_vars = e.vars & U
            proj = Edge(
                name=f"{e.name}/{{{','.join(sorted(proj_vars))}}}",
                vars=proj_vars,
                weight=e.weight,
            )
            projections.append((e, proj))
    sub_edges = boundary + tuple(absorbed) + tuple(p for _, p in projections)
    subquery = Hypergraph(vertices=U, edges=sub_edges)

    new_edge = None
    consumed = boundary_names | {e.name for e in absorbed}
    succ_edges = [e for e in h.edges if e.name not in consumed]
    if boundary:
        new_edge = Edge(
            name=new_edge_name or f"psi({var})", vars=U - {var}, weight=None
        )
        succ_edges.append(new_edge)
    successor = Hypergraph(vertices=rest_vertices, edges=tuple(succ_edges))
    return EliminationStep(
        var=var,
        mode=mode,
        boundary=boundary,
        U=U,
        absorbed=tuple(absorbed),
        projections=tuple(projections),
        subquery=subquery,
        new_edge=new_edge,
        successor=successor,
    )


@dataclass(frozen=True)
class StepCost:
    var: str
    mode: str
    U: frozenset
    subquery_edges: tuple[Edge, ...]
    rho: Fraction | None


@dataclass(frozen=True)
class OrderingAnalysis:
    steps: tuple[StepCost, ...]
    faqw: Fraction


def simulate_ordering(
    h: Hypergraph,
    order: Sequence,
    product_vars: frozenset = frozenset(),
) -> list[EliminationStep]:
    """Eliminate every variable of `order`, innermost (last) first."""
    if set(order) != set(h.vertices) or len(order) != len(h.vertices):
        raise DataError("ordering must be a permutation of the hypergraph vertices")
    steps = []
    current = h
    for k, var in enumerate(reversed(order)):
        mode = "product" if var in product_vars else "semiring"
        step = eliminate_step(current, var, mode, new_edge_name=f"psi{k + 1}")
        steps.append(step)
        current = step.successor
    return steps


def analyze_ordering(
    h: Hypergraph,
    order: Sequence,
    product_vars: frozenset = frozenset(),
) -> OrderingAnalysis:
    """Per-step cover costs for an ordering, and their maximum.

    Free variables are not distinguished here: the caller passes the full
    ordering (free prefix included) and the free steps are costed like
    semiring steps, while product-aggregate steps contribute nothing.
    """
    costs = []
    width = ZERO
    for step in simulate_ordering(h, order, product_vars):
        if step.mode == "product":
            costs.append(StepCost(step.var, step.mode, step.U, (), None))
            continue
        rho = fractional_edge_cover(step.subquery).objective
        costs.append(
            StepCost(step.var, step.mode, step.U, step.subquery.edges, rho)
        )
        if rho > width:
            width = rho
    return OrderingAnalysis(steps=tuple(costs), faqw=width)


def faqw_of_ordering(
    h: Hypergraph,
    order: Sequence,
    product_vars: frozenset = frozenset(),
) -> Fraction:
    """Max subquery cover number across the ordering's non-product steps."""
    return analyze_ordering(h, order, product_vars).faqw


@dataclass
class TreeDecomposition:
    bags: list[frozenset]
    edges: list[tuple[int, int]]
    widths: list[Fraction]

    @property
    def width(self) -> Fraction:
        return max(self.widths, default=ZERO)


@dataclass(frozen=True)
class TDValidation:
    ok: bool
    kind: str | None = None
    detail: str | None = None

    def __bool__(self):
        return self.ok


def validate_tree_decomposition(td: TreeDecomposition, h: Hypergraph) -> TDValidation:
    """Check edge coverage and running intersection exhaustively."""
    adjacency = {i: set() for i in range(len(td.bags))}
    for i, j in td.edges:
        adjacency[i].add(j)
        adjacency[j].add(i)
    for e in h.edges:
        if e.vars and not any(e.vars <= bag for bag in td.bags):
            return TDValidation(False, "coverage", f"edge {e.name} in no bag")
    for v in sorted(h.vertices):
        holders = [i for i, bag in enumerate(td.bags) if v in bag]
        if len(holders) <= 1:
            continue
        seen = {holders[0]}
        frontier = [holders[0]]
        holder_set = set(holders)
        while frontier:
            i = frontier.pop()
            for j in adjacency[i]:
                if j in holder_set and j not in seen:
                    seen.add(j)
                    frontier.append(j)
        if seen != holder_set:
            return TDValidation(
                False, "running-intersection", f"bags of {v!r} are disconnected"
            )
    return TDValidation(True)


def tree_decomposition_from_ordering(h: Hypergraph, order: Sequence) -> TreeDecomposition:
    """Bags from the union sets of successive eliminations, linked by the
    producer/consumer relation, with subset bags contracted into a superset
    neighbor.

    Every step is treated as a semiring elimination: the decomposition is an
    artifact of the ordering alone, not of the aggregate assignment.
    """
    steps = simulate_ordering(h, order, product_vars=frozenset())
    bags = []
    adjacency: dict[int, set[int]] = {}
    producer: dict[str, int] = {}
    for idx, step in enumerate(steps):
        bags.append(step.U | {step.var})
        adjacency[idx] = set()
        consumed = [e.name for e in step.boundary] + [e.name for e in step.absorbed]
        for name in consumed:
            if name in producer:
                child = producer[name]
                adjacency[idx].add(child)
                adjacency[child].add(idx)
        if step.new_edge is not None:
            producer[step.new_edge.name] = idx
    # Orphan components (steps whose scalar result nobody consumed) attach to
    # the final bag; their vertex sets are disjoint from it.
    root = len(bags) - 1
    reachable = set()
    for idx in range(len(bags)):
        if idx in reachable:
            continue
        comp = {idx}
        stack = [idx]
        while stack:
            i = stack.pop()
            for j in adjacency[i]:
                if j not in comp:
                    comp.add(j)
                    stack.append(j)
        if root not in comp:
            adjacency[idx].add(root)
            adjacency[root].add(idx)
        reachable |= comp

    alive = set(range(len(bags)))
    changed = True
    while changed:
        changed = False
        for i in sorted(alive):
            supersets = [j for j in sorted(adjacency[i]) if bags[j] >= bags[i]]
            if not supersets:
                continue
            target = supersets[0]
            for j in adjacency[i]:
                if j != target:
                    adjacency[j].discard(i)
                    adjacency[j].add(target)
                    adjacency[target].add(j)
            adjacency[target].discard(i)
            del adjacency[i]
            alive.discard(i)
            changed = True
            break

    keep = sorted(alive)
    renumber = {old: new for new, old in enumerate(keep)}
    final_bags = [bags[i] for i in keep]
    final_edges = sorted(
        {
            (min(renumber[i], renumber[j]), max(renumber[i], renumber[j]))
            for i in keep
            for j in adjacency[i]
        }
    )
    covered = frozenset().union(*(e.vars for e in h.edges)) if h.edges else frozenset()
    widths = [
        fractional_edge_cover(h, restrict_to=bag & covered).objective
        for bag in final_bags
    ]
    td = TreeDecomposition(bags=final_bags, edges=final_edges, widths=widths)
    check = validate_tree_decomposition(td, h)
    if not check:
        raise InternalError(f"tree decomposition invalid: {check.kind} ({check.detail})")
    return td
