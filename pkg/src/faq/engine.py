"""Variable elimination over a chosen ordering, inside out.

Bound variables are eliminated innermost first.  A semiring variable is
eliminated by joining its incident factors together with full copies of
factors swallowed by the union of incident edges (which are then retired) and
0/1 support projections of the remaining overlapping factors, then folding
the variable away.  A product variable never creates a joint intermediate:
each incident factor is product-marginalized over the variable's explicit
domain and every other live factor is raised to the domain-size power.  Free
variables are never folded; the residual factors are joined over them at the
end.

Scalar intermediates (empty-edge factors) are folded into a running scalar
that multiplies the final output, and is itself raised to domain-size powers
during product steps.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .algebra import value_power
from .errors import InternalError, QueryValidationError
from .factor import (
    Factor,
    factor_size,
    indicator_projection,
    power_factor,
    product_marginalize,
    reorder_factor,
    semiring_marginalize,
)
from .hypergraph import Edge, Hypergraph
from .optimizer import VariableOrdering, identity_ordering
from .query import Instance
from .wcoj import JoinStats, generic_join


@dataclass
class Participant:
    name: str
    vars: tuple[str, ...]
    role: str  # boundary | absorbed | projection
    size: int
    derived: bool = False
    source: str | None = None
    source_vars: tuple[str, ...] | None = None
    source_derived: bool = False


@dataclass
class StepRecord:
    kind: str  # semiring | isolated | product | final-join
    var: str | None = None
    aggregate: str | None = None
    produced: str | None = None
    produced_vars: tuple[str, ...] | None = None
    participants: list[Participant] = field(default_factory=list)
    marginalized: list[tuple] = field(default_factory=list)
    powered: list[tuple] = field(default_factory=list)
    u_vars: tuple[str, ...] | None = None
    domain_size: int | None = None
    bindings_expanded: int = 0
    output_size: int | None = None
    to_scalar: bool = False


@dataclass
class EngineResult:
    output: Factor
    trace: list[StepRecord]
    ordering: VariableOrdering
    stats: JoinStats


class EngineState:
    """Mutable run state: live factors, running scalar, trace, counters."""

    def __init__(self, instance: Instance, use_projections=True, idempotence_shortcut=True):
        self.instance = instance
        self.query = instance.query
        self.ctx = instance.context
        self.use_projections = use_projections
        self.idempotence_shortcut = idempotence_shortcut
        self.live: dict[str, Factor] = dict(instance.factors)
        self.printed: dict[str, tuple] = {d.name: d.vars for d in self.query.factors}
        self.base_names = frozenset(self.printed)
        self.scalar = self.ctx.one
        self.trace: list[StepRecord] = []
        self.stats = JoinStats()
        self._psi = 0
        self._proj = 0

    def hypergraph(self) -> Hypergraph:
        """Current hypergraph; edges correspond one-to-one to live factors."""
        return Hypergraph(
            vertices=frozenset(self.query.variables),
            edges=tuple(Edge.of(n, f.edge) for n, f in self.live.items()),
        )

    def _next_psi(self) -> str:
        self._psi += 1
        return f"psi{self._psi}"

    def _participant(self, name: str, role: str, f: Factor) -> Participant:
        return Participant(
            name,
            self.printed[name],
            role,
            factor_size(f),
            derived=name not in self.base_names,
        )

    def _next_proj(self) -> str:
        self._proj += 1
        return f"proj{self._proj}"

    def eliminate_semiring_var(self, var: str) -> None:
        agg = self.query.aggregate_of(var)
        boundary = [(n, f) for n, f in self.live.items() if var in f.edge]
        if not boundary:
            self._eliminate_isolated(var, agg)
            return
        u_set = set()
        for _, f in boundary:
            u_set.update(f.edge)
        u_vars = self.query.sort_edge(u_set)

        record = StepRecord(
            kind="semiring", var=var, aggregate=agg.name, u_vars=u_vars
        )
        join_factors = []
        consumed = []
        for name, f in boundary:
            join_factors.append(f)
            consumed.append(name)
            record.participants.append(self._participant(name, "boundary", f))
        projection_sources = []
        for name, f in list(self.live.items()):
            if var in f.edge or not (set(f.edge) & u_set):
                continue
            if set(f.edge) <= u_set:
                join_factors.append(f)
                consumed.append(name)
                record.participants.append(self._participant(name, "absorbed", f))
            else:
                projection_sources.append((name, f))
        # A single-factor boundary is a plain scan-and-fold; indicator
        # projections cannot improve it, so none are materialized.
        if self.use_projections and len(boundary) > 1:
            for name, f in projection_sources:
                target = self.query.sort_edge(set(f.edge) & u_set)
                proj = indicator_projection(f, target)
                proj_name = self._next_proj()
                join_factors.append(proj)
                record.participants.append(
                    Participant(
                        proj_name,
                        target,
                        "projection",
                        factor_size(proj),
                        source=name,
                        source_vars=self.printed[name],
                        source_derived=name not in self.base_names,
                    )
                )

        step_stats = JoinStats()
        joined = generic_join(join_factors, u_vars, self.ctx, step_stats)
        result = semiring_marginalize(joined, var, agg)
        self.stats.bindings_expanded += step_stats.bindings_expanded
        record.bindings_expanded = step_stats.bindings_expanded
        record.output_size = factor_size(result)
        for name in consumed:
            del self.live[name]
        if result.edge:
            psi = self._next_psi()
            self.live[psi] = result
            self.printed[psi] = result.edge
            record.produced = psi
            record.produced_vars = result.edge
        else:
            value = result.rows.get((), self.ctx.zero)
            self.scalar = self.ctx.product(self.scalar, value)
            record.to_scalar = True
        self.trace.append(record)

    def _eliminate_isolated(self, var: str, agg) -> None:
        dom = self.instance.domains.get(var)
        if dom is None or not dom.explicit:
            raise QueryValidationError(
                f"isolated bound variable {var!r} needs an explicit domain"
            )
        acc = self.ctx.one
        for _ in range(len(dom.values) - 1):
            acc = agg.fn(acc, self.ctx.one)
        self.scalar = self.ctx.product(self.scalar, acc)
        self.trace.append(
            StepRecord(
                kind="isolated",
                var=var,
                aggregate=agg.name,
                domain_size=len(dom.values),
                to_scalar=True,
            )
        )

    def eliminate_product_var(self, var: str) -> None:
        agg = self.query.aggregate_of(var)
        dom = self.instance.domains.get(var)
        if dom is None or not dom.explicit:
            raise QueryValidationError(
                f"product aggregate over {var!r} needs an explicit domain"
            )
        d = len(dom.values)
        record = StepRecord(
            kind="product", var=var, aggregate=agg.name, domain_size=d
        )
        # The scalar accumulated so far sits inside this variable's fold, so
        # it is powered first; contributions of this step are multiplied in
        # afterwards, unpowered.
        self.scalar = value_power(self.ctx, self.scalar, d, self.idempotence_shortcut)
        for name in list(self.live):
            f = self.live[name]
            src_vars = self.printed[name]
            src_derived = name not in self.base_names
            if var in f.edge:
                result = product_marginalize(f, var, dom)
                del self.live[name]
                if result.edge:
                    psi = self._next_psi()
                    self.live[psi] = result
                    self.printed[psi] = result.edge
                    record.marginalized.append(
                        (name, src_vars, src_derived, psi, result.edge)
                    )
                else:
                    value = result.rows.get((), self.ctx.zero)
                    self.scalar = self.ctx.product(self.scalar, value)
                    record.marginalized.append((name, src_vars, src_derived, None, ()))
            else:
                powered = power_factor(f, d, self.idempotence_shortcut)
                if powered is not f:
                    del self.live[name]
                    psi = self._next_psi()
                    self.live[psi] = powered
                    self.printed[psi] = powered.edge
                    record.powered.append((name, src_vars, src_derived, psi, d))
        self.trace.append(record)

    def finish(self, ordering: VariableOrdering) -> Factor:
        query = self.query
        ctx = self.ctx
        if not query.free_vars:
            if self.live:
                raise InternalError("residual factors left with no free variables")
            rows = {} if ctx.is_zero(self.scalar) else {(): self.scalar}
            self.trace.append(
                StepRecord(kind="final-join", produced="output", produced_vars=())
            )
            return Factor((), rows, ctx)

        residual_union = set()
        for f in self.live.values():
            residual_union.update(f.edge)
        if residual_union != set(query.free_vars):
            raise InternalError(
                f"residual factors cover {residual_union}, expected {set(query.free_vars)}"
            )
        record = StepRecord(
            kind="final-join", produced="output", produced_vars=query.free_vars
        )
        for name, f in self.live.items():
            record.participants.append(self._participant(name, "boundary", f))
        step_stats = JoinStats()
        joined = generic_join(
            list(self.live.values()), ordering.free_prefix, ctx, step_stats
        )
        self.stats.bindings_expanded += step_stats.bindings_expanded
        record.bindings_expanded = step_stats.bindings_expanded
        if self.scalar != ctx.one:
            rows = {}
            for key, value in joined.rows.items():
                v = ctx.product(self.scalar, value)
                if not ctx.is_zero(v):
                    rows[key] = v
            joined = Factor(joined.edge, rows, ctx)
        output = reorder_factor(joined, query.free_vars)
        record.output_size = factor_size(output)
        self.trace.append(record)
        return output


def eliminate_semiring_var(state: EngineState, var: str) -> EngineState:
    state.eliminate_semiring_var(var)
    return state


def eliminate_product_var(state: EngineState, var: str) -> EngineState:
    state.eliminate_product_var(var)
    return state


def run_insideout(
    instance: Instance,
    ordering: VariableOrdering | None = None,
    use_projections: bool = True,
    idempotence_shortcut: bool = True,
) -> EngineResult:
    """Evaluate the query over the given ordering (declared order by default).

    The output factor is laid out over the declared free variables and equals
    the query pointwise: keys absent from it have the zero value.
    """
    query = instance.query
    if ordering is None:
        ordering = identity_ordering(query)
    if sorted(ordering.variables) != sorted(query.variables):
        raise QueryValidationError("ordering is not a permutation of the variables")
    if set(ordering.free_prefix) != set(query.free_vars):
        raise QueryValidationError("free variables must form the ordering prefix")
    if query.bound_vars and not any(
        query.context.aggregate(bv.aggregate).is_semiring for bv in query.bound_vars
    ):
        raise QueryValidationError("no semiring aggregate among bound variables")

    state = EngineState(instance, use_projections, idempotence_shortcut)
    product_vars = query.product_vars
    for var in reversed(ordering.suffix):
        if var in product_vars:
            state.eliminate_product_var(var)
        else:
            state.eliminate_semiring_var(var)
    output = state.finish(ordering)
    return EngineResult(
        output=output, trace=state.trace, ordering=ordering, stats=state.stats
    )
