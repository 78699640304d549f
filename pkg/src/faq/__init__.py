"""Aggregate-query evaluation over commutative semirings.

Queries declare a value context, free variables, and per-variable aggregates
over a product of sparse factors.  Evaluation eliminates bound variables
inside out, solving each one-variable subquery with a worst-case-optimal
join; analysis bounds every subquery by its fractional edge cover number and
searches equivalent variable orderings for the smallest width.
"""

from .algebra import (
    CONTEXTS,
    NEG_INF,
    AxiomReport,
    SemiringContext,
    check_semiring_axioms,
    get_context,
    value_power,
)
from .engine import EngineResult, EngineState, run_insideout
from .errors import (
    DataError,
    FAQUserError,
    InternalError,
    OracleExplosionError,
    QuerySyntaxError,
    QueryValidationError,
    UncoverableVertexError,
)
from .factor import (
    Factor,
    VariableDomain,
    build_factor,
    factor_size,
    indicator_projection,
    power_factor,
    product_marginalize,
    reorder_factor,
    semiring_marginalize,
)
from .frontend import (
    bind_instance,
    format_output,
    format_query,
    load_factor_table,
    load_instance,
    parse_query,
)
from .hypergraph import (
    Edge,
    EliminationStep,
    FractionalEdgeCover,
    Hypergraph,
    TreeDecomposition,
    analyze_ordering,
    eliminate_step,
    fractional_edge_cover,
    make_hypergraph,
    rho_star,
    tree_decomposition_from_ordering,
    validate_tree_decomposition,
)
from .optimizer import (
    OptimizeResult,
    PrecedencePoset,
    VariableOrdering,
    build_precedence_poset,
    enumerate_orderings,
    faqw_of_ordering,
    identity_ordering,
    optimize_ordering,
    validate_ordering,
)
from .oracle import brute_force_eval
from .plan import emit_plan
from .query import BoundVar, FactorDecl, FAQQuery, Instance, build_instance, make_query
from .wcoj import JoinStats, generic_join

__all__ = [name for name in dir() if not name.startswith("_")]
