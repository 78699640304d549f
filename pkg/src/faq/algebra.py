"""Value domains, products, and per-variable aggregate operators.

A SemiringContext fixes the carrier set D, the combining product, the two
identities, and the named aggregate operators a query may attach to its bound
variables.  Every aggregate is either the product itself (a "product
aggregate") or forms a commutative semiring with the product; the axioms are
machine-checkable via check_semiring_axioms.

Carriers use exact arithmetic only: Python bool, arbitrary-precision int, and
fractions.Fraction, plus a -infinity sentinel for the max/plus algebra.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

from .errors import DataError, QueryValidationError

Value = Any


class _NegInf:
    """Singleton for the additive identity of the max/plus carrier."""

    __slots__ = ()

    def __repr__(self):
        return "-inf"

    def __reduce__(self):
        return (_neg_inf_instance, ())


NEG_INF = _NegInf()


def _neg_inf_instance():
    return NEG_INF


# Carrier tags. "int" is restricted to nonnegative integers where the context
# requires it (see validate); "rat-neginf" adjoins NEG_INF to the rationals.
CARRIER_TAGS = ("bool", "int", "rat", "rat-neginf")


@dataclass(frozen=True)
class Aggregate:
    """A named binary aggregate operator usable as a per-variable fold."""

    name: str
    fn: Callable[[Value, Value], Value]
    is_product: bool
    is_semiring: bool

    def __post_init__(self):
        if self.is_product == self.is_semiring:
            raise ValueError(
                f"aggregate {self.name!r} must be exactly one of product/semiring"
            )


@dataclass(frozen=True)
class SemiringContext:
    """The value domain D with its product, identities, and aggregates.

    Immutable after construction; all operations are pure, so a context can be
    shared freely across concurrent evaluations.

    product_idempotent marks the value subset on which v (x) v = v, enabling
    the constant-time shortcut in value_power and power_factor.
    """

    name: str
    domain_tag: str
    product: Callable[[Value, Value], Value]
    one: Value
    zero: Value
    aggregates: tuple[Aggregate, ...]
    product_idempotent: Callable[[Value], bool]
    validate: Callable[[Value], bool]
    parse: Callable[[str], Value]
    format: Callable[[Value], str]
    grid: tuple[Value, ...]
    sample: Callable[[random.Random], Value]

    def __post_init__(self):
        if self.domain_tag not in CARRIER_TAGS:
            raise ValueError(f"unsupported carrier tag {self.domain_tag!r}")
        for agg in self.aggregates:
            if agg.is_product and agg.fn is not self.product:
                raise ValueError(f"product aggregate {agg.name!r} must use the context product")

    def aggregate(self, name: str) -> Aggregate:
        for agg in self.aggregates:
            if agg.name == name:
                return agg
        raise QueryValidationError(
            f"context {self.name!r} has no aggregate {name!r}"
        )

    def is_zero(self, v: Value) -> bool:
        return v is self.zero or v == self.zero

    def parse_value(self, text: str) -> Value:
        try:
            v = self.parse(text)
        except (ValueError, ZeroDivisionError):
            raise DataError(f"unparsable {self.name} value {text!r}") from None
        if not self.validate(v):
            raise DataError(f"value {text!r} outside carrier of context {self.name!r}")
        return v


@dataclass(frozen=True)
class AxiomReport:
    """Result of check_semiring_axioms: pass, or the first counterexample."""

    ok: bool
    aggregate: str | None = None
    axiom: str | None = None
    witness: tuple | None = None
    checks: int = 0

    def __bool__(self):
        return self.ok


def _bool_and(a, b):
    return a and b


def _bool_or(a, b):
    return a or b


def _mul(a, b):
    return a * b


def _add(a, b):
    return a + b


def _max(a, b):
    return a if a >= b else b


def _mp_add(a, b):
    # Annihilation is enforced here rather than relying on arithmetic.
    if a is NEG_INF or b is NEG_INF:
        return NEG_INF
    return a + b


def _mp_max(a, b):
    if a is NEG_INF:
        return b
    if b is NEG_INF:
        return a
    return a if a >= b else b


def _parse_bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "t"):
        return True
    if t in ("0", "false", "f"):
        return False
    raise ValueError(text)


def _parse_int(text):
    return int(text.strip())


def _parse_rat(text):
    return Fraction(text.strip())


def _parse_rat_neginf(text):
    t = text.strip()
    if t in ("-inf", "-oo"):
        return NEG_INF
    return Fraction(t)


def _format_bool(v):
    return "true" if v else "false"


def _format_plain(v):
    return str(v)


def _is_bool(v):
    return isinstance(v, bool)


def _is_nat(v):
    return isinstance(v, int) and not isinstance(v, bool) and v >= 0


def _is_rat(v):
    return isinstance(v, (Fraction, int)) and not isinstance(v, bool)


def _is_nonneg_rat(v):
    return _is_rat(v) and v >= 0


def _is_rat_or_neginf(v):
    return v is NEG_INF or _is_rat(v)


def _always(v):
    return True


def _zero_or_one(v):
    return v == 0 or v == 1


def _mp_idempotent(v):
    return v is NEG_INF or v == 0


def _sample_bool(rng):
    return rng.random() < 0.5


def _sample_nat(rng):
    return rng.randrange(0, 16)


def _sample_rat(rng):
    return Fraction(rng.randrange(-12, 13), rng.randrange(1, 8))


def _sample_nonneg_rat(rng):
    return Fraction(rng.randrange(0, 13), rng.randrange(1, 8))


def _sample_rat_neginf(rng):
    if rng.random() < 0.25:
        return NEG_INF
    return _sample_rat(rng)


def _fractions(*pairs):
    return tuple(Fraction(p, q) for p, q in pairs)


BOOL_OR_AND = SemiringContext(
    name="bool-or-and",
    domain_tag="bool",
    product=_bool_and,
    one=True,
    zero=False,
    aggregates=(
        Aggregate("or", _bool_or, is_product=False, is_semiring=True),
        Aggregate("and", _bool_and, is_product=True, is_semiring=False),
    ),
    product_idempotent=_always,
    validate=_is_bool,
    parse=_parse_bool,
    format=_format_bool,
    grid=(False, True),
    sample=_sample_bool,
)

NAT_SUM_PROD = SemiringContext(
    name="nat-sum-prod",
    domain_tag="int",
    product=_mul,
    one=1,
    zero=0,
    aggregates=(
        Aggregate("sum", _add, is_product=False, is_semiring=True),
        Aggregate("max", _max, is_product=False, is_semiring=True),
        Aggregate("prod", _mul, is_product=True, is_semiring=False),
    ),
    product_idempotent=_zero_or_one,
    validate=_is_nat,
    parse=_parse_int,
    format=_format_plain,
    grid=(0, 1, 2),
    sample=_sample_nat,
)

RAT_SUM_PROD = SemiringContext(
    name="rat-sum-prod",
    domain_tag="rat",
    product=_mul,
    one=Fraction(1),
    zero=Fraction(0),
    aggregates=(
        Aggregate("sum", _add, is_product=False, is_semiring=True),
        Aggregate("prod", _mul, is_product=True, is_semiring=False),
    ),
    product_idempotent=_zero_or_one,
    validate=_is_rat,
    parse=_parse_rat,
    format=_format_plain,
    grid=_fractions((0, 1), (1, 1), (2, 1), (1, 2), (-1, 1)),
    sample=_sample_rat,
)

MAX_PROD = SemiringContext(
    name="max-prod",
    domain_tag="rat",
    product=_mul,
    one=Fraction(1),
    zero=Fraction(0),
    aggregates=(
        Aggregate("max", _max, is_product=False, is_semiring=True),
        Aggregate("prod", _mul, is_product=True, is_semiring=False),
    ),
    product_idempotent=_zero_or_one,
    validate=_is_nonneg_rat,
    parse=_parse_rat,
    format=_format_plain,
    grid=_fractions((0, 1), (1, 1), (2, 1), (1, 2)),
    sample=_sample_nonneg_rat,
)

MAX_PLUS = SemiringContext(
    name="max-plus",
    domain_tag="rat-neginf",
    product=_mp_add,
    one=Fraction(0),
    zero=NEG_INF,
    aggregates=(
        Aggregate("max", _mp_max, is_product=False, is_semiring=True),
        Aggregate("prod", _mp_add, is_product=True, is_semiring=False),
    ),
    product_idempotent=_mp_idempotent,
    validate=_is_rat_or_neginf,
    parse=_parse_rat_neginf,
    format=_format_plain,
    grid=(NEG_INF,) + _fractions((0, 1), (1, 1), (-1, 1), (1, 2)),
    sample=_sample_rat_neginf,
)

CONTEXTS = {
    ctx.name: ctx
    for ctx in (BOOL_OR_AND, NAT_SUM_PROD, RAT_SUM_PROD, MAX_PROD, MAX_PLUS)
}


def get_context(name: str) -> SemiringContext:
    try:
        return CONTEXTS[name]
    except KeyError:
        raise QueryValidationError(f"unknown context {name!r}") from None


# The four commutative-semiring axiom groups, checked in this fixed order so
# that the first counterexample reported is deterministic.
_AXIOMS = (
    "add-commutativity",
    "add-associativity",
    "add-identity",
    "mul-commutativity",
    "mul-associativity",
    "mul-identity",
    "distributivity",
    "annihilation",
)


def _axiom_violation(ctx, plus, axiom, a, b, c):
    times = ctx.product
    if axiom == "add-commutativity":
        return plus(a, b) != plus(b, a)
    if axiom == "add-associativity":
        return plus(plus(a, b), c) != plus(a, plus(b, c))
    if axiom == "add-identity":
        return plus(a, ctx.zero) != a
    if axiom == "mul-commutativity":
        return times(a, b) != times(b, a)
    if axiom == "mul-associativity":
        return times(times(a, b), c) != times(a, times(b, c))
    if axiom == "mul-identity":
        return times(a, ctx.one) != a
    if axiom == "distributivity":
        return times(a, plus(b, c)) != plus(times(a, b), times(a, c))
    if axiom == "annihilation":
        return times(a, ctx.zero) != ctx.zero or times(ctx.zero, a) != ctx.zero
    raise AssertionError(axiom)


def check_semiring_axioms(
    context: SemiringContext, sample_budget: int, seed: int = 0
) -> AxiomReport:
    """Exercise the semiring axioms for every is_semiring aggregate.

    Runs each axiom over the exhaustive triple grid of the carrier's small
    values, then over sample_budget random triples drawn from a seeded RNG.
    Returns pass, or the first violated axiom with its witness triple.
    """
    if sample_budget < 1:
        raise ValueError("sample_budget must be >= 1")
    if context.domain_tag not in CARRIER_TAGS:
        raise ValueError(f"unsupported carrier tag {context.domain_tag!r}")
    rng = random.Random(seed)
    grid_triples = list(itertools.product(context.grid, repeat=3))
    random_triples = [
        (context.sample(rng), context.sample(rng), context.sample(rng))
        for _ in range(sample_budget)
    ]
    checks = 0
    for agg in context.aggregates:
        if not agg.is_semiring:
            continue
        for axiom in _AXIOMS:
            for a, b, c in itertools.chain(grid_triples, random_triples):
                checks += 1
                if _axiom_violation(context, agg.fn, axiom, a, b, c):
                    return AxiomReport(
                        ok=False,
                        aggregate=agg.name,
                        axiom=axiom,
                        witness=(a, b, c),
                        checks=checks,
                    )
    return AxiomReport(ok=True, checks=checks)


def value_power(
    context: SemiringContext,
    v: Value,
    k: int,
    idempotence_shortcut: bool = True,
) -> Value:
    """k-fold product-power of v, computed by repeated squaring.

    v**0 is the multiplicative identity.  When the shortcut is enabled and v
    lies in the product-idempotent subset, v is returned unchanged for any
    k >= 1 without touching the product.
    """
    if k < 0:
        raise ValueError("power exponent must be nonnegative")
    if k == 0:
        return context.one
    if idempotence_shortcut and context.product_idempotent(v):
        return v
    times = context.product
    result = None
    base = v
    while True:
        if k & 1:
            result = base if result is None else times(result, base)
        k >>= 1
        if not k:
            return result
        base = times(base, base)
