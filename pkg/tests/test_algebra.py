"""Axiom checking, context registry, and product powers."""

import random
from fractions import Fraction

import pytest

from faq.algebra import (
    BOOL_OR_AND,
    CONTEXTS,
    MAX_PLUS,
    MAX_PROD,
    NAT_SUM_PROD,
    NEG_INF,
    RAT_SUM_PROD,
    Aggregate,
    SemiringContext,
    check_semiring_axioms,
    get_context,
    value_power,
    _add,
    _format_plain,
    _is_nat,
    _max,
    _parse_int,
    _sample_nat,
)
from faq.errors import QueryValidationError


def nat_plus_max_control():
    """(naturals, aggregate +, combine max): distributivity fails."""
    return SemiringContext(
        name="nat-plus-max-control",
        domain_tag="int",
        product=_max,
        one=0,
        zero=0,
        aggregates=(Aggregate("sum", _add, is_product=False, is_semiring=True),),
        product_idempotent=lambda v: True,
        validate=_is_nat,
        parse=_parse_int,
        format=_format_plain,
        grid=(0, 1, 2),
        sample=_sample_nat,
    )


@pytest.mark.parametrize("name", sorted(CONTEXTS))
def test_shipped_contexts_pass_axioms(name):
    report = check_semiring_axioms(CONTEXTS[name], 100)
    assert report.ok, (name, report.axiom, report.witness)


def test_boolean_context_passes():
    assert check_semiring_axioms(BOOL_OR_AND, 100).ok


def test_max_times_context_passes():
    assert check_semiring_axioms(MAX_PROD, 100).ok


def test_plus_max_control_fails_distributivity_with_documented_witness():
    report = check_semiring_axioms(nat_plus_max_control(), 100)
    assert not report.ok
    assert report.axiom == "distributivity"
    # max(1, 0+0) = 1 while max(1,0) + max(1,0) = 2
    assert report.witness == (1, 0, 0)


def test_axiom_check_deterministic_for_fixed_seed():
    a = check_semiring_axioms(NAT_SUM_PROD, 60, seed=5)
    b = check_semiring_axioms(NAT_SUM_PROD, 60, seed=5)
    assert (a.ok, a.checks) == (b.ok, b.checks)


def test_axiom_check_rejects_zero_budget():
    with pytest.raises(ValueError):
        check_semiring_axioms(BOOL_OR_AND, 0)


def test_unsupported_carrier_tag_rejected():
    with pytest.raises(ValueError, match="carrier tag"):
        SemiringContext(
            name="bad",
            domain_tag="float",
            product=_max,
            one=0,
            zero=0,
            aggregates=(),
            product_idempotent=lambda v: False,
            validate=_is_nat,
            parse=_parse_int,
            format=_format_plain,
            grid=(0,),
            sample=_sample_nat,
        )


def test_get_context_unknown_name():
    with pytest.raises(QueryValidationError):
        get_context("tropical-mystery")


def test_aggregate_flags_are_exclusive():
    with pytest.raises(ValueError):
        Aggregate("both", _add, is_product=True, is_semiring=True)


@pytest.mark.parametrize(
    "context,value,k,expected",
    [
        (RAT_SUM_PROD, Fraction(2), 10, Fraction(1024)),
        (RAT_SUM_PROD, Fraction(7), 0, Fraction(1)),
        (MAX_PLUS, Fraction(5), 3, Fraction(15)),
        (NAT_SUM_PROD, 3, 4, 81),
        (BOOL_OR_AND, True, 17, True),
        (MAX_PLUS, NEG_INF, 2, NEG_INF),
    ],
)
def test_value_power_examples(context, value, k, expected):
    assert value_power(context, value, k) == expected


def test_value_power_negative_exponent_rejected():
    with pytest.raises(ValueError):
        value_power(NAT_SUM_PROD, 2, -1)


def test_value_power_matches_naive_fold_all_carriers():
    rng = random.Random(0)
    for ctx in CONTEXTS.values():
        for k in range(65):
            v = ctx.sample(rng)
            expected = ctx.one
            for _ in range(k):
                expected = ctx.product(expected, v)
            assert value_power(ctx, v, k, idempotence_shortcut=False) == expected
            assert value_power(ctx, v, k) == expected


def test_idempotence_shortcut_skips_work_but_not_results():
    calls = 0
    base = BOOL_OR_AND.product

    def counting_product(a, b):
        nonlocal calls
        calls += 1
        return base(a, b)

    ctx = SemiringContext(
        name="bool-counting",
        domain_tag="bool",
        product=counting_product,
        one=True,
        zero=False,
        aggregates=(),
        product_idempotent=lambda v: True,
        validate=lambda v: isinstance(v, bool),
        parse=BOOL_OR_AND.parse,
        format=BOOL_OR_AND.format,
        grid=(False, True),
        sample=BOOL_OR_AND.sample,
    )
    assert value_power(ctx, True, 1 << 40) is True
    assert calls == 0


def test_max_plus_annihilation_enforced_by_operation_table():
    assert MAX_PLUS.product(NEG_INF, Fraction(3)) is NEG_INF
    assert MAX_PLUS.product(Fraction(3), NEG_INF) is NEG_INF
    assert MAX_PLUS.aggregates[0].fn(NEG_INF, Fraction(3)) == Fraction(3)


def test_value_parsing_per_context():
    assert BOOL_OR_AND.parse_value("true") is True
    assert BOOL_OR_AND.parse_value("0") is False
    assert NAT_SUM_PROD.parse_value("12") == 12
    assert RAT_SUM_PROD.parse_value("3/2") == Fraction(3, 2)
    assert MAX_PLUS.parse_value("-inf") is NEG_INF
