"""Rewrite-rule emission from an engine trace.

Each semiring elimination becomes one aggregate rule over its participants,
preceded by the step's support-projection rules; product steps emit
per-factor marginalization and power rules and no join rule.  When the final
join has a single participant produced by the last elimination, that rule's
head becomes the output head instead of emitting a separate join rule.
"""

from __future__ import annotations

from dataclasses import dataclass

from .engine import StepRecord


def _atom(name: str, vars, derived: bool) -> str:
    args = ",".join(vars)
    return f"{name}[{args}]" if derived else f"{name}({args})"


@dataclass
class _Rule:
    head_name: str = ""
    head_vars: tuple = ()
    head_bracket: bool = True
    op: str | None = None
    body: tuple = ()
    power_of: str | None = None
    power: int | None = None
    is_scalar: bool = False

    def render(self) -> str:
        if self.is_scalar:
            if self.body:
                return f"scalar *= {self.op} <- {', '.join(self.body)}."
            return f"scalar *= {self.op}."
        args = ",".join(self.head_vars)
        head = (
            f"{self.head_name}[{args}]"
            if self.head_bracket
            else f"{self.head_name}({args})"
        )
        if self.power_of is not None:
            return f"{head} = {self.power_of}^{self.power}."
        if self.op is not None:
            return f"{head} = {self.op} <- {', '.join(self.body)}."
        return f"{head} <- {', '.join(self.body)}."


def emit_plan(trace: list[StepRecord]) -> str:
    """Render a completed trace as a rule script."""
    rules: list[_Rule] = []
    produced_by_rule: dict[str, _Rule] = {}

    for record in trace:
        op = f"{record.aggregate}<{record.var}>" if record.aggregate else None
        if record.kind == "semiring":
            body = []
            for p in record.participants:
                if p.role == "projection":
                    rules.append(
                        _Rule(
                            head_name=p.name,
                            head_vars=p.vars,
                            head_bracket=False,
                            body=(_atom(p.source, p.source_vars, p.source_derived),),
                        )
                    )
                    body.append(f"{p.name}({','.join(p.vars)})")
                else:
                    body.append(_atom(p.name, p.vars, p.derived))
            if record.to_scalar:
                rules.append(_Rule(op=op, body=tuple(body), is_scalar=True))
            else:
                rule = _Rule(
                    head_name=record.produced,
                    head_vars=record.produced_vars,
                    op=op,
                    body=tuple(body),
                )
                rules.append(rule)
                produced_by_rule[record.produced] = rule
        elif record.kind == "isolated":
            rules.append(
                _Rule(op=f"{op} 1 over {record.domain_size} values", is_scalar=True)
            )
        elif record.kind == "product":
            for source, src_vars, src_derived, produced, vars in record.marginalized:
                atom = _atom(source, src_vars, src_derived)
                if produced is None:
                    rules.append(_Rule(op=op, body=(atom,), is_scalar=True))
                else:
                    rule = _Rule(
                        head_name=produced, head_vars=vars, op=op, body=(atom,)
                    )
                    rules.append(rule)
                    produced_by_rule[produced] = rule
            for source, src_vars, src_derived, produced, exponent in record.powered:
                rule = _Rule(
                    head_name=produced,
                    head_vars=src_vars,
                    power_of=_atom(source, src_vars, src_derived),
                    power=exponent,
                )
                rules.append(rule)
                produced_by_rule[produced] = rule
        elif record.kind == "final-join":
            participants = record.participants
            if (
                len(participants) == 1
                and participants[0].name in produced_by_rule
                and rules
                and rules[-1] is produced_by_rule[participants[0].name]
            ):
                rules[-1].head_name = "output"
                rules[-1].head_vars = record.produced_vars
            elif participants:
                body = tuple(
                    _atom(p.name, p.vars, p.derived) for p in participants
                )
                rules.append(
                    _Rule(head_name="output", head_vars=record.produced_vars, body=body)
                )
            else:
                rules.append(
                    _Rule(head_name="output", head_vars=(), body=("scalar",))
                )
    return "".join(rule.render() + "\n" for rule in rules)
