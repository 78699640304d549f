"""Query-language parser, pretty-printer, and data loading.

Surface syntax, one statement per line region, each terminated by ';':

    context nat-sum-prod;
    free b, d;
    sum a;
    sum c in {0, 1};
    factor R(a, b) from "r.tsv";

'#' starts a comment.  Bound variables are declared one per statement in
aggregate order, outermost first.  Factor files are whitespace-separated
tables, one row per line: the key columns in the factor's declared variable
order, then the value; '#' lines and blank lines are skipped.
"""

from __future__ import annotations

import io
import re
from pathlib import Path
from typing import Mapping

from .algebra import get_context
from .errors import DataError, QuerySyntaxError
from .factor import Factor
from .query import FAQQuery, FactorDecl, Instance, build_instance, make_query

_IDENT = r"[A-Za-z_][A-Za-z0-9_]*"
_CONTEXT_RE = re.compile(rf"^context\s+([A-Za-z0-9_-]+)$")
_FREE_RE = re.compile(rf"^free(?:\s+(.*))?$")
_AGG_RE = re.compile(
    rf"^({_IDENT})\s+({_IDENT})(?:\s+in\s+\{{(.*)\}})?$"
)
_FACTOR_RE = re.compile(
    rf"^factor\s+({_IDENT})\s*\(([^)]*)\)\s+from\s+\"([^\"]*)\"$"
)
_AGG_KEYWORDS = ("sum", "max", "prod", "or", "and")


def _statements(text: str):
    """Split into ';'-terminated statements with their starting line numbers."""
    buf = []
    start_line = None
    line_no = 0
    for raw_line in text.splitlines():
        line_no += 1
        line = raw_line.split("#", 1)[0]
        for chunk in re.split(r"(;)", line):
            if chunk == ";":
                stmt = " ".join("".join(buf).split())
                if stmt:
                    yield stmt, start_line or line_no
                buf = []
                start_line = None
            elif chunk.strip():
                if start_line is None:
                    start_line = line_no
                buf.append(chunk + " ")
    leftover = " ".join("".join(buf).split())
    if leftover:
        raise QuerySyntaxError(f"missing ';' after {leftover!r}", start_line)


def _split_names(text: str, line: int) -> list[str]:
    names = [t.strip() for t in text.split(",")]
    for name in names:
        if not re.fullmatch(_IDENT, name):
            raise QuerySyntaxError(f"bad variable name {name!r}", line)
    return names


def parse_query(text: str) -> FAQQuery:
    """Parse query text; errors carry the offending line number."""
    context = None
    free_vars: list[str] = []
    bound: list[tuple[str, str]] = []
    raw_domains: dict = {}
    factors: list[FactorDecl] = []

    for stmt, line in _statements(text):
        m = _CONTEXT_RE.match(stmt)
        if m:
            if context is not None:
                raise QuerySyntaxError("duplicate context statement", line)
            context = get_context(m.group(1))
            continue
        m = _FREE_RE.match(stmt)
        if m and (m.group(1) is None or not m.group(1).startswith("(")):
            if bound:
                raise QuerySyntaxError("free variable declared after bound", line)
            if m.group(1):
                free_vars.extend(_split_names(m.group(1), line))
            continue
        m = _FACTOR_RE.match(stmt)
        if m:
            name, vars_text, path = m.group(1), m.group(2), m.group(3)
            vars = _split_names(vars_text, line) if vars_text.strip() else []
            factors.append(FactorDecl(name=name, vars=tuple(vars), path=path))
            continue
        m = _AGG_RE.match(stmt)
        if m and m.group(1) in _AGG_KEYWORDS:
            agg, var, dom_text = m.group(1), m.group(2), m.group(3)
            bound.append((var, agg))
            if dom_text is not None:
                tokens = [t.strip() for t in dom_text.split(",") if t.strip()]
                if not tokens:
                    raise QuerySyntaxError(f"empty domain for {var!r}", line)
                raw_domains[var] = tuple(tokens)
            continue
        raise QuerySyntaxError(f"cannot parse statement {stmt!r}", line)

    if context is None:
        raise QuerySyntaxError("query has no context statement", None)
    return make_query(
        context=context,
        free_vars=free_vars,
        bound_vars=bound,
        factors=factors,
        raw_domains=raw_domains,
    )


def format_query(query: FAQQuery) -> str:
    """Canonical text form; parse(format_query(q)) round-trips."""
    out = [f"context {query.context.name};"]
    if query.free_vars:
        out.append(f"free {', '.join(query.free_vars)};")
    for bv in query.bound_vars:
        if bv.var in query.raw_domains:
            dom = ", ".join(str(v) for v in query.raw_domains[bv.var])
            out.append(f"{bv.aggregate} {bv.var} in {{{dom}}};")
        else:
            out.append(f"{bv.aggregate} {bv.var};")
    for decl in query.factors:
        path = decl.path if decl.path is not None else f"{decl.name}.tsv"
        out.append(f"factor {decl.name}({', '.join(decl.vars)}) from \"{path}\";")
    return "\n".join(out) + "\n"


def load_factor_table(path, decl: FactorDecl, context, header: bool = False) -> list:
    """Read one factor file into raw (key, value) pairs, keys as strings."""
    rows = []
    arity = len(decl.vars)
    skipped_header = not header
    with open(path, "r", encoding="utf-8") as handle:
        for line_no, raw_line in enumerate(handle, start=1):
            line = raw_line.split("#", 1)[0].strip()
            if not line:
                continue
            if not skipped_header:
                skipped_header = True
                continue
            cells = line.split()
            if len(cells) != arity + 1:
                raise DataError(
                    f"{path}:{line_no}: expected {arity + 1} columns, got {len(cells)}"
                )
            value = context.parse_value(cells[-1])
            rows.append((tuple(cells[:-1]), value))
    return rows


def load_instance(
    query_path, data_dir=None, header: bool = False
) -> Instance:
    """Parse a query file and load every declared factor table."""
    query_path = Path(query_path)
    query = parse_query(query_path.read_text(encoding="utf-8"))
    base = Path(data_dir) if data_dir is not None else query_path.parent
    raw_rows = {}
    for decl in query.factors:
        if decl.path is None:
            raise DataError(f"factor {decl.name!r} has no data path")
        raw_rows[decl.name] = load_factor_table(
            base / decl.path, decl, query.context, header=header
        )
    return build_instance(query, raw_rows)


def bind_instance(query: FAQQuery, raw_rows: Mapping) -> Instance:
    """Programmatic counterpart of load_instance (raw Python values)."""
    return build_instance(query, raw_rows)


def format_output(instance: Instance, output: Factor) -> str:
    """Render the output factor as text: decoded key columns, then the value.

    Rows are sorted by their decoded key tuples; a scalar result prints as a
    single value line (or nothing when it is the zero scalar).
    """
    ctx = instance.context
    dicts = [instance.dicts[v] for v in output.edge]
    decoded = []
    for key, value in output.rows.items():
        decoded.append(
            (tuple(d.decode(c) for d, c in zip(dicts, key)), ctx.format(value))
        )
    decoded.sort(key=lambda kv: kv[0])
    buf = io.StringIO()
    for key, value in decoded:
        cells = [str(c) for c in key] + [value]
        buf.write("\t".join(cells) + "\n")
    return buf.getvalue()


def write_factor_table(path, decl: FactorDecl, factor: Factor, instance: Instance):
    """Write a factor back to a file in declared column order."""
    ctx = instance.context
    edge = factor.edge
    perm = [edge.index(v) for v in decl.vars]
    dicts = [instance.dicts[v] for v in decl.vars]
    lines = []
    for key, value in factor.rows.items():
        raw = [str(d.decode(key[p])) for d, p in zip(dicts, perm)]
        lines.append((raw, ctx.format(value)))
    lines.sort()
    with open(path, "w", encoding="utf-8") as handle:
        for raw, value in lines:
            handle.write("\t".join(raw + [value]) + "\n")
