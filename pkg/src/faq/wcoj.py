"""Backtracking worst-case-optimal join over factor key spaces.

The join fixes a variable order covering the union of the participant edges
and extends partial bindings one variable at a time, intersecting the
candidate values of every participant that contains the variable.  Candidate
ranges are contiguous slices of each participant's rows sorted in the join
order, and the intersection advances by galloping seeks, so backtracking
needs no extra space beyond the range stack.  Values are multiplied only at
full bindings.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .algebra import SemiringContext
from .errors import DataError
from .factor import Factor


@dataclass
class JoinStats:
    """Instrumentation counters for one or more join executions."""

    bindings_expanded: int = 0
    outputs: int = 0


@dataclass
class _Trie:
    """A participant's rows permuted and sorted in join order."""

    cols: tuple[str, ...]
    col_of: dict
    keys: list[tuple]
    vals: list

    @staticmethod
    def build(f: Factor, rank: dict) -> "_Trie":
        cols = tuple(sorted(f.edge, key=rank.__getitem__))
        pos = [f.edge.index(v) for v in cols]
        items = sorted(
            (tuple(key[p] for p in pos), value) for key, value in f.rows.items()
        )
        return _Trie(
            cols=cols,
            col_of={v: i for i, v in enumerate(cols)},
            keys=[k for k, _ in items],
            vals=[v for _, v in items],
        )


def _lower_bound(keys, lo, hi, col, target):
    while lo < hi:
        mid = (lo + hi) // 2
        if keys[mid][col] < target:
            lo = mid + 1
        else:
            hi = mid
    return lo


def _upper_bound(keys, lo, hi, col, target):
    while lo < hi:
        mid = (lo + hi) // 2
        if keys[mid][col] <= target:
            lo = mid + 1
        else:
            hi = mid
    return lo


def _seek(keys, lo, hi, col, target):
    """First index in [lo, hi) whose col component is >= target."""
    if lo >= hi or keys[lo][col] >= target:
        return lo
    prev = lo
    nxt = lo + 1
    step = 1
    while nxt < hi and keys[nxt][col] < target:
        prev = nxt
        nxt += step
        step <<= 1
    return _lower_bound(keys, prev + 1, min(nxt + 1, hi), col, target)


def generic_join(
    factors: list[Factor],
    order,
    context: SemiringContext,
    stats: JoinStats | None = None,
) -> Factor:
    """Natural join of the factors' supports with product-combined values.

    The output factor is laid out over `order`, which must be exactly the
    union of the participant edges.  Output rows never store the zero value.
    """
    if not factors:
        raise DataError("generic_join needs at least one factor")
    order = tuple(order)
    union = set()
    for f in factors:
        if not f.edge:
            raise DataError("scalar factors cannot participate in a join")
        union.update(f.edge)
    if set(order) != union or len(set(order)) != len(order):
        raise DataError(f"order {order} does not cover the joined edges exactly")

    rank = {v: i for i, v in enumerate(order)}
    tries = [_Trie.build(f, rank) for f in factors]
    ranges = [[0, len(t.keys)] for t in tries]
    participants = []
    for v in order:
        participants.append(
            [(i, t.col_of[v]) for i, t in enumerate(tries) if v in t.col_of]
        )

    if stats is None:
        stats = JoinStats()
    ctx = context
    times = ctx.product
    out_rows: dict[tuple, object] = {}
    binding: list = []
    depth = len(order)

    def descend(level: int):
        if level == depth:
            value = ctx.one
            for t, rng in zip(tries, ranges):
                value = times(value, t.vals[rng[0]])
            if not ctx.is_zero(value):
                out_rows[tuple(binding)] = value
                stats.outputs += 1
            return
        parts = participants[level]
        saved = [(i, ranges[i][0], ranges[i][1]) for i, _ in parts]
        keys_l = [tries[i].keys for i, _ in parts]
        cols = [c for _, c in parts]
        cursors = [ranges[i][0] for i, _ in parts]
        his = [ranges[i][1] for i, _ in parts]
        k = len(parts)
        if any(cursors[t] >= his[t] for t in range(k)):
            return
        x = max(keys_l[t][cursors[t]][cols[t]] for t in range(k))
        while True:
            exhausted = False
            aligned = True
            for t in range(k):
                cursors[t] = _seek(keys_l[t], cursors[t], his[t], cols[t], x)
                if cursors[t] >= his[t]:
                    exhausted = True
                    break
                head = keys_l[t][cursors[t]][cols[t]]
                if head > x:
                    x = head
                    aligned = False
            if exhausted:
                break
            if not aligned:
                continue
            ends = []
            for t in range(k):
                i, c = parts[t]
                end = _upper_bound(keys_l[t], cursors[t], his[t], c, x)
                ranges[i][0] = cursors[t]
                ranges[i][1] = end
                ends.append(end)
            binding.append(x)
            stats.bindings_expanded += 1
            descend(level + 1)
            binding.pop()
            for t, (i, lo, hi) in enumerate(saved):
                ranges[i][1] = hi
                cursors[t] = ends[t]
                if cursors[t] >= his[t]:
                    exhausted = True
            if exhausted:
                break
            x = max(keys_l[t][cursors[t]][cols[t]] for t in range(k))
        for i, lo, hi in saved:
            ranges[i][0] = lo
            ranges[i][1] = hi

    descend(0)
    return Factor(edge=order, rows=out_rows, context=ctx)
