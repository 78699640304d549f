"""Exact rational solver for small weighted covering LPs.

minimize    sum_F w_F * lambda_F
subject to  sum_{F containing v} lambda_F >= 1   for every vertex v
            lambda >= 0

Solved as a primal simplex run on the packing dual (which has a trivial
all-slack starting basis), with Bland's rule for anti-cycling and Fraction
arithmetic throughout.  The optimal cover is read off the final tableau's
dual prices.  Instances here are tiny (a few dozen rows), so exactness is
worth far more than speed.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import InternalError, UncoverableVertexError

ZERO = Fraction(0)
ONE = Fraction(1)


def solve_cover(
    vertices: list, edge_sets: list[frozenset], weights: list[Fraction]
) -> tuple[Fraction, list[Fraction]]:
    """Return (objective, lambda per edge) for the covering LP above.

    Raises UncoverableVertexError if some vertex lies in no edge.  The
    returned lambda vector is a basic optimal solution and is deterministic
    for a fixed ordering of vertices and edges.
    """
    m = len(edge_sets)
    n = len(vertices)
    if any(w < 0 for w in weights):
        raise InternalError("covering LP weights must be nonnegative")
    for v in vertices:
        if not any(v in e for e in edge_sets):
            raise UncoverableVertexError(v)
    if n == 0:
        return ZERO, [ZERO] * m

    # Dual packing tableau: rows = edges, columns = y variables then slacks.
    width = n + m
    tableau = []
    for i, edge in enumerate(edge_sets):
        row = [ONE if vertices[j] in edge else ZERO for j in range(n)]
        row.extend(ONE if k == i else ZERO for k in range(m))
        tableau.append(row)
    rhs = [Fraction(w) for w in weights]
    basis = [n + i for i in range(m)]

    def reduced_cost(j):
        r = ONE if j < n else ZERO
        for i in range(m):
            if basis[i] < n and tableau[i][j]:
                r -= tableau[i][j]
        return r

    while True:
        entering = None
        for j in range(width):
            if j in basis:
                continue
            if reduced_cost(j) > 0:
                entering = j
                break
        if entering is None:
            break
        pivot_row = None
        best_ratio = None
        for i in range(m):
            coeff = tableau[i][entering]
            if coeff > 0:
                ratio = rhs[i] / coeff
                if (
                    best_ratio is None
                    or ratio < best_ratio
                    or (ratio == best_ratio and basis[i] < basis[pivot_row])
                ):
                    best_ratio = ratio
                    pivot_row = i
        if pivot_row is None:
            raise InternalError("packing LP unbounded despite coverage check")
        piv = tableau[pivot_row][entering]
        tableau[pivot_row] = [x / piv for x in tableau[pivot_row]]
        rhs[pivot_row] /= piv
        for i in range(m):
            if i == pivot_row:
                continue
            factor = tableau[i][entering]
            if factor:
                prow = tableau[pivot_row]
                tableau[i] = [x - factor * p for x, p in zip(tableau[i], prow)]
                rhs[i] -= factor * rhs[pivot_row]
        basis[pivot_row] = entering

    lam = [-reduced_cost(n + k) for k in range(m)]
    packing_value = sum(rhs[i] for i in range(m) if basis[i] < n)
    objective = sum(l * w for l, w in zip(lam, weights))
    if objective != packing_value:
        raise InternalError("strong duality violated in cover LP")
    return objective, lam
