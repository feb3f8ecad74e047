"""Small dense linear-algebra kernels used by the decomposition and
partition solvers.

Three primitives: a nullspace vector of a column set, support reduction of a
nonnegative solution along kernel directions (ratio test, smallest index
leaves on ties), and a Phase-I simplex deciding convex-combination
feasibility with a Farkas certificate on failure.  All three run verbatim on
floats (partial pivoting, 1e-12 thresholds) and on Fractions (exact
pivoting, zero thresholds); sizes here are tens of rows, so plain lists beat
array machinery.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .numeric import PIVOT_TOL, Scalar

_MAX_SIMPLEX_ITERATIONS = 100000


def _zero(exact: bool) -> Scalar:
    return Fraction(0) if exact else 0.0


def nullspace_vector(rows: Sequence[Sequence[Scalar]], ncols: int,
                     exact: bool) -> list[Scalar] | None:
    """A nonzero z with (matrix given by rows) @ z = 0, or None at full column rank.

    Deterministic: elimination sweeps columns left to right, the first
    pivotless column becomes the free direction with coefficient one.
    """
    work = [list(r) for r in rows]
    nrows = len(work)
    pivots: list[tuple[int, int]] = []  # (column, row in echelon order)
    rank = 0
    free = None
    for c in range(ncols):
        pivot_row = None
        if exact:
            for i in range(rank, nrows):
                if work[i][c] != 0:
                    pivot_row = i
                    break
        else:
            best = PIVOT_TOL
            for i in range(rank, nrows):
                a = abs(work[i][c])
                if a > best:
                    best = a
                    pivot_row = i
        if pivot_row is None:
            free = c
            break
        if pivot_row != rank:
            work[rank], work[pivot_row] = work[pivot_row], work[rank]
        piv = work[rank][c]
        for i in range(rank + 1, nrows):
            f = work[i][c] / piv
            if f == 0:
                continue
            row_i, row_p = work[i], work[rank]
            for cc in range(c, ncols):
                row_i[cc] -= f * row_p[cc]
        pivots.append((c, rank))
        rank += 1
        if rank == nrows and c + 1 < ncols:
            free = c + 1
            break
    if free is None:
        return None
    z: list[Scalar] = [_zero(exact)] * ncols
    z[free] = Fraction(1) if exact else 1.0
    for c, r in reversed(pivots):
        s = _zero(exact)
        for cc in range(c + 1, free + 1):
            if z[cc] != 0:
                s += work[r][cc] * z[cc]
        z[c] = -s / work[r][c]
    return z


def reduce_support(columns: Sequence[Sequence[Scalar]], x: Sequence[Scalar],
                   exact: bool) -> list[Scalar]:
    """Shrink the support of a nonnegative solution of (columns)·x = b.

    While the supported columns are dependent, move along a kernel vector
    until a coordinate hits zero (ratio test; the smallest index among the
    tied minimizers leaves).  Feasibility and nonnegativity are preserved;
    the result has linearly independent support.
    """
    x = list(x)
    nrows = len(columns[0]) if columns else 0
    for _ in range(len(x) + 1):
        support = [v for v, xv in enumerate(x) if xv > 0]
        if len(support) <= 1:
            return x
        rows = [[columns[v][r] for v in support] for r in range(nrows)]
        z = nullspace_vector(rows, len(support), exact)
        if z is None:
            return x
        zero_thresh = 0 if exact else PIVOT_TOL
        if not any(zv > zero_thresh for zv in z):
            z = [-zv for zv in z]
        theta = None
        leave = None
        for idx, zv in enumerate(z):
            if zv > zero_thresh:
                ratio = x[support[idx]] / zv
                if theta is None or ratio < theta:
                    theta = ratio
                    leave = idx
        for idx, v in enumerate(support):
            x[v] = x[v] - theta * z[idx]
        x[support[leave]] = _zero(exact)
        if not exact:
            for v in support:
                if x[v] < 0:
                    x[v] = 0.0
    raise RuntimeError("support reduction failed to terminate")


def convex_combination(points: Sequence[Sequence[Scalar]], target: Sequence[Scalar],
                       exact: bool, feas_tol: Scalar
                       ) -> tuple[list[Scalar] | None, list[Scalar] | None, Scalar]:
    """Phase-I simplex for: target = sum lam_j * points_j, lam >= 0, sum lam = 1.

    Returns (lam, None, objective) when the residual objective reaches
    ``feas_tol``, else (None, certificate, objective) where the certificate y
    satisfies y·(v, 1) <= 0 for every point v and y·(target, 1) = objective.
    Bland's rule keeps the pivoting finite and deterministic.
    """
    dim = len(target)
    n = len(points)
    nrows = dim + 1
    if exact:
        b = [Fraction(t) for t in target] + [Fraction(1)]
        cols = [[Fraction(c) for c in pt] + [Fraction(1)] for pt in points]
        one, zero = Fraction(1), Fraction(0)
        eps = zero
    else:
        b = [float(t) for t in target] + [1.0]
        cols = [[float(c) for c in pt] + [1.0] for pt in points]
        one, zero = 1.0, 0.0
        eps = PIVOT_TOL
    sign = [one if bi >= 0 else -one for bi in b]
    # tableau rows, sign-flipped so the artificial basis is the identity:
    # [var columns | artificial columns | rhs]
    tab = []
    for i in range(nrows):
        row = [sign[i] * cols[j][i] for j in range(n)]
        row.extend(one if a == i else zero for a in range(nrows))
        row.append(b[i] * sign[i])
        tab.append(row)
    basis = [n + i for i in range(nrows)]
    dead = [False] * (n + nrows)  # artificials may not re-enter once they leave

    def reduced_cost(j: int) -> Scalar:
        rc = one if j >= n else zero
        for i in range(nrows):
            if basis[i] >= n:
                rc -= tab[i][j]
        return rc

    for _ in range(_MAX_SIMPLEX_ITERATIONS):
        enter = None
        for j in range(n + nrows):
            if dead[j] or j in basis:
                continue
            if reduced_cost(j) < -eps:
                enter = j
                break
        if enter is None:
            break
        leave = None
        best_ratio = None
        for i in range(nrows):
            a = tab[i][enter]
            if a > eps:
                ratio = tab[i][-1] / a
                if best_ratio is None or ratio < best_ratio or \
                        (ratio == best_ratio and basis[i] < basis[leave]):
                    best_ratio = ratio
                    leave = i
        if leave is None:
            raise RuntimeError("phase-one simplex became unbounded")
        piv = tab[leave][enter]
        tab[leave] = [v / piv for v in tab[leave]]
        for i in range(nrows):
            if i == leave:
                continue
            f = tab[i][enter]
            if f == 0:
                continue
            row_i, row_l = tab[i], tab[leave]
            for cc in range(n + nrows + 1):
                row_i[cc] -= f * row_l[cc]
        if basis[leave] >= n:
            dead[basis[leave]] = True
        basis[leave] = enter
    else:
        raise RuntimeError("phase-one simplex exceeded the iteration cap")

    objective = sum(tab[i][-1] for i in range(nrows) if basis[i] >= n)
    if objective <= feas_tol:
        lam = [zero] * n
        for i in range(nrows):
            if basis[i] < n:
                v = tab[i][-1]
                if not exact and v < 0:
                    v = 0.0
                lam[basis[i]] = v
        return lam, None, objective
    # Farkas certificate from the final multipliers.
    certificate = []
    for i in range(nrows):
        rc_art = reduced_cost(n + i)
        certificate.append(sign[i] * (one - rc_art))
    return None, certificate, objective
