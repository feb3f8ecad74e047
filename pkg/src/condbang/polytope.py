"""Finite V-represented convex geometry.

Extreme points of a finite point set, convex decomposition of a hull point
over at most dim+1 extreme vertices (kernel-pivot support reduction), and
the cell-wise decomposition of a selection of a polytope-valued map into
extreme-point branches with weight functions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .condexp import SimpleFunction
from .linalg import convex_combination, reduce_support
from .numeric import Scalar, all_exact, check_finite, resolve_tol
from .spaces import Grid

Point = tuple[Scalar, ...]


class HullMembershipError(ValueError):
    """A point failed convex-hull membership (certified by LP infeasibility)."""

    def __init__(self, point: Point, cell: int | None = None,
                 direction: tuple[Scalar, ...] | None = None):
        self.point = point
        self.cell = cell
        self.direction = direction
        where = f" at cell {cell}" if cell is not None else ""
        super().__init__(f"point {tuple(point)!r}{where} lies outside the convex hull")


@dataclass(frozen=True)
class PolytopeMap:
    """Per-cell finite vertex sets in R^dim (V-representation)."""

    dim: int
    vertices: tuple[tuple[Point, ...], ...]


def polytope_map(vertex_sets: Sequence[Sequence[Sequence[Scalar]]]) -> PolytopeMap:
    cells = []
    dim = None
    for k, vs in enumerate(vertex_sets):
        if not vs:
            raise ValueError(f"cell {k}: vertex set must be nonempty")
        pts = []
        for v in vs:
            pt = tuple(check_finite(c, f"cell {k} vertex") for c in v)
            if dim is None:
                dim = len(pt)
            elif len(pt) != dim:
                raise ValueError(f"cell {k}: vertex dimension mismatch")
            pts.append(pt)
        cells.append(tuple(pts))
    return PolytopeMap(dim=dim, vertices=tuple(cells))


def _points_exact(points: Sequence[Point]) -> bool:
    return all(all_exact(p) for p in points)


def _dedupe(points: Sequence[Point]) -> tuple[list[Point], list[int]]:
    seen: dict[Point, int] = {}
    kept: list[Point] = []
    idx: list[int] = []
    for i, p in enumerate(points):
        if p not in seen:
            seen[p] = i
            kept.append(p)
            idx.append(i)
    return kept, idx


def extreme_point_indices(points: Sequence[Point], tol: Scalar | None = None) -> list[int]:
    """Indices (into the input, first occurrence) of the extreme points.

    A point stays iff expressing it as a convex combination of the other
    distinct points is infeasible.
    """
    pts = [tuple(p) for p in points]
    if not pts:
        raise ValueError("empty point set")
    exact = _points_exact(pts)
    tol = resolve_tol(exact, tol)
    kept, idx = _dedupe(pts)
    if len(kept) == 1:
        return [idx[0]]
    out = []
    for i, p in enumerate(kept):
        others = kept[:i] + kept[i + 1:]
        lam, _, _ = convex_combination(others, p, exact, tol)
        if lam is None:
            out.append(idx[i])
    return out


def extreme_points(points: Sequence[Point], tol: Scalar | None = None) -> list[Point]:
    pts = [tuple(p) for p in points]
    return [pts[i] for i in extreme_point_indices(pts, tol)]


def caratheodory_decompose(point: Sequence[Scalar], vertices: Sequence[Point],
                           dim: int | None = None, tol: Scalar | None = None
                           ) -> tuple[list[Scalar], list[int]]:
    """Write a hull point as a convex combination of at most dim+1 extreme vertices.

    Starts from any feasible combination over the extreme vertices, then
    pivots weights along nullspace directions of the stacked (vertex, 1)
    columns until the support is independent, hence of size <= dim+1.
    Returns (weights, vertex indices into the input sequence); raises
    HullMembershipError with a separating direction when the point is outside.
    """
    point = tuple(point)
    n = len(point) if dim is None else int(dim)
    if len(point) != n:
        raise ValueError("point dimension disagrees with dim")
    pts = [tuple(v) for v in vertices]
    if any(len(v) != n for v in pts):
        raise ValueError("vertex dimension disagrees with point")
    exact = _points_exact(pts) and all_exact(point)
    tol = resolve_tol(exact, tol)
    ext_idx = extreme_point_indices(pts, tol)
    candidates = [pts[i] for i in ext_idx]
    lam, certificate, _ = convex_combination(candidates, point, exact, tol)
    if lam is None:
        direction = None
        if certificate is not None:
            d = tuple(certificate[:n])
            margin = min(sum(dc * pc for dc, pc in zip(d, point)) -
                         sum(dc * vc for dc, vc in zip(d, v)) for v in pts)
            if margin > 0:
                direction = d
        raise HullMembershipError(point, direction=direction)
    columns = [list(v) + [Fraction(1) if exact else 1.0] for v in candidates]
    lam = reduce_support(columns, lam, exact)
    weights: list[Scalar] = []
    support: list[int] = []
    for j, w in enumerate(lam):
        if w > 0:
            weights.append(w)
            support.append(ext_idx[j])
    if len(support) > n + 1:
        raise RuntimeError("support reduction left more than dim+1 vertices")
    return weights, support


@dataclass(frozen=True)
class CaratheodoryDecomposition:
    """Cell-wise convex decomposition padded to a uniform dim+1 branches.

    Branch i of cell k carries vertex ``points[k][i]`` with weight
    ``weights[k][i]``; padding branches repeat the first support vertex with
    weight zero, so weights are nonnegative and sum to one per cell and the
    weighted branches reconstruct the decomposed selection.
    """

    dim: int
    supports: tuple[tuple[int, ...], ...]
    weights: tuple[tuple[Scalar, ...], ...]
    points: tuple[tuple[Point, ...], ...]

    @property
    def branch_count(self) -> int:
        return self.dim + 1

    def weight_function(self) -> SimpleFunction:
        return SimpleFunction(dim=self.branch_count, values=self.weights)

    def branch_function(self, i: int) -> SimpleFunction:
        return SimpleFunction(dim=self.dim, values=tuple(row[i] for row in self.points))

    def branch_functions(self) -> list[SimpleFunction]:
        return [self.branch_function(i) for i in range(self.branch_count)]

    def reconstruct(self, k: int) -> Point:
        acc = [0] * self.dim
        for w, pt in zip(self.weights[k], self.points[k]):
            for j in range(self.dim):
                acc[j] = acc[j] + w * pt[j]
        return tuple(acc)


def decompose_selection(T: PolytopeMap, s: SimpleFunction, grid: Grid,
                        tol: Scalar | None = None) -> CaratheodoryDecomposition:
    """Decompose a selection of T cell by cell (branch count is dim+1 everywhere)."""
    if s.dim != T.dim:
        raise ValueError("selection and polytope dimensions differ")
    if len(T.vertices) != grid.cell_count or len(s.values) != grid.cell_count:
        raise ValueError("cell counts differ")
    tol = grid.tol(tol)
    zero: Scalar = Fraction(0) if grid.is_exact else 0.0
    slots = T.dim + 1
    supports = []
    weights = []
    points = []
    for k in range(grid.cell_count):
        try:
            w, sup = caratheodory_decompose(s.values[k], T.vertices[k], T.dim, tol)
        except HullMembershipError as err:
            raise HullMembershipError(err.point, cell=k, direction=err.direction) from None
        pad = slots - len(sup)
        sup = sup + [sup[0]] * pad
        w = w + [zero] * pad
        supports.append(tuple(sup))
        weights.append(tuple(w))
        points.append(tuple(T.vertices[k][i] for i in sup))
    return CaratheodoryDecomposition(dim=T.dim, supports=tuple(supports),
                                     weights=tuple(weights), points=tuple(points))
