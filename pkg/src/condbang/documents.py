"""JSON problem and report documents.

One UTF-8 JSON document per file.  Numbers are decimal floats in the default
regime and ``{"num": int, "den": int}`` objects in exact mode (which rejects
floating-point literals).  Refined sets travel as sorted (cell, offset, mass)
triples with offsets relative to the cell start.  Serialization is canonical
(sorted keys, tight separators, trailing newline), so parse-then-serialize is
byte-stable and reports can be digested.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .condexp import BlockFunction, SimpleFunction
from .numeric import Scalar
from .polytope import PolytopeMap, polytope_map
from .purify import ActionSet, IntegrandFamily, YoungMeasure, action_set, young_measure
from .spaces import (BlockPartition, Grid, Mode, RefinedSet, build_grid,
                     make_partition, set_from_triples, trivial_partition)


class SchemaError(Exception):
    """The document does not follow the expected JSON schema."""


def canonical_dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=False, allow_nan=False) + "\n"


def document_digest(obj: Any) -> str:
    return "sha256:" + hashlib.sha256(canonical_dumps(obj).encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# numbers
# ---------------------------------------------------------------------------


def parse_number(v: Any, exact: bool, what: str) -> Scalar:
    if isinstance(v, bool):
        raise SchemaError(f"{what}: expected a number, got a boolean")
    if isinstance(v, dict):
        if set(v) != {"num", "den"}:
            raise SchemaError(f"{what}: rational object needs exactly num and den")
        num, den = v["num"], v["den"]
        if not isinstance(num, int) or not isinstance(den, int) or isinstance(num, bool) \
                or isinstance(den, bool) or den == 0:
            raise SchemaError(f"{what}: rational needs integer num and nonzero integer den")
        frac = Fraction(num, den)
        return frac if exact else frac.numerator / frac.denominator
    if isinstance(v, int):
        return Fraction(v) if exact else float(v)
    if isinstance(v, float):
        if exact:
            raise SchemaError(f"{what}: exact mode rejects floating-point literals")
        return v
    raise SchemaError(f"{what}: expected a number, got {type(v).__name__}")


def encode_number(x: Scalar, exact: bool) -> Any:
    if exact:
        f = Fraction(x)
        return {"num": f.numerator, "den": f.denominator}
    return float(x)


def _require(obj: Any, key: str, what: str) -> Any:
    if not isinstance(obj, dict):
        raise SchemaError(f"{what}: expected an object")
    if key not in obj:
        raise SchemaError(f"{what}: missing key {key!r}")
    return obj[key]


def _as_list(v: Any, what: str) -> list:
    if not isinstance(v, list):
        raise SchemaError(f"{what}: expected an array")
    return v


# ---------------------------------------------------------------------------
# library objects
# ---------------------------------------------------------------------------


def parse_simple_function(obj: Any, exact: bool, cells: int, what: str) -> SimpleFunction:
    dim = _require(obj, "dim", what)
    values = _as_list(_require(obj, "values", what), f"{what}.values")
    if not isinstance(dim, int) or dim < 1:
        raise SchemaError(f"{what}: dim must be a positive integer")
    if len(values) != cells:
        raise SchemaError(f"{what}: expected {cells} cell values, got {len(values)}")
    rows = []
    for k, row in enumerate(values):
        row = _as_list(row, f"{what}.values[{k}]")
        if len(row) != dim:
            raise SchemaError(f"{what}.values[{k}]: expected {dim} components")
        rows.append(tuple(parse_number(v, exact, f"{what}.values[{k}]") for v in row))
    return SimpleFunction(dim=dim, values=tuple(rows))


def encode_simple_function(f: SimpleFunction, exact: bool) -> dict:
    return {"dim": f.dim,
            "values": [[encode_number(v, exact) for v in row] for row in f.values]}


def encode_block_function(bf: BlockFunction, exact: bool) -> dict:
    return {"dim": bf.dim,
            "values": [[encode_number(v, exact) for v in row] for row in bf.values]}


def parse_block_function(obj: Any, exact: bool, blocks: int, what: str) -> BlockFunction:
    dim = _require(obj, "dim", what)
    values = _as_list(_require(obj, "values", what), f"{what}.values")
    if len(values) != blocks:
        raise SchemaError(f"{what}: expected {blocks} block values")
    rows = []
    for b, row in enumerate(values):
        row = _as_list(row, f"{what}.values[{b}]")
        if len(row) != dim:
            raise SchemaError(f"{what}.values[{b}]: expected {dim} components")
        rows.append(tuple(parse_number(v, exact, f"{what}.values[{b}]") for v in row))
    return BlockFunction(dim=dim, values=tuple(rows))


def parse_refined_set(obj: Any, exact: bool, grid: Grid, what: str) -> RefinedSet:
    triples = _as_list(_require(obj, "triples", what), f"{what}.triples")
    parsed = []
    for t in triples:
        t = _as_list(t, f"{what}.triples entry")
        if len(t) != 3 or not isinstance(t[0], int) or isinstance(t[0], bool):
            raise SchemaError(f"{what}: each triple is [cell, offset, mass]")
        parsed.append((t[0], parse_number(t[1], exact, f"{what} offset"),
                       parse_number(t[2], exact, f"{what} mass")))
    try:
        return set_from_triples(grid, parsed)
    except ValueError as err:
        raise SchemaError(f"{what}: {err}") from None


def encode_refined_set(E: RefinedSet, exact: bool) -> dict:
    return {"triples": [[k, encode_number(o, exact), encode_number(m, exact)]
                        for k, o, m in E.triples()]}


def parse_polytopes(obj: Any, exact: bool, cells: int, what: str) -> PolytopeMap:
    dim = _require(obj, "dim", what)
    vertices = _as_list(_require(obj, "vertices", what), f"{what}.vertices")
    if not isinstance(dim, int) or dim < 1:
        raise SchemaError(f"{what}: dim must be a positive integer")
    if len(vertices) != cells:
        raise SchemaError(f"{what}: expected {cells} vertex sets")
    sets = []
    for k, vs in enumerate(vertices):
        vs = _as_list(vs, f"{what}.vertices[{k}]")
        if not vs:
            raise SchemaError(f"{what}.vertices[{k}]: vertex set must be nonempty")
        pts = []
        for v in vs:
            v = _as_list(v, f"{what}.vertices[{k}] point")
            if len(v) != dim:
                raise SchemaError(f"{what}.vertices[{k}]: point dimension mismatch")
            pts.append(tuple(parse_number(c, exact, f"{what}.vertices[{k}]") for c in v))
        sets.append(pts)
    return polytope_map(sets)


def encode_polytopes(T: PolytopeMap, exact: bool) -> dict:
    return {"dim": T.dim,
            "vertices": [[[encode_number(c, exact) for c in pt] for pt in cell]
                         for cell in T.vertices]}


def parse_actions(obj: Any, what: str) -> ActionSet:
    labels = _as_list(obj, what)
    if not all(isinstance(a, str) for a in labels):
        raise SchemaError(f"{what}: action labels must be strings")
    try:
        return action_set(labels)
    except ValueError as err:
        raise SchemaError(f"{what}: {err}") from None


def parse_young_measure(obj: Any, exact: bool, actions: ActionSet, grid: Grid,
                        tol: Scalar, what: str) -> YoungMeasure:
    rows = _as_list(obj, what)
    if len(rows) != grid.cell_count:
        raise SchemaError(f"{what}: expected {grid.cell_count} rows")
    parsed = []
    for k, row in enumerate(rows):
        row = _as_list(row, f"{what}[{k}]")
        parsed.append([parse_number(v, exact, f"{what}[{k}]") for v in row])
    try:
        return young_measure(parsed, actions, grid, tol)
    except ValueError as err:
        raise SchemaError(f"{what}: {err}") from None


def parse_integrands(obj: Any, exact: bool, cells: int, actions: int, what: str
                     ) -> IntegrandFamily:
    dim = _require(obj, "dim", what)
    values = _as_list(_require(obj, "values", what), f"{what}.values")
    if not isinstance(dim, int) or dim < 1:
        raise SchemaError(f"{what}: dim must be a positive integer")
    if len(values) != cells:
        raise SchemaError(f"{what}: expected {cells} cells")
    out = []
    for k, per_action in enumerate(values):
        per_action = _as_list(per_action, f"{what}.values[{k}]")
        if len(per_action) != actions:
            raise SchemaError(f"{what}.values[{k}]: expected {actions} action vectors")
        rows = []
        for a, vec in enumerate(per_action):
            vec = _as_list(vec, f"{what}.values[{k}][{a}]")
            if len(vec) != dim:
                raise SchemaError(f"{what}.values[{k}][{a}]: expected {dim} components")
            rows.append(tuple(parse_number(v, exact, f"{what}.values[{k}][{a}]")
                              for v in vec))
        out.append(tuple(rows))
    return IntegrandFamily(dim=dim, values=tuple(out))


def encode_integrands(V: IntegrandFamily, exact: bool) -> dict:
    return {"dim": V.dim,
            "values": [[[encode_number(v, exact) for v in vec] for vec in cell]
                       for cell in V.values]}


# ---------------------------------------------------------------------------
# problem documents
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProblemDocument:
    raw: dict
    grid: Grid
    partition: BlockPartition
    payload: dict
    tolerance: Scalar
    exact: bool
    diagonal_only: bool
    seed: int | None

    @property
    def digest(self) -> str:
        return document_digest(self.raw)


def parse_problem(raw: Any, *, mode_override: str | None = None,
                  exact_override: bool | None = None,
                  tol_override: float | None = None,
                  diagonal_override: bool | None = None,
                  seed_override: int | None = None) -> ProblemDocument:
    if not isinstance(raw, dict):
        raise SchemaError("problem document must be a JSON object")
    params = raw.get("parameters", {})
    if not isinstance(params, dict):
        raise SchemaError("parameters must be an object")
    exact = params.get("exact", False)
    if not isinstance(exact, bool):
        raise SchemaError("parameters.exact must be a boolean")
    if exact_override is not None:
        exact = exact_override
    diagonal = params.get("diagonal_only", False)
    if not isinstance(diagonal, bool):
        raise SchemaError("parameters.diagonal_only must be a boolean")
    if diagonal_override is not None:
        diagonal = diagonal_override
    tolerance: Scalar
    if exact:
        tolerance = Fraction(0)
    else:
        tol_raw = params.get("tolerance", None)
        if tol_raw is not None and not isinstance(tol_raw, (int, float)):
            raise SchemaError("parameters.tolerance must be a number")
        tolerance = float(tol_raw) if tol_raw is not None else 1e-9
        if tol_override is not None:
            tolerance = float(tol_override)
    seed = params.get("seed", None)
    if seed is not None and (not isinstance(seed, int) or isinstance(seed, bool)):
        raise SchemaError("parameters.seed must be an integer")
    if seed_override is not None:
        seed = seed_override

    space = _require(raw, "space", "problem")
    weights_raw = _as_list(_require(space, "weights", "space"), "space.weights")
    mode = _require(space, "mode", "space") if mode_override is None else mode_override
    if mode not in (Mode.SPLITTABLE.value, Mode.ATOMIC.value):
        raise SchemaError(f"space.mode must be 'splittable' or 'atomic', got {mode!r}")
    weights = [parse_number(w, exact, "space.weights") for w in weights_raw]
    try:
        grid = build_grid(weights, mode)
    except ValueError as err:
        raise SchemaError(f"space: {err}") from None

    if "partition" in raw and raw["partition"] is not None:
        blocks_raw = _as_list(_require(raw["partition"], "blocks", "partition"),
                              "partition.blocks")
        if len(blocks_raw) != grid.cell_count:
            raise SchemaError("partition.blocks length disagrees with the cell count")
        if not all(isinstance(b, int) and not isinstance(b, bool) for b in blocks_raw):
            raise SchemaError("partition.blocks must be integers")
        try:
            partition = make_partition(blocks_raw)
        except ValueError as err:
            raise SchemaError(f"partition: {err}") from None
    else:
        partition = trivial_partition(grid)

    payload = raw.get("payload", {})
    if not isinstance(payload, dict):
        raise SchemaError("payload must be an object")
    return ProblemDocument(raw=raw, grid=grid, partition=partition, payload=payload,
                           tolerance=tolerance, exact=exact, diagonal_only=diagonal,
                           seed=seed)


def load_json(text: str, what: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise SchemaError(f"{what}: invalid JSON ({err})") from None
