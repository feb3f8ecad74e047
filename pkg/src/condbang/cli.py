"""Command-line front end.

One command per process: parse a problem document, dispatch to the library,
emit a canonical JSON report.  ``verify`` re-reads a problem/report pair and
independently recomputes both sides of every equality the report claims,
with oracle-route summation, exiting 4 on any violation beyond tolerance.

Exit codes: 0 success, 2 schema error, 3 mathematical precondition failure,
4 verification failure.
"""

from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction
from typing import Any, Callable

from . import __version__
from .condexp import BlockFunction, SimpleFunction, cond_exp, ce_measure
from .bangbang import bang_bang, pointset_bang_bang
from .documents import (ProblemDocument, SchemaError, canonical_dumps,
                        document_digest, encode_block_function, encode_number,
                        encode_refined_set, encode_simple_function, load_json,
                        parse_actions, parse_block_function, parse_integrands,
                        parse_number, parse_polytopes, parse_problem,
                        parse_refined_set, parse_simple_function,
                        parse_young_measure)
from .lyapunov import annihilator_witness, half_set, lyapunov_partition, witness_block_integrals
from .numeric import Scalar
from .oracle import direct_integrate, direct_mixture_payoff, direct_payoff
from .polytope import extreme_points
from .purify import (PureStrategy, density_step, purify_with_actions,
                     stack_integrands)
from .spaces import (BlockPartition, Grid, Mode, block_masses, coarseness_check,
                     full_set, grid_from_weights, make_partition)

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_PRECONDITION = 3
EXIT_VERIFY = 4

RUN_COMMANDS = ("cond-exp", "ce-measure", "partition", "half-set", "annihilator",
                "bang-bang", "pointset-bang-bang", "purify", "density-step",
                "coarseness")
COMMANDS = RUN_COMMANDS + ("verify",)


# ---------------------------------------------------------------------------
# command handlers: problem -> (outputs, residuals, certified bound)
# ---------------------------------------------------------------------------


def _enc(x: Scalar, exact: bool) -> Any:
    return encode_number(x, exact)


def _run_cond_exp(p: ProblemDocument):
    f = parse_simple_function(p.payload.get("function"), p.exact,
                              p.grid.cell_count, "payload.function")
    out = cond_exp(f, p.partition, p.grid)
    return {"expectation": encode_block_function(out, p.exact)}, {}, p.tolerance


def _run_ce_measure(p: ProblemDocument):
    E = parse_refined_set(p.payload.get("set"), p.exact, p.grid, "payload.set")
    out = ce_measure(E, p.partition, p.grid)
    return {"measure": encode_block_function(out, p.exact)}, {}, p.tolerance


def _run_partition(p: ProblemDocument):
    h = parse_simple_function(p.payload.get("moments"), p.exact,
                              p.grid.cell_count, "payload.moments")
    alpha = parse_simple_function(p.payload.get("weights"), p.exact,
                                  p.grid.cell_count, "payload.weights")
    res = lyapunov_partition(h, alpha, p.partition, p.grid, tol=p.tolerance)
    outputs = {"pieces": [encode_refined_set(piece, p.exact) for piece in res.pieces]}
    residuals = {"max_residual": _enc(res.max_residual, p.exact),
                 "fractional_per_block": list(res.fractional_per_block)}
    return outputs, residuals, res.residual_bound


def _run_half_set(p: ProblemDocument):
    h = parse_simple_function(p.payload.get("moments"), p.exact,
                              p.grid.cell_count, "payload.moments")
    E = parse_refined_set(p.payload.get("set"), p.exact, p.grid, "payload.set")
    res = half_set(h, E, p.partition, p.grid, tol=p.tolerance)
    outputs = {"half": encode_refined_set(res.half, p.exact),
               "achieved": encode_block_function(res.achieved, p.exact),
               "target": encode_block_function(res.target, p.exact)}
    residuals = {"max_residual": _enc(res.max_residual, p.exact)}
    return outputs, residuals, res.residual_bound


def _run_annihilator(p: ProblemDocument):
    f = parse_simple_function(p.payload.get("function"), p.exact,
                              p.grid.cell_count, "payload.function")
    if f.dim != 1:
        raise SchemaError("payload.function must be scalar for annihilator")
    E = parse_refined_set(p.payload.get("set"), p.exact, p.grid, "payload.set")
    w = annihilator_witness(f, E, p.partition, p.grid, tol=p.tolerance)
    integrals = witness_block_integrals(w)
    outputs = {
        "space": {"weights": [_enc(x, p.exact) for x in w.grid.weights],
                  "mode": w.grid.mode.value},
        "parent": list(w.refinement.parent),
        "witness": encode_simple_function(w.g, p.exact),
        "support": encode_refined_set(w.support, p.exact),
        "set": encode_refined_set(w.set_on_refined, p.exact),
        "partition": {"blocks": list(w.partition_on_refined.block_of)},
        "norm_inf": _enc(w.norm_inf, p.exact),
    }
    residuals = {"max_block_integral": _enc(integrals.max_abs(), p.exact)}
    return outputs, residuals, p.tolerance


def _run_bang_bang(p: ProblemDocument, pointset: bool = False):
    key = "points" if pointset else "polytopes"
    T = parse_polytopes(p.payload.get(key), p.exact, p.grid.cell_count, f"payload.{key}")
    h = parse_simple_function(p.payload.get("selection"), p.exact,
                              p.grid.cell_count, "payload.selection")
    runner = pointset_bang_bang if pointset else bang_bang
    sel, rep = runner(T, h, p.partition, p.grid, tol=p.tolerance,
                      diagonal_only=p.diagonal_only)
    outputs = {
        "pieces": [encode_refined_set(piece, p.exact) for piece in sel.pieces],
        "branch_values": [encode_simple_function(v, p.exact) for v in sel.values],
        "lhs": encode_block_function(rep.lhs, p.exact),
        "rhs": encode_block_function(rep.rhs, p.exact),
    }
    residuals = {"max_deviation": _enc(rep.max_deviation, p.exact),
                 "max_residual": _enc(rep.partition.max_residual, p.exact)}
    return outputs, residuals, rep.residual_bound


def _parse_purify_inputs(p: ProblemDocument):
    actions = parse_actions(p.payload.get("actions"), "payload.actions")
    delta = parse_young_measure(p.payload.get("young_measure"), p.exact, actions,
                                p.grid, p.tolerance, "payload.young_measure")
    return actions, delta


def _encode_strategy(strategy: PureStrategy, exact: bool) -> list:
    rows = []
    for k, chunks in enumerate(strategy.chunks):
        for off, m, a in chunks:
            rows.append([k, _enc(off, exact), _enc(m, exact), a])
    return rows


def _run_purify(p: ProblemDocument):
    actions, delta = _parse_purify_inputs(p)
    V = parse_integrands(p.payload.get("integrands"), p.exact, p.grid.cell_count,
                         actions.size, "payload.integrands")
    strategy, rep = purify_with_actions(delta, V, actions, p.partition, p.grid,
                                        tol=p.tolerance, diagonal_only=p.diagonal_only)
    outputs = {"actions": list(actions.labels),
               "chunks": _encode_strategy(strategy, p.exact),
               "lhs": encode_block_function(rep.lhs, p.exact),
               "rhs": encode_block_function(rep.rhs, p.exact)}
    residuals = {"max_deviation": _enc(rep.max_deviation, p.exact)}
    return outputs, residuals, rep.residual_bound


def _parse_family(p: ProblemDocument, actions_size: int):
    family_raw = p.payload.get("family")
    if not isinstance(family_raw, list) or not family_raw:
        raise SchemaError("payload.family must be a nonempty array of scalar integrands")
    from .purify import IntegrandFamily
    fams = []
    for idx, entry in enumerate(family_raw):
        if not isinstance(entry, dict) or "values" not in entry:
            raise SchemaError(f"payload.family[{idx}] needs a values table")
        table = entry["values"]
        if not isinstance(table, list) or len(table) != p.grid.cell_count:
            raise SchemaError(f"payload.family[{idx}]: expected {p.grid.cell_count} cells")
        cells = []
        for k, row in enumerate(table):
            if not isinstance(row, list) or len(row) != actions_size:
                raise SchemaError(f"payload.family[{idx}][{k}]: expected {actions_size} values")
            cells.append(tuple((parse_number(v, p.exact, f"payload.family[{idx}][{k}]"),)
                               for v in row))
        fams.append(IntegrandFamily(dim=1, values=tuple(cells)))
    return fams


def _run_density_step(p: ProblemDocument):
    actions, delta = _parse_purify_inputs(p)
    fams = _parse_family(p, actions.size)
    strategy, rep = density_step(delta, fams, p.partition, p.grid, tol=p.tolerance)
    strategy = PureStrategy(actions=actions, chunks=strategy.chunks)
    outputs = {"actions": list(actions.labels),
               "chunks": _encode_strategy(strategy, p.exact),
               "lhs": encode_block_function(rep.lhs, p.exact),
               "rhs": encode_block_function(rep.rhs, p.exact)}
    residuals = {"max_deviation": _enc(rep.max_deviation, p.exact)}
    return outputs, residuals, rep.residual_bound


def _run_coarseness(p: ProblemDocument):
    E = None
    if p.payload.get("set") is not None:
        E = parse_refined_set(p.payload["set"], p.exact, p.grid, "payload.set")
    verdict = coarseness_check(p.grid, p.partition, E, tol=p.tolerance)
    outputs = {
        "is_coarser": verdict.is_coarser,
        "witness": encode_refined_set(verdict.witness, p.exact),
        "witness_conditional": None if verdict.witness_conditional is None
        else [_enc(x, p.exact) for x in verdict.witness_conditional],
        "reference_conditional": None if verdict.reference_conditional is None
        else [_enc(x, p.exact) for x in verdict.reference_conditional],
    }
    return outputs, {}, p.tolerance


_HANDLERS: dict[str, Callable[[ProblemDocument], tuple]] = {
    "cond-exp": _run_cond_exp,
    "ce-measure": _run_ce_measure,
    "partition": _run_partition,
    "half-set": _run_half_set,
    "annihilator": _run_annihilator,
    "bang-bang": lambda p: _run_bang_bang(p, pointset=False),
    "pointset-bang-bang": lambda p: _run_bang_bang(p, pointset=True),
    "purify": _run_purify,
    "density-step": _run_density_step,
    "coarseness": _run_coarseness,
}


def run(command: str, problem: ProblemDocument) -> dict:
    """Dispatch a command and assemble the report document."""
    if command not in _HANDLERS:
        raise SchemaError(f"unknown command {command!r}")
    started = time.perf_counter()
    outputs, residuals, bound = _HANDLERS[command](problem)
    elapsed = time.perf_counter() - started
    return {
        "command": command,
        "version": __version__,
        "input_digest": problem.digest,
        "parameters": {
            "tolerance": float(problem.tolerance),
            "exact": problem.exact,
            "mode": problem.grid.mode.value,
            "diagonal_only": problem.diagonal_only,
            "seed": problem.seed,
        },
        "outputs": outputs,
        "residuals": residuals,
        "certified_bound": _enc(bound, problem.exact),
        "wall_time": elapsed,
    }


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------


class _Check:
    def __init__(self, tol: Scalar):
        self.tol = tol
        self.violations: list[str] = []

    def fail(self, msg: str) -> None:
        self.violations.append(msg)

    def close(self, a: Scalar, b: Scalar, what: str) -> None:
        if abs(a - b) > self.tol:
            self.violations.append(f"{what}: {a!r} vs {b!r} differ beyond tolerance")

    def block_close(self, claimed: BlockFunction, computed: BlockFunction, what: str) -> None:
        if claimed.dim != computed.dim or len(claimed.values) != len(computed.values):
            self.violations.append(f"{what}: shape mismatch")
            return
        for b, (cr, xr) in enumerate(zip(claimed.values, computed.values)):
            for j, (c, x) in enumerate(zip(cr, xr)):
                if abs(c - x) > self.tol:
                    self.violations.append(
                        f"{what}: block {b} coord {j}: {c!r} vs {x!r}")
                    return


def _pieces_partition_space(chk: _Check, pieces, grid: Grid) -> None:
    for k in range(grid.cell_count):
        total = sum(piece.masses[k] for piece in pieces)
        if abs(total - grid.weights[k]) > chk.tol:
            chk.fail(f"cell {k}: piece masses sum to {total!r}, not the cell weight")
        spans = sorted((piece.offsets[k], piece.masses[k])
                       for piece in pieces if piece.masses[k] > 0)
        cursor = None
        for off, m in spans:
            if cursor is not None and off < cursor - chk.tol:
                chk.fail(f"cell {k}: overlapping piece intervals")
                break
            cursor = off + m
        if grid.mode is Mode.ATOMIC:
            for piece in pieces:
                m = piece.masses[k]
                if m > chk.tol and abs(m - grid.weights[k]) > chk.tol:
                    chk.fail(f"cell {k}: atomic piece carries fractional mass {m!r}")
                    break


def _oracle_partition_residual(pieces, h: SimpleFunction, alpha: SimpleFunction,
                               C: BlockPartition, grid: Grid) -> Scalar:
    worst: Scalar = 0
    mu = block_masses(C, grid)
    for i, piece in enumerate(pieces):
        lhs = direct_integrate(h, piece, C, grid)
        for b, cells in enumerate(C.blocks):
            for j in range(h.dim):
                rhs = sum(alpha.values[k][i] * grid.weights[k] * h.values[k][j]
                          for k in cells) / mu[b]
                dev = abs(lhs.values[b][j] - rhs)
                if dev > worst:
                    worst = dev
    return worst


def _verify_cond_exp(chk, p: ProblemDocument, rep: dict) -> None:
    f = parse_simple_function(p.payload.get("function"), p.exact,
                              p.grid.cell_count, "payload.function")
    claimed = parse_block_function(rep["outputs"].get("expectation"), p.exact,
                                   p.partition.block_count, "outputs.expectation")
    chk.block_close(claimed, direct_integrate(f, None, p.partition, p.grid),
                    "conditional expectation")


def _verify_ce_measure(chk, p: ProblemDocument, rep: dict) -> None:
    E = parse_refined_set(p.payload.get("set"), p.exact, p.grid, "payload.set")
    claimed = parse_block_function(rep["outputs"].get("measure"), p.exact,
                                   p.partition.block_count, "outputs.measure")
    one = SimpleFunction(dim=1, values=((Fraction(1) if p.exact else 1.0,),)
                         * p.grid.cell_count)
    chk.block_close(claimed, direct_integrate(one, E, p.partition, p.grid),
                    "conditional measure")


def _verify_partition(chk, p: ProblemDocument, rep: dict) -> None:
    h = parse_simple_function(p.payload.get("moments"), p.exact,
                              p.grid.cell_count, "payload.moments")
    alpha = parse_simple_function(p.payload.get("weights"), p.exact,
                                  p.grid.cell_count, "payload.weights")
    pieces = [parse_refined_set(obj, p.exact, p.grid, f"outputs.pieces[{i}]")
              for i, obj in enumerate(rep["outputs"].get("pieces", []))]
    if len(pieces) != alpha.dim:
        chk.fail("piece count disagrees with the weight function")
        return
    _pieces_partition_space(chk, pieces, p.grid)
    recomputed = _oracle_partition_residual(pieces, h, alpha, p.partition, p.grid)
    claimed = parse_number(rep["residuals"].get("max_residual"), p.exact,
                           "residuals.max_residual")
    chk.close(claimed, recomputed, "max partition residual")
    bound = parse_number(rep.get("certified_bound"), p.exact, "certified_bound")
    if recomputed > bound + chk.tol:
        chk.fail(f"residual {recomputed!r} exceeds the certified bound {bound!r}")


def _verify_half_set(chk, p: ProblemDocument, rep: dict) -> None:
    h = parse_simple_function(p.payload.get("moments"), p.exact,
                              p.grid.cell_count, "payload.moments")
    E = parse_refined_set(p.payload.get("set"), p.exact, p.grid, "payload.set")
    F = parse_refined_set(rep["outputs"].get("half"), p.exact, p.grid, "outputs.half")
    for k in range(p.grid.cell_count):
        if F.masses[k] > E.masses[k] + chk.tol:
            chk.fail(f"cell {k}: half-set exceeds the ambient set")
        if F.masses[k] > 0 and (F.offsets[k] < E.offsets[k] - chk.tol or
                                F.offsets[k] + F.masses[k]
                                > E.offsets[k] + E.masses[k] + chk.tol):
            chk.fail(f"cell {k}: half-set leaves the ambient interval")
    achieved = direct_integrate(h, F, p.partition, p.grid)
    whole = direct_integrate(h, E, p.partition, p.grid)
    target = BlockFunction(dim=whole.dim, values=tuple(
        tuple(v / 2 for v in row) for row in whole.values))
    chk.block_close(parse_block_function(rep["outputs"].get("achieved"), p.exact,
                                         p.partition.block_count, "outputs.achieved"),
                    achieved, "achieved half measure")
    chk.block_close(parse_block_function(rep["outputs"].get("target"), p.exact,
                                         p.partition.block_count, "outputs.target"),
                    target, "half-measure target")
    recomputed = max((abs(a - t) for ar, tr in zip(achieved.values, target.values)
                      for a, t in zip(ar, tr)), default=0)
    claimed = parse_number(rep["residuals"].get("max_residual"), p.exact,
                           "residuals.max_residual")
    chk.close(claimed, recomputed, "half-set residual")
    bound = parse_number(rep.get("certified_bound"), p.exact, "certified_bound")
    if recomputed > bound + chk.tol:
        chk.fail(f"half-set residual {recomputed!r} exceeds bound {bound!r}")


def _verify_annihilator(chk, p: ProblemDocument, rep: dict) -> None:
    out = rep["outputs"]
    space = out.get("space", {})
    weights = [parse_number(w, p.exact, "outputs.space.weights")
               for w in space.get("weights", [])]
    rgrid = grid_from_weights(weights, space.get("mode", "splittable"))
    parent = out.get("parent", [])
    if len(parent) != len(weights):
        chk.fail("parent map and refined weights disagree")
        return
    g = parse_simple_function(out.get("witness"), p.exact, len(weights), "outputs.witness")
    support = parse_refined_set(out.get("support"), p.exact, rgrid, "outputs.support")
    E_r = parse_refined_set(out.get("set"), p.exact, rgrid, "outputs.set")
    blocks = out.get("partition", {}).get("blocks", [])
    C_r = make_partition(blocks)
    f = parse_simple_function(p.payload.get("function"), p.exact,
                              p.grid.cell_count, "payload.function")
    f_r = SimpleFunction(dim=1, values=tuple(f.values[q] for q in parent))
    norm = g.max_abs()
    claimed_norm = parse_number(out.get("norm_inf"), p.exact, "outputs.norm_inf")
    chk.close(claimed_norm, norm, "witness sup norm")
    if not norm > chk.tol:
        chk.fail("witness is numerically zero")
    for j in range(len(weights)):
        if support.masses[j] > E_r.masses[j] + chk.tol:
            chk.fail(f"refined cell {j}: support exceeds the ambient set")
            break
        if support.masses[j] <= chk.tol and abs(g.values[j][0]) > chk.tol:
            chk.fail(f"refined cell {j}: witness lives outside its support")
            break
    fg = SimpleFunction(dim=1, values=tuple((g.values[j][0] * f_r.values[j][0],)
                                            for j in range(len(weights))))
    integrals = direct_integrate(fg, E_r, C_r, rgrid)
    worst = integrals.max_abs()
    if worst > chk.tol:
        chk.fail(f"annihilation fails: max block integral {worst!r}")
    claimed = parse_number(rep["residuals"].get("max_block_integral"), p.exact,
                           "residuals.max_block_integral")
    chk.close(claimed, worst, "max block integral")


def _verify_bang_bang(chk, p: ProblemDocument, rep: dict, pointset: bool) -> None:
    key = "points" if pointset else "polytopes"
    T = parse_polytopes(p.payload.get(key), p.exact, p.grid.cell_count, f"payload.{key}")
    h = parse_simple_function(p.payload.get("selection"), p.exact,
                              p.grid.cell_count, "payload.selection")
    out = rep["outputs"]
    pieces = [parse_refined_set(obj, p.exact, p.grid, f"outputs.pieces[{i}]")
              for i, obj in enumerate(out.get("pieces", []))]
    values = [parse_simple_function(obj, p.exact, p.grid.cell_count,
                                    f"outputs.branch_values[{i}]")
              for i, obj in enumerate(out.get("branch_values", []))]
    if len(pieces) != len(values) or not pieces:
        chk.fail("pieces and branch values disagree")
        return
    _pieces_partition_space(chk, pieces, p.grid)
    ext_cache: dict[int, list] = {}
    for i, piece in enumerate(pieces):
        for k in range(p.grid.cell_count):
            if piece.masses[k] <= 0:
                continue
            if k not in ext_cache:
                ext_cache[k] = extreme_points(T.vertices[k], chk.tol)
            point = values[i].values[k]
            if not any(all(abs(a - b) <= chk.tol for a, b in zip(point, vert))
                       for vert in ext_cache[k]):
                chk.fail(f"cell {k}: branch {i} value is not an extreme point")
                return
    mu = block_masses(p.partition, p.grid)
    dim = values[0].dim
    lhs_rows = []
    for b, cells in enumerate(p.partition.blocks):
        vals = []
        for j in range(dim):
            acc = sum(pieces[i].masses[k] * values[i].values[k][j]
                      for k in cells for i in range(len(pieces)))
            vals.append(acc / mu[b])
        lhs_rows.append(tuple(vals))
    lhs = BlockFunction(dim=dim, values=tuple(lhs_rows))
    rhs = direct_integrate(h, None, p.partition, p.grid)
    chk.block_close(parse_block_function(out.get("lhs"), p.exact,
                                         p.partition.block_count, "outputs.lhs"),
                    lhs, "glued selection expectation")
    chk.block_close(parse_block_function(out.get("rhs"), p.exact,
                                         p.partition.block_count, "outputs.rhs"),
                    rhs, "input selection expectation")
    deviation = max((abs(a - b) for ar, br in zip(lhs.values, rhs.values)
                     for a, b in zip(ar, br)), default=0)
    claimed = parse_number(rep["residuals"].get("max_deviation"), p.exact,
                           "residuals.max_deviation")
    chk.close(claimed, deviation, "bang-bang deviation")
    bound = parse_number(rep.get("certified_bound"), p.exact, "certified_bound")
    if deviation > bound + chk.tol:
        chk.fail(f"deviation {deviation!r} exceeds the certified bound {bound!r}")


def _verify_purify(chk, p: ProblemDocument, rep: dict, density: bool) -> None:
    actions = parse_actions(p.payload.get("actions"), "payload.actions")
    delta = parse_young_measure(p.payload.get("young_measure"), p.exact, actions,
                                p.grid, p.tolerance, "payload.young_measure")
    if density:
        fams = _parse_family(p, actions.size)
        V = stack_integrands(fams)
    else:
        V = parse_integrands(p.payload.get("integrands"), p.exact, p.grid.cell_count,
                             actions.size, "payload.integrands")
    out = rep["outputs"]
    chunk_rows = out.get("chunks", [])
    per_cell: list[list[tuple[Scalar, Scalar, int]]] = [[] for _ in range(p.grid.cell_count)]
    for row in chunk_rows:
        if not isinstance(row, list) or len(row) != 4:
            chk.fail("chunks must be [cell, offset, mass, action] rows")
            return
        k, a = row[0], row[3]
        if not isinstance(k, int) or not 0 <= k < p.grid.cell_count:
            chk.fail(f"chunk references unknown cell {k!r}")
            return
        if not isinstance(a, int) or not 0 <= a < actions.size:
            chk.fail(f"chunk references unknown action {a!r}")
            return
        per_cell[k].append((parse_number(row[1], p.exact, "chunk offset"),
                            parse_number(row[2], p.exact, "chunk mass"), a))
    for k, chunks in enumerate(per_cell):
        total = sum(m for _, m, _ in chunks)
        if abs(total - p.grid.weights[k]) > chk.tol:
            chk.fail(f"cell {k}: chunks carry mass {total!r}, not the cell weight")
        for _, m, a in chunks:
            if m > chk.tol and not delta.rows[k][a] > 0:
                chk.fail(f"cell {k}: chosen action {a} has zero mixture weight")
    strategy = PureStrategy(actions=actions, chunks=tuple(tuple(c) for c in per_cell))
    lhs = direct_mixture_payoff(delta.rows, V, p.partition, p.grid)
    rhs = direct_payoff(strategy, V, p.partition, p.grid)
    chk.block_close(parse_block_function(out.get("lhs"), p.exact,
                                         p.partition.block_count, "outputs.lhs"),
                    lhs, "mixture payoff")
    chk.block_close(parse_block_function(out.get("rhs"), p.exact,
                                         p.partition.block_count, "outputs.rhs"),
                    rhs, "pure strategy payoff")
    deviation = max((abs(a - b) for ar, br in zip(lhs.values, rhs.values)
                     for a, b in zip(ar, br)), default=0)
    claimed = parse_number(rep["residuals"].get("max_deviation"), p.exact,
                           "residuals.max_deviation")
    chk.close(claimed, deviation, "purification deviation")
    bound = parse_number(rep.get("certified_bound"), p.exact, "certified_bound")
    if deviation > bound + chk.tol:
        chk.fail(f"payoff deviation {deviation!r} exceeds bound {bound!r}")


def _verify_coarseness(chk, p: ProblemDocument, rep: dict) -> None:
    E = full_set(p.grid)
    if p.payload.get("set") is not None:
        E = parse_refined_set(p.payload["set"], p.exact, p.grid, "payload.set")
    out = rep["outputs"]
    witness = parse_refined_set(out.get("witness"), p.exact, p.grid, "outputs.witness")
    mu = block_masses(p.partition, p.grid)
    ref = [sum(E.masses[k] for k in cells) / mu[b]
           for b, cells in enumerate(p.partition.blocks)]
    wit = [sum(witness.masses[k] for k in cells) / mu[b]
           for b, cells in enumerate(p.partition.blocks)]
    if p.grid.splittable:
        if out.get("is_coarser") is not True:
            chk.fail("splittable verdict must be positive")
        claimed_w = out.get("witness_conditional")
        claimed_r = out.get("reference_conditional")
        if claimed_w is None or claimed_r is None:
            chk.fail("splittable verdict must carry conditional probabilities")
            return
        for b in range(p.partition.block_count):
            chk.close(parse_number(claimed_w[b], p.exact, "witness_conditional"),
                      wit[b], f"witness conditional on block {b}")
            chk.close(parse_number(claimed_r[b], p.exact, "reference_conditional"),
                      ref[b], f"reference conditional on block {b}")
            if ref[b] > chk.tol and not (wit[b] > 0 and wit[b] < ref[b]):
                chk.fail(f"block {b}: witness fails strict separation")
    else:
        if out.get("is_coarser") is not False:
            chk.fail("atomic verdict must be negative")
        live = [k for k in range(p.grid.cell_count) if witness.masses[k] > 0]
        if len(live) != 1 or abs(witness.masses[live[0]]
                                 - p.grid.weights[live[0]]) > chk.tol:
            chk.fail("atomic witness must be a single whole cell")


def verify_report(problem_raw: Any, report_raw: Any) -> list[str]:
    """Recheck every claim of a report against its problem; empty means valid."""
    if not isinstance(report_raw, dict):
        raise SchemaError("report document must be a JSON object")
    command = report_raw.get("command")
    if command not in RUN_COMMANDS:
        raise SchemaError(f"report carries unknown command {command!r}")
    params = report_raw.get("parameters", {})
    if not isinstance(params, dict):
        raise SchemaError("report parameters must be an object")
    problem = parse_problem(problem_raw,
                            mode_override=params.get("mode"),
                            exact_override=params.get("exact", False),
                            tol_override=params.get("tolerance"),
                            diagonal_override=params.get("diagonal_only", False))
    chk = _Check(problem.tolerance)
    if report_raw.get("input_digest") != document_digest(problem_raw):
        chk.fail("input digest mismatch: report does not belong to this problem")
        return chk.violations
    if "outputs" not in report_raw or "residuals" not in report_raw:
        raise SchemaError("report needs outputs and residuals")
    try:
        if command == "cond-exp":
            _verify_cond_exp(chk, problem, report_raw)
        elif command == "ce-measure":
            _verify_ce_measure(chk, problem, report_raw)
        elif command == "partition":
            _verify_partition(chk, problem, report_raw)
        elif command == "half-set":
            _verify_half_set(chk, problem, report_raw)
        elif command == "annihilator":
            _verify_annihilator(chk, problem, report_raw)
        elif command == "bang-bang":
            _verify_bang_bang(chk, problem, report_raw, pointset=False)
        elif command == "pointset-bang-bang":
            _verify_bang_bang(chk, problem, report_raw, pointset=True)
        elif command == "purify":
            _verify_purify(chk, problem, report_raw, density=False)
        elif command == "density-step":
            _verify_purify(chk, problem, report_raw, density=True)
        elif command == "coarseness":
            _verify_coarseness(chk, problem, report_raw)
    except (ValueError, KeyError, TypeError) as err:
        chk.fail(f"verification could not reconstruct the claim: {err}")
    return chk.violations


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="condbang",
        description="conditional-expectation measures, partitions, bang-bang "
                    "selections and purification on discretized spaces")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("input", help="problem document path, or - for stdin")
    parser.add_argument("report", nargs="?",
                        help="report document path (verify only)")
    parser.add_argument("-o", "--output", default=None,
                        help="report destination (default stdout)")
    parser.add_argument("--tol", type=float, default=None,
                        help="comparison tolerance (default 1e-9)")
    parser.add_argument("--exact", action="store_true", default=False,
                        help="exact rational arithmetic; rejects float literals")
    parser.add_argument("--mode", choices=[m.value for m in Mode], default=None,
                        help="override the document's space mode")
    parser.add_argument("--diagonal-only", action="store_true", default=False,
                        help="diagonal moment systems in the bang-bang solver")
    parser.add_argument("--seed", type=int, default=None,
                        help="seed echoed into the report for randomized helpers")
    args = parser.parse_args(argv)

    try:
        if args.command == "verify":
            if args.report is None:
                raise SchemaError("verify needs a problem document and a report")
            problem_raw = load_json(_read(args.input), "problem")
            report_raw = load_json(_read(args.report), "report")
            violations = verify_report(problem_raw, report_raw)
            ok = not violations
            _write(args.output, canonical_dumps({"ok": ok, "violations": violations}))
            if not ok:
                for v in violations:
                    print(f"verify: {v}", file=sys.stderr)
                return EXIT_VERIFY
            return EXIT_OK
        if args.report is not None:
            raise SchemaError(f"{args.command} takes a single input document")
        raw = load_json(_read(args.input), "problem")
        problem = parse_problem(raw,
                                mode_override=args.mode,
                                exact_override=True if args.exact else None,
                                tol_override=args.tol,
                                diagonal_override=True if args.diagonal_only else None,
                                seed_override=args.seed)
        report = run(args.command, problem)
        _write(args.output, canonical_dumps(report))
        return EXIT_OK
    except SchemaError as err:
        print(f"schema error: {err}", file=sys.stderr)
        return EXIT_SCHEMA
    except (ValueError, ArithmeticError) as err:
        print(f"precondition failure: {err}", file=sys.stderr)
        return EXIT_PRECONDITION


def console() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
