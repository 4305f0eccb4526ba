"""Shape-to-pod compiler: O(log n)-scale blocks with binary teeth.

Every adjacency of the input shape gets a fresh number; each point becomes a
B x B DNA block (B = 4l + 12 for l-bit edge numbers) whose coded sides carry
interlocking teeth plus a pair of strength-1 corner glues keyed by the edge
code.  Stage 1 assembles the blocks inside RNA scaffolding (a Turing-machine
ribbon in full mode, a keeper apron per block in skip-unpacking mode); the
RNase stage frees the blocks, which then assemble the scaled shape.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .errors import InvalidArgument, LabelTooLong, MalformedSpec
from .model import (
    EAST,
    Glue,
    Material,
    NORTH,
    NULL_GLUE,
    SOUTH,
    Shape,
    StageDirective,
    TileSystem,
    TileType,
    WEST,
    block_bit_width,
    block_side,
)
from .plans import (
    Manifest,
    TeethSegment,
    UnitBuilder,
    UnitRecord,
    build_apron,
    plan_partial_growth,
    pod_teeth_margin,
    seed_to_json,
    toothed_footprint,
)
from . import tm as tmod

SIDE_ORDER = ("N", "E", "S", "W")
SIDE_VECTORS = {"N": NORTH, "E": EAST, "S": SOUTH, "W": WEST}
OPP_SIDE = {"N": "S", "S": "N", "E": "W", "W": "E"}
ANCHOR_COLUMN = 3  # corner margin column used for the scaffold tie-in


@dataclass(frozen=True)
class EdgeAssignment:
    """Edge numbers per (point, side); both sides of an adjacency agree."""

    values: Dict[Tuple[Tuple[int, int], str], Optional[int]]
    count: int
    bit_width: int

    def value(self, point, side: str) -> Optional[int]:
        return self.values[(point, side)]

    def code(self, point, side: str) -> Optional[str]:
        v = self.value(point, side)
        if v is None:
            return None
        return format(v, f"0{self.bit_width}b")


def assign_edges(s: Shape) -> EdgeAssignment:
    """Number the shape's adjacencies with a running counter.

    Points are visited in row-major order (y, then x ascending), sides in
    the order North, East, South, West; each side of an adjacency receives
    the same value, boundary sides the null value.
    """
    values: Dict[Tuple[Tuple[int, int], str], Optional[int]] = {}
    counter = 0
    points = sorted(s.points, key=lambda p: (p[1], p[0]))
    for p in points:
        for side in SIDE_ORDER:
            if (p, side) in values:
                continue
            d = SIDE_VECTORS[side]
            q = (p[0] + d[0], p[1] + d[1])
            if q in s.points:
                values[(p, side)] = counter
                values[(q, OPP_SIDE[side])] = counter
                counter += 1
            else:
                values[(p, side)] = None
    return EdgeAssignment(values=values, count=counter,
                          bit_width=block_bit_width(counter))


def emit_labeled_row(s: Shape, e: EdgeAssignment) -> List[Tuple]:
    """Per-point quadruples of side codes in the order West, North, East,
    South; boundary sides are None (they serialize as the null code)."""
    out = []
    for p in sorted(s.points, key=lambda q: (q[1], q[0])):
        out.append(tuple(e.code(p, side) for side in ("W", "N", "E", "S")))
    return out


def null_code(bit_width: int) -> str:
    """The reserved all-ones code; genuine values never reach the top bit."""
    return "1" * bit_width


def serialize_labeled_row(quadruples: List[Tuple], bit_width: int,
                          blank: str = tmod.BLANK) -> str:
    """Flatten the quadruples, two blank symbols between codes."""
    sep = blank * 2
    codes = []
    for quad in quadruples:
        for code in quad:
            codes.append(code if code is not None else null_code(bit_width))
    return sep.join(codes)


@dataclass(frozen=True)
class BlockSpec:
    """Everything needed to compile one point's DNA block."""

    point: Tuple[int, int]
    side_codes: Dict[str, Optional[str]]      # N/E/S/W -> bit string or None
    block_side: int
    label_payload: Optional[Tuple[str, str, object]] = None  # (bits, "rows"|"cols", list|"all")

    def bit_width(self) -> int:
        return (self.block_side - 12) // 4

    def teeth(self) -> Dict[str, List[TeethSegment]]:
        width = self.bit_width()
        sides = {}
        for side, code in self.side_codes.items():
            if code is None:
                sides[side] = []
                continue
            if len(code) != width:
                raise MalformedSpec(
                    f"side {side} code {code!r} is not {width} bits")
            sides[side] = [TeethSegment(pod_teeth_margin(), code)]
        return sides

    def footprint(self) -> frozenset:
        return toothed_footprint(self.block_side, self.block_side, self.teeth())


def corner_glue_specs(spec: BlockSpec) -> List[Tuple[Tuple[int, int], Tuple[int, int], Glue]]:
    """The strength-1 corner glues of every coded side of a block.

    Labels pair a horizontal/vertical marker, the side's code and the corner
    end, so only the two complementary corners of an adjacency can bind.
    """
    b = spec.block_side
    out = []
    for side, code in spec.side_codes.items():
        if code is None:
            continue
        if side == "E":
            out.append(((b - 1, 0), EAST, Glue(f"crn:h:{code}:S", 1)))
            out.append(((b - 1, b - 1), EAST, Glue(f"crn:h:{code}:N", 1)))
        elif side == "W":
            out.append(((0, 0), WEST, Glue(f"crn:h:{code}:S", 1)))
            out.append(((0, b - 1), WEST, Glue(f"crn:h:{code}:N", 1)))
        elif side == "N":
            out.append(((0, b - 1), NORTH, Glue(f"crn:v:{code}:W", 1)))
            out.append(((b - 1, b - 1), NORTH, Glue(f"crn:v:{code}:E", 1)))
        else:
            out.append(((0, 0), SOUTH, Glue(f"crn:v:{code}:W", 1)))
            out.append(((b - 1, 0), SOUTH, Glue(f"crn:v:{code}:E", 1)))
    return out


def label_cells(spec: BlockSpec) -> Dict[Tuple[int, int], str]:
    """Positions carrying the block's display label bits."""
    if spec.label_payload is None:
        return {}
    bits, mode, selector = spec.label_payload
    b = spec.block_side
    if len(bits) > b - 2:
        raise LabelTooLong(f"label {bits!r} longer than {b - 2} cells")
    if any(c not in "01" for c in bits):
        raise MalformedSpec(f"label must be binary, got {bits!r}")
    lanes = range(b) if selector == "all" else list(selector)
    start = (b - len(bits)) // 2
    out = {}
    for lane in lanes:
        if not 0 <= lane < b:
            raise MalformedSpec(f"label lane {lane} outside block")
        for i, bit in enumerate(bits):
            pos = (start + i, lane) if mode == "rows" else (lane, start + i)
            out[pos] = bit
    return out


def compile_block_tiles(spec: BlockSpec, connectivity: str = "partial",
                        unit_id: str = "blk",
                        builder: Optional[UnitBuilder] = None,
                        seed: Optional[Tuple[int, int]] = None,
                        temperature: int = 2) -> Tuple[List[TileType], frozenset, UnitBuilder]:
    """DNA tiles assembling one block under seeded growth.

    Teeth geometry and null outer glues per the partial-connectivity scheme;
    the coded sides' corner glues are the only positive exterior glues.
    """
    if connectivity != "partial":
        raise InvalidArgument("compile_block_tiles builds the partial-connectivity block")
    footprint = spec.footprint()
    own_builder = builder is None
    if own_builder:
        builder = UnitBuilder(unit_id, temperature)
    labels = label_cells(spec)
    for pos in labels:
        if pos not in footprint:
            raise MalformedSpec(f"label cell {pos} falls in a tooth dent")
    for pos in sorted(footprint):
        builder.add_cell(pos, Material.DNA, labels.get(pos))
    plan_partial_growth(builder, footprint, seed or (0, 0), f"k:{builder.unit_id}")
    for pos, direction, glue in corner_glue_specs(spec):
        builder.add_exterior(pos, direction, glue)
    if own_builder:
        builder.seed_pos = seed or (0, 0)
        tiles, _ = builder.build()
        return tiles, footprint, builder
    return [], footprint, builder


def block_specs_for_shape(s: Shape, e: EdgeAssignment,
                          labels: Optional[Dict] = None) -> List[BlockSpec]:
    b = block_side(e.bit_width)
    specs = []
    for p in sorted(s.points, key=lambda q: (q[1], q[0])):
        payload = None
        if labels and p in labels:
            payload = labels[p]
        specs.append(BlockSpec(
            point=p,
            side_codes={side: e.code(p, side) for side in SIDE_ORDER},
            block_side=b,
            label_payload=payload,
        ))
    return specs


def unit_name(point) -> str:
    x, y = point
    return f"p{x}_{y}".replace("-", "m")


def _build_block_unit(spec: BlockSpec, temperature: int) -> Tuple[UnitBuilder, frozenset]:
    """Block plus its RNA keeper apron, seeded at the apron's west end."""
    builder = UnitBuilder(unit_name(spec.point), temperature)
    footprint = spec.footprint()
    labels = label_cells(spec)
    for pos in labels:
        if pos not in footprint:
            raise MalformedSpec(f"label cell {pos} falls in a tooth dent")
    for pos in sorted(footprint):
        builder.add_cell(pos, Material.DNA, labels.get(pos))
    plan_partial_growth(builder, footprint, (ANCHOR_COLUMN, 0), f"k:{builder.unit_id}")
    for pos, direction, glue in corner_glue_specs(spec):
        builder.add_exterior(pos, direction, glue)
    build_apron(builder, footprint, spec.block_side, ANCHOR_COLUMN)
    return builder, footprint


def compile_pod(s: Shape, labels: Optional[Dict] = None,
                skip_unpacking: bool = True, jobs: int = 1) -> TileSystem:
    """Two-stage pod system whose post-break terminal is the shape scaled by
    the block side.

    ``labels`` maps shape points to (bits, "rows"|"cols", selector) payloads
    surfaced as display labels.  Skip-unpacking mode emits the blocks with
    keeper aprons directly; full mode compiles a Turing machine that prints
    the labeled-row serialization and hangs the blocks off its halt row.
    """
    s = s.normalized()
    e = assign_edges(s)
    b = block_side(e.bit_width)
    specs = block_specs_for_shape(s, e, labels)

    if skip_unpacking:
        return _compile_pod_skip(s, e, b, specs, jobs)
    return _compile_pod_full(s, e, b, specs)


def _expected_labels(specs: List[BlockSpec], pitch: int) -> Dict[str, str]:
    out = {}
    for spec in specs:
        ox, oy = spec.point[0] * pitch, spec.point[1] * pitch
        for (x, y), bit in label_cells(spec).items():
            out[f"{ox + x},{oy + y}"] = bit
    return out


def _compile_pod_skip(s, e, b, specs, jobs: int = 1) -> TileSystem:
    def build_one(spec):
        builder, footprint = _build_block_unit(spec, 2)
        tiles, seed = builder.build()
        record = UnitRecord(
            unit_id=builder.unit_id,
            seed=seed_to_json(seed),
            expected_cells=len(builder.cells),
            dna_parts=[{
                "prefix": builder.unit_id,
                "cells": [list(c) for c in sorted(footprint)],
                "origin": [spec.point[0] * b, spec.point[1] * b],
            }],
        )
        return tiles, record

    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(build_one, specs))
    else:
        results = [build_one(spec) for spec in specs]
    tiles = [t for ts, _ in results for t in ts]
    units = [rec for _, rec in results]
    names = tuple(t.name for t in sorted(tiles, key=lambda t: t.name))
    manifest = Manifest(
        kind="pod",
        temperature=2,
        scale=b,
        target_points=[list(p) for p in sorted(s.points)],
        units=units,
        notes={
            "points": len(s),
            "edge_count": e.count,
            "bit_width": e.bit_width,
            "block_side": b,
            "mode": "skip-unpacking",
        },
        expected_labels=_expected_labels(specs, b),
    )
    return TileSystem.of(
        tiles, 2,
        stages=(StageDirective("add", names), StageDirective("break")),
        manifest=manifest,
    )


def _compile_pod_full(s, e, b, specs) -> TileSystem:
    """Full-unpacking pipeline: a Turing machine prints the labeled-row
    serialization; a keyed anchor row rebuilds position over the generic
    halt row; one riser per point hangs its DNA block off the anchor row."""
    section = b + 4
    span = 2 + len(specs) * section
    quadruples = emit_labeled_row(s, e)
    serialized = serialize_labeled_row(quadruples, e.bit_width)
    program = tmod.print_string_machine(serialized)
    compiled = tmod.compile_tm_simulation(
        program, min_columns=span, anchor=True, prefix="tm")

    tiles: List[TileType] = list(compiled.tiles)
    lo = min(compiled.column_of)
    anchor_span = 1 + len(specs) * section
    riser_units = {1 + i * section + ANCHOR_COLUMN: unit_name(spec.point)
                   for i, spec in enumerate(specs)}

    for x in range(0, anchor_span + 1):
        if x == 0:
            south = Glue("tm:anchor:start", 2)
            west = NULL_GLUE
        else:
            pos = lo + (x - 1)
            sym = compiled.halt_tape.get(pos, tmod.BLANK)
            if pos == compiled.halt_head:
                south = Glue(f"tm:halted:{compiled.halt_state}:{sym}", 1)
            else:
                south = Glue(f"tm:v:{sym}", 1)
            west = Glue(f"anc:{x - 1}", 1)
        north = NULL_GLUE
        if x in riser_units:
            north = Glue(f"rise:{riser_units[x]}", 2)
        east = Glue(f"anc:{x}", 1) if x < anchor_span else NULL_GLUE
        tiles.append(TileType(f"anc.{x}", north=north, east=east,
                              south=south, west=west, material=Material.RNA))

    block_records = []
    block_cell_total = 0
    for spec in specs:
        uid = unit_name(spec.point)
        builder = UnitBuilder(uid, 2)
        footprint = spec.footprint()
        labels = label_cells(spec)
        for pos in labels:
            if pos not in footprint:
                raise MalformedSpec(f"label cell {pos} falls in a tooth dent")
        for pos in sorted(footprint):
            builder.add_cell(pos, Material.DNA, labels.get(pos))
        plan_partial_growth(builder, footprint, (ANCHOR_COLUMN, 0), f"k:{uid}")
        for pos, direction, glue in corner_glue_specs(spec):
            builder.add_exterior(pos, direction, glue)
        builder.add_exterior((ANCHOR_COLUMN, 0), SOUTH, Glue(f"anchor:{uid}", 2))
        builder.seed_pos = (ANCHOR_COLUMN, 0)
        unit_tiles, _ = builder.build()
        tiles.extend(unit_tiles)
        tiles.append(TileType(
            f"rise.{uid}",
            north=Glue(f"anchor:{uid}", 2),
            south=Glue(f"rise:{uid}", 2),
            material=Material.RNA,
        ))
        block_cell_total += len(footprint)
        block_records.append({
            "prefix": uid,
            "cells": [list(c) for c in sorted(footprint)],
            "origin": [spec.point[0] * b, spec.point[1] * b],
        })

    ribbon_cells = (compiled.rows + 1) * (compiled.width + 2)
    expected_cells = (ribbon_cells + (anchor_span + 1) + len(specs)
                      + block_cell_total)
    record = UnitRecord(
        unit_id="ribbon",
        seed=seed_to_json(compiled.seed),
        expected_cells=expected_cells,
        dna_parts=block_records,
    )
    names = tuple(t.name for t in sorted(tiles, key=lambda t: t.name))
    manifest = Manifest(
        kind="pod",
        temperature=2,
        scale=b,
        target_points=[list(p) for p in sorted(s.points)],
        units=[record],
        notes={
            "points": len(s),
            "edge_count": e.count,
            "bit_width": e.bit_width,
            "block_side": b,
            "mode": "full-unpacking",
            "tm_rows": compiled.rows,
            "tm_width": compiled.width,
            "serialized_row": serialized,
        },
        expected_labels=_expected_labels(specs, b),
    )
    return TileSystem.of(
        tiles, 2,
        stages=(StageDirective("add", names), StageDirective("break")),
        manifest=manifest,
    )
