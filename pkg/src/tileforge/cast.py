"""Fully connected variant: RNA casts mold DNA blocks at doubled scale.

Every DNA tile of a block binds its neighbors on all four sides; the block's
exposed faces carry strength-1 glues keyed per interface contact, so two
complementary blocks fully connect at every abutting tile edge and anything
else mismatches.  The cast (an info-bar ring plus a clockwise mold path)
encloses the whole block before the RNase stage, feeds growth only through
its inner north/east faces, and gates the bulk of the block on its own
completion.

Two modes remove the stray-singleton hazard: ``temp4`` doubles the system
temperature and every intra-unit bond (exterior block glues stay strength
1), ``purge`` keeps temperature 2 and filters single tiles at the break.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .errors import InvalidArgument, MalformedSpec
from .model import (
    DIRECTIONS,
    EAST,
    Glue,
    Material,
    NORTH,
    OPPOSITE,
    SOUTH,
    Shape,
    StageDirective,
    TileSystem,
    TileType,
    WEST,
    block_side,
)
from .plans import (
    Manifest,
    TeethSegment,
    UnitBuilder,
    UnitRecord,
    build_cast,
    seed_to_json,
    seam_contact_edges,
    toothed_footprint,
)
from .pod import BlockSpec, SIDE_ORDER, assign_edges, unit_name

MODES = ("temp4", "purge")


def fc_block_side(bit_width: int) -> int:
    """Doubled scale relative to the partial-connectivity construction."""
    return 2 * block_side(bit_width)


def fc_bit_width(side: int) -> int:
    if (side - 24) % 8:
        raise MalformedSpec(f"{side} is not a doubled block side")
    return (side - 24) // 8


def fc_teeth_offset(side: int) -> int:
    return (side - 4 * fc_bit_width(side)) // 2


def fc_teeth(spec: BlockSpec) -> Dict[str, List[TeethSegment]]:
    width = fc_bit_width(spec.block_side)
    off = fc_teeth_offset(spec.block_side)
    sides = {}
    for side, code in spec.side_codes.items():
        if code is None:
            sides[side] = []
            continue
        if len(code) != width:
            raise MalformedSpec(f"side {side} code {code!r} is not {width} bits")
        sides[side] = [TeethSegment(off, code)]
    return sides


def fc_footprint(spec: BlockSpec) -> frozenset:
    return toothed_footprint(spec.block_side, spec.block_side, fc_teeth(spec))


@dataclass(frozen=True)
class CastSpec:
    """The mold around one block: its path, bars, and per-side edge info."""

    block: BlockSpec
    path: Tuple[Tuple[int, int], ...]
    bars: Tuple[Tuple[int, int], ...]
    edge_info_bars: Dict[str, Optional[str]]
    start_cell: Tuple[int, int]

    def validate(self):
        cells = list(self.path)
        if len(set(cells)) != len(cells):
            raise InvalidArgument("cast path revisits a cell")
        ring = cells + [cells[0]]
        for a, b in zip(ring, ring[1:]):
            if abs(a[0] - b[0]) + abs(a[1] - b[1]) != 1:
                raise InvalidArgument("cast path is not a cycle of adjacent cells")


def interface_contact_lists(side_len: int, offset: int, code: str,
                            orientation: str):
    """Matching contact faces across one interface, for both participants.

    Returns (left_faces, right_faces, corner_indices): lists of
    (cell, direction) in each block's local frame, index-aligned so contact
    i on one side abuts contact i on the other, plus the indices of the two
    corner contacts (which carry strength 2).  'h' pairs an east side with
    a west side, 'v' a north side with a south side.
    """
    L = side_len
    if orientation == "h":
        a = toothed_footprint(L, L, {"E": [TeethSegment(offset, code)]})
        b = toothed_footprint(L, L, {"W": [TeethSegment(offset, code)]})
        shift = (L, 0)
        corners = {((L - 1, 0), EAST), ((L - 1, L - 1), EAST)}
    else:
        a = toothed_footprint(L, L, {"N": [TeethSegment(offset, code)]})
        b = toothed_footprint(L, L, {"S": [TeethSegment(offset, code)]})
        shift = (0, L)
        corners = {((0, L - 1), NORTH), ((L - 1, L - 1), NORTH)}
    b_placed = frozenset((x + shift[0], y + shift[1]) for x, y in b)
    edges = seam_contact_edges(a, b_placed)
    left = []
    right = []
    corner_idx = set()
    for i, (acell, bcell, d) in enumerate(edges):
        left.append((acell, d))
        right.append(((bcell[0] - shift[0], bcell[1] - shift[1]), OPPOSITE[d]))
        if (acell, d) in corners:
            corner_idx.add(i)
    return left, right, corner_idx


def fc_side_glues(spec: BlockSpec, side: str,
                  corner_strength: int = 1) -> List[Tuple[Tuple[int, int], Tuple[int, int], Glue]]:
    """Exterior glues realizing one coded side's full-connectivity contract.

    One glue per abutting contact, strength 1, except the two corner
    contacts at ``corner_strength``: the temp4 variant needs strength-2
    corners so a block's first tile can be fed through its mold, while any
    single glue stays below half the temperature in both modes (so no stray
    tile ever attaches through it alone).  Labels are shared with the
    complementary side of the partner block.
    """
    code = spec.side_codes.get(side)
    if code is None:
        return []
    off = fc_teeth_offset(spec.block_side)
    if side in ("E", "W"):
        left, right, corner_idx = interface_contact_lists(
            spec.block_side, off, code, "h")
        faces = left if side == "E" else right
        prefix = f"fc:h:{code}"
    else:
        left, right, corner_idx = interface_contact_lists(
            spec.block_side, off, code, "v")
        faces = left if side == "N" else right
        prefix = f"fc:v:{code}"
    out = []
    for i, (cell, d) in enumerate(faces):
        strength = corner_strength if i in corner_idx else 1
        out.append((cell, d, Glue(f"{prefix}:{i}", strength)))
    return out


def plan_fc_bonds(builder: UnitBuilder, footprint: frozenset,
                  fc_map: Dict, path_cells: frozenset, scale: int):
    """Internal bonds for a fully connected block grown inside its cast.

    Every internal adjacency gets a bond of strength ``scale`` (the doubled
    internal glue in temp4 mode); a growth rehearsal from the mold-fed
    corner upgrades single-input bonds to 2 * scale wherever a cell could
    not otherwise reach the temperature, since interface faces contribute
    only their strength-1 glues.
    """
    tau = 2 * scale
    strengths: Dict[frozenset, int] = {}
    for pos in sorted(footprint):
        for d in (EAST, NORTH):
            q = (pos[0] + d[0], pos[1] + d[1])
            if q in footprint:
                strengths[frozenset((pos, q))] = scale

    def mold_budget(cell, d):
        # every mold contribution arrives through the path's north/east
        # faces, i.e. the block's south/west faces; glues elsewhere on the
        # cast-block boundary are deliberate mismatches
        if d not in (SOUTH, WEST):
            return 0
        q = (cell[0] + d[0], cell[1] + d[1])
        if q not in path_cells:
            return 0
        if (cell, d) in fc_map:
            return fc_map[(cell, d)].strength
        return scale

    placed = set()
    remaining = set(footprint)
    while remaining:
        progress = False
        for cell in sorted(remaining, key=lambda p: (p[1], p[0])):
            budget = 0
            for d in DIRECTIONS:
                q = (cell[0] + d[0], cell[1] + d[1])
                if q in placed:
                    budget += strengths[frozenset((cell, q))]
                else:
                    budget += mold_budget(cell, d)
            if budget >= tau:
                placed.add(cell)
                remaining.discard(cell)
                progress = True
        if progress:
            continue
        # no cell can attach: upgrade one input bond of the first candidate
        upgraded = False
        for cell in sorted(remaining, key=lambda p: (p[1], p[0])):
            for d in (SOUTH, WEST, NORTH, EAST):
                q = (cell[0] + d[0], cell[1] + d[1])
                if q in placed:
                    key = frozenset((cell, q))
                    if strengths[key] == scale:
                        strengths[key] = 2 * scale
                        upgraded = True
                        break
            if upgraded:
                break
        if not upgraded:
            stray = sorted(remaining)[0]
            raise InvalidArgument(f"fc growth plan cannot reach {stray}")
    for key in sorted(strengths, key=sorted):
        a, b = sorted(key)
        builder.add_bond(a, b, strengths[key],
                         f"k:{builder.unit_id}:{a[0]}:{a[1]}:{b[0]}:{b[1]}")


def _build_fc_unit(spec: BlockSpec, mode: str) -> Tuple[UnitBuilder, frozenset, CastSpec]:
    scale = 2 if mode == "temp4" else 1
    tau = 2 * scale
    builder = UnitBuilder(unit_name(spec.point), tau)
    footprint = fc_footprint(spec)
    for pos in sorted(footprint):
        builder.add_cell(pos, Material.DNA)
    fc_map = {}
    for side in SIDE_ORDER:
        for pos, d, glue in fc_side_glues(spec, side, corner_strength=scale):
            builder.add_exterior(pos, d, glue)
            fc_map[(pos, d)] = glue

    def feed(path_cell, dna_cell, direction):
        # direction is the path cell's face; the block receives on the
        # opposite face, which must not already carry an interface glue
        if (dna_cell, OPPOSITE[direction]) in fc_map:
            return None
        if direction in (NORTH, EAST):
            return scale
        return None

    path, bars = build_cast(builder, footprint, feed, scale=scale)
    pathset = frozenset(path)
    # mirror every covered interface glue onto the mold face it abuts, so
    # the mold both shapes the teeth and feeds growth through them
    for (pos, d) in sorted(fc_map, key=lambda k: (k[0], k[1])):
        q = (pos[0] + d[0], pos[1] + d[1])
        if q in pathset:
            builder.add_exterior(q, OPPOSITE[d], fc_map[(pos, d)])
    plan_fc_bonds(builder, footprint, fc_map, pathset, scale)
    cast = CastSpec(
        block=spec,
        path=tuple(path),
        bars=tuple(bars),
        edge_info_bars={s: spec.side_codes.get(s) for s in SIDE_ORDER},
        start_cell=path[0],
    )
    cast.validate()
    return builder, footprint, cast


def compile_cast(spec: BlockSpec, mode: str = "purge") -> Tuple[List[TileType], CastSpec]:
    """The RNA cast tiles (ring plus info bars) molding one block."""
    builder, _footprint, cast = _build_fc_unit(spec, mode)
    tiles, _ = builder.build()
    rna = [t for t in tiles if t.material is Material.RNA]
    return rna, cast


def compile_fc_block(spec: BlockSpec, mode: str = "purge") -> List[TileType]:
    """The DNA tiles of one fully connected block (grown inside its cast)."""
    builder, _footprint, _cast = _build_fc_unit(spec, mode)
    tiles, _ = builder.build()
    return [t for t in tiles if t.material is Material.DNA]


def compile_pod_fc(s: Shape, mode: str = "temp4") -> TileSystem:
    """Two-stage fully connected pod system at doubled scale.

    The unique post-break terminal is the shape scaled by the doubled block
    side, with every abutting tile pair positively bonded.
    """
    if mode not in MODES:
        raise InvalidArgument(f"mode must be one of {MODES}")
    s = s.normalized()
    e = assign_edges(s)
    side = fc_block_side(e.bit_width)
    tau = 4 if mode == "temp4" else 2
    specs = []
    for p in sorted(s.points, key=lambda q: (q[1], q[0])):
        specs.append(BlockSpec(
            point=p,
            side_codes={sd: e.code(p, sd) for sd in SIDE_ORDER},
            block_side=side,
        ))

    tiles: List[TileType] = []
    units: List[UnitRecord] = []
    for spec in specs:
        builder, footprint, cast = _build_fc_unit(spec, mode)
        unit_tiles, seed = builder.build()
        tiles.extend(unit_tiles)
        units.append(UnitRecord(
            unit_id=builder.unit_id,
            seed=seed_to_json(seed),
            expected_cells=len(builder.cells),
            dna_parts=[{
                "prefix": builder.unit_id,
                "cells": [list(c) for c in sorted(footprint)],
                "origin": [spec.point[0] * side, spec.point[1] * side],
            }],
            last_cast=builder.name_of(cast.path[-1]),
        ))
    names = tuple(t.name for t in sorted(tiles, key=lambda t: t.name))
    manifest = Manifest(
        kind="pod-fc",
        temperature=tau,
        scale=side,
        target_points=[list(p) for p in sorted(s.points)],
        units=units,
        purge_singletons=(mode == "purge"),
        notes={
            "points": len(s),
            "edge_count": e.count,
            "bit_width": e.bit_width,
            "block_side": side,
            "mode": mode,
        },
    )
    system = TileSystem.of(
        tiles, tau,
        stages=(StageDirective("add", names), StageDirective("break")),
        purge_singletons=(mode == "purge"),
        manifest=manifest,
    )
    _fill_exempt(system)
    return system


def _fill_exempt(system: TileSystem):
    """Record which DNA tiles can attach before the cast closes.

    Computed by growing each unit with its final path tile withheld; the
    DNA that still appears is the exempt set (the west flank seeded by the
    early part of the path), everything else is gated on cast completion.
    """
    from .engine import seeded_grow
    by_name = system.by_name()
    for unit in system.manifest.units:
        if unit.last_cast is None:
            continue
        seed = system.manifest.seed_assembly(unit)
        grown, _ = seeded_grow(system, seed, withhold=[unit.last_cast])
        unit.exempt = sorted(
            name for name in grown.placements.values()
            if by_name[name].material is Material.DNA)
