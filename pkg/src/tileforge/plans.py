"""Shared geometry and growth-planning toolkit for the compilers.

Blocks and rectangular supertiles are described as a body rectangle plus
"teeth": per-bit bumps and dents along coded sides.  Each bit owns a 4-cell
segment of the side; the bump is the centered 2-cell, 1-deep protrusion.
On east/north sides a 1-bit is a bump and a 0-bit a dent; west/south sides
carry the complement, so equal codes interlock exactly.

Casts are one-tile-wide RNA rings traced clockwise around a footprint,
dipping into dents and wrapping bumps, with an outer "info bar" ring that
the path cooperates with while growing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import InvalidArgument, MalformedSpec
from .model import (
    Assembly,
    DIRECTIONS,
    EAST,
    Glue,
    Material,
    NORTH,
    NULL_GLUE,
    OPPOSITE,
    SOUTH,
    TileType,
    WEST,
)

SIDE_DIRS = {"N": NORTH, "E": EAST, "S": SOUTH, "W": WEST}


@dataclass(frozen=True)
class TeethSegment:
    """A coded run of teeth along one side: bit i sits at offset + 4*i."""

    offset: int
    code: str

    def __post_init__(self):
        if not self.code or any(c not in "01" for c in self.code):
            raise MalformedSpec(f"teeth code must be nonempty binary, got {self.code!r}")

    def span(self) -> Tuple[int, int]:
        return (self.offset, self.offset + 4 * len(self.code))

    def bump_cells(self) -> List[Tuple[int, str]]:
        """(along-side coordinate, bit) for the two bump/dent cells of each bit."""
        out = []
        for i, bit in enumerate(self.code):
            t = self.offset + 4 * i
            out.extend([(t + 1, bit), (t + 2, bit)])
        return out


def toothed_footprint(width: int, height: int,
                      sides: Dict[str, Sequence[TeethSegment]]) -> frozenset:
    """Body rectangle with per-side teeth applied.

    ``sides`` maps 'N'/'E'/'S'/'W' to teeth segments; offsets run along the
    side (x for N/S, y for E/W) in the body's local frame.
    """
    cells = {(x, y) for x in range(width) for y in range(height)}
    for side, segments in sides.items():
        for seg in segments:
            lo, hi = seg.span()
            limit = height if side in ("E", "W") else width
            if lo < 0 or hi > limit:
                raise MalformedSpec(f"teeth segment {seg} exceeds side length {limit}")
            for t, bit in seg.bump_cells():
                if side == "E":
                    if bit == "1":
                        cells.add((width, t))
                    else:
                        cells.discard((width - 1, t))
                elif side == "W":
                    if bit == "1":
                        cells.discard((0, t))
                    else:
                        cells.add((-1, t))
                elif side == "N":
                    if bit == "1":
                        cells.add((t, height))
                    else:
                        cells.discard((t, height - 1))
                else:  # S
                    if bit == "1":
                        cells.discard((t, 0))
                    else:
                        cells.add((t, -1))
    return frozenset(cells)


def pod_teeth_margin() -> int:
    """Cells reserved at each end of a coded side for the corner pieces."""
    return 6


def trace_ring(footprint: frozenset, start=None) -> List[Tuple[int, int]]:
    """Clockwise simple cycle of empty cells hugging ``footprint``.

    Keeps the footprint on the right, so the walk dips into dents and wraps
    bumps.  ``start`` must be an empty cell with a footprint cell directly
    north; by default the cell south of the lexicographically least (y, x)
    point is used.
    """
    if not footprint:
        raise InvalidArgument("cannot trace a ring around nothing")
    if start is None:
        y0, x0 = min((y, x) for x, y in footprint)
        start = (x0, y0 - 1)
    if start in footprint or (start[0], start[1] + 1) not in footprint:
        raise InvalidArgument(f"bad ring start {start}")
    heading = WEST
    path = [start]
    pos = start

    def right_of(d):
        return {WEST: NORTH, NORTH: EAST, EAST: SOUTH, SOUTH: WEST}[d]

    def left_of(d):
        return {WEST: SOUTH, SOUTH: EAST, EAST: NORTH, NORTH: WEST}[d]

    guard = 0
    limit = 20 * (len(footprint) + 16)
    while True:
        guard += 1
        if guard > limit:
            raise InvalidArgument("ring trace failed to close; footprint too exotic")
        for d in (right_of(heading), heading, left_of(heading), OPPOSITE[heading]):
            nxt = (pos[0] + d[0], pos[1] + d[1])
            if nxt not in footprint:
                heading = d
                pos = nxt
                break
        if pos == start:
            break
        path.append(pos)
    # sanity: simple cycle, adjacent steps, all cells outside the footprint
    if len(set(path)) != len(path):
        raise InvalidArgument("ring trace revisited a cell")
    for a, b in zip(path, path[1:] + [path[0]]):
        if abs(a[0] - b[0]) + abs(a[1] - b[1]) != 1:
            raise InvalidArgument("ring trace took a diagonal step")
    return path


def seam_contact_edges(cells_a: frozenset, cells_b: frozenset) -> List[Tuple]:
    """Lattice edges between two disjoint cell sets, as (a, b, dir_a_to_b).

    Sorted deterministically; used to lay matching glue pairs across an
    interface between two supertiles.
    """
    out = []
    for b in cells_b:
        for d in DIRECTIONS:
            a = (b[0] + d[0], b[1] + d[1])
            if a in cells_a:
                out.append((a, b, OPPOSITE[d]))
    return sorted(out)


@dataclass
class CellSpec:
    material: Material
    label: Optional[str] = None


class UnitBuilder:
    """Accumulates cells, bonds and exterior glues for one growth unit,
    then materializes position-keyed tile types plus a seed."""

    def __init__(self, unit_id: str, temperature: int):
        self.unit_id = unit_id
        self.tau = temperature
        self.cells: Dict[Tuple[int, int], CellSpec] = {}
        self.bonds: List[Tuple[Tuple[int, int], Tuple[int, int], int, str]] = []
        self.exterior: Dict[Tuple[Tuple[int, int], Tuple[int, int]], Glue] = {}
        self.seed_pos: Optional[Tuple[int, int]] = None

    def add_cell(self, pos, material: Material, label: Optional[str] = None):
        if pos in self.cells:
            raise InvalidArgument(f"cell {pos} added twice in unit {self.unit_id}")
        self.cells[pos] = CellSpec(material, label)

    def add_bond(self, a, b, strength: int, label: str):
        if abs(a[0] - b[0]) + abs(a[1] - b[1]) != 1:
            raise InvalidArgument(f"bond between non-adjacent cells {a} {b}")
        self.bonds.append((a, b, strength, label))

    def add_exterior(self, pos, direction, glue: Glue):
        key = (pos, direction)
        if key in self.exterior:
            raise InvalidArgument(f"two exterior glues on {pos} {direction}")
        self.exterior[key] = glue

    def name_of(self, pos) -> str:
        return f"{self.unit_id}.{pos[0]}.{pos[1]}"

    def build(self) -> Tuple[List[TileType], Dict]:
        """Returns (tile types, seed placements)."""
        faces: Dict[Tuple[int, int], Dict] = {p: {} for p in self.cells}
        for a, b, strength, label in self.bonds:
            if a not in self.cells or b not in self.cells:
                raise InvalidArgument(f"bond references missing cell: {a} {b}")
            d = (b[0] - a[0], b[1] - a[1])
            glue = Glue(label, strength)
            for pos, face in ((a, d), (b, OPPOSITE[d])):
                if face in faces[pos]:
                    raise InvalidArgument(f"two glues on {pos} face {face}")
                faces[pos][face] = glue
        for (pos, direction), glue in self.exterior.items():
            # the face may abut another cell of the unit: that is the
            # designed glue mismatch between a block face and its mold,
            # or the mirrored mold glue that feeds growth through it
            if pos not in self.cells:
                raise InvalidArgument(f"exterior glue on missing cell {pos}")
            if direction in faces[pos]:
                raise InvalidArgument(f"face clash at {pos} {direction}")
            faces[pos][direction] = glue
        tiles = []
        for pos in sorted(self.cells):
            spec = self.cells[pos]
            f = faces[pos]
            tiles.append(TileType(
                self.name_of(pos),
                north=f.get(NORTH, NULL_GLUE),
                east=f.get(EAST, NULL_GLUE),
                south=f.get(SOUTH, NULL_GLUE),
                west=f.get(WEST, NULL_GLUE),
                material=spec.material,
                display_label=spec.label,
            ))
        if self.seed_pos is None:
            raise InvalidArgument(f"unit {self.unit_id} has no seed")
        seed = {self.seed_pos: self.name_of(self.seed_pos)}
        return tiles, seed

    def dna_cells(self) -> List[Tuple[int, int]]:
        return sorted(p for p, s in self.cells.items() if s.material is Material.DNA)


def plan_partial_growth(builder: UnitBuilder, cells: Iterable[Tuple[int, int]],
                        seed, key: str, strength_scale: int = 1):
    """Connect ``cells`` with growth-input bonds only (partial connectivity).

    BFS from the seed; a cell with two already-reachable neighbors gets two
    cooperative strength-1 bonds (south/west preferred), a cell with one gets
    a single strength-2 bond.
    """
    remaining = set(cells)
    if seed not in remaining:
        raise InvalidArgument("seed must be one of the planned cells")
    placed = {seed}
    remaining.discard(seed)
    while remaining:
        progress = False
        for pos in sorted(remaining, key=lambda p: (p[1], p[0])):
            nbrs = []
            for d in (SOUTH, WEST, NORTH, EAST):
                q = (pos[0] + d[0], pos[1] + d[1])
                if q in placed:
                    nbrs.append(q)
            if not nbrs:
                continue
            if len(nbrs) >= 2:
                for q in nbrs[:2]:
                    builder.add_bond(pos, q, 1 * strength_scale,
                                     f"{key}:{pos[0]}:{pos[1]}:{q[0]}:{q[1]}")
            else:
                q = nbrs[0]
                builder.add_bond(pos, q, 2 * strength_scale,
                                 f"{key}:{pos[0]}:{pos[1]}:{q[0]}:{q[1]}")
            placed.add(pos)
            remaining.discard(pos)
            progress = True
        if not progress:
            stray = sorted(remaining)[0]
            raise InvalidArgument(f"growth plan cannot reach {stray}")


def plan_full_bonds(builder: UnitBuilder, cells: Iterable[Tuple[int, int]],
                    key: str, strength: int = 1):
    """Bond every internal adjacency (full connectivity inside the unit)."""
    cellset = set(cells)
    for pos in sorted(cellset):
        for d in (EAST, NORTH):
            q = (pos[0] + d[0], pos[1] + d[1])
            if q in cellset:
                builder.add_bond(pos, q, strength,
                                 f"{key}:{pos[0]}:{pos[1]}:{q[0]}:{q[1]}")


def build_apron(builder: UnitBuilder, footprint: frozenset, width: int,
                anchor_x: int, scale: int = 1) -> List[Tuple[int, int]]:
    """RNA keeper row under a block, detouring beneath south teeth bumps.

    Prevents block-to-block attachment before the RNase stage by colliding
    with any would-be partner; a single strength-2 bond at ``anchor_x`` ties
    it to the block.  Returns the apron cells in chain order.
    """
    path = []
    x = -2
    y = -1
    while x <= width + 1:
        if (x, y) in footprint:  # a south bump: duck under it
            if path and path[-1][1] == -1:
                path.append((path[-1][0], -2))
            path.append((x, -2))
        else:
            if path and path[-1][1] == -2 and path[-1][0] == x - 1:
                path.append((x, -2))
                path.append((x, -1))
            else:
                path.append((x, y))
        x += 1
    # dedupe while keeping order (the duck-under can emit the elbow twice)
    seen = set()
    chain = []
    for p in path:
        if p not in seen:
            seen.add(p)
            chain.append(p)
    for p in chain:
        builder.add_cell(p, Material.RNA)
    for i, (a, b) in enumerate(zip(chain, chain[1:])):
        builder.add_bond(a, b, 2 * scale, f"ap:{builder.unit_id}:{i}")
    anchor_cell = (anchor_x, -1)
    if anchor_cell not in seen or (anchor_x, 0) not in footprint:
        raise InvalidArgument(f"bad apron anchor column {anchor_x}")
    builder.add_bond(anchor_cell, (anchor_x, 0), 2 * scale, f"anchor:{builder.unit_id}")
    builder.seed_pos = chain[0]
    return chain


def build_cast(builder: UnitBuilder, footprint: frozenset,
               feed: Callable[[Tuple[int, int], Tuple[int, int], Tuple[int, int]], Optional[int]],
               scale: int = 1) -> Tuple[List, List]:
    """RNA cast around ``footprint``: an outer info-bar ring grows first as a
    chain, then the inner mold path grows clockwise, each cell cooperating
    with the bar beside it (strength 1 + 1) or riding the chain (strength 2)
    where the bars cannot reach (dent dips).

    The path starts at (0, -1), heads west, and closes the cycle along the
    south side, so the south-side feeds appear only once the ring is nearly
    complete; the block bulk is thereby gated on cast completion.

    ``feed(path_cell, dna_cell, direction)`` returns a bond strength for
    cast-to-block glues, or None for a deliberate mismatch.  Returns
    (path cells in order, bar cells in order).
    """
    uid = builder.unit_id
    path = trace_ring(footprint, start=(0, -1))
    bars = trace_ring(footprint | set(path))
    for p in bars:
        builder.add_cell(p, Material.RNA)
    for i, (a, b) in enumerate(zip(bars, bars[1:])):
        builder.add_bond(a, b, 2 * scale, f"bar:{uid}:{i}")
    barset = set(bars)
    for p in path:
        builder.add_cell(p, Material.RNA)
    prev = None
    for i, p in enumerate(path):
        bar_nbr = None
        for d in DIRECTIONS:
            q = (p[0] + d[0], p[1] + d[1])
            if q in barset:
                bar_nbr = q
                break
        if prev is None:
            # the start cell hangs off the bar ring alone
            if bar_nbr is None:
                raise InvalidArgument("cast start cell has no bar neighbor")
            builder.add_bond(p, bar_nbr, 2 * scale, f"cast:{uid}:start")
        elif bar_nbr is not None:
            builder.add_bond(p, prev, 1 * scale, f"cast:{uid}:{i}")
            builder.add_bond(p, bar_nbr, 1 * scale, f"coop:{uid}:{i}")
        else:
            builder.add_bond(p, prev, 2 * scale, f"cast:{uid}:{i}")
        prev = p
    for p in path:
        for d in (NORTH, EAST, WEST, SOUTH):
            q = (p[0] + d[0], p[1] + d[1])
            if q in footprint:
                s = feed(p, q, d)
                if s:
                    builder.add_bond(p, q, s, f"mold:{uid}:{p[0]}:{p[1]}:{q[0]}:{q[1]}")
    builder.seed_pos = bars[0]
    return path, bars


def default_cast_feed(path_cell, dna_cell, direction) -> Optional[int]:
    """Feed blocks only through north/east faces of the inner cast row."""
    if direction in (NORTH, EAST):
        return 1
    return None


@dataclass
class UnitRecord:
    """Manifest entry: everything needed to re-grow and audit one unit."""

    unit_id: str
    seed: Dict[str, str]                  # "x,y" -> tile name
    expected_cells: int
    dna_parts: List[Dict]                 # {"cells": [[x,y],...], "origin": [gx,gy]}
    exempt: List[str] = field(default_factory=list)
    last_cast: Optional[str] = None
    audit_top_rows: List[int] = field(default_factory=list)


@dataclass
class Manifest:
    """Sidecar metadata emitted with every compiled system."""

    kind: str
    temperature: int
    scale: int
    target_points: List[List[int]]
    units: List[UnitRecord]
    purge_singletons: bool = False
    notes: Dict[str, object] = field(default_factory=dict)
    expected_labels: Dict[str, str] = field(default_factory=dict)  # "x,y" -> 0/1

    def to_json(self) -> str:
        payload = {
            "kind": self.kind,
            "temperature": self.temperature,
            "scale": self.scale,
            "target_points": self.target_points,
            "purge_singletons": self.purge_singletons,
            "notes": self.notes,
            "expected_labels": self.expected_labels,
            "units": [
                {
                    "unit_id": u.unit_id,
                    "seed": u.seed,
                    "expected_cells": u.expected_cells,
                    "dna_parts": u.dna_parts,
                    "exempt": u.exempt,
                    "last_cast": u.last_cast,
                    "audit_top_rows": u.audit_top_rows,
                }
                for u in self.units
            ],
        }
        return json.dumps(payload, indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Manifest":
        raw = json.loads(text)
        units = [UnitRecord(
            unit_id=u["unit_id"],
            seed=u["seed"],
            expected_cells=u["expected_cells"],
            dna_parts=u["dna_parts"],
            exempt=u.get("exempt", []),
            last_cast=u.get("last_cast"),
            audit_top_rows=u.get("audit_top_rows", []),
        ) for u in raw["units"]]
        return cls(
            kind=raw["kind"],
            temperature=raw["temperature"],
            scale=raw["scale"],
            target_points=raw["target_points"],
            units=units,
            purge_singletons=raw.get("purge_singletons", False),
            notes=raw.get("notes", {}),
            expected_labels=raw.get("expected_labels", {}),
        )

    def seed_assembly(self, unit: UnitRecord) -> Assembly:
        placements = {}
        for key, name in unit.seed.items():
            x, y = key.split(",")
            placements[(int(x), int(y))] = name
        return Assembly.of(placements, self.temperature)


def seed_to_json(placements: Dict) -> Dict[str, str]:
    return {f"{x},{y}": name for (x, y), name in sorted(placements.items())}
