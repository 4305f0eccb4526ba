"""Core domain model: glues, tiles, shapes, assemblies, systems, stability.

Everything here is an immutable value; operations are pure functions.
Conventions used throughout the package:

* coordinates are (x, y) integer pairs, y grows northward;
* glues interact iff their labels are equal and both strengths are positive;
* the null glue is the unique strength-0 glue with the empty label, and any
  strength-0 glue normalizes to it;
* assemblies are identified up to translation via ``Assembly.canonical``,
  which shifts the minimum corner to (0, 0).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from .errors import InvalidArgument, MissingTileType

# Unit vectors, named by compass direction.
NORTH = (0, 1)
EAST = (1, 0)
SOUTH = (0, -1)
WEST = (-1, 0)
DIRECTIONS = (NORTH, EAST, SOUTH, WEST)
DIR_NAMES = {NORTH: "N", EAST: "E", SOUTH: "S", WEST: "W"}
NAME_DIRS = {v: k for k, v in DIR_NAMES.items()}
OPPOSITE = {NORTH: SOUTH, SOUTH: NORTH, EAST: WEST, WEST: EAST}

ALLOWED_STRENGTHS = (0, 1, 2, 4)


@dataclass(frozen=True, order=True)
class Glue:
    """One side of a tile: a label plus a bond strength."""

    label: str
    strength: int

    def __post_init__(self):
        if self.strength not in ALLOWED_STRENGTHS:
            raise InvalidArgument(f"glue strength must be one of {ALLOWED_STRENGTHS}, got {self.strength}")
        if self.strength == 0 and self.label != "":
            # Strength-0 glues all normalize to the null glue.
            object.__setattr__(self, "label", "")
        if self.strength > 0 and self.label == "":
            raise InvalidArgument("positive-strength glue needs a nonempty label")


NULL_GLUE = Glue("", 0)


def glue_interaction(a: Glue, b: Glue) -> int:
    """Bond strength between two abutting glues (0 when they do not interact)."""
    if a.strength > 0 and b.strength > 0 and a.label == b.label:
        return min(a.strength, b.strength)
    return 0


class Material(Enum):
    DNA = "DNA"
    RNA = "RNA"


@dataclass(frozen=True)
class TileType:
    """A unit square with four glues, a material, and an optional 0/1 label."""

    name: str
    north: Glue = NULL_GLUE
    east: Glue = NULL_GLUE
    south: Glue = NULL_GLUE
    west: Glue = NULL_GLUE
    material: Material = Material.DNA
    display_label: Optional[str] = None

    def __post_init__(self):
        if not self.name or any(ch.isspace() for ch in self.name):
            raise InvalidArgument(f"bad tile name {self.name!r}")
        if self.display_label is not None and self.display_label not in ("0", "1"):
            raise InvalidArgument(f"display label must be '0' or '1', got {self.display_label!r}")

    def glue(self, direction) -> Glue:
        if direction == NORTH:
            return self.north
        if direction == EAST:
            return self.east
        if direction == SOUTH:
            return self.south
        if direction == WEST:
            return self.west
        raise InvalidArgument(f"not a direction: {direction}")

    def glues(self):
        return {NORTH: self.north, EAST: self.east, SOUTH: self.south, WEST: self.west}


def _connected_component(points: frozenset, start) -> set:
    seen = {start}
    stack = [start]
    while stack:
        x, y = stack.pop()
        for dx, dy in DIRECTIONS:
            q = (x + dx, y + dy)
            if q in points and q not in seen:
                seen.add(q)
                stack.append(q)
    return seen


@dataclass(frozen=True)
class Shape:
    """A finite set of lattice points whose full grid graph is connected."""

    points: frozenset

    @classmethod
    def of(cls, points: Iterable) -> "Shape":
        pts = frozenset((int(x), int(y)) for x, y in points)
        if not pts:
            raise InvalidArgument("a shape needs at least one point")
        comp = _connected_component(pts, next(iter(sorted(pts))))
        if comp != pts:
            stray = sorted(pts - comp)[0]
            raise InvalidArgument(f"shape is disconnected: point {stray} is not reachable")
        return cls(pts)

    def __len__(self):
        return len(self.points)

    def __iter__(self) -> Iterator:
        return iter(sorted(self.points))

    def __contains__(self, p):
        return p in self.points

    def bounding_box(self):
        xs = [p[0] for p in self.points]
        ys = [p[1] for p in self.points]
        return (min(xs), min(ys), max(xs), max(ys))

    def normalized(self) -> "Shape":
        """Translate so the bounding-box corner sits at (0, 0)."""
        x0, y0, _, _ = self.bounding_box()
        return Shape(frozenset((x - x0, y - y0) for x, y in self.points))

    def adjacency_count(self) -> int:
        """Number of adjacent point pairs (edges of the full grid graph)."""
        return sum(
            1
            for (x, y) in self.points
            for d in (EAST, NORTH)
            if (x + d[0], y + d[1]) in self.points
        )


def scale_shape(s: Shape, c: int) -> Shape:
    """Replace every point of ``s`` with a c-by-c block of points."""
    if c <= 0:
        raise InvalidArgument(f"scale factor must be positive, got {c}")
    pts = set()
    for x, y in s.points:
        for dx in range(c):
            for dy in range(c):
                pts.add((x * c + dx, y * c + dy))
    return Shape(frozenset(pts))


@dataclass(frozen=True)
class Assembly:
    """A connected placement of tiles on the lattice at some temperature."""

    placements: Mapping
    temperature: int

    @classmethod
    def of(cls, placements: Mapping, temperature: int) -> "Assembly":
        pl = dict(placements)
        if pl:
            pts = frozenset(pl)
            comp = _connected_component(pts, next(iter(sorted(pts))))
            if comp != pts:
                stray = sorted(pts - comp)[0]
                raise InvalidArgument(f"assembly domain is disconnected at {stray}")
        return cls(pl, temperature)

    def __len__(self):
        return len(self.placements)

    def footprint(self) -> frozenset:
        return frozenset(self.placements)

    def translate(self, dx: int, dy: int) -> "Assembly":
        return Assembly({(x + dx, y + dy): n for (x, y), n in self.placements.items()}, self.temperature)

    def canonical(self) -> "Assembly":
        """The lexicographically least translate: min corner at (0, 0)."""
        if not self.placements:
            return self
        xs = [p[0] for p in self.placements]
        ys = [p[1] for p in self.placements]
        return self.translate(-min(xs), -min(ys))

    def key(self):
        """Hashable identity of the canonical form."""
        c = self.canonical()
        return (self.temperature, frozenset(c.placements.items()))

    def sorted_items(self):
        return sorted(self.placements.items())

    def materials(self, tiles_by_name) -> set:
        return {tiles_by_name[n].material for n in self.placements.values()}


class BindingGraph:
    """Weighted grid graph induced by an assembly's interacting glue pairs."""

    def __init__(self, vertices: Sequence, edges: Mapping):
        self.vertices = list(vertices)
        self.edges = dict(edges)  # frozenset({p, q}) -> weight
        self.adj = {v: [] for v in self.vertices}
        for e, w in self.edges.items():
            p, q = tuple(e)
            self.adj[p].append((q, w))
            self.adj[q].append((p, w))

    def weight(self, p, q) -> int:
        return self.edges.get(frozenset((p, q)), 0)

    def is_connected(self) -> bool:
        if not self.vertices:
            return True
        seen = {self.vertices[0]}
        stack = [self.vertices[0]]
        while stack:
            v = stack.pop()
            for u, _ in self.adj[v]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        return len(seen) == len(self.vertices)


def binding_graph(a: Assembly, tiles) -> BindingGraph:
    """Build the weighted binding graph of ``a`` over tile set ``tiles``.

    ``tiles`` may be a mapping name -> TileType or an iterable of TileType.
    """
    by_name = tiles if isinstance(tiles, Mapping) else {t.name: t for t in tiles}
    for name in a.placements.values():
        if name not in by_name:
            raise MissingTileType(f"assembly references unknown tile type {name!r}")
    edges = {}
    for (x, y), name in a.placements.items():
        tile = by_name[name]
        for d in (EAST, NORTH):
            q = (x + d[0], y + d[1])
            other = a.placements.get(q)
            if other is None:
                continue
            w = glue_interaction(tile.glue(d), by_name[other].glue(OPPOSITE[d]))
            if w > 0:
                edges[frozenset(((x, y), q))] = w
    return BindingGraph(sorted(a.placements), edges)


def is_stable(a: Assembly, tiles, tau: int) -> bool:
    """True iff every cut of the binding graph has weight at least ``tau``.

    A single tile is stable by convention; a disconnected binding graph is
    unstable (it admits a cut of weight zero).
    """
    if len(a) == 0:
        raise InvalidArgument("stability of an empty assembly is undefined")
    if len(a) == 1:
        return True
    g = binding_graph(a, tiles)
    if not g.is_connected():
        return False
    from .cuts import min_cut_at_least
    return min_cut_at_least(g, tau)


@dataclass(frozen=True)
class StageDirective:
    """One step of a stage script: add tile types, or run the RNase step."""

    kind: str  # "add" | "break"
    tile_names: tuple = ()

    def __post_init__(self):
        if self.kind not in ("add", "break"):
            raise InvalidArgument(f"unknown stage kind {self.kind!r}")
        if self.kind == "break" and self.tile_names:
            raise InvalidArgument("a break stage carries no payload")


@dataclass(frozen=True)
class TileSystem:
    """A tile set, a temperature, and an ordered stage script."""

    tiles: tuple
    temperature: int
    stages: tuple
    purge_singletons: bool = False
    manifest: Optional[object] = field(default=None, compare=False)

    @classmethod
    def of(cls, tiles, temperature, stages=None, purge_singletons=False, manifest=None):
        tiles = tuple(sorted(tiles, key=lambda t: t.name))
        names = [t.name for t in tiles]
        if len(set(names)) != len(names):
            dup = sorted(n for n in set(names) if names.count(n) > 1)[0]
            raise InvalidArgument(f"duplicate tile name {dup!r}")
        strengths = {}
        for t in tiles:
            for g in (t.north, t.east, t.south, t.west):
                if g.strength > 0:
                    if strengths.setdefault(g.label, g.strength) != g.strength:
                        raise InvalidArgument(f"glue label {g.label!r} used with two strengths")
        if stages is None:
            stages = (StageDirective("add", tuple(names)),)
        stages = tuple(stages)
        if not stages or stages[0].kind != "add":
            raise InvalidArgument("stage scripts begin with a tile addition stage")
        known = set(names)
        for s in stages:
            for n in s.tile_names:
                if n not in known:
                    raise MissingTileType(f"stage references unknown tile {n!r}")
        return cls(tiles, temperature, stages, purge_singletons, manifest)

    def by_name(self):
        return {t.name: t for t in self.tiles}

    def tile_count(self) -> int:
        return len(self.tiles)

    def break_count(self) -> int:
        return sum(1 for s in self.stages if s.kind == "break")


def block_bit_width(adjacency_count: int) -> int:
    """Bits needed to number ``adjacency_count`` distinct edges, plus one."""
    if adjacency_count <= 1:
        return 1
    return 1 + (adjacency_count - 1).bit_length()


def block_side(bit_width: int) -> int:
    """Side length of a compiled block: 4 tiles per bit, 6 per corner piece."""
    return 4 * bit_width + 12
