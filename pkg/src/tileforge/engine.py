"""Two-handed assembly engine: combination, producibility, stages, RNase.

The engine works on canonicalized assemblies.  Combination of two supertiles
searches only translations that put at least one positive-strength glue pair
face to face, which is sound because an attachment needs total new bond
strength >= tau >= 1.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

from .errors import InvalidArgument, NondeterministicAttachment, NoProgress
from .model import (
    Assembly,
    BindingGraph,
    DIRECTIONS,
    DIR_NAMES,
    Material,
    OPPOSITE,
    TileSystem,
    binding_graph,
    glue_interaction,
)
from . import cuts

DEFAULT_MAX_SUPERTILES = 4000
DEFAULT_MAX_SIZE = 100_000


@dataclass(frozen=True)
class Bounds:
    """Enumeration limits; hitting one flags (but does not fail) the result."""

    max_supertiles: int = DEFAULT_MAX_SUPERTILES
    max_size: int = DEFAULT_MAX_SIZE

    @classmethod
    def default(cls) -> "Bounds":
        env = os.environ.get("TILEFORGE_MAX_SUPERTILES")
        if env:
            return cls(max_supertiles=int(env))
        return cls()

    def __post_init__(self):
        if self.max_supertiles <= 0 or self.max_size <= 0:
            raise InvalidArgument("bounds must be positive")


@dataclass
class SupertileSet:
    """A translation-deduplicated set of assemblies from one stage."""

    assemblies: List[Assembly]
    stage_index: int = 0
    truncated: bool = False
    lower_confidence: bool = False

    def __len__(self):
        return len(self.assemblies)

    def sorted(self) -> List[Assembly]:
        return sorted(self.assemblies, key=lambda a: sorted(a.canonical().placements.items()))


def _exposed_glues(a: Assembly, by_name):
    """All (position, direction, glue) with positive strength facing empty cells."""
    out = []
    for (x, y), name in a.placements.items():
        tile = by_name[name]
        for d in DIRECTIONS:
            q = (x + d[0], y + d[1])
            if q in a.placements:
                continue
            g = tile.glue(d)
            if g.strength > 0:
                out.append(((x, y), d, g))
    return out


def _interface_strength(a: Assembly, b_placed: Dict, by_name) -> int:
    """Total bond strength across the interface between ``a`` and ``b_placed``."""
    total = 0
    for (x, y), bn in b_placed.items():
        bt = by_name[bn]
        for d in DIRECTIONS:
            q = (x + d[0], y + d[1])
            an = a.placements.get(q)
            if an is None:
                continue
            total += glue_interaction(bt.glue(d), by_name[an].glue(OPPOSITE[d]))
    return total


def combine(a: Assembly, b: Assembly, tau: int, tiles=None) -> List[Assembly]:
    """All tau-stable unions of ``a`` with a translate of ``b``, canonicalized.

    ``tiles`` may be a TileSystem, a mapping, or an iterable of tile types;
    when omitted it must be recoverable from the assemblies' systems.
    """
    by_name = _tiles_by_name(tiles)
    a = a.canonical()
    b = b.canonical()
    ga = _exposed_glues(a, by_name)
    gb = _exposed_glues(b, by_name)
    index_b: Dict[Tuple[str, Tuple[int, int]], List[Tuple[int, int]]] = {}
    for pos, d, g in gb:
        index_b.setdefault((g.label, d), []).append(pos)
    offsets = set()
    for (pa, d, g) in ga:
        for pb in index_b.get((g.label, OPPOSITE[d]), ()):
            # place b so that pb lands adjacent to pa in direction d
            offsets.add((pa[0] + d[0] - pb[0], pa[1] + d[1] - pb[1]))
    results = {}
    afp = a.footprint()
    for off in sorted(offsets):
        placed = {(x + off[0], y + off[1]): n for (x, y), n in b.placements.items()}
        if any(p in afp for p in placed):
            continue
        if _interface_strength(a, placed, by_name) >= tau:
            merged = dict(a.placements)
            merged.update(placed)
            res = Assembly.of(merged, tau).canonical()
            results[res.key()] = res
    return [results[k] for k in sorted(results, key=lambda k: sorted(k[1]))]


def _tiles_by_name(tiles):
    if isinstance(tiles, TileSystem):
        return tiles.by_name()
    if isinstance(tiles, dict):
        return tiles
    if tiles is None:
        raise InvalidArgument("a tile set is required")
    return {t.name: t for t in tiles}


def enumerate_producible(system: TileSystem, bounds: Optional[Bounds] = None,
                         pool: Optional[Iterable[Assembly]] = None,
                         tile_names: Optional[Iterable[str]] = None) -> SupertileSet:
    """Close a pool of supertiles under tau-stable combination.

    With no explicit ``pool``, starts from singletons of the first addition
    stage (or of ``tile_names`` when given).  Truncation at either bound is
    reported on the result, never raised.
    """
    bounds = bounds or Bounds.default()
    by_name = system.by_name()
    tau = system.temperature
    if pool is None:
        if tile_names is None:
            tile_names = system.stages[0].tile_names
        pool = [Assembly.of({(0, 0): n}, tau) for n in sorted(tile_names)]
    known: Dict = {}
    work: List[Assembly] = []
    truncated = False
    for a in pool:
        c = a.canonical()
        if c.key() not in known:
            known[c.key()] = c
            work.append(c)
    i = 0
    order = list(work)
    while i < len(order):
        cur = order[i]
        i += 1
        snapshot = list(order[: len(order)])
        for other in snapshot:
            for res in combine(cur, other, tau, by_name):
                if len(res) > bounds.max_size:
                    truncated = True
                    continue
                if res.key() not in known:
                    if len(known) >= bounds.max_supertiles:
                        truncated = True
                        continue
                    known[res.key()] = res
                    order.append(res)
    return SupertileSet(assemblies=sorted(known.values(), key=lambda a: sorted(a.placements.items())),
                        truncated=truncated)


def terminal_supertiles(s: SupertileSet, tau: int, tiles) -> SupertileSet:
    """Members of ``s`` that admit no combination with any member (or themselves)."""
    by_name = _tiles_by_name(tiles)
    terminals = []
    for a in s.assemblies:
        attachable = False
        for b in s.assemblies:
            if combine(a, b, tau, by_name):
                attachable = True
                break
        if not attachable:
            terminals.append(a)
    return SupertileSet(assemblies=terminals, stage_index=s.stage_index,
                        truncated=s.truncated, lower_confidence=s.truncated)


def apply_break(a: Assembly, tiles, tau: int) -> List[Assembly]:
    """RNase step: drop RNA tiles, then split into maximal tau-stable parts.

    Returns the multiset of parts (empty when everything was RNA).  Splitting
    runs connected components first, then repeatedly severs any cut of weight
    below tau; the final multiset is order-independent.
    """
    by_name = _tiles_by_name(tiles)
    remaining = {p: n for p, n in a.placements.items()
                 if by_name[n].material is Material.DNA}
    if not remaining:
        return []
    parts: List[Dict] = []
    queue: List[Dict] = _components(remaining)
    while queue:
        part = queue.pop()
        if len(part) == 1:
            parts.append(part)
            continue
        sub = Assembly(part, tau)
        g = binding_graph(sub, by_name)
        if not g.is_connected():
            queue.extend(_components_of_graph(part, g))
            continue
        w, side = cuts.find_weak_cut(g, tau)
        if w is None:
            parts.append(part)
        else:
            inside = {p: n for p, n in part.items() if p in side}
            outside = {p: n for p, n in part.items() if p not in side}
            queue.extend(_components(inside))
            queue.extend(_components(outside))
    out = [Assembly.of(p, tau).canonical() for p in parts]
    return sorted(out, key=lambda x: (len(x), sorted(x.placements.items())))


def _components(placements: Dict) -> List[Dict]:
    left = dict(placements)
    comps = []
    while left:
        start = sorted(left)[0]
        stack = [start]
        comp = {}
        while stack:
            p = stack.pop()
            if p not in left:
                continue
            comp[p] = left.pop(p)
            x, y = p
            for dx, dy in DIRECTIONS:
                q = (x + dx, y + dy)
                if q in left:
                    stack.append(q)
        comps.append(comp)
    return comps


def _components_of_graph(placements: Dict, g: BindingGraph) -> List[Dict]:
    """Split placements along the binding graph's connected components."""
    left = set(placements)
    comps = []
    while left:
        start = sorted(left)[0]
        stack = [start]
        comp = {}
        while stack:
            v = stack.pop()
            if v not in left:
                continue
            left.discard(v)
            comp[v] = placements[v]
            for u, _w in g.adj[v]:
                if u in left:
                    stack.append(u)
        comps.append(comp)
    return comps


def break_oracle(a: Assembly, tiles, tau: int) -> List[Assembly]:
    """Brute-force RNase oracle: explore every minimum-cut split order.

    Asserts that all split orders yield the same multiset, then returns it.
    Only for small assemblies.
    """
    by_name = _tiles_by_name(tiles)
    remaining = {p: n for p, n in a.placements.items()
                 if by_name[n].material is Material.DNA}
    if not remaining:
        return []

    def settle(part: Dict) -> List[List[Dict]]:
        if len(part) == 1:
            return [[part]]
        g = binding_graph(Assembly(part, tau), by_name)
        if not g.is_connected():
            outcomes = [[]]
            for comp in _components_of_graph(part, g):
                new = []
                for tail in settle(comp):
                    for prefix in outcomes:
                        new.append(prefix + tail)
                outcomes = new
            return outcomes
        w, _ = cuts.stoer_wagner(g)
        if w >= tau:
            return [[part]]
        # enumerate every minimum cut by brute force and recurse on each
        verts = sorted(part)
        outcomes = []
        from itertools import combinations
        anchor = verts[0]
        for r in range(0, len(verts)):
            for extra in combinations(verts[1:], r):
                side = {anchor, *extra}
                weight = sum(wt for e, wt in g.edges.items()
                             if len(e & side) == 1)
                if weight != w:
                    continue
                inside = {p: n for p, n in part.items() if p in side}
                outside = {p: n for p, n in part.items() if p not in side}
                for left in settle_all(_components(inside)):
                    for right in settle_all(_components(outside)):
                        outcomes.append(left + right)
        return outcomes

    def settle_all(parts: List[Dict]) -> List[List[Dict]]:
        outcomes = [[]]
        for p in parts:
            new = []
            for tail in settle(p):
                for prefix in outcomes:
                    new.append(prefix + tail)
            outcomes = new
        return outcomes

    def signature(parts: List[Dict]):
        return tuple(sorted(
            tuple(sorted(Assembly(p, tau).canonical().placements.items()))
            for p in parts))

    all_outcomes = settle_all(_components(remaining))
    sigs = {signature(o) for o in all_outcomes}
    assert len(sigs) == 1, f"RNase split is order-dependent: {len(sigs)} outcomes"
    chosen = all_outcomes[0]
    out = [Assembly.of(p, tau).canonical() for p in chosen]
    return sorted(out, key=lambda x: (len(x), sorted(x.placements.items())))


def run_stages(system: TileSystem, bounds: Optional[Bounds] = None) -> List[SupertileSet]:
    """Execute the stage script; returns the terminal set after each stage.

    ADD stages union new singletons into the pool, close under combination
    and keep terminals.  BREAK stages apply the RNase step to every pool
    member (dropping fully dissolved ones, and single tiles when the system
    purges singletons), then re-close and keep terminals.
    """
    bounds = bounds or Bounds.default()
    by_name = system.by_name()
    tau = system.temperature
    pool: List[Assembly] = []
    out: List[SupertileSet] = []
    for idx, stage in enumerate(system.stages):
        if stage.kind == "add":
            singles = [Assembly.of({(0, 0): n}, tau) for n in sorted(stage.tile_names)]
            pool = pool + singles
        else:
            broken: List[Assembly] = []
            for a in pool:
                for part in apply_break(a, by_name, tau):
                    if system.purge_singletons and len(part) == 1:
                        continue
                    broken.append(part)
            pool = broken
        closed = enumerate_producible(system, bounds, pool=pool)
        term = terminal_supertiles(closed, tau, by_name)
        term.stage_index = idx
        out.append(term)
        pool = list(term.assemblies)
    return out


@dataclass
class GrowthTrace:
    """Order of attachments during seeded growth, for audits."""

    steps: List[Tuple[Tuple[int, int], str, Tuple[str, ...]]] = field(default_factory=list)

    def index_of(self, name: str) -> int:
        for i, (_, n, _) in enumerate(self.steps):
            if n == name:
                return i
        return -1


def seeded_grow(system: TileSystem, seed: Assembly, max_steps: int = 1_000_000,
                expected_size: Optional[int] = None,
                withhold: Iterable[str] = (),
                confluent_ok: bool = True) -> Tuple[Assembly, GrowthTrace]:
    """Grow ``seed`` by single-tile attachments of total strength >= tau.

    Deterministic for compiled systems: raises NondeterministicAttachment if
    two genuinely different tile types compete for one position (identical
    glue/label twins are accepted as confluent when ``confluent_ok``).
    Raises NoProgress if growth stalls below ``expected_size``.
    """
    by_name = system.by_name()
    tau = system.temperature
    withheld = set(withhold)
    # index tile types by (direction, label) of their positive glues
    index: Dict[Tuple[Tuple[int, int], str], List] = {}
    for t in system.tiles:
        if t.name in withheld:
            continue
        for d in DIRECTIONS:
            g = t.glue(d)
            if g.strength > 0:
                index.setdefault((d, g.label), []).append(t)

    placements = dict(seed.placements)

    def fits_at(pos):
        cands = {}
        for d in DIRECTIONS:
            npos = (pos[0] + d[0], pos[1] + d[1])
            name = placements.get(npos)
            if name is None:
                continue
            ng = by_name[name].glue(OPPOSITE[d])
            if ng.strength == 0:
                continue
            for t in index.get((d, ng.label), ()):
                cands[t.name] = t
        fits = []
        for t in sorted(cands.values(), key=lambda t: t.name):
            total = 0
            sides = []
            for d in DIRECTIONS:
                npos = (pos[0] + d[0], pos[1] + d[1])
                name = placements.get(npos)
                if name is None:
                    continue
                w = glue_interaction(t.glue(d), by_name[name].glue(OPPOSITE[d]))
                if w:
                    total += w
                    sides.append(DIR_NAMES[d])
            if total >= tau:
                fits.append((t, tuple(sorted(sides))))
        return fits

    trace = GrowthTrace()
    frontier = set()
    for (x, y) in placements:
        for dx, dy in DIRECTIONS:
            q = (x + dx, y + dy)
            if q not in placements:
                frontier.add(q)
    steps = 0
    progress = True
    while progress and steps < max_steps:
        progress = False
        for pos in sorted(frontier):
            if pos in placements:
                continue
            fits = fits_at(pos)
            if not fits:
                continue
            if len(fits) > 1:
                distinct = {(t.north, t.east, t.south, t.west, t.display_label)
                            for t, _ in fits}
                if len(distinct) > 1 or not confluent_ok:
                    raise NondeterministicAttachment(pos, [t.name for t, _ in fits])
            tile, sides = fits[0]
            placements[pos] = tile.name
            trace.steps.append((pos, tile.name, sides))
            for dx, dy in DIRECTIONS:
                q = (pos[0] + dx, pos[1] + dy)
                if q not in placements:
                    frontier.add(q)
            steps += 1
            progress = True
        frontier = {p for p in frontier if p not in placements}
    grown = Assembly.of(placements, tau)
    if expected_size is not None and len(grown) < expected_size:
        raise NoProgress(
            f"growth stalled at {len(grown)} of {expected_size} tiles")
    return grown, trace


def explore_orders(system: TileSystem, start: Assembly,
                   positions: Optional[Iterable[Tuple[int, int]]] = None,
                   max_states: int = 200_000) -> Tuple[List[Assembly], int]:
    """Exhaustively explore single-tile attachment orders from ``start``.

    Restricted to ``positions`` when given.  Returns (distinct terminal
    assemblies, number of states visited).  Used for confluence audits.
    """
    by_name = system.by_name()
    tau = system.temperature
    allowed = set(positions) if positions is not None else None
    index: Dict[Tuple[Tuple[int, int], str], List] = {}
    for t in system.tiles:
        for d in DIRECTIONS:
            g = t.glue(d)
            if g.strength > 0:
                index.setdefault((d, g.label), []).append(t)

    def moves(placements):
        out = []
        seen_pos = set()
        for (x, y) in placements:
            for dx, dy in DIRECTIONS:
                pos = (x + dx, y + dy)
                if pos in placements or pos in seen_pos:
                    continue
                seen_pos.add(pos)
                if allowed is not None and pos not in allowed:
                    continue
                cands = {}
                for d in DIRECTIONS:
                    npos = (pos[0] + d[0], pos[1] + d[1])
                    name = placements.get(npos)
                    if name is None:
                        continue
                    ng = by_name[name].glue(OPPOSITE[d])
                    if ng.strength:
                        for t in index.get((d, ng.label), ()):
                            cands[t.name] = t
                for t in cands.values():
                    total = 0
                    for d in DIRECTIONS:
                        npos = (pos[0] + d[0], pos[1] + d[1])
                        name = placements.get(npos)
                        if name is not None:
                            total += glue_interaction(t.glue(d), by_name[name].glue(OPPOSITE[d]))
                    if total >= tau:
                        out.append((pos, t.name))
        return sorted(out)

    start_state = frozenset(start.placements.items())
    seen = {start_state}
    stack = [start_state]
    terminals = {}
    visited = 0
    while stack:
        state = stack.pop()
        visited += 1
        if visited > max_states:
            raise InvalidArgument(f"order exploration exceeded {max_states} states")
        placements = dict(state)
        ms = moves(placements)
        if not ms:
            a = Assembly.of(placements, tau)
            terminals[a.key()] = a
            continue
        for pos, name in ms:
            nxt = frozenset(list(state) + [(pos, name)])
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return sorted(terminals.values(), key=lambda a: sorted(a.placements.items())), visited
