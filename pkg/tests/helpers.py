"""Shared builders for tests: little tile sets, random assemblies, oracles."""

import random

from tileforge.model import (
    Assembly,
    Glue,
    Material,
    NULL_GLUE,
    TileType,
    TileSystem,
)


def g(label, strength=1):
    return Glue(label, strength)


def tile(name, n=NULL_GLUE, e=NULL_GLUE, s=NULL_GLUE, w=NULL_GLUE,
         material=Material.DNA, label=None):
    return TileType(name, north=n, east=e, south=s, west=w,
                    material=material, display_label=label)


def square_2x2_system():
    """Four tiles that assemble exactly one 2x2 square at temperature 2.

    Horizontal bonds are strength 2, vertical bonds strength 1, so the two
    reachable intermediates are the bottom and top halves.
    """
    sw = tile("sw", n=g("vl"), e=g("hb", 2))
    se = tile("se", n=g("vr"), w=g("hb", 2))
    nw = tile("nw", s=g("vl"), e=g("ht", 2))
    ne = tile("ne", s=g("vr"), w=g("ht", 2))
    return TileSystem.of([sw, se, nw, ne], temperature=2)


def random_assembly(rng: random.Random, max_tiles=12, temperature=2):
    """A random connected assembly over a fresh random tile set.

    Glue labels are chosen from a small pool so bonds (and mismatches) are
    common; materials mix DNA and RNA.
    """
    n = rng.randint(1, max_tiles)
    cells = {(0, 0)}
    while len(cells) < n:
        x, y = rng.choice(sorted(cells))
        dx, dy = rng.choice([(0, 1), (1, 0), (0, -1), (-1, 0)])
        cells.add((x + dx, y + dy))
    labels = [f"L{i}" for i in range(rng.randint(1, 6))]
    strengths = {lab: rng.choice([1, 1, 2]) for lab in labels}
    tiles = []
    placements = {}
    for i, pos in enumerate(sorted(cells)):
        glues = {}
        for d in ["n", "e", "s", "w"]:
            if rng.random() < 0.75:
                lab = rng.choice(labels)
                glues[d] = Glue(lab, strengths[lab])
            else:
                glues[d] = NULL_GLUE
        mat = Material.RNA if rng.random() < 0.4 else Material.DNA
        t = tile(f"t{i}", n=glues["n"], e=glues["e"], s=glues["s"], w=glues["w"],
                 material=mat)
        tiles.append(t)
        placements[pos] = t.name
    system = TileSystem.of(tiles, temperature=temperature)
    return Assembly.of(placements, temperature), system


def stability_oracle(assembly, tiles, tau):
    """Exhaustive-bipartition stability check for small assemblies."""
    from tileforge.model import binding_graph
    from tileforge.cuts import brute_force_min_cut
    if len(assembly) == 1:
        return True
    graph = binding_graph(assembly, tiles)
    if not graph.is_connected():
        return False
    w, _ = brute_force_min_cut(graph)
    return w >= tau
