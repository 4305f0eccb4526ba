"""tileforge: compile shapes and patterns into staged RNA/DNA tile systems,
simulate two-handed assembly with RNase break steps, and verify the results.
"""

from .model import (
    Assembly,
    Glue,
    Material,
    NULL_GLUE,
    Shape,
    StageDirective,
    TileSystem,
    TileType,
    binding_graph,
    block_bit_width,
    block_side,
    is_stable,
    scale_shape,
)
from .engine import (
    Bounds,
    SupertileSet,
    apply_break,
    combine,
    enumerate_producible,
    explore_orders,
    run_stages,
    seeded_grow,
    terminal_supertiles,
)

__all__ = [
    "Assembly",
    "Bounds",
    "Glue",
    "Material",
    "NULL_GLUE",
    "Shape",
    "StageDirective",
    "SupertileSet",
    "TileSystem",
    "TileType",
    "apply_break",
    "binding_graph",
    "block_bit_width",
    "block_side",
    "combine",
    "enumerate_producible",
    "explore_orders",
    "is_stable",
    "run_stages",
    "scale_shape",
    "seeded_grow",
    "terminal_supertiles",
]

__version__ = "0.1.0"
