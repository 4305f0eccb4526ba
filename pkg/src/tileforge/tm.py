"""Deterministic single-tape Turing machines and their tile-set compilation.

The simulation is the classic temperature-2 row-per-step scheme: row y holds
the whole configuration after y steps; the cell above the head carries a
strength-2 glue naming (state, symbol), the next row grows outward from the
action tile it forces, and side walls keyed by row index keep everything in
a bounded ribbon.  All simulation tiles are RNA.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .errors import InvalidArgument, NonterminatingProgram
from .model import Assembly, Glue, Material, NULL_GLUE, TileType

BLANK = "."


@dataclass(frozen=True)
class TMProgram:
    """Transitions: (state, symbol) -> (state', written symbol, 'L' or 'R')."""

    transitions: Dict[Tuple[str, str], Tuple[str, str, str]]
    start: str
    halting: frozenset
    input_word: str = ""
    blank: str = BLANK

    def __post_init__(self):
        for (q, a), (q2, b, d) in self.transitions.items():
            if d not in ("L", "R"):
                raise InvalidArgument(f"move must be L or R in {(q, a)} -> {(q2, b, d)}")
            if q in self.halting:
                raise InvalidArgument(f"halting state {q!r} has outgoing transition")

    def symbols(self) -> List[str]:
        syms = {self.blank}
        syms.update(self.input_word)
        for (q, a), (q2, b, d) in self.transitions.items():
            syms.add(a)
            syms.add(b)
        return sorted(syms)


@dataclass
class TMRun:
    """Result of a bounded direct execution."""

    halted: bool
    steps: int
    tape: Dict[int, str]
    head: int
    state: str
    min_pos: int
    max_pos: int
    trace: List[Tuple[str, int]] = field(default_factory=list)

    def word(self, blank: str = BLANK) -> str:
        if not self.tape:
            return ""
        lo = min(self.tape)
        hi = max(self.tape)
        return "".join(self.tape.get(i, blank) for i in range(lo, hi + 1)).strip(blank)


def run_tm(program: TMProgram, max_steps: int = 100_000) -> TMRun:
    """Execute directly; the oracle for every simulation test."""
    tape = {i: c for i, c in enumerate(program.input_word) if c != program.blank}
    head = 0
    state = program.start
    lo = hi = 0
    if program.input_word:
        hi = len(program.input_word) - 1
    steps = 0
    trace = [(state, head)]
    while state not in program.halting:
        if steps >= max_steps:
            return TMRun(False, steps, tape, head, state, lo, hi, trace)
        sym = tape.get(head, program.blank)
        key = (state, sym)
        if key not in program.transitions:
            raise NonterminatingProgram(f"no transition from {key}; machine is stuck")
        state, written, move = program.transitions[key]
        if written == program.blank:
            tape.pop(head, None)
        else:
            tape[head] = written
        head += 1 if move == "R" else -1
        lo = min(lo, head)
        hi = max(hi, head)
        steps += 1
        trace.append((state, head))
    return TMRun(True, steps, tape, head, state, lo, hi, trace)


@dataclass
class CompiledTM:
    """Tile set realizing a bounded run of one machine."""

    tiles: List[TileType]
    seed: Dict[Tuple[int, int], str]
    rows: int                      # index of the halt row (0 = seed row)
    width: int                     # inner tape columns (walls at x=0 and width+1)
    column_of: Dict[int, int]      # tape position -> x column
    halt_tape: Dict[int, str]      # tape content at halt, by tape position
    halt_head: int                 # head tape position at halt
    halt_state: str
    anchor: bool                   # whether the top-left wall exposes an anchor glue


def compile_tm_simulation(program: TMProgram, max_steps: int = 20_000,
                          min_columns: int = 0, anchor: bool = False,
                          prefix: str = "tm") -> CompiledTM:
    """RNA tile set whose seeded growth simulates ``program`` row by row.

    The machine must halt within ``max_steps`` on its input (verified by
    direct execution first).  ``min_columns`` pads the ribbon on the right;
    ``anchor`` makes the left wall's top expose a strength-2 start glue for
    downstream construction rows.
    """
    run = run_tm(program, max_steps)
    if not run.halted:
        raise NonterminatingProgram(
            f"machine did not halt within {max_steps} steps")
    blank = program.blank
    lo = min(run.min_pos, 0)
    hi = max(run.max_pos, len(program.input_word) - 1, 0)
    width = hi - lo + 1
    if width < min_columns:
        width = min_columns
    column_of = {pos: pos - lo + 1 for pos in range(lo, lo + width)}
    T = run.steps

    tiles: Dict[str, TileType] = {}

    def add(t: TileType):
        if t.name in tiles:
            if tiles[t.name] != t:
                raise InvalidArgument(f"conflicting tile {t.name}")
            return
        tiles[t.name] = t

    def disp(sym: str) -> Optional[str]:
        return sym if sym in ("0", "1") else None

    # seed row: initial configuration, chained at strength 2
    seed: Dict[Tuple[int, int], str] = {}
    init_syms = {}
    for pos in range(lo, lo + width):
        init_syms[pos] = program.input_word[pos] if 0 <= pos < len(program.input_word) else blank
    head0 = 0
    for x in range(0, width + 2):
        name = f"{prefix}.seed.{x}"
        w_glue = Glue(f"{prefix}:seed:{x - 1}", 2) if x > 0 else NULL_GLUE
        e_glue = Glue(f"{prefix}:seed:{x}", 2) if x < width + 1 else NULL_GLUE
        if x == 0:
            n_glue = Glue(f"{prefix}:wl:0", 1) if T > 0 else (
                Glue(f"{prefix}:anchor:start", 2) if anchor else NULL_GLUE)
            label = None
        elif x == width + 1:
            n_glue = Glue(f"{prefix}:wr:0", 1) if T > 0 else NULL_GLUE
            label = None
        else:
            pos = x - 1 + lo
            sym = init_syms[pos]
            if pos == head0:
                if program.start in program.halting:
                    n_glue = Glue(f"{prefix}:halted:{program.start}:{sym}", 1)
                else:
                    n_glue = Glue(f"{prefix}:h:{program.start}:{sym}", 2)
            else:
                n_glue = _tm_glue(prefix, sym)
            label = disp(sym)
        add(TileType(name, north=n_glue, east=e_glue, west=w_glue,
                     material=Material.RNA, display_label=label))
        seed[(x, 0)] = name

    # walls, one keyed tile per row
    for y in range(1, T + 1):
        top = y == T
        n_l = NULL_GLUE
        if not top:
            n_l = Glue(f"{prefix}:wl:{y}", 1)
        elif anchor:
            n_l = Glue(f"{prefix}:anchor:start", 2)
        add(TileType(f"{prefix}.wl.{y}", north=n_l,
                     south=Glue(f"{prefix}:wl:{y - 1}", 1),
                     east=Glue(f"{prefix}:kL", 1),
                     material=Material.RNA))
        add(TileType(f"{prefix}.wr.{y}",
                     north=NULL_GLUE if top else Glue(f"{prefix}:wr:{y}", 1),
                     south=Glue(f"{prefix}:wr:{y - 1}", 1),
                     west=Glue(f"{prefix}:kR", 1),
                     material=Material.RNA))

    syms = set(program.symbols()) | set(init_syms.values())
    # copy tiles, one per symbol per sweep direction
    for sym in sorted(syms):
        add(TileType(f"{prefix}.cr.{sym}", north=_tm_glue(prefix, sym),
                     south=_tm_glue(prefix, sym),
                     west=Glue(f"{prefix}:kR", 1), east=Glue(f"{prefix}:kR", 1),
                     material=Material.RNA, display_label=disp(sym)))
        add(TileType(f"{prefix}.cl.{sym}", north=_tm_glue(prefix, sym),
                     south=_tm_glue(prefix, sym),
                     east=Glue(f"{prefix}:kL", 1), west=Glue(f"{prefix}:kL", 1),
                     material=Material.RNA, display_label=disp(sym)))

    # action and receive tiles from the transition table
    for (q, a), (q2, b, move) in sorted(program.transitions.items()):
        if move == "R":
            add(TileType(f"{prefix}.act.{q}.{a}",
                         south=Glue(f"{prefix}:h:{q}:{a}", 2),
                         north=_tm_glue(prefix, b),
                         east=Glue(f"{prefix}:c:{q2}", 1),
                         west=Glue(f"{prefix}:kL", 1),
                         material=Material.RNA, display_label=disp(b)))
            for c in sorted(syms):
                n = (Glue(f"{prefix}:halted:{q2}:{c}", 1) if q2 in program.halting
                     else Glue(f"{prefix}:h:{q2}:{c}", 2))
                add(TileType(f"{prefix}.rcv.R.{q2}.{c}",
                             south=_tm_glue(prefix, c), north=n,
                             west=Glue(f"{prefix}:c:{q2}", 1),
                             east=Glue(f"{prefix}:kR", 1),
                             material=Material.RNA, display_label=disp(c)))
        else:
            add(TileType(f"{prefix}.act.{q}.{a}",
                         south=Glue(f"{prefix}:h:{q}:{a}", 2),
                         north=_tm_glue(prefix, b),
                         west=Glue(f"{prefix}:c:{q2}", 1),
                         east=Glue(f"{prefix}:kR", 1),
                         material=Material.RNA, display_label=disp(b)))
            for c in sorted(syms):
                n = (Glue(f"{prefix}:halted:{q2}:{c}", 1) if q2 in program.halting
                     else Glue(f"{prefix}:h:{q2}:{c}", 2))
                add(TileType(f"{prefix}.rcv.L.{q2}.{c}",
                             south=_tm_glue(prefix, c), north=n,
                             east=Glue(f"{prefix}:c:{q2}", 1),
                             west=Glue(f"{prefix}:kL", 1),
                             material=Material.RNA, display_label=disp(c)))

    halt_tape = {}
    for pos in range(lo, lo + width):
        halt_tape[pos] = run.tape.get(pos, blank)
    return CompiledTM(
        tiles=sorted(tiles.values(), key=lambda t: t.name),
        seed=seed,
        rows=T,
        width=width,
        column_of=column_of,
        halt_tape=halt_tape,
        halt_head=run.head,
        halt_state=run.state,
        anchor=anchor,
    )


def _tm_glue(prefix: str, sym: str) -> Glue:
    return Glue(f"{prefix}:v:{sym}", 1)


def read_row(assembly: Assembly, tiles, y: int, prefix: str = "tm") -> str:
    """Symbols spelled by the simulation row at height ``y`` (walls skipped).

    Reads the row's exposed vertical glue labels; seed tiles are recognized
    by name when the machine halts immediately.
    """
    by_name = tiles if isinstance(tiles, dict) else {t.name: t for t in tiles}
    cells = sorted((x, name) for (x, yy), name in assembly.placements.items() if yy == y)
    out = []
    for x, name in cells:
        t = by_name[name]
        lab = t.north.label or t.south.label
        parts = lab.split(":")
        if parts[:2] == [prefix, "v"]:
            out.append(parts[2])
        elif parts[:2] == [prefix, "halted"]:
            out.append(parts[3])
        elif parts[:2] == [prefix, "h"]:
            out.append(parts[3])
    return "".join(out)


def top_row_word(assembly: Assembly, tiles, prefix: str = "tm",
                 blank: str = BLANK) -> str:
    top = max(y for (_x, y) in assembly.placements)
    return read_row(assembly, tiles, top, prefix).strip(blank)


def print_string_machine(text: str, blank: str = BLANK) -> TMProgram:
    """A machine that writes ``text`` left to right on a blank tape, halts."""
    if not text:
        return TMProgram({}, "q0", frozenset(["q0"]), "", blank)
    transitions = {}
    for i, ch in enumerate(text):
        transitions[(f"q{i}", blank)] = (f"q{i + 1}", ch, "R")
    return TMProgram(transitions, "q0", frozenset([f"q{len(text)}"]), "", blank)


def unary_incrementer(blank: str = BLANK) -> TMProgram:
    """Walk right over 1s, append one more 1, halt."""
    return TMProgram(
        transitions={
            ("scan", "1"): ("scan", "1", "R"),
            ("scan", blank): ("done", "1", "R"),
        },
        start="scan",
        halting=frozenset(["done"]),
        input_word="",
        blank=blank,
    )
