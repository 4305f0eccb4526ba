import pytest

from tileforge.engine import seeded_grow
from tileforge.errors import NonterminatingProgram
from tileforge.model import Assembly, TileSystem
from tileforge.tm import (
    BLANK,
    TMProgram,
    compile_tm_simulation,
    print_string_machine,
    read_row,
    run_tm,
    top_row_word,
    unary_incrementer,
)


def grow_machine(compiled):
    system = TileSystem.of(compiled.tiles, 2)
    seed = Assembly.of(compiled.seed, 2)
    grown, trace = seeded_grow(system, seed)
    return system, grown


class TestDirectExecution:
    def test_unary_incrementer(self):
        prog = TMProgram(unary_incrementer().transitions, "scan",
                         frozenset(["done"]), input_word="11")
        run = run_tm(prog)
        assert run.halted and run.word() == "111"

    def test_print_string(self):
        prog = print_string_machine("0110")
        run = run_tm(prog)
        assert run.halted and run.word() == "0110"

    def test_stuck_machine_raises(self):
        prog = TMProgram({("a", BLANK): ("b", "1", "R")}, "a", frozenset(["z"]))
        with pytest.raises(NonterminatingProgram):
            run_tm(prog)

    def test_step_bound(self):
        loop = TMProgram({("a", BLANK): ("a", BLANK, "R")}, "a", frozenset(["z"]))
        run = run_tm(loop, max_steps=50)
        assert not run.halted and run.steps == 50


class TestSimulation:
    def test_incrementer_top_row(self):
        prog = TMProgram(unary_incrementer().transitions, "scan",
                         frozenset(["done"]), input_word="11")
        compiled = compile_tm_simulation(prog)
        system, grown = grow_machine(compiled)
        assert top_row_word(grown, system.by_name()) == "111"

    def test_halt_immediately_top_row_is_input(self):
        prog = TMProgram({}, "h", frozenset(["h"]), input_word="101")
        compiled = compile_tm_simulation(prog)
        system, grown = grow_machine(compiled)
        assert compiled.rows == 0
        assert top_row_word(grown, system.by_name()) == "101"

    def test_left_moves_simulated_faithfully(self):
        # scan right over the word, then walk back left flipping each bit
        prog = TMProgram(
            transitions={
                ("r", "0"): ("r", "0", "R"),
                ("r", "1"): ("r", "1", "R"),
                ("r", BLANK): ("l", BLANK, "L"),
                ("l", "0"): ("l", "1", "L"),
                ("l", "1"): ("l", "0", "L"),
                ("l", BLANK): ("halt", BLANK, "R"),
            },
            start="r",
            halting=frozenset(["halt"]),
            input_word="10011",
        )
        oracle = run_tm(prog)
        assert oracle.word() == "01100"
        compiled = compile_tm_simulation(prog)
        system, grown = grow_machine(compiled)
        assert top_row_word(grown, system.by_name()) == "01100"
        # every intermediate row is a real configuration: width is constant
        rows = {y for (_x, y) in grown.placements}
        assert rows == set(range(compiled.rows + 1))

    def test_output_matches_direct_execution_for_all_rows(self):
        prog = TMProgram(unary_incrementer().transitions, "scan",
                         frozenset(["done"]), input_word="111")
        compiled = compile_tm_simulation(prog)
        system, grown = grow_machine(compiled)
        final = read_row(grown, system.by_name(), compiled.rows)
        assert final.strip(BLANK) == "1111"

    def test_nonterminating_rejected(self):
        loop = TMProgram({("a", BLANK): ("a", BLANK, "R")}, "a", frozenset(["z"]))
        with pytest.raises(NonterminatingProgram):
            compile_tm_simulation(loop, max_steps=40)

    def test_min_columns_pads_ribbon(self):
        prog = print_string_machine("11")
        compiled = compile_tm_simulation(prog, min_columns=30)
        assert compiled.width == 30
        system, grown = grow_machine(compiled)
        assert top_row_word(grown, system.by_name()) == "11"

    def test_all_tiles_rna(self):
        prog = print_string_machine("01")
        compiled = compile_tm_simulation(prog)
        from tileforge.model import Material
        assert all(t.material is Material.RNA for t in compiled.tiles)
