import pytest

from tileforge.engine import Bounds, combine, seeded_grow
from tileforge.errors import LabelTooLong, MalformedSpec
from tileforge.model import (
    Assembly,
    Material,
    Shape,
    TileSystem,
    block_side,
    scale_shape,
)
from tileforge.pod import (
    BlockSpec,
    assign_edges,
    block_specs_for_shape,
    compile_block_tiles,
    compile_pod,
    emit_labeled_row,
    null_code,
    serialize_labeled_row,
)
from tileforge.tm import (
    TMProgram,
    compile_tm_simulation,
    run_tm,
    top_row_word,
    unary_incrementer,
)
from tileforge.verify import run_compiled, verify_unique_production

DOMINO = Shape.of([(0, 0), (1, 0)])
SQUARE = Shape.of([(0, 0), (1, 0), (0, 1), (1, 1)])


class TestAssignEdges:
    def test_domino(self):
        e = assign_edges(DOMINO)
        assert e.value((0, 0), "E") == 0
        assert e.value((1, 0), "W") == 0
        for p, side in [((0, 0), "N"), ((0, 0), "S"), ((0, 0), "W"),
                        ((1, 0), "N"), ((1, 0), "S"), ((1, 0), "E")]:
            assert e.value(p, side) is None
        assert e.count == 1 and e.bit_width == 1

    def test_single_point(self):
        e = assign_edges(Shape.of([(0, 0)]))
        assert e.count == 0 and e.bit_width == 1
        assert all(v is None for v in e.values.values())

    def test_square_trace(self):
        e = assign_edges(SQUARE)
        assert e.count == 4 and e.bit_width == 3
        assert e.value((0, 0), "N") == 0
        assert e.value((0, 0), "E") == 1
        assert e.value((1, 0), "N") == 2
        assert e.value((0, 1), "E") == 3

    def test_every_value_appears_exactly_twice(self):
        for shape in (DOMINO, SQUARE, Shape.of([(0, 0), (1, 0), (2, 0), (1, 1)])):
            e = assign_edges(shape)
            seen = {}
            for (_p, _s), v in e.values.items():
                if v is not None:
                    seen[v] = seen.get(v, 0) + 1
            assert set(seen) == set(range(e.count))
            assert all(n == 2 for n in seen.values())


class TestLabeledRow:
    def test_domino_quadruples(self):
        e = assign_edges(DOMINO)
        rows = emit_labeled_row(DOMINO, e)
        assert rows == [(None, None, "0", None), ("0", None, None, None)]

    def test_single_point(self):
        s = Shape.of([(0, 0)])
        assert emit_labeled_row(s, assign_edges(s)) == [(None, None, None, None)]

    def test_square_codes_are_three_bit(self):
        e = assign_edges(SQUARE)
        rows = emit_labeled_row(SQUARE, e)
        assert len(rows) == 4
        for quad in rows:
            non_null = [c for c in quad if c is not None]
            assert len(non_null) == 2
            assert all(len(c) == 3 for c in non_null)

    def test_serialization_uses_null_codes_and_double_blanks(self):
        e = assign_edges(DOMINO)
        rows = emit_labeled_row(DOMINO, e)
        text = serialize_labeled_row(rows, e.bit_width)
        assert text == "1..1..0..1..0..1..1..1"
        assert null_code(1) == "1"


def lone_block(code_side: str, code: str, b: int):
    codes = {"N": None, "E": None, "S": None, "W": None}
    codes[code_side] = code
    return BlockSpec(point=(0, 0), side_codes=codes, block_side=b)


class TestBlockTiles:
    def test_all_null_block(self):
        spec = BlockSpec(point=(0, 0),
                         side_codes={"N": None, "E": None, "S": None, "W": None},
                         block_side=16)
        tiles, footprint, builder = compile_block_tiles(spec, unit_id="t")
        assert len(footprint) == 256
        assert all(t.material is Material.DNA for t in tiles)
        system = TileSystem.of(tiles, 2)
        grown, _ = seeded_grow(system, Assembly.of({(0, 0): "t.0.0"}, 2),
                               expected_size=256)
        # zero exposed positive-strength glues on the finished block
        by_name = system.by_name()
        for (x, y), name in grown.placements.items():
            t = by_name[name]
            for d, g in t.glues().items():
                if (x + d[0], y + d[1]) not in grown.placements:
                    assert g.strength == 0

    def test_wrong_code_length_rejected(self):
        spec = lone_block("E", "01", 16)  # 16 -> 1 bit expected
        with pytest.raises(MalformedSpec):
            spec.footprint()

    def test_block_growth_is_deterministic_and_complete(self):
        spec = lone_block("E", "1", 16)
        tiles, footprint, _ = compile_block_tiles(spec, unit_id="t")
        system = TileSystem.of(tiles, 2)
        grown, _ = seeded_grow(system, Assembly.of({(0, 0): "t.0.0"}, 2),
                               expected_size=len(footprint))
        assert frozenset(grown.placements) == footprint

    def test_matching_codes_combine_in_exactly_one_placement(self):
        b = 16
        east = lone_block("E", "0", b)
        west = lone_block("W", "0", b)
        et, ef, _ = compile_block_tiles(east, unit_id="a")
        wt, wf, _ = compile_block_tiles(west, unit_id="b")
        system = TileSystem.of(list(et) + list(wt), 2)
        left = Assembly.of({p: f"a.{p[0]}.{p[1]}" for p in ef}, 2)
        right = Assembly.of({p: f"b.{p[0]}.{p[1]}" for p in wf}, 2)
        got = combine(left, right, 2, system)
        assert len(got) == 1
        # union of the pair is the full 2B x B brick: teeth interlock exactly
        assert len(got[0]) == 2 * b * b

    def test_mismatched_codes_never_combine(self):
        b = 16
        east = lone_block("E", "0", b)
        west = lone_block("W", "1", b)
        et, ef, _ = compile_block_tiles(east, unit_id="a")
        wt, wf, _ = compile_block_tiles(west, unit_id="b")
        system = TileSystem.of(list(et) + list(wt), 2)
        left = Assembly.of({p: f"a.{p[0]}.{p[1]}" for p in ef}, 2)
        right = Assembly.of({p: f"b.{p[0]}.{p[1]}" for p in wf}, 2)
        assert combine(left, right, 2, system) == []


class TestTeethInjectivity:
    @pytest.mark.parametrize("width", [1, 2])
    def test_all_code_pairs(self, width):
        b = block_side(width)
        blocks = {}
        for v in range(2 ** width):
            code = format(v, f"0{width}b")
            et, ef, _ = compile_block_tiles(lone_block("E", code, b), unit_id=f"e{v}")
            wt, wf, _ = compile_block_tiles(lone_block("W", code, b), unit_id=f"w{v}")
            blocks[("E", code)] = (et, ef, f"e{v}")
            blocks[("W", code)] = (wt, wf, f"w{v}")
        all_tiles = [t for (ts, _, _) in blocks.values() for t in ts]
        system = TileSystem.of(all_tiles, 2)
        for u in range(2 ** width):
            cu = format(u, f"0{width}b")
            et, ef, en = blocks[("E", cu)]
            left = Assembly.of({p: f"{en}.{p[0]}.{p[1]}" for p in ef}, 2)
            for v in range(2 ** width):
                cv = format(v, f"0{width}b")
                wt, wf, wn = blocks[("W", cv)]
                right = Assembly.of({p: f"{wn}.{p[0]}.{p[1]}" for p in wf}, 2)
                got = combine(left, right, 2, system)
                if u == v:
                    assert len(got) == 1, f"codes {cu}={cv} should interlock once"
                else:
                    assert got == [], f"codes {cu}!={cv} must not combine"


class TestLabels:
    def test_single_row_label(self):
        spec = BlockSpec(point=(0, 0),
                         side_codes={"N": None, "E": None, "S": None, "W": None},
                         block_side=16,
                         label_payload=("01101001", "rows", [7]))
        tiles, footprint, _ = compile_block_tiles(spec, unit_id="t")
        by_name = {t.name: t for t in tiles}
        row = [by_name[f"t.{x}.7"].display_label for x in range(16)]
        start = (16 - 8) // 2
        assert "".join(c or "." for c in row) == "." * start + "01101001" + "." * (16 - start - 8)
        other = [by_name[f"t.{x}.8"].display_label for x in range(16)]
        assert all(c is None for c in other)

    def test_all_rows_label(self):
        spec = BlockSpec(point=(0, 0),
                         side_codes={"N": None, "E": None, "S": None, "W": None},
                         block_side=16,
                         label_payload=("01101001", "rows", "all"))
        tiles, _, _ = compile_block_tiles(spec, unit_id="t")
        by_name = {t.name: t for t in tiles}
        start = (16 - 8) // 2
        for y in range(16):
            row = "".join(by_name[f"t.{x}.{y}"].display_label or "."
                          for x in range(16))
            assert row[start:start + 8] == "01101001"

    def test_column_label(self):
        spec = BlockSpec(point=(0, 0),
                         side_codes={"N": None, "E": None, "S": None, "W": None},
                         block_side=16,
                         label_payload=("11", "cols", [2]))
        tiles, _, _ = compile_block_tiles(spec, unit_id="t")
        by_name = {t.name: t for t in tiles}
        start = (16 - 2) // 2
        assert by_name[f"t.2.{start}"].display_label == "1"
        assert by_name[f"t.2.{start + 1}"].display_label == "1"

    def test_too_long_label_rejected(self):
        spec = BlockSpec(point=(0, 0),
                         side_codes={"N": None, "E": None, "S": None, "W": None},
                         block_side=16,
                         label_payload=("0" * 15, "rows", [7]))
        with pytest.raises(LabelTooLong):
            compile_block_tiles(spec, unit_id="t")


class TestPodPipeline:
    def test_domino_skip_unpacking(self):
        system = compile_pod(DOMINO, skip_unpacking=True)
        staged, problems = run_compiled(system)
        assert problems == []
        assert len(staged[0]) == 2  # one mixed DNA/RNA structure per block
        by_name = system.by_name()
        for unit in staged[0].assemblies:
            mats = unit.materials(by_name)
            assert mats == {Material.DNA, Material.RNA}
        final = staged[-1]
        assert len(final) == 1
        b = system.manifest.scale
        assert b == 16
        expected = scale_shape(DOMINO, b).points
        assert frozenset(final.assemblies[0].canonical().placements) == expected

    def test_single_point_block(self):
        s = Shape.of([(0, 0)])
        system = compile_pod(s)
        staged, problems = run_compiled(system)
        assert problems == []
        assert system.manifest.scale == 16
        final = staged[-1].assemblies[0]
        assert frozenset(final.canonical().placements) == scale_shape(s, 16).points

    def test_domino_certified_unique(self):
        system = compile_pod(DOMINO)
        report = verify_unique_production(system, scale_shape(DOMINO, 16))
        assert report.unique_production == "certified"
        assert report.connectivity == "partial"

    def test_label_payload_surfaces_in_terminal(self):
        s = Shape.of([(0, 0)])
        system = compile_pod(s, labels={(0, 0): ("01101001", "rows", [7])})
        report = verify_unique_production(system, scale_shape(s, 16))
        assert report.unique_production == "certified"
        assert report.addressability == "pass"

    def test_oversized_label_rejected(self):
        s = Shape.of([(0, 0)])
        with pytest.raises(LabelTooLong):
            compile_pod(s, labels={(0, 0): ("0" * 15, "rows", [7])})


class TestFullUnpacking:
    def test_tm_top_row_matches_serialization(self):
        e = assign_edges(DOMINO)
        text = serialize_labeled_row(emit_labeled_row(DOMINO, e), e.bit_width)
        from tileforge.tm import print_string_machine
        compiled = compile_tm_simulation(print_string_machine(text))
        system = TileSystem.of(compiled.tiles, 2)
        grown, _ = seeded_grow(system, Assembly.of(compiled.seed, 2))
        assert top_row_word(grown, system.by_name()) == text

    def test_domino_full_pipeline_matches_skip_mode(self):
        full = compile_pod(DOMINO, skip_unpacking=False)
        skip = compile_pod(DOMINO, skip_unpacking=True)
        staged_full, problems_full = run_compiled(full)
        staged_skip, problems_skip = run_compiled(skip)
        assert problems_full == [] and problems_skip == []
        assert len(staged_full[0]) == 1  # one ribbon megastructure
        t_full = staged_full[-1].assemblies[0].canonical()
        t_skip = staged_skip[-1].assemblies[0].canonical()
        assert t_full.key() == t_skip.key()
