"""File format round-trips, CLI behavior, exit codes, determinism."""

from __future__ import annotations

import json
import random

import pytest

from perigid.cli import main
from perigid.colored_graph import ColoredGraph
from perigid.errors import ParseError
from perigid.fileio import parse_colored_graph, serialize_colored_graph

from randgen import random_graph

G = ColoredGraph.build

LAMAN1_TEXT = "cg 2 1 3\n0 0 1 0\n0 0 0 1\n0 0 1 1\n"


def run_cli(capsys, *argv) -> tuple[str, int]:
    code = main(list(argv))
    return capsys.readouterr().out, code


@pytest.fixture()
def laman1(tmp_path):
    path = tmp_path / "laman1.cg"
    path.write_text(LAMAN1_TEXT)
    return str(path)


@pytest.fixture()
def two_loops(tmp_path):
    path = tmp_path / "two.cg"
    path.write_text("# circuit\ncg 2 2 2\n0 0 1 0\n1 1 1 0\n")
    return str(path)


def test_parse_fixture():
    g = parse_colored_graph(LAMAN1_TEXT)
    assert g.n == 1 and g.m == 3
    assert [tuple(e.color) for e in g.edges] == [(1, 0), (0, 1), (1, 1)]


def test_parse_single_edge_and_comments():
    g = parse_colored_graph("# hi\ncg 2 2 1  # inline\n0 1 0 0\n")
    assert g.n == 2 and g.m == 1


def test_parse_errors_are_positioned():
    with pytest.raises(ParseError) as e:
        parse_colored_graph("cg 3 1 0\n")
    assert e.value.line == 1
    with pytest.raises(ParseError):
        parse_colored_graph("xx 2 1 0\n")
    with pytest.raises(ParseError) as e:
        parse_colored_graph("cg 2 1 1\n0 2 0 0\n")
    assert e.value.line == 2
    with pytest.raises(ParseError):
        parse_colored_graph("cg 2 1 1\n0 0 a 0\n")
    with pytest.raises(ParseError):
        parse_colored_graph("cg 2 1 2\n0 0 1 0\n")
    with pytest.raises(ParseError):
        parse_colored_graph("")


def test_round_trip_random():
    rng = random.Random(3)
    for _ in range(50):
        g = random_graph(rng)
        text = serialize_colored_graph(g)
        assert parse_colored_graph(text) == g
        assert serialize_colored_graph(parse_colored_graph(text)) == text


def test_cli_check_exit_codes(capsys, laman1, two_loops):
    out, code = run_cli(capsys, "check", laman1)
    assert code == 0 and "minimally rigid" in out
    out, code = run_cli(capsys, "check", two_loops)
    assert code == 1 and "flexible" in out


def test_cli_check_json(capsys, laman1):
    out, code = run_cli(capsys, "check", laman1, "--format", "json")
    payload = json.loads(out)
    assert payload["status"] == "generically_minimally_rigid"
    assert payload["rank"] == 3
    assert payload["witness"]["n"] == 1


def test_cli_circuit(capsys, two_loops, laman1):
    out, code = run_cli(capsys, "circuit", two_loops)
    assert code == 1 and "circuit: 0 1" in out
    out, code = run_cli(capsys, "circuit", laman1)
    assert code == 0 and "no circuit" in out


def test_cli_sparsity_families(capsys, tmp_path, laman1):
    out, code = run_cli(capsys, "sparsity", laman1)
    assert code == 0 and "colored-Laman graph: True" in out
    ross = tmp_path / "ross.cg"
    ross.write_text("cg 2 2 2\n0 1 0 0\n0 1 1 0\n")
    out, code = run_cli(capsys, "sparsity", str(ross), "--family", "ross")
    assert code == 0
    out, code = run_cli(capsys, "ross", str(ross))
    assert code == 0 and "True" in out


def test_cli_decompose(capsys, tmp_path):
    path = tmp_path / "g4.cg"
    path.write_text("cg 2 1 4\n0 0 1 0\n0 0 0 1\n0 0 1 0\n0 0 0 1\n")
    out, code = run_cli(capsys, "decompose", str(path), "--format", "json")
    parts = json.loads(out)
    assert code == 0
    assert sorted(parts["part1"] + parts["part2"]) == [0, 1, 2, 3]


def test_cli_decompose_domain_error(capsys, laman1):
    out, code = run_cli(capsys, "decompose", laman1)
    assert code == 2 and "error" in out


def test_cli_realize_json_schema(capsys, laman1):
    out, code = run_cli(capsys, "realize", laman1, "--seed", "4", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert list(payload) == ["n", "p", "L", "edges", "seed"]
    assert payload["seed"] == 4
    assert all(not e["collapsed"] for e in payload["edges"])
    assert list(payload["edges"][0]) == ["id", "alpha", "collapsed"]


def test_cli_realize_rejects_flexible(capsys, two_loops):
    out, code = run_cli(capsys, "realize", two_loops)
    assert code == 2


def test_cli_develop_text_and_json(capsys, tmp_path):
    path = tmp_path / "f.cg"
    path.write_text("cg 2 1 3\n0 0 1 0\n0 0 0 2\n0 0 1 2\n")
    out, code = run_cli(capsys, "develop", str(path), "--window", "-2:2,-2:2")
    assert code == 0 and "k=2 index=2" in out
    out, code = run_cli(capsys, "develop", str(path), "--format", "json")
    payload = json.loads(out)
    assert payload["index"] == 2 and payload["observed_core_components"] == 2


def test_cli_develop_svg(capsys, tmp_path):
    path = tmp_path / "f.cg"
    path.write_text("cg 2 1 3\n0 0 1 0\n0 0 0 2\n0 0 1 2\n")
    out, code = run_cli(capsys, "develop", str(path), "--format", "svg")
    assert code == 0
    assert out.startswith("<?xml") and out.rstrip().endswith("</svg>")
    assert out.count("<circle") == 25
    # two component colors in play
    assert "#1f77b4" in out and "#d62728" in out


def test_cli_develop_svg_empty_graph(capsys, tmp_path):
    path = tmp_path / "empty.cg"
    path.write_text("cg 2 0 0\n")
    out, code = run_cli(capsys, "develop", str(path), "--format", "svg")
    assert code == 0 and "<line" in out and "<circle" not in out


def test_cli_realize_svg(capsys, laman1):
    out, code = run_cli(capsys, "realize", laman1, "--format", "svg")
    assert code == 0
    assert out.count("<circle") >= 3  # vertex + lattice arrowheads
    assert "<polygon" in out


def test_cli_cover(capsys, tmp_path):
    path = tmp_path / "f.cg"
    path.write_text("cg 2 1 3\n0 0 1 0\n0 0 0 2\n0 0 1 2\n")
    out, code = run_cli(capsys, "cover", str(path), "--basis", "1,0,0,2")
    assert code == 0
    cover = parse_colored_graph(out)
    assert cover.n == 2 and cover.m == 6


def test_cli_oned(capsys, tmp_path):
    path = tmp_path / "o.cg"
    path.write_text("cg 2 1 1\n0 0 1 0\n")
    out, code = run_cli(capsys, "oned", str(path))
    assert code == 0 and "minimally rigid" in out
    bad = tmp_path / "bad.cg"
    bad.write_text("cg 2 1 1\n0 0 1 1\n")
    out, code = run_cli(capsys, "oned", str(bad))
    assert code == 2


def test_cli_rank_dump(capsys, tmp_path, laman1):
    dump = tmp_path / "m.txt"
    out, code = run_cli(capsys, "rank", laman1, "--matrix", "M112", "--dump", str(dump))
    assert code == 0 and "M112 generic rank: 2" in out
    text = dump.read_text()
    assert text.startswith("mat 3 3 fp\n")


def test_cli_determinism(capsys, laman1):
    a, _ = run_cli(capsys, "realize", laman1, "--seed", "9", "--format", "json")
    b, _ = run_cli(capsys, "realize", laman1, "--seed", "9", "--format", "json")
    assert a == b
    c, _ = run_cli(capsys, "develop", laman1, "--format", "svg")
    d, _ = run_cli(capsys, "develop", laman1, "--format", "svg")
    assert c == d


def test_cli_batch_jobs(capsys, laman1, two_loops):
    out, code = run_cli(capsys, "check", laman1, two_loops, "--jobs", "2")
    assert code == 1
    assert out.index(laman1) < out.index(two_loops)


def test_cli_missing_file(capsys):
    out, code = run_cli(capsys, "check", "/nonexistent/file.cg")
    assert code == 2


def test_cli_internal_error_exit_code(capsys, laman1, monkeypatch):
    from perigid import cli
    from perigid.errors import InternalConsistencyError

    def boom(path, args):
        raise InternalConsistencyError("forced disagreement")

    monkeypatch.setitem(cli.COMMANDS, "check", boom)
    out, code = run_cli(capsys, "check", laman1)
    assert code == 3 and "internal error" in out
