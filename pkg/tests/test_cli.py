from __future__ import annotations

import io
import pathlib

import pytest

from splitclosure import (
    RuleSelector,
    SplitSystem,
    closure,
    extract_splits,
    parse_newick,
    read_splits_file,
)
from splitclosure.cli import main

GOLDEN = pathlib.Path(__file__).parent / "golden"

QUARTET = "((a,b),(c,d));"
CATERPILLAR = "((a,b),c,(d,e));"

REFERENCE = "taxa 1 2 3 4 5\n1 2 | 3 4\n2 3 | 1 4\n1 5 | 2 4\n4 5 | 1 3\n"
INCONSISTENT = (
    "taxa 1 2 3 4 5 6 7\n"
    "1 2 7 | 3 4 5 6\n"
    "1 2 3 4 | 5 6 7\n"
    "2 3 5 | 1 4 6\n"
)


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestExtract:
    def test_quartet(self, tmp_path, capsys):
        trees = write(tmp_path, "t.nwk", QUARTET)
        assert main(["extract", trees]) == 0
        assert capsys.readouterr().out == (
            "taxa a b c d\n"
            "a | b c d\n"
            "a b | c d\n"
            "a b c | d\n"
            "a b d | c\n"
            "a c d | b\n"
        )

    def test_drop_trivial(self, tmp_path, capsys):
        trees = write(tmp_path, "t.nwk", CATERPILLAR)
        assert main(["extract", "--drop-trivial", trees]) == 0
        assert capsys.readouterr().out == (
            "taxa a b c d e\na b | c d e\na b c | d e\n"
        )

    def test_prune_shrinks_universe(self, tmp_path, capsys):
        trees = write(tmp_path, "t.nwk", QUARTET)
        assert main(["extract", "--prune", "c", trees]) == 0
        assert capsys.readouterr().out == (
            "taxa a b d\na | b d\na b | d\na d | b\n"
        )

    def test_prune_applies_per_tree(self, tmp_path, capsys):
        trees = write(tmp_path, "t.nwk", "(a,b,(c,d));\n(c,d,(e,a));")
        assert main(["extract", "--drop-trivial", "--prune", "e", trees]) == 0
        out = capsys.readouterr().out
        assert out.splitlines()[0] == "taxa a b c d"
        assert "e" not in out

    def test_prune_unknown_label(self, tmp_path, capsys):
        trees = write(tmp_path, "t.nwk", QUARTET)
        assert main(["extract", "--prune", "x", trees]) == 2
        err = capsys.readouterr().err
        assert err.startswith("error:") and "'x'" in err

    def test_parse_error_exit_code(self, tmp_path, capsys):
        trees = write(tmp_path, "t.nwk", "((a,b),(c,d);")
        assert main(["extract", trees]) == 2
        assert "error:" in capsys.readouterr().err


class TestClosure:
    def test_reference_run(self, tmp_path, capsys):
        splits = write(tmp_path, "in.splits", REFERENCE)
        assert main(["closure", "--rule", "y", splits]) == 0
        expected = (GOLDEN / "reference_closure.splits").read_text()
        assert capsys.readouterr().out == expected

    def test_stdin(self, capsys, monkeypatch):
        monkeypatch.setattr("sys.stdin", io.StringIO(REFERENCE))
        assert main(["closure", "--rule", "y", "-"]) == 0
        expected = (GOLDEN / "reference_closure.splits").read_text()
        assert capsys.readouterr().out == expected

    def test_trace_file(self, tmp_path, capsys):
        splits = write(tmp_path, "in.splits", REFERENCE)
        trace = tmp_path / "trace.txt"
        assert main(["closure", "--rule", "y", "--trace", str(trace), splits]) == 0
        capsys.readouterr()
        lines = trace.read_text().splitlines()
        assert len(lines) == 3
        assert all(line.startswith("step=") for line in lines)

    def test_omega_exit_code_and_trace(self, tmp_path, capsys):
        splits = write(tmp_path, "in.splits", INCONSISTENT)
        trace = tmp_path / "trace.txt"
        code = main(["closure", "--rule", "y", "--trace", str(trace), splits])
        assert code == 3
        captured = capsys.readouterr()
        assert captured.out == ""
        assert captured.err.startswith("inconsistent after 1 steps:")
        assert "nonempty overlaps" in captured.err
        assert len(trace.read_text().splitlines()) == 1

    def test_unguarded_completes(self, tmp_path, capsys):
        splits = write(tmp_path, "in.splits", INCONSISTENT)
        assert main(["closure", "--rule", "y", "--unguarded", splits]) == 0
        out = capsys.readouterr().out
        assert out.startswith("taxa 1 2 3 4 5 6 7\n")

    def test_random_policy_same_answer(self, tmp_path, capsys):
        splits = write(tmp_path, "in.splits", REFERENCE)
        assert main(["closure", "--rule", "my", splits]) == 0
        canonical = capsys.readouterr().out
        for seed in (0, 7):
            code = main(
                ["closure", "--rule", "my", "--policy", "random:%d" % seed, splits]
            )
            assert code == 0
            assert capsys.readouterr().out == canonical

    def test_bad_policy_is_a_usage_error(self, tmp_path, capsys):
        splits = write(tmp_path, "in.splits", REFERENCE)
        with pytest.raises(SystemExit) as info:
            main(["closure", "--policy", "sorted", splits])
        assert info.value.code == 2

    def test_z_rule(self, tmp_path, capsys):
        splits = write(tmp_path, "in.splits", "taxa 1 2 3 4 5\n1 3 | 4 5\n3 4 | 2 5\n")
        assert main(["closure", "--rule", "z", splits]) == 0
        assert capsys.readouterr().out == (
            "taxa 1 2 3 4 5\n1 3 | 2 4 5\n1 3 4 | 2 5\n"
        )


class TestCheck:
    def test_weakly_compatible_yes(self, tmp_path, capsys):
        splits = write(
            tmp_path, "in.splits", "taxa 1 2 3 4 5\n1 2 | 3 5\n1 2 5 | 3 4\n"
        )
        assert main(["check", "--weakly-compatible", splits]) == 0
        assert capsys.readouterr().out == "weakly compatible: yes\n"

    def test_weakly_compatible_no_with_witness(self, tmp_path, capsys):
        splits = write(
            tmp_path,
            "in.splits",
            "taxa 1 2 3 4 5 6\n2 3 5 | 1 4 6\n2 4 | 1 3 5\n2 1 | 3 4 6\n",
        )
        assert main(["check", "--weakly-compatible", splits]) == 1
        out = capsys.readouterr().out
        assert out == (
            "weakly compatible: no\n"
            "triple 1,2|3,4,6; 1,3,5|2,4; 1,4,6|2,3,5 with side choice 000 "
            "has nonempty overlaps {1}, {2}, {3}, {4}\n"
        )

    def test_circular_yes(self, tmp_path, capsys):
        splits = write(
            tmp_path,
            "in.splits",
            (GOLDEN / "reference_closure.splits").read_text(),
        )
        assert main(["check", "--circular", splits]) == 0
        assert capsys.readouterr().out == "circular: yes\ncycle: 1,2,3,4,5\n"

    def test_weakly_compatible_but_not_circular(self, tmp_path, capsys):
        splits = write(
            tmp_path,
            "in.splits",
            "taxa 1 2 3 4 5\n1 2 | 3 5\n1 2 5 | 3 4\n1 3 | 2 4 5\n1 3 5 | 2 4\n",
        )
        assert main(["check", "--circular", splits]) == 1
        assert capsys.readouterr().out == (
            "circular: no (weakly compatible but not circular)\n"
        )

    def test_not_circular_not_compatible(self, tmp_path, capsys):
        splits = write(
            tmp_path,
            "in.splits",
            "taxa 1 2 3 4 5 6\n2 3 5 | 1 4 6\n2 4 | 1 3 5\n2 1 | 3 4 6\n",
        )
        assert main(["check", "--circular", splits]) == 1
        assert capsys.readouterr().out == "circular: no\n"

    def test_circular_infeasible(self, tmp_path, capsys):
        labels = " ".join(str(i) for i in range(1, 12))
        splits = write(
            tmp_path, "in.splits", "taxa %s\n1 2 | 3 4\n" % labels
        )
        assert main(["check", "--circular", splits]) == 2
        assert "error:" in capsys.readouterr().err
        assert main(["check", "--circular", "--max-n", "11", splits]) == 0

    def test_mode_flag_required(self, tmp_path):
        splits = write(tmp_path, "in.splits", "taxa 1 2\n1 | 2\n")
        with pytest.raises(SystemExit) as info:
            main(["check", splits])
        assert info.value.code == 2


class TestExportNexus:
    MIXED = "taxa 1 2 3 4 5\n1 2 | 3 4 5\n1 2 3 | 4 5\n1 2 | 3 4\n"

    def test_auto_cycle_golden(self, tmp_path, capsys):
        splits = write(tmp_path, "in.splits", self.MIXED)
        assert main(["export-nexus", splits]) == 0
        captured = capsys.readouterr()
        assert captured.out == (GOLDEN / "mixed.nexus").read_text()
        assert captured.err == (
            "warning: split 1,2|3,4 is partial and was not exported\n"
        )

    def test_cycle_none(self, tmp_path, capsys):
        splits = write(tmp_path, "in.splits", self.MIXED)
        assert main(["export-nexus", "--cycle", "none", splits]) == 0
        assert "CYCLE" not in capsys.readouterr().out

    def test_explicit_cycle(self, tmp_path, capsys):
        splits = write(tmp_path, "in.splits", "taxa 1 2 3 4 5\n1 2 | 3 4 5\n")
        assert main(["export-nexus", "--cycle", "2,1,3,4,5", splits]) == 0
        assert "CYCLE 2 1 3 4 5;" in capsys.readouterr().out

    def test_explicit_cycle_must_display(self, tmp_path, capsys):
        splits = write(tmp_path, "in.splits", "taxa 1 2 3 4 5\n1 2 | 3 4 5\n")
        assert main(["export-nexus", "--cycle", "1,3,2,4,5", splits]) == 2
        assert "does not display" in capsys.readouterr().err

    def test_no_full_splits(self, tmp_path, capsys):
        splits = write(tmp_path, "in.splits", "taxa 1 2 3 4 5\n1 2 | 3 4\n")
        assert main(["export-nexus", splits]) == 2
        assert "no full splits" in capsys.readouterr().err

    def test_output_file(self, tmp_path, capsys):
        splits = write(tmp_path, "in.splits", self.MIXED)
        out = tmp_path / "out.nex"
        assert main(["export-nexus", "-o", str(out), splits]) == 0
        capsys.readouterr()
        assert out.read_text() == (GOLDEN / "mixed.nexus").read_text()


class TestReport:
    def test_small_run(self, tmp_path, capsys):
        outdir = tmp_path / "rep"
        code = main(
            [
                "report",
                "-o",
                str(outdir),
                "--trials",
                "3",
                "--taxa",
                "6",
                "--tree-taxa",
                "4",
                "--trees",
                "4",
                "--seed",
                "3",
            ]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert out.startswith("hidden cycle: ")
        assert "trials: 3" in out
        tsv = (outdir / "trials.tsv").read_text().splitlines()
        assert len(tsv) == 4
        assert tsv[0].startswith("trial\t")
        pngs = sorted(p.name for p in outdir.glob("*.png"))
        assert pngs == ["outcomes.png", "partial_splits.png", "steps.png"]

    def test_bad_parameters(self, tmp_path, capsys):
        assert main(["report", "-o", str(tmp_path), "--taxa", "3"]) == 2
        assert "error:" in capsys.readouterr().err


class TestPipeline:
    def test_cli_matches_library(self, tmp_path, capsys, monkeypatch):
        text = "(a,b,(c,d));\n(c,d,(e,a));\n(b,c,(d,e));"
        trees_path = write(tmp_path, "t.nwk", text)
        assert main(["extract", "--drop-trivial", trees_path]) == 0
        splits_text = capsys.readouterr().out
        monkeypatch.setattr("sys.stdin", io.StringIO(splits_text))
        assert main(["closure", "--rule", "my", "-"]) == 0
        cli_closed = read_splits_file(capsys.readouterr().out)

        trees = parse_newick(text)
        universe = trees[0].universe
        collected = []
        for tree in trees:
            collected.extend(extract_splits(tree, include_trivial=False))
        system = SplitSystem(universe, collected).reduce()
        lib_closed = closure(system, RuleSelector.of("my")).system
        assert cli_closed.pairs() == lib_closed.pairs()
        assert cli_closed.universe.labels == lib_closed.universe.labels
