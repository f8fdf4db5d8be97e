import json
import subprocess
import sys

import pytest

from arraygrammar.cli import main
from arraygrammar.engine import read_trace, replay
from arraygrammar.grid import read_pattern

HEADER = "@grammar t\n@nonterminals S A\n@terminals a b\n@start S\n@blank #\n"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        path = tmp_path / name
        path.write_text(text)
        return str(path)
    return _write


class TestDerive:
    def test_terminal_run(self, capsys, tmp_path, cpag):
        trace_path = tmp_path / "t.trace"
        code, out, _err = run(capsys, "derive", "--builtin", "cpag", "--window", "3x3",
                             "--start", "0,0", "--seed", "7", "--trace", str(trace_path))
        assert code == 0
        trace = read_trace(trace_path.read_text(), cpag)
        assert out.strip() == trace.final.to_text()
        assert "A" not in out and "S" not in out
        replay(cpag, trace)

    def test_dead_end(self, capsys, tmp_path):
        trace_path = tmp_path / "t.trace"
        code, _out, err = run(capsys, "derive", "--builtin", "cpag", "--window", "1x1",
                             "--trace", str(trace_path))
        assert code == 3
        assert "no applicable rule" in err
        assert "reason: no applicable rule" in trace_path.read_text()

    def test_bad_start(self, capsys):
        code, _, err = run(capsys, "derive", "--builtin", "cpag", "--window", "3x3", "--start", "5,5")
        assert code == 2 and "outside" in err

    def test_bad_grammar_file(self, capsys, write):
        path = write("bad.iag", HEADER + "@rule R\nS #\n=>\nc A\n@end\n")
        code, _, err = run(capsys, "derive", path)
        assert code == 2 and "'c'" in err and ":9:1:" in err

    def test_missing_grammar(self, capsys):
        assert run(capsys, "derive")[0] == 2

    def test_both_sources_rejected(self, capsys, write):
        with pytest.raises(SystemExit) as exc:
            main(["derive", write("g.iag", HEADER), "--builtin", "cpag"])
        assert exc.value.code == 2


class TestCheck:
    def test_center_grain(self, capsys, write):
        code, out, _ = run(capsys, "check", "--builtin", "cpag", "--pattern", write("p.txt", "000\n010\n000\n"))
        assert code == 0 and out.startswith("grammar: cpag")

    def test_paper_array_trace_replays(self, capsys, write, tmp_path, cpag):
        trace_path = tmp_path / "w.trace"
        code, _, _ = run(capsys, "check", "--builtin", "cpag", "--pattern", write("p.txt", "001\n010\n000\n"),
                         "--starts", "0,0", "--trace", str(trace_path))
        assert code == 0
        assert str(replay(cpag, read_trace(trace_path.read_text(), cpag))) == "b b a / b a b / b b b"

    def test_gap_grid(self, capsys, write):
        code, _, err = run(capsys, "check", "--builtin", "cpag", "--pattern", write("g.txt", "a # a\n"))
        assert code == 1 and "not derivable" in err

    def test_inconclusive(self, capsys, write):
        code, _, _ = run(capsys, "check", "--builtin", "cpag", "--pattern", write("p.txt", "001\n010\n000\n"),
                         "--budget", "2")
        assert code == 4

    def test_malformed_pattern(self, capsys, write):
        code, _, _ = run(capsys, "check", "--builtin", "cpag", "--pattern", write("p.txt", "0a\n1\n"))
        assert code == 2


class TestCensus:
    @pytest.mark.parametrize("extra,count", [
        (["--grains", "2"], 8), (["--grains", "3"], 28), ([], 256),
    ])
    def test_counts(self, capsys, extra, count):
        code, out, _ = run(capsys, "census", "--window", "3x3", "--connectivity", "8", "--center-fixed", *extra)
        assert code == 0 and f"count: {count}\n" in out

    def test_four_connected(self, capsys):
        _code, out, _ = run(capsys, "census", "--window", "3x3", "--connectivity", "4", "--center-fixed",
                           "--grains", "2")
        assert "count: 4\n" in out

    def test_list_and_json(self, capsys):
        _code, out, _ = run(capsys, "census", "--window", "3x3", "--center-fixed", "--grains", "2",
                           "--list", "--format", "json")
        doc = json.loads(out)
        assert doc["count"] == 8 and len(doc["keys"]) == 8 and doc["includes_empty"] is False

    def test_text_list_renders(self, capsys):
        _, out, _ = run(capsys, "census", "--window", "3x3", "--center-fixed", "--grains", "2", "--list")
        assert "[144]\n010\n010\n000" in out

    def test_oversize(self, capsys):
        assert run(capsys, "census", "--window", "6x6")[0] == 2

    def test_threads_do_not_change_output(self, capsys):
        a = run(capsys, "census", "--window", "3x3", "--list", "--format", "json")[1]
        b = run(capsys, "census", "--window", "3x3", "--list", "--format", "json", "--threads", "4")[1]
        assert a == b


class TestEnumerate:
    def test_one_by_two(self, capsys):
        code, out, _ = run(capsys, "enumerate", "--builtin", "cpag", "--window", "1x2", "--list")
        assert code == 0
        assert "derivable: 4\n" in out and "keys: 0 1 2 3\n" in out

    def test_empty_grammar(self, capsys, write):
        code, out, err = run(capsys, "enumerate", write("e.iag", HEADER), "--window", "2x2")
        assert code == 0 and "derivable: 0\n" in out and "no rules" in err

    def test_capped(self, capsys):
        assert run(capsys, "enumerate", "--builtin", "cpag", "--window", "2x2", "--cap", "2")[0] == 4

    def test_bad_cap(self, capsys):
        assert run(capsys, "enumerate", "--builtin", "cpag", "--window", "2x2", "--cap", "0")[0] == 2

    def test_coverage_small(self, capsys):
        code, out, _ = run(capsys, "enumerate", "--builtin", "cpag", "--window", "2x3", "--coverage",
                           "--format", "json")
        doc = json.loads(out)
        assert code == 0 and doc["search_exhausted"] is True
        assert "derivable_not_connected" in doc and "connected_not_derivable" in doc


class TestValidate:
    def test_builtin(self, capsys):
        code, out, _ = run(capsys, "validate", "--builtin", "cpag", "--classify")
        assert code == 0
        assert "violations: 0" in out and "context_free_grammar: yes" in out
        assert out.count("C1=ok C2=ok C3=ok context_free=yes") == 23

    def test_c3_violation(self, capsys, write):
        path = write("c3.iag", HEADER + "@rule bad\nA a\n=>\na b\n@end\n")
        code, out, _ = run(capsys, "validate", path)
        assert code == 1
        assert "bad: C1=ok C2=ok C3=FAIL" in out and "(0,1)" in out

    def test_shape_mismatch(self, capsys, write):
        path = write("c1.iag", HEADER + "@rule R\nS #\n=>\na A b\n@end\n")
        code, _, err = run(capsys, "validate", path)
        assert code == 2 and "[C1]" in err


class TestRender:
    def test_ascii(self, capsys):
        code, out, _ = run(capsys, "render", "--key", "80", "--window", "3x3", "--format", "ascii")
        assert code == 0 and out == "001\n010\n000\n"

    def test_pbm(self, capsys, tmp_path):
        out_path = tmp_path / "p.pbm"
        run(capsys, "render", "--key", "80", "--window", "3x3", "--format", "pbm", "--out", str(out_path))
        assert out_path.read_text() == "P1\n3 3\n0 0 1\n0 1 0\n0 0 0\n"

    def test_key_out_of_range(self, capsys):
        assert run(capsys, "render", "--key", "512", "--window", "3x3")[0] == 2

    @pytest.mark.parametrize("text", ["001\n010\n000\n", "1\n", "0110\n1001\n"])
    def test_pattern_round_trip(self, capsys, write, text):
        _, out, _ = run(capsys, "render", "--pattern", write("p.txt", text))
        assert out == text and read_pattern(out) == read_pattern(text)


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "arraygrammar", "census", "--window", "3x3", "--center-fixed", "--grains", "3"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and "count: 28" in proc.stdout
