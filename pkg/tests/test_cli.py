"""CLI: payloads, exit codes, determinism, both output formats."""

import json

import pytest

from intdensity.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run_cli(capsys, *argv)
    return code, json.loads(out)


class TestDensity:
    def test_plain(self, capsys):
        code, report = run_json(
            capsys, "density", "--set", "evens", "--checkpoints", "2,4,8"
        )
        assert code == 0
        assert report["results"]["values"] == ["1/2", "1/2", "1/2"]
        assert report["schema_version"] == 1

    def test_preimage(self, capsys):
        code, report = run_json(
            capsys,
            "density", "--set", "evens", "--checkpoints", "4,8",
            "--sampler", "double",
        )
        assert code == 0
        assert report["results"]["values"] == ["1", "1"]

    def test_image(self, capsys):
        code, report = run_json(
            capsys,
            "density", "--set", "list:0,1,2", "--checkpoints", "3,6",
            "--horizon", "6", "--sampler", "swapblocks:3", "--direction", "image",
        )
        assert code == 0
        assert report["results"]["values"] == ["0", "1/2"]

    def test_bad_spec_is_usage_error(self, capsys):
        code, _ = run_cli(capsys, "density", "--set", "wat", "--checkpoints", "2")
        assert code == 2


class TestConstructionCommands:
    def test_prefix_set(self, capsys):
        code, report = run_json(
            capsys, "prefix-set", "--set", "evens", "--horizon", "8", "--count", "4"
        )
        assert code == 0
        assert report["results"]["codes"] == [0, 2, 5, 12]
        assert report["checks"][0]["pass"]

    def test_tree_decode(self, capsys):
        code, report = run_json(
            capsys,
            "tree-decode", "--prefix-sampler-of", "evens",
            "--q", "2", "--full-height", "1", "--depth", "4",
        )
        assert code == 0
        assert report["results"]["candidates"] == ["1010"]

    def test_introreduce_ok(self, capsys):
        code, report = run_json(capsys, "introreduce", "--codes", "2,5")
        assert code == 0
        assert report["results"]["bits"] == "10"

    def test_introreduce_conflict_fails(self, capsys):
        code, report = run_json(capsys, "introreduce", "--codes", "1,2")
        assert code == 1
        assert report["checks"][0]["detail"]["position"] == 0

    def test_wct_oracle(self, capsys):
        code, report = run_json(
            capsys,
            "wct", "--set", "seed:42", "--horizon", "512",
            "--nmax", "4", "--oracle-trace",
        )
        assert code == 0
        blocks = report["results"]["blocks"]
        assert len(blocks) == 4
        assert all(row["meets_bound"] for row in blocks)

    def test_wct_trace_file(self, capsys, tmp_path):
        trace = tmp_path / "trace.txt"
        trace.write_text("1:0000\n2:0000\n3:0000\n")
        code, report = run_json(
            capsys,
            "wct", "--set", "seed:42", "--horizon", "512",
            "--nmax", "3", "--trace-file", str(trace),
        )
        assert code == 0  # no guess matches the truth, so no bound is owed
        assert report["checks"] == []

    def test_graph(self, capsys):
        code, report = run_json(capsys, "graph", "--values", "0,1,2")
        assert code == 0
        assert report["results"]["members"] == [0, 4, 12]

    def test_trace(self, capsys):
        code, report = run_json(
            capsys, "trace", "--sampler", "identity", "--q", "1", "--n", "2"
        )
        assert code == 0
        assert report["results"]["trace"] == [0, 1]

    def test_hits(self, capsys):
        code, report = run_json(
            capsys,
            "hits", "--sampler", "identity", "--values", "0,0,0", "--q", "1",
        )
        assert code == 0
        assert report["results"]["hits"] == [0, 1]
        assert all(c["pass"] for c in report["checks"])

    def test_dom(self, capsys):
        code, report = run_json(
            capsys,
            "dom", "--sampler", "identity", "--f-values", "1,2,4,8",
            "--q", "2", "--nmax", "3",
        )
        assert code == 0
        rows = report["results"]["rows"]
        assert rows[0]["adversary"] == 3  # 1 + max over [0, 2]


class TestCodesCommands:
    def test_k(self, capsys):
        assert run_json(capsys, "codes", "k", "--n", "5")[1]["results"]["code"] == "001101"
        assert run_json(capsys, "codes", "k", "--decode", "001101")[1]["results"]["n"] == 5

    def test_c(self, capsys):
        _, report = run_json(capsys, "codes", "c", "--n", "5", "--x", "24")
        assert report["results"]["code"] == "11000"
        _, report = run_json(capsys, "codes", "c", "--n", "5", "--decode", "11000")
        assert report["results"]["x"] == 24

    def test_pair(self, capsys):
        _, report = run_json(capsys, "codes", "pair", "--x", "2", "--y", "2")
        assert report["results"]["code"] == 12
        _, report = run_json(capsys, "codes", "pair", "--decode", "12")
        assert report["results"] == {"x": 2, "y": 2}

    def test_string(self, capsys):
        _, report = run_json(capsys, "codes", "string", "--encode", "10")
        assert report["results"]["code"] == 5
        _, report = run_json(capsys, "codes", "string", "--decode", "5")
        assert report["results"]["bits"] == "10"

    def test_setcode(self, capsys):
        _, report = run_json(capsys, "codes", "setcode", "--members", "0,2")
        assert report["results"]["code"] == 5
        _, report = run_json(capsys, "codes", "setcode", "--decode", "5")
        assert report["results"]["members"] == [0, 2]

    def test_rejected_value_is_usage_error(self, capsys):
        assert run_cli(capsys, "codes", "k", "--n", "0")[0] == 2


class TestWeakrepCommands:
    def test_validate_good(self, capsys, tmp_path):
        table = tmp_path / "table.txt"
        table.write_text("0,2,3\n0,2,4\n0,2,5\n0,2,6\n")
        code, report = run_json(
            capsys, "weakrep", "validate", "--table-file", str(table)
        )
        assert code == 0
        assert all(c["pass"] for c in report["checks"])

    def test_validate_bad_exits_one(self, capsys, tmp_path):
        table = tmp_path / "table.txt"
        table.write_text("0,1,2\n0,1,3\n0,2,3\n0,2,2\n")
        code, report = run_json(
            capsys, "weakrep", "validate", "--table-file", str(table), "--horizon", "3"
        )
        assert code == 1
        failing = {c["name"] for c in report["checks"] if not c["pass"]}
        assert "consistency" in failing

    def test_of_program(self, capsys, tmp_path):
        manifest = tmp_path / "manifest.txt"
        manifest.write_text("identity\ndiverge\n")
        code, report = run_json(
            capsys,
            "weakrep", "of-program", "--manifest", str(manifest),
            "--index", "0", "--horizon", "3",
        )
        assert code == 0
        assert "0,0,1" in report["results"]["triples"]

    def test_interleave(self, capsys, tmp_path):
        manifest = tmp_path / "manifest.txt"
        manifest.write_text("identity\nconst:5\n")
        code, report = run_json(
            capsys,
            "weakrep", "interleave", "--manifest", str(manifest), "--grid", "6",
        )
        assert code == 0
        assert report["results"]["evaluations"][0][:4] == [0, 0, 1, 1]
        assert all(c["pass"] for c in report["checks"])


class TestPset:
    def test_worked_example(self, capsys, tmp_path):
        manifest = tmp_path / "manifest.txt"
        manifest.write_text("identity\ndiverge\n")
        sigma = tmp_path / "sigma.txt"
        sigma.write_text("default:0\n")
        code, report = run_json(
            capsys,
            "pset", "--values", "0", "--manifest", str(manifest),
            "--sigma-file", str(sigma), "--checkpoints", "2",
        )
        assert code == 0
        assert report["results"]["p_bounds"] == [1]
        assert report["results"]["codes"] == [2]


class TestOutputDiscipline:
    def test_csv_format(self, capsys):
        code, out = run_cli(
            capsys, "--format", "csv", "codes", "pair", "--x", "1", "--y", "0"
        )
        assert code == 0
        assert out.splitlines()[0] == "key,value"
        assert "results.code,1" in out

    def test_repeat_invocations_are_byte_identical(self, capsys):
        argv = ("density", "--set", "seed:3:p=1/3", "--checkpoints", "16,64,256")
        _, first = run_cli(capsys, *argv)
        _, second = run_cli(capsys, *argv)
        assert first == second

    def test_unknown_flag_exits_two(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["density", "--nope"])
        assert exc.value.code == 2
