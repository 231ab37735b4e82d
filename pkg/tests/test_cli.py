import json

import pytest

from tmlab.cli import main
from tmlab.machine import parse, serialize
from tmlab.sampling import sample_program_for_trial
from tmlab.walks import falloff_cdf

from conftest import program_text

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"

HALTER_TEXT = program_text(1, 2, {
    (1, 0): ("H", 0, "R"),
    (1, 1): ("H", 0, "R"),
})

FALLER_TEXT = program_text(1, 2, {
    (1, 0): ("q1", 1, "L"),
    (1, 1): ("H", 1, "L"),
})


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestClassify:
    def test_halter(self, tmp_path, capsys):
        path = tmp_path / "halter.tm"
        path.write_text(HALTER_TEXT)
        code, out, err = run_cli(capsys, "classify", str(path))
        assert code == 0 and err == ""
        doc = json.loads(out)
        assert doc["classification"]["verdict"] == "halts-before-repeat"
        assert doc["halting_decision"] == "halts"
        assert doc["halts_or_falls_before_repeat"] is True
        assert doc["conservative_verdict"]["verdict"] == "halts"
        assert doc["conservative_budget"] == 10
        assert doc["model"] == "oneway"

    def test_model_changes_conservative_verdict(self, tmp_path, capsys):
        path = tmp_path / "faller.tm"
        path.write_text(FALLER_TEXT)
        _, out, _ = run_cli(capsys, "classify", str(path))
        assert json.loads(out)["conservative_verdict"]["reason"] == "fell-off"
        _, out, _ = run_cli(capsys, "classify", str(path), "--model", "twoway")
        doc = json.loads(out)
        # no edge on the two-way tape: the walker cycles in fresh fill cells
        assert doc["conservative_verdict"]["verdict"] == "unknown"

    def test_budget_flag(self, tmp_path, capsys):
        path = tmp_path / "halter.tm"
        path.write_text(HALTER_TEXT)
        _, out, _ = run_cli(capsys, "classify", str(path), "--budget", "0")
        doc = json.loads(out)
        assert doc["conservative_verdict"]["verdict"] == "unknown"
        assert doc["conservative_budget"] == 0

    def test_parse_error_exits_2(self, tmp_path, capsys):
        path = tmp_path / "bad.tm"
        path.write_text("tm n=1 a=2\nq1 0 -> H 0 R\nq1 1 -> H 0 X\n")
        code, out, err = run_cli(capsys, "classify", str(path))
        assert code == 2 and out == ""
        assert "line 3" in err

    def test_missing_file_exits_2(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "classify", str(tmp_path / "nope.tm"))
        assert code == 2
        assert "error:" in err

    def test_output_file(self, tmp_path, capsys):
        path = tmp_path / "halter.tm"
        path.write_text(HALTER_TEXT)
        out_path = tmp_path / "verdict.json"
        code, out, _ = run_cli(capsys, "classify", str(path), "--output", str(out_path))
        assert code == 0 and out == ""
        assert json.loads(out_path.read_text())["halting_decision"] == "halts"


class TestSample:
    def test_matches_library_sampling(self, capsys):
        code, out, _ = run_cli(
            capsys, "sample", "--n", "2", "--seed", "5", "--count", "2",
        )
        assert code == 0
        blocks = out.split("\n\n")
        assert len(blocks) == 2
        assert parse(blocks[0]) == sample_program_for_trial(5, 0, 2)
        assert parse(blocks[1]) == sample_program_for_trial(5, 1, 2)

    def test_trial_offset(self, capsys):
        _, out, _ = run_cli(capsys, "sample", "--n", "2", "--seed", "5", "--trial", "7")
        assert parse(out) == sample_program_for_trial(5, 7, 2)

    def test_hex_seed(self, capsys):
        _, hex_out, _ = run_cli(capsys, "sample", "--n", "1", "--seed", "0x10")
        _, dec_out, _ = run_cli(capsys, "sample", "--n", "1", "--seed", "16")
        assert hex_out == dec_out

    def test_json_lines(self, capsys):
        _, out, _ = run_cli(
            capsys, "sample", "--n", "1", "--seed", "3", "--count", "3",
            "--format", "json",
        )
        lines = out.strip().split("\n")
        assert len(lines) == 3
        docs = [json.loads(line) for line in lines]
        assert all(doc["n"] == 1 for doc in docs)


class TestEnumerate:
    def test_default_event_n1(self, capsys):
        code, out, _ = run_cli(capsys, "enumerate", "--n", "1")
        assert code == 0
        assert "# schema=tmlab.exact-density/1" in out
        row = out.strip().split("\n")[-1]
        assert row == "halts-or-falls-before-repeat,2,1,48,64,3,4,0.75"

    def test_json_format(self, capsys):
        _, out, _ = run_cli(
            capsys, "enumerate", "--n", "1", "--event", "no-halt-transition",
            "--format", "json",
        )
        doc = json.loads(out)
        assert doc["rows"][0]["hits"] == 16
        assert doc["rows"][0]["denominator"] == 4

    def test_guard_exits_2(self, capsys):
        code, _, err = run_cli(capsys, "enumerate", "--n", "4")
        assert code == 2
        assert "25600000000" in err

    def test_unknown_event_exits_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["enumerate", "--n", "1", "--event", "explodes"])
        assert exc.value.code == 2


class TestDensity:
    def test_basic_run(self, capsys):
        code, out, _ = run_cli(
            capsys, "density", "--event", "repeats-state", "--n", "1,2",
            "--trials", "200", "--seed", "9", "--engine", "pure",
        )
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "# schema=tmlab.density/1"
        body = [l for l in lines if not l.startswith("#")]
        assert body[0] == "event,model,a,n,trials,hits,p_hat,ci_lo,ci_hi,master_seed"
        assert len(body) == 3
        assert body[1].startswith("repeats-state,oneway,2,1,200,")
        assert body[2].startswith("repeats-state,oneway,2,2,200,")

    def test_worker_count_never_changes_bytes(self, capsys):
        argv = [
            "density", "--event", "halts-or-falls-before-repeat", "--n", "1,3,5",
            "--trials", "400", "--seed", "77", "--engine", "compiled",
        ]
        outputs = set()
        for workers in ("1", "3", "4"):
            _, out, _ = run_cli(capsys, *argv, "--workers", workers)
            outputs.add(out)
        assert len(outputs) == 1

    def test_engines_agree(self, capsys):
        argv = [
            "density", "--event", "halts-within-budget", "--n", "2,4",
            "--trials", "300", "--seed", "123",
        ]
        _, pure_out, _ = run_cli(capsys, *argv, "--engine", "pure")
        _, compiled_out, _ = run_cli(capsys, *argv, "--engine", "compiled")
        assert pure_out == compiled_out

    def test_config_line_replays(self, capsys):
        argv = [
            "density", "--event", "repeats-state", "--n", "1,2",
            "--trials", "150", "--seed", "42", "--engine", "pure",
        ]
        _, out, _ = run_cli(capsys, *argv)
        config_line = next(l for l in out.split("\n") if l.startswith("# config="))
        config = json.loads(config_line[len("# config="):])
        _, replay, _ = run_cli(
            capsys, "density", "--event", config["event"],
            "--n", ",".join(str(n) for n in config["n_grid"]),
            "--a", str(config["a"]),
            "--model", config["model"],
            "--trials", str(config["trials"]),
            "--seed", str(config["master_seed"]),
            "--format", config["format"], "--engine", "pure",
        )
        assert replay == out

    def test_two_way_rejects_edge_event(self, capsys):
        code, _, err = run_cli(
            capsys, "density", "--event", "falls-off-before-repeat", "--n", "1",
            "--model", "twoway", "--trials", "10", "--engine", "pure",
        )
        assert code == 2
        assert "two-way" in err

    def test_plot(self, tmp_path, capsys):
        png = tmp_path / "fig.png"
        code, out, _ = run_cli(
            capsys, "density", "--event", "repeats-state", "--n", "1,2",
            "--trials", "50", "--engine", "pure", "--plot", str(png),
        )
        assert code == 0
        assert out.startswith("# schema=")
        assert png.read_bytes()[:8] == PNG_MAGIC

    def test_json_format(self, capsys):
        _, out, _ = run_cli(
            capsys, "density", "--event", "repeats-state", "--n", "1",
            "--trials", "50", "--engine", "pure", "--format", "json",
        )
        doc = json.loads(out)
        assert doc["schema"] == "tmlab.density/1"
        assert doc["rows"][0]["trials"] == 50


class TestWalk:
    def test_exact_column(self, capsys):
        code, out, _ = run_cli(
            capsys, "walk", "--k", "1,3,5", "--trials", "100",
            "--engine", "pure",
        )
        assert code == 0
        body = [l for l in out.strip().split("\n") if not l.startswith("#")]
        assert body[0] == "k,exact_cdf,mc_estimate,ci_lo,ci_hi"
        for line, k in zip(body[1:], (1, 3, 5)):
            cells = line.split(",")
            assert cells[0] == str(k)
            assert float(cells[1]) == falloff_cdf(k)
            assert cells[2] != ""

    def test_exact_only(self, capsys):
        _, out, _ = run_cli(capsys, "walk", "--k", "1,3", "--exact-only")
        body = [l for l in out.strip().split("\n") if not l.startswith("#")]
        assert body[1] == "1,0.5,,,"
        config = json.loads(
            next(l for l in out.split("\n") if l.startswith("# config="))[len("# config="):]
        )
        assert config["trials"] is None

    def test_dim2_has_no_exact_column(self, capsys):
        _, out, _ = run_cli(
            capsys, "walk", "--k", "2", "--dim", "2", "--trials", "50",
            "--engine", "pure",
        )
        body = [l for l in out.strip().split("\n") if not l.startswith("#")]
        assert body[1].startswith("2,,")

    def test_worker_invariance(self, capsys):
        argv = ["walk", "--k", "9,17", "--trials", "500", "--seed", "3",
                "--engine", "compiled"]
        outputs = {run_cli(capsys, *argv, "--workers", w)[1] for w in ("1", "4")}
        assert len(outputs) == 1

    def test_dim3_rejected_by_parser(self):
        with pytest.raises(SystemExit) as exc:
            main(["walk", "--k", "1", "--dim", "3"])
        assert exc.value.code == 2

    def test_negative_horizon_exits_2(self, capsys):
        code, _, err = run_cli(capsys, "walk", "--k", "-1", "--exact-only")
        assert code == 2
        assert "horizon" in err

    def test_plot(self, tmp_path, capsys):
        png = tmp_path / "walk.png"
        code, _, _ = run_cli(
            capsys, "walk", "--k", "1,5", "--trials", "50", "--engine", "pure",
            "--plot", str(png),
        )
        assert code == 0
        assert png.read_bytes()[:8] == PNG_MAGIC


class TestSerializedSampleRoundtrip:
    def test_sampled_text_reparses(self, capsys):
        _, out, _ = run_cli(capsys, "sample", "--n", "5", "--seed", "44")
        p = parse(out)
        assert serialize(p) == out
