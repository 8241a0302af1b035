import json

import pytest

from upcap.cli import EXIT_LOW_CONFIDENCE, EXIT_OK, EXIT_USAGE, main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_simulate_confident(capsys):
    code, out, _ = run_cli(
        capsys, "simulate", "--sub", "240000", "--helpers", "3", "--ab", "100000",
        "--packets", "20", "--size", "8192", "--seed", "1",
    )
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["confident"] is True
    assert abs(report["estimate_bps"] - 240000) < 4800


def test_simulate_deterministic(capsys):
    args = ("simulate", "--sub", "240000", "--ab", "100000", "--loss", "0.2",
            "--jitter", "0.01", "--seed", "5")
    first = run_cli(capsys, *args)
    second = run_cli(capsys, *args)
    assert first == second


def test_simulate_zero_helpers_is_usage_error(capsys):
    code, _, err = run_cli(capsys, "simulate", "--sub", "240000", "--helpers", "0")
    assert code == EXIT_USAGE
    assert "helpers" in err


def test_simulate_total_loss_low_confidence(capsys):
    code, out, _ = run_cli(
        capsys, "simulate", "--sub", "240000", "--ab", "100000", "--loss", "1.0",
        "--packets", "5",
    )
    assert code == EXIT_LOW_CONFIDENCE


def test_simulate_trace_csv(tmp_path, capsys):
    trace = tmp_path / "trace.csv"
    code, _, _ = run_cli(
        capsys, "simulate", "--sub", "240000", "--ab", "100000", "--packets", "5",
        "--trace", str(trace),
    )
    assert code == EXIT_OK
    lines = trace.read_text().strip().splitlines()
    assert lines[0] == "time_s,kind,helper,bytes,rtt_s"
    assert len(lines) > 10


def test_alloc_table_and_agreement(capsys):
    code, out, _ = run_cli(capsys, "alloc", "--s", "2", "0", "2", "--p", "2", "2", "0")
    assert code == EXIT_OK
    assert "0,4" in out and "1,3" in out and "2,2" in out
    assert '"algorithms_agree": true' in out


def test_alloc_single_x(capsys):
    code, out, _ = run_cli(capsys, "alloc", "--s", "2", "0", "--p", "3", "1", "--x", "1")
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["total"] == 2
    assert report["own"][0] == 1


def test_alloc_n1_rejected(capsys):
    code, _, err = run_cli(capsys, "alloc", "--s", "5", "--p", "5")
    assert code == EXIT_USAGE
    assert "N >= 2" in err


def test_alloc_malformed_instance(tmp_path, capsys):
    f = tmp_path / "inst.txt"
    f.write_text("S: 1 2 3\n")  # missing P line
    code, _, err = run_cli(capsys, "alloc", "--instance", str(f))
    assert code == EXIT_USAGE


def test_alloc_missing_args(capsys):
    code, _, err = run_cli(capsys, "alloc")
    assert code == EXIT_USAGE


def test_aub_search_reports_ladder(capsys):
    code, out, _ = run_cli(
        capsys, "aub", "--mode", "search", "--sub", "240000",
        "--background", "140000", "--seed", "1",
    )
    assert code == EXIT_OK
    report = json.loads(out)
    assert abs(report["aub_bps"] - 100000) < 5000
    assert any(not step["passed"] for step in report["ladder"])


def test_aub_ping_pass_and_fail(capsys):
    code, out, _ = run_cli(
        capsys, "aub", "--mode", "ping", "--sub", "61440", "--rate", "25600",
        "--duration", "20", "--seed", "2",
    )
    assert code == EXIT_OK and json.loads(out)["quality"] is True
    code, out, _ = run_cli(
        capsys, "aub", "--mode", "ping", "--sub", "61440", "--rate", "70000",
        "--duration", "20", "--seed", "2",
    )
    assert code == EXIT_LOW_CONFIDENCE and json.loads(out)["quality"] is False


def test_aub_rejects_bad_cr(capsys):
    code, _, err = run_cli(capsys, "aub", "--sub", "240000", "--cr", "0")
    assert code == EXIT_USAGE


def test_unknown_command_usage_error(capsys):
    assert main(["definitely-not-a-command"]) == EXIT_USAGE
