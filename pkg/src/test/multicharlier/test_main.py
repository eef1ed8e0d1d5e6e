import json
from fractions import Fraction

import pytest

from errors import ConfigError
from main import RunConfig, default_sigma, main, parse_injection


def _run(capsys, *argv) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_eval_three_methods_agree(capsys):
    """Test C_(1,1)(3) = -1 for sigma = (1, 2) by every method."""
    code, out, _ = _run(capsys, "eval", "--sigma", "1,2", "--n", "1,1", "--k", "3")
    assert code == 0
    data = json.loads(out)
    assert data["value"] == "-1"
    assert data["agree"] is True
    assert set(data["methods"]) == {"recurrence", "explicit", "genfunc"}


def test_eval_constant_and_classical(capsys):
    """Test C_0 = 1 and the r = 1 value k - sigma at k = 0."""
    code, out, _ = _run(capsys, "eval", "--n", "0,0", "--k", "5")
    assert code == 0 and json.loads(out)["value"] == "1"
    code, out, _ = _run(capsys, "eval", "--r", "1", "--sigma", "1", "--n", "1", "--k", "0", "--format", "text")
    assert code == 0
    assert out == "C_(1,)(0) = -1  [methods agree]\n"


@pytest.mark.parametrize(
    "argv",
    [
        ["eval", "--n", "9,0"],
        ["eval", "--n", "1,1", "--k", "7"],
        ["eval", "--n", "1"],
        ["eval", "--sigma", "0.5,2", "--n", "1,0"],
        ["eval", "--sigma", "1,1", "--n", "1,0"],
        ["table", "--kmax", "9", "--cutoff", "8"],
        ["bench", "--nmax", "9", "--cutoff", "8"],
        ["bench", "--strategies", "magic"],
        ["bench", "--nmax", "0"],
        ["verify", "--suite", "drift"],
        ["verify", "--suite", "nonsense"],
        ["verify", "--inject", "1,1:x:1"],
        ["verify", "--inject", "7,0:0:1", "--nmax", "2"],
    ],
)
def test_config_errors_exit_2(capsys, argv):
    """Test that invalid configuration exits 2 with an ERROR line on stderr."""
    code, out, err = _run(capsys, *argv)
    assert code == 2
    assert out == ""
    assert "ERROR:" in err


def test_verify_compatibility_vacuous_for_r1(capsys):
    code, out, _ = _run(capsys, "verify", "--suite", "compatibility", "--r", "1", "--sigma", "1")
    assert code == 0
    report = json.loads(out)
    assert report["pass"]
    assert report["suites"][0]["checks"][0]["checked"] == 0


def test_verify_all_passes(capsys):
    """Test the full suite for r = 2, sigma = (1, 2), nmax = kmax = 5, D = 8."""
    code, out, _ = _run(
        capsys, "verify", "--suite", "all", "--sigma", "1,2", "--nmax", "5", "--kmax", "5", "--cutoff", "8"
    )
    report = json.loads(out)
    assert code == 0, [s["suite"] for s in report["suites"] if not s["pass"]]
    assert [s["suite"] for s in report["suites"]] == [
        "orthogonality", "compatibility", "backward", "forward", "difference", "rij", "agreement", "fock", "psi",
    ]


def test_verify_negative_control(capsys):
    """Test an injected coefficient is located by the orthogonality suite."""
    code, out, _ = _run(capsys, "verify", "--suite", "orthogonality", "--sigma", "1,2", "--inject", "1,1:0:1")
    assert code == 1
    report = json.loads(out)
    failing = [c for c in report["suites"][0]["checks"] if not c["pass"]]
    assert [c["index"] for c in failing] == [[1, 1]]
    assert failing[0]["conditions"][0]["mantissa"] == "1"


@pytest.mark.parametrize("suite", ["agreement", "compatibility", "fock"])
def test_verify_negative_control_other_suites(capsys, suite):
    code, _, _ = _run(
        capsys, "verify", "--suite", suite, "--nmax", "3", "--kmax", "3", "--cutoff", "5", "--inject", "1,1:1:1/2"
    )
    assert code == 1


def test_verify_output_is_deterministic(capsys, monkeypatch):
    """Test identical config gives byte-identical output regardless of thread count."""
    argv = ["verify", "--suite", "orthogonality", "--suite", "rij", "--nmax", "4", "--format", "csv"]
    _, first, _ = _run(capsys, *argv)
    monkeypatch.setenv("MULTICHARLIER_JOBS", "3")
    _, second, _ = _run(capsys, *argv)
    _, third, _ = _run(capsys, *argv, "--jobs", "2")
    assert first == second == third
    assert first.startswith("suite,check,pass,checked,failures\n")


def test_verify_text_format(capsys):
    code, out, _ = _run(capsys, "verify", "--suite", "psi", "--nmax", "4", "--kmax", "4", "--format", "text")
    assert code == 0
    assert "PASS  psi" in out
    assert "PASSED" in out


def test_table_csv(capsys):
    """Test the CSV row of C_(1,1) at k = 0..4."""
    code, out, _ = _run(capsys, "table", "--sigma", "1,2", "--nmax", "2", "--kmax", "4", "--format", "csv")
    assert code == 0
    assert "1,1,2,-1,-2,-1,2" in out.splitlines()


def test_table_degree_zero(capsys):
    code, out, _ = _run(capsys, "table", "--nmax", "0", "--format", "text")
    assert code == 0
    assert out == "(0, 0): 1\n"


def test_table_round_trip_and_drift(capsys, tmp_path):
    """Test an exported table passes drift, and a hand-edited one fails it."""
    path = tmp_path / "table.json"
    code, out, _ = _run(capsys, "table", "--nmax", "3", "--out", str(path))
    assert code == 0 and out == ""

    code, out, _ = _run(capsys, "verify", "--suite", "drift", "--table-in", str(path))
    assert code == 0

    data = json.loads(path.read_text())
    data["entries"][2]["coeffs"][0] = "7"
    path.write_text(json.dumps(data))
    code, out, _ = _run(capsys, "verify", "--suite", "drift", "--table-in", str(path))
    assert code == 1
    failures = json.loads(out)["suites"][0]["checks"][0]["failures"]
    assert failures[0]["status"] == "MODIFIED"
    assert failures[0]["index"] == [0, 1]


@pytest.mark.parametrize(
    "edit",
    [
        lambda entries: entries.remove(next(e for e in entries if e["index"] == [1, 1])),
        lambda entries: entries[0].update(index=["a", 0]),
    ],
)
def test_table_in_incomplete_or_malformed(capsys, tmp_path, edit):
    """Test an imported table with a dropped entry or a non-integer index exits 2, not a traceback."""
    path = tmp_path / "table.json"
    _run(capsys, "table", "--nmax", "3", "--out", str(path))
    data = json.loads(path.read_text())
    edit(data["entries"])
    path.write_text(json.dumps(data))
    for suite in ("compatibility", "drift"):
        code, out, err = _run(capsys, "verify", "--suite", suite, "--table-in", str(path))
        assert code == 2
        assert out == ""
        assert "ERROR:" in err


def test_table_in_missing_file(capsys, tmp_path):
    code, _, err = _run(capsys, "verify", "--table-in", str(tmp_path / "absent.json"))
    assert code == 2
    assert "ERROR:" in err


def test_bench_single_strategy(capsys):
    code, out, _ = _run(capsys, "bench", "--strategies", "recurrence", "--nmax", "1")
    assert code == 0
    data = json.loads(out)
    assert len(data["rows"]) == 1
    assert data["rows"][0]["entries"] == 3


def test_bench_repeated_strategy_is_one_row(capsys):
    code, out, _ = _run(capsys, "bench", "--strategies", "recurrence,explicit,recurrence", "--nmax", "2")
    assert code == 0
    data = json.loads(out)
    assert [r["strategy"] for r in data["rows"]] == ["recurrence", "explicit"]
    assert len(data["ladder"]) == 4


def test_bench_all_strategies_agree(capsys):
    """Test the three strategies agree and report one row each at the top degree."""
    code, out, _ = _run(capsys, "bench", "--nmax", "4", "--kmax", "4")
    assert code == 0
    data = json.loads(out)
    assert data["agree"] is True
    assert [r["strategy"] for r in data["rows"]] == ["recurrence", "explicit", "genfunc"]
    assert len(data["ladder"]) == 12
    assert all(r["peak_bits"] > 0 for r in data["ladder"])


def test_bench_history(capsys, tmp_path, monkeypatch):
    pytest.importorskip("duckdb")
    monkeypatch.setenv("MULTICHARLIER_BENCH_DB", str(tmp_path / "bench.duckdb"))
    code, out, _ = _run(capsys, "bench", "--strategies", "explicit,genfunc", "--nmax", "2")
    assert code == 0
    assert json.loads(out)["history_recorded"] == 4


def test_default_sigma():
    assert default_sigma(2) == (Fraction(1, 2), Fraction(3, 2))
    assert default_sigma(3)[2] == Fraction(5, 2)


def test_run_config_validate():
    RunConfig().validate()
    with pytest.raises(ConfigError):
        RunConfig(kmax=9, cutoff=8).validate()
    with pytest.raises(ConfigError):
        RunConfig(nmax=9, cutoff=8).validate()
    with pytest.raises(ConfigError):
        RunConfig(r=3).validate()
    with pytest.raises(ConfigError):
        RunConfig(jobs=0).validate()


def test_parse_injection():
    n, power, delta = parse_injection("1,1:2:-1/3", 2)
    assert (tuple(n), power, delta) == ((1, 1), 2, Fraction(-1, 3))
    with pytest.raises(ConfigError):
        parse_injection("1,1:0:0", 2)
