import csv
import json

import pytest

from faberlab.cli import RunConfig, UsageError, main, parse_degrees

LEM3 = '{"kind": "lemniscate", "s": 3}'
CORNER = '{"kind": "two_corner", "theta1": "3/4pi"}'


def test_parse_degrees():
    assert parse_degrees("3") == [3]
    assert parse_degrees("5,1,5,2..4") == [1, 2, 3, 4, 5]
    for bad in ("4..2", "x", "1..y"):
        with pytest.raises(UsageError):
            parse_degrees(bad)


def test_run_config_validation():
    with pytest.raises(UsageError):
        RunConfig(format="xml")
    with pytest.raises(UsageError):
        RunConfig(degrees=[-1])


def test_gen_json(tmp_path, capsys):
    assert main(["gen", "--map", '{"kind": "lemniscate", "s": 2}', "--n", "2", "--out", str(tmp_path)]) == 0
    data = json.loads((tmp_path / "faber_2.json").read_text())
    assert data["n"] == 2
    assert [c[0] for c in data["coeffs"]] == pytest.approx([-1, 0, 1])


def test_gen_csv(tmp_path):
    assert main(["gen", "--map", CORNER, "--n", "90", "--format", "csv", "--out", str(tmp_path)]) == 0
    rows = list(csv.reader((tmp_path / "faber_90.csv").open()))
    assert rows[0] == ["k", "re", "im"]
    assert len(rows) == 92
    float(rows[1][1])


def test_zeros_csv_and_determinism(tmp_path, monkeypatch):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["zeros", "--map", LEM3, "--n", "10..12", "--out", str(a)]) == 0
    monkeypatch.setenv("FABERLAB_THREADS", "4")
    assert main(["zeros", "--map", LEM3, "--n", "10..12", "--out", str(b)]) == 0
    text = (a / "zeros.csv").read_text()
    assert text == (b / "zeros.csv").read_text()
    lines = text.splitlines()
    assert lines[0] == "n,re,im" and len(lines) == 1 + 10 + 11 + 12
    summary = json.loads((a / "zeros_summary.json").read_text())
    assert [s["n"] for s in summary] == [10, 11, 12]
    assert all(s["converged"] for s in summary)


def test_predict_two_corner(tmp_path):
    assert main(["predict", "--map", CORNER, "--n", "50,51", "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "predict.json").read_text())
    acc = report["accumulation"]
    assert acc["kind"] == "points"
    inside = sorted(p["t"][0] for p in acc["data"] if p["interior"])
    assert inside == pytest.approx([-0.69105, -0.2706], abs=1e-4)


def test_predict_lemniscate_json_is_strict(tmp_path):
    assert main(["predict", "--map", LEM3, "--n", "5", "--out", str(tmp_path)]) == 0
    text = (tmp_path / "predict.json").read_text()
    json.loads(text, parse_constant=lambda c: pytest.fail(f"non-standard JSON constant {c}"))


@pytest.mark.parametrize("argv", [
    ["gen", "--map", '{"kind": "nope"}', "--n", "3"],
    ["gen", "--map", LEM3, "--n", ""],
    ["gen", "--n", "3"],
    ["gen", "--map", LEM3],
    ["zeros", "--map", LEM3, "--n", "0"],
    ["predict", "--map", LEM3, "--n", "5", "--grid", "1,2,3"],
])
def test_usage_errors_exit_2(argv, tmp_path, capsys):
    assert main(argv + ["--out", str(tmp_path)]) == 2
    assert "error" in capsys.readouterr().err


def test_degree_above_cap_warns(tmp_path):
    with pytest.warns(RuntimeWarning):
        assert main(["gen", "--map", LEM3, "--n", "310", "--out", str(tmp_path)]) == 0


def test_numeric_error_exit_3(tmp_path, monkeypatch, capsys):
    from faberlab import cli
    from faberlab.errors import ConvergenceError

    def fail(*args, **kwargs):
        raise ConvergenceError("no convergence")

    monkeypatch.setattr(cli, "faber_zeros", fail)
    assert main(["zeros", "--map", LEM3, "--n", "5", "--out", str(tmp_path)]) == 3
    assert "numeric failure" in capsys.readouterr().err
