import json
import subprocess
import sys

import pytest

from hardyz import cli


def run(argv, tmp_path, name="out"):
    out = tmp_path / name
    code = cli.main(list(argv) + ["--out", str(out)])
    return code, out.read_text() if out.exists() else ""


def rows(text):
    lines = text.splitlines()
    assert lines[0].startswith("# schema=1")
    assert lines[1] == ",".join(cli.CSV_FIELDS)
    return [dict(zip(cli.CSV_FIELDS, ln.split(","))) for ln in lines[2:]]


def test_valid_configs():
    c = cli.parse_config(["zeros", "--t0", "10", "--t1", "1000", "--step", "0.05"])
    assert c.command == "zeros" and c.params["step"] == 0.05
    c = cli.parse_config(["shift3", "--T", "500", "--U", "2", "--range", "ascending"])
    assert c.params["range_choice"] == "ascending"


@pytest.mark.parametrize("argv", [
    ["moment", "--T", "100", "--k", "5"],
    ["zeros", "--t0", "10", "--t1", "100", "--step", "1"],
    ["shift3", "--T", "500", "--U", "30"],
    ["phasesum", "--T", "1000", "--phi", "4"],
    ["growth", "--k", "1", "--T", "1000", "3000"],
    ["eval", "--t", "100", "--order", "9"],
    ["nonsense"],
])
def test_usage_errors(argv, capsys):
    assert cli.main(argv) == cli.EXIT_USAGE
    assert "usage error" in capsys.readouterr().err


def test_flag_named_in_error():
    with pytest.raises(cli.UsageError, match="--k"):
        cli.parse_config(["moment", "--T", "100", "--k", "5"])


def test_eval_record(tmp_path):
    code, text = run(["eval", "--t", "100"], tmp_path)
    assert code == 0
    (r,) = rows(text)
    assert r["quantity"] == "Z" and abs(float(r["value"]) - 2.6926970566644635) <= float(r["err"])
    assert "method=RS1" in r["meta"] and "theta=87.97216523" in r["meta"]


def test_eval_below_ten_uses_oracle(tmp_path):
    _, text = run(["eval", "--t", "5"], tmp_path)
    (r,) = rows(text)
    assert "method=Oracle" in r["meta"]
    assert abs(float(r["value"]) + 0.7388634282752648) < 1e-14


def test_signdist_identity(tmp_path):
    code, text = run(["signdist", "--T", "1000", "--H", "1000"], tmp_path)
    assert code == 0
    r = {x["quantity"]: float(x["value"]) for x in rows(text)}
    assert abs(r["Kplus"] + r["Kminus"] - 1000.0) < 1e-9


def test_json_output(tmp_path):
    code, text = run(["moment", "--T", "50", "--k", "2", "--format", "json"], tmp_path)
    doc = json.loads(text)
    assert code == 0 and doc["schema"] == 1 and doc["status"] == 0
    assert doc["wall_time"] >= 0 and doc["version"]
    assert doc["records"][0]["quantity"] == "moment"


def test_not_converged_exit(tmp_path, monkeypatch):
    import numpy as np

    from hardyz import moments, oscint
    # without zero breakpoints |Z| has kinks that need more depth than allowed
    monkeypatch.setattr(oscint, "MAX_DEPTH", 1)
    monkeypatch.setattr(moments, "_zeros_for", lambda *a, **k: np.zeros(0))
    code, text = run(["moment", "--T0", "1000", "--T", "1100", "--k", "1", "--absolute"], tmp_path)
    assert code == cli.EXIT_NOT_CONVERGED
    assert "not_converged" in text


def test_resource_error_exit(tmp_path, monkeypatch):
    from hardyz import arith
    monkeypatch.setattr(arith, "_available_bytes", lambda: 1000)
    code, _ = run(["expsum", "--N", "100000"], tmp_path)
    assert code == cli.EXIT_RESOURCE


def test_zero_table_files(tmp_path):
    table = tmp_path / "z.csv"
    code, _ = run(["zeros", "--t0", "10", "--t1", "50", "--table", str(table)], tmp_path)
    assert code == 0
    assert table.read_text().splitlines()[1].startswith("1,14.134725141")
    assert json.loads((tmp_path / "z.csv.json").read_text())["count"] == 10


def test_cache_dir_env(tmp_path, monkeypatch):
    monkeypatch.setenv("HARDYZ_CACHE_DIR", str(tmp_path / "cache"))
    code, _ = run(["expsum", "--N", "500"], tmp_path)
    assert code == 0 and (tmp_path / "cache" / "d3.dkt").exists()


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "hardyz", "eval", "--t", "1000"], capture_output=True, text=True)
    assert p.returncode == 0 and p.stdout.startswith("# schema=1")


SMALL = [
    ["eval", "--t", "12345.678", "--order", "4"],
    ["zeros", "--t0", "1000", "--t1", "1300"],
    ["moment", "--T", "300", "--k", "3"],
    ["signdist", "--T", "2000", "--H", "300"],
    ["cubic", "--T", "200"],
    ["shift2", "--T", "500", "--alpha", "0.5"],
    ["shift3", "--T", "300", "--U", "1"],
    ["expsum", "--j0", "4", "--j1", "12"],
    ["gaps", "--t0", "100", "--t1", "2000"],
    ["clt", "--T", "5000", "--m", "1000"],
    ["phasesum", "--T", "1000", "--phi", "0.7"],
    ["growth", "--k", "1", "3", "--T", "1000", "2000"],
]


@pytest.mark.parametrize("argv", SMALL, ids=[a[0] for a in SMALL])
def test_threads_byte_identical(argv, tmp_path):
    c1, t1 = run(argv + ["--threads", "1"], tmp_path, "a")
    c8, t8 = run(argv + ["--threads", "8"], tmp_path, "b")
    assert c1 == c8 == 0
    assert t1 == t8


def test_cache_does_not_change_output(tmp_path):
    cache = tmp_path / "cache"
    argv = ["shift3", "--T", "400", "--U", "1.5", "--cache-dir", str(cache)]
    _, cold = run(argv, tmp_path, "cold")
    _, warm = run(argv, tmp_path, "warm")
    import shutil
    shutil.rmtree(cache)
    _, again = run(argv, tmp_path, "again")
    assert cold == warm == again


def test_json_round_trip(tmp_path):
    _, text = run(["eval", "--t", "777.7", "--format", "json"], tmp_path)
    rec = json.loads(text)["records"][0]
    from hardyz import z_rs
    assert rec["value"] == z_rs(777.7).value
