import json
import math

import pytest

from necklace import io
from necklace.cli import UsageError, main, parse_config
from necklace.plots import emit_plot_script


def test_validate_defaults():
    cfg = parse_config(["validate-freq", "--k", "1", "--l", "1"])
    assert (cfg.subcommand, cfg.k, cfg.l_int, cfg.mmax) == ("validate-freq", 1, 1, 99)


@pytest.mark.parametrize(
    "argv, message",
    [
        (["breather", "--k", "2", "--l", "1", "--eps", "0.05"], "k must be odd"),
        (["breather", "--k", "1", "--l", "2", "--eps", "0.05"], "l must be odd"),
        (["modes", "--mmax", "4"], "mmax must be odd"),
        (["simulate", "--eps", "0.7"], "eps must lie"),
    ],
)
def test_usage_errors(argv, message):
    with pytest.raises(UsageError, match=message):
        parse_config(argv)


def test_flag_overrides_config(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text("# sweep settings\neps = 0.1\nmmax = 3\n")
    cfg = parse_config(["modes", "--config", str(cfg_file), "--eps", "0.05"])
    assert cfg.eps == (0.05,)
    assert cfg.mmax == 3


def test_config_rejects_unknown_key(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text("eps = 0.1\ncolour = blue\n")
    with pytest.raises(UsageError, match="unknown key"):
        parse_config(["breather", "--config", str(cfg_file)])


def test_exit_codes(tmp_path, capsys):
    out = str(tmp_path)
    assert main(["validate-freq", "--k", "1", "--l", "1", "--out", out]) == 0
    assert main(["validate-freq", "--k", "1", "--l", "2", "--strict", "--out", out]) == 4
    assert main(["validate-freq", "--k", "1", "--l", "2", "--out", out]) == 0
    assert main(["breather", "--k", "2", "--eps", "0.05", "--out", out]) == 2
    assert main(["breather", "--k", "3", "--eps", "0.05", "--out", out]) == 2
    assert main(["bogus"]) == 2
    assert main(["modes", "--eps", "0.1", "--mmax", "1", "--cells", "1", "--out", out]) == 3
    err = capsys.readouterr().err
    assert "k must be odd" in err and "numerical failure" in err


def test_validate_json(tmp_path):
    main(["validate-freq", "--k", "1", "--l", "1", "--mmax", "9", "--out", str(tmp_path)])
    data = json.loads((tmp_path / "validate_k1_l1.json").read_text())
    assert data["schema"] == 1
    assert data["verdict"] == "valid"
    assert [m["m"] for m in data["modes"]] == [1, 3, 5, 7, 9]


def test_outputs_are_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["breather", "--eps", "0.1", "--family", "circle", "--out", str(d)]) == 0
        assert main(["bands", "--l", "3", "--n", "301", "--out", str(d)]) == 0
    for name in ("breather_circle_eps0.1.csv", "breather_circle_eps0.1.json", "bands_l3.csv", "bands_l3.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_env_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("NECKLACE_OUT", str(tmp_path / "env"))
    assert main(["rationality", "--l", "3/2"]) == 0
    data = json.loads((tmp_path / "env" / "rationality_3_2.json").read_text())
    assert data["ratio"] == "1/5"


def test_parallel_sweep_and_report(tmp_path):
    out = str(tmp_path)
    assert main(["breather", "--eps", "0.1", "0.05", "--jobs", "2", "--out", out]) == 0
    assert main(["report", "--out", out]) == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert set(report["inputs"]) == {"breather_link_eps0.1.json", "breather_link_eps0.05.json"}


def test_simulate_snapshots(tmp_path):
    out = str(tmp_path)
    argv = ["simulate", "--eps", "0.1", "--mmax", "3", "--dx", str(math.pi / 50), "--snapshots", "--plot",
            "--out", out]
    assert main(argv) == 0
    lines = (tmp_path / "simulate_eps0.1_spacetime.csv").read_text().splitlines()
    assert lines[0] == "t,x,u"
    assert len({ln.split(",")[0] for ln in lines[1:]}) == 5  # t = 0 and four quarter periods
    assert (tmp_path / "plot_spacetime_simulate_eps0.1_spacetime.py").exists()


def test_plot_scripts(tmp_path):
    csv = io.write_rows(tmp_path / "bands.csv", "lambda,trace,class", [(0.0, 2.0, "edge"), (1.0, 2.0, "band")])
    script = emit_plot_script([csv], "trace", markers=[(0.0, 2.0)])
    text = script.read_text()
    compile(text, str(script), "exec")
    assert "axhline" in text and "(0.0, 2.0)" in text
    with pytest.raises(FileNotFoundError):
        emit_plot_script([tmp_path / "missing.csv"], "profile")
    with pytest.raises(ValueError):
        emit_plot_script([csv], "histogram")


def test_io_formatting(tmp_path):
    assert io.fmt(0.1) == "0.10000000000000001"
    text = io.dumps({"a": float("nan"), "b": [1, 2.5], "c": None})
    assert json.loads(text) == {"a": None, "b": [1, 2.5], "c": None}
    path = io.write_json(tmp_path / "x.json", {"v": 1})
    assert json.loads(path.read_text())["schema"] == 1
