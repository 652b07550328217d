import json
import os

import numpy as np
import pytest

from hubnet import svgplot
from hubnet.cli import main
from hubnet.experiments import ExperimentConfig, parse_config, run_experiment


def test_parse_config_roundtrip():
    cfg = parse_config("experiment = fig3\nseed = 7\nalpha = 0.8\n# comment\n")
    assert cfg.experiment == "fig3"
    assert cfg.seed == 7
    assert cfg.alpha == 0.8


def test_parse_config_unknown_key():
    with pytest.raises(ValueError, match="alhpa"):
        parse_config("alhpa = 0.9\n")


def test_parse_config_bad_line():
    with pytest.raises(ValueError, match="line 2"):
        parse_config("seed = 1\nnot a pair\n")


def test_parse_config_overrides_win():
    cfg = parse_config("seed = 1\nout = a\n", {"seed": 2, "out": None})
    assert cfg.seed == 2
    assert cfg.out == "a"


def test_parse_config_alphas_list():
    cfg = parse_config("alphas = 0.05, 0.8, 0.9\n")
    assert cfg.alphas == (0.05, 0.8, 0.9)


def test_invalid_experiment_id():
    with pytest.raises(ValueError):
        ExperimentConfig(experiment="fig99")


def test_gen_analyze_simulate_round_trip(tmp_path):
    gpath = str(tmp_path / "g.txt")
    rc = main(["gen-graph", "--n", "400", "--max-w", "30", "--seed", "3",
               "--out", gpath])
    assert rc == 0
    assert os.path.exists(gpath)
    rc = main(["analyze-graph", gpath, "--out", str(tmp_path / "rep.csv")])
    assert rc == 0
    assert os.path.exists(tmp_path / "rep.csv")
    spath = str(tmp_path / "trace.csv")
    rc = main(["simulate", gpath, "--steps", "60", "--transient", "10",
               "--out", spath])
    assert rc == 0
    lines = open(spath).read().splitlines()
    assert lines[0].startswith("t,node_")
    assert len(lines) == 1 + 51


def test_missing_graph_is_usage_error(tmp_path):
    rc = main(["analyze-graph", str(tmp_path / "nope.txt")])
    assert rc == 2


def test_custom_experiment_deterministic(tmp_path):
    outs = []
    for name in ("a", "b"):
        out = str(tmp_path / name)
        rc = main(["experiment", "custom", "--seed", "5", "--out", out])
        assert rc == 0
        outs.append(open(os.path.join(out, "custom_trace.csv"), "rb").read())
    assert outs[0] == outs[1]


def test_custom_experiment_alpha_zero_sanity(tmp_path):
    cfg = ExperimentConfig(experiment="custom", seed=1,
                           out=str(tmp_path / "o"), alpha=0.0, L=50,
                           steps=200, transient=20)
    summary = run_experiment(cfg)
    assert summary["passed"]
    assert summary["max_abs_fluctuation"] == 0.0
    with open(os.path.join(cfg.out, "custom_summary.json")) as fh:
        on_disk = json.load(fh)
    assert on_disk["passed"] is True


def test_csv_format(tmp_path):
    from hubnet.experiments import write_csv
    path = str(tmp_path / "t.csv")
    write_csv(path, ["a", "b"], [np.array([1, 2]), np.array([0.1, 0.25])])
    raw = open(path, "rb").read()
    assert b"\r" not in raw
    lines = raw.decode().splitlines()
    assert lines[0] == "a,b"
    assert lines[1] == "1,0.10000000000000001"
    assert lines[2] == "2,0.25"


def test_svg_two_point_polyline(tmp_path):
    path = str(tmp_path / "p.svg")
    dropped = svgplot.emit_svg(
        path,
        [svgplot.Series(x=np.array([0.0, 1.0]), y=np.array([0.0, 1.0]))],
        svgplot.AxisSpec())
    assert dropped == 0
    text = open(path).read()
    assert text.count("<polyline") == 1
    pts = text.split('points="')[1].split('"')[0].split()
    assert len(pts) == 2


def test_svg_log_scale_drops_zero(tmp_path):
    path = str(tmp_path / "p.svg")
    dropped = svgplot.emit_svg(
        path,
        [svgplot.Series(x=np.array([1.0, 2.0, 3.0]),
                        y=np.array([0.1, 0.0, 10.0]), kind="scatter")],
        svgplot.AxisSpec(yscale="log"))
    assert dropped == 1


def test_svg_deterministic(tmp_path):
    series = [svgplot.Series(x=np.arange(5.0), y=np.arange(5.0) ** 2,
                             label="sq")]
    a, b = str(tmp_path / "a.svg"), str(tmp_path / "b.svg")
    svgplot.emit_svg(a, series, svgplot.AxisSpec(title="t"))
    svgplot.emit_svg(b, series, svgplot.AxisSpec(title="t"))
    assert open(a, "rb").read() == open(b, "rb").read()


def test_svg_rejects_empty():
    with pytest.raises(ValueError):
        svgplot.emit_svg("unused.svg", [], svgplot.AxisSpec())
    with pytest.raises(ValueError):
        svgplot.Series(x=np.array([]), y=np.array([]))
