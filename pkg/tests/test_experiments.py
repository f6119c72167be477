import dataclasses
import json

import numpy as np
import pytest

from practical_ego.bounds import SweepResult
from practical_ego.cli import main
from practical_ego.benchmarks import get_benchmark
from practical_ego.ego import read_trace_csv
from practical_ego.experiments import (
    PRESETS,
    AggregateReport,
    ExperimentConfig,
    bench,
    ei_grid,
    ei_sample_set,
    preset,
    run_experiment,
    run_replication,
)


def tiny(**kw):
    base = dict(benchmark="branin", eps=[1e-2, 1e-4], reps=2, n_iter=4, checkpoints=[1, 4],
                acq_budget=128)
    base.update(kw)
    return ExperimentConfig(**base)


def tiny_gp(**kw):
    base = dict(benchmark="gp", kernel="se", eps=[1e-6], reps=2, n_init=6, n_iter=3,
                checkpoints=[1, 3], acq_budget=128, probes_per_dim=64)
    base.update(kw)
    return ExperimentConfig(**base)


@pytest.mark.parametrize("kw", [
    dict(reps=0), dict(eps=[]), dict(eps=[0.0]), dict(checkpoints=[5]), dict(checkpoints=[0]),
    dict(benchmark="nope"), dict(workers=0),
])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        tiny(**kw)


def test_config_json_roundtrip(tmp_path):
    cfg = tiny_gp(seed=7)
    path = tmp_path / "c.json"
    path.write_text(cfg.to_json())
    assert ExperimentConfig.from_json(path) == cfg


def test_config_rejects_unknown_keys():
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({"benchmark": "branin", "colour": "red"})


def test_presets_carry_protocol_sizes():
    assert PRESETS["gp-2d-se"].n_init == 20 and PRESETS["gp-4d-matern"].n_init == 40
    assert PRESETS["gp-2d-matern"].reps == 20 and PRESETS["gp-2d-matern"].horizon == 200
    assert PRESETS["branin"].reps == 100 and PRESETS["branin"].horizon == 200
    assert PRESETS["hartmann6"].horizon == 100 and PRESETS["hartmann6"].checkpoints == [1, 50, 100]
    assert preset("branin", reps=3).reps == 3
    with pytest.raises(KeyError):
        preset("unknown")


def test_single_rep_aggregate_equals_the_run():
    cfg = tiny(reps=1)
    tr = run_replication(cfg, 0)
    report = bench(cfg)
    for eps in cfg.eps:
        for t in cfg.checkpoints:
            row = report.cell(eps, t)
            v = tr[eps].avg_regret[t - 1]
            assert row.mean == row.median == row.p25 == row.p75 == pytest.approx(v, rel=1e-15)


def test_aggregate_order_and_bounds():
    cfg = tiny(reps=3)
    curves = run_experiment(cfg)
    report = AggregateReport.from_curves(cfg, curves, 2, "matern")
    for row in report.rows:
        col = curves[row.eps][:, row.t - 1]
        assert col.min() <= row.mean <= col.max()
        assert row.p25 <= row.median <= row.p75
        assert np.isfinite([row.mean, row.median, row.p25, row.p75]).all()


def test_aggregate_csv_roundtrip_exact(tmp_path):
    report = bench(tiny())
    path = tmp_path / "agg.csv"
    report.write_csv(path)
    assert AggregateReport.read_csv(path) == report


def test_table_layout():
    text = bench(tiny()).format_table()
    head = text.splitlines()[0].split()
    assert head == ["d", "kernel", "eps", "t=1", "t=4"]
    assert len(text.splitlines()) == 3


def test_serial_and_parallel_agree():
    cfg = tiny_gp(reps=3)
    serial = run_experiment(cfg)
    parallel = run_experiment(dataclasses.replace(cfg, workers=2))
    for eps in cfg.eps:
        assert np.array_equal(serial[eps], parallel[eps])


def test_gp_replications_share_one_path():
    cfg = tiny_gp(eps=[1e-6, 1e-4], reps=1)
    traces = run_replication(cfg, 0)
    a, b = traces[1e-6], traces[1e-4]
    assert np.array_equal(a.X_init, b.X_init)
    assert np.array_equal(a.y_init, b.y_init)
    assert a.f_star == b.f_star


def test_ei_grid_single_cell():
    b = get_benchmark("branin")
    X, y = ei_sample_set(b, "random", 0, n_random=10)
    res = ei_grid(b, X, y, [1e-6], resolution=1)
    assert res.grid.shape == (1, 2)
    np.testing.assert_allclose(res.grid[0], b.bounds.mean(axis=1))


def test_ei_grid_rejects_other_dimensions():
    b = get_benchmark("hartmann6")
    with pytest.raises(ValueError):
        ei_grid(b, np.zeros((2, 6)), np.zeros(2), [1e-6])


def test_ei_sample_set_sizes():
    b = get_benchmark("branin")
    X, y = ei_sample_set(b, "ego", 0, n_init=5, n_steps=3)
    assert X.shape == (8, 2) and y.shape == (8,)
    X, _ = ei_sample_set(b, "lhs", 0, n_random=12)
    assert X.shape == (12, 2)
    with pytest.raises(ValueError):
        ei_sample_set(b, "grid", 0)


# command line


def write_cfg(tmp_path, cfg):
    path = tmp_path / "cfg.json"
    path.write_text(cfg.to_json())
    return str(path)


def test_cli_run_writes_trace_and_is_byte_deterministic(tmp_path, capsys):
    cfg = tiny(eps=[1e-4])
    p = write_cfg(tmp_path, cfg)
    assert main(["run", "--config", p, "--out", str(tmp_path / "a")]) == 0
    assert main(["run", "--config", p, "--out", str(tmp_path / "b")]) == 0
    name = "trace_branin_eps0.0001_seed0.csv"
    a, b = tmp_path / "a" / name, tmp_path / "b" / name
    assert a.read_bytes() == b.read_bytes()
    assert read_trace_csv(a)["x"].shape == (cfg.n_iter, 2)


def test_cli_run_seed_override(tmp_path):
    p = write_cfg(tmp_path, tiny(eps=[1e-4]))
    assert main(["run", "--config", p, "--seed", "3", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "trace_branin_eps0.0001_seed3.csv").exists()


def test_cli_usage_errors(tmp_path, capsys):
    assert main(["run"]) == 2
    assert main(["run", "--config", str(tmp_path / "missing.json")]) == 2
    assert main(["run", "--preset", "nope"]) == 2
    assert main(["bench", "--preset", "branin", "--reps", "0"]) == 2
    assert main(["bounds", "--eps", ""]) == 2
    assert main(["frobnicate"]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"benchmark": "branin", "colour": 1}))
    assert main(["run", "--config", str(bad)]) == 2


def test_cli_bench_outputs(tmp_path, capsys):
    p = write_cfg(tmp_path, tiny())
    assert main(["bench", "--config", p, "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "t=1" in out and "t=4" in out
    report = AggregateReport.read_csv(tmp_path / "aggregate_branin.csv")
    assert len(report.rows) == 4
    assert ExperimentConfig.from_json(tmp_path / "config_branin.json") == dataclasses.replace(
        tiny(), out=str(tmp_path))


def test_cli_bounds_row_count(tmp_path, capsys):
    assert main(["bounds", "--kernel", "se", "--T", "100", "10000", "--eps", "1e-8,1e-6,1e-4",
                 "--out", str(tmp_path)]) == 0
    res = SweepResult.read_csv(tmp_path / "sweep_se.csv")
    assert len(res.rows) == 6
    assert (tmp_path / "sweep_se.svg").read_text().startswith("<svg")


def test_cli_bounds_constants_file(tmp_path, capsys):
    consts = tmp_path / "c.json"
    consts.write_text(json.dumps({"B": 2.0, "d": 3}))
    assert main(["bounds", "--kernel", "matern", "--T", "1e4", "--eps", "1e-6",
                 "--constants", str(consts), "--out", str(tmp_path)]) == 0
    consts.write_text(json.dumps({"wrong": 1}))
    assert main(["bounds", "--constants", str(consts), "--out", str(tmp_path)]) == 2


def test_cli_bounds_small_eps_labelled_case1(tmp_path, capsys):
    assert main(["bounds", "--kernel", "se", "--T", "1e6", "--out", str(tmp_path)]) == 0
    rows = SweepResult.read_csv(tmp_path / "sweep_se.csv").rows
    assert min(rows, key=lambda r: r.eps).case == "case1"


def test_cli_ei_grid(tmp_path, capsys):
    assert main(["ei-grid", "--benchmark", "branin", "--source", "random", "--resolution", "1",
                 "--eps", "1e-6,1e-2", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "ei_grid_branin_random_seed0.csv").read_text().splitlines()
    assert len(lines) == 2
    assert main(["ei-grid", "--benchmark", "hartmann6", "--out", str(tmp_path)]) == 2
