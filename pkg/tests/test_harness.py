import json

import numpy as np
import pytest
from sklearn.base import clone

from mpdmp import cli, experiment
from mpdmp.algorithms import AlgorithmConfig
from mpdmp.estimators import OptAll, OptMPNDS3
from mpdmp.experiment import ConfigError, ExperimentSpec, read_csv, run_experiment, spec_from_mapping
from mpdmp.plotting import export_plot_data

TINY = AlgorithmConfig(pop_size=20, fe_budget=400, fei_budget=100)


def _spec(tmp_path, name="out", **kw):
    base = dict(problems=(1,), algorithms=("optall", "optmpnds3"), runs=3, base_seed=7, config=TINY,
                output_dir=tmp_path / name, reference_size=100)
    base.update(kw)
    return ExperimentSpec(**base)


def test_seed_pairing_and_row_count(tmp_path):
    res = run_experiment(_spec(tmp_path))
    rows = read_csv(res.files["runs"])
    assert len(rows) == 6
    for alg in ("optall", "optmpnds3"):
        assert sorted(int(r["seed"]) for r in rows if r["algorithm"] == alg) == [7, 8, 9]
    assert not res.failed


def test_rerun_is_byte_identical(tmp_path):
    a = run_experiment(_spec(tmp_path, "a"))
    b = run_experiment(_spec(tmp_path, "b", jobs=2))
    for key in ("runs", "aggregate", "solutions:1:optall", "solutions:1:optmpnds3"):
        assert a.files[key].read_bytes() == b.files[key].read_bytes()


def test_aggregate_rederivable_from_runs(tmp_path):
    res = run_experiment(_spec(tmp_path))
    runs = read_csv(res.files["runs"])
    for row in read_csv(res.files["aggregate"]):
        vals = [float(r["igd"]) for r in runs if r["algorithm"] == row["algorithm"]]
        assert float(row["igd_mean"]) == pytest.approx(np.mean(vals), rel=1e-12)
        assert float(row["igd_std"]) == pytest.approx(np.std(vals), rel=1e-12, abs=1e-15)
        assert int(row["runs"]) == 3


def test_every_output_declares_version_digest_and_seed(tmp_path):
    spec = _spec(tmp_path)
    res = run_experiment(spec)
    for key, path in res.files.items():
        if path.suffix == ".csv":
            head = path.read_text().splitlines()[:2]
            assert head[0].startswith("# mpdmp 0.1.0")
            assert f"experiment {spec.digest()}" in head[1] and "base_seed 7" in head[1]


def test_solutions_file_layout(tmp_path):
    res = run_experiment(_spec(tmp_path))
    rows = read_csv(res.files["solutions:1:optmpnds3"])
    assert list(rows[0]) == ["run", "x1", "x2", "f1", "f2", "f3", "f4"]
    runs = read_csv(res.files["runs"])
    expected = sum(int(r["mps_size"]) for r in runs if r["algorithm"] == "optmpnds3")
    assert len(rows) == expected


def test_failed_run_is_recorded_and_others_continue(tmp_path, monkeypatch):
    real = experiment.run_algorithm

    def flaky(name, problem, config):
        if name == "optall" and config.seed == 8:
            raise RuntimeError("boom")
        return real(name, problem, config)

    monkeypatch.setattr(experiment, "run_algorithm", flaky)
    res = run_experiment(_spec(tmp_path))
    assert [(c.algorithm, c.seed) for c in res.failed] == [("optall", 8)]
    rows = read_csv(res.files["runs"])
    assert [r["status"] for r in rows].count("failed") == 1
    agg = {r["algorithm"]: r for r in read_csv(res.files["aggregate"])}
    assert agg["optall"]["runs"] == "2" and agg["optmpnds3"]["runs"] == "3"
    assert "boom" in res.files["failures"].read_text()


def test_spec_validation():
    with pytest.raises(ConfigError):
        ExperimentSpec(problems=(9,))
    with pytest.raises(ConfigError):
        ExperimentSpec(algorithms=("nsga3",))
    with pytest.raises(ConfigError):
        ExperimentSpec(runs=0)
    with pytest.raises(ConfigError):
        ExperimentSpec(config=AlgorithmConfig(fe_budget=1000, fei_budget=600, pop_size=10))
    with pytest.raises(ConfigError):
        spec_from_mapping({"bogus": 1})
    with pytest.raises(ConfigError):
        spec_from_mapping({"pop": -1})


def test_default_spec_matches_protocol():
    spec = ExperimentSpec()
    cfg = spec.config
    assert (cfg.pop_size, cfg.fe_budget, cfg.fei_budget) == (200, 80000, 10000)
    assert (cfg.sbx_pc, cfg.sbx_eta, cfg.pm, cfg.pm_eta, cfg.jade_p, cfg.jade_c) == (1.0, 15, 0.5, 20, 0.05, 0.05)
    assert spec.runs == 30
    assert len(spec.problems) * len(spec.algorithms) * spec.runs == 960


def test_unwritable_output_is_a_config_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(ConfigError):
        run_experiment(_spec(tmp_path, output_dir=blocker / "sub"))


def test_export_plot_data(tmp_path):
    files = export_plot_data(4, np.array([[2.0, 3.4], [2.1, 3.5]]), tmp_path / "p4")
    svg = files["svg"].read_text()
    assert svg.count('class="ps"') == 1 and "<circle class=\"ps\"" in svg
    assert svg.count('class="mps"') == 2
    assert files["ps"].read_text().splitlines()[2].startswith("point,0,2.0,3.46")
    files = export_plot_data(7, np.empty((0, 2)), tmp_path / "p7")
    assert files["mps"].read_text().splitlines()[1:] == ["x1,x2"]
    ps_rows = files["ps"].read_text().splitlines()[2:]
    assert {tuple(map(float, r.split(",")[2:])) for r in ps_rows} == {(2, 2), (4, 2), (4, 4), (2, 4)}
    assert 'class="mps"' not in files["svg"].read_text()


def test_cli_run_plot_and_exit_codes(tmp_path, monkeypatch, capsys):
    out = tmp_path / "cli"
    argv = ["run", "--problems", "1,4", "--algorithms", "optmpnds", "--runs", "2", "--seed", "3",
            "--pop", "20", "--fe", "400", "--fei", "100", "--ref-size", "50", "--out", str(out)]
    assert cli.main(argv) == 0
    assert len(read_csv(out / "runs.csv")) == 4
    assert cli.main(["plot", str(out)]) == 0
    assert (out / "plots" / "MPDMP4_optmpnds_run0.svg").exists()
    assert cli.main(["run", "--problems", "12", "--out", str(out)]) == 1
    assert cli.main(["run", "--algorithms", "nope", "--out", str(out)]) == 1
    with pytest.raises(SystemExit) as exc:
        cli.main(["run", "--runs", "many"])
    assert exc.value.code == 1

    def broken(*a, **k):
        raise RuntimeError("solver crashed")

    monkeypatch.setattr(experiment, "run_algorithm", broken)
    assert cli.main(argv) == 2
    assert "solver crashed" in capsys.readouterr().err


def test_cli_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "exp.json"
    cfg.write_text(json.dumps({"problems": [6], "algorithms": ["optall"], "runs": 1, "pop": 20, "fe": 200,
                               "ref_size": 20, "out": str(tmp_path / "from_file")}))
    assert cli.main(["run", "--config", str(cfg), "--seed", "11"]) == 0
    rows = read_csv(tmp_path / "from_file" / "runs.csv")
    assert [(r["problem"], r["seed"]) for r in rows] == [("6", "11")]
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["run", "--config", str(bad)]) == 1


def test_cli_problems_and_verify(tmp_path, capsys):
    assert cli.main(["problems", "--problems", "7", "--export", str(tmp_path / "geo"), "--ref-size", "30"]) == 0
    assert "polygon" in capsys.readouterr().out
    assert (tmp_path / "geo" / "MPDMP7.json").exists()
    assert cli.main(["verify"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 17 and "FAIL" not in out


def test_estimator_api():
    est = OptMPNDS3(pop_size=30, fe_budget=600, fei_budget=150, seed=2)
    assert est.get_params()["fei_budget"] == 150
    est.set_params(seed=3)
    fitted = est.fit(6)
    assert fitted is est
    assert est.mps_x_.shape[1] == 2 and est.fe_used_ == 600
    assert est.score() <= 0
    twin = clone(est).fit(6)
    assert np.array_equal(twin.mps_x_, est.mps_x_)
    with pytest.raises(TypeError):
        OptAll().fit("MPDMP1")
    from sklearn.exceptions import NotFittedError

    with pytest.raises(NotFittedError):
        OptAll().score(1)
