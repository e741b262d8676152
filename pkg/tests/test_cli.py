import json

import pytest

from vlcloc.cli import main
from vlcloc.dataset import load_csv
from vlcloc.scenario import preset, save_scenario


@pytest.fixture()
def quick(tmp_path):
    out = tmp_path / "out"
    assert main(["generate", "--out", str(out), "--runs", "1", "--grid-spacing", "1.0"]) == 0
    return out


def test_generate_quick_dataset(quick, capsys):
    assert len(load_csv(quick / "train.csv")) == 81
    assert (quick / "train.manifest.json").exists()
    assert (quick / "test.csv").exists()


def test_generate_announces_counts(tmp_path, capsys):
    main(["generate", "--out", str(tmp_path), "--runs", "1", "--grid-spacing", "1.0"])
    assert "train: 81 rows x 81 features" in capsys.readouterr().out


def test_generate_from_scenario_file(tmp_path):
    sc = preset("wifi", n_runs=2, grid_spacing=2.0)
    save_scenario(sc, tmp_path / "s.json")
    assert main(["generate", "--scenario", str(tmp_path / "s.json"), "--out", str(tmp_path / "o")]) == 0
    ds = load_csv(tmp_path / "o" / "train.csv")
    assert len(ds) == 2 * 16 and ds.n_anchors == 4


def test_missing_scenario_exit_2(tmp_path, capsys):
    code = main(["generate", "--scenario", str(tmp_path / "missing.json"), "--out", str(tmp_path)])
    assert code == 2
    assert "missing.json" in capsys.readouterr().err


def test_fit_then_evaluate(quick, capsys):
    assert main(["fit", "--out", str(quick), "--estimator", "knn", "--estimator", "classic_vlc"]) == 0
    doc = json.loads((quick / "models" / "model_knn_x.json").read_text())
    assert doc["n_train_rows"] == 81 and len(doc["regressor"]["fit_X"]) == 81
    assert main(["evaluate", "--out", str(quick)]) == 0
    lines = (quick / "report.csv").read_text().splitlines()
    assert lines[0] == "method,ped_0.1,ped_0.3,ped_0.5,ped_0.7,ped_0.9,n_samples"
    assert {ln.split(",")[0] for ln in lines[1:]} == {"VLC-81 with KNN", "Classic VLC"}
    assert (quick / "report.md").exists()


def test_fit_mlp_byte_identical(quick):
    args = ["fit", "--out", str(quick), "--estimator", "mlp", "--seed", "4"]
    main(args)
    first = (quick / "models" / "model_mlp_x.json").read_bytes()
    main(args)
    assert (quick / "models" / "model_mlp_x.json").read_bytes() == first


def test_evaluate_custom_thresholds(quick):
    main(["fit", "--out", str(quick), "--estimator", "knn"])
    assert main(["evaluate", "--out", str(quick), "--thresholds", "0.2,0.4"]) == 0
    assert (quick / "report.csv").read_text().splitlines()[0] == "method,ped_0.2,ped_0.4,n_samples"


def test_evaluate_self_noise_free_k1(tmp_path):
    sc = preset("vlc81", n_runs=1, grid_spacing=1.0)
    from dataclasses import replace

    sc = replace(sc, channel=replace(sc.channel, noise=replace(sc.channel.noise, vlc_relative_sigma=0.0)))
    save_scenario(sc, tmp_path / "s.json")
    out = tmp_path / "o"
    main(["generate", "--scenario", str(tmp_path / "s.json"), "--out", str(out)])
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"estimators": [{"kind": "knn", "params": {"n_neighbors": 1}}]}))
    assert main(["fit", "--config", str(cfg), "--out", str(out)]) == 0
    assert main(["evaluate", "--out", str(out), "--test", str(out / "train.csv")]) == 0
    row = (out / "report.csv").read_text().splitlines()[1].split(",")
    assert row[1:6] == ["1.000"] * 5


def test_evaluate_arity_mismatch(quick, tmp_path):
    main(["fit", "--out", str(quick), "--estimator", "knn"])
    other = tmp_path / "wifi"
    main(["generate", "--preset", "wifi", "--out", str(other), "--runs", "1", "--grid-spacing", "2.0"])
    code = main(["evaluate", "--out", str(quick), "--test", str(other / "test.csv")])
    assert code == 1


def test_svr_subsampling_logged(tmp_path, caplog):
    out = tmp_path / "o"
    main(["generate", "--preset", "wifi", "--out", str(out), "--runs", "1", "--grid-spacing", "0.1"])
    with caplog.at_level("INFO"):
        assert main(["fit", "--out", str(out), "--estimator", "svr"]) == 0
    assert "subsampling training set from 9801 to 5000" in caplog.text


def test_sweep(quick):
    assert main(["sweep", "--out", str(quick), "--estimator", "knn", "--param", "n_neighbors=1,3"]) == 0
    lines = (quick / "sweep.csv").read_text().splitlines()
    assert [ln.split(",")[0] for ln in lines[1:]] == ["KNN n_neighbors=1", "KNN n_neighbors=3"]


def test_out_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv("VLCLOC_OUT", str(tmp_path / "env"))
    assert main(["generate", "--out", str(tmp_path / "ignored"), "--runs", "1", "--grid-spacing", "2.0"]) == 0
    assert (tmp_path / "env" / "train.csv").exists()
    assert not (tmp_path / "ignored").exists()


def test_reproduce_table2_small(tmp_path):
    out = tmp_path / "t2"
    code = main(["reproduce-table2", "--out", str(out), "--runs", "1", "--grid-spacing", "1.0"])
    assert code == 0
    lines = (out / "table2.csv").read_text().splitlines()
    assert len(lines) == 12
    assert (out / "table2.md").exists() and (out / "table2_annex.md").exists()
