import csv
import json

import pytest

from mixedclust.cli import main

FAST = ["--calib-B", "19"]


@pytest.fixture(scope="module")
def synth_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("synth")
    assert main(["synth", "--sizes", "30,20", "--p", "4", "--q", "3", "--sigma2", "0.1",
                 "--seed", "3", "--out-dir", str(d)]) == 0
    return d


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_synth_table1(tmp_path):
    assert main(["synth", "--table1", "--seed", "1", "--out-dir", str(tmp_path)]) == 0
    truth = _rows(tmp_path / "truth.csv")
    assert truth[0] == ["row_id", "true_label"]
    labels = [int(r[1]) for r in truth[1:]]
    assert [labels.count(k) for k in (1, 2, 3)] == [100, 75, 25]
    assert len(_rows(tmp_path / "data.csv")) == 201
    schema = json.loads((tmp_path / "schema.json").read_text())
    assert len(schema["categorical"]) == 10 and len(schema["continuous"]) == 10


def test_synth_table3_and_single(tmp_path):
    assert main(["synth", "--k", "5", "--sizes", "40,25,15,10,10", "--sigma2", "0.5",
                 "--out-dir", str(tmp_path / "t3")]) == 0
    assert len(_rows(tmp_path / "t3" / "truth.csv")) == 101
    assert main(["synth", "--k", "1", "--sizes", "50", "--out-dir", str(tmp_path / "one")]) == 0
    assert {r[1] for r in _rows(tmp_path / "one" / "truth.csv")[1:]} == {"1"}


def test_synth_rejects_bad_sizes(tmp_path, capsys):
    assert main(["synth", "--sizes", "0,0", "--out-dir", str(tmp_path)]) == 1
    assert main(["synth", "--k", "3", "--sizes", "5,5", "--out-dir", str(tmp_path)]) == 1
    assert main(["synth", "--sizes", "a,b", "--out-dir", str(tmp_path)]) == 1


def _cluster(d, out, *extra):
    return main(["cluster", "--input", str(d / "data.csv"), "--schema", str(d / "schema.json"),
                 "--out", str(out), *FAST, *extra])


def test_cluster_deterministic_and_manifest(synth_dir, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert _cluster(synth_dir, a, "--seed", "7") == 0
    assert _cluster(synth_dir, b, "--seed", "7") == 0
    assert a.read_bytes() == b.read_bytes()
    assert _rows(a)[0] == ["row_id", "cluster_label"]
    man = json.loads((tmp_path / "a.manifest.json").read_text())
    assert man["config"]["bins"] == 10 and man["config"]["alpha"] == 0.05
    assert man["config"]["null.seed"] == 7 and man["seed"] == 7


def test_rerun_from_manifest(synth_dir, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert _cluster(synth_dir, a, "--seed", "5", "--jump-factor", "4") == 0
    assert main(["cluster", "--input", str(synth_dir / "data.csv"), "--schema", str(synth_dir / "schema.json"),
                 "--out", str(b), "--config", str(tmp_path / "a.manifest.json")]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert json.loads((tmp_path / "b.manifest.json").read_text())["config"]["radius.jump_factor"] == 4.0


def test_seed_env_fallback(synth_dir, tmp_path, monkeypatch):
    monkeypatch.setenv("MIXEDCLUST_SEED", "11")
    assert _cluster(synth_dir, tmp_path / "e.csv") == 0
    assert json.loads((tmp_path / "e.manifest.json").read_text())["seed"] == 11
    monkeypatch.setenv("MIXEDCLUST_SEED", "x")
    assert _cluster(synth_dir, tmp_path / "f.csv") == 1


def test_diagnostics(synth_dir, tmp_path):
    diag = tmp_path / "diag"
    assert _cluster(synth_dir, tmp_path / "l.csv", "--diagnostics", str(diag)) == 0
    hd = _rows(diag / "iter000_hd.csv")
    assert hd[0] == ["j", "U_j", "eps_j"] and len(hd) == 1 + 5
    assert sum(int(r[1]) for r in hd[1:]) == 50
    ed = _rows(diag / "iter000_ed.csv")
    assert ed[0][0] == "bin" and "V_j" in ed[0] and len(ed) == 11
    cdf = _rows(diag / "iter000_cdf.csv")
    assert len(cdf) == 51 and float(cdf[-1][2]) == 1.0
    assert (diag / "iterations.csv").exists()


def test_missing_schema_names_path(synth_dir, tmp_path, capsys):
    missing = tmp_path / "nope.json"
    rc = main(["cluster", "--input", str(synth_dir / "data.csv"), "--schema", str(missing),
               "--out", str(tmp_path / "x.csv")])
    assert rc == 1
    assert str(missing) in capsys.readouterr().err


def test_bad_data_and_config(synth_dir, tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("nonsense\n1\n")
    assert main(["cluster", "--input", str(bad), "--schema", str(synth_dir / "schema.json"),
                 "--out", str(tmp_path / "x.csv")]) == 1
    assert str(bad) in capsys.readouterr().err
    assert _cluster(synth_dir, tmp_path / "y.csv", "--alpha", "2") == 1
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"nonsense.key": 1}')
    assert _cluster(synth_dir, tmp_path / "z.csv", "--config", str(cfg)) == 1


def test_usage_error_exit_code():
    assert main(["cluster"]) == 1
    assert main([]) == 1


def _labels(path, name, labels):
    path.write_text(f"row_id,{name}\n" + "".join(f"{i},{k}\n" for i, k in enumerate(labels)))


def test_eval(tmp_path, capsys):
    truth = tmp_path / "t.csv"
    _labels(truth, "true_label", [1, 1, 2, 2])
    same = tmp_path / "same.csv"
    _labels(same, "cluster_label", [1, 1, 2, 2])
    out = tmp_path / "m.csv"
    assert main(["eval", "--labels", str(same), "--truth", str(truth), "--out", str(out)]) == 0
    assert "CR=1.000000 IG=1.000000" in capsys.readouterr().out
    assert _rows(out)[1] == ["CR", "1.000000"]
    zero = tmp_path / "zero.csv"
    _labels(zero, "cluster_label", [0, 0, 0, 0])
    assert main(["eval", "--labels", str(zero), "--truth", str(truth)]) == 0
    assert "CR=0.000000 IG=0.000000" in capsys.readouterr().out
    mix = tmp_path / "mix.csv"
    _labels(mix, "cluster_label", [1, 2, 1, 2])
    assert main(["eval", "--labels", str(mix), "--truth", str(truth)]) == 0
    assert "CR=0.500000" in capsys.readouterr().out


def test_eval_row_mismatch(tmp_path):
    truth = tmp_path / "t.csv"
    _labels(truth, "true_label", [1, 1, 2, 2])
    short = tmp_path / "s.csv"
    _labels(short, "cluster_label", [1, 1, 2])
    assert main(["eval", "--labels", str(short), "--truth", str(truth)]) == 1


def test_bench_small(tmp_path):
    out = tmp_path / "bench.csv"
    assert main(["bench", "--replicates", "1", "--tables", "1", "--variances", "0.25",
                 "--calib-B", "19", "--out", str(out)]) == 0
    rows = _rows(out)
    assert rows[0][:3] == ["replicate", "setting", "CR"]
    assert rows[1][1] == "table1_var0.25" and rows[2][0] == "mean"
