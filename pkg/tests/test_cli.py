import csv
import json

import pytest

from sparsevsa.cli import PARAMS, main, parse_config_file, resolve, ConfigError
from sparsevsa.experiments import CSV_COLUMNS

FANIN = ["fanin", "--ratios", "0.05,0.1", "--thetas", "1,2", "--mc-trials", "20"]


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_fanin_writes_csv_manifest_svg(tmp_path, capsys):
    out = tmp_path / "o"
    assert main(FANIN + ["--out", str(out)]) == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == ["fanin.csv", "fanin.manifest.json", "fanin.svg"]
    with open(out / "fanin.csv", newline="") as fh:
        assert next(csv.reader(fh)) == list(CSV_COLUMNS)
    rows = read_rows(out / "fanin.csv")
    assert {r["metric"] for r in rows} >= {"alpha_exact", "alpha_int"}
    m = json.loads((out / "fanin.manifest.json").read_text())
    assert m["experiment"] == "fanin" and m["seed"] == 0
    assert m["config"]["thetas"] == [1, 2]
    svg = (out / "fanin.svg").read_text()
    assert "<svg" in svg and "seed=0" in svg
    assert "fanin.csv" in capsys.readouterr().out


def test_no_svg_flag(tmp_path):
    assert main(FANIN + ["--out", str(tmp_path), "--no-svg"]) == 0
    assert not (tmp_path / "fanin.svg").exists()


def test_env_out_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("VSA_OUT_DIR", str(tmp_path / "env"))
    assert main(FANIN) == 0
    assert (tmp_path / "env" / "fanin.csv").is_file()


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("# comment\nthetas = 3\nmc_trials = 0\nratios = 0.1\nseed = 5\n")
    assert main(["fanin", "--config", str(cfg), "--out", str(tmp_path / "a")]) == 0
    m = json.loads((tmp_path / "a" / "fanin.manifest.json").read_text())
    assert m["config"]["thetas"] == [3] and m["seed"] == 5
    assert main(["fanin", "--config", str(cfg), "--thetas", "1", "--seed", "2",
                 "--out", str(tmp_path / "b")]) == 0
    m = json.loads((tmp_path / "b" / "fanin.manifest.json").read_text())
    assert m["config"]["thetas"] == [1] and m["seed"] == 2
    assert m["config"]["mc_trials"] == 0


def test_resolve_defaults_and_errors(tmp_path):
    cfg = resolve("symmetry", {}, {})
    assert cfg == {k: v[1] for k, v in PARAMS["symmetry"].items()}
    with pytest.raises(ConfigError):
        resolve("symmetry", {}, {"bogus": "1"})
    with pytest.raises(ConfigError):
        resolve("symmetry", {"N": "ten"}, {})
    bad = tmp_path / "bad.cfg"
    bad.write_text("no equals sign\n")
    with pytest.raises(ConfigError):
        parse_config_file(bad)


@pytest.mark.parametrize("argv", [
    ["fanin", "--seed", "-1"],
    ["fanin", "--seed", "abc"],
    ["fanin", "--thetas", "x"],
    ["fanin", "--config", "/nonexistent.cfg"],
    ["fanin", "--threads", "0"],
    ["rip", "--M", "0"],
    ["nosuchcommand"],
    ["classify", "eval", "--dataset", "nosuchdata"],
    ["reason", "query", "--probe", "zloty"],
])
def test_config_errors_exit_2_and_write_nothing(tmp_path, argv):
    out = tmp_path / "o"
    assert main(argv + ["--out", str(out)]) == 2
    assert not out.exists()


def test_numerical_failure_exit_3(tmp_path):
    # iris has duplicate rows, so the unregularized dual system is singular
    out = tmp_path / "o"
    assert main(["classify", "eval", "--lam", "0", "--out", str(out)]) == 3
    assert not out.exists()


def test_rerun_is_byte_identical(tmp_path):
    out = tmp_path / "o"
    assert main(["symmetry", "--N", "200", "--K", "10", "--trials", "20", "--seed", "7",
                 "--out", str(out)]) == 0
    assert main(["rerun", str(out / "symmetry.manifest.json")]) == 0
    a = (out / "symmetry.csv").read_bytes()
    b = (out / "rerun" / "symmetry.csv").read_bytes()
    assert a == b


def test_rerun_missing_manifest(tmp_path):
    assert main(["rerun", str(tmp_path / "none.json")]) == 2


def test_reason_query_prints_answer(tmp_path, capsys):
    assert main(["reason", "query", "--out", str(tmp_path), "--no-svg"]) == 0
    first = capsys.readouterr().out.splitlines()[0]
    assert first.startswith("1. peso")
    rows = read_rows(tmp_path / "reason-query.csv")
    assert "answer=peso" in rows[0]["mode"]


def test_classify_train_then_eval(tmp_path):
    assert main(["classify", "train", "--dataset", "iris", "--N", "256", "--K", "16",
                 "--out", str(tmp_path)]) == 0
    model = tmp_path / "classify-train.model.json"
    assert model.is_file()
    train_acc = float(read_rows(tmp_path / "classify-train.csv")[0]["value"])
    assert main(["classify", "eval", "--dataset", "iris", "--model", str(model),
                 "--out", str(tmp_path / "e")]) == 0
    eval_acc = float(read_rows(tmp_path / "e" / "classify-eval.csv")[0]["value"])
    assert eval_acc == pytest.approx(train_acc)
    assert eval_acc > 0.85


def test_classify_eval_csv_dataset(tmp_path):
    data = tmp_path / "toy.csv"
    lines = ["x,y,cls"] + [f"{i % 7},{(i * 3) % 5},{'a' if i % 7 < 3 else 'b'}" for i in range(40)]
    data.write_text("\n".join(lines) + "\n")
    assert main(["classify", "eval", "--dataset", str(data), "--label", "cls",
                 "--N", "128", "--K", "8", "--out", str(tmp_path / "o")]) == 0
    rows = read_rows(tmp_path / "o" / "classify-eval.csv")
    assert rows[0]["metric"] == "cv_accuracy" and float(rows[0]["value"]) > 0.9


def test_version_and_help(capsys):
    assert main(["--version"]) == 0
    assert main(["fanin", "--help"]) == 0
    assert "--mc-trials" in capsys.readouterr().out
