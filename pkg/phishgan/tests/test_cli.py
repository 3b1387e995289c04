import json

import pandas as pd
import pytest
import yaml

from phishgan.autodiff.tensor import Tensor
from phishgan.cli import ENV_CHECKPOINT, ENV_DATA, ENV_OUTPUT_DIR, main
from phishgan.training import loop
from phishgan.urls.dataset import UrlRecord, synth_corpus, write_csv
from phishgan.urls.labels import UrlLabel


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    for name in (ENV_DATA, ENV_CHECKPOINT, ENV_OUTPUT_DIR):
        monkeypatch.delenv(name, raising=False)


@pytest.fixture
def data_path(tmp_path):
    path = tmp_path / "test.csv"
    write_csv(synth_corpus(40, seed=8), path)
    return path


def test_synth_data(tmp_path, capsys):
    path = tmp_path / "urls.csv"

    assert main(["synth-data", "-n", "2000", "-o", str(path)]) == 0

    lines = path.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 2001
    assert lines[0] == "url,label"
    assert sum(line.endswith(",malicious") for line in lines) == 1000
    assert "benign: 1000" in capsys.readouterr().out


def test_synth_data_is_reproducible(tmp_path):
    first = tmp_path / "a.csv"
    second = tmp_path / "b.csv"

    main(["--seed", "4", "synth-data", "-n", "300", "-o", str(first)])
    main(["--seed", "4", "synth-data", "-n", "300", "-o", str(second)])

    assert first.read_bytes() == second.read_bytes()


def test_synth_data_output_from_environment(tmp_path, monkeypatch):
    path = tmp_path / "env.csv"
    monkeypatch.setenv(ENV_DATA, str(path))

    assert main(["synth-data", "-n", "10"]) == 0
    assert path.exists()


@pytest.mark.parametrize(
    "argv",
    [
        ["synth-data", "-n", "7", "-o", "x.csv"],
        ["synth-data", "-n", "10"],
        ["game", "chess"],
        ["detect", "http://a.org"],
        ["generate", "-n", "0", "--checkpoint", "x.ckpt"],
        ["--seed", "many", "game", "deployment"],
        [],
    ],
    ids=["odd-count", "no-output", "unknown-game", "no-checkpoint", "zero-count", "seed", "none"],
)
def test_usage_errors_exit_1(argv, capsys):
    assert main(argv) == 1
    assert capsys.readouterr().err


def test_deployment_game(capsys):
    assert main(["game", "deployment"]) == 0

    out = capsys.readouterr().out
    assert out.splitlines()[0] == "deployment: equilibrium payoffs (1, 3)"
    assert "equilibrium path: Send -> Malicious" in out


def test_training_game(capsys):
    assert main(["game", "training"]) == 0

    out = capsys.readouterr().out
    assert out.splitlines()[0] == "training (malicious): equilibrium payoffs (0, 11)"
    assert "* defender: Malicious-Fake -> (0, 11)" in out


def test_training_game_weight_overrides(capsys):
    argv = ["game", "training", "--true-class", "benign"]
    argv += ["--lambda-class", "3", "--lambda-rec", "4"]

    assert main(argv) == 0

    out = capsys.readouterr().out
    # benign sample, adversarial URL: class right 3 + realness right 1
    assert "defender: Benign-Fake -> (0, 4)" in out
    assert "defender: Malicious-Real -> (4, 0)" in out


def test_game_yaml_and_strategic_form(capsys):
    assert main(["game", "deployment", "--yaml"]) == 0
    document = yaml.safe_load(capsys.readouterr().out)
    assert document["equilibrium_path"] == ["Send", "Malicious"]

    assert main(["game", "training", "--strategic-form"]) == 0
    assert "Malicious-Fake/Malicious-Real" in capsys.readouterr().out


def test_detect_one_url(checkpoint_path, capsys):
    assert main(["detect", "http://paypa1.com/login", "--checkpoint", str(checkpoint_path)]) == 0

    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 2
    assert lines[0].endswith("http://paypa1.com/login")
    assert lines[0].split()[0] in {"benign", "malicious"}
    assert lines[1].startswith("throughput:")


def test_detect_file_keeps_order(checkpoint_path, tmp_path, monkeypatch, capsys):
    urls = [f"http://site{i}.example.org/page" for i in range(100)]
    path = tmp_path / "urls.txt"
    path.write_text("\n".join(urls) + "\n", encoding="utf-8")
    monkeypatch.setenv(ENV_CHECKPOINT, str(checkpoint_path))

    assert main(["detect", "--file", str(path), "--json"]) == 0

    document = json.loads(capsys.readouterr().out)
    assert [verdict["url"] for verdict in document["verdicts"]] == urls
    for verdict in document["verdicts"]:
        assert 0.5 <= verdict["class_probability"] <= 1
        assert 0 <= verdict["realness"] <= 1
    assert document["throughput_urls_per_second"] > 0


def test_detect_with_malformed_checkpoint(tmp_path, capsys):
    path = tmp_path / "bad.ckpt"
    path.write_bytes(b"not a checkpoint")

    assert main(["detect", "http://a.org", "--checkpoint", str(path)]) == 2
    assert "format version" in capsys.readouterr().err


def test_detect_empty_url_is_a_usage_error(checkpoint_path, capsys):
    assert main(["detect", "", "--checkpoint", str(checkpoint_path)]) == 1
    assert "empty" in capsys.readouterr().err


def test_detect_with_missing_checkpoint(tmp_path):
    assert main(["detect", "http://a.org", "--checkpoint", str(tmp_path / "none.ckpt")]) == 2


def test_generate(checkpoint_path, capsys):
    argv = ["--seed", "2", "generate", "-n", "5", "--checkpoint", str(checkpoint_path)]

    assert main(argv) == 0
    first = capsys.readouterr().out.splitlines()
    main(argv)
    second = capsys.readouterr().out.splitlines()

    assert len(first) == 5
    assert all(len(line) <= 200 for line in first)
    assert first == second


def test_generate_from_own_seed_urls(checkpoint_path, data_path, capsys):
    argv = ["generate", "--label", "benign", "--data", str(data_path), "-n", "3"]

    assert main([*argv, "--checkpoint", str(checkpoint_path)]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 3


def test_generate_rejects_unknown_label(checkpoint_path):
    assert main(["generate", "--label", "spam", "--checkpoint", str(checkpoint_path)]) == 1


def test_evaluate(checkpoint_path, data_path, tmp_path, capsys):
    output_dir = tmp_path / "out"
    argv = ["evaluate", "--data", str(data_path), "--checkpoint", str(checkpoint_path)]

    assert main([*argv, "--output-dir", str(output_dir)]) == 0

    out = capsys.readouterr().out
    assert "Classification of real URLs (40 samples)" in out
    assert "Adversarial detection (80 samples, 50% generated)" in out
    assert "Structural Similarity" in out
    for name in ("roc.csv", "roc-adversarial.csv"):
        frame = pd.read_csv(output_dir / name)
        assert list(frame.columns) == ["threshold", "fpr", "tpr"]


def test_evaluate_single_class(checkpoint_path, tmp_path, capsys):
    path = tmp_path / "benign.csv"
    write_csv([UrlRecord(f"http://b{i}.org", UrlLabel.BENIGN) for i in range(4)], path)

    assert main(["evaluate", "--data", str(path), "--checkpoint", str(checkpoint_path)]) == 2
    assert "both" in capsys.readouterr().err


def test_train_with_unreadable_data(tmp_path):
    assert main(["train", "--data", str(tmp_path / "missing.csv")]) == 2


def test_train_with_too_few_urls(tmp_path):
    path = tmp_path / "few.csv"
    write_csv(synth_corpus(6, seed=0), path)

    assert main(["train", "--data", str(path), "--output-dir", str(tmp_path)]) == 2


def test_train_numeric_abort(monkeypatch, data_path, tmp_path, capsys):
    monkeypatch.setattr(loop, "rec_loss", lambda fake, real: Tensor(float("nan")))
    argv = ["train", "--data", str(data_path), "--output-dir", str(tmp_path)]

    assert main([*argv, "--epochs", "1", "--batch-size", "4"]) == 3
    assert "l_rec_g" in capsys.readouterr().err


@pytest.mark.slow
def test_train_smoke_run(tmp_path, capsys):
    data = tmp_path / "urls.csv"
    main(["synth-data", "-n", "200", "-o", str(data)])
    argv = ["train", "--data", str(data), "--epochs", "2", "--max-folds", "1"]

    runs = []
    for name in ("a", "b"):
        output_dir = tmp_path / name
        assert main([*argv, "--output-dir", str(output_dir)]) == 0
        runs.append(output_dir)

    out = capsys.readouterr().out
    assert "fold 1/5: train 160, test 40" in out
    assert "total 1,097,526" in out
    log = pd.read_csv(runs[0] / "train-log.csv")
    # 160 URLs in batches of 64: 3 iterations per epoch
    assert log["iter"].tolist() == list(range(1, 7))
    assert (runs[0] / "model.ckpt").read_bytes() == (runs[1] / "model.ckpt").read_bytes()
