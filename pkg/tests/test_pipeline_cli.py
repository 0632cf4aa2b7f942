import numpy as np
import pytest

from iotnames import cli, corpus, pipeline
from iotnames.errors import InputError
from test_probe import ScriptedResolver


def write_fixture_lists(directory, n=80, seed=0):
    iot = corpus.generate_fixtures("iot-like", n, seed)
    top = corpus.generate_fixtures("toplist-like", n, seed + 1)
    iot_path = directory / "iot.txt"
    top_path = directory / "top.txt"
    corpus.write_names(iot.names, iot_path)
    corpus.write_names(top.names, top_path)
    return iot_path, top_path


def small_config_text(extra=""):
    return (
        "seed = 7\n"
        "positive.path = iot.txt\n"
        "negative.paths = top.txt\n"
        "embed.dim = 4\n"
        "embed.pad_to = 8\n"
        "embed.epochs = 2\n"
        "model = dt\n"
        + extra
    )


# ---------------------------------------------------------------------------
# Config parsing
# ---------------------------------------------------------------------------

def test_parse_config_fills_defaults(tmp_path):
    write_fixture_lists(tmp_path)
    config = pipeline.parse_config_text(
        "seed = 3\npositive.path = iot.txt\nnegative.paths = top.txt\n", tmp_path
    )
    assert config.seed == 3
    assert config.positive_path == (tmp_path / "iot.txt").resolve()
    assert config.negative_paths == [(tmp_path / "top.txt").resolve()]
    assert config.negative_ids == ["top"]
    assert config.drop_commons is True
    assert config.select_mode == "top"
    assert config.select_n is None
    assert config.picks == 1
    assert config.embedding.vector_dim == 32
    assert config.embedding.pad_to == 40
    assert config.fit_on == "combined"
    assert config.model == "rf"
    assert config.model_hyper == {}
    assert config.eval_mode == "holdout"
    assert config.train_fraction == 0.8
    assert config.cv_k == 5


def test_parse_config_comments_blank_lines_and_hyper_passthrough(tmp_path):
    write_fixture_lists(tmp_path)
    text = (
        "# a comment\n"
        "\n"
        "seed = 1\n"
        "positive.path = iot.txt\n"
        "negative.paths = top.txt\n"
        "model = rf\n"
        "model.trees = 10\n"
        "model.bootstrap = false\n"
        "model.max_depth = 4\n"
    )
    config = pipeline.parse_config_text(text, tmp_path)
    assert config.model_hyper == {"trees": 10, "bootstrap": False, "max_depth": 4}


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("positive.path = iot.txt\nnegative.paths = top.txt\n", "seed is required"),
        ("seed = 1\nnegative.paths = top.txt\n", "positive.path is required"),
        ("seed = 1\npositive.path = iot.txt\n", "negative.paths is required"),
        ("seed = 1\npositive.path = iot.txt\nnegative.paths = top.txt\nwat = 1\n", "unknown keys"),
        ("seed = 1\nseed = 2\npositive.path = iot.txt\nnegative.paths = top.txt\n", "duplicate key"),
        ("seed x 1\n", "expected key = value"),
        ("seed = 1\npositive.path = iot.txt\nnegative.paths = absent.txt\n", "not found"),
        (
            "seed = 1\npositive.path = iot.txt\nnegative.paths = top.txt\n"
            "negative.ids = a, b\n",
            "negative.ids",
        ),
        (
            "seed = 1\npositive.path = iot.txt\nnegative.paths = top.txt\n"
            "select.picks = 3\n",
            "requires select.mode = random",
        ),
        (
            "seed = 1\npositive.path = iot.txt\nnegative.paths = top.txt\n"
            "select.mode = random\nselect.picks = 3\neval.mode = cv\n",
            "requires eval.mode = holdout",
        ),
        (
            "seed = 1\npositive.path = iot.txt\nnegative.paths = top.txt\n"
            "eval.mode = cv\nembed.fit_on = train\n",
            "no single train set",
        ),
        (
            "seed = 1\npositive.path = iot.txt\nnegative.paths = top.txt\n"
            "eval.mode = sideways\n",
            "eval.mode",
        ),
    ],
)
def test_parse_config_rejects_bad_inputs(tmp_path, text, fragment):
    write_fixture_lists(tmp_path)
    with pytest.raises(InputError) as err:
        pipeline.parse_config_text(text, tmp_path)
    assert fragment in str(err.value)


def test_seed_override_beats_config_seed(tmp_path):
    write_fixture_lists(tmp_path)
    text = "seed = 3\npositive.path = iot.txt\nnegative.paths = top.txt\n"
    config = pipeline.parse_config_text(text, tmp_path, seed_override=99)
    assert config.seed == 99
    # the override also satisfies a config with no seed line at all
    config = pipeline.parse_config_text(
        "positive.path = iot.txt\nnegative.paths = top.txt\n", tmp_path, seed_override=5
    )
    assert config.seed == 5


def test_coerce_types():
    assert pipeline._coerce("true") is True
    assert pipeline._coerce("False") is False
    assert pipeline._coerce("3") == 3
    assert isinstance(pipeline._coerce("3"), int)
    assert pipeline._coerce("-2") == -2
    assert pipeline._coerce("0.5") == 0.5
    assert pipeline._coerce("1e-3") == 1e-3
    assert pipeline._coerce("plain") == "plain"


# ---------------------------------------------------------------------------
# Pipeline runs
# ---------------------------------------------------------------------------

def run_pipeline(tmp_path, extra="", subdir="out"):
    write_fixture_lists(tmp_path)
    config = pipeline.parse_config_text(small_config_text(extra), tmp_path)
    out = tmp_path / subdir
    out.mkdir()
    return pipeline.run(config, out), out


def test_pipeline_holdout_writes_expected_artifacts(tmp_path):
    outcome, out = run_pipeline(tmp_path)
    for artifact in ("dataset.csv", "embedding.txt", "vectors.bin", "metrics.csv",
                     "model.bin", "roc.csv", "discarded.csv"):
        assert (out / artifact).is_file(), artifact
    assert len(outcome.reports) == 1
    assert 0.0 <= outcome.reports[0].accuracy <= 1.0
    metrics = (out / "metrics.csv").read_text("utf-8").splitlines()
    assert metrics[0].startswith("pick,")
    dataset = corpus.read_dataset(out / "dataset.csv")
    counts = dataset.class_counts()
    assert counts[corpus.IOT_CLASS] == counts[corpus.OTHER_CLASS] == 80


def test_pipeline_cv_and_ablation_modes(tmp_path):
    outcome, out = run_pipeline(tmp_path, extra="eval.mode = cv\ncv.k = 3\n", subdir="cv")
    lines = (out / "cv.csv").read_text("utf-8").splitlines()
    assert len(lines) == 1 + 3 + 2  # header, one row per fold, mean, std
    assert lines[-2].startswith("mean,")
    assert lines[-1].startswith("std,")
    assert outcome.cv_report is not None

    outcome, out = run_pipeline(tmp_path, extra="eval.mode = ablation\n", subdir="ab")
    lines = (out / "ablation.csv").read_text("utf-8").splitlines()
    assert len(lines) == 1 + 1 + 8  # header, baseline, one row per position
    assert outcome.ablation_report is not None


def test_pipeline_multi_pick_appends_summary(tmp_path):
    extra = "select.mode = random\nselect.picks = 3\nselect.n = 60\n"
    outcome, out = run_pipeline(tmp_path, extra=extra, subdir="picks")
    assert len(outcome.reports) == 3
    lines = (out / "metrics.csv").read_text("utf-8").splitlines()
    # one row per pick plus aggregate mean/std rows
    assert len(lines) == 1 + 3 + 2
    assert lines[-2].split(",")[0] == "mean"
    assert lines[-1].split(",")[0] == "std"


# ---------------------------------------------------------------------------
# CLI basics
# ---------------------------------------------------------------------------

def test_cli_help_and_usage_errors(capsys):
    assert cli.main(["--help"]) == 0
    capsys.readouterr()
    assert cli.main([]) == 1
    assert cli.main(["no-such-command"]) == 1
    assert cli.main(["sanitize"]) == 1  # missing positional
    capsys.readouterr()


def test_cli_sanitize_stdout_and_files(tmp_path, capsys):
    source = tmp_path / "names.txt"
    source.write_text("Cam.Example.COM\n# comment\n\n.bad.example\nok.example.net\n", "utf-8")
    assert cli.main(["sanitize", str(source)]) == 0
    out = capsys.readouterr().out
    assert out.splitlines() == ["cam.example.com", "ok.example.net"]

    assert cli.main([
        "sanitize", str(source), "--output", "clean.txt", "--rejects", "bad.csv",
        "--output-dir", str(tmp_path / "res"),
    ]) == 0
    clean = (tmp_path / "res" / "clean.txt").read_text("utf-8").splitlines()
    assert clean == ["cam.example.com", "ok.example.net"]
    rejects = (tmp_path / "res" / "bad.csv").read_text("utf-8").splitlines()
    assert rejects[0] == "raw,rule"
    assert len(rejects) == 2


def test_cli_missing_input_exits_one(tmp_path, capsys):
    assert cli.main(["sanitize", str(tmp_path / "absent.txt")]) == 1
    assert "error:" in capsys.readouterr().err


def test_cli_fixtures_and_stats(tmp_path, capsys):
    assert cli.main([
        "fixtures", "--kind", "iot-like", "--n", "25", "--seed", "3",
        "--output-dir", str(tmp_path),
    ]) == 0
    lines = (tmp_path / "iot-like.txt").read_text("utf-8").splitlines()
    assert len(lines) == 25
    capsys.readouterr()

    assert cli.main(["stats", str(tmp_path / "iot-like.txt"), "--quiet"]) == 0
    out = capsys.readouterr().out
    assert "# name-length summary" in out
    assert "# label-count summary" in out
    assert "label,frequency" in out


def test_cli_probe_writes_verdict_rows(tmp_path, capsys):
    names = tmp_path / "probe.txt"
    names.write_text("cam.example.com\nbad..name\ngone.example.com\n", "utf-8")
    script = {"cam.example.com": ["answer"], "gone.example.com": ["nxdomain"]}
    with ScriptedResolver(script) as stub:
        code = cli.main([
            "probe", str(names), "--server", stub.address,
            "--timeout-ms", "1000", "--retries", "0",
        ])
    assert code == 0
    rows = capsys.readouterr().out.splitlines()
    assert rows[0] == "name,status,rcode,attempts"
    assert rows[1] == "cam.example.com,resolvable,NOERROR,1"
    assert rows[2] == "bad..name,invalid,,0"
    assert rows[3] == "gone.example.com,unresolvable,NXDOMAIN,1"


def test_cli_probe_network_failure_exits_two(tmp_path, capsys):
    names = tmp_path / "probe.txt"
    names.write_text("cam.example.com\n", "utf-8")
    assert cli.main(["probe", str(names), "--server", "256.0.0.1"]) == 2
    assert "network failure" in capsys.readouterr().err


def test_cli_extract_writes_class_lists(tmp_path, capsys):
    from pathlib import Path

    data = Path(__file__).parent / "data"
    assert cli.main([
        "extract", "--pcap", str(data / "dns_capture.pcap"),
        "--devices", str(data / "devices.csv"),
        "--output-dir", str(tmp_path), "--quiet",
    ]) == 0
    lines = (tmp_path / "iot-m2m.txt").read_text("utf-8").splitlines()
    assert lines == ["cam.example.com"]
    capsys.readouterr()


# ---------------------------------------------------------------------------
# CLI modelling chain
# ---------------------------------------------------------------------------

@pytest.fixture()
def prepared(tmp_path):
    """fixture lists -> dataset.csv + embedding + vectors, all via the CLI."""
    iot_path, top_path = write_fixture_lists(tmp_path, n=60)
    out = str(tmp_path)
    assert cli.main([
        "prepare", "--positive", str(iot_path), "--negative", str(top_path),
        "--output-dir", out, "--seed", "5", "--quiet",
    ]) == 0
    assert cli.main([
        "embed", str(iot_path), str(top_path), "--dim", "4", "--pad-to", "8",
        "--epochs", "2", "--output-dir", out, "--seed", "5", "--quiet",
    ]) == 0
    names_file = tmp_path / "names.txt"
    dataset = corpus.read_dataset(tmp_path / "dataset.csv")
    names_file.write_text(
        "".join(name.normalized + "\n" for name, _ in dataset.entries), "utf-8"
    )
    assert cli.main([
        "vectorize", str(names_file), "--embedding", str(tmp_path / "embedding.txt"),
        "--output-dir", out, "--quiet",
    ]) == 0
    return tmp_path


def test_cli_prepare_balances_classes(prepared):
    dataset = corpus.read_dataset(prepared / "dataset.csv")
    counts = dataset.class_counts()
    assert counts[corpus.IOT_CLASS] == 60
    assert counts[corpus.OTHER_CLASS] == 60


def test_cli_train_evaluate_cv_ablate_chain(prepared, capsys):
    out = str(prepared)
    matrix = str(prepared / "vectors.bin")
    dataset = str(prepared / "dataset.csv")
    assert cli.main([
        "train", "--matrix", matrix, "--dataset", dataset, "--model", "dt",
        "--hyper", "max-depth=4", "--output-dir", out, "--seed", "5", "--quiet",
    ]) == 0
    assert cli.main([
        "evaluate", "--model", str(prepared / "model.bin"), "--matrix", matrix,
        "--dataset", dataset, "--output-dir", out, "--quiet",
    ]) == 0
    metrics = dict(
        line.split(",", 1)
        for line in (prepared / "metrics.csv").read_text("utf-8").splitlines()[1:]
    )
    assert 0.0 <= float(metrics["accuracy"]) <= 1.0
    assert (prepared / "roc.csv").read_text("utf-8").startswith("fpr,tpr")

    assert cli.main([
        "cv", "--matrix", matrix, "--dataset", dataset, "--model", "dt", "--k", "3",
        "--output-dir", out, "--seed", "5", "--quiet", "--output", "cv.csv",
    ]) == 0
    lines = (prepared / "cv.csv").read_text("utf-8").splitlines()
    assert len(lines) == 1 + 3 + 2
    assert lines[0] == "fold,test_rows,accuracy,precision,recall,f1,auc"

    assert cli.main([
        "ablate", "--matrix", matrix, "--dataset", dataset, "--model", "dt",
        "--positions", "8", "--output-dir", out, "--seed", "5", "--quiet",
        "--output", "ablation.csv",
    ]) == 0
    lines = (prepared / "ablation.csv").read_text("utf-8").splitlines()
    assert len(lines) == 1 + 1 + 8
    assert lines[1].startswith("baseline,")
    capsys.readouterr()


def test_cli_train_missing_matrix_exits_one(tmp_path, capsys):
    assert cli.main([
        "train", "--matrix", str(tmp_path / "none.bin"),
        "--dataset", str(tmp_path / "none.csv"), "--model", "dt",
    ]) == 1
    assert "error:" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# End-to-end pipeline command
# ---------------------------------------------------------------------------

def test_cli_pipeline_runs_and_repeats_byte_identically(tmp_path, capsys):
    write_fixture_lists(tmp_path, n=40)
    config = tmp_path / "run.conf"
    config.write_text(small_config_text(), "utf-8")
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert cli.main(["pipeline", "--config", str(config),
                     "--output-dir", str(out_a), "--quiet"]) == 0
    assert cli.main(["pipeline", "--config", str(config),
                     "--output-dir", str(out_b), "--quiet"]) == 0
    files_a = sorted(p.name for p in out_a.iterdir())
    files_b = sorted(p.name for p in out_b.iterdir())
    assert files_a == files_b and files_a
    for name in files_a:
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes(), name
    capsys.readouterr()


def test_cli_quiet_changes_stderr_not_files(tmp_path, capsys):
    write_fixture_lists(tmp_path, n=40)
    config = tmp_path / "run.conf"
    config.write_text(small_config_text(), "utf-8")
    out_loud, out_quiet = tmp_path / "loud", tmp_path / "quiet"
    assert cli.main(["pipeline", "--config", str(config), "--output-dir", str(out_loud)]) == 0
    loud_err = capsys.readouterr().err
    assert loud_err.strip()
    assert cli.main(["pipeline", "--config", str(config),
                     "--output-dir", str(out_quiet), "--quiet"]) == 0
    assert capsys.readouterr().err == ""
    for path in sorted(out_loud.iterdir()):
        assert path.read_bytes() == (out_quiet / path.name).read_bytes(), path.name


def test_cli_seed_flag_overrides_config_seed(tmp_path, capsys):
    write_fixture_lists(tmp_path, n=40)
    config = tmp_path / "run.conf"
    config.write_text(small_config_text(), "utf-8")
    out_7, out_8 = tmp_path / "s7", tmp_path / "s8"
    assert cli.main(["pipeline", "--config", str(config), "--quiet",
                     "--output-dir", str(out_7)]) == 0
    assert cli.main(["pipeline", "--config", str(config), "--quiet",
                     "--output-dir", str(out_8), "--seed", "8"]) == 0
    capsys.readouterr()
    assert (out_7 / "model.bin").read_bytes() != (out_8 / "model.bin").read_bytes()
