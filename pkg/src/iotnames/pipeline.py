"""End-to-end run driven by a flat key=value config file.

A run chains: list loading and sanitization, commons removal, negative-side
selection (top | random | mix), label embedding, vectorization, classifier
training, and evaluation (holdout | cv | ablation).  Every random choice is
derived from the single `seed` key, so a run writes byte-identical outputs
when repeated.

Config keys (defaults in parentheses):

    seed                = 7                 required
    positive.path       = iot.txt           required; the IoT-side list
    positive.id         = (file stem)
    negative.paths      = top.txt, more.txt required; comma separated
    negative.ids        = (file stems)
    commons.remove      = true              drop negatives also in positive
    select.mode         = top               top | random | mix
    select.n            = (positive count)  negatives to keep
    select.picks        = 1                 repeat count; >1 needs mode=random
    embed.dim           = 32
    embed.window        = 3
    embed.pad_to        = 40
    embed.negatives     = 5
    embed.epochs        = 5
    embed.min_count     = 1
    embed.fit_on        = combined          combined | train
    embed.reuse         = false             one embedding across picks
    model               = rf                nb | lr | knn | svm | dt | rf
    model.<name>        =                   hyperparameter passthrough
    eval.mode           = holdout           holdout | cv | ablation
    split.train_fraction= 0.8
    cv.k                = 5

Relative paths are resolved against the config file's directory.  Positives
are always used in full; selection applies to the negative pool.
"""

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from . import corpus, embedding
from .classifiers import ALGORITHMS, FeatureMatrix, make_classifier, save_model
from .embedding import EmbeddingConfig
from .errors import InputError
from .evaluation import (
    AblationReport,
    CrossValidationReport,
    EvaluationReport,
    ablate,
    cross_validate,
    evaluate,
    roc_curve,
)
from .seeds import canonical_seed, derive_seed

_SELECT_SALT = 0x73656C65
_DATA_SALT = 0x64617461
_SPLIT_SALT = 0x73706C69
_EMBED_SALT = 0x656D6265
_MODEL_SALT = 0x6D6F6465
_CV_SALT = 0x63760000

_SELECT_MODES = ("top", "random", "mix")
_EVAL_MODES = ("holdout", "cv", "ablation")
_FIT_ON = ("combined", "train")

_INT_RE = re.compile(r"[+-]?\d+\Z")


@dataclass
class PipelineConfig:
    seed: int
    positive_path: Path
    positive_id: str
    negative_paths: List[Path]
    negative_ids: List[str]
    drop_commons: bool = True
    select_mode: str = "top"
    select_n: Optional[int] = None
    picks: int = 1
    embedding: EmbeddingConfig = field(default_factory=EmbeddingConfig)
    fit_on: str = "combined"
    reuse_embedding: bool = False
    model: str = "rf"
    model_hyper: Dict[str, object] = field(default_factory=dict)
    eval_mode: str = "holdout"
    train_fraction: float = 0.8
    cv_k: int = 5


def _coerce(value: str):
    """Best-effort typing for hyperparameter passthrough values."""
    lowered = value.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    if _INT_RE.match(value):
        return int(value)
    try:
        return float(value)
    except ValueError:
        return value


class _KeyReader:
    """Consume parsed key=value pairs, tracking unknown leftovers."""

    def __init__(self, pairs: Dict[str, str], source: str):
        self.pairs = dict(pairs)
        self.source = source

    def take(self, key: str, default: Optional[str] = None) -> Optional[str]:
        if key in self.pairs:
            return self.pairs.pop(key)
        return default

    def take_int(self, key: str, default: Optional[int]) -> Optional[int]:
        raw = self.take(key)
        if raw is None:
            return default
        if not _INT_RE.match(raw):
            raise InputError(f"{self.source}: {key} must be an integer, got {raw!r}")
        return int(raw)

    def take_float(self, key: str, default: float) -> float:
        raw = self.take(key)
        if raw is None:
            return default
        try:
            return float(raw)
        except ValueError:
            raise InputError(f"{self.source}: {key} must be a number, got {raw!r}")

    def take_bool(self, key: str, default: bool) -> bool:
        raw = self.take(key)
        if raw is None:
            return default
        if raw.lower() not in ("true", "false"):
            raise InputError(f"{self.source}: {key} must be true or false, got {raw!r}")
        return raw.lower() == "true"

    def take_choice(self, key: str, choices, default: str) -> str:
        raw = self.take(key, default)
        if raw not in choices:
            raise InputError(
                f"{self.source}: {key} must be one of {', '.join(choices)}, got {raw!r}"
            )
        return raw


def parse_config_text(
    text: str, base_dir, source: str = "config", seed_override: Optional[int] = None
) -> PipelineConfig:
    base_dir = Path(base_dir)
    pairs: Dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise InputError(f"{source}:{lineno}: expected key = value, got {stripped!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise InputError(f"{source}:{lineno}: empty key")
        if key in pairs:
            raise InputError(f"{source}:{lineno}: duplicate key {key!r}")
        pairs[key] = value

    reader = _KeyReader(pairs, source)
    seed = reader.take_int("seed", None)
    if seed_override is not None:
        seed = seed_override
    if seed is None:
        raise InputError(f"{source}: seed is required (no implicit entropy)")
    seed = canonical_seed(seed)

    positive_raw = reader.take("positive.path")
    if positive_raw is None:
        raise InputError(f"{source}: positive.path is required")
    positive_path = (base_dir / positive_raw).resolve()

    negatives_raw = reader.take("negative.paths")
    if negatives_raw is None:
        raise InputError(f"{source}: negative.paths is required")
    negative_paths = [
        (base_dir / part.strip()).resolve()
        for part in negatives_raw.split(",")
        if part.strip()
    ]
    if not negative_paths:
        raise InputError(f"{source}: negative.paths names no files")

    for path in [positive_path] + negative_paths:
        if not path.is_file():
            raise InputError(f"{source}: list file not found: {path}")

    ids_raw = reader.take("negative.ids")
    if ids_raw is None:
        negative_ids = [path.stem for path in negative_paths]
    else:
        negative_ids = [part.strip() for part in ids_raw.split(",") if part.strip()]
        if len(negative_ids) != len(negative_paths):
            raise InputError(
                f"{source}: negative.ids lists {len(negative_ids)} ids for "
                f"{len(negative_paths)} paths"
            )

    config = PipelineConfig(
        seed=seed,
        positive_path=positive_path,
        positive_id=reader.take("positive.id", positive_path.stem),
        negative_paths=negative_paths,
        negative_ids=negative_ids,
        drop_commons=reader.take_bool("commons.remove", True),
        select_mode=reader.take_choice("select.mode", _SELECT_MODES, "top"),
        select_n=reader.take_int("select.n", None),
        picks=reader.take_int("select.picks", 1),
        embedding=EmbeddingConfig(
            vector_dim=reader.take_int("embed.dim", 32),
            window=reader.take_int("embed.window", 3),
            pad_to=reader.take_int("embed.pad_to", 40),
            negatives=reader.take_int("embed.negatives", 5),
            epochs=reader.take_int("embed.epochs", 5),
            min_count=reader.take_int("embed.min_count", 1),
        ),
        fit_on=reader.take_choice("embed.fit_on", _FIT_ON, "combined"),
        reuse_embedding=reader.take_bool("embed.reuse", False),
        model=reader.take_choice("model", ALGORITHMS, "rf"),
        eval_mode=reader.take_choice("eval.mode", _EVAL_MODES, "holdout"),
        train_fraction=reader.take_float("split.train_fraction", 0.8),
        cv_k=reader.take_int("cv.k", 5),
    )

    for key in list(reader.pairs):
        if key.startswith("model."):
            config.model_hyper[key[len("model."):]] = _coerce(reader.pairs.pop(key))
    if reader.pairs:
        unknown = ", ".join(sorted(reader.pairs))
        raise InputError(f"{source}: unknown keys: {unknown}")

    if config.picks < 1:
        raise InputError(f"{source}: select.picks must be at least 1")
    if config.picks > 1 and config.select_mode != "random":
        raise InputError(f"{source}: select.picks > 1 requires select.mode = random")
    if config.picks > 1 and config.eval_mode != "holdout":
        raise InputError(f"{source}: select.picks > 1 requires eval.mode = holdout")
    if config.eval_mode == "cv" and config.fit_on == "train":
        raise InputError(f"{source}: embed.fit_on = train has no single train set under cv")
    return config


def load_config(path, seed_override: Optional[int] = None) -> PipelineConfig:
    path = Path(path)
    if not path.is_file():
        raise InputError(f"config file not found: {path}")
    return parse_config_text(
        path.read_text("utf-8"), path.parent, source=str(path), seed_override=seed_override
    )


def _fmt(value) -> str:
    return "" if value is None else repr(float(value))


def _metric_row(report: EvaluationReport) -> List[str]:
    return [
        _fmt(report.accuracy),
        _fmt(report.precision),
        _fmt(report.recall),
        _fmt(report.f1),
        _fmt(report.auc),
    ]


def _write_csv(path: Path, header: str, rows) -> None:
    lines = [header] + [",".join(row) for row in rows]
    path.write_text("\n".join(lines) + "\n", "utf-8")


def _disjoint_negatives(lists: List[corpus.NameList]) -> List[corpus.NameList]:
    """Drop later occurrences of names shared between negative lists."""
    seen: set = set()
    out = []
    for name_list in lists:
        kept = [n for n in name_list.names if n.normalized not in seen]
        seen.update(n.normalized for n in kept)
        out.append(
            corpus.NameList(name_list.id, name_list.cls, kept, name_list.provenance)
        )
    return out


def _select_negatives(
    negatives: List[corpus.NameList], mode: str, n: int, seed: int
) -> corpus.NameList:
    if mode == "mix":
        return corpus.make_mix(negatives, n, seed)
    if len(negatives) == 1:
        pool = negatives[0]
    else:
        merged: List = []
        for name_list in negatives:
            merged.extend(name_list.names)
        pool = corpus.NameList(
            "+".join(nl.id for nl in negatives),
            negatives[0].cls,
            merged,
            provenance="concatenation",
        )
    if mode == "top":
        return corpus.select_top(pool, n)
    return corpus.select_random(pool, n, seed)


@dataclass
class PipelineOutcome:
    """Everything a run produced, keyed for the CLI to report."""

    config: PipelineConfig
    written: Dict[str, Path]
    reports: List[EvaluationReport] = field(default_factory=list)
    cv_report: Optional[CrossValidationReport] = None
    ablation_report: Optional[AblationReport] = None


def _dataset_matrices(
    dataset: corpus.LabeledDataset,
    train: corpus.LabeledDataset,
    test: corpus.LabeledDataset,
    model: embedding.EmbeddingModel,
) -> Tuple[FeatureMatrix, FeatureMatrix, FeatureMatrix]:
    x_all = embedding.vectorize_names([name for name, _ in dataset.entries], model)
    index = {
        (name.normalized, cls): i for i, (name, cls) in enumerate(dataset.entries)
    }
    def rows(part):
        return [index[(name.normalized, cls)] for name, cls in part.entries]
    full = FeatureMatrix(x_all, dataset.labels())
    return full, full.take(rows(train)), full.take(rows(test))


def run(config: PipelineConfig, output_dir, quiet: bool = True, log=print) -> PipelineOutcome:
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)

    def say(message: str) -> None:
        if not quiet:
            log(message)

    positive, pos_rejects = corpus.load_list(
        config.positive_path, config.positive_id, corpus.IOT_CLASS
    )
    rejects = [(raw, rule, config.positive_id) for raw, rule in pos_rejects]
    negatives = []
    for path, list_id in zip(config.negative_paths, config.negative_ids):
        loaded, discarded = corpus.load_list(path, list_id, corpus.OTHER_CLASS)
        rejects.extend((raw, rule, list_id) for raw, rule in discarded)
        negatives.append(loaded)
    say(f"loaded {len(positive)} positive and {sum(map(len, negatives))} negative names")

    if config.drop_commons:
        removed_total = 0
        cleaned = []
        for name_list in negatives:
            kept, removed = corpus.remove_commons(positive, name_list)
            removed_total += removed
            cleaned.append(kept)
        negatives = cleaned
        say(f"removed {removed_total} names shared with the positive list")
    negatives = _disjoint_negatives(negatives)

    written: Dict[str, Path] = {}
    rejects_path = output_dir / "discarded.csv"
    _write_csv(rejects_path, "raw,rule,list", rejects)
    written["discarded"] = rejects_path

    n = config.select_n if config.select_n is not None else len(positive)
    outcome = PipelineOutcome(config=config, written=written)
    metric_rows: List[List[str]] = []
    embedding_model: Optional[embedding.EmbeddingModel] = None

    for pick in range(config.picks):
        negative = _select_negatives(
            negatives, config.select_mode, n, derive_seed(config.seed, _SELECT_SALT, pick)
        )
        dataset = corpus.make_dataset(
            positive, negative, seed=derive_seed(config.seed, _DATA_SALT, pick)
        )
        train_ds, test_ds = corpus.split(
            dataset,
            corpus.SplitPlan(
                train_fraction=config.train_fraction,
                seed=derive_seed(config.seed, _SPLIT_SALT, pick),
            ),
        )

        if embedding_model is None or not config.reuse_embedding:
            fit_names = dataset if config.fit_on == "combined" else train_ds
            embed_config = embedding.seeded_config(
                config.embedding,
                derive_seed(config.seed, _EMBED_SALT, 0 if config.reuse_embedding else pick),
            )
            sequences = embedding.pad_names(
                [name for name, _ in fit_names.entries], embed_config
            )
            embedding_model = embedding.train_cbow(sequences, embed_config)
            say(f"pick {pick}: trained embedding on {len(sequences)} names")

        full, train_fm, test_fm = _dataset_matrices(
            dataset, train_ds, test_ds, embedding_model
        )
        model_seed = derive_seed(config.seed, _MODEL_SALT, pick)

        def fresh():
            return make_classifier(config.model, seed=model_seed, **config.model_hyper)

        if config.eval_mode == "holdout":
            classifier = fresh()
            classifier.fit(train_fm.x, train_fm.y)
            report = evaluate(classifier, test_fm)
            outcome.reports.append(report)
            metric_rows.append(
                [str(pick), config.model, str(len(train_fm)), str(len(test_fm))]
                + _metric_row(report)
            )
            say(f"pick {pick}: holdout accuracy {report.accuracy:.4f}")
            if pick == 0:
                save_model(classifier, output_dir / "model.bin")
                written["model"] = output_dir / "model.bin"
                if report.auc is not None:
                    curve = roc_curve(test_fm.y, classifier.score(test_fm.x))
                    _write_csv(
                        output_dir / "roc.csv",
                        "fpr,tpr",
                        [
                            (repr(float(f)), repr(float(t)))
                            for f, t in zip(curve.fpr, curve.tpr)
                        ],
                    )
                    written["roc"] = output_dir / "roc.csv"
        elif config.eval_mode == "cv":
            outcome.cv_report = cross_validate(
                fresh, full, k=config.cv_k, seed=derive_seed(config.seed, _CV_SALT, pick)
            )
            rows = [
                [str(i), str(size)] + _metric_row(fold)
                for i, (fold, size) in enumerate(
                    zip(outcome.cv_report.folds, outcome.cv_report.fold_sizes)
                )
            ]
            metrics = ("accuracy", "precision", "recall", "f1", "auc")
            rows.append(
                ["mean", ""] + [_fmt(outcome.cv_report.mean_metric(m)) for m in metrics]
            )
            rows.append(
                ["std", ""] + [_fmt(outcome.cv_report.std_metric(m)) for m in metrics]
            )
            _write_csv(
                output_dir / "cv.csv",
                "fold,test_rows,accuracy,precision,recall,f1,auc",
                rows,
            )
            written["cv"] = output_dir / "cv.csv"
            say(
                f"cv: mean accuracy {outcome.cv_report.mean_accuracy:.4f} "
                f"(std {outcome.cv_report.std_accuracy:.4f})"
            )
        else:
            outcome.ablation_report = ablate(
                fresh, train_fm, test_fm, positions=config.embedding.pad_to
            )
            rows = [["baseline", _fmt(outcome.ablation_report.baseline_accuracy), ""]]
            rows += [
                [str(p), _fmt(acc), _fmt(drop)]
                for p, (acc, drop) in enumerate(
                    zip(
                        outcome.ablation_report.position_accuracies,
                        outcome.ablation_report.drops,
                    )
                )
            ]
            _write_csv(output_dir / "ablation.csv", "position,accuracy,drop", rows)
            written["ablation"] = output_dir / "ablation.csv"
            say(
                "ablation: baseline accuracy "
                f"{outcome.ablation_report.baseline_accuracy:.4f}, "
                f"max drop {outcome.ablation_report.drops.max():.4f}"
            )

        if pick == 0:
            corpus.write_dataset(dataset, output_dir / "dataset.csv")
            written["dataset"] = output_dir / "dataset.csv"
            embedding.save_model(embedding_model, output_dir / "embedding.txt")
            written["embedding"] = output_dir / "embedding.txt"
            embedding.write_matrix(full.x, output_dir / "vectors.bin")
            written["vectors"] = output_dir / "vectors.bin"

    if metric_rows:
        if len(metric_rows) > 1:
            accuracies = [report.accuracy for report in outcome.reports]
            mean = sum(accuracies) / len(accuracies)
            var = sum((a - mean) ** 2 for a in accuracies) / len(accuracies)
            metric_rows.append(
                ["mean", config.model, "", "", _fmt(mean), "", "", "", ""]
            )
            metric_rows.append(
                ["std", config.model, "", "", _fmt(var ** 0.5), "", "", "", ""]
            )
        _write_csv(
            output_dir / "metrics.csv",
            "pick,model,train_rows,test_rows,accuracy,precision,recall,f1,auc",
            metric_rows,
        )
        written["metrics"] = output_dir / "metrics.csv"
    return outcome
