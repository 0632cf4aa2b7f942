"""Command-line interface.

Exit codes: 0 success, 1 input/validation errors (bad flags, malformed or
missing inputs), 2 runtime failures (network, IO).  All randomness flows
from --seed; repeated invocations write identical files.  Result files land
under --output-dir; progress chatter goes to stderr and --quiet silences it
without changing any output file.
"""

import argparse
import sys
from pathlib import Path

from . import corpus, embedding, pipeline, stats
from .classifiers import (
    ALGORITHMS,
    FeatureMatrix,
    load_model as load_classifier,
    make_classifier,
    save_model as save_classifier,
)
from .errors import InputError
from .evaluation import ablate, cross_validate, evaluate, roc_curve
from .names import parse_name
from .resolver import pcap, probe, wire
from .sanitizer import sanitize_names
from .seeds import canonical_seed, derive_seed

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_RUNTIME = 2

_ABLATE_SALT = 0x61626C38


def _say(args, message: str) -> None:
    if not args.quiet:
        print(message, file=sys.stderr)


def _seed(args) -> int:
    return canonical_seed(0 if args.seed is None else args.seed)


def _outdir(args) -> Path:
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _emit(args, name, text: str) -> None:
    """Write text to a file under --output-dir, or stdout when name is None."""
    if name is None:
        sys.stdout.write(text)
    else:
        (_outdir(args) / name).write_text(text, "utf-8")


def _read_name_lines(path) -> list:
    path = Path(path)
    if not path.is_file():
        raise InputError(f"input file not found: {path}")
    lines = path.read_text("utf-8").splitlines()
    return [ln.strip() for ln in lines if ln.strip() and not ln.lstrip().startswith("#")]


def _csv(header: str, rows) -> str:
    return "\n".join([header] + [",".join(str(c) for c in row) for row in rows]) + "\n"


def _fmt(value) -> str:
    return "" if value is None else repr(float(value))


def _parse_hyper(items) -> dict:
    hyper = {}
    for item in items or []:
        key, eq, value = item.partition("=")
        if not eq or not key.strip():
            raise InputError(f"--hyper expects key=value, got {item!r}")
        hyper[key.strip().replace("-", "_")] = pipeline._coerce(value.strip())
    return hyper


def _load_features(matrix_path, dataset_path) -> FeatureMatrix:
    x = embedding.read_matrix(matrix_path)
    dataset = corpus.read_dataset(dataset_path)
    if x.shape[0] != len(dataset):
        raise InputError(
            f"matrix has {x.shape[0]} rows but dataset lists {len(dataset)} names"
        )
    return FeatureMatrix(x, dataset.labels())


def _roc_text(curve) -> str:
    return _csv("fpr,tpr", [(repr(float(f)), repr(float(t))) for f, t in zip(curve.fpr, curve.tpr)])


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _cmd_sanitize(args) -> int:
    accepted, discarded = sanitize_names(_read_name_lines(args.input))
    _emit(args, args.output, "".join(name.normalized + "\n" for name in accepted))
    if args.rejects:
        _emit(args, args.rejects, _csv("raw,rule", discarded))
    _say(args, f"accepted {len(accepted)}, discarded {len(discarded)}")
    return EXIT_OK


def _cmd_probe(args) -> int:
    raw_names = _read_name_lines(args.input)
    rows = []
    pending = []          # (row index, labels)
    for raw in raw_names:
        try:
            labels = parse_name(raw).labels
        except InputError:
            rows.append([raw, "invalid", "", "0"])
            continue
        rows.append(None)
        pending.append((len(rows) - 1, labels))
    verdicts = probe.probe_names(
        [labels for _, labels in pending],
        args.server,
        timeout=args.timeout_ms / 1000.0,
        retries=args.retries,
        max_inflight=args.max_inflight,
    )
    for (slot, _), verdict in zip(pending, verdicts):
        rcode = "" if verdict.rcode is None else wire.RCODE_NAMES.get(
            verdict.rcode, str(verdict.rcode)
        )
        rows[slot] = [verdict.name, verdict.status, rcode, str(verdict.attempts)]
    _emit(args, args.output, _csv("name,status,rcode,attempts", rows))
    return EXIT_OK


def _cmd_extract(args) -> int:
    result = pcap.extract_qnames(args.pcap, pcap.DeviceMap.from_csv(args.devices))
    out = _outdir(args)
    for cls, name_list in sorted(result.lists.items()):
        corpus.write_names(name_list.names, out / f"{cls}.txt")
        _say(args, f"{cls}: {len(name_list)} names -> {out / (cls + '.txt')}")
    _say(
        args,
        f"packets {result.packets}, matched {result.matched}, "
        f"unmapped {result.unmapped}, parse failures {result.parse_failures}",
    )
    return EXIT_OK


def _cmd_prepare(args) -> int:
    positive, pos_rejects = corpus.load_list(
        args.positive, args.positive_id or Path(args.positive).stem, corpus.IOT_CLASS
    )
    rejects = [(raw, rule, positive.id) for raw, rule in pos_rejects]
    negatives = []
    ids = args.negative_id or [Path(p).stem for p in args.negative]
    if len(ids) != len(args.negative):
        raise InputError(
            f"{len(ids)} negative ids given for {len(args.negative)} negative lists"
        )
    for path, list_id in zip(args.negative, ids):
        loaded, discarded = corpus.load_list(path, list_id, corpus.OTHER_CLASS)
        rejects.extend((raw, rule, list_id) for raw, rule in discarded)
        negatives.append(loaded)
    if not args.keep_commons:
        negatives = [corpus.remove_commons(positive, nl)[0] for nl in negatives]
    negatives = pipeline._disjoint_negatives(negatives)
    n = args.n if args.n is not None else len(positive)
    negative = pipeline._select_negatives(negatives, args.mode, n, _seed(args))
    dataset = corpus.make_dataset(positive, negative, seed=_seed(args))
    corpus.write_dataset(dataset, _outdir(args) / args.output)
    if args.rejects:
        _emit(args, args.rejects, _csv("raw,rule,list", rejects))
    _say(args, f"{len(positive)} positive + {len(negative)} negative -> {args.output}")
    return EXIT_OK


def _cmd_fixtures(args) -> int:
    name_list = corpus.generate_fixtures(args.kind, args.n, _seed(args))
    output = args.output or f"{args.kind}.txt"
    corpus.write_names(name_list.names, _outdir(args) / output)
    _say(args, f"wrote {len(name_list)} {args.kind} names to {output}")
    return EXIT_OK


def _stats_block(title: str, summary) -> str:
    rows = [
        ("n", summary.n),
        ("min", _fmt(summary.minimum)),
        ("q1", _fmt(summary.q1)),
        ("median", _fmt(summary.median)),
        ("q3", _fmt(summary.q3)),
        ("max", _fmt(summary.maximum)),
        ("mean", _fmt(summary.mean)),
        ("bandwidth", _fmt(summary.bandwidth)),
    ]
    text = f"# {title} summary\n" + _csv("stat,value", rows)
    density = zip(summary.density_x, summary.density_y)
    text += f"# {title} density\n" + _csv(
        "x,y", [(repr(float(x)), repr(float(y))) for x, y in density]
    )
    return text


def _cmd_stats(args) -> int:
    name_list, discarded = corpus.load_list(args.input, Path(args.input).stem, args.cls)
    if discarded:
        _say(args, f"discarded {len(discarded)} malformed names")
    table = stats.top_labels(name_list, args.top)
    text = _stats_block("name-length", stats.name_length_stats(name_list))
    text += _stats_block("label-count", stats.label_count_stats(name_list))
    text += "# top labels\n" + _csv(
        "label,frequency", [(label, repr(float(freq))) for label, freq in table.entries]
    )
    text += _csv(
        "others_mass,total_occurrences",
        [(repr(float(table.others_mass)), table.total_occurrences)],
    )
    _emit(args, args.output, text)
    return EXIT_OK


def _embed_config(args) -> embedding.EmbeddingConfig:
    return embedding.EmbeddingConfig(
        vector_dim=args.dim,
        window=args.window,
        pad_to=args.pad_to,
        negatives=args.negatives,
        epochs=args.epochs,
        min_count=args.min_count,
        seed=_seed(args),
    )


def _cmd_embed(args) -> int:
    names = []
    seen = set()
    for path in args.input:
        loaded, _ = corpus.load_list(path, Path(path).stem, corpus.OTHER_CLASS)
        for name in loaded.names:
            if name.normalized not in seen:
                seen.add(name.normalized)
                names.append(name)
    config = _embed_config(args)
    model = embedding.train_cbow(embedding.pad_names(names, config), config)
    embedding.save_model(model, _outdir(args) / args.output)
    _say(
        args,
        f"trained on {len(names)} names, vocabulary {len(model.vocab.words)}, "
        f"final epoch loss {model.epoch_losses[-1]:.4f}",
    )
    return EXIT_OK


def _cmd_vectorize(args) -> int:
    model = embedding.load_model(args.embedding)
    name_list, _ = corpus.load_list(args.input, Path(args.input).stem, corpus.OTHER_CLASS)
    matrix = embedding.vectorize_names(name_list.names, model)
    embedding.write_matrix(matrix, _outdir(args) / args.output)
    _say(args, f"wrote {matrix.shape[0]}x{matrix.shape[1]} matrix to {args.output}")
    return EXIT_OK


def _cmd_train(args) -> int:
    data = _load_features(args.matrix, args.dataset)
    model = make_classifier(args.model, seed=_seed(args), **_parse_hyper(args.hyper))
    model.fit(data.x, data.y)
    save_classifier(model, _outdir(args) / args.output)
    _say(args, f"fit {args.model} on {len(data)} rows -> {args.output}")
    return EXIT_OK


def _metrics_rows(report) -> list:
    c = report.confusion
    return [
        ("accuracy", _fmt(report.accuracy)),
        ("precision", _fmt(report.precision)),
        ("recall", _fmt(report.recall)),
        ("f1", _fmt(report.f1)),
        ("auc", _fmt(report.auc)),
        ("tp", c.tp),
        ("fp", c.fp),
        ("tn", c.tn),
        ("fn", c.fn),
    ]


def _cmd_evaluate(args) -> int:
    data = _load_features(args.matrix, args.dataset)
    model = load_classifier(args.model)
    report = evaluate(model, data)
    _emit(args, args.output, _csv("metric,value", _metrics_rows(report)))
    if report.auc is not None:
        _emit(args, args.roc, _roc_text(roc_curve(data.y, model.score(data.x))))
    else:
        _say(args, "single-class labels: AUC undefined, no ROC file written")
    _say(args, f"accuracy {report.accuracy:.4f} on {len(data)} rows")
    return EXIT_OK


def _cv_rows(report) -> list:
    rows = [
        [str(i), str(size)]
        + [_fmt(v) for v in (f.accuracy, f.precision, f.recall, f.f1, f.auc)]
        for i, (f, size) in enumerate(zip(report.folds, report.fold_sizes))
    ]
    metrics = ("accuracy", "precision", "recall", "f1", "auc")
    rows.append(["mean", ""] + [_fmt(report.mean_metric(m)) for m in metrics])
    rows.append(["std", ""] + [_fmt(report.std_metric(m)) for m in metrics])
    return rows


def _cmd_cv(args) -> int:
    data = _load_features(args.matrix, args.dataset)
    hyper = _parse_hyper(args.hyper)
    seed = _seed(args)

    def fresh():
        return make_classifier(args.model, seed=seed, **hyper)

    report = cross_validate(fresh, data, k=args.k, seed=seed)
    _emit(args, args.output, _csv("fold,test_rows,accuracy,precision,recall,f1,auc", _cv_rows(report)))
    _emit(args, args.roc, _roc_text(roc_curve(data.y, report.oof_scores)))
    _say(
        args,
        f"{args.k}-fold mean accuracy {report.mean_accuracy:.4f} "
        f"(std {report.std_accuracy:.4f})",
    )
    return EXIT_OK


def _cmd_ablate(args) -> int:
    data = _load_features(args.matrix, args.dataset)
    positions = args.positions
    if positions is None:
        if args.embedding is None:
            raise InputError("ablate needs --positions or --embedding to size positions")
        positions = embedding.load_model(args.embedding).config.pad_to
    hyper = _parse_hyper(args.hyper)
    seed = _seed(args)

    def fresh():
        return make_classifier(args.model, seed=seed, **hyper)

    train_idx, test_idx = corpus.stratified_split_indices(
        data.y, args.train_fraction, derive_seed(seed, _ABLATE_SALT)
    )
    train, test = data.take(train_idx), data.take(test_idx)
    report = ablate(fresh, train, test, positions=positions)
    rows = [["baseline", _fmt(report.baseline_accuracy), ""]]
    rows += [
        [str(p), _fmt(acc), _fmt(drop)]
        for p, (acc, drop) in enumerate(zip(report.position_accuracies, report.drops))
    ]
    _emit(args, args.output, _csv("position,accuracy,drop", rows))
    baseline = fresh()
    baseline.fit(train.x, train.y)
    _emit(args, args.roc, _roc_text(roc_curve(test.y, baseline.score(test.x))))
    _say(
        args,
        f"baseline {report.baseline_accuracy:.4f}, "
        f"largest drop {report.drops.max():.4f} at position {int(report.drops.argmax())}",
    )
    return EXIT_OK


def _cmd_pipeline(args) -> int:
    config = pipeline.load_config(args.config, seed_override=args.seed)
    outcome = pipeline.run(
        config,
        _outdir(args),
        quiet=args.quiet,
        log=lambda msg: print(msg, file=sys.stderr),
    )
    for label, path in sorted(outcome.written.items()):
        _say(args, f"{label}: {path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--seed", type=int, default=None, help="master random seed (default 0)")
    shared.add_argument("--output-dir", default=".", help="directory for result files")
    shared.add_argument("--quiet", action="store_true", help="suppress progress messages")

    parser = argparse.ArgumentParser(
        prog="iotnames",
        description="IoT domain-name analysis: sanitize, probe, embed, classify, evaluate.",
    )
    sub = parser.add_subparsers(dest="command", metavar="subcommand")

    p = sub.add_parser("sanitize", parents=[shared], help="filter a name list by syntax rules")
    p.add_argument("input", help="file with one name per line")
    p.add_argument("--output", default=None, help="accepted names file (default stdout)")
    p.add_argument("--rejects", default=None, help="CSV of discarded names and rules")
    p.set_defaults(func=_cmd_sanitize)

    p = sub.add_parser("probe", parents=[shared], help="check DNS resolvability over UDP")
    p.add_argument("input", help="file with one name per line")
    p.add_argument("--server", required=True, help="resolver address, host or host:port")
    p.add_argument("--timeout-ms", type=int, default=3000)
    p.add_argument("--retries", type=int, default=2)
    p.add_argument("--max-inflight", type=int, default=64)
    p.add_argument("--output", default=None, help="CSV destination (default stdout)")
    p.set_defaults(func=_cmd_probe)

    p = sub.add_parser("extract", parents=[shared], help="pull DNS question names from a pcap")
    p.add_argument("--pcap", required=True, help="classic pcap capture file")
    p.add_argument("--devices", required=True, help="CSV mapping MAC/IP to class")
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("prepare", parents=[shared], help="build a labeled dataset from lists")
    p.add_argument("--positive", required=True, help="IoT-side name list")
    p.add_argument("--positive-id", default=None)
    p.add_argument("--negative", action="append", required=True, help="repeatable")
    p.add_argument("--negative-id", action="append", default=None)
    p.add_argument("--mode", choices=("top", "random", "mix"), default="top")
    p.add_argument("--n", type=int, default=None, help="negatives to keep (default: positive count)")
    p.add_argument("--keep-commons", action="store_true",
                   help="keep negatives that also appear in the positive list")
    p.add_argument("--output", default="dataset.csv")
    p.add_argument("--rejects", default=None, help="CSV of discarded names")
    p.set_defaults(func=_cmd_prepare)

    p = sub.add_parser("fixtures", parents=[shared], help="generate synthetic name lists")
    p.add_argument("--kind", choices=corpus.FIXTURE_KINDS, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--output", default=None, help="default <kind>.txt")
    p.set_defaults(func=_cmd_fixtures)

    p = sub.add_parser("stats", parents=[shared], help="distribution summaries for a list")
    p.add_argument("input", help="name list file")
    p.add_argument("--cls", choices=corpus.CLASSES, default=corpus.OTHER_CLASS)
    p.add_argument("--top", type=int, default=10, help="rows in the label frequency table")
    p.add_argument("--output", default=None, help="CSV destination (default stdout)")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("embed", parents=[shared], help="train label vectors on name lists")
    p.add_argument("input", nargs="+", help="name list files")
    p.add_argument("--dim", type=int, default=32)
    p.add_argument("--window", type=int, default=3)
    p.add_argument("--pad-to", type=int, default=40)
    p.add_argument("--negatives", type=int, default=5)
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--min-count", type=int, default=1)
    p.add_argument("--output", default="embedding.txt")
    p.set_defaults(func=_cmd_embed)

    p = sub.add_parser("vectorize", parents=[shared], help="map a name list to a feature matrix")
    p.add_argument("input", help="name list file")
    p.add_argument("--embedding", required=True, help="saved embedding file")
    p.add_argument("--output", default="vectors.bin")
    p.set_defaults(func=_cmd_vectorize)

    p = sub.add_parser("train", parents=[shared], help="fit a classifier on a feature matrix")
    p.add_argument("--matrix", required=True, help="binary matrix from vectorize")
    p.add_argument("--dataset", required=True, help="CSV with name,class per matrix row")
    p.add_argument("--model", choices=ALGORITHMS, required=True)
    p.add_argument("--hyper", action="append", default=None, metavar="KEY=VALUE",
                   help="hyperparameter, repeatable (e.g. trees=40)")
    p.add_argument("--output", default="model.bin")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("evaluate", parents=[shared], help="score a saved model on a dataset")
    p.add_argument("--model", required=True, help="saved classifier")
    p.add_argument("--matrix", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--output", default="metrics.csv")
    p.add_argument("--roc", default="roc.csv")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("cv", parents=[shared], help="stratified k-fold cross-validation")
    p.add_argument("--matrix", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--model", choices=ALGORITHMS, required=True)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--hyper", action="append", default=None, metavar="KEY=VALUE")
    p.add_argument("--output", default="cv.csv")
    p.add_argument("--roc", default="roc.csv")
    p.set_defaults(func=_cmd_cv)

    p = sub.add_parser("ablate", parents=[shared], help="accuracy cost of hiding each position")
    p.add_argument("--matrix", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--model", choices=ALGORITHMS, required=True)
    p.add_argument("--positions", type=int, default=None,
                   help="name positions in the matrix (default: from --embedding)")
    p.add_argument("--embedding", default=None, help="saved embedding to read pad_to from")
    p.add_argument("--train-fraction", type=float, default=0.8)
    p.add_argument("--hyper", action="append", default=None, metavar="KEY=VALUE")
    p.add_argument("--output", default="ablation.csv")
    p.add_argument("--roc", default="roc.csv")
    p.set_defaults(func=_cmd_ablate)

    p = sub.add_parser("pipeline", parents=[shared], help="run an end-to-end configured analysis")
    p.add_argument("--config", required=True, help="key = value config file")
    p.set_defaults(func=_cmd_pipeline)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    if not hasattr(args, "func"):
        parser.print_usage(sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except probe.TransportError as exc:
        print(f"network failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"io failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
