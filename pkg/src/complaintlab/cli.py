"""Command-line front end.

Every command reads one flat config file (``--config``), lets a few flags
override it, and writes its artifacts under ``--workdir``::

    ingest        raw complaint CSV          -> corpus.csv
    summarize     corpus.csv                 -> summaries.csv
    featurize     corpus.csv                 -> features_<mode>.txt, labels.txt
    train         corpus.csv / synthetic.csv -> model_[synthetic_]<mode>_<clf>.bin
    eval          model + corpus.csv         -> report_[synthetic_]<mode>_<clf>.json
    generate      corpus.csv                 -> synthetic.csv, gan_history_<label>.csv
    compare       two reports                -> comparison_<mode>_<clf>.txt
    print-config  effective settings on stdout

Training always uses the training split of the real corpus (or the whole
synthetic corpus with ``--source synthetic``); evaluation always uses the
test split of the real corpus. Exit status is 0 on success, 2 for
configuration errors, 3 for data errors and 4 for numeric aborts.
"""

import argparse
import csv
import logging
import os
import sys
from dataclasses import replace

from .classify.persist import load_model, save_model
from .config import ClassifierConfig, Settings, stage_seed
from .errors import ComplaintLabError, ConfigError, DataError
from .featurize import HashEmbeddingProvider
from .generate.gan import generate_synthetic_corpus, train_gan, write_synthetic_corpus
from .ingest import filter_records, parse_complaints_csv, write_corpus
from .linalg import write_dense
from .metrics import MetricReport, compare_reports, format_comparison
from .pipeline import load_corpus, make_builder, run_experiment, split_corpus, train_model
from .text import summarize_extractive, summary_fidelity

log = logging.getLogger("complaintlab")

LABEL_NAMES = {False: "nonmeritorious", True: "meritorious"}


def _path(settings, name):
    return os.path.join(settings["paths.workdir"], name)


def _cell(settings):
    return f"{settings['features.mode']}_{settings['classifier.name']}"


def _real_splits(settings):
    corpus = load_corpus(_path(settings, "corpus.csv"))
    return split_corpus(corpus, settings.split_config())


def cmd_ingest(settings, args):
    src = settings["paths.input"]
    try:
        with open(src, "rb") as fh:
            raw = parse_complaints_csv(fh)
    except OSError as exc:
        raise DataError(f"cannot read input {src}: {exc}") from exc
    records = filter_records(raw, settings.filter_config())
    out = _path(settings, "corpus.csv")
    write_corpus(out, records)
    n_pos = sum(r.meritorious for r in records)
    print(f"ingested {len(raw)} rows -> {len(records)} records ({n_pos} meritorious) -> {out}")


def cmd_summarize(settings, args):
    corpus = load_corpus(_path(settings, "corpus.csv"))
    budget = settings["summarize.max_words"]
    out = _path(settings, "summaries.csv")
    with open(out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["row", "words", "summary_words", "fidelity", "summary"])
        for row, rec in zip(corpus.rows, corpus.records):
            summary = summarize_extractive(rec.narrative, max_words=budget)
            fid = summary_fidelity(rec.narrative, summary) if summary.split() else 0.0
            w.writerow([int(row), len(rec.narrative.split()), len(summary.split()), repr(float(fid)), summary])
    print(f"summarized {len(corpus)} narratives (budget {budget} words) -> {out}")


def cmd_featurize(settings, args):
    train, _ = _real_splits(settings)
    corpus = load_corpus(_path(settings, "corpus.csv"))
    # document-level features, whatever the configured classifier
    builder = make_builder(settings.feature_config(), ClassifierConfig(name="lr"), args.embeddings).fit(train)
    X = builder.transform(corpus)
    out = _path(settings, f"features_{settings['features.mode']}.txt")
    write_dense(out, X)
    with open(_path(settings, "labels.txt"), "w", encoding="utf-8") as fh:
        fh.write("".join(f"{int(v)}\n" for v in corpus.labels))
    print(f"wrote {X.shape[0]} x {X.shape[1]} feature matrix -> {out}")


def _training_corpus(settings, source):
    if source == "real":
        return _real_splits(settings)[0]
    path = _path(settings, "synthetic.csv")
    if not os.path.exists(path):
        raise DataError(f"{path} not found; run 'generate' first")
    return load_corpus(path)


def _artifact(settings, kind, source, ext):
    prefix = "synthetic_" if source == "synthetic" else ""
    return _path(settings, f"{kind}_{prefix}{_cell(settings)}.{ext}")


def cmd_train(settings, args):
    if args.source == "synthetic" and args.embeddings:
        raise ConfigError("an embedding file indexes real corpus rows; it cannot be used with synthetic training")
    train = _training_corpus(settings, args.source)
    builder = make_builder(settings.feature_config(), settings.classifier_config(), args.embeddings).fit(train)
    model = train_model(builder.transform(train), train.labels, settings.classifier_config(), builder)
    out = _artifact(settings, "model", args.source, "bin")
    save_model(out, model)
    print(f"trained {settings['classifier.name']} on {len(train)} {args.source} documents -> {out}")


def cmd_eval(settings, args):
    path = _artifact(settings, "model", args.source, "bin")
    if not os.path.exists(path):
        raise DataError(f"{path} not found; run 'train' first")
    model = load_model(path)
    train = _training_corpus(settings, args.source)
    _, test = _real_splits(settings)
    result = run_experiment(train, test, settings.feature_config(), settings.classifier_config(),
                            None if args.source == "synthetic" else args.embeddings, model=model)
    out = _artifact(settings, "report", args.source, "json")
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(result.report.to_json())
    pct = result.report.percentages()
    print(" ".join(f"{k}={v:.2f}" for k, v in pct.items()) + f" -> {out}")


def cmd_generate(settings, args):
    train, _ = _real_splits(settings)
    config = settings.gan_config()
    provider = HashEmbeddingProvider(settings["features.embed_dim"], seed=settings.seed_for("features"))
    generators = {}
    for label in (False, True):
        docs = [d for d, y in zip(train.docs, train.labels) if bool(y) == label]
        branch = replace(config, seed=stage_seed(config.seed, LABEL_NAMES[label]))
        gen, _, history = train_gan(docs, provider, branch)
        history.write_csv(_path(settings, f"gan_history_{LABEL_NAMES[label]}.csv"))
        generators[label] = gen
        last = history.rows[-1] if history.rows else {}
        log.info("%s branch: %s", LABEL_NAMES[label], last)
    records = generate_synthetic_corpus(generators, config, seed=settings.seed_for("sample"))
    out = _path(settings, "synthetic.csv")
    write_synthetic_corpus(out, records)
    print(f"generated {len(records)} synthetic narratives -> {out}")


def _read_report(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return MetricReport.from_json(fh.read())
    except OSError as exc:
        raise DataError(f"cannot read report {path}: {exc}") from exc


def cmd_compare(settings, args):
    real = args.real or _artifact(settings, "report", "real", "json")
    synthetic = args.synthetic or _artifact(settings, "report", "synthetic", "json")
    table = format_comparison(compare_reports(_read_report(real), _read_report(synthetic)))
    out = _path(settings, f"comparison_{_cell(settings)}.txt")
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(table)
    sys.stdout.write(table)


def cmd_print_config(settings, args):
    sys.stdout.write(settings.to_text())


COMMANDS = {
    "ingest": cmd_ingest,
    "summarize": cmd_summarize,
    "featurize": cmd_featurize,
    "train": cmd_train,
    "eval": cmd_eval,
    "generate": cmd_generate,
    "compare": cmd_compare,
    "print-config": cmd_print_config,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value config file")
    common.add_argument("--seed", type=int, help="global seed (overrides 'seed')")
    common.add_argument("--workdir", help="artifact directory (overrides 'paths.workdir')")
    common.add_argument("--input", help="raw complaint CSV (overrides 'paths.input')")
    common.add_argument("--mode", help="featurization: tfidf, truncated_tfidf, embed_plain, embed_idf")
    common.add_argument("--classifier", help="lr, rf or lstm")
    common.add_argument("--embeddings", help="dense matrix file of document vectors, one row per corpus row")
    common.add_argument("--max-words", type=int, help="summary budget (overrides 'summarize.max_words')")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override any config key; repeatable")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="complaintlab", description="Complaint classification and generation.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name in ("train", "eval"):
            p.add_argument("--source", choices=("real", "synthetic"), default="real",
                           help="train on the real training split or on synthetic.csv")
        if name == "compare":
            p.add_argument("--real", help="real-data report (default: this cell's report)")
            p.add_argument("--synthetic", help="synthetic-data report (default: this cell's synthetic report)")
    return parser


def load_settings(args):
    settings = Settings.from_file(args.config) if args.config else Settings()
    flags = {"seed": args.seed, "paths.workdir": args.workdir, "paths.input": args.input,
             "features.mode": args.mode, "classifier.name": args.classifier, "summarize.max_words": args.max_words}
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        settings.set(key.strip(), value.strip())
    for key, value in flags.items():
        if value is not None:
            settings.set(key, value)
    return settings.validate()


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    if "--print-config" in argv:
        # flag form of the print-config command
        argv.remove("--print-config")
        argv = ["print-config"] + [a for a in argv if a not in COMMANDS]
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        settings = load_settings(args)
        if args.embeddings:
            if settings["features.mode"] not in ("embed_plain", "embed_idf"):
                raise ConfigError("--embeddings applies only to embed_plain / embed_idf")
            if settings["classifier.name"] == "lstm":
                raise ConfigError("--embeddings holds document vectors; the LSTM needs token sequences")
        if args.command != "print-config":
            os.makedirs(settings["paths.workdir"], exist_ok=True)
        COMMANDS[args.command](settings, args)
    except ComplaintLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ConfigError.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DataError.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
