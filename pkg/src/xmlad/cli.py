"""Command-line entry point wiring the pipeline stages together.

Exit codes: 0 success, 1 usage error, 2 data error.  Diagnostics go to
stderr; data goes to files or stdout only.
"""

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

from . import adifa, evaluate, model_io, synth
from .errors import XmladError
from .extract import FeatureMatrix, build_feature_matrix
from .flatten import (DEFAULT_TFIDF_K, FlatDataset, TfIdfDictionary,
                      build_dictionary, flatten_matrix)
from .inject import ALL_CLASSES, AttackClass, InjectionSpec, \
    make_anomalous_corpus, records_to_text
from .schema import SchemaVector, parse_xsd

log = logging.getLogger("xmlad")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _load_corpus(source: str):
    """A directory of .xml files or a newline-delimited manifest."""
    p = Path(source)
    if p.is_dir():
        files = sorted(p.glob("*.xml"))
    else:
        files = [Path(line) for line in p.read_text(encoding="utf-8").splitlines()
                 if line.strip()]
    ids = [f.name for f in files]
    return [f.read_text(encoding="utf-8") for f in files], ids


def _write_corpus(directory: str, documents, ids):
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    for doc_id, doc in zip(ids, documents):
        name = doc_id if doc_id.endswith(".xml") else f"{doc_id}.xml"
        (out / name).write_text(doc, encoding="utf-8", newline="\n")


def build_parser() -> _Parser:
    parser = _Parser(prog="xmlad",
                     description="XML anomaly detection pipeline")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for every randomized stage")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("schema-parse", help="parse an XSD into a .xadschema")
    p.add_argument("xsd", help="XSD file path, or - for stdin")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--no-attributes", action="store_true",
                   help="skip XML attribute descriptors")

    p = sub.add_parser("extract", help="extract a corpus into a .xadfm")
    p.add_argument("corpus", help="directory of .xml files or a manifest")
    p.add_argument("--schema", required=True)
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("flatten", help="flatten a .xadfm into a CSV dataset")
    p.add_argument("matrix", help=".xadfm file")
    p.add_argument("--schema", required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--dict-out", help="also write the TF-IDF dictionary here")
    p.add_argument("--dict", dest="dict_in",
                   help="reuse a training dictionary instead of building one")
    p.add_argument("--tfidf-k", type=int, default=DEFAULT_TFIDF_K)
    p.add_argument("--labels", help="CSV of row_id,label to attach")

    p = sub.add_parser("train", help="train a detector on a CSV dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--algo", default="adifa",
                   choices=["adifa", "pga", "gde", "lof"])
    p.add_argument("--psi", default="gm", choices=list(adifa.PSI_TAGS))
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--pga-alpha", type=float, default=0.1)
    p.add_argument("--pga-k", type=int, default=1)
    p.add_argument("--gde-sign-mode", default="corrected",
                   choices=["corrected", "literal"])
    p.add_argument("--lof-min-pts", type=int, default=10)
    p.add_argument("--standardize", action="store_true")
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("score", help="score a dataset with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--localize", type=int, default=0, metavar="N",
                   help="append the top-N localization columns per row")
    p.add_argument("-o", "--output", default="-")

    p = sub.add_parser("localize", help="rank per-attribute likelihoods")
    p.add_argument("--model", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--top", type=int, default=3)
    p.add_argument("-o", "--output", default="-")

    p = sub.add_parser("inject", help="inject attacks into a corpus")
    p.add_argument("--schema", required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output", required=True)
    p.add_argument("--anomaly-index", type=float, required=True)
    p.add_argument("--fraction", type=float, default=1.0,
                   help="fraction of documents to inject")
    p.add_argument("--classes",
                   help="comma list from: valuepoisoning,xss,cdata,xpath,leak")
    p.add_argument("--payload-corpus")
    p.add_argument("--truth-out", help="write the .xadtruth records here")

    p = sub.add_parser("gen-corpus", help="generate a synthetic normal corpus")
    p.add_argument("--schema", required=True)
    p.add_argument("--params",
                   help="JSON file of generative params (default: demo)")
    p.add_argument("-n", "--count", type=int, required=True)
    p.add_argument("--out", dest="output", required=True)

    p = sub.add_parser("evaluate", help="run 5x2 CV over several algorithms")
    p.add_argument("--dataset", required=True, help="labeled CSV")
    p.add_argument("--algos", default="adifa-gm,pga,gde,lof")
    p.add_argument("--report", required=True, help="report directory")
    p.add_argument("--lof-min-pts", type=int, default=10)
    p.add_argument("--standardize", action="store_true")

    p = sub.add_parser("learning-curve", help="nested-subset learning curve")
    p.add_argument("--dataset", required=True, help="labeled CSV")
    p.add_argument("--algo", default="adifa-gm")
    p.add_argument("-o", "--output", default="-")
    return parser


_CLASS_ALIASES = {
    "valuepoisoning": AttackClass.VALUE_POISONING,
    "xss": AttackClass.XSS,
    "cdata": AttackClass.CDATA_INJECTION,
    "xpath": AttackClass.XPATH_INJECTION,
    "leak": AttackClass.DATA_LEAKAGE,
}


def _parse_classes(arg):
    if not arg:
        return ALL_CLASSES
    classes = []
    for name in arg.split(","):
        key = name.strip().lower()
        if key not in _CLASS_ALIASES:
            raise UsageError(f"unknown attack class {name!r}")
        classes.append(_CLASS_ALIASES[key])
    return tuple(classes)


def _open_out(path):
    if path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def _cmd_schema_parse(args) -> None:
    schema = parse_xsd(_read_text(args.xsd),
                       include_attributes=not args.no_attributes)
    for path, message in schema.issues:
        log.warning("schema issue at %s: %s", path, message)
    schema.save(args.output)


def _cmd_extract(args) -> None:
    schema = SchemaVector.load(args.schema)
    corpus, ids = _load_corpus(args.corpus)
    matrix = build_feature_matrix(corpus, schema, row_ids=ids)
    for rid, message in matrix.diagnostics:
        log.warning("skipped %s: %s", rid, message)
    matrix.save(args.output)


def _cmd_flatten(args) -> None:
    schema = SchemaVector.load(args.schema)
    matrix = FeatureMatrix.load(args.matrix)
    if args.dict_in:
        dictionary = TfIdfDictionary.load(args.dict_in)
    else:
        dictionary = build_dictionary(matrix, schema, k=args.tfidf_k)
    labels = None
    if args.labels:
        by_id = {}
        with open(args.labels, "r", encoding="utf-8", newline="") as fh:
            for row in csv.reader(fh):
                if row and row[0] != "row_id":
                    by_id[row[0]] = row[1]
        labels = [by_id[rid] for rid in matrix.row_ids]
    dataset = flatten_matrix(matrix, schema, dictionary, labels=labels)
    dataset.to_csv(args.output)
    if args.dict_out:
        dictionary.save(args.dict_out)


def _cmd_train(args) -> None:
    dataset = FlatDataset.from_csv(args.dataset)
    if args.algo == "adifa":
        tag = f"adifa-{args.psi}"
    elif args.algo == "gde" and args.gde_sign_mode == "literal":
        tag = "gde-literal"
    else:
        tag = args.algo
    model = evaluate.train_algorithm(
        tag, dataset, threshold=args.threshold, alpha=args.pga_alpha,
        k=args.pga_k, min_pts=args.lof_min_pts,
        standardize=args.standardize)
    model_io.save_model(model, args.output)


def _cmd_score(args) -> None:
    kind, model = model_io.load_model(args.model)
    dataset = FlatDataset.from_csv(args.dataset)
    out, close = _open_out(args.output)
    try:
        writer = csv.writer(out, lineterminator="\n")
        header = ["row", "score", "likelihood", "label"]
        for i in range(max(0, args.localize)):
            header += [f"localized_{i + 1}", f"localized_{i + 1}_d"]
        writer.writerow(header)
        if kind == "adifa":
            for i, x in enumerate(dataset.rows):
                result = adifa.classify(model, x)
                cells = [str(i), repr(result.score), repr(result.likelihood),
                         result.label]
                for name, d in adifa.localize(result, args.localize):
                    cells += [name, repr(d)]
                writer.writerow(cells)
        else:
            if args.localize:
                raise UsageError("--localize requires an adifa model")
            from . import baselines
            classify = {"pga": baselines.pga_classify,
                        "gde": baselines.gde_classify,
                        "lof": baselines.lof_classify}[kind]
            for i, x in enumerate(dataset.rows):
                score, label = classify(model, x)
                writer.writerow([str(i), repr(score), "", label])
    finally:
        if close:
            out.close()


def _cmd_localize(args) -> None:
    kind, model = model_io.load_model(args.model)
    if kind != "adifa":
        raise UsageError("localize requires an adifa model")
    dataset = FlatDataset.from_csv(args.dataset)
    out, close = _open_out(args.output)
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["row", "rank", "column", "likelihood"])
        for i, x in enumerate(dataset.rows):
            result = adifa.classify(model, x)
            for rank, (name, d) in enumerate(
                    adifa.localize(result, args.top), start=1):
                writer.writerow([str(i), str(rank), name, repr(d)])
    finally:
        if close:
            out.close()


def _cmd_inject(args) -> None:
    schema = SchemaVector.load(args.schema)
    corpus, ids = _load_corpus(args.input)
    spec = InjectionSpec(anomaly_index=args.anomaly_index,
                         classes=_parse_classes(args.classes),
                         seed=args.seed, payload_corpus=args.payload_corpus)
    documents, labels, records = make_anomalous_corpus(
        corpus, schema, spec, fraction_anomalous=args.fraction, row_ids=ids)
    _write_corpus(args.output, documents, ids)
    labels_path = Path(args.output) / "labels.csv"
    with open(labels_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["row_id", "label"])
        for rid, label in zip(ids, labels):
            writer.writerow([rid, label])
    if args.truth_out:
        with open(args.truth_out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(records_to_text(records))


def _cmd_gen_corpus(args) -> None:
    schema = SchemaVector.load(args.schema)
    if args.params:
        with open(args.params, "r", encoding="utf-8") as fh:
            params = synth.params_from_obj(schema, json.load(fh))
    else:
        params = synth.demo_params(schema, seed=args.seed)
    docs = synth.generate_normal_corpus(schema, params, args.count,
                                        seed=args.seed)
    width = len(str(max(args.count - 1, 0)))
    ids = [f"doc{str(i).zfill(width)}" for i in range(args.count)]
    _write_corpus(args.output, docs, ids)


def _cmd_evaluate(args) -> None:
    dataset = FlatDataset.from_csv(args.dataset)
    tags = [t.strip() for t in args.algos.split(",") if t.strip()]
    for tag in tags:
        if tag not in evaluate.ALGORITHM_TAGS:
            raise UsageError(f"unknown algorithm tag {tag!r}")
    report_dir = Path(args.report)
    report_dir.mkdir(parents=True, exist_ok=True)
    results = {}
    for tag in tags:
        results[tag] = evaluate.cv_5x2(dataset, tag, seed=args.seed,
                                       min_pts=args.lof_min_pts,
                                       standardize=args.standardize)
        log.info("%s mean AUC %.4f", tag, results[tag].mean_auc)
    with open(report_dir / "folds.csv", "w", encoding="utf-8",
              newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["algorithm"] + [f"fold_{i}" for i in range(10)]
                        + ["mean"])
        for tag in tags:
            r = results[tag]
            writer.writerow([tag] + [repr(a) for a in r.fold_aucs]
                            + [repr(r.mean_auc)])
    if len(tags) >= 2:
        matrix = [[results[t].fold_aucs[i] for t in tags] for i in range(10)]
        report = evaluate.friedman_bonferroni(matrix, reference=0)
        sym = {"better": "+", "worse": "-", "equal": "="}
        lines = [f"friedman_p {report.friedman_p!r}",
                 f"critical_difference {report.critical_difference!r}",
                 "ranks " + " ".join(
                     f"{t}={r!r}" for t, r in zip(tags, report.mean_ranks)),
                 "", "pairwise (cell: column vs row)", "\t" + "\t".join(tags)]
        for i, tag in enumerate(tags):
            lines.append(tag + "\t"
                         + "\t".join(sym[c] for c in report.pairwise[i]))
        (report_dir / "significance.txt").write_text(
            "\n".join(lines) + "\n", encoding="utf-8")
    for tag in tags:
        _write_roc(dataset, tag, args, report_dir / f"roc_{tag}.csv")


def _write_roc(dataset, tag, args, path):
    import numpy as np
    labels = np.asarray(dataset.labels)
    rng = np.random.default_rng([args.seed, 99])
    perm = rng.permutation(len(labels))
    half = len(labels) // 2
    train_idx = perm[:half][labels[perm[:half]] == "normal"]
    test_idx = perm[half:]
    model = evaluate.train_algorithm(tag, evaluate._subset(dataset, train_idx),
                                     min_pts=args.lof_min_pts,
                                     standardize=args.standardize)
    scores = evaluate.anomaly_scores(tag, model, dataset.rows[test_idx])
    curve = evaluate.roc_curve(scores, labels[test_idx])
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["fpr", "tpr"])
        for fpr, tpr in curve.points:
            writer.writerow([repr(fpr), repr(tpr)])


def _cmd_learning_curve(args) -> None:
    dataset = FlatDataset.from_csv(args.dataset)
    points = evaluate.learning_curve(dataset, args.algo, seed=args.seed)
    out, close = _open_out(args.output)
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["train_size", "auc"])
        for size, value in points:
            writer.writerow([str(size), repr(value)])
    finally:
        if close:
            out.close()


_COMMANDS = {
    "schema-parse": _cmd_schema_parse,
    "extract": _cmd_extract,
    "flatten": _cmd_flatten,
    "train": _cmd_train,
    "score": _cmd_score,
    "localize": _cmd_localize,
    "inject": _cmd_inject,
    "gen-corpus": _cmd_gen_corpus,
    "evaluate": _cmd_evaluate,
    "learning-curve": _cmd_learning_curve,
}


def run(argv) -> int:
    logging.basicConfig(
        stream=sys.stderr,
        level=os.environ.get("XMLAD_LOG", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s")
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    try:
        _COMMANDS[args.subcommand](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except XmladError as exc:
        print(f"xmlad: {exc}", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
