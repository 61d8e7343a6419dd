"""Command-line front end: train, bench, graph-dump, synth, report."""

import argparse
import json
import sys

import numpy as np

from .autodiff.optim import NonFiniteGradientError
from .data import (
    DataFormatError,
    RULES,
    SyntheticSpec,
    TaskError,
    UnknownDatasetError,
    make_synthetic,
    save_dataset,
)
from .encoding import SequenceParseError
from .models import ENCODER_KINDS, IncompatibleTaskError, UnknownEncoderError
from .models.graph import GraphSizeError
from .molgraph import UnsupportedResidueError, build_graph, graph_to_dict
from .training import (
    SCHEMA_VERSION,
    BenchmarkReport,
    DataResolutionError,
    TrainConfig,
    TrainingError,
    emit_report,
    report_to_dict,
    run_benchmark,
    train_model,
    resolve_dataset,
)

EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_TRAINING = 4
EXIT_IO = 5

_DATA_ERRORS = (
    DataFormatError,
    DataResolutionError,
    UnknownDatasetError,
    TaskError,
    SequenceParseError,
    UnsupportedResidueError,
    GraphSizeError,
)
_TRAINING_ERRORS = (TrainingError, NonFiniteGradientError, IncompatibleTaskError)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_USAGE, f"usage error: {message}\n")


def _add_run_flags(sub):
    sub.add_argument("--target_encoding", required=True,
                     help="encoder kind: " + ", ".join(ENCODER_KINDS))
    sub.add_argument("--dataset", default=None,
                     help="registry or synth-<rule> dataset name")
    sub.add_argument("--data_dir", default=None,
                     help="directory with train/valid/test CSV files")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--lr", type=float, default=None,
                     help="default 1e-4 for sequence kinds, 1e-5 for graph kinds")
    sub.add_argument("--epochs", type=int, default=100)
    sub.add_argument("--batch_size", type=int, default=32)
    sub.add_argument("--out", default=None, help="report output directory")
    sub.add_argument("--offline", action="store_true",
                     help="suppress progress output")
    sub.add_argument("--threshold", type=float, default=0.5)
    sub.add_argument("--precision", choices=("float32", "float64"),
                     default="float32")
    sub.add_argument("--run_name", default=None,
                     help="free-form label recorded in the report")
    sub.add_argument("--traces", action="store_true",
                     help="also write per-epoch CSV traces next to the report")


def build_parser():
    parser = _Parser(prog="protbench")
    subs = parser.add_subparsers(dest="command", required=True)

    train = subs.add_parser("train", parents=[], help="single-seed training run")
    _add_run_flags(train)

    bench = subs.add_parser("bench", help="multi-seed benchmark run")
    _add_run_flags(bench)
    bench.add_argument("--seeds", default="0,1,2,3,4",
                       help="comma-separated seed list")
    bench.add_argument("--baseline", default=None,
                       help="baseline report JSON for t-test significance")

    gd = subs.add_parser("graph-dump", help="print the molecular graph of a "
                         "peptide sequence as JSON")
    gd.add_argument("sequence")
    gd.add_argument("--out", default=None)

    synth = subs.add_parser("synth", help="write a synthetic dataset as CSVs")
    synth.add_argument("--dataset", required=True,
                       help="synth-<rule>: " + ", ".join(f"synth-{r}" for r in RULES))
    synth.add_argument("--out", required=True, help="output directory")
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--n_train", type=int, default=128)
    synth.add_argument("--n_valid", type=int, default=32)
    synth.add_argument("--n_test", type=int, default=32)

    report = subs.add_parser("report", help="validate and summarize a report")
    report.add_argument("path")
    return parser


def _make_config(args):
    if args.target_encoding not in ENCODER_KINDS:
        raise UnknownEncoderError(args.target_encoding)
    if args.dataset is None and args.data_dir is None:
        raise UsageError("one of --dataset or --data_dir is required")
    return TrainConfig(
        encoder=args.target_encoding,
        dataset=args.dataset,
        data_dir=args.data_dir,
        lr=args.lr,
        batch_size=args.batch_size,
        epochs=args.epochs,
        seed=args.seed,
        out=args.out,
        threshold=args.threshold,
        precision=args.precision,
        offline=args.offline,
        run_name=args.run_name,
    )


class UsageError(ValueError):
    pass


def _progress(offline):
    if offline:
        return None

    def show(epoch, loss, metric):
        metric_str = "n/a" if metric is None else f"{metric:.4f}"
        print(f"epoch {epoch}: train_loss {loss:.6f} valid {metric_str}",
              file=sys.stderr)

    return show


def _report_path(config, dataset_name):
    from pathlib import Path

    out = Path(config.out if config.out is not None else ".")
    return out / f"{dataset_name}_{config.encoder}.json"


def _cmd_train(args):
    config = _make_config(args)
    splits, task, dataset_name = resolve_dataset(config)
    result = train_model(config, splits=splits, task=task,
                         progress=_progress(config.offline))
    report = BenchmarkReport(
        dataset=dataset_name,
        model=config.encoder,
        seeds=[config.seed],
        per_seed={str(config.seed): result.test_metrics},
        mean=dict(result.test_metrics),
        std={m: 0.0 for m in result.test_metrics},
        profile={
            "sec_per_epoch": result.profile.sec_per_epoch,
            "peak_mem_mb": result.profile.peak_mem_mb,
        },
        significance={},
        run_name=config.run_name,
        traces={str(config.seed): list(zip(result.train_losses,
                                           result.valid_metrics))},
    )
    path = emit_report(report, _report_path(config, dataset_name),
                       traces=args.traces)
    if not config.offline:
        print(f"report written to {path}", file=sys.stderr)
    return 0


def _cmd_bench(args):
    config = _make_config(args)
    try:
        seeds = [int(s) for s in args.seeds.split(",") if s != ""]
    except ValueError:
        raise UsageError(f"malformed --seeds value {args.seeds!r}")
    report = run_benchmark(config, seeds=seeds, baseline=args.baseline,
                           progress=_progress(config.offline))
    path = emit_report(report, _report_path(config, report.dataset),
                       traces=args.traces)
    if not config.offline:
        print(f"report written to {path}", file=sys.stderr)
    return 0


def _cmd_graph_dump(args):
    doc = json.dumps(graph_to_dict(build_graph(args.sequence)), indent=2,
                     sort_keys=True)
    if args.out is None:
        print(doc)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(doc + "\n")
    return 0


def _cmd_synth(args):
    name = args.dataset
    if not name.startswith("synth-") or name[len("synth-"):] not in RULES:
        raise UsageError(
            f"unknown synthetic dataset {name!r}; valid: "
            + ", ".join(f"synth-{r}" for r in RULES)
        )
    rule = name[len("synth-"):]
    spec = SyntheticSpec(rule, n_train=args.n_train, n_valid=args.n_valid,
                         n_test=args.n_test, seed=args.seed)
    splits = make_synthetic(spec)
    save_dataset(args.out, splits, spec.task)
    print(f"wrote {sum(len(v) for v in splits.values())} records to {args.out}")
    return 0


_REPORT_KEYS = {
    "schema_version", "dataset", "model", "seeds", "per_seed", "mean",
    "std", "profile", "significance", "run_name",
}


def _cmd_report(args):
    with open(args.path, encoding="utf-8") as fh:
        doc = json.load(fh)
    missing = _REPORT_KEYS - set(doc)
    if missing or doc.get("schema_version") != SCHEMA_VERSION:
        raise DataFormatError(
            f"{args.path}: not a schema-{SCHEMA_VERSION} report "
            f"(missing keys: {sorted(missing)})"
        )
    print(f"{doc['dataset']} / {doc['model']} over seeds {doc['seeds']}")
    for metric in sorted(doc["mean"]):
        flag = ""
        sig = doc["significance"].get(metric)
        if sig:
            flag = "  **" if sig["significant_01"] else (
                "  *" if sig["significant_05"] else "")
        print(f"  {metric}: {doc['mean'][metric]:.4f} "
              f"± {doc['std'][metric]:.4f}{flag}")
    return 0


_COMMANDS = {
    "train": _cmd_train,
    "bench": _cmd_bench,
    "graph-dump": _cmd_graph_dump,
    "synth": _cmd_synth,
    "report": _cmd_report,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except _TRAINING_ERRORS as exc:
        print(f"training error: {exc}", file=sys.stderr)
        return EXIT_TRAINING
    except _DATA_ERRORS as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (OSError, json.JSONDecodeError) as exc:
        # JSONDecodeError subclasses ValueError, so I/O comes first
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (UsageError, UnknownEncoderError, ValueError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
