"""Command-line interface: demonstrate, train, generate, evaluate, serve.

Exit codes: 0 success, 2 usage or data errors, 3 model-load errors.
``demonstrate`` is fully non-interactive once ``--case`` is given, so
transcript tests stay stable; without it the classic prompt flow runs.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .dataio import (
    bundled_usecases_path,
    read_dataset_csv,
    read_records_csv,
    write_dataset_csv,
)
from .engine import Deviation, load_engine
from .errors import EngineLoadError, RescueTriageError
from .evaluation import evaluate
from .pipeline import TrainOptions, metrics_table, train_all, transform_features
from .records import COMPLICATIONS, ProbabilityReport
from .synthgen import default_config, generate

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_MODEL = 3


def _fmt_row(name: str, values: list[float]) -> str:
    cells = "".join(f"{v:>8.2f}" for v in values)
    return f"{name:<16}{cells}"


def render_report(
    case_label: str,
    case_number: int,
    total: int,
    report: ProbabilityReport,
    deviation_percent: float | None,
    fmt: str,
) -> str:
    order = report.ranking
    modified = report.modified_report
    if fmt == "csv":
        lines = []
        if modified is None:
            lines.append("complication,gbt_pct,ann_pct")
            for comp in order:
                lines.append(
                    f"{comp.value},{report.gbt_pct[comp]:.2f},{report.ann_pct[comp]:.2f}"
                )
        else:
            lines.append(
                "complication,gbt_pct,ann_pct,modified_gbt_pct,modified_ann_pct"
            )
            for comp in order:
                lines.append(
                    f"{comp.value},{report.gbt_pct[comp]:.2f},{report.ann_pct[comp]:.2f},"
                    f"{modified.gbt_pct[comp]:.2f},{modified.ann_pct[comp]:.2f}"
                )
        return "\n".join(lines)

    lines = [f"Test case {case_label} ({case_number} of {total})"]
    if modified is None:
        lines.append("")
        lines.append(f"{'Complication':<16}{'GBT %':>8}{'ANN %':>8}")
        for comp in order:
            lines.append(
                _fmt_row(comp.value.capitalize(), [report.gbt_pct[comp], report.ann_pct[comp]])
            )
    else:
        lines.append(f"Deviation applied: {deviation_percent:+.2f}% on continuous vitals")
        lines.append("")
        lines.append(f"{'':<16}{'Baseline':>16}{'Modified':>16}")
        lines.append(f"{'Complication':<16}{'GBT %':>8}{'ANN %':>8}{'GBT %':>8}{'ANN %':>8}")
        for comp in order:
            lines.append(
                _fmt_row(
                    comp.value.capitalize(),
                    [
                        report.gbt_pct[comp],
                        report.ann_pct[comp],
                        modified.gbt_pct[comp],
                        modified.ann_pct[comp],
                    ],
                )
            )
    return "\n".join(lines)


def _prompt_case_count(records) -> str:
    return f"Select a test case (1-{len(records)}): "


def cmd_demonstrate(args) -> int:
    engine = load_engine(args.models)

    interactive = args.case is None
    if interactive:
        default_file = args.file or str(bundled_usecases_path())
        answer = input(f"Test file [{default_file}]: ").strip()
        test_file = answer or default_file
    else:
        test_file = args.file or str(bundled_usecases_path())
    records = read_records_csv(test_file)
    if not records:
        print("test file holds no cases", file=sys.stderr)
        return EXIT_USAGE

    if interactive:
        while True:
            raw = input(_prompt_case_count(records)).strip()
            try:
                case_number = int(raw)
            except ValueError:
                continue
            if 1 <= case_number <= len(records):
                break
        while True:
            answer = input("Modify the health vitals? (yes/no): ").strip().lower()
            if answer in ("yes", "no"):
                modify = answer == "yes"
                break
        deviation = None
        if modify:
            while True:
                raw = input("How much deviation in percent? ").strip()
                try:
                    deviation = float(raw)
                    break
                except ValueError:
                    continue
    else:
        case_number = args.case
        if not (1 <= case_number <= len(records)):
            print(
                f"case {case_number} out of range (file holds {len(records)} cases)",
                file=sys.stderr,
            )
            return EXIT_USAGE
        modify = args.modify == "yes"
        deviation = args.deviation
        if modify and deviation is None:
            print("--modify yes requires --deviation", file=sys.stderr)
            return EXIT_USAGE

    record = records[case_number - 1]
    if modify:
        report = engine.predict_with_deviation(record, Deviation(percent=deviation))
    else:
        report = engine.predict(record)
        deviation = None
    print(
        render_report(
            record.case_id, case_number, len(records), report, deviation, args.format
        )
    )
    return EXIT_OK


def cmd_train(args) -> int:
    options = TrainOptions(
        tuning=args.tuning,
        folds=args.folds,
        rfecv_folds=args.rfecv_folds,
        rfecv_step=args.rfecv_step,
        tuning_budget=args.budget,
        test_fraction=args.test_fraction,
        seed=args.seed,
    )
    if args.synthetic is not None:
        config = default_config(
            n_records=args.n_records, seed=args.synthetic, noise_features=args.noise_features
        )
        dataset = generate(config)
        source = f"synthetic:seed={args.synthetic}:n={args.n_records}:noise={args.noise_features}"
    else:
        dataset = read_dataset_csv(args.dataset)
        source = f"file:{Path(args.dataset).name}:rows={len(dataset)}"

    print(f"Training source: {source}")
    report = train_all(dataset, options, source=source, out_dir=args.out)
    print()
    print(metrics_table(report.summaries, "gbt"))
    print()
    print(metrics_table(report.summaries, "ann"))
    print()
    print("Selected features")
    for comp in COMPLICATIONS:
        names = ", ".join(report.summaries[comp].selected_features)
        print(f"  {comp.value}: {names}")
    print()
    print(f"Wrote {len(report.summaries)} bundles to {args.out}")
    return EXIT_OK


def cmd_generate(args) -> int:
    config = default_config(
        n_records=args.n, seed=args.seed, noise_features=args.noise_features
    )
    dataset = generate(config)
    write_dataset_csv(dataset, args.out)
    print(f"Wrote {len(dataset)} records to {args.out}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    engine = load_engine(args.models)
    dataset = read_dataset_csv(args.dataset)
    X = dataset.feature_matrix()
    names = list(dataset.feature_names)
    print(f"Evaluating {len(dataset)} records against {args.models}")
    print()
    print(f"{'Complication':<16}{'Family':>8}{'Precision':>11}{'Accuracy':>11}{'Recall':>9}")
    for comp in COMPLICATIONS:
        bundle = engine.bundles[comp]
        y = dataset.label_vector(comp)
        transformed = transform_features(bundle, X, names)
        for family, model in (("GBT", bundle.gbt), ("ANN", bundle.ann)):
            m = evaluate(y, model.predict_proba(transformed))
            precision = "n/a" if m.precision is None else f"{100 * m.precision:.2f}%"
            recall = "n/a" if m.recall is None else f"{100 * m.recall:.2f}%"
            print(
                f"{comp.value.capitalize():<16}{family:>8}{precision:>11}"
                f"{100 * m.accuracy:>10.2f}%{recall:>9}"
            )
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(model_dir=args.models)
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rescue-triage",
        description="Complication probability decision support for rescue events",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    demo = sub.add_parser("demonstrate", help="predict a test case, optionally with a what-if deviation")
    demo.add_argument("--models", default="models", help="directory with trained bundles")
    demo.add_argument("--file", default=None, help="test-case CSV (default: bundled use cases)")
    demo.add_argument("--case", type=int, default=None, help="1-based test case index (scripted mode)")
    demo.add_argument("--modify", choices=("yes", "no"), default="no")
    demo.add_argument("--deviation", type=float, default=None, help="percent change for the what-if run")
    demo.add_argument("--format", choices=("table", "csv"), default="table")
    demo.set_defaults(func=cmd_demonstrate)

    train = sub.add_parser("train", help="train the six complication bundles")
    source = train.add_mutually_exclusive_group(required=True)
    source.add_argument("--synthetic", type=int, default=None, metavar="SEED",
                        help="generate the training data with this seed")
    source.add_argument("--dataset", default=None, help="labeled dataset CSV")
    train.add_argument("--out", default="models", help="output directory for bundles")
    train.add_argument("--n-records", type=int, default=10000)
    train.add_argument("--noise-features", type=int, default=6)
    train.add_argument("--tuning", choices=("none", "grid", "random", "halving"), default="none")
    train.add_argument("--folds", type=int, default=5)
    train.add_argument("--rfecv-folds", type=int, default=3)
    train.add_argument("--rfecv-step", type=int, default=3)
    train.add_argument("--budget", type=int, default=8)
    train.add_argument("--test-fraction", type=float, default=0.2)
    train.add_argument("--seed", type=int, default=0, help="pipeline seed (splits, inits)")
    train.set_defaults(func=cmd_train)

    gen = sub.add_parser("generate", help="write a synthetic labeled dataset CSV")
    gen.add_argument("--n", type=int, default=10000)
    gen.add_argument("--seed", type=int, default=42)
    gen.add_argument("--noise-features", type=int, default=6)
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=cmd_generate)

    ev = sub.add_parser("evaluate", help="score a labeled dataset against trained bundles")
    ev.add_argument("--dataset", required=True)
    ev.add_argument("--models", default="models")
    ev.set_defaults(func=cmd_evaluate)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--models", default="models")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EngineLoadError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except RescueTriageError as exc:
        # bundle errors are load problems; everything else is a data/usage error
        from .errors import BundleParseError, BundleVersionError

        if isinstance(exc, (BundleParseError, BundleVersionError)):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_MODEL
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
