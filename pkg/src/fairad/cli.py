"""Command-line entry point.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .data import generate_synthetic, save_csv
from .errors import ConfigError, DataError, NumericError, UndefinedMetricError
from .harness import (
    ExperimentConfig,
    evaluate_model,
    format_table,
    prepared_dataset,
    resolve_k,
    run_ablation,
    run_experiment,
    run_ratio_study,
    run_theory_audit,
    summary_rows_from_dict,
    write_reports,
)
from .nn import load_model, save_model
from .training import VARIANTS

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--seed", type=int, action="append", help="seed (repeatable); overrides the config list")
    p.add_argument("--out", help="output directory for reports")
    p.add_argument("--dataset", help="CSV path or 'synthetic'")
    p.add_argument("--group-col", help="CSV column holding the group tag")
    p.add_argument("--label-col", help="CSV column holding the anomaly label")
    p.add_argument("--k", help="comma-separated k values for Recall@k, or 'auto'")
    p.add_argument("--alpha", type=float)
    p.add_argument("--variant", help=f"one of {', '.join(VARIANTS)}")
    p.add_argument("--ratio", help="|U|:|P| resampling ratio such as 4:1")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override any config key")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fairad", description="Fairness-aware autoencoder anomaly detection")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = sub.add_parser("train", help="train per seed, save checkpoints and a report")
    _common(p)
    p = sub.add_parser("evaluate", help="score a dataset with saved checkpoints")
    _common(p)
    p.add_argument("--model", action="append", required=True, help="checkpoint path (repeatable)")
    p = sub.add_parser("ratio-study", help="vary the |U|:|P| ratio")
    _common(p)
    p.add_argument("--ratios", default="1:1,2:1,4:1", help="comma-separated ratios")
    p = sub.add_parser("ablation", help="compare variants on one config")
    _common(p)
    p.add_argument("--variants", default=",".join(VARIANTS), help="comma-separated variants")
    p = sub.add_parser("theory-audit", help="bound audits on trained models")
    _common(p)
    p = sub.add_parser("gen-synthetic", help="write a synthetic dataset as CSV")
    _common(p)
    return parser


def config_from_args(args) -> ExperimentConfig:
    overrides = {
        "dataset": args.dataset, "group_col": args.group_col, "label_col": args.label_col,
        "k": args.k, "alpha": args.alpha, "variant": args.variant, "ratio": args.ratio,
        "out": args.out, "seeds": args.seed,
    }
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        overrides[key.strip()] = value.strip()
    if args.config:
        return ExperimentConfig.from_file(args.config, overrides)
    return ExperimentConfig.from_mapping({k: v for k, v in overrides.items() if v is not None})


def _out_dir(cfg: ExperimentConfig) -> Path:
    return Path(cfg.out or "fairad-out")


def _emit(reports, cfg, name) -> None:
    json_path, csv_path = write_reports(reports, _out_dir(cfg), name)
    rows = [row for r in reports for row in summary_rows_from_dict(r.to_dict())]
    print(format_table(rows))
    print(f"wrote {json_path} and {csv_path}")


def cmd_train(cfg: ExperimentConfig) -> None:
    report = run_experiment(cfg, label=cfg.variant, keep_models=True)
    out = _out_dir(cfg)
    out.mkdir(parents=True, exist_ok=True)
    for seed, model in zip(cfg.seeds, report.models):
        save_model(model, out / f"model_seed{seed}.json")
    (out / "config.txt").write_text(cfg.to_text())
    _emit([report], cfg, "report")


def cmd_evaluate(cfg: ExperimentConfig, model_paths) -> None:
    results = []
    for seed, path in zip(cfg.seeds * len(model_paths), model_paths):
        ds = prepared_dataset(cfg, seed)
        model = load_model(path)
        results.append({"model": str(path), "seed": seed,
                        "metrics": evaluate_model(model, ds, resolve_k(cfg, ds))})
    out = _out_dir(cfg)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "evaluation.json"
    path.write_text(json.dumps({"schema_version": 1, "results": results}, indent=2, sort_keys=True))
    for r in results:
        for m in r["metrics"]:
            print(f"{r['model']}  k={m['k']}  recall@k={m['recall_at_k']:.4f}  "
                  f"rocauc={m['rocauc']:.4f}  rec_diff={m['rec_diff']:.4f}")
    print(f"wrote {path}")


def cmd_theory_audit(cfg: ExperimentConfig) -> None:
    report = run_theory_audit(cfg)
    out = _out_dir(cfg)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "audit.json"
    path.write_text(json.dumps(report, indent=2, sort_keys=True))
    for a in report["audits"]:
        f = a["fairness_bound"]
        tv = a["tv_bound"]
        print(f"seed {a['seed']}: |R_P - R_U| = {f['lhs']:.4f} <= {f['rhs']:.4f} ({'ok' if f['holds'] else 'VIOLATED'})"
              + (f"; TV {tv['tv_hat']:.4f} <= {tv['bound_rhs']:.4f}" if tv else ""))
    print(f"wrote {path}")


def cmd_gen_synthetic(cfg: ExperimentConfig) -> None:
    out = _out_dir(cfg)
    out.mkdir(parents=True, exist_ok=True)
    for seed in cfg.seeds:
        ds = generate_synthetic(cfg.synthetic_spec(seed))
        path = out / f"synthetic_seed{seed}.csv"
        save_csv(ds, path, group_column=cfg.group_col, label_column=cfg.label_col)
        print(f"wrote {path} ({ds.m} unprotected, {ds.n} protected, {int(ds.labels.sum())} anomalies)")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
        if args.command == "train":
            cmd_train(cfg)
        elif args.command == "evaluate":
            cmd_evaluate(cfg, args.model)
        elif args.command == "ratio-study":
            _emit(run_ratio_study(cfg, [r for r in args.ratios.split(",") if r.strip()]), cfg, "ratio_study")
        elif args.command == "ablation":
            _emit(run_ablation(cfg, [v for v in args.variants.split(",") if v.strip()]), cfg, "ablation")
        elif args.command == "theory-audit":
            cmd_theory_audit(cfg)
        elif args.command == "gen-synthetic":
            cmd_gen_synthetic(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, UndefinedMetricError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
