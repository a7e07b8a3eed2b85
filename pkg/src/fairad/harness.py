"""Experiment orchestration: config parsing, seeded runs, studies and reports."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import theory
from .data import GroupedDataset, SyntheticSpec, generate_synthetic, load_csv, resample_ratio, standardize
from .errors import ConfigError
from .losses import EpsilonEstimator
from .metrics import anomaly_scores, group_metrics
from .nn import ACTIVATIONS, Autoencoder, build_autoencoder, encode
from .training import VARIANTS, Trainer, TrainSettings, normalize_variant

log = logging.getLogger(__name__)

REPORT_SCHEMA_VERSION = 1
SUMMARY_METRICS = ("recall_at_k", "rocauc", "rec_diff", "acc_diff", "recall_p", "recall_u")
TIMING_KEYS = ("wall_clock_seconds",)


# -- configuration -----------------------------------------------------------


def _ints(value) -> list[int]:
    if isinstance(value, (list, tuple)):
        return [int(v) for v in value]
    return [int(v) for v in str(value).replace(",", " ").split()]


def _bool(value) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {value!r}")


def _opt_int(value):
    if value is None or str(value).strip().lower() in ("", "none", "full"):
        return None
    return int(value)


def _opt_str(value):
    if value is None or str(value).strip().lower() in ("", "none"):
        return None
    return str(value).strip()


def _k_list(value):
    if value is None or str(value).strip().lower() in ("", "auto"):
        return None
    return _ints(value)


@dataclass
class ExperimentConfig:
    """Everything needed to reproduce a run; see ``from_text`` for the file format."""

    # data
    dataset: str = "synthetic"  # "synthetic" or a CSV path
    group_col: str = "group"
    label_col: str = "label"
    group_value: str = "1"
    label_value: str = "1"
    ratio: str | None = None  # optional |U|:|P| resampling, e.g. "4:1"
    syn_d: int = 16
    syn_n: int = 500
    syn_m: int = 2000
    syn_rate_p: float = 0.1
    syn_rate_u: float = 0.1
    syn_group_shift: float = 1.0
    syn_anomaly_shift: float = 3.0
    syn_noise_std: float = 1.0
    syn_latent_dim: int | None = None
    syn_anomaly_noise_std: float = 0.0
    # model and optimisation
    hidden_dims: list[int] | None = None
    activation: str = "relu"
    representation_activation: str | None = None
    optimizer: str = "adam"
    learning_rate: float = 1e-3
    epochs: int = 200
    batch_size: int | None = None
    alpha: float = 1.0
    estimator: str = "loss1"
    variant: str = "fairad"
    pair_threshold: int = 4096
    augment_scale: float = 0.05
    # protocol
    k: list[int] | None = None  # None = number of anomalies in the data
    seeds: list[int] = field(default_factory=lambda: [40, 41, 42])
    divergence: str = "tv"
    confidence_delta: float = 0.05
    audit_points: int = 400
    out: str | None = None

    _CONVERTERS = {
        "hidden_dims": lambda v: None if str(v).strip().lower() in ("", "none", "default") else _ints(v),
        "seeds": _ints,
        "k": _k_list,
        "batch_size": _opt_int,
        "syn_latent_dim": _opt_int,
        "ratio": _opt_str,
        "representation_activation": _opt_str,
        "out": _opt_str,
    }

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in dataclasses.fields(cls)]

    @classmethod
    def from_mapping(cls, values: dict) -> "ExperimentConfig":
        known = {f.name: f for f in dataclasses.fields(cls)}
        kwargs = {}
        for key, raw in values.items():
            name = key.strip().replace("-", "_")
            if name not in known:
                raise ConfigError(f"unknown config key {key!r}")
            if raw is None and name not in cls._CONVERTERS:
                continue
            default = known[name].default
            try:
                if name in cls._CONVERTERS:
                    kwargs[name] = cls._CONVERTERS[name](raw)
                elif isinstance(default, bool):
                    kwargs[name] = _bool(raw)
                elif isinstance(default, int):
                    kwargs[name] = int(raw)
                elif isinstance(default, float):
                    kwargs[name] = float(raw)
                else:
                    kwargs[name] = str(raw).strip()
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad value for {name}: {raw!r} ({exc})") from None
        cfg = cls(**kwargs)
        cfg.validate()
        return cfg

    @classmethod
    def from_text(cls, text: str, overrides: dict | None = None) -> "ExperimentConfig":
        """Parse ``key = value`` lines; ``#`` starts a comment. Overrides win."""
        values = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ConfigError(f"line {lineno}: expected key = value, got {line!r}")
            values[key.strip()] = value.strip()
        values.update({k: v for k, v in (overrides or {}).items() if v is not None})
        return cls.from_mapping(values)

    @classmethod
    def from_file(cls, path, overrides: dict | None = None) -> "ExperimentConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        return cls.from_text(text, overrides)

    def validate(self) -> None:
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.alpha < 0:
            raise ConfigError(f"alpha must be >= 0, got {self.alpha}")
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be positive")
        if self.k is not None and min(self.k) < 1:
            raise ConfigError("k values must be >= 1")
        if self.batch_size is not None and self.batch_size < 2:
            raise ConfigError("batch_size must be >= 2")
        if self.pair_threshold < 2:
            raise ConfigError("pair_threshold must be >= 2")
        if self.optimizer not in ("adam", "sgd"):
            raise ConfigError(f"unknown optimizer {self.optimizer!r}")
        for name in ("activation", "representation_activation"):
            act = getattr(self, name)
            if act is not None and act not in ACTIVATIONS:
                raise ConfigError(f"unknown {name} {act!r}")
        if self.hidden_dims is not None and (not self.hidden_dims or min(self.hidden_dims) < 1):
            raise ConfigError(f"invalid hidden_dims {self.hidden_dims}")
        if not 0 < self.confidence_delta < 1:
            raise ConfigError("confidence_delta must lie in (0, 1)")
        try:
            self.variant = normalize_variant(self.variant)
            EpsilonEstimator(self.estimator)
            theory.divergence_table(self.divergence)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        except KeyError as exc:
            raise ConfigError(str(exc)) from None
        if self.ratio is not None:
            from .data import parse_ratio

            try:
                parse_ratio(self.ratio)
            except (ValueError, ZeroDivisionError, ArithmeticError) as exc:
                raise ConfigError(f"bad ratio {self.ratio!r}: {exc}") from None
        if self.dataset == "synthetic":
            try:
                self.synthetic_spec(0).validate()
            except Exception as exc:  # DegenerateDataError carries the reason
                raise ConfigError(f"invalid synthetic spec: {exc}") from None

    def replace(self, **changes) -> "ExperimentConfig":
        cfg = dataclasses.replace(self, **changes)
        cfg.validate()
        return cfg

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def to_text(self) -> str:
        lines = []
        for key, value in self.to_dict().items():
            if isinstance(value, list):
                value = ",".join(str(v) for v in value)
            lines.append(f"{key} = {'none' if value is None else value}")
        return "\n".join(lines) + "\n"

    def synthetic_spec(self, seed: int) -> SyntheticSpec:
        return SyntheticSpec(
            d=self.syn_d, n=self.syn_n, m=self.syn_m, anomaly_rate_p=self.syn_rate_p,
            anomaly_rate_u=self.syn_rate_u, group_shift=self.syn_group_shift,
            anomaly_shift=self.syn_anomaly_shift, noise_std=self.syn_noise_std, seed=seed,
            latent_dim=self.syn_latent_dim, anomaly_noise_std=self.syn_anomaly_noise_std,
        )

    def train_settings(self) -> TrainSettings:
        return TrainSettings(
            variant=self.variant, epochs=self.epochs, alpha=self.alpha, estimator=self.estimator,
            optimizer=self.optimizer, learning_rate=self.learning_rate, batch_size=self.batch_size,
            pair_threshold=self.pair_threshold, augment_scale=self.augment_scale,
        )


def load_dataset(config: ExperimentConfig, seed: int) -> GroupedDataset:
    """Raw (unstandardised) dataset for one seed, resampled to ``config.ratio`` if set."""
    if config.dataset == "synthetic":
        ds = generate_synthetic(config.synthetic_spec(seed))
    else:
        ds = load_csv(config.dataset, config.group_col, config.label_col,
                      positive_group_value=config.group_value, positive_label_value=config.label_value)
    if config.ratio is not None:
        ds = resample_ratio(ds, config.ratio, seed=seed)
    return ds


def prepared_dataset(config: ExperimentConfig, seed: int) -> GroupedDataset:
    return standardize(load_dataset(config, seed))


def resolve_k(config: ExperimentConfig, ds: GroupedDataset) -> list[int]:
    ks = config.k if config.k is not None else [int(ds.labels.sum())]
    for k in ks:
        if k > len(ds):
            raise ConfigError(f"k={k} exceeds dataset size {len(ds)}")
    return ks


def build_model(config: ExperimentConfig, dim: int, rng: np.random.Generator) -> Autoencoder:
    return build_autoencoder(dim, config.hidden_dims, seed=rng, activation=config.activation,
                             representation_activation=config.representation_activation)


# -- reports -----------------------------------------------------------------


@dataclass
class SeedResult:
    seed: int
    n_protected: int
    n_unprotected: int
    history: list[dict]
    metrics: list[dict]  # one MetricsReport dict per k
    wall_clock_seconds: float

    def to_dict(self, timing: bool = True) -> dict:
        d = dataclasses.asdict(self)
        if not timing:
            d.pop("wall_clock_seconds")
        return d


def aggregate(results: list[SeedResult]) -> list[dict]:
    """Mean and population std (ddof=0) of each summary metric across seeds, per k."""
    out = []
    for i, first in enumerate(results[0].metrics):
        row = {"k": first["k"]}
        for name in SUMMARY_METRICS:
            vals = np.array([r.metrics[i][name] for r in results], dtype=np.float64)
            row[name] = {"mean": float(vals.mean()), "std": float(vals.std())}
        out.append(row)
    return out


@dataclass
class RunReport:
    config: dict
    seeds: list[SeedResult]
    aggregates: list[dict]
    wall_clock_seconds: float
    label: str = ""
    models: list[Autoencoder] = field(default_factory=list, repr=False, compare=False)

    def to_dict(self, timing: bool = True) -> dict:
        d = {
            "schema_version": REPORT_SCHEMA_VERSION,
            "label": self.label,
            "config": self.config,
            "seeds": [s.to_dict(timing) for s in self.seeds],
            "aggregates": self.aggregates,
        }
        if timing:
            d["wall_clock_seconds"] = self.wall_clock_seconds
        return d

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=True)

    def summary_rows(self) -> list[dict]:
        return summary_rows_from_dict(self.to_dict())

    def mean(self, metric: str, k_index: int = 0) -> float:
        return self.aggregates[k_index][metric]["mean"]


def summary_rows_from_dict(report: dict) -> list[dict]:
    """Flat table rows (one per k) built only from a serialised report."""
    rows = []
    for agg in report["aggregates"]:
        row = {"label": report.get("label", ""), "variant": report["config"]["variant"], "k": agg["k"]}
        for name in SUMMARY_METRICS:
            row[f"{name}_mean"] = agg[name]["mean"]
            row[f"{name}_std"] = agg[name]["std"]
        row["wall_clock_seconds"] = report.get("wall_clock_seconds", float("nan"))
        rows.append(row)
    return rows


def rows_to_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


def format_table(rows: list[dict]) -> str:
    """Plain-text table of the summary rows (mean ± std per metric)."""
    if not rows:
        return ""
    head = ["label", "variant", "k"] + list(SUMMARY_METRICS)
    lines = ["  ".join(f"{h:>16}" for h in head)]
    for r in rows:
        cells = [str(r["label"]), r["variant"], str(r["k"])]
        cells += [f"{r[m + '_mean']:.4f}±{r[m + '_std']:.4f}" for m in SUMMARY_METRICS]
        lines.append("  ".join(f"{c:>16}" for c in cells))
    return "\n".join(lines)


def write_reports(reports: list[RunReport], out_dir, name: str = "report") -> tuple[Path, Path]:
    """Write ``<name>.json`` (canonical) and ``<name>.csv`` (summary) into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    dicts = [r.to_dict() for r in reports]
    json_path = out / f"{name}.json"
    payload = dicts[0] if len(dicts) == 1 else {"schema_version": REPORT_SCHEMA_VERSION, "reports": dicts}
    json_path.write_text(json.dumps(payload, indent=2, sort_keys=True))
    csv_path = out / f"{name}.csv"
    csv_path.write_text(rows_to_csv([row for d in dicts for row in summary_rows_from_dict(d)]))
    return json_path, csv_path


# -- runs --------------------------------------------------------------------


def train_seed(config: ExperimentConfig, seed: int, ds: GroupedDataset | None = None):
    """Train one model; returns (model, trainer history, standardised dataset)."""
    ds = prepared_dataset(config, seed) if ds is None else ds
    rng = np.random.default_rng(seed)
    model = build_model(config, ds.dim, rng)
    trainer = Trainer(model, ds.training_view(), config.train_settings(), rng)
    history = trainer.fit()
    return model, history, ds


def evaluate_model(model: Autoencoder, ds: GroupedDataset, ks: list[int]) -> list[dict]:
    scores = anomaly_scores(model, ds.features)
    return [group_metrics(scores, ds.labels, ds.protected, k).to_dict() for k in ks]


def run_experiment(config: ExperimentConfig, label: str = "", keep_models: bool = False) -> RunReport:
    """Train and evaluate ``config.variant`` once per seed."""
    config.validate()
    started = time.perf_counter()
    results, models = [], []
    for seed in config.seeds:
        t0 = time.perf_counter()
        model, history, ds = train_seed(config, seed)
        metrics = evaluate_model(model, ds, resolve_k(config, ds))
        results.append(SeedResult(seed, ds.n, ds.m, [h.to_dict() for h in history], metrics,
                                  time.perf_counter() - t0))
        if keep_models:
            models.append(model)
        log.info("%s seed %d: %s", config.variant, seed, metrics[0])
    return RunReport(config.to_dict(), results, aggregate(results), time.perf_counter() - started,
                     label=label, models=models)


def run_ratio_study(base: ExperimentConfig, ratios) -> list[RunReport]:
    """One report per |U|:|P| ratio, all sharing ``base.seeds``."""
    return [run_experiment(base.replace(ratio=str(r)), label=f"ratio {r}") for r in ratios]


def run_ablation(base: ExperimentConfig, variants=VARIANTS) -> list[RunReport]:
    """One report per variant on otherwise identical settings."""
    return [run_experiment(base.replace(variant=v), label=normalize_variant(v)) for v in variants]


def audit_model(model: Autoencoder, ds: GroupedDataset, config: ExperimentConfig, seed: int) -> dict:
    """Risk-difference bound audit plus the TV bound on (a subsample of) representations."""
    scores = anomaly_scores(model, ds.features)
    k = resolve_k(config, ds)[0]
    fair = theory.fairness_bound_audit(scores, ds.labels, ds.protected, spec=config.divergence, k=k,
                                       confidence_delta=config.confidence_delta, seed=seed)
    rng = np.random.default_rng(seed)
    z = encode(model, ds.features)
    rows = []
    for mask in (ds.protected, ~ds.protected):
        idx = np.flatnonzero(mask)
        share = max(2, int(round(config.audit_points * idx.size / len(ds))))
        rows.append(np.sort(rng.choice(idx, min(share, idx.size), replace=False)))
    z_p, z_u = z[rows[0]], z[rows[1]]
    z_p = z_p[np.linalg.norm(z_p, axis=1) > 0]
    z_u = z_u[np.linalg.norm(z_u, axis=1) > 0]
    tv = theory.tv_bound_check(z_p, z_u).to_dict() if len(z_p) and len(z_u) else None
    return {"seed": seed, "fairness_bound": fair.to_dict(), "tv_bound": tv}


def run_theory_audit(config: ExperimentConfig) -> dict:
    """Train the configured variant per seed and audit the trained model."""
    config.validate()
    audits = []
    for seed in config.seeds:
        model, _, ds = train_seed(config, seed)
        audits.append(audit_model(model, ds, config, seed))
    return {
        "schema_version": theory.AUDIT_SCHEMA_VERSION,
        "config": config.to_dict(),
        "audits": audits,
        "all_hold": all(a["fairness_bound"]["holds"] and (a["tv_bound"] is None or a["tv_bound"]["holds"])
                        for a in audits),
    }
