"""Two-group tabular datasets: CSV ingestion, a synthetic generator, ratio
resampling and standardization.

:class:`GroupedDataset` is the evaluation view and carries anomaly labels.
Training code receives a :class:`TrainingView`, which has no label attribute.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import CapacityError, DegenerateDataError, ParseError, SchemaError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Standardization:
    mean: np.ndarray
    std: np.ndarray
    kept_columns: tuple[int, ...]

    def inverse(self, features) -> np.ndarray:
        return np.asarray(features, dtype=np.float64) * self.std + self.mean


@dataclass(frozen=True)
class TrainingView:
    """Label-free view of a dataset handed to training code."""

    features: np.ndarray
    protected: np.ndarray  # bool per row

    @property
    def x_p(self) -> np.ndarray:
        return self.features[self.protected]

    @property
    def x_u(self) -> np.ndarray:
        return self.features[~self.protected]


@dataclass(frozen=True)
class GroupedDataset:
    features: np.ndarray  # (N, d)
    protected: np.ndarray  # bool per row
    labels: np.ndarray  # 1 = anomaly
    feature_names: tuple[str, ...] = ()
    standardization: Standardization | None = None

    def __post_init__(self):
        feats = np.asarray(self.features, dtype=np.float64)
        prot = np.asarray(self.protected, dtype=bool)
        labs = np.asarray(self.labels, dtype=np.int64)
        if feats.ndim != 2 or prot.shape != (feats.shape[0],) or labs.shape != prot.shape:
            raise DegenerateDataError("features, group tags and labels disagree in length")
        if not np.all((labs == 0) | (labs == 1)):
            raise DegenerateDataError("labels must be 0/1")
        names = tuple(self.feature_names) or tuple(f"x{i}" for i in range(feats.shape[1]))
        if len(names) != feats.shape[1]:
            raise DegenerateDataError("feature_names length does not match feature count")
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "protected", prot)
        object.__setattr__(self, "labels", labs)
        object.__setattr__(self, "feature_names", names)

    @property
    def n(self) -> int:
        """Protected group size."""
        return int(self.protected.sum())

    @property
    def m(self) -> int:
        """Unprotected group size."""
        return int((~self.protected).sum())

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    def __len__(self) -> int:
        return self.features.shape[0]

    def training_view(self) -> TrainingView:
        return TrainingView(self.features, self.protected)

    def subset(self, rows) -> "GroupedDataset":
        rows = np.asarray(rows)
        return GroupedDataset(
            self.features[rows], self.protected[rows], self.labels[rows],
            self.feature_names, self.standardization,
        )


# -- CSV ---------------------------------------------------------------------


def _matches(cell: str, wanted) -> bool:
    cell = cell.strip()
    if cell == str(wanted).strip():
        return True
    try:
        return float(cell) == float(wanted)
    except (TypeError, ValueError):
        return False


def load_csv(path, group_column: str, label_column: str,
             positive_group_value="1", positive_label_value="1") -> GroupedDataset:
    """Read a headered, comma-separated file.

    Rows whose ``group_column`` equals ``positive_group_value`` are protected;
    rows whose ``label_column`` equals ``positive_label_value`` are anomalies.
    Every other column must be numeric.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise SchemaError(f"{path} is empty") from None
        for col in (group_column, label_column):
            if col not in header:
                raise SchemaError(f"column {col!r} not found in {path}")
        g_idx, l_idx = header.index(group_column), header.index(label_column)
        feat_idx = [i for i in range(len(header)) if i not in (g_idx, l_idx)]
        if not feat_idx:
            raise SchemaError("no feature columns besides the group and label columns")

        rows, groups, labels = [], [], []
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise ParseError(f"line {line_no}: expected {len(header)} fields, got {len(row)}", row=line_no)
            values = []
            for i in feat_idx:
                try:
                    values.append(float(row[i]))
                except ValueError:
                    raise ParseError(
                        f"line {line_no}, column {header[i]!r}: non-numeric value {row[i]!r}",
                        row=line_no, column=header[i],
                    ) from None
            rows.append(values)
            groups.append(_matches(row[g_idx], positive_group_value))
            labels.append(int(_matches(row[l_idx], positive_label_value)))

    protected = np.array(groups, dtype=bool)
    if protected.size == 0 or protected.all() or not protected.any():
        raise DegenerateDataError("both groups must be non-empty")
    return GroupedDataset(np.array(rows, dtype=np.float64), protected, np.array(labels),
                          tuple(header[i] for i in feat_idx))


def save_csv(ds: GroupedDataset, path, group_column: str = "group",
             label_column: str = "label") -> None:
    """Write ``ds`` in the dialect :func:`load_csv` reads (group/label as 0/1)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(ds.feature_names) + [group_column, label_column])
        for x, p, y in zip(ds.features, ds.protected, ds.labels):
            writer.writerow([repr(float(v)) for v in x] + [int(p), int(y)])


# -- synthetic data ----------------------------------------------------------


@dataclass
class SyntheticSpec:
    """Gaussian two-group data with planted anomalies.

    Unprotected normals come from N(0, noise_std^2 I) and protected normals
    from N(group_shift, noise_std^2 I); anomalies are shifted by
    ``anomaly_shift``. When ``latent_dim`` is set, each group's normals
    instead lie near a random ``latent_dim``-dimensional subspace of its own
    (unit-variance latent coordinates plus ``noise_std`` isotropic noise),
    which is what makes a narrow autoencoder favour the larger group.
    ``anomaly_noise_std`` adds isotropic scatter to anomalies on top of the
    shift, pushing them off the normal subspace in random directions.
    """

    d: int = 16
    n: int = 500  # protected
    m: int = 2000  # unprotected
    anomaly_rate_p: float = 0.1
    anomaly_rate_u: float = 0.1
    group_shift: object = 1.0  # scalar (broadcast) or length-d vector
    anomaly_shift: object = 3.0
    noise_std: float = 1.0
    seed: int = 0
    latent_dim: int | None = None
    anomaly_noise_std: float = 0.0

    def vector(self, value) -> np.ndarray:
        v = np.asarray(value, dtype=np.float64)
        if v.ndim == 0:
            return np.full(self.d, float(v))
        if v.shape != (self.d,):
            raise DegenerateDataError(f"shift vector has shape {v.shape}, expected ({self.d},)")
        return v

    def validate(self) -> None:
        if self.n < 2 or self.m < 2:
            raise DegenerateDataError(f"group sizes n={self.n}, m={self.m}; both must be >= 2")
        for name in ("anomaly_rate_p", "anomaly_rate_u"):
            rate = getattr(self, name)
            if not 0.0 < rate < 1.0:
                raise DegenerateDataError(f"{name}={rate} must lie in (0, 1)")
        self.vector(self.group_shift)
        self.vector(self.anomaly_shift)
        if self.anomaly_noise_std < 0 or self.noise_std < 0:
            raise DegenerateDataError("noise scales must be non-negative")
        if self.latent_dim is not None and not 1 <= self.latent_dim <= self.d:
            raise DegenerateDataError(f"latent_dim={self.latent_dim} must lie in [1, d]")


def _anomaly_count(size: int, rate: float) -> int:
    return min(size - 1, max(1, int(round(size * rate))))


def generate_synthetic(spec: SyntheticSpec) -> GroupedDataset:
    """Draw a dataset; identical specs give bit-identical output.

    Rows are ordered unprotected first, then protected; within a group the
    anomalies come last.
    """
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    d = spec.d
    group_shift = spec.vector(spec.group_shift)
    anomaly_shift = spec.vector(spec.anomaly_shift)

    def normals(size, center):
        if spec.latent_dim is None:
            return center + spec.noise_std * rng.standard_normal((size, d))
        basis, _ = np.linalg.qr(rng.standard_normal((d, spec.latent_dim)))
        coords = rng.standard_normal((size, spec.latent_dim))
        return center + coords @ basis.T + spec.noise_std * rng.standard_normal((size, d))

    feats, prot, labs = [], [], []
    for size, rate, center, is_p in (
        (spec.m, spec.anomaly_rate_u, np.zeros(d), False),
        (spec.n, spec.anomaly_rate_p, group_shift, True),
    ):
        n_anom = _anomaly_count(size, rate)
        x = normals(size, center)
        x[size - n_anom:] += anomaly_shift
        if spec.anomaly_noise_std > 0:
            x[size - n_anom:] += spec.anomaly_noise_std * rng.standard_normal((n_anom, d))
        feats.append(x)
        prot.append(np.full(size, is_p))
        labs.append(np.r_[np.zeros(size - n_anom, int), np.ones(n_anom, int)])
    return GroupedDataset(np.vstack(feats), np.concatenate(prot), np.concatenate(labs))


# -- resampling --------------------------------------------------------------


def parse_ratio(ratio) -> Fraction:
    """Accepts ``"4:1"``, ``(4, 1)``, a Fraction or a number (U over P)."""
    if isinstance(ratio, str):
        a, _, b = ratio.partition(":")
        value = Fraction(a.strip()) / Fraction(b.strip()) if b else Fraction(a.strip())
    elif isinstance(ratio, (tuple, list)):
        value = Fraction(ratio[0]) / Fraction(ratio[1])
    else:
        value = Fraction(ratio).limit_denominator(10_000)
    if value <= 0:
        raise CapacityError(f"ratio must be positive, got {ratio!r}")
    return value


def target_sizes(n: int, m: int, ratio) -> tuple[int, int]:
    """Largest (n', m') with m'/n' = ratio, n' <= n, m' <= m.

    n' is floored first; m' = floor(n' * ratio).
    """
    r = parse_ratio(ratio)
    n_new = min(n, math.floor(m / r))
    m_new = math.floor(n_new * r)
    return n_new, m_new


def resample_ratio(ds: GroupedDataset, ratio_u_to_p, seed: int = 0) -> GroupedDataset:
    """Subsample both groups without replacement to hit ``|U|:|P| = ratio``.

    Sampling is stratified by label inside each group so anomaly rates move
    by at most one example. Output keeps the original row order.
    """
    n_new, m_new = target_sizes(ds.n, ds.m, ratio_u_to_p)
    if n_new < 2 or m_new < 2:
        raise CapacityError(
            f"ratio {ratio_u_to_p} on n={ds.n}, m={ds.m} leaves n'={n_new}, m'={m_new}; need >= 2 each"
        )
    rng = np.random.default_rng(seed)
    keep = []
    for mask, size in ((ds.protected, n_new), (~ds.protected, m_new)):
        idx = np.flatnonzero(mask)
        anom = idx[ds.labels[idx] == 1]
        norm = idx[ds.labels[idx] == 0]
        n_anom = int(round(size * anom.size / idx.size))
        n_anom = min(n_anom, anom.size, size)
        n_norm = size - n_anom
        if n_norm > norm.size:
            n_norm = norm.size
            n_anom = size - n_norm
        keep.append(rng.choice(anom, n_anom, replace=False))
        keep.append(rng.choice(norm, n_norm, replace=False))
    return ds.subset(np.sort(np.concatenate(keep)))


# -- standardization ---------------------------------------------------------


def standardize(ds: GroupedDataset) -> GroupedDataset:
    """Z-score every feature over the full dataset; constant features are dropped."""
    x = ds.features
    mean = x.mean(axis=0)
    std = x.std(axis=0)
    keep = np.flatnonzero(std > 0)
    if keep.size == 0:
        raise DegenerateDataError("all features are constant")
    if keep.size < x.shape[1]:
        dropped = [ds.feature_names[i] for i in range(x.shape[1]) if i not in set(keep)]
        log.warning("dropping constant feature(s): %s", ", ".join(dropped))
    record = Standardization(mean[keep], std[keep], tuple(int(i) for i in keep))
    z = (x[:, keep] - record.mean) / record.std
    return GroupedDataset(z, ds.protected, ds.labels,
                          tuple(ds.feature_names[i] for i in keep), record)
