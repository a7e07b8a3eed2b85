"""Training loop for FairAD and its ablation variants."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import TrainingView
from .errors import ConfigError, NumericError
from .losses import (
    EpsilonEstimator,
    LossReport,
    GroupBatch,
    epsilon_weight,
    fac_with_grad,
    simclr_with_grad,
)
from .nn import Autoencoder, Gradients, OptimizerState, apply_update, backward, forward

VARIANTS = ("fairad", "fairad_r", "fairad_n", "fairad_d", "fairad_c", "plain_ae")
UNWEIGHTED_EPSILON = 0.5  # (1-e) L_U + e L_P with e=1/2 is the plain sum, halved
NORM_SMOOTHING = 1e-8  # keeps cosine gradients finite if a ReLU representation dies


def normalize_variant(name: str) -> str:
    key = name.strip().lower().replace("-", "_")
    aliases = {"plainae": "plain_ae", "plain": "plain_ae"}
    key = aliases.get(key, key)
    if key not in VARIANTS:
        raise ConfigError(f"unknown variant {name!r}; choose from {', '.join(VARIANTS)}")
    return key


@dataclass
class TrainSettings:
    variant: str = "fairad"
    epochs: int = 200
    alpha: float = 1.0
    estimator: str = "loss1"
    optimizer: str = "adam"
    learning_rate: float = 1e-3
    batch_size: int | None = None  # None = full batch
    pair_threshold: int = 4096
    augment_scale: float = 0.05

    def contrastive(self) -> str | None:
        if self.variant == "plain_ae" or self.alpha == 0:
            return None
        return {
            "fairad": "fac", "fairad_r": "fac", "fairad_n": "unif",
            "fairad_d": "fair", "fairad_c": "simclr",
        }[self.variant]

    def effective_alpha(self) -> float:
        return 0.0 if self.variant == "plain_ae" else float(self.alpha)

    def rebalanced(self) -> bool:
        return self.variant not in ("fairad_r", "plain_ae")


def _subsample(idx: np.ndarray, limit: int, rng: np.random.Generator) -> np.ndarray:
    if idx.size <= limit:
        return idx
    return np.sort(rng.choice(idx, limit, replace=False))


class Trainer:
    """Full-batch (or minibatch) minimisation of the variant's objective.

    The re-balancing weight is recomputed from the whole dataset at the start
    of every epoch and held fixed for that epoch's steps.
    """

    def __init__(self, model: Autoencoder, view: TrainingView, settings: TrainSettings,
                 rng: np.random.Generator):
        self.model = model
        self.view = view
        self.s = settings
        self.s.variant = normalize_variant(settings.variant)
        self.rng = rng
        self.state = OptimizerState(method=settings.optimizer, learning_rate=settings.learning_rate)
        self.feature_std = view.features.std(axis=0)
        self.history: list[LossReport] = []

    # one objective evaluation + gradient on the rows in ``idx``
    def objective(self, idx: np.ndarray, epsilon: float):
        x = self.view.features[idx]
        prot = self.view.protected[idx]
        z, recon, cache = forward(self.model, x)
        diff = recon - x
        row_err = np.einsum("ij,ij->i", diff, diff)
        l_p = float(row_err[prot].sum())
        l_u = float(row_err[~prot].sum())
        l_rec = (1.0 - epsilon) * l_u + epsilon * l_p
        w = np.where(prot, epsilon, 1.0 - epsilon)
        d_recon = 2.0 * w[:, None] * diff
        d_z = np.zeros_like(z)

        alpha = self.s.effective_alpha()
        kind = self.s.contrastive()
        l_fair = l_unif = l_contrast = 0.0
        grads_extra = None
        if kind in ("fac", "fair", "unif"):
            ip = _subsample(np.flatnonzero(prot), self.s.pair_threshold, self.rng)
            iu = _subsample(np.flatnonzero(~prot), self.s.pair_threshold, self.rng)
            l_fair, l_unif, dzp, dzu = fac_with_grad(
                z[ip], z[iu], use_fair=kind != "unif", use_unif=kind != "fair", eps=NORM_SMOOTHING
            )
            l_contrast = (l_fair if kind != "unif" else 0.0) + (l_unif if kind != "fair" else 0.0)
            d_z[ip] += alpha * dzp
            d_z[iu] += alpha * dzu
        elif kind == "simclr":
            sub = _subsample(np.arange(len(idx)), self.s.pair_threshold, self.rng)
            noise = self.rng.standard_normal(x[sub].shape) * (self.s.augment_scale * self.feature_std)
            z_pos, _, cache_pos = forward(self.model, x[sub] + noise)
            l_contrast, dz, dz_pos = simclr_with_grad(z[sub], z_pos, eps=NORM_SMOOTHING)
            d_z[sub] += alpha * dz
            grads_extra = backward(self.model, cache_pos, None, alpha * dz_pos)

        grads = backward(self.model, cache, d_recon, d_z)
        if grads_extra is not None:
            grads = grads + grads_extra
        report = LossReport(l_u, l_p, epsilon, l_fair, l_unif, l_fair + l_unif, l_rec, alpha,
                            l_rec + alpha * l_contrast)
        return report, grads

    def epsilon(self) -> float:
        if not self.s.rebalanced():
            return UNWEIGHTED_EPSILON
        _, recon, _ = forward(self.model, self.view.features)
        p = self.view.protected
        batch = GroupBatch(x_p=self.view.features[p], x_u=self.view.features[~p],
                           recon_p=recon[p], recon_u=recon[~p])
        return epsilon_weight(batch, EpsilonEstimator(self.s.estimator))

    def run_epoch(self, epoch: int) -> LossReport:
        eps_w = self.epsilon()
        n_rows = self.view.features.shape[0]
        if self.s.batch_size is None or self.s.batch_size >= n_rows:
            batches = [np.arange(n_rows)]
        else:
            perm = self.rng.permutation(n_rows)
            batches = [np.sort(perm[i:i + self.s.batch_size]) for i in range(0, n_rows, self.s.batch_size)]
        reports = []
        for idx in batches:
            report, grads = self.objective(idx, eps_w)
            if not math.isfinite(report.total):
                raise NumericError(f"non-finite loss at epoch {epoch}", epoch=epoch)
            try:
                apply_update(self.model, grads, self.state)
            except NumericError as exc:
                raise NumericError(f"{exc} at epoch {epoch}", layer_index=exc.layer_index,
                                   epoch=epoch) from exc
            reports.append(report)
        if len(reports) == 1:
            summary = reports[0]
        else:
            fields = {k: float(np.sum([getattr(r, k) for r in reports]))
                      for k in ("l_u", "l_p", "l_rec", "total")}
            mean = {k: float(np.mean([getattr(r, k) for r in reports]))
                    for k in ("l_fair", "l_unif", "l_fac")}
            summary = LossReport(epsilon=eps_w, alpha=reports[0].alpha, **fields, **mean)
        self.history.append(summary)
        return summary

    def fit(self) -> list[LossReport]:
        for epoch in range(self.s.epochs):
            self.run_epoch(epoch)
        return self.history
