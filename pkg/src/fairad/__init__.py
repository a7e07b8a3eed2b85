"""Fairness-aware anomaly detection with re-balanced autoencoders.

Submodules: ``nn`` (dense autoencoder with manual backprop), ``losses``
(contrastive and re-balanced reconstruction objectives), ``metrics``
(scores, ranking and group metrics), ``data`` (loading, synthesis,
resampling), ``training``, ``theory`` (divergence and bound checks) and
``harness`` (experiment orchestration behind the ``fairad`` command).
"""

from .data import GroupedDataset, SyntheticSpec, generate_synthetic, load_csv, standardize
from .harness import ExperimentConfig, RunReport, run_ablation, run_experiment, run_ratio_study, run_theory_audit
from .losses import EpsilonEstimator, epsilon_weight, loss_fac, loss_overall, loss_simclr
from .metrics import anomaly_scores, group_metrics, recall_at_k, rocauc
from .nn import Autoencoder, build_autoencoder, forward
from .training import Trainer, TrainSettings

__version__ = "0.1.0"

__all__ = [
    "Autoencoder", "EpsilonEstimator", "ExperimentConfig", "GroupedDataset", "RunReport",
    "SyntheticSpec", "TrainSettings", "Trainer", "anomaly_scores", "build_autoencoder",
    "epsilon_weight", "forward", "generate_synthetic", "group_metrics", "load_csv", "loss_fac",
    "loss_overall", "loss_simclr", "recall_at_k", "rocauc", "run_ablation", "run_experiment",
    "run_ratio_study", "run_theory_audit", "standardize",
]
