"""Training objectives: contrastive terms, group reconstruction losses and the
re-balancing weight.

Similarities are ``sim(a, b) = exp(cos(a, b))``. Functions suffixed
``_with_grad`` also return adjoints with respect to their matrix inputs so the
trainer can push them through :func:`fairad.nn.backward`.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from enum import Enum

import numpy as np

from .errors import DegenerateVectorError, InsufficientBatchError, InsufficientGroupError, ShapeError

log = logging.getLogger(__name__)

DEGENERATE_DENOMINATOR = 1e-12
FALLBACK_EPSILON = 0.5


class EpsilonEstimator(str, Enum):
    """How the unfitted-model losses inside the re-balancing weight are estimated."""

    LOSS1 = "loss1"  # sum ||x_i - mean_g G(x)||^2
    LOSS2 = "loss2"  # sum ||x_i||^2
    LOSS3 = "loss3"  # sum ||G(x_i) - mean_g x||^2
    LOSS4 = "loss4"  # sum ||x_i - mean_g x||^2


def cosine_sim_exp(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise DegenerateVectorError("cosine similarity of a zero-norm vector")
    return math.exp(float(a @ b) / (na * nb))


def _normalize(z: np.ndarray, eps: float) -> tuple[np.ndarray, np.ndarray]:
    """Row-normalize; returns (unit rows, norms). ``eps`` > 0 smooths the norm."""
    z = np.asarray(z, dtype=np.float64)
    sq = np.einsum("ij,ij->i", z, z)
    if eps > 0.0:
        norms = np.sqrt(sq + eps * eps)
    else:
        norms = np.sqrt(sq)
        if np.any(norms == 0.0):
            raise DegenerateVectorError(f"{int(np.sum(norms == 0.0))} zero-norm representation(s)")
    return z / norms[:, None], norms


def _normalize_backward(unit: np.ndarray, norms: np.ndarray, d_unit: np.ndarray) -> np.ndarray:
    # d/dz of z/||z||: (I - u u^T) / ||z||
    radial = np.einsum("ij,ij->i", unit, d_unit)
    return (d_unit - unit * radial[:, None]) / norms[:, None]


@dataclass
class GroupBatch:
    """Per-group representations and reconstruction inputs for one step.

    Any field not needed by a given loss may be left as ``None``.
    """

    z_p: np.ndarray | None = None
    z_u: np.ndarray | None = None
    x_p: np.ndarray | None = None
    x_u: np.ndarray | None = None
    recon_p: np.ndarray | None = None
    recon_u: np.ndarray | None = None


# -- contrastive losses ------------------------------------------------------


def simclr_with_grad(z, z_pos, eps: float = 0.0):
    """Value of the SimCLR loss and its adjoints w.r.t. ``z`` and ``z_pos``.

    The denominator for row j sums sim(z_j, z_k) over every row k of ``z``,
    j included.
    """
    z = np.asarray(z, dtype=np.float64)
    z_pos = np.asarray(z_pos, dtype=np.float64)
    if z.ndim != 2 or z.shape[0] < 2:
        raise InsufficientBatchError("SimCLR needs at least two rows")
    if z_pos.shape != z.shape:
        raise ShapeError(f"positive views {z_pos.shape} do not match {z.shape}")
    u, nu = _normalize(z, eps)
    v, nv = _normalize(z_pos, eps)
    cos = u @ u.T
    pos = np.einsum("ij,ij->i", u, v)
    # log sum_k exp(cos_jk), stabilised by the max (cos <= 1)
    lse = 1.0 + np.log(np.exp(cos - 1.0).sum(axis=1))
    value = float(np.sum(lse - pos))

    soft = np.exp(cos - lse[:, None])
    d_u = soft @ u + soft.T @ u - v
    d_v = -u
    return value, _normalize_backward(u, nu, d_u), _normalize_backward(v, nv, d_v)


def loss_simclr(z, z_pos=None) -> float:
    """SimCLR loss; ``z_pos`` defaults to ``z`` (identity augmentation)."""
    z = np.asarray(z, dtype=np.float64)
    return simclr_with_grad(z, z if z_pos is None else z_pos)[0]


def fac_with_grad(z_p, z_u, use_fair: bool = True, use_unif: bool = True, eps: float = 0.0):
    """Fairness-aware contrastive loss terms and their adjoints.

    Returns ``(l_fair, l_unif, d_z_p, d_z_u)`` where the adjoints are of
    ``use_fair * l_fair + use_unif * l_unif``. Both terms are always reported.
    """
    z_p = np.asarray(z_p, dtype=np.float64)
    z_u = np.asarray(z_u, dtype=np.float64)
    n, m = z_p.shape[0], z_u.shape[0]
    if n < 2:
        raise InsufficientGroupError(f"protected group has {n} row(s); need at least 2")
    if m < 2:
        raise InsufficientGroupError(f"unprotected group has {m} row(s); need at least 2")
    if z_p.shape[1] != z_u.shape[1]:
        raise ShapeError("group representations differ in width")

    up, np_ = _normalize(z_p, eps)
    uu, nu = _normalize(z_u, eps)
    e_pu = np.exp(up @ uu.T)
    e_uu = np.exp(uu @ uu.T)
    e_pp = np.exp(up @ up.T)
    np.fill_diagonal(e_uu, 0.0)
    np.fill_diagonal(e_pp, 0.0)

    cross = e_pu.sum() / (n * m)
    within = e_uu.sum() / (m * (m - 1)) + e_pp.sum() / (n * (n - 1))
    l_fair = -math.log(cross)
    l_unif = math.log(within)

    d_up = np.zeros_like(up)
    d_uu = np.zeros_like(uu)
    if use_fair:
        g = -e_pu / (cross * n * m)  # dL/dcos for cross pairs
        d_up += g @ uu
        d_uu += g.T @ up
    if use_unif:
        g_uu = e_uu / (within * m * (m - 1))
        g_pp = e_pp / (within * n * (n - 1))
        d_uu += 2.0 * g_uu @ uu
        d_up += 2.0 * g_pp @ up
    return l_fair, l_unif, _normalize_backward(up, np_, d_up), _normalize_backward(uu, nu, d_uu)


def loss_fac(batch: GroupBatch) -> tuple[float, float, float]:
    """``(l_fair, l_unif, l_fac)`` for the representations in ``batch``."""
    l_fair, l_unif, _, _ = fac_with_grad(batch.z_p, batch.z_u)
    return l_fair, l_unif, l_fair + l_unif


# -- reconstruction ----------------------------------------------------------


def _sq_err(x, recon) -> float:
    x = np.asarray(x, dtype=np.float64)
    recon = np.asarray(recon, dtype=np.float64)
    if x.shape != recon.shape:
        raise ShapeError(f"reconstruction shape {recon.shape} does not match input {x.shape}")
    diff = x - recon
    return float(np.sum(diff * diff))


def loss_rec_split(batch: GroupBatch) -> tuple[float, float]:
    """Summed squared reconstruction error per group, as ``(l_p, l_u)``."""
    return _sq_err(batch.x_p, batch.recon_p), _sq_err(batch.x_u, batch.recon_u)


def unfitted_loss(x, recon, estimator: EpsilonEstimator | str) -> float:
    """Estimate of the loss an unfitted model would incur on one group."""
    x = np.asarray(x, dtype=np.float64)
    recon = np.asarray(recon, dtype=np.float64)
    est = EpsilonEstimator(estimator)
    if est is EpsilonEstimator.LOSS1:
        return _sq_err(x, np.broadcast_to(recon.mean(axis=0), x.shape))
    if est is EpsilonEstimator.LOSS2:
        return float(np.sum(x * x))
    if est is EpsilonEstimator.LOSS3:
        return _sq_err(recon, np.broadcast_to(x.mean(axis=0), recon.shape))
    return _sq_err(x, np.broadcast_to(x.mean(axis=0), x.shape))


def epsilon_from_losses(l0_u: float, l_u: float, l0_p: float, l_p: float) -> float:
    gain_u = l0_u - l_u
    gain_p = l0_p - l_p
    denom = gain_u + gain_p
    if abs(denom) < DEGENERATE_DENOMINATOR:
        log.warning(
            "re-balancing weight denominator %.3g is degenerate; falling back to %s",
            denom,
            FALLBACK_EPSILON,
        )
        return FALLBACK_EPSILON
    return float(min(1.0, max(0.0, gain_u / denom)))


def epsilon_weight(batch: GroupBatch, estimator: EpsilonEstimator | str = EpsilonEstimator.LOSS1) -> float:
    """Re-balancing weight in [0, 1] given current reconstructions of both groups."""
    if batch.x_p is None or batch.x_u is None or len(batch.x_p) < 1 or len(batch.x_u) < 1:
        raise InsufficientGroupError("each group needs at least one row")
    l_p, l_u = loss_rec_split(batch)
    l0_u = unfitted_loss(batch.x_u, batch.recon_u, estimator)
    l0_p = unfitted_loss(batch.x_p, batch.recon_p, estimator)
    return epsilon_from_losses(l0_u, l_u, l0_p, l_p)


@dataclass
class LossReport:
    l_u: float
    l_p: float
    epsilon: float
    l_fair: float
    l_unif: float
    l_fac: float
    l_rec: float
    alpha: float
    total: float

    def to_dict(self) -> dict:
        return asdict(self)


def loss_overall(
    batch: GroupBatch,
    alpha: float = 1.0,
    estimator: EpsilonEstimator | str = EpsilonEstimator.LOSS1,
    epsilon: float | None = None,
) -> LossReport:
    """Re-balanced reconstruction loss plus ``alpha`` times the contrastive loss.

    ``epsilon`` is computed from ``batch`` unless given; it is a constant
    weight either way. With ``alpha == 0`` and no representations in the
    batch, the contrastive fields are reported as 0.
    """
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    l_p, l_u = loss_rec_split(batch)
    eps_w = epsilon_weight(batch, estimator) if epsilon is None else float(epsilon)
    l_rec = (1.0 - eps_w) * l_u + eps_w * l_p
    if batch.z_p is not None and batch.z_u is not None:
        l_fair, l_unif, l_fac = loss_fac(batch)
    elif alpha == 0:
        l_fair = l_unif = l_fac = 0.0
    else:
        raise ValueError("representations are required when alpha > 0")
    total = l_rec + alpha * l_fac if alpha else l_rec
    return LossReport(l_u, l_p, eps_w, l_fair, l_unif, l_fac, l_rec, float(alpha), total)
