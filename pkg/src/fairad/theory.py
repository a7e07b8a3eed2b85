"""Numerical instruments for the divergence-based fairness bounds.

Covers the f-divergence catalogue, the variational (Fenchel) lower bound,
empirical total variation, the delta/sigma bound on TV between
representation distributions, the distance surrogates of the contrastive
loss, empirical Rademacher complexity and an end-to-end audit of the
risk-difference bound for a thresholded detector.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.spatial.distance import cdist

from .errors import (
    DegenerateDataError,
    DegenerateVectorError,
    DomainError,
    InsufficientGroupError,
    UnknownDivergenceError,
)

AUDIT_SCHEMA_VERSION = 1
SLACK = 1e-9


# -- f-divergence catalogue --------------------------------------------------


def _xlogx(x):
    x = np.asarray(x, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(x > 0, x * np.log(np.where(x > 0, x, 1.0)), 0.0)


def _neg_log(x):
    x = np.asarray(x, dtype=np.float64)
    with np.errstate(divide="ignore"):
        return -np.log(x)


def _js(x):
    x = np.asarray(x, dtype=np.float64)
    return -(x + 1.0) * np.log((1.0 + x) / 2.0) + _xlogx(x)


@dataclass(frozen=True)
class DivergenceSpec:
    """An f-divergence: generator ``f``, conjugate ``f_star`` and its domain.

    ``domain`` is ``(low, high, closed)``: ``closed`` says whether the
    endpoints belong to it. ``lipschitz`` is the Lipschitz constant of
    ``f_star`` used in the bounds (None where it is not defined).
    ``slope_at_infinity`` is lim f(x)/x, needed when P has mass where Q has none.
    """

    name: str
    f: Callable[[np.ndarray], np.ndarray]
    _f_star: Callable[[np.ndarray], np.ndarray]
    domain: tuple[float, float, bool]
    lipschitz: float | None
    slope_at_infinity: float

    def in_domain(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        low, high, closed = self.domain
        if closed:
            return (t >= low) & (t <= high)
        return (t > low) & (t < high)

    def f_star(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        if not np.all(self.in_domain(t)):
            bad = t[~self.in_domain(t)].ravel()[0]
            raise DomainError(f"{self.name} conjugate undefined at t={bad!r}; domain {self.domain[:2]}")
        return self._f_star(t)


_CATALOGUE = {
    "kl": DivergenceSpec(
        "KL", _xlogx, lambda t: np.exp(t - 1.0), (-np.inf, np.inf, False), 1.0, np.inf
    ),
    "reverse_kl": DivergenceSpec(
        "ReverseKL", _neg_log, lambda t: -1.0 - np.log(-t), (-np.inf, 0.0, False), None, 0.0
    ),
    "js": DivergenceSpec(
        "JS", _js, lambda t: -np.log(2.0 - np.exp(t)), (-np.inf, math.log(2.0), False), None,
        math.log(2.0),
    ),
    "pearson_chi2": DivergenceSpec(
        "PearsonChi2", lambda x: (np.asarray(x, dtype=np.float64) - 1.0) ** 2,
        lambda t: t * t / 4.0 + t, (-np.inf, np.inf, False), 1.5, np.inf,
    ),
    "tv": DivergenceSpec(
        "TV", lambda x: 0.5 * np.abs(np.asarray(x, dtype=np.float64) - 1.0),
        lambda t: np.asarray(t, dtype=np.float64), (-0.5, 0.5, True), 1.0, 0.5,
    ),
}
_ALIASES = {
    "kullback_leibler": "kl", "reversekl": "reverse_kl", "kl_rev": "reverse_kl",
    "jensen_shannon": "js", "pearson": "pearson_chi2", "chi2": "pearson_chi2",
    "pearsonchi2": "pearson_chi2", "total_variation": "tv",
}
DIVERGENCES = tuple(_CATALOGUE)


def divergence_table(name: str) -> DivergenceSpec:
    key = name.strip().lower().replace("-", "_").replace(" ", "_")
    key = _ALIASES.get(key, key)
    try:
        return _CATALOGUE[key]
    except KeyError:
        raise UnknownDivergenceError(f"unknown divergence {name!r}; known: {', '.join(DIVERGENCES)}") from None


def _as_spec(spec) -> DivergenceSpec:
    return spec if isinstance(spec, DivergenceSpec) else divergence_table(spec)


def exact_f_divergence(p, q, spec) -> float:
    """D_f(P || Q) for two probability vectors over the same finite support."""
    spec = _as_spec(spec)
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise ValueError("p and q must have the same support")
    on_q = q > 0
    total = float(np.sum(q[on_q] * spec.f(p[on_q] / q[on_q])))
    orphan = float(p[~on_q].sum())
    if orphan > 0:
        total += orphan * spec.slope_at_infinity
    return total


# -- witnesses and the variational bound ------------------------------------


@dataclass(frozen=True)
class Witness:
    """A named scalar function T applied row-wise to samples."""

    name: str
    fn: Callable[[np.ndarray], np.ndarray]

    def __call__(self, samples) -> np.ndarray:
        return np.asarray(self.fn(np.asarray(samples)), dtype=np.float64).reshape(-1)


def constant_witness(c: float) -> Witness:
    return Witness(f"const({c:g})", lambda s: np.full(len(s), float(c)))


def table_witness(values: Sequence[float], name: str | None = None) -> Witness:
    """Witness over integer-coded atoms: T(atom) = values[atom]."""
    table = np.asarray(values, dtype=np.float64)
    return Witness(name or f"table{tuple(np.round(table, 3))}", lambda s: table[np.asarray(s, dtype=int)])


def threshold_witness(direction, offset: float, low: float, high: float) -> Witness:
    """T(x) = high if <direction, x> > offset else low."""
    w = np.atleast_1d(np.asarray(direction, dtype=np.float64))

    def fn(s):
        s = np.asarray(s, dtype=np.float64)
        s = s.reshape(len(s), -1)
        return np.where(s @ w > offset, high, low)

    return Witness(f"thr(w={np.round(w, 3).tolist()}, b={offset:g}, {low:g}/{high:g})", fn)


def threshold_witness_grid(samples, n_directions: int = 4, n_offsets: int = 8,
                           levels: tuple[float, float] = (-0.5, 0.5), seed: int = 0) -> list[Witness]:
    """Thresholded random linear scores with offsets at sample quantiles."""
    x = np.asarray(samples, dtype=np.float64)
    x = x.reshape(len(x), -1)
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n_directions):
        w = rng.standard_normal(x.shape[1])
        w /= np.linalg.norm(w)
        proj = x @ w
        for b in np.quantile(proj, np.linspace(0.0, 1.0, n_offsets + 2)[1:-1]):
            out.append(threshold_witness(w, float(b), levels[0], levels[1]))
            out.append(threshold_witness(w, float(b), levels[1], levels[0]))
    return out


def empirical_f_divergence(p_samples, q_samples, spec, witness_family: Sequence[Callable]) -> float:
    """max over witnesses of mean_P[T] - mean_Q[f*(T)], a lower bound on D_f."""
    spec = _as_spec(spec)
    if len(p_samples) == 0 or len(q_samples) == 0:
        raise DegenerateDataError("both sample sets must be non-empty")
    if not witness_family:
        raise ValueError("witness family is empty")
    best = -np.inf
    for i, T in enumerate(witness_family):
        tp = np.asarray(T(p_samples), dtype=np.float64)
        tq = np.asarray(T(q_samples), dtype=np.float64)
        name = getattr(T, "name", f"witness[{i}]")
        if not (np.all(spec.in_domain(tp)) and np.all(spec.in_domain(tq))):
            raise DomainError(f"witness {name} leaves the domain of the {spec.name} conjugate")
        best = max(best, float(tp.mean() - spec.f_star(tq).mean()))
    return best


def hypothesis_discrepancy(p_samples, q_samples, spec, h: Callable, hypotheses: Sequence[Callable],
                           loss: Callable = None, signed: bool = False) -> float:
    """sup over h' of |mean_P l(h, h') - mean_Q f*(l(h, h'))|.

    ``signed=True`` drops the absolute value, which is the form the
    variational bound controls.
    """
    spec = _as_spec(spec)
    loss = loss or zero_one_loss
    hp, hq = h(p_samples), h(q_samples)
    best = -np.inf
    for hh in hypotheses:
        lp = loss(hp, hh(p_samples))
        lq = loss(hq, hh(q_samples))
        gap = float(np.mean(lp) - np.mean(spec.f_star(lq)))
        best = max(best, gap if signed else abs(gap))
    return best


def zero_one_loss(a, b) -> np.ndarray:
    return (np.asarray(a) != np.asarray(b)).astype(np.float64)


# -- total variation ---------------------------------------------------------


def _cells(samples, binning):
    samples = np.asarray(samples)
    if binning is not None:
        keys = np.asarray(binning(samples))
    else:
        keys = samples
    if keys.ndim > 1:
        return [tuple(r) for r in keys.reshape(len(keys), -1).tolist()]
    return keys.tolist()


def empirical_tv(p_samples, q_samples, binning: Callable | None = None) -> float:
    """Half the L1 distance between the cell frequencies of two samples.

    ``binning`` maps an array of samples to one cell id per sample; without
    it, each sample (row) is its own cell key.
    """
    if len(p_samples) == 0 or len(q_samples) == 0:
        raise DegenerateDataError("both sample sets must be non-empty")
    cp, cq = _cells(p_samples, binning), _cells(q_samples, binning)
    freq: dict = {}
    for c in cp:
        freq.setdefault(c, [0, 0])[0] += 1
    for c in cq:
        freq.setdefault(c, [0, 0])[1] += 1
    np_, nq = len(cp), len(cq)
    return 0.5 * sum(abs(a / np_ - b / nq) for a, b in freq.values())


def edge_binning(edges) -> Callable[[np.ndarray], np.ndarray]:
    """Binning of 1-D values by sorted edges; cell i holds edges[i-1] <= v < edges[i]."""
    edges = np.sort(np.asarray(edges, dtype=np.float64))
    return lambda v: np.searchsorted(edges, np.asarray(v, dtype=np.float64).ravel(), side="right")


# -- surrogate losses and the delta/sigma bound ------------------------------


def _pairwise_dist(a, b) -> np.ndarray:
    return cdist(np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64))


def surrogate_losses(z_p, z_u) -> tuple[float, float]:
    """Distance surrogates of the contrastive terms.

    ``l_fair' = sum_{j,k} ||z_j^U - z_k^P||`` and
    ``l_unif' = -(sum_{j!=k} ||z_j^U - z_k^U|| + sum_{j!=k} ||z_j^P - z_k^P||)``
    with ordered pairs.
    """
    z_p = np.asarray(z_p, dtype=np.float64)
    z_u = np.asarray(z_u, dtype=np.float64)
    if len(z_p) < 2 or len(z_u) < 2:
        raise InsufficientGroupError("each group needs at least two rows")
    l_fair = float(_pairwise_dist(z_u, z_p).sum())
    l_unif = -float(_pairwise_dist(z_u, z_u).sum() + _pairwise_dist(z_p, z_p).sum())
    return l_fair, l_unif


@dataclass
class TvBoundReport:
    tv_hat: float
    delta: float
    sigma: float
    c_u: float
    c_p: float
    cardinality: int
    bound_rhs: float
    surrogate_fair: float
    surrogate_unif: float
    bandwidth: float
    sigma_form: str
    holds: bool
    sigma_le_surrogate: bool

    def to_dict(self) -> dict:
        return asdict(self)


def _unit_rows(z) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    norms = np.linalg.norm(z, axis=1)
    if np.any(norms == 0):
        raise DegenerateVectorError("representations must be non-zero")
    return z / norms[:, None]


def scott_bandwidth(points) -> float:
    points = np.asarray(points, dtype=np.float64)
    n, d = points.shape
    spread = math.sqrt(float(np.mean(points.var(axis=0))))
    return spread * n ** (-1.0 / (d + 4)) if spread > 0 else 1.0


def _kde_pmf(support, sample, bandwidth) -> np.ndarray:
    # Gaussian KDE of ``sample`` evaluated on ``support``, renormalised into a pmf on it
    sq = _pairwise_dist(support, sample) ** 2
    logk = -sq / (2.0 * bandwidth**2)
    shift = logk.max()
    dens = np.exp(logk - shift).mean(axis=1)
    return dens / dens.sum()


def _max_slope(values, points, chunk: int = 1024) -> float:
    best = 0.0
    for start in range(0, len(points), chunk):
        blk = slice(start, start + chunk)
        dist = _pairwise_dist(points[blk], points)
        diff = np.abs(values[blk][:, None] - values[None, :])
        with np.errstate(divide="ignore", invalid="ignore"):
            slope = np.where(dist > 0, diff / dist, 0.0)
        best = max(best, float(slope.max()))
    return best


def tv_bound_check(z_p, z_u, lipschitz_estimates: tuple[float, float] | None = None,
                   bandwidth: float | None = None, sigma_form: str = "euclidean") -> TvBoundReport:
    """Check TV(U||P) <= (|X| delta + (c_U + c_P) sigma) / 2 on representations.

    Points are projected to the unit sphere and pooled into the support X
    (duplicates merged). Each group's density on X is a Gaussian KDE with a
    shared Scott bandwidth, renormalised to sum to one over X. ``c_U`` and
    ``c_P`` default to the largest finite-difference slope of each density
    over all pairs of support points.

    ``sigma_form="euclidean"`` measures sigma with ||x - x*|| on the sphere;
    ``"log"`` uses sqrt(2 - 2 log cos(x, x*)) with the plain cosine and fails
    when a cosine is not positive.
    """
    up, uu = _unit_rows(z_p), _unit_rows(z_u)
    support = np.unique(np.vstack([uu, up]), axis=0)
    h = bandwidth if bandwidth is not None else scott_bandwidth(np.vstack([uu, up]))
    pmf_u = _kde_pmf(support, uu, h)
    pmf_p = _kde_pmf(support, up, h)
    gaps = np.abs(pmf_u - pmf_p)
    star = int(np.argmin(gaps))
    delta = float(gaps[star])
    tv_hat = 0.5 * float(gaps.sum())

    x_star = support[star]
    if sigma_form == "euclidean":
        dists = np.linalg.norm(support - x_star, axis=1)
    elif sigma_form == "log":
        cos = np.clip(support @ x_star, -1.0, 1.0)
        if np.any(cos <= 0):
            raise DomainError("log-form sigma needs positive cosines to the matched point")
        dists = np.sqrt(np.maximum(2.0 - 2.0 * np.log(cos), 0.0))
    else:
        raise ValueError(f"unknown sigma_form {sigma_form!r}")
    sigma = float(dists.sum())

    if lipschitz_estimates is None:
        c_u, c_p = _max_slope(pmf_u, support), _max_slope(pmf_p, support)
    else:
        c_u, c_p = map(float, lipschitz_estimates)
    rhs = 0.5 * (len(support) * delta + (c_u + c_p) * sigma)

    if len(up) >= 2 and len(uu) >= 2:
        s_fair, s_unif = surrogate_losses(up, uu)
    else:
        s_fair, s_unif = float(_pairwise_dist(uu, up).sum()), 0.0
    return TvBoundReport(
        tv_hat=tv_hat, delta=delta, sigma=sigma, c_u=c_u, c_p=c_p, cardinality=len(support),
        bound_rhs=rhs, surrogate_fair=s_fair, surrogate_unif=s_unif, bandwidth=h,
        sigma_form=sigma_form, holds=tv_hat <= rhs + SLACK,
        sigma_le_surrogate=sigma <= s_fair + SLACK,
    )


# -- Rademacher complexity ---------------------------------------------------


@dataclass(frozen=True)
class RademacherEstimate:
    value: float
    stderr: float
    exact: bool
    trials: int


def rademacher_complexity(function_values, trials: int = 10_000, seed: int = 0,
                          method: str = "auto", chunk: int = 1024) -> RademacherEstimate:
    """E_sigma sup_r (1/|D|) sum_i sigma_i r(z_i) for a finite function family.

    ``function_values`` is (family size, |D|). ``method="auto"`` enumerates
    all sign vectors when |D| <= 12 and otherwise averages ``trials`` Monte
    Carlo draws.
    """
    F = np.asarray(function_values, dtype=np.float64)
    if F.ndim == 1:
        F = F[None, :]
    if F.size == 0 or F.shape[0] == 0:
        raise LookupError("function family is empty")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    F = np.unique(F, axis=0)
    n = F.shape[1]
    if method == "auto":
        method = "exact" if n <= 12 else "mc"
    if method == "exact":
        signs = np.array(list(itertools.product((-1.0, 1.0), repeat=n)))
        sup = (signs @ F.T).max(axis=1) / n
        return RademacherEstimate(float(sup.mean()), 0.0, True, len(signs))
    if method != "mc":
        raise ValueError(f"unknown method {method!r}")
    rng = np.random.default_rng(seed)
    sups = np.empty(trials)
    for start in range(0, trials, chunk):
        stop = min(trials, start + chunk)
        signs = rng.choice((-1.0, 1.0), size=(stop - start, n))
        sups[start:stop] = (signs @ F.T).max(axis=1) / n
    stderr = float(sups.std(ddof=1) / math.sqrt(trials)) if trials > 1 else float("nan")
    return RademacherEstimate(float(sups.mean()), stderr, False, trials)


def empirical_rademacher(function_values, trials: int = 10_000, seed: int = 0,
                         method: str = "auto") -> float:
    return rademacher_complexity(function_values, trials, seed, method).value


# -- risk-difference audit ---------------------------------------------------


@dataclass
class AuditReport:
    divergence: str
    confidence_delta: float
    n_protected: int
    n_unprotected: int
    hypothesis_count: int
    threshold: float
    risk_p: float
    risk_u: float
    lhs: float
    divergence_term: float
    risk_u_star: float
    risk_p_star: float
    rademacher_u: float
    rademacher_u_stderr: float
    rademacher_p: float
    rademacher_p_stderr: float
    lipschitz: float
    rademacher_term_u: float
    rademacher_term_p: float
    confidence_term_u: float
    confidence_term_p: float
    rhs: float
    holds: bool
    hypothesis_discrepancy: float
    variational_lower_bound: float | None = None
    schema_version: int = AUDIT_SCHEMA_VERSION

    def to_dict(self) -> dict:
        return asdict(self)


AUDIT_JSON_SCHEMA = {
    "type": "object",
    "required": [f for f in AuditReport.__dataclass_fields__ if f != "variational_lower_bound"],
    "properties": {
        **{f: {"type": "number"} for f in (
            "confidence_delta", "threshold", "risk_p", "risk_u", "lhs", "divergence_term",
            "risk_u_star", "risk_p_star", "rademacher_u", "rademacher_u_stderr", "rademacher_p",
            "rademacher_p_stderr", "lipschitz", "rademacher_term_u", "rademacher_term_p",
            "confidence_term_u", "confidence_term_p", "rhs", "hypothesis_discrepancy")},
        "variational_lower_bound": {"type": ["number", "null"]},
        "divergence": {"type": "string"},
        "n_protected": {"type": "integer", "minimum": 1},
        "n_unprotected": {"type": "integer", "minimum": 1},
        "hypothesis_count": {"type": "integer", "minimum": 1},
        "holds": {"type": "boolean"},
        "schema_version": {"const": AUDIT_SCHEMA_VERSION},
    },
}


def threshold_grid(scores, size: int = 32, include=()) -> np.ndarray:
    """``size`` score thresholds: quantiles of ``scores`` plus any in ``include``."""
    scores = np.asarray(scores, dtype=np.float64)
    extra = np.asarray(include, dtype=np.float64).ravel()
    n_q = max(size - extra.size, 1)
    grid = np.quantile(scores, np.linspace(0.0, 1.0, n_q))
    return np.unique(np.concatenate([grid, extra]))


def fairness_bound_audit(scores, labels, protected, spec="tv", thresholds=None,
                         detector_threshold: float | None = None, k: int | None = None,
                         confidence_delta: float = 0.05, witness_family=None,
                         hypothesis_size: int = 32, trials: int = 10_000, seed: int = 0) -> AuditReport:
    """Evaluate both sides of the group risk-difference bound.

    Hypotheses are score thresholds h_t(x) = 1[s(x) >= t] with the 0/1 loss.
    The audited detector flags the top ``k`` scores (default: the number of
    anomalies) unless ``detector_threshold`` is given; its threshold is
    always part of the family. The divergence term is computed between the
    score histograms of the two groups on the cells the thresholds induce,
    so every hypothesis is constant per cell.
    """
    spec = _as_spec(spec)
    if spec.lipschitz is None:
        raise DomainError(f"{spec.name} conjugate has no Lipschitz constant on [0, 1]")
    if not 0.0 < confidence_delta < 1.0:
        raise ValueError("confidence_delta must lie in (0, 1)")
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels).astype(int)
    prot = np.asarray(protected, dtype=bool)
    n, m = int(prot.sum()), int((~prot).sum())
    if n == 0 or m == 0:
        raise DegenerateDataError("both groups must be non-empty")

    if detector_threshold is None:
        k = int(y.sum()) if k is None else int(k)
        order = np.argsort(-s, kind="stable")
        detector_threshold = float(s[order[k - 1]]) if k > 0 else float("inf")
    if thresholds is None:
        thresholds = threshold_grid(s, hypothesis_size, include=[detector_threshold])
    else:
        thresholds = np.unique(np.append(np.asarray(thresholds, dtype=np.float64), detector_threshold))

    preds = (s[None, :] >= thresholds[:, None]).astype(int)  # (H, N)
    h_idx = int(np.flatnonzero(thresholds == detector_threshold)[0])
    errs = (preds != y[None, :]).astype(np.float64)
    risk_p, risk_u = float(errs[h_idx, prot].mean()), float(errs[h_idx, ~prot].mean())
    lhs = abs(risk_p - risk_u)

    joint = errs[:, prot].mean(axis=1) + errs[:, ~prot].mean(axis=1)
    star = int(np.argmin(joint))
    risk_p_star, risk_u_star = float(errs[star, prot].mean()), float(errs[star, ~prot].mean())

    binning = edge_binning(thresholds)
    if spec.name == "TV":
        div_term = empirical_tv(s[~prot], s[prot], binning)
    else:
        cells_u, cells_p = binning(s[~prot]), binning(s[prot])
        nb = len(thresholds) + 1
        div_term = exact_f_divergence(np.bincount(cells_u, minlength=nb) / m,
                                      np.bincount(cells_p, minlength=nb) / n, spec)

    # loss class {x -> l(h(x), h'(x))}: for thresholds, disagreement indicators
    pair_p = (preds[:, None, prot] != preds[None, :, prot]).reshape(-1, n).astype(np.float64)
    pair_u = (preds[:, None, ~prot] != preds[None, :, ~prot]).reshape(-1, m).astype(np.float64)
    rad_u = rademacher_complexity(pair_u, trials, seed)
    rad_p = rademacher_complexity(pair_p, trials, seed + 1)
    L = float(spec.lipschitz)
    conf_u = 2.0 * math.sqrt(math.log(1.0 / confidence_delta) / (2.0 * m))
    conf_p = 2.0 * math.sqrt(math.log(1.0 / confidence_delta) / (2.0 * n))
    rhs = (div_term + risk_u_star + risk_p_star + 4.0 * rad_u.value
           + 2.0 * (L + 1.0) * rad_p.value + conf_u + conf_p)

    # D^f_{h,H}(U || P) with f* clipped into its domain for the 0/1 loss
    low, high, _ = spec.domain
    hq = preds[h_idx]
    disc = 0.0
    for row in preds:
        lu = (hq[~prot] != row[~prot]).astype(float)
        lp = np.clip((hq[prot] != row[prot]).astype(float), low, high)
        disc = max(disc, abs(float(lu.mean() - spec.f_star(lp).mean())))

    lower = None
    if witness_family:
        lower = empirical_f_divergence(s[~prot, None], s[prot, None], spec, witness_family)

    return AuditReport(
        divergence=spec.name, confidence_delta=confidence_delta, n_protected=n, n_unprotected=m,
        hypothesis_count=len(thresholds), threshold=float(detector_threshold),
        risk_p=risk_p, risk_u=risk_u, lhs=lhs, divergence_term=float(div_term),
        risk_u_star=risk_u_star, risk_p_star=risk_p_star,
        rademacher_u=rad_u.value, rademacher_u_stderr=rad_u.stderr,
        rademacher_p=rad_p.value, rademacher_p_stderr=rad_p.stderr, lipschitz=L,
        rademacher_term_u=4.0 * rad_u.value, rademacher_term_p=2.0 * (L + 1.0) * rad_p.value,
        confidence_term_u=conf_u, confidence_term_p=conf_p, rhs=float(rhs),
        holds=lhs <= rhs + SLACK, hypothesis_discrepancy=disc, variational_lower_bound=lower,
    )
