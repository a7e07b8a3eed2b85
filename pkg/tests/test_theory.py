import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairad import theory as T
from fairad.errors import DegenerateDataError, DomainError, InsufficientGroupError, UnknownDivergenceError

NAMES = T.DIVERGENCES


# -- catalogue ---------------------------------------------------------------


def test_kl_conjugate_at_one():
    assert T.divergence_table("KL").f_star(1.0) == 1.0


@pytest.mark.parametrize("name", NAMES)
def test_generator_vanishes_at_one_and_is_convex(name):
    spec = T.divergence_table(name)
    assert float(spec.f(1.0)) == pytest.approx(0.0, abs=1e-15)
    x = np.linspace(0.05, 6.0, 400)
    fx = spec.f(x)
    assert np.all(fx[:-2] - 2 * fx[1:-1] + fx[2:] >= -1e-9)


@pytest.mark.parametrize("name", NAMES)
def test_conjugate_is_fenchel_dual_on_a_grid(name):
    # f*(t) = sup_x (x t - f(x)); check against a dense grid on x > 0
    spec = T.divergence_table(name)
    xs = np.concatenate([np.linspace(1e-6, 1, 20001), np.linspace(1, 60, 200001)])
    fx = spec.f(xs)
    for t in (-0.4, -0.1, 0.0, 0.2, 0.45):
        if not spec.in_domain(t):
            continue
        grid = float(np.max(xs * t - fx))
        assert grid <= spec.f_star(t) + 1e-9
        assert grid == pytest.approx(float(spec.f_star(t)), abs=2e-3)


def test_tv_conjugate_domain():
    spec = T.divergence_table("tv")
    assert spec.f_star(0.5) == 0.5 and spec.f_star(-0.5) == -0.5
    with pytest.raises(DomainError):
        spec.f_star(0.6)


def test_other_domains():
    with pytest.raises(DomainError):
        T.divergence_table("reverse_kl").f_star(0.0)
    with pytest.raises(DomainError):
        T.divergence_table("js").f_star(math.log(2))


def test_unknown_name():
    with pytest.raises(UnknownDivergenceError):
        T.divergence_table("hellinger")
    with pytest.raises(KeyError):
        T.divergence_table("hellinger")
    assert T.divergence_table("Pearson").name == "PearsonChi2"


def test_lipschitz_constants():
    assert {n: T.divergence_table(n).lipschitz for n in NAMES} == {
        "kl": 1.0, "reverse_kl": None, "js": None, "pearson_chi2": 1.5, "tv": 1.0}


def test_exact_divergences_on_known_pairs():
    p, q = np.array([0.5, 0.5]), np.array([0.25, 0.75])
    assert T.exact_f_divergence(p, q, "kl") == pytest.approx(0.5 * math.log(2) + 0.5 * math.log(2 / 3))
    assert T.exact_f_divergence(p, q, "tv") == pytest.approx(0.25)
    assert T.exact_f_divergence(p, q, "pearson_chi2") == pytest.approx(0.25**2 / 0.25 + 0.25**2 / 0.75)
    assert T.exact_f_divergence([1, 0], [0, 1], "tv") == pytest.approx(1.0)
    # this generator gives twice the classical Jensen-Shannon value, so at most ln 4
    assert T.exact_f_divergence([1, 0], [0, 1], "js") == pytest.approx(math.log(4))
    assert T.exact_f_divergence([1, 0], [0.5, 0.5], "kl") == pytest.approx(math.log(2))
    assert math.isinf(T.exact_f_divergence([1, 0], [0, 1], "kl"))


# -- variational bound -------------------------------------------------------


def test_identical_samples_are_non_positive_and_tv_zero_witness_hits_zero():
    s = np.array([0, 1, 1, 2])
    ws = [T.table_witness([0.3, -0.2, 0.1]), T.constant_witness(0.0)]
    for name in NAMES:
        spec = T.divergence_table(name)
        usable = [w for w in ws if np.all(spec.in_domain(w(s)))] or [T.constant_witness(-1.0)]
        assert T.empirical_f_divergence(s, s, spec, usable) <= 1e-9
    assert T.empirical_f_divergence(s, s, "tv", [T.constant_witness(0.0)]) == 0.0


def test_tv_indicator_witnesses_on_disjoint_supports_reach_one():
    p, q = np.array([0, 0, 0]), np.array([1, 1])
    ws = [T.table_witness([0.5, -0.5]), T.table_witness([-0.5, 0.5])]
    assert T.empirical_f_divergence(p, q, "tv", ws) == pytest.approx(1.0)


def test_witness_outside_domain_is_named():
    with pytest.raises(DomainError, match="spike"):
        T.empirical_f_divergence(np.array([0]), np.array([0]), "tv", [T.Witness("spike", lambda s: s + 3.0)])


def test_empty_samples_rejected():
    with pytest.raises(DegenerateDataError):
        T.empirical_f_divergence(np.array([]), np.array([1]), "kl", [T.constant_witness(0)])


@given(st.integers(0, 10_000))
@settings(max_examples=30, deadline=None)
def test_enlarging_witness_family_never_decreases(seed):
    rng = np.random.default_rng(seed)
    p, q = rng.integers(0, 4, 20), rng.integers(0, 4, 15)
    ws = [T.table_witness(rng.uniform(-0.5, 0.5, 4)) for _ in range(6)]
    values = [T.empirical_f_divergence(p, q, "tv", ws[: i + 1]) for i in range(6)]
    assert all(b >= a for a, b in zip(values, values[1:]))


def _random_witnesses(rng, spec, atoms, count=12):
    low, high, _ = spec.domain
    lo, hi = max(low, -3.0), min(high, 3.0)
    pad = 1e-3 if not spec.domain[2] else 0.0
    return [T.table_witness(rng.uniform(lo + pad, hi - pad, atoms)) for _ in range(count)]


def _optimal_witness(spec, p_hat, q_hat):
    # T* = f'(p/q) on atoms where both are positive, clipped into the domain
    ratio = np.where(q_hat > 0, p_hat / np.where(q_hat > 0, q_hat, 1), 50.0)
    ratio = np.clip(ratio, 1e-6, 50.0)
    h = 1e-6
    slope = (spec.f(ratio + h) - spec.f(ratio - np.minimum(h, ratio / 2))) / (h + np.minimum(h, ratio / 2))
    low, high, closed = spec.domain
    eps = 0.0 if closed else 1e-6
    return T.table_witness(np.clip(slope, max(low, -50) + eps, min(high, 50) - eps), "near-optimal")


@pytest.mark.parametrize("name", NAMES)
@given(seed=st.integers(0, 100_000))
@settings(max_examples=25, deadline=None)
def test_variational_estimate_never_exceeds_exact_divergence(name, seed):
    spec = T.divergence_table(name)
    rng = np.random.default_rng(seed)
    atoms = int(rng.integers(2, 9))
    p_samples = rng.integers(0, atoms, int(rng.integers(3, 40)))
    q_samples = rng.integers(0, atoms, int(rng.integers(3, 40)))
    p_hat = np.bincount(p_samples, minlength=atoms) / p_samples.size
    q_hat = np.bincount(q_samples, minlength=atoms) / q_samples.size
    ws = _random_witnesses(rng, spec, atoms) + [_optimal_witness(spec, p_hat, q_hat)]
    est = T.empirical_f_divergence(p_samples, q_samples, spec, ws)
    assert est <= T.exact_f_divergence(p_hat, q_hat, spec) + 1e-9


def test_threshold_witness_grid_is_usable_for_tv():
    rng = np.random.default_rng(0)
    p, q = rng.normal(0, 1, (40, 3)), rng.normal(1.5, 1, (40, 3))
    ws = T.threshold_witness_grid(np.vstack([p, q]), seed=1)
    assert len(ws) == 4 * 8 * 2
    assert 0.3 < T.empirical_f_divergence(p, q, "tv", ws) <= 1.0


# -- hypothesis discrepancy ---------------------------------------------------


def _threshold_family(values):
    return [(lambda t: (lambda s: (np.asarray(s) >= t).astype(int)))(t) for t in values]


@given(st.integers(0, 100_000))
@settings(max_examples=40, deadline=None)
def test_signed_discrepancy_is_dominated_by_exact_divergence(seed):
    rng = np.random.default_rng(seed)
    atoms = int(rng.integers(2, 8))
    p_s, q_s = rng.integers(0, atoms, 30), rng.integers(0, atoms, 25)
    p_hat = np.bincount(p_s, minlength=atoms) / 30
    q_hat = np.bincount(q_s, minlength=atoms) / 25
    fam = _threshold_family(range(atoms + 1))
    for name in ("kl", "pearson_chi2"):
        d = T.hypothesis_discrepancy(p_s, q_s, name, fam[0], fam, signed=True)
        assert d <= T.exact_f_divergence(p_hat, q_hat, name) + 1e-9
    half = lambda a, b: 0.5 * T.zero_one_loss(a, b)
    for h in fam:
        d = T.hypothesis_discrepancy(p_s, q_s, "tv", h, fam, loss=half)
        assert d <= T.exact_f_divergence(p_hat, q_hat, "tv") + 1e-9


def test_absolute_discrepancy_can_exceed_kl_when_distributions_match():
    # with P = Q, the loss-0 hypothesis gives |0 - f*(0)| = exp(-1) > 0 = KL
    s = np.array([0, 1, 2, 3])
    fam = _threshold_family([1])
    d = T.hypothesis_discrepancy(s, s, "kl", fam[0], fam)
    assert d == pytest.approx(math.exp(-1))
    assert T.exact_f_divergence(np.full(4, 0.25), np.full(4, 0.25), "kl") == 0.0


def test_zero_one_loss_is_a_metric_on_binary_outputs():
    for a, b, c in itertools.product((0, 1), repeat=3):
        l = lambda u, v: float(T.zero_one_loss(u, v))
        assert l(a, a) == 0 and l(a, b) == l(b, a) and l(a, c) <= l(a, b) + l(b, c)


# -- total variation ----------------------------------------------------------


def test_tv_examples():
    assert T.empirical_tv(np.array([1, 2, 2]), np.array([2, 1, 2])) == 0.0
    assert T.empirical_tv(np.array([0, 0]), np.array([1, 1, 1])) == 1.0
    assert T.empirical_tv(np.array(["a", "a", "b"]), np.array(["a", "b", "b"])) == pytest.approx(1 / 3)
    with pytest.raises(DegenerateDataError):
        T.empirical_tv(np.array([]), np.array([1]))


def test_tv_with_binning_and_row_keys():
    bins = T.edge_binning([0.0, 1.0])
    assert T.empirical_tv(np.array([-1.0, 0.5]), np.array([0.2, 0.7]), bins) == pytest.approx(0.5)
    rows = np.array([[0, 1], [0, 1]])
    assert T.empirical_tv(rows, np.array([[0, 1], [1, 0]])) == pytest.approx(0.5)


# -- surrogates and the delta/sigma bound -------------------------------------


def test_surrogate_examples():
    z = np.tile([1.0, 2.0], (3, 1))
    assert T.surrogate_losses(z, z) == (0.0, -0.0)
    e1, e2 = np.array([[1.0, 0.0]]), np.array([[0.0, 1.0]])
    fair, _ = T.surrogate_losses(np.vstack([e2, e2]), np.vstack([e1, e1]))
    assert fair == pytest.approx(4 * math.sqrt(2))
    with pytest.raises(InsufficientGroupError):
        T.surrogate_losses(e2, np.vstack([e1, e1]))


def test_surrogates_match_brute_force():
    rng = np.random.default_rng(5)
    zp, zu = rng.normal(size=(3, 4)), rng.normal(size=(3, 4))
    dist = lambda a, b: math.sqrt(sum((x - y) ** 2 for x, y in zip(a, b)))
    fair = sum(dist(u, p) for u in zu for p in zp)
    unif = -(sum(dist(zu[i], zu[j]) for i in range(3) for j in range(3) if i != j)
             + sum(dist(zp[i], zp[j]) for i in range(3) for j in range(3) if i != j))
    got = T.surrogate_losses(zp, zu)
    assert got[0] == pytest.approx(fair, abs=1e-12) and got[1] == pytest.approx(unif, abs=1e-12)


def test_tv_bound_collapsed_support():
    z = np.tile([0.0, 3.0], (4, 1))
    rep = T.tv_bound_check(z, z)
    assert rep.sigma == 0.0 and rep.cardinality == 1
    assert rep.bound_rhs == pytest.approx(0.5 * rep.cardinality * rep.delta)
    assert rep.tv_hat == 0.0 and rep.holds


def test_tv_bound_two_disjoint_clusters():
    rng = np.random.default_rng(0)
    zu = np.array([1.0, 0.0, 0.0]) + 0.01 * rng.normal(size=(20, 3))
    zp = np.array([0.0, 1.0, 0.0]) + 0.01 * rng.normal(size=(8, 3))
    rep = T.tv_bound_check(zp, zu)
    assert rep.tv_hat > 0.95
    assert rep.bound_rhs >= rep.tv_hat and rep.holds


def test_tv_bound_rejects_zero_rows():
    from fairad.errors import DegenerateVectorError

    with pytest.raises(DegenerateVectorError):
        T.tv_bound_check(np.zeros((2, 2)), np.ones((2, 2)))


def test_log_sigma_form():
    rng = np.random.default_rng(1)
    zu = np.abs(rng.normal(size=(6, 3))) + 0.1
    zp = np.abs(rng.normal(size=(4, 3))) + 0.1
    euclid = T.tv_bound_check(zp, zu)
    logged = T.tv_bound_check(zp, zu, sigma_form="log")
    assert logged.sigma >= euclid.sigma  # -log c >= 1 - c
    with pytest.raises(DomainError):
        T.tv_bound_check(np.array([[1.0, 0.0], [0.9, 0.1]]), np.array([[-1.0, 0.0], [-1.0, 0.1]]), sigma_form="log")
    with pytest.raises(ValueError):
        T.tv_bound_check(zp, zu, sigma_form="cosine")


@given(st.integers(0, 100_000))
@settings(max_examples=50, deadline=None)
def test_tv_bound_holds_on_random_configurations(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 5))
    zu = rng.normal(size=(int(rng.integers(2, 12)), d))
    zp = rng.normal(size=(int(rng.integers(2, 8)), d)) + rng.normal(size=d)
    rep = T.tv_bound_check(zp, zu, bandwidth=float(rng.uniform(0.05, 1.0)))
    assert rep.tv_hat <= rep.bound_rhs + 1e-9


@given(st.integers(0, 100_000))
@settings(max_examples=50, deadline=None)
def test_sigma_below_fair_surrogate_on_random_configurations(seed):
    rng = np.random.default_rng(seed)
    zu = rng.normal(size=(int(rng.integers(3, 12)), 3))
    zp = rng.normal(size=(int(rng.integers(3, 8)), 3))
    rep = T.tv_bound_check(zp, zu)
    assert rep.sigma_le_surrogate


def test_sigma_can_exceed_fair_surrogate_when_the_matched_point_is_isolated():
    # the only protected point sits on an unprotected one; the best-matched
    # support point is elsewhere, so sigma counts distances L'_fair never sees
    zu = np.array([[-1.0, 0.0], [0.0, -1.0], [0.0, 1.0], [0.6, -0.8]])
    zp = np.array([[-1.0, 0.0]])
    rep = T.tv_bound_check(zp, zu)
    fair = sum(np.linalg.norm(u - p) for u in zu for p in zp)
    assert rep.sigma > fair + 0.5
    assert rep.holds  # the TV bound itself is unaffected


# -- Rademacher ---------------------------------------------------------------


def test_rademacher_zero_family():
    assert T.empirical_rademacher(np.zeros((1, 7))) == 0.0
    assert T.empirical_rademacher(np.zeros((1, 30)), trials=50) == 0.0


@pytest.mark.parametrize("n", [1, 2, 5, 9, 12])
def test_two_constant_family_matches_closed_form(n):
    c = 0.7
    fam = np.array([[c] * n, [-c] * n])
    expected = c * np.mean([abs(sum(s)) / n for s in itertools.product((-1, 1), repeat=n)])
    assert T.rademacher_complexity(fam).value == pytest.approx(expected, abs=1e-12)
    mc = T.rademacher_complexity(fam, method="mc", trials=20_000, seed=n)
    assert abs(mc.value - expected) <= 3 * mc.stderr + 1e-12


def test_rademacher_monotone_in_family():
    rng = np.random.default_rng(2)
    fam = rng.uniform(-1, 1, (6, 10))
    vals = [T.empirical_rademacher(fam[: i + 1]) for i in range(6)]
    assert all(b >= a - 1e-15 for a, b in zip(vals, vals[1:]))


def test_rademacher_errors():
    with pytest.raises(LookupError):
        T.empirical_rademacher(np.zeros((0, 3)))
    with pytest.raises(ValueError):
        T.empirical_rademacher(np.zeros((1, 3)), trials=0)


# -- audit ---------------------------------------------------------------------


def _synthetic_scores(seed, n=50, m=200, shift=0.5):
    rng = np.random.default_rng(seed)
    prot = np.r_[np.zeros(m, bool), np.ones(n, bool)]
    labels = (rng.random(n + m) < 0.1).astype(int)
    labels[0] = labels[-1] = 1
    scores = rng.normal(size=n + m) + 2.0 * labels + shift * prot
    return scores, labels, prot


@pytest.mark.parametrize("seed", range(5))
def test_audit_inequality_on_imbalanced_synthetic_case(seed):
    s, y, g = _synthetic_scores(seed)
    rep = T.fairness_bound_audit(s, y, g, hypothesis_size=32, seed=seed)
    assert rep.hypothesis_count <= 32
    assert rep.lhs <= rep.rhs + 1e-9 and rep.holds


def test_audit_with_identical_groups_and_blind_detector():
    rng = np.random.default_rng(0)
    base = rng.normal(size=100)
    labels = (base > 1.0).astype(int)
    s = np.r_[base, base]
    y = np.r_[labels, labels]
    g = np.r_[np.zeros(100, bool), np.ones(100, bool)]
    rep = T.fairness_bound_audit(s, y, g)
    assert rep.lhs == pytest.approx(0.0, abs=1e-12) and rep.divergence_term == 0.0 and rep.holds


def test_smaller_confidence_delta_raises_rhs():
    s, y, g = _synthetic_scores(1)
    loose = T.fairness_bound_audit(s, y, g, confidence_delta=0.1)
    tight = T.fairness_bound_audit(s, y, g, confidence_delta=0.01)
    assert tight.rhs > loose.rhs
    assert tight.lhs == loose.lhs


def test_audit_report_is_json_and_names_every_term():
    jsonschema = pytest.importorskip("jsonschema")
    s, y, g = _synthetic_scores(2)
    rep = T.fairness_bound_audit(s, y, g, witness_family=T.threshold_witness_grid(s[:, None]))
    payload = json.loads(json.dumps(rep.to_dict()))
    jsonschema.validate(payload, T.AUDIT_JSON_SCHEMA)
    terms = ("divergence_term", "risk_u_star", "risk_p_star", "rademacher_term_u", "rademacher_term_p",
             "confidence_term_u", "confidence_term_p")
    assert payload["rhs"] == pytest.approx(sum(payload[t] for t in terms))
    assert payload["variational_lower_bound"] <= payload["divergence_term"] + 1e-9


@pytest.mark.parametrize("name", ["kl", "pearson_chi2"])
def test_audit_with_other_divergences(name):
    s, y, g = _synthetic_scores(3)
    assert T.fairness_bound_audit(s, y, g, spec=name).holds


def test_audit_needs_lipschitz_conjugate_and_valid_delta():
    s, y, g = _synthetic_scores(4)
    with pytest.raises(DomainError):
        T.fairness_bound_audit(s, y, g, spec="js")
    with pytest.raises(ValueError):
        T.fairness_bound_audit(s, y, g, confidence_delta=1.5)
