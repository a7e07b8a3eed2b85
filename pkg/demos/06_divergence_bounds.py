"""Divergences, the variational lower bound, the TV bound and a risk audit."""

import numpy as np

from fairad import theory as T

# catalogue: generator at 1 and a conjugate value inside every domain
for name in T.DIVERGENCES:
    spec = T.divergence_table(name)
    print(f"{spec.name:>12}: f(1) = {float(spec.f(1.0)):+.1f}  f*(-0.5) = {float(spec.f_star(-0.5)):+.4f}  L = {spec.lipschitz}")

# empirical distributions over 4 atoms
rng = np.random.default_rng(0)
p = rng.choice(4, 300, p=[0.4, 0.3, 0.2, 0.1])
q = rng.choice(4, 300, p=[0.1, 0.2, 0.3, 0.4])
p_hat, q_hat = np.bincount(p, minlength=4) / 300, np.bincount(q, minlength=4) / 300
witnesses = [T.table_witness(rng.uniform(-0.5, 0.5, 4)) for _ in range(50)]
witnesses.append(T.table_witness(np.where(p_hat > q_hat, 0.5, -0.5), "sign witness"))
print("TV exact %.4f, variational estimate %.4f, cell TV %.4f" % (
    T.exact_f_divergence(p_hat, q_hat, "tv"), T.empirical_f_divergence(p, q, "tv", witnesses),
    T.empirical_tv(p, q)))

# delta/sigma bound on two clouds of representations
z_u = rng.normal(size=(60, 3)) + [2, 0, 0]
z_p = rng.normal(size=(15, 3)) + [1, 1, 0]
rep = T.tv_bound_check(z_p, z_u)
print("TV %.3f <= %.3f  (|X| = %d, delta = %.2e, sigma = %.2f, c_U = %.3f, c_P = %.3f)" % (
    rep.tv_hat, rep.bound_rhs, rep.cardinality, rep.delta, rep.sigma, rep.c_u, rep.c_p))
print("sigma %.2f vs cross-group distance sum %.2f" % (rep.sigma, rep.surrogate_fair))

# Rademacher complexity of two constants: exact vs Monte Carlo
fam = np.array([[0.5] * 10, [-0.5] * 10])
exact = T.rademacher_complexity(fam)
mc = T.rademacher_complexity(fam, method="mc", trials=20_000)
print("Rademacher exact %.5f, MC %.5f +/- %.5f" % (exact.value, mc.value, mc.stderr))

# risk-difference audit for a thresholded score
prot = np.r_[np.zeros(200, bool), np.ones(50, bool)]
labels = (rng.random(250) < 0.1).astype(int)
scores = rng.normal(size=250) + 2 * labels + 0.4 * prot
audit = T.fairness_bound_audit(scores, labels, prot)
for key in ("lhs", "divergence_term", "risk_u_star", "risk_p_star", "rademacher_term_u",
            "rademacher_term_p", "confidence_term_u", "confidence_term_p", "rhs", "holds"):
    print(f"  {key:>18}: {getattr(audit, key)}")
