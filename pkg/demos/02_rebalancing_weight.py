"""How the group re-balancing weight reacts to which group is fitted."""

import numpy as np

from fairad.losses import GroupBatch, epsilon_weight, unfitted_loss

rng = np.random.default_rng(0)
x_u = rng.normal(size=(80, 4))
x_p = rng.normal(size=(20, 4)) + 1.0

def weight(noise_u, noise_p, estimator="loss1"):
    batch = GroupBatch(x_u=x_u, x_p=x_p,
                       recon_u=x_u + noise_u * rng.normal(size=x_u.shape),
                       recon_p=x_p + noise_p * rng.normal(size=x_p.shape))
    return epsilon_weight(batch, estimator)

# both groups fitted about equally well
print("equal fit      eps = %.3f" % weight(0.1, 0.1))
# protected rows poorly reconstructed: gain on P shrinks, weight moves toward U's share
print("P fitted badly eps = %.3f" % weight(0.1, 0.9))
print("U fitted badly eps = %.3f" % weight(0.9, 0.1))

# the four unfitted-loss estimators on the same reconstructions
recon = x_p + 0.2 * rng.normal(size=x_p.shape)
for est in ("loss1", "loss2", "loss3", "loss4"):
    print(est, "unfitted protected loss: %.1f" % unfitted_loss(x_p, recon, est))

# weight over training (recomputed each epoch from the full data)
from fairad.data import SyntheticSpec, generate_synthetic, standardize
from fairad.nn import build_autoencoder
from fairad.training import Trainer, TrainSettings

ds = standardize(generate_synthetic(SyntheticSpec(d=8, n=100, m=400, latent_dim=3, noise_std=0.1, seed=2)))
hist = Trainer(build_autoencoder(8, [3], seed=2), ds.training_view(),
               TrainSettings("fairad", epochs=60, learning_rate=0.01), np.random.default_rng(2)).fit()
print("eps by epoch:", np.round([h.epsilon for h in hist[::10]], 3))
