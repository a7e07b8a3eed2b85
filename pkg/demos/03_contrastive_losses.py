"""The fairness-aware contrastive loss next to SimCLR on hand-sized inputs."""

import math

import numpy as np

from fairad.losses import GroupBatch, cosine_sim_exp, loss_fac, loss_simclr

print("sim(e1, e1) = %.6f" % cosine_sim_exp([1, 0], [1, 0]))
print("sim(e1, e2) = %.6f" % cosine_sim_exp([1, 0], [0, 1]))

# every representation equal: cross-group term -1, uniformity 1 + ln 2
same = np.tile([0.6, 0.8], (3, 1))
print("identical   (fair, unif, fac):", np.round(loss_fac(GroupBatch(z_p=same, z_u=same)), 6), "ln2 =", round(math.log(2), 6))

# both groups = {e1, e2}
basis = np.eye(2)
print("unit basis  (fair, unif, fac):", np.round(loss_fac(GroupBatch(z_p=basis, z_u=basis)), 6))

# separated groups are penalised by the cross-group term
far_p = np.array([[1.0, 0.0], [0.9, 0.1]])
far_u = np.array([[-1.0, 0.0], [-0.9, -0.1]])
print("separated   (fair, unif, fac):", np.round(loss_fac(GroupBatch(z_p=far_p, z_u=far_u)), 6))

# scale does not matter, only directions
print("rescaled rows, same value:", np.isclose(loss_fac(GroupBatch(z_p=3 * far_p, z_u=0.2 * far_u))[2],
                                               loss_fac(GroupBatch(z_p=far_p, z_u=far_u))[2]))

# SimCLR with identity augmentation on two identical rows: 2 ln 2
print("SimCLR two identical rows: %.6f" % loss_simclr(np.array([[1.0, 0.0], [1.0, 0.0]])))
