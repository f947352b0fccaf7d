"""
Learning with a revealing action
================================

In ``revealing_action(K)`` arm 1 shows every loss and the other arms show
nothing, not even their own.  The only way to learn is to pay for arm 1.
The weak-graph policy mixes a share ``gamma_t`` of its play onto the
dominating set ``D = {1}`` and shrinks that share as the loss estimates
settle.

Run with ``python3 demos/03_revealing_action.py`` (about half a minute).
"""

# %%
# An expensive revealing arm
# --------------------------
#
# Arm 1 has mean loss 0.8 and arm 2 is best at 0.2.  Every round spent on
# arm 1 costs 0.6 in regret.

import numpy as np

from bobw_graphs.config import load_config
from bobw_graphs.harness import pseudo_regret, run_episode

doc = {
    "graph": "revealing_action:5",
    "policy": {"name": "weak", "multiplier": 0.01},
    "environment": {"type": "stochastic", "means": [0.8, 0.2, 0.5, 0.5, 0.5]},
    "run": {"T": 50_000, "seeds": [0]},
}
cfg = load_config(doc)
tr = run_episode(cfg, seed=0)

print("t        gamma_t   q_t(2)   share of plays on arm 1 so far")
for t in (10, 100, 1_000, 10_000, 50_000):
    share = np.mean(tr.arms[:t] == 1)
    print(f"{t:<8d} {tr.gamma[t - 1]:.4f}    {tr.q[t - 1, 1]:.3f}    {share:.3f}")

# %%
# Growth of regret
# ----------------
#
# Exploration on a weakly observable graph costs more than on a strongly
# observable one, but on a stochastic instance the policy still commits.

for T in (5_000, 20_000, 50_000):
    c = load_config({**doc, "run": {"T": T, "seeds": [0, 1, 2]}})
    regrets = [pseudo_regret(run_episode(c, s), c.environment) for s in c.seeds]
    print(f"T={T:6d}  mean pseudo-regret over 3 seeds: {np.mean(regrets):7.1f}")
