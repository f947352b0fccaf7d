"""
One policy, two regimes
=======================

The same strongly observable policy runs on a stochastic bandit and on an
adversarial schedule without being told which one it faces.  On the
stochastic instance the non-optimal mass ``Q(i*)`` stops growing and regret
flattens.  On the adversarial one the distribution follows the leader in
cumulative loss, which changes whenever the cheap arm rotates.

Run with ``python3 demos/02_strong_policy_two_regimes.py`` (about half a minute).
"""

# %%
# Setup
# -----
#
# ``multiplier`` scales the recommended constants; 0.01 puts c1 at its floor,
# which suits horizons of this size.

import numpy as np

from bobw_graphs.config import load_config
from bobw_graphs.harness import best_fixed_arm, q_quantity, realized_regret, regret_curve, run_episode

T = 20_000
base = {
    "graph": "bandit:5",
    "policy": {"name": "strong", "multiplier": 0.01},
    "run": {"T": T, "seeds": [0]},
}
stochastic = load_config({**base, "environment": {"type": "stochastic", "means": [0.3, 0.5, 0.5, 0.5, 0.5]}})
adversarial = load_config(
    {**base, "environment": {"type": "adversarial", "schedule": "alternating_blocks", "k": 5, "period": 2000}}
)

# %%
# Stochastic losses
# -----------------

tr = run_episode(stochastic, seed=0)
curve = regret_curve(tr, stochastic.environment)
print("stochastic bandit(5), gap 0.2")
for t in (100, 1_000, 5_000, 10_000, 20_000):
    q_star = tr.q[t - 1, 0]
    print(f"  t={t:6d}  regret={curve[t - 1]:7.1f}  q_t(i*)={q_star:.3f}  beta={tr.beta[t - 1]:7.1f}  gamma={tr.gamma[t - 1]:.4f}")
print(f"  Q(i*) = {q_quantity(tr, 1)[0]:.1f}")

# %%
# Adversarial losses
# ------------------
#
# A different arm is free in each block of 2000 rounds.  Regret is measured
# against the best fixed arm in hindsight.

tr = run_episode(adversarial, seed=0)
i_star = best_fixed_arm(tr, adversarial.environment)
print("\nalternating blocks, period 2000")
cumulative = np.cumsum(adversarial.environment.stream(0).matrix(T), axis=0)
for t in (1_000, 3_000, 5_000, 7_000, 10_000, 20_000):
    leader = int(np.argmin(cumulative[t - 2])) + 1
    favourite = int(np.argmax(tr.q[t - 1])) + 1
    print(f"  t={t:6d}  cumulative leader={leader}  argmax q_t={favourite}  H(q_t)={tr.entropy[t - 1]:.3f}")
print(f"  realized regret vs arm {i_star}: {realized_regret(tr, adversarial.environment):.1f}")
