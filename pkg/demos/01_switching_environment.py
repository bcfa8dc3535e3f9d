"""
A switching environment
=======================

Two environments alternate at random. We sample the regime path, compare the
time spent in each regime with the stationary law, and show how the prey
growth threshold averages the per-regime values.
"""

import numpy as np

from regime_predprey import (RegimeParameterSet, Scenario, occupation_fractions,
                             sample_switching_path, stationary_law, threshold_T1)

# leave "good" slowly (rate 0.5) and "bad" quickly (rate 2)
q = np.array([[-0.5, 0.5],
              [2.0, -2.0]])
law = stationary_law(q)
print("stationary law:", law.mu)

path = sample_switching_path(q, 0, 5000.0, np.random.default_rng(1))
print("jumps:", path.jump_times.size)
print("occupation:", occupation_fractions(path, 2))

# prey thrives in the good regime and declines in the bad one
good = RegimeParameterSet(a1=1.0, b1=1.0, c1=1.0, a2=0.5, b2=1.0, c2=1.0,
                          m1=1.0, m2=1.0, m3=1.0, alpha=0.4, beta=0.5)
bad = RegimeParameterSet(**dict(good.to_dict(), a1=0.1, alpha=1.0))
s = Scenario((good, bad), q, x0=1.0, y0=1.0)

for name, r in (("good", good), ("bad", bad)):
    print(f"{name}: a1 - alpha^2/2 = {r.a1 - r.alpha ** 2 / 2:+.3f}")
print(f"T1 = {threshold_T1(s):+.4f}")
