"""
Moment bounds for the logistic envelopes
========================================

An ensemble of envelope paths started far above equilibrium. The second
moment decays towards the large-time bound and stays under the finite-time one.
"""

import numpy as np

from regime_predprey import (GridSpec, Scenario, ensemble_moment, finite_moment_bound,
                             moment_bound, simulate_auxiliary)

s = Scenario.from_dict({
    "regimes": [dict(a1=1.0, b1=1.0, c1=1.0, a2=0.5, b2=1.0, c2=2.0,
                     m1=1.0, m2=1.0, m3=1.0, alpha=1.0, beta=0.5)],
    "generator": [[0.0]], "x0": 4.0, "y0": 4.0,
})
p = 2.0
grid = GridSpec(dt=1e-3, horizon=20.0, record_stride=100)
record_times = np.arange(grid.n_records) * grid.record_stride * grid.dt

for which in ("phi", "psi"):
    logs = np.stack([simulate_auxiliary(s, which, grid, seed=0, path_id=r).log_values
                     for r in range(200)])
    print(f"{which}: large-time bound {moment_bound(s, which, p):.4f}")
    for t in (0.5, 2.0, 5.0, 20.0):
        k = int(np.argmin(np.abs(record_times - t)))
        est, se = ensemble_moment(logs[:, k], p)
        print(f"  t={t:<5} E^p={est:.4f} (se {se:.4f})  "
              f"finite-time bound {finite_moment_bound(s, which, p, t):.4f}")
