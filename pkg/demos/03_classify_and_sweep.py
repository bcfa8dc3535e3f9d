"""
Classifying long-run behaviour
==============================

Three scenarios, one per outcome, then a sweep over the conversion rate c2
that walks from predator extinction into coexistence.
"""

from regime_predprey import Scenario, Settings, classify, coexistence_mean_bound

BASE = dict(a1=1.0, b1=1.0, c1=1.0, a2=0.5, b2=1.0, c2=1.0,
            m1=1.0, m2=1.0, m3=1.0, alpha=0.5, beta=0.5)
SYMMETRIC = [[-1.0, 1.0], [1.0, -1.0]]


def two_regimes(first, second):
    return Scenario.from_dict({"regimes": [dict(BASE, **first), dict(BASE, **second)],
                               "generator": SYMMETRIC, "x0": 1.0, "y0": 1.0})


# a short horizon keeps the demo quick; the defaults use 1e4
settings = Settings(horizon=2000.0)

cases = {
    "noisy prey": two_regimes(dict(a1=0.5, alpha=1.2), dict(a1=0.5, alpha=1.2)),
    "weak predator": two_regimes(dict(a1=1.0, c2=0.2), dict(a1=0.2, alpha=1.0, c2=0.2)),
    "strong predator": two_regimes(dict(a1=2.0, c2=3.0), dict(a1=0.5, alpha=1.0, c2=3.0)),
}
for name, s in cases.items():
    rep = classify(s, settings)
    lam = "-" if rep.lambda_ is None else f"{rep.lambda_.value:+.3f}"
    print(f"{name:16s} T1={rep.T1:+.3f} T2={rep.T2:+.3f} lambda={lam:>7s} -> {rep.outcome}")

# %%
# Raising c2 pushes lambda up monotonically.
for c2 in (0.5, 1.0, 1.5, 2.0, 3.0):
    s = two_regimes(dict(a1=2.0, c2=c2), dict(a1=0.5, alpha=1.0, c2=c2))
    rep = classify(s, settings)
    line = f"c2={c2:<4} lambda={rep.lambda_.value:+.3f} +/- {rep.lambda_.half_width:.3f}"
    if rep.lambda_bar is not None:
        floor = coexistence_mean_bound(s) * rep.lambda_bar.value
        line += f"  lambda_bar={rep.lambda_bar.value:+.3f}  mean-predator floor={floor:.3f}"
    print(line, "->", rep.outcome)
