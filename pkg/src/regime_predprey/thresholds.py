"""Extinction/persistence thresholds and the regime classification."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .ctmc import StationaryLaw, stationary_law
from .ergodics import DEFAULT_BATCHES, TimeAverageEstimate, time_average
from .errors import ConditionViolated, HypothesisViolated
from .integrator import GridSpec, simulate_auxiliary
from .model import Scenario, parameter_extremes

EPS_BAND = 1e-9

BOTH_EXTINCT = "BothExtinct"
PREY_ONLY = "PreyOnlyPersistence"
COEXISTENCE = "Coexistence"
UNCOVERED = "Uncovered"
INCONCLUSIVE = "Inconclusive"
OUTCOMES = (BOTH_EXTINCT, PREY_ONLY, COEXISTENCE, UNCOVERED, INCONCLUSIVE)


@dataclass(frozen=True)
class Settings:
    """Simulation settings shared by the lambda and lambda-bar estimators."""

    horizon: float = 1e4
    dt: float = 1e-3
    burn_in_fraction: float = 0.1
    batches: int = DEFAULT_BATCHES
    replicas: int = 32
    seed: int = 0
    record_stride: int = 100

    def __post_init__(self):
        if not (self.dt > 0 and self.horizon > 0):
            raise ValueError("dt and horizon must be positive")
        if not 0 <= self.burn_in_fraction < 1:
            raise ValueError("burn_in_fraction must lie in [0, 1)")
        if self.replicas < 1:
            raise ValueError("replicas must be >= 1")

    @property
    def grid(self) -> GridSpec:
        return GridSpec(self.dt, self.horizon, self.record_stride)

    @property
    def burn_in(self) -> float:
        return self.burn_in_fraction * self.horizon

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class ThresholdReport:
    T1: float
    T2: float
    outcome: str
    mu: list
    lambda_: TimeAverageEstimate | None = None
    lambda_bar: TimeAverageEstimate | None = None
    diagnostics: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "T1": self.T1,
            "T2": self.T2,
            "mu": list(self.mu),
            "lambda": None if self.lambda_ is None else self.lambda_.to_dict(),
            "lambda_bar": None if self.lambda_bar is None else self.lambda_bar.to_dict(),
            "outcome": self.outcome,
            "diagnostics": list(self.diagnostics),
        }


def _mu(s: Scenario, mu) -> np.ndarray:
    if mu is None:
        return stationary_law(s.generator).mu
    return mu.mu if isinstance(mu, StationaryLaw) else np.asarray(mu, dtype=float)


def threshold_T1(s: Scenario, mu=None) -> float:
    """Stationary average of the prey's noise-corrected growth ``a1 - alpha^2/2``."""
    return float(np.dot(_mu(s, mu), s.coef("a1") - 0.5 * s.coef("alpha") ** 2))


def threshold_T2(s: Scenario, mu=None) -> float:
    """Stationary average of ``a2 + beta^2/2 - c2/m2``; negative means the
    predator's dominating process is recurrent."""
    return float(np.dot(_mu(s, mu),
                        s.coef("a2") + 0.5 * s.coef("beta") ** 2 - s.coef("c2") / s.coef("m2")))


def lambda_integrand(s: Scenario):
    a2, beta, c2, m1, m2 = (s.coef(k) for k in ("a2", "beta", "c2", "m1", "m2"))

    def f(x, i):
        return -a2[i] - 0.5 * beta[i] ** 2 + c2[i] * x / (m1[i] + m2[i] * x)
    return f


def estimate_lambda(s: Scenario, settings: Settings = Settings(), mu=None,
                    path_id: int = 0) -> TimeAverageEstimate:
    """Time average of the predator's growth rate along a long ``phi`` path."""
    t1 = threshold_T1(s, mu)
    if t1 <= 0:
        raise HypothesisViolated(f"T1 = {t1:.6g} <= 0: phi is not positive recurrent")
    path = simulate_auxiliary(s, "phi", settings.grid, settings.seed, path_id)
    return time_average(path, lambda_integrand(s), burn_in=settings.burn_in,
                        batches=settings.batches)


def estimate_lambda_bar(s: Scenario, lambda_est: TimeAverageEstimate,
                        settings: Settings = Settings(), mu=None,
                        path_id: int = 0) -> TimeAverageEstimate:
    """``lambda + T2 + <b2 psi>`` with the last term a time average on a
    ``psi`` path; half-widths are added."""
    mu = _mu(s, mu)
    t1, t2 = threshold_T1(s, mu), threshold_T2(s, mu)
    if not (t1 > 0 and t2 < 0):
        raise HypothesisViolated(f"need T1 > 0 and T2 < 0 (T1={t1:.6g}, T2={t2:.6g})")
    path = simulate_auxiliary(s, "psi", settings.grid, settings.seed, path_id)
    b2 = s.coef("b2")
    third = time_average(path, lambda y, i: b2[i] * y, burn_in=settings.burn_in,
                         batches=settings.batches)
    return TimeAverageEstimate(value=lambda_est.value + t2 + third.value,
                               half_width=lambda_est.half_width + third.half_width,
                               batches=settings.batches, burn_in=third.burn_in,
                               lower_bound_only=True)


def _exponent_rate(s: Scenario, which: str, p: float) -> tuple:
    ex = parameter_extremes(s)
    if which == "phi":
        k = ex.check["a1"] + 0.5 * (p - 1) * ex.check["alpha"] ** 2
        return k, ex.hat["b1"]
    if which == "psi":
        k = -ex.hat["a2"] + ex.check["c2"] / ex.hat["m2"] + 0.5 * (p - 1) * ex.check["beta"] ** 2
        return k, ex.hat["b2"]
    raise ValueError(f"which must be 'phi' or 'psi', not {which!r}")


def moment_bound(s: Scenario, which: str, p: float) -> float:
    """Large-time bound ``(b_min / K)^(-p)`` on the p-th moment of phi or psi."""
    if not p > 1:
        raise ValueError("p must exceed 1")
    k, b = _exponent_rate(s, which, p)
    if k <= 0:
        raise ConditionViolated(
            f"{which}: exponent rate {k:.6g} <= 0 for p={p}; bound needs "
            f"-min a2 + max c2 / min m2 + (p-1)/2 max beta^2 > 0")
    return (b / k) ** (-p)


def finite_moment_bound(s: Scenario, which: str, p: float, t: float) -> float:
    """Bound on ``E[phi_t^p]`` (or psi) valid at every ``t >= 0`` for a
    deterministic start."""
    if not p > 1:
        raise ValueError("p must exceed 1")
    k, b = _exponent_rate(s, which, p)
    start = s.x0 if which == "phi" else s.y0
    if t == 0:
        return start ** p
    # (1 - e^{-kt}) / k, continuous through k = 0
    growth = t if k == 0 else -math.expm1(-k * t) / k
    u = math.exp(-k * t) / start + b * growth
    return u ** (-p)


def classify(s: Scenario, settings: Settings = Settings(), eps_band: float = EPS_BAND,
             path_id: int = 0) -> ThresholdReport:
    """Run the decision table: T1 first, then lambda, then lambda-bar."""
    mu = stationary_law(s.generator).mu
    t1, t2 = threshold_T1(s, mu), threshold_T2(s, mu)
    rep = ThresholdReport(T1=t1, T2=t2, outcome=INCONCLUSIVE, mu=mu.tolist())
    notes = rep.diagnostics
    if t1 < -eps_band:
        rep.outcome = BOTH_EXTINCT
        notes.append("T1 < 0: prey and predator go extinct")
        return rep
    if abs(t1) <= eps_band:
        notes.append("|T1| within band: boundary case not covered")
        return rep
    lam = estimate_lambda(s, settings, mu, path_id)
    rep.lambda_ = lam
    if lam.high < 0:
        rep.outcome = PREY_ONLY
        notes.append("lambda CI below 0: predator extinct, prey persists")
        return rep
    if lam.low <= 0:
        notes.append("lambda CI straddles 0")
        return rep
    if abs(t2) <= eps_band:
        notes.append("|T2| within band: psi recurrence undecided")
        return rep
    if t2 > 0:
        rep.outcome = UNCOVERED
        notes.append("lambda > 0 but T2 > 0: no stationary law for psi")
        return rep
    lam_bar = estimate_lambda_bar(s, lam, settings, mu, path_id)
    rep.lambda_bar = lam_bar
    notes.append("lambda_bar third term is a time average of b2*psi (lower bound guaranteed)")
    if lam_bar.low > 0:
        rep.outcome = COEXISTENCE
        notes.append("lambda_bar CI above 0: both species persist")
    elif lam_bar.high <= 0:
        rep.outcome = UNCOVERED
        notes.append("lambda > 0 but lambda_bar <= 0: region not addressed")
    else:
        notes.append("lambda_bar CI straddles 0")
    return rep


def coexistence_mean_bound(s: Scenario) -> float:
    """Factor ``k`` with ``liminf (1/t) int Y ds >= k * lambda_bar``."""
    ex = parameter_extremes(s)
    h, c = ex.hat, ex.check
    inner = c["m3"] / h["m2"] + c["b2"] * h["m1"] / c["c2"] + c["c1"] / (h["m1"] * h["b1"])
    return h["m1"] / c["c2"] / inner
