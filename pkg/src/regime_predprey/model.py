"""Scenario definition: per-regime coefficients, switching generator and
initial state of the switched Beddington-DeAngelis predator-prey system.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .ctmc import GeneratorMatrix, check_generator
from .errors import DimensionMismatch, InvalidInitialCondition, NonPositiveParameter

COEFFICIENTS = ("a1", "b1", "c1", "a2", "b2", "c2", "m1", "m2", "m3", "alpha", "beta")

# Coefficients carrying units of 1/time; alpha and beta carry 1/sqrt(time).
RATE_COEFFICIENTS = ("a1", "b1", "c1", "a2", "b2", "c2")
NOISE_COEFFICIENTS = ("alpha", "beta")


@dataclass(frozen=True)
class RegimeParameterSet:
    """Coefficients in force while the environment sits in one regime.

    ``a1`` prey growth, ``b1`` prey self-competition, ``c1`` predation,
    ``a2`` predator death, ``b2`` predator self-competition, ``c2`` conversion,
    ``m1, m2, m3`` functional-response constants, ``alpha``/``beta`` noise
    intensities of prey/predator.
    """

    a1: float
    b1: float
    c1: float
    a2: float
    b2: float
    c2: float
    m1: float
    m2: float
    m3: float
    alpha: float
    beta: float

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, k) for k in COEFFICIENTS], dtype=float)

    @classmethod
    def from_mapping(cls, mapping) -> "RegimeParameterSet":
        missing = [k for k in COEFFICIENTS if k not in mapping]
        if missing:
            raise KeyError(f"regime record is missing {', '.join(missing)}")
        extra = set(mapping) - set(COEFFICIENTS)
        if extra:
            raise KeyError(f"unknown regime fields: {', '.join(sorted(extra))}")
        return cls(**{k: float(mapping[k]) for k in COEFFICIENTS})

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in COEFFICIENTS}


@dataclass(frozen=True, eq=False)
class Scenario:
    """Full model input. ``initial_regime`` is 0-based."""

    regimes: tuple
    generator: GeneratorMatrix
    x0: float
    y0: float
    initial_regime: int = 0
    rho: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "regimes", tuple(self.regimes))
        if not isinstance(self.generator, GeneratorMatrix):
            object.__setattr__(self, "generator", GeneratorMatrix(self.generator))

    @property
    def n_regimes(self) -> int:
        return len(self.regimes)

    @property
    def params(self) -> np.ndarray:
        """Dense ``(N, 11)`` coefficient table, columns in ``COEFFICIENTS`` order."""
        return np.vstack([r.as_array() for r in self.regimes])

    def coef(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.regimes], dtype=float)

    def with_coefficient(self, regime: int, name: str, value: float) -> "Scenario":
        """Copy with one coefficient of one (0-based) regime replaced."""
        if name not in COEFFICIENTS:
            raise KeyError(name)
        regimes = list(self.regimes)
        regimes[regime] = replace(regimes[regime], **{name: float(value)})
        return replace(self, regimes=tuple(regimes))

    def scaled(self, kappa: float) -> "Scenario":
        """Rescale time: rates and switching intensities times ``kappa``,
        noise intensities times ``sqrt(kappa)``."""
        regimes = []
        for r in self.regimes:
            upd = {k: getattr(r, k) * kappa for k in RATE_COEFFICIENTS}
            upd.update({k: getattr(r, k) * math.sqrt(kappa) for k in NOISE_COEFFICIENTS})
            regimes.append(replace(r, **upd))
        return replace(self, regimes=tuple(regimes),
                       generator=GeneratorMatrix(self.generator.q * kappa))

    def to_dict(self) -> dict:
        """File representation (1-based ``initial_regime``)."""
        return {
            "regimes": [r.to_dict() for r in self.regimes],
            "generator": self.generator.q.tolist(),
            "x0": self.x0,
            "y0": self.y0,
            "initial_regime": self.initial_regime + 1,
            "rho": self.rho,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        for key in ("regimes", "generator", "x0", "y0"):
            if key not in data:
                raise KeyError(f"scenario is missing '{key}'")
        regimes = tuple(RegimeParameterSet.from_mapping(r) for r in data["regimes"])
        q = np.asarray(data["generator"], dtype=float)
        if q.ndim == 0:
            q = q.reshape(1, 1)
        return cls(
            regimes=regimes,
            generator=GeneratorMatrix(q),
            x0=float(data["x0"]),
            y0=float(data["y0"]),
            initial_regime=int(data.get("initial_regime", 1)) - 1,
            rho=float(data.get("rho", 0.0)),
        )


@dataclass(frozen=True)
class ParameterExtremes:
    """Regime-wise minimum (``hat``) and maximum (``check``) of each coefficient."""

    hat: dict = field(default_factory=dict)
    check: dict = field(default_factory=dict)

    def __getattr__(self, name):
        # hat_a1 / check_alpha style access
        for prefix, table in (("hat_", "hat"), ("check_", "check")):
            if name.startswith(prefix):
                key = name[len(prefix):]
                values = object.__getattribute__(self, table)
                if key in values:
                    return values[key]
        raise AttributeError(name)


def validate_scenario(raw: Scenario) -> Scenario:
    """Check positivity, dimensions, initial condition and the generator.

    Returns ``raw`` unchanged when everything holds.
    """
    n = raw.n_regimes
    if n < 1:
        raise DimensionMismatch("at least one regime is required")
    q = raw.generator.q
    if q.shape != (n, n):
        raise DimensionMismatch(f"{n} regimes but generator has shape {q.shape}")
    for i, r in enumerate(raw.regimes):
        for f in fields(r):
            v = getattr(r, f.name)
            if not (np.isfinite(v) and v > 0):
                raise NonPositiveParameter(i + 1, f.name, v)
    for name in ("x0", "y0"):
        v = getattr(raw, name)
        if not (np.isfinite(v) and v > 0):
            raise InvalidInitialCondition(f"{name} must be finite and > 0 (got {v!r})")
    if not 0 <= raw.initial_regime < n:
        raise InvalidInitialCondition(
            f"initial_regime must lie in 1..{n} (got {raw.initial_regime + 1})")
    if not -1.0 <= raw.rho <= 1.0:
        raise InvalidInitialCondition(f"rho must lie in [-1, 1] (got {raw.rho!r})")
    check_generator(raw.generator)
    return raw


def parameter_extremes(s: Scenario) -> ParameterExtremes:
    p = s.params
    hat = {k: float(v) for k, v in zip(COEFFICIENTS, p.min(axis=0))}
    check = {k: float(v) for k, v in zip(COEFFICIENTS, p.max(axis=0))}
    return ParameterExtremes(hat=hat, check=check)
