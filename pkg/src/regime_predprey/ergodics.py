"""Statistics of simulated paths: time averages with batch-means intervals,
occupation-time histograms, exponential growth slopes and ensemble moments."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import TooFewReplicas, WindowTooShort

DEFAULT_BATCHES = 20
DEFAULT_BURN_IN_FRACTION = 0.1
CONFIDENCE = 0.975  # two-sided 95 %
MIN_REPLICAS = 30


@dataclass(frozen=True)
class TimeAverageEstimate:
    value: float
    half_width: float
    batches: int
    burn_in: float
    # set for unbounded integrands where only the liminf is guaranteed
    lower_bound_only: bool = False

    @property
    def low(self) -> float:
        return self.value - self.half_width

    @property
    def high(self) -> float:
        return self.value + self.half_width

    def to_dict(self) -> dict:
        return {"value": self.value, "half_width": self.half_width, "batches": self.batches,
                "burn_in": self.burn_in, "lower_bound_only": self.lower_bound_only}


@dataclass(frozen=True, eq=False)
class EmpiricalDistribution:
    bin_edges: np.ndarray
    mass: np.ndarray  # (n_regimes, n_bins)
    total_time: float

    @property
    def regime_marginal(self) -> np.ndarray:
        return self.mass.sum(axis=1)

    @property
    def density_marginal(self) -> np.ndarray:
        return self.mass.sum(axis=0)

    def rows(self):
        """``(bin_low, bin_high, regime, mass)`` with 1-based regimes."""
        for i in range(self.mass.shape[0]):
            for j in range(self.mass.shape[1]):
                yield self.bin_edges[j], self.bin_edges[j + 1], i + 1, self.mass[i, j]


@dataclass(frozen=True)
class SlopeEstimate:
    slope: float
    half_width: float
    window: tuple
    endpoint_slope: float = float("nan")

    @property
    def low(self) -> float:
        return self.slope - self.half_width

    @property
    def high(self) -> float:
        return self.slope + self.half_width

    def to_dict(self) -> dict:
        return {"slope": self.slope, "half_width": self.half_width,
                "window": list(self.window), "endpoint_slope": self.endpoint_slope}


def _series(path, series):
    if series is None:
        return path.log_values
    return getattr(path, series)


def _window_index(times, burn_in):
    i0 = int(np.searchsorted(times, burn_in - 1e-12 * max(1.0, abs(burn_in)), side="left"))
    return i0


def batch_half_width(batch_values: np.ndarray, weights: np.ndarray | None = None) -> float:
    """Student-t half-width of the mean of (weighted) batch means."""
    b = batch_values.size
    if weights is None:
        weights = np.ones(b)
    w = weights / weights.sum()
    mean = np.dot(w, batch_values)
    # weighted variance of the batch means; equals the sample variance for equal weights
    var = np.dot(w, (batch_values - mean) ** 2) * b / (b - 1)
    se = np.sqrt(var / b)
    return float(stats.t.ppf(CONFIDENCE, b - 1) * se)


def time_average(path, f, burn_in: float | None = None, batches: int = DEFAULT_BATCHES,
                 series: str | None = None) -> TimeAverageEstimate:
    """Trapezoidal time average of ``f(density, regime)`` over ``[burn_in, horizon]``.

    ``f`` receives arrays of densities and 0-based regimes. ``series`` selects
    one of a bundle's log series; auxiliary paths need none. The window is
    cut into ``batches`` equal-time batches whose means give the interval.
    """
    times = path.times
    if burn_in is None:
        burn_in = DEFAULT_BURN_IN_FRACTION * times[-1]
    if batches < 2:
        raise ValueError("batches must be >= 2")
    i0 = _window_index(times, burn_in)
    n_int = times.size - 1 - i0
    if times[-1] <= burn_in or n_int < batches:
        raise WindowTooShort(
            f"window after burn-in {burn_in:g} holds {max(n_int, 0)} intervals, "
            f"need at least {batches}")
    t = times[i0:]
    vals = np.asarray(f(np.exp(_series(path, series)[i0:]), path.regime[i0:]), dtype=float)
    vals = np.broadcast_to(vals, t.shape)
    seg = 0.5 * (vals[1:] + vals[:-1]) * np.diff(t)
    cuts = np.linspace(0, t.size - 1, batches + 1).round().astype(int)
    integrals = np.add.reduceat(seg, cuts[:-1])
    lengths = np.diff(t[cuts])
    means = integrals / lengths
    value = float(integrals.sum() / (t[-1] - t[0]))
    return TimeAverageEstimate(value=value, half_width=batch_half_width(means, lengths),
                               batches=batches, burn_in=float(t[0]))


def empirical_stationary(path, bins: int = 30, burn_in: float = 0.0, series: str | None = None,
                         edges: np.ndarray | None = None,
                         log_edges: np.ndarray | None = None) -> EmpiricalDistribution:
    """Occupation-time histogram over log-spaced density bins and regimes.

    Each recorded interval is credited to the bin and regime at its left end.
    Bins span the observed range unless ``edges`` (densities) or
    ``log_edges`` (log densities, for bins below float underflow) are given;
    values outside explicit edges are dropped before normalising.
    """
    if log_edges is not None:
        log_edges = np.asarray(log_edges, dtype=float)
        edges = np.exp(log_edges)
    times = path.times
    i0 = _window_index(times, burn_in)
    if times.size - 1 - i0 < 1:
        raise WindowTooShort("no recorded interval after burn-in")
    logs = _series(path, series)[i0:-1]
    reg = path.regime[i0:-1]
    dt = np.diff(times[i0:])
    if edges is None and log_edges is None:
        lo, hi = logs.min(), logs.max()
        if hi <= lo:
            hi = lo + 1e-12
        log_edges = np.linspace(lo, hi, bins + 1)
        edges = np.exp(log_edges)
    elif log_edges is None:
        edges = np.asarray(edges, dtype=float)
        log_edges = np.log(edges)
    nb = edges.size - 1
    idx = np.searchsorted(log_edges, logs, side="right") - 1
    idx[logs == log_edges[-1]] = nb - 1
    keep = (idx >= 0) & (idx < nb)
    flat = reg[keep] * nb + idx[keep]
    mass = np.bincount(flat, weights=dt[keep], minlength=path.n_regimes * nb)
    total = float(dt.sum())
    mass = mass.reshape(path.n_regimes, nb)
    s = mass.sum()
    if s > 0:
        mass = mass / s
    return EmpiricalDistribution(bin_edges=edges, mass=mass, total_time=total)


def total_variation(p: EmpiricalDistribution, q: EmpiricalDistribution,
                    marginal: bool = False) -> float:
    """TV distance between two histograms on identical edges."""
    if p.bin_edges.shape != q.bin_edges.shape or not np.allclose(p.bin_edges, q.bin_edges):
        raise ValueError("histograms must share bin edges")
    if marginal:
        return float(0.5 * np.abs(p.density_marginal - q.density_marginal).sum())
    return float(0.5 * np.abs(p.mass - q.mass).sum())


def lyapunov_slope(times: np.ndarray, log_series: np.ndarray, window: tuple | None = None,
                   batches: int = DEFAULT_BATCHES) -> SlopeEstimate:
    """Least-squares growth rate of a log series over ``window``.

    The half-width is the larger of the OLS and batch-increment standard
    errors times the t quantile; the latter accounts for the random-walk
    component that makes OLS residuals strongly correlated.
    """
    times = np.asarray(times, dtype=float)
    y = np.asarray(log_series, dtype=float)
    if window is None:
        window = (DEFAULT_BURN_IN_FRACTION * times[-1], times[-1])
    t0, t1 = window
    if t0 < times[0] or t1 > times[-1] + 1e-9 * max(1.0, times[-1]) or t1 <= t0:
        raise WindowTooShort(f"window {window} not inside [{times[0]}, {times[-1]}]")
    i0 = _window_index(times, t0)
    i1 = int(np.searchsorted(times, t1 + 1e-12 * max(1.0, t1), side="right"))
    t, v = times[i0:i1], y[i0:i1]
    if t.size < max(3, batches + 1):
        raise WindowTooShort(f"window holds {t.size} samples, need {max(3, batches + 1)}")
    tc = t - t.mean()
    sxx = np.dot(tc, tc)
    slope = float(np.dot(tc, v - v.mean()) / sxx)
    resid = v - v.mean() - slope * tc
    se_ols = np.sqrt(np.dot(resid, resid) / (t.size - 2) / sxx)

    cuts = np.linspace(0, t.size - 1, batches + 1).round().astype(int)
    incr = np.diff(v[cuts]) / np.diff(t[cuts])
    hw_batch = batch_half_width(incr, np.diff(t[cuts]))
    hw_ols = float(stats.t.ppf(CONFIDENCE, t.size - 2) * se_ols)
    endpoint = float((v[-1] - v[0]) / (t[-1] - t[0]))
    return SlopeEstimate(slope=slope, half_width=max(hw_ols, hw_batch),
                         window=(float(t[0]), float(t[-1])), endpoint_slope=endpoint)


def ensemble_moment(log_states, p: float) -> tuple:
    """Mean of ``exp(p * log_state)`` across replicas and its standard error."""
    x = np.asarray(log_states, dtype=float).ravel()
    if not p > 1:
        raise ValueError("p must exceed 1")
    if x.size < MIN_REPLICAS:
        raise TooFewReplicas(f"{x.size} replicas given, need >= {MIN_REPLICAS}")
    vals = np.exp(p * x)
    return float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(x.size))
