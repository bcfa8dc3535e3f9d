"""Log-space Euler-Maruyama for the predator-prey system and its two
dominating logistic processes.

All four processes share one switching path and one pair of Brownian
motions. Prey and predator are advanced through their non-negative gaps
below the dominating processes, ``logPhi - logX`` and ``logPsi - logY``;
with shared noise these gaps obey a noise-free recursion that stays
non-negative in floating point whenever ``h * b * exp(log dominator) <= 1``
on every step, so the ordering ``X <= phi``, ``Y <= psi`` holds exactly.
"""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass

import numba
import numpy as np

from .ctmc import SwitchingPath, sample_switching_path
from .errors import NonFiniteState, StepTooLarge
from .model import COEFFICIENTS, RegimeParameterSet, Scenario

log = logging.getLogger(__name__)

CHUNK = 1 << 16  # base steps per noise block; part of the reproducibility contract

_STREAM_SWITCH, _STREAM_NOISE, _STREAM_BRIDGE = 0, 1, 2
_MODE_BUNDLE, _MODE_PHI, _MODE_PSI = 0, 1, 2
_OK, _STEP_PHI, _STEP_PSI, _NONFINITE = 0, 1, 2, 3

SERIES = ("logX", "logY", "logPhi", "logPsi")


@dataclass(frozen=True)
class GridSpec:
    dt: float
    horizon: float
    record_stride: int = 1

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.horizon >= self.dt:
            raise ValueError("horizon must be at least dt")
        if int(self.record_stride) != self.record_stride or self.record_stride < 1:
            raise ValueError("record_stride must be a positive integer")

    @property
    def n_steps(self) -> int:
        return int(round(self.horizon / self.dt))

    @property
    def n_records(self) -> int:
        return self.n_steps // self.record_stride + 1


@dataclass(frozen=True, eq=False)
class PathBundle:
    times: np.ndarray
    logX: np.ndarray
    logY: np.ndarray
    logPhi: np.ndarray
    logPsi: np.ndarray
    regime: np.ndarray
    seed: int
    grid: GridSpec
    n_regimes: int = 1
    path_id: int = 0

    def to_csv(self, fname) -> None:
        """Write ``time, regime, logX, logY, logPhi, logPsi`` rows (1-based regime)."""
        with open(fname, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["time", "regime", *SERIES])
            cols = (self.times, self.logX, self.logY, self.logPhi, self.logPsi)
            for k in range(self.times.size):
                w.writerow([_fmt(self.times[k]), int(self.regime[k]) + 1,
                            *(_fmt(c[k]) for c in cols[1:])])


@dataclass(frozen=True, eq=False)
class AuxPath:
    """Recorded log-density of a single dominating process (``phi`` or ``psi``)."""

    times: np.ndarray
    log_values: np.ndarray
    regime: np.ndarray
    which: str
    seed: int
    grid: GridSpec
    n_regimes: int = 1
    path_id: int = 0


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


# -- drifts ----------------------------------------------------------------

def log_drift_X(logx: float, logy: float, r: RegimeParameterSet) -> float:
    x, y = math.exp(logx), math.exp(logy)
    return (r.a1 - 0.5 * r.alpha ** 2 - r.b1 * x
            - r.c1 * y / (r.m1 + r.m2 * x + r.m3 * y))


def log_drift_Y(logx: float, logy: float, r: RegimeParameterSet) -> float:
    x, y = math.exp(logx), math.exp(logy)
    return (-r.a2 - 0.5 * r.beta ** 2 - r.b2 * y
            + r.c2 * x / (r.m1 + r.m2 * x + r.m3 * y))


def log_drift_phi(logx: float, r: RegimeParameterSet) -> float:
    return r.a1 - 0.5 * r.alpha ** 2 - r.b1 * math.exp(logx)


def log_drift_psi(logy: float, r: RegimeParameterSet) -> float:
    return -r.a2 + r.c2 / r.m2 - 0.5 * r.beta ** 2 - r.b2 * math.exp(logy)


# -- kernel ----------------------------------------------------------------

@numba.njit(cache=True, nogil=True)
def _advance(state, h, reg, dw1, dw2, base_end, params, rho, mode,
             step, stride, rec, pos):
    rhoc = math.sqrt(max(0.0, 1.0 - rho * rho))
    z, d, v, g = state[0], state[1], state[2], state[3]
    for k in range(h.size):
        p = params[reg[k]]
        a1, b1, c1, a2, b2, c2 = p[0], p[1], p[2], p[3], p[4], p[5]
        m1, m2, m3, al, be = p[6], p[7], p[8], p[9], p[10]
        hk = h[k]
        cz = 0.0
        cv = 0.0
        zn = z
        vn = v
        if mode != 2:
            ez = math.exp(z)
            cz = hk * b1 * ez
            if cz > 1.0:
                state[0], state[1], state[2], state[3] = z, d, v, g
                return _STEP_PHI, step, pos, cz
            zn = z + hk * (a1 - 0.5 * al * al - b1 * ez) + al * dw1[k]
        if mode != 1:
            ev = math.exp(v)
            cv = hk * b2 * ev
            if cv > 1.0:
                state[0], state[1], state[2], state[3] = z, d, v, g
                return _STEP_PSI, step, pos, cv
            vn = v + (hk * (-a2 + c2 / m2 - 0.5 * be * be - b2 * ev)
                      + be * (rho * dw1[k] + rhoc * dw2[k]))
        if mode == 0:
            x = math.exp(z - d)
            y = math.exp(v - g)
            den = m1 + m2 * x + m3 * y
            qd = -math.expm1(-d)
            if qd > d:
                qd = d
            qg = -math.expm1(-g)
            if qg > g:
                qg = g
            d = d - cz * qd + hk * c1 * y / den
            g = g - cv * qg + hk * c2 * (m1 + m3 * y) / (m2 * den)
        z = zn
        v = vn
        if not (math.isfinite(z) and math.isfinite(v)
                and math.isfinite(d) and math.isfinite(g)):
            state[0], state[1], state[2], state[3] = z, d, v, g
            return _NONFINITE, step, pos, 0.0
        if base_end[k]:
            step += 1
            if step % stride == 0:
                rec[pos, 0] = z - d
                rec[pos, 1] = v - g
                rec[pos, 2] = z
                rec[pos, 3] = v
                pos += 1
    state[0], state[1], state[2], state[3] = z, d, v, g
    return _OK, step, pos, 0.0


# -- driver ----------------------------------------------------------------

def _rng(seed: int, path_id: int, stream: int, chunk: int = 0) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(path_id), stream, int(chunk)))
    return np.random.Generator(np.random.Philox(ss))


def switching_path_for(s: Scenario, grid: GridSpec, seed: int, path_id: int = 0) -> SwitchingPath:
    """The regime trajectory used by every simulation with this seed/path id."""
    return sample_switching_path(s.generator, s.initial_regime, grid.n_steps * grid.dt,
                                 _rng(seed, path_id, _STREAM_SWITCH))


def _chunk_inputs(k0, k1, dt, path, seed, path_id, chunk):
    """Substep layout and Brownian increments for base steps ``k0..k1-1``."""
    nb = k1 - k0
    t_base = np.arange(k0, k1 + 1) * dt
    jt = path.jump_times
    lo, hi = np.searchsorted(jt, [t_base[0], t_base[-1]], side="right")
    jumps = jt[lo:hi]
    jumps = jumps[(jumps < t_base[-1]) & ~np.isin(jumps, t_base)]

    w = _rng(seed, path_id, _STREAM_NOISE, chunk).standard_normal((nb, 2)) * math.sqrt(dt)
    if jumps.size == 0:
        h = np.diff(t_base)
        reg = path.regime_at(t_base[:-1])
        return h, reg, w[:, 0].copy(), w[:, 1].copy(), np.ones(nb, dtype=np.bool_)

    pts = np.concatenate([t_base, jumps])
    is_base = np.concatenate([np.ones(t_base.size, bool), np.zeros(jumps.size, bool)])
    order = np.argsort(pts, kind="stable")
    pts, is_base = pts[order], is_base[order]
    h = np.diff(pts)
    reg = path.regime_at(pts[:-1])
    owner = np.cumsum(is_base[:-1]) - 1  # base step containing each substep
    dw = w[owner].copy()

    # split base increments across jump times with a Brownian bridge
    bridge = _rng(seed, path_id, _STREAM_BRIDGE, chunk).standard_normal((jumps.size, 2))
    split = np.flatnonzero(np.bincount(owner, minlength=nb) > 1)
    starts = np.searchsorted(owner, split, side="left")
    ends = np.searchsorted(owner, split, side="right")
    used = 0
    for b, j0, j1 in zip(split, starts, ends):
        remaining_t = dt
        remaining_w = w[b].copy()
        for j in range(j0, j1 - 1):
            frac = h[j] / remaining_t
            piece = remaining_w * frac + np.sqrt(h[j] * (1.0 - frac)) * bridge[used]
            used += 1
            dw[j] = piece
            remaining_w -= piece
            remaining_t -= h[j]
        dw[j1 - 1] = remaining_w
    return h, reg, dw[:, 0].copy(), dw[:, 1].copy(), is_base[1:].copy()


def _run(s: Scenario, grid: GridSpec, seed: int, path_id: int, mode: int):
    path = switching_path_for(s, grid, seed, path_id)
    n = grid.n_steps
    params = np.ascontiguousarray(s.params)
    state = np.array([math.log(s.x0), 0.0, math.log(s.y0), 0.0])
    rec = np.empty((grid.n_records, 4))
    rec[0] = [state[0], state[2], state[0], state[2]]
    pos, step = 1, 0
    for chunk, k0 in enumerate(range(0, n, CHUNK)):
        k1 = min(n, k0 + CHUNK)
        h, reg, dw1, dw2, base_end = _chunk_inputs(k0, k1, grid.dt, path, seed, path_id, chunk)
        status, step, pos, factor = _advance(state, h, reg, dw1, dw2, base_end, params,
                                             float(s.rho), mode, step, grid.record_stride,
                                             rec, pos)
        if status in (_STEP_PHI, _STEP_PSI):
            which = "phi" if status == _STEP_PHI else "psi"
            suggested = 0.5 * grid.dt / factor
            log.warning("%s exceeded the domination cap at step %d; dt=%g too large",
                        which, step, grid.dt)
            raise StepTooLarge(
                f"step condition h*b*{which} <= 1 violated near t={step * grid.dt:g} "
                f"(factor {factor:.3g}); try dt <= {suggested:.3g}", suggested_dt=suggested)
        if status == _NONFINITE:
            raise NonFiniteState(f"non-finite state near t={step * grid.dt:g}; dt far too large")
    times = np.arange(grid.n_records) * (grid.record_stride * grid.dt)
    return times, rec, path.regime_at(times)


def simulate_bundle(s: Scenario, grid: GridSpec, seed: int, path_id: int = 0) -> PathBundle:
    """Simulate ``(X, Y, phi, psi)`` jointly on one switching path.

    The scenario is assumed validated. Deterministic in ``(seed, path_id)``.
    Raises ``StepTooLarge`` if ``h * b1 * phi`` or ``h * b2 * psi`` exceeds 1
    on some step, and ``NonFiniteState`` on overflow.
    """
    times, rec, regime = _run(s, grid, seed, path_id, _MODE_BUNDLE)
    return PathBundle(times=times, logX=rec[:, 0].copy(), logY=rec[:, 1].copy(),
                      logPhi=rec[:, 2].copy(), logPsi=rec[:, 3].copy(), regime=regime,
                      seed=seed, grid=grid, n_regimes=s.n_regimes, path_id=path_id)


def simulate_auxiliary(s: Scenario, which: str, grid: GridSpec, seed: int,
                       path_id: int = 0) -> AuxPath:
    """Simulate only ``phi`` or ``psi``; same noise and switching as
    :func:`simulate_bundle` for equal ``(seed, path_id)``."""
    if which not in ("phi", "psi"):
        raise ValueError(f"which must be 'phi' or 'psi', not {which!r}")
    mode = _MODE_PHI if which == "phi" else _MODE_PSI
    times, rec, regime = _run(s, grid, seed, path_id, mode)
    col = 2 if which == "phi" else 3
    return AuxPath(times=times, log_values=rec[:, col].copy(), regime=regime, which=which,
                   seed=seed, grid=grid, n_regimes=s.n_regimes, path_id=path_id)


def coefficient_table(s: Scenario) -> dict:
    """Per-regime coefficient arrays keyed by name."""
    p = s.params
    return {k: p[:, j] for j, k in enumerate(COEFFICIENTS)}
