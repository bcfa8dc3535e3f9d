"""Finite-state continuous-time Markov chain driving the regime switches."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import (InvalidGenerator, NegativeOffDiagonal, NotIrreducible,
                     RowSumNonzero, SolverFailure)

ROW_SUM_RTOL = 1e-9
RESIDUAL_RTOL = 1e-12


class GeneratorMatrix:
    """Q-matrix of switching rates; ``q[k, l]`` is the rate of k -> l."""

    def __init__(self, q):
        q = np.array(q, dtype=float)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise InvalidGenerator(f"generator must be a square matrix, got shape {q.shape}")
        q.setflags(write=False)
        self.q = q

    @property
    def n(self) -> int:
        return self.q.shape[0]

    @property
    def exit_rates(self) -> np.ndarray:
        """Total leaving rate of each state (``-q_kk`` for a conservative Q)."""
        off = self.q.copy()
        np.fill_diagonal(off, 0.0)
        return off.sum(axis=1)

    def __repr__(self):
        return f"GeneratorMatrix({self.q.tolist()!r})"


@dataclass(frozen=True, eq=False)
class StationaryLaw:
    mu: np.ndarray


@dataclass(frozen=True, eq=False)
class SwitchingPath:
    """Piecewise-constant regime trajectory on ``[0, horizon]``.

    ``states[k]`` holds on ``[jump_times[k-1], jump_times[k])`` with the
    conventions ``jump_times[-1] = 0`` and ``jump_times[len] = horizon``.
    """

    jump_times: np.ndarray
    states: np.ndarray
    horizon: float

    def regime_at(self, t) -> np.ndarray:
        """Right-continuous regime value at time(s) ``t``."""
        return self.states[np.searchsorted(self.jump_times, t, side="right")]


def _as_generator(q) -> GeneratorMatrix:
    return q if isinstance(q, GeneratorMatrix) else GeneratorMatrix(q)


def check_generator(q) -> None:
    """Raise unless ``q`` is conservative, has non-negative off-diagonal
    rates and is irreducible."""
    q = _as_generator(q).q
    n = q.shape[0]
    off = q.copy()
    np.fill_diagonal(off, 0.0)
    if not np.all(np.isfinite(q)):
        raise InvalidGenerator("generator entries must be finite")
    if np.any(off < 0):
        k, l = np.argwhere(off < 0)[0]
        raise NegativeOffDiagonal(f"q[{k + 1}][{l + 1}] = {q[k, l]!r} is negative")
    scale = np.abs(q).max() if n else 0.0
    sums = q.sum(axis=1)
    bad = np.abs(sums) > ROW_SUM_RTOL * scale
    if np.any(bad):
        k = int(np.argmax(bad))
        raise RowSumNonzero(f"row {k + 1} sums to {sums[k]!r}, expected 0")
    if n == 1:
        return
    if np.any(np.diag(q) >= 0):
        k = int(np.argmax(np.diag(q) >= 0))
        raise NotIrreducible(f"state {k + 1} has no outgoing rate")
    ncomp, _ = connected_components(off > 0, directed=True, connection="strong")
    if ncomp != 1:
        raise NotIrreducible(f"rate graph splits into {ncomp} communicating classes")


def stationary_law(q) -> StationaryLaw:
    """Solve ``mu Q = 0, sum(mu) = 1`` by least squares on the augmented system."""
    q = _as_generator(q).q
    n = q.shape[0]
    if n == 1:
        return StationaryLaw(np.ones(1))
    a = np.vstack([q.T, np.ones((1, n))])
    b = np.zeros(n + 1)
    b[-1] = 1.0
    mu, _, rank, _ = np.linalg.lstsq(a, b, rcond=None)
    if rank < n:
        raise SolverFailure(f"augmented system has rank {rank} < {n}")
    residual = np.abs(mu @ q).max()
    if residual >= RESIDUAL_RTOL * np.abs(q).max() or np.any(mu <= 0):
        raise SolverFailure(f"stationary solve inaccurate (residual {residual:.3e}, mu={mu})")
    return StationaryLaw(mu / mu.sum())


def sample_switching_path(q, i0: int, horizon: float, rng: np.random.Generator,
                          block: int = 1024) -> SwitchingPath:
    """Exact jump-chain sampling: Exp(q_k) holding times, then k -> l with
    probability ``q_kl / q_k``."""
    gen = _as_generator(q)
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    rates = gen.exit_rates
    if gen.n == 1 or rates[i0] == 0.0:
        return SwitchingPath(np.empty(0), np.array([i0]), float(horizon))
    off = gen.q.copy()
    np.fill_diagonal(off, 0.0)
    cum = np.cumsum(off / rates[:, None], axis=1)
    cum[:, -1] = 1.0

    times, states = [], [i0]
    t, k = 0.0, i0
    while True:
        holds = rng.standard_exponential(block)
        picks = rng.random(block)
        for e, u in zip(holds, picks):
            t += e / rates[k]
            if t >= horizon:
                return SwitchingPath(np.array(times), np.array(states), float(horizon))
            k = int(np.searchsorted(cum[k], u, side="right"))
            times.append(t)
            states.append(k)


def occupation_fractions(p: SwitchingPath, n_states: int | None = None) -> np.ndarray:
    """Fraction of ``[0, horizon]`` spent in each state."""
    if p.horizon <= 0:
        raise ValueError("horizon must be positive")
    n = n_states if n_states is not None else int(p.states.max()) + 1
    edges = np.concatenate([[0.0], p.jump_times, [p.horizon]])
    out = np.bincount(p.states, weights=np.diff(edges), minlength=n)
    return out / p.horizon
