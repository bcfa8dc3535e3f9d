import numpy as np
import pytest

from regime_predprey import RegimeParameterSet, Scenario

BASE = dict(a1=1.0, b1=1.0, c1=1.0, a2=0.5, b2=1.0, c2=1.0,
            m1=1.0, m2=1.0, m3=1.0, alpha=0.5, beta=0.5)


def make_scenario(regimes, q=None, x0=1.0, y0=1.0, initial_regime=0, rho=0.0):
    regs = tuple(RegimeParameterSet(**dict(BASE, **r)) for r in regimes)
    if q is None:
        n = len(regs)
        q = np.ones((n, n)) - n * np.eye(n) if n > 1 else [[0.0]]
    return Scenario(regs, q, x0, y0, initial_regime, rho)


def random_generator(rng, n, low=0.2, high=2.0):
    q = rng.uniform(low, high, size=(n, n))
    np.fill_diagonal(q, 0.0)
    np.fill_diagonal(q, -q.sum(axis=1))
    return q


def random_scenario(rng, n=None):
    """Positive coefficients of order one on a fully connected generator."""
    n = n or int(rng.integers(1, 4))
    regs = []
    for _ in range(n):
        regs.append(dict(
            a1=rng.uniform(0.2, 2.0), b1=rng.uniform(0.3, 2.0), c1=rng.uniform(0.2, 2.0),
            a2=rng.uniform(0.1, 1.0), b2=rng.uniform(0.3, 2.0), c2=rng.uniform(0.2, 3.0),
            m1=rng.uniform(0.5, 2.0), m2=rng.uniform(0.5, 2.0), m3=rng.uniform(0.5, 2.0),
            alpha=rng.uniform(0.1, 1.2), beta=rng.uniform(0.1, 1.2)))
    q = random_generator(rng, n) if n > 1 else [[0.0]]
    return make_scenario(regs, q, x0=rng.uniform(0.2, 2.0), y0=rng.uniform(0.2, 2.0),
                         initial_regime=int(rng.integers(n)), rho=rng.uniform(-0.9, 0.9))


@pytest.fixture
def two_regime():
    # one favourable and one hostile environment for the prey, mu = (1/2, 1/2)
    return make_scenario([dict(a1=1.0, alpha=0.5), dict(a1=0.2, alpha=1.0)],
                         [[-1.0, 1.0], [1.0, -1.0]])


@pytest.fixture
def single():
    return make_scenario([{}])


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
