import numpy as np
import pytest

from dgnrisk.model import RemappedPortfolio


def _case(lambdas) -> RemappedPortfolio:
    lam = np.array(sorted(lambdas), dtype=float)
    return RemappedPortfolio(0.0, np.ones(lam.size), lam)


def shift_parameter(p: RemappedPortfolio, beta: str, eps: float) -> RemappedPortfolio:
    """Portfolio with one parameter shifted by eps.

    The factors are re-sorted jointly afterwards (the portfolio law is
    permutation-invariant), keeping the ascending-lambda invariant intact.
    """
    theta, delta, lam = p.theta, p.delta.copy(), p.lambda_.copy()
    if beta == "theta":
        return RemappedPortfolio(theta + eps, delta, lam)
    kind, _, idx = beta.partition("_")
    i = int(idx)
    if kind == "delta":
        delta[i] += eps
    else:
        lam[i] += eps
    order = np.argsort(lam, kind="stable")
    return RemappedPortfolio(theta, delta[order], lam[order])


@pytest.fixture(scope="session")
def case1():
    # 15 unit-delta factors, lowest eigenvalue negative
    return _case([-2.0] * 5 + [1.0] * 4 + [2.0] * 6)


@pytest.fixture(scope="session")
def case2():
    # lowest eigenvalue zero
    return _case([0.0] * 5 + [1.0] * 4 + [2.0] * 6)


@pytest.fixture(scope="session")
def case3():
    # all eigenvalues positive; support bounded below at -4.75
    return _case([1.0] * 4 + [2.0] * 11)


@pytest.fixture(scope="session")
def gauss1():
    # single standard-normal factor
    return RemappedPortfolio(0.0, [1.0], [0.0])
