"""Left-tail asymptotics of the portfolio density.

The smallest eigenvalue lambda* selects the regime:

* lambda* < 0: exponentially damped power law, rate 1/|lambda*|;
* lambda* = 0: Gaussian decay with variance set by the linear exposure on
  the zero-eigenvalue factors;
* lambda* > 0: bounded support [v_inf, inf), power-law approach to v_inf.

`tail_profile` aggregates the eigenvalues into distinct groups (exact
multiplicities do not survive floating-point eigensolvers, so grouping uses
a relative tolerance) and precomputes everything those formulas need.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import WrongRegime
from .model import RemappedPortfolio

DEFAULT_GROUP_TOL = 1e-9


class Regime(enum.Enum):
    NEGATIVE_MIN = "NegativeMin"
    ZERO_MIN = "ZeroMin"
    POSITIVE_MIN = "PositiveMin"


@dataclass(frozen=True)
class TailProfile:
    """Distinct-eigenvalue summary driving the tail formulas.

    a[k] is None for a zero eigenvalue group.  v_inf/v_sup are -inf/+inf
    when the support is unbounded on that side.  m_bar is the left-tail
    power exponent of the active regime; v0 is the Gaussian-regime center
    (ZeroMin only, else None).
    """

    regime: Regime
    distinct_lambdas: tuple[float, ...]
    multiplicities: tuple[int, ...]
    delta_bar_sq: tuple[float, ...]
    a: tuple[float | None, ...]
    v_inf: float
    v_sup: float
    m_bar: float
    v0: float | None


def tail_profile(p: RemappedPortfolio, group_tol: float = DEFAULT_GROUP_TOL) -> TailProfile:
    """Group eigenvalues and derive the tail-regime metadata."""
    lam = p.lambda_
    scale = max(1.0, float(np.abs(lam).max()) if lam.size else 0.0)
    tol = group_tol * scale

    groups: list[tuple[int, int]] = []  # [start, stop) runs in the sorted vector
    start = 0
    for stop in range(1, lam.size + 1):
        if stop == lam.size or lam[stop] - lam[stop - 1] > tol:
            groups.append((start, stop))
            start = stop

    reps: list[float] = []
    mults: list[int] = []
    dbar2: list[float] = []
    avals: list[float | None] = []
    for lo, hi in groups:
        rep = float(np.mean(lam[lo:hi]))
        if abs(rep) <= tol:
            rep = 0.0
        d2 = float(np.sum(p.delta[lo:hi] ** 2))
        reps.append(rep)
        mults.append(hi - lo)
        dbar2.append(d2)
        avals.append(None if rep == 0.0 else math.sqrt(d2) / abs(rep))

    all_pos = all(r > 0.0 for r in reps) and reps
    all_neg = all(r < 0.0 for r in reps) and reps
    bound = lambda: p.theta - sum(d2 / (2.0 * r) for r, d2 in zip(reps, dbar2))
    v_inf = bound() if all_pos else -math.inf
    v_sup = bound() if all_neg else math.inf

    lam_star = reps[0] if reps else 0.0
    if lam_star < 0.0:
        regime = Regime.NEGATIVE_MIN
        m1 = mults[0]
        m_bar = (m1 - 3) / 4.0 if avals[0] != 0.0 else m1 / 2.0 - 1.0
        v0 = None
    elif lam_star == 0.0:
        regime = Regime.ZERO_MIN
        m_bar = -0.5 * sum(mults[1:])
        v0 = p.theta - sum(d2 / (2.0 * r) for r, d2 in zip(reps[1:], dbar2[1:]))
    else:
        regime = Regime.POSITIVE_MIN
        m_bar = lam.size / 2.0 - 1.0
        v0 = None

    return TailProfile(
        regime=regime,
        distinct_lambdas=tuple(reps),
        multiplicities=tuple(mults),
        delta_bar_sq=tuple(dbar2),
        a=tuple(avals),
        v_inf=v_inf,
        v_sup=v_sup,
        m_bar=m_bar,
        v0=v0,
    )


def asymptotic_left_log_density(tp: TailProfile, v) -> float | np.ndarray:
    """Log density in the far left tail, up to an additive constant.

    NegativeMin:  m_bar log|v| - |v|/|lambda*| + a_1 sqrt(2|v/lambda*|)
    ZeroMin:      m_bar log|v - v0| - (v - v0)^2 / (2 dbar_1^2)

    The damping term is written so the expression decays as v -> -inf.
    Only meaningful deep in the left tail; the caller picks the window.
    """
    v = np.asarray(v, dtype=float)
    scalar = v.ndim == 0
    v = np.atleast_1d(v)
    if tp.regime is Regime.NEGATIVE_MIN:
        lam_star = abs(tp.distinct_lambdas[0])
        a1 = tp.a[0]
        with np.errstate(divide="ignore"):
            out = (
                tp.m_bar * np.log(np.abs(v))
                - np.abs(v) / lam_star
                + a1 * np.sqrt(2.0 * np.abs(v) / lam_star)
            )
    elif tp.regime is Regime.ZERO_MIN:
        d2 = tp.delta_bar_sq[0]
        if d2 <= 0.0:
            raise WrongRegime("zero-eigenvalue group carries no linear exposure")
        u = v - tp.v0
        with np.errstate(divide="ignore"):
            out = tp.m_bar * np.log(np.abs(u)) - u**2 / (2.0 * d2)
    else:
        raise WrongRegime("left tail has bounded support when all eigenvalues are positive")
    return float(out[0]) if scalar else out
