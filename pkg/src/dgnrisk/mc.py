"""Historical-simulation benchmark for the Fourier risk engine.

Scenarios are generated from the remapped model with a counter-based
(Philox) generator, chunked over fixed-size column blocks on independent
jumped streams, so identical seeds reproduce identical samples no matter
how generation is scheduled.  The raw standard-normal draws are frozen in
the sample so finite-difference sensitivities can re-price the same
scenarios under shocked parameters (common random numbers).

Empirical VaR/ES come from order statistics of the sorted sample; their
confidence intervals bracket the true quantile between two order
statistics with binomial coverage probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.special

from .charfn import _parse_parameter
from .errors import (
    InsufficientTailSample,
    IntervalNotFound,
    LevelOutOfRange,
    ResourceExhausted,
)
from .model import RemappedPortfolio

_CHUNK = 1 << 18
_NORMAL_APPROX_THRESHOLD = 50.0


@dataclass(frozen=True)
class ScenarioSample:
    """Sorted simulated portfolio variations plus the frozen factor draws.

    raw_values keeps the unsorted variations aligned column-wise with
    frozen_factors; both are None on derived (re-priced) samples.
    """

    values: np.ndarray
    seed: int
    t_mc: int
    frozen_factors: np.ndarray | None = None
    raw_values: np.ndarray | None = None

    def __post_init__(self):
        if self.values.shape != (self.t_mc,):
            raise ValueError("values length must equal t_mc")


@dataclass(frozen=True)
class McEstimate:
    """Point estimate with asymmetric confidence offsets.

    The interval is [point - lower_offset, point + upper_offset].
    """

    point: float
    lower_offset: float
    upper_offset: float
    confidence_level: float

    def __post_init__(self):
        if self.lower_offset < 0.0 or self.upper_offset < 0.0:
            raise ValueError("confidence offsets must be non-negative")

    def contains(self, x: float) -> bool:
        return self.point - self.lower_offset <= x <= self.point + self.upper_offset


def simulate(p: RemappedPortfolio, t_mc: int, seed: int) -> ScenarioSample:
    """Draw t_mc scenarios V = theta + sum(delta Y + lambda Y^2 / 2)."""
    if t_mc < 1:
        raise ValueError("t_mc must be at least 1")
    n = p.n_factors
    try:
        factors = np.empty((n, t_mc))
        raw = np.empty(t_mc)
    except MemoryError as exc:
        raise ResourceExhausted(f"cannot allocate {n}x{t_mc} scenario block") from exc
    for chunk, start in enumerate(range(0, t_mc, _CHUNK)):
        stop = min(start + _CHUNK, t_mc)
        rng = np.random.Generator(np.random.Philox(key=seed).jumped(chunk))
        y = rng.standard_normal((n, stop - start))
        factors[:, start:stop] = y
        raw[start:stop] = p.theta + p.delta @ y + 0.5 * (p.lambda_ @ np.square(y))
    values = np.sort(raw)
    return ScenarioSample(values=values, seed=seed, t_mc=t_mc,
                          frozen_factors=factors, raw_values=raw)


def _tail_index(t_mc: int, level: float) -> tuple[float, bool]:
    """t* = t_mc * level with a tolerance-based integrality test."""
    if not 0.0 < level < 1.0:
        raise LevelOutOfRange(f"level {level!r} outside (0, 1)")
    t = t_mc * level
    r = round(t)
    if r >= 1 and abs(t - r) <= 1e-9 * max(1.0, t):
        return float(r), True
    if t < 1.0:
        raise InsufficientTailSample(f"t* = {t:g} < 1; enlarge the sample")
    return t, False


def historical_var(s: ScenarioSample, level: float) -> float:
    """Empirical VaR: minus the t*-th smallest variation (1-based); the
    average of the two neighbours when t* is not an integer."""
    t, integral = _tail_index(s.t_mc, level)
    if integral:
        return -float(s.values[int(t) - 1])
    lo, hi = math.floor(t), math.ceil(t)
    return -0.5 * float(s.values[lo - 1] + s.values[hi - 1])


def historical_es(s: ScenarioSample, level: float) -> float:
    """Empirical ES: mean loss over the floor(t*) worst scenarios."""
    t, integral = _tail_index(s.t_mc, level)
    cutoff = int(t) if integral else math.floor(t)
    return -float(np.mean(s.values[:cutoff]))


def _binomial_cdf_grid(t_mc: int, level: float, k_hi: int) -> np.ndarray:
    """F(j) = P(K <= j) for j = 0..k_hi, K ~ Binomial(t_mc, level).

    Exact log-space summation below the mean threshold, continuity-
    corrected normal approximation above it.
    """
    ks = np.arange(k_hi + 1)
    if t_mc * level > _NORMAL_APPROX_THRESHOLD:
        mean = t_mc * level
        sd = math.sqrt(t_mc * level * (1.0 - level))
        return scipy.special.ndtr((ks + 0.5 - mean) / sd)
    logpmf = (
        scipy.special.gammaln(t_mc + 1)
        - scipy.special.gammaln(ks + 1)
        - scipy.special.gammaln(t_mc - ks + 1)
        + ks * math.log(level)
        + (t_mc - ks) * math.log1p(-level)
    )
    return np.minimum(np.cumsum(np.exp(logpmf)), 1.0)


def _ci_pair(s: ScenarioSample, level: float, cl: float) -> tuple[int, int]:
    """Smallest order-statistics pair (t-, t+) with binomial coverage >= cl.

    Minimal means shrinking either side drops the coverage below cl; ties
    are broken toward symmetry around t*, then toward the smaller t+.
    """
    if not 0.0 < cl < 1.0:
        raise LevelOutOfRange(f"confidence level {cl!r} outside (0, 1)")
    t, integral = _tail_index(s.t_mc, level)
    t_mc = s.t_mc
    mean = t_mc * level
    sd = math.sqrt(t_mc * level * (1.0 - level))
    lo_cap = int(t) if integral else math.floor(t)
    hi_base = int(t) if integral else math.ceil(t)
    span = int(math.ceil(16.0 * sd + 20.0))
    k_hi = min(t_mc, hi_base + span)
    cdf = _binomial_cdf_grid(t_mc, level, k_hi)

    def coverage(tm: int, tp: int) -> float:
        below = cdf[tm - 1] if tm >= 1 else 0.0
        return float(cdf[tp - 1] - below)

    best = None
    for tm in range(max(1, lo_cap - span), lo_cap + 1):
        # minimal t+ >= hi_base with coverage >= cl
        target = cl + (cdf[tm - 1] if tm >= 1 else 0.0)
        j = int(np.searchsorted(cdf, target, side="left"))
        tp = max(j + 1, hi_base if hi_base > tm else tm + 1)
        if tp > k_hi or tp > t_mc:
            continue
        if coverage(tm, tp) < cl:
            continue
        if coverage(tm + 1, tp) >= cl or coverage(tm, tp - 1) >= cl:
            continue
        key = (abs((tp - t) - (t - tm)), tp)
        if best is None or key < best[0]:
            best = (key, tm, tp)
    if best is None:
        raise IntervalNotFound(
            f"no order-statistics pair reaches confidence {cl:g} at level {level:g}"
        )
    return best[1], best[2]


def var_ci(s: ScenarioSample, level: float, cl: float) -> McEstimate:
    """Empirical VaR with order-statistics confidence offsets."""
    tm, tp = _ci_pair(s, level, cl)
    point = historical_var(s, level)
    upper = -float(s.values[tm - 1]) - point
    lower = point + float(s.values[tp - 1])
    return McEstimate(point, lower, upper, cl)


def es_ci(s: ScenarioSample, level: float, cl: float) -> McEstimate:
    """Empirical ES bounds from the same order-statistics pair; valid
    because ES increases monotonically with the VaR cutoff."""
    tm, tp = _ci_pair(s, level, cl)
    point = historical_es(s, level)
    upper = -float(np.mean(s.values[:tm])) - point
    lower = point + float(np.mean(s.values[:tp]))
    return McEstimate(point, lower, upper, cl)


def default_shock(p: RemappedPortfolio, beta: str) -> float:
    """Shock size balancing truncation bias against O(1/shock) noise."""
    kind, i = _parse_parameter(p, beta)
    current = {"theta": p.theta, "delta": p.delta[i] if i >= 0 else 0.0,
               "lambda": p.lambda_[i] if i >= 0 else 0.0}[kind]
    return max(0.01 * abs(current), 0.01)


def _shock_bump(s: ScenarioSample, p: RemappedPortfolio, beta: str) -> np.ndarray:
    kind, i = _parse_parameter(p, beta)
    if s.frozen_factors is None or s.raw_values is None:
        raise ValueError("sample does not retain frozen factor draws")
    if kind == "delta":
        return s.frozen_factors[i]
    return 0.5 * np.square(s.frozen_factors[i])


def fd_sensitivity(
    p: RemappedPortfolio,
    beta: str,
    delta_beta: float | None,
    level: float,
    t_mc: int,
    seed: int,
    cl: float,
    measure: str = "var",
    sample: ScenarioSample | None = None,
) -> McEstimate:
    """Central finite difference of the historical VaR or ES in beta.

    The scenario draws are frozen: both shocked re-pricings use the same
    standard-normal sample, so only the parameter shift moves the
    estimate.  Confidence offsets propagate the two order-statistics CIs
    linearly through the difference quotient.  A theta shock translates
    every scenario deterministically, giving exactly -1 with no MC error.
    Pass a pre-simulated sample to share draws across parameters.
    """
    if measure not in ("var", "es"):
        raise ValueError("measure must be 'var' or 'es'")
    if delta_beta is None:
        delta_beta = default_shock(p, beta)
    if delta_beta < 0.0:
        raise ValueError("delta_beta must be non-negative")
    if beta == "theta":
        return McEstimate(-1.0, 0.0, 0.0, cl)
    if sample is None:
        sample = simulate(p, t_mc, seed)
    bump = _shock_bump(sample, p, beta)
    estimates = []
    for sign in (1.0, -1.0):
        shocked = np.sort(sample.raw_values + sign * delta_beta * bump)
        sub = ScenarioSample(values=shocked, seed=seed, t_mc=sample.t_mc)
        estimates.append(var_ci(sub, level, cl) if measure == "var" else es_ci(sub, level, cl))
    up, down = estimates
    if delta_beta == 0.0:
        return McEstimate(up.point - down.point, 0.0, 0.0, cl)  # exactly 0
    value = (up.point - down.point) / (2.0 * delta_beta)
    upper = (up.upper_offset + down.lower_offset) / (2.0 * delta_beta)
    lower = (up.lower_offset + down.upper_offset) / (2.0 * delta_beta)
    return McEstimate(value, lower, upper, cl)
