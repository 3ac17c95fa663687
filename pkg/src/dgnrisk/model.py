"""Quadratic (delta-gamma) portfolio model under Gaussian risk factors.

The portfolio variation over the horizon is

    V = theta + delta' X + X' gamma X / 2,      X ~ N(0, sigma).

`remap` rotates the correlated factors into independent standard normals,
after which V = theta + sum_i (delta_i Y_i + lambda_i Y_i^2 / 2) and every
downstream computation (characteristic function, moments, tails, Fourier
inversion, Monte Carlo) works off the remapped (theta, delta, lambda) triple.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import AsymmetricInput, DimensionMismatch, NotPositiveDefinite

SYMMETRY_RTOL = 1e-12
RECONSTRUCTION_RTOL = 1e-9


def _as_readonly(a, dtype=float):
    out = np.array(a, dtype=dtype, copy=True)
    out.flags.writeable = False
    return out


def _check_symmetric(m: np.ndarray, name: str) -> None:
    scale = max(1.0, float(np.abs(m).max()) if m.size else 0.0)
    if float(np.abs(m - m.T).max()) > SYMMETRY_RTOL * scale:
        raise AsymmetricInput(f"{name} is not symmetric within rtol {SYMMETRY_RTOL:g}")


@dataclass(frozen=True)
class PortfolioSpec:
    """Raw model inputs in original risk-factor coordinates.

    theta: cash offset (currency); delta: length-N linear exposures;
    gamma: symmetric N x N quadratic exposures; sigma: SPD N x N factor
    covariance over the horizon.
    """

    theta: float
    delta: np.ndarray
    gamma: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "theta", float(self.theta))
        object.__setattr__(self, "delta", _as_readonly(self.delta))
        object.__setattr__(self, "gamma", _as_readonly(self.gamma))
        object.__setattr__(self, "sigma", _as_readonly(self.sigma))
        n = self.delta.shape[0]
        if self.delta.ndim != 1:
            raise DimensionMismatch("delta must be a vector")
        for name, m in (("gamma", self.gamma), ("sigma", self.sigma)):
            if m.shape != (n, n):
                raise DimensionMismatch(f"{name} must be {n}x{n}, got {m.shape}")
        _check_symmetric(self.gamma, "gamma")
        _check_symmetric(self.sigma, "sigma")
        try:
            scipy.linalg.cholesky(self.sigma, lower=True)
        except scipy.linalg.LinAlgError as exc:
            raise NotPositiveDefinite("sigma is not positive definite") from exc

    @property
    def n_factors(self) -> int:
        return self.delta.shape[0]


@dataclass(frozen=True)
class RemappedPortfolio:
    """Independent-factor parameters: V = theta + sum(delta*Y + lambda*Y^2/2).

    lambda_ is stored sorted ascending.  factor_map holds the mixing matrix C
    (X = C Y) when the portfolio came out of `remap`; it is None when the
    portfolio was written down directly in remapped coordinates.
    """

    theta: float
    delta: np.ndarray
    lambda_: np.ndarray
    factor_map: np.ndarray | None = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "theta", float(self.theta))
        object.__setattr__(self, "delta", _as_readonly(self.delta))
        object.__setattr__(self, "lambda_", _as_readonly(self.lambda_))
        if self.factor_map is not None:
            object.__setattr__(self, "factor_map", _as_readonly(self.factor_map))
        if self.delta.ndim != 1 or self.lambda_.ndim != 1:
            raise DimensionMismatch("delta and lambda must be vectors")
        if self.delta.shape != self.lambda_.shape:
            raise DimensionMismatch("delta and lambda must have equal length")
        if np.any(np.diff(self.lambda_) < 0):
            raise DimensionMismatch("lambda must be sorted ascending")

    @property
    def n_factors(self) -> int:
        return self.delta.shape[0]

    def is_degenerate(self) -> bool:
        """True when V is almost surely the constant theta."""
        return not (np.any(self.delta != 0.0) or np.any(self.lambda_ != 0.0))


@dataclass(frozen=True)
class MomentSet:
    """First four central moments plus standardized shape measures.

    skewness/excess_kurtosis are NaN for the degenerate constant portfolio.
    """

    mu1: float
    mu2: float
    mu3: float
    mu4: float
    skewness: float
    excess_kurtosis: float


def remap(spec: PortfolioSpec) -> RemappedPortfolio:
    """Rotate correlated factors into independent standard normals.

    Canonical construction C = L O with L the lower Cholesky factor of sigma
    and O the orthogonal eigenbasis of L' gamma L, so that C C' = sigma and
    C' gamma C = diag(lambda).  Eigenvalues are returned ascending; ties
    (within 1e-9 relative) are broken by descending |delta_i| so the output
    is reproducible.
    """
    el = scipy.linalg.cholesky(spec.sigma, lower=True)
    m = el.T @ spec.gamma @ el
    m = 0.5 * (m + m.T)
    lam, basis = scipy.linalg.eigh(m)
    delta = basis.T @ (el.T @ spec.delta)
    c = el @ basis

    # eigh already sorts ascending; reorder inside near-equal eigenvalue runs
    # by descending |delta| for a deterministic canonical form
    tol = 1e-9 * max(1.0, float(np.abs(lam).max()) if lam.size else 0.0)
    order = np.arange(lam.size)
    start = 0
    for stop in range(1, lam.size + 1):
        if stop == lam.size or lam[stop] - lam[stop - 1] > tol:
            block = order[start:stop]
            block = block[np.argsort(-np.abs(delta[block]), kind="stable")]
            order[start:stop] = block
            start = stop
    lam, delta, c = lam[order], delta[order], c[:, order]

    scale_s = max(1.0, float(np.abs(spec.sigma).max()))
    scale_l = max(1.0, float(np.abs(lam).max()) if lam.size else 0.0)
    if float(np.abs(c @ c.T - spec.sigma).max()) > RECONSTRUCTION_RTOL * scale_s:
        raise NotPositiveDefinite("factor map does not reproduce sigma")
    diag = c.T @ spec.gamma @ c
    if float(np.abs(diag - np.diag(lam)).max()) > RECONSTRUCTION_RTOL * scale_l:
        raise AsymmetricInput("factor map does not diagonalize gamma")

    return RemappedPortfolio(spec.theta, delta, lam, factor_map=c)


def moments(p: PortfolioSpec | RemappedPortfolio) -> MomentSet:
    """Central moments mu1..mu4 plus skewness and excess kurtosis.

    Accepts either coordinate system; a remapped portfolio is the special
    case sigma = I, delta as given, gamma = diag(lambda).
    """
    # mu4 is assembled as (excess part) + 3 mu2^2 so that the excess
    # kurtosis of a linear portfolio comes out exactly zero
    if isinstance(p, RemappedPortfolio):
        lam, d = p.lambda_, p.delta
        mu1 = p.theta + 0.5 * float(np.sum(lam))
        mu2 = float(d @ d) + 0.5 * float(np.sum(lam**2))
        mu3 = 3.0 * float(d**2 @ lam) + float(np.sum(lam**3))
        excess4 = 12.0 * float(d**2 @ lam**2) + 3.0 * float(np.sum(lam**4))
    elif isinstance(p, PortfolioSpec):
        gs = p.gamma @ p.sigma
        sd = p.sigma @ p.delta
        gs2 = gs @ gs
        mu1 = p.theta + 0.5 * float(np.trace(gs))
        mu2 = float(p.delta @ sd) + 0.5 * float(np.trace(gs2))
        mu3 = 3.0 * float(p.delta @ p.sigma @ gs @ p.delta) + float(np.trace(gs2 @ gs))
        excess4 = 12.0 * float(p.delta @ p.sigma @ gs2 @ p.delta) + 3.0 * float(
            np.trace(gs2 @ gs2)
        )
    else:
        raise DimensionMismatch(f"unsupported portfolio type {type(p).__name__}")

    mu4 = excess4 + 3.0 * mu2**2
    if mu2 > 0.0:
        skew = mu3 / mu2**1.5
        kurt = excess4 / mu2**2
    else:
        mu2 = mu3 = mu4 = 0.0
        skew = kurt = math.nan
    return MomentSet(mu1, mu2, mu3, mu4, skew, kurt)
