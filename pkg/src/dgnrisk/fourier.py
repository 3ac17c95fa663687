"""Fourier inversion of the portfolio CF: tail probability, density, VaR,
Expected Shortfall and first-order parameter sensitivities.

All quantities are single semi-infinite Fourier integrals along a contour
Im(phi) = nu inside (0, nu_plus).  Results are nu-independent up to
quadrature error; nu only conditions the numerics.  Each complex integral
is split into its cosine and sine parts and handed to the oscillatory
quadrature with a decay-scale hint derived from the CF envelope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.optimize

from .charfn import cf, cf_grad, parameter_ids, strip_of_regularity
from .errors import (
    BracketingFailure,
    DegeneratePortfolio,
    LevelOutOfRange,
    OutsideStrip,
    QuadratureFailure,
    VanishingDensity,
)
from .model import RemappedPortfolio, moments
from .quadrature import QuadConfig, fourier_cos, fourier_sin

_DENSITY_FLOOR = 1e-300


@dataclass(frozen=True)
class ContourChoice:
    """Integration contour height nu, strictly inside (0, nu_plus)."""

    nu: float
    nu_plus: float

    def __post_init__(self):
        if not (0.0 < self.nu < self.nu_plus):
            raise OutsideStrip(
                f"contour nu={self.nu:g} not strictly inside (0, {self.nu_plus:g})"
            )


@dataclass(frozen=True)
class RiskPoint:
    """A (level, VaR, ES) triple with propagated quadrature error.

    var is quoted as a loss (positive = money lost); es is None until
    `expected_shortfall` fills it.
    """

    level: float
    var: float
    es: float | None
    quad_error: float
    contour: ContourChoice

    def __post_init__(self):
        if not 0.0 < self.level < 1.0:
            raise LevelOutOfRange(f"level {self.level!r} outside (0, 1)")


@dataclass(frozen=True)
class SensitivityReport:
    """Per-parameter first derivatives of VaR and/or ES at fixed level."""

    dvar: dict[str, float] | None
    des: dict[str, float] | None
    density_at_var: float | None
    quad_error: float


def choose_nu(p: RemappedPortfolio, nu: float | None = None) -> ContourChoice:
    """Default contour: midpoint of (0, nu_plus) when finite, else the
    CF decay scale 1/sqrt(mu2).  Pass nu to override; it is validated."""
    m = moments(p)
    if m.mu2 <= 0.0:
        raise DegeneratePortfolio("portfolio value is a.s. constant")
    _, nu_plus = strip_of_regularity(p)
    if nu is None:
        nu = nu_plus / 2.0 if math.isfinite(nu_plus) else 1.0 / math.sqrt(m.mu2)
    return ContourChoice(float(nu), nu_plus)


def _decay_scale(p: RemappedPortfolio) -> float:
    m = moments(p)
    lam_max = float(np.abs(p.lambda_).max()) if p.n_factors else 0.0
    return 1.0 / max(math.sqrt(m.mu2), lam_max)


def _invert(p, c, cfg, kernel, shift):
    """Re integral_0^inf kernel(w) e^{i w shift} dw via the cos/sin pair.

    kernel maps a real array w to complex values of the full integrand
    excluding the oscillating exponential.
    """
    cfg = cfg or QuadConfig()
    omega_scale = _decay_scale(p)
    x = abs(shift)
    sgn = 1.0 if shift >= 0.0 else -1.0
    rc = fourier_cos(lambda w: np.real(kernel(w)), x, cfg, decay_scale=omega_scale)
    rs = fourier_sin(lambda w: np.imag(kernel(w)), x, cfg, decay_scale=omega_scale)
    if not (rc.converged and rs.converged):
        raise QuadratureFailure(
            f"Fourier integral did not converge (evals={rc.evaluations + rs.evaluations})"
        )
    value = rc.value - sgn * rs.value
    err = rc.abs_error_estimate + rs.abs_error_estimate
    return value, err


def tail_prob(
    p: RemappedPortfolio, var: float, c: ContourChoice, cfg: QuadConfig | None = None
) -> tuple[float, float]:
    """P(V <= -var), the significance level attached to the loss var."""
    nu = c.nu
    kernel = lambda w: cf(p, w + 1j * nu) / (nu - 1j * w)
    value, err = _invert(p, c, cfg, kernel, var)
    pref = math.exp(-nu * var) / math.pi
    prob, perr = pref * value, pref * err
    if prob < 0.0:
        if prob < -perr:
            raise QuadratureFailure(
                f"tail probability {prob:g} more negative than quadrature error {perr:g}"
            )
        prob = 0.0
    return prob, perr


def density_at(
    p: RemappedPortfolio, v: float, c: ContourChoice, cfg: QuadConfig | None = None
) -> tuple[float, float]:
    """Density of the portfolio variation at v, clamped at -quad_error."""
    nu = c.nu
    kernel = lambda w: cf(p, w + 1j * nu)
    value, err = _invert(p, c, cfg, kernel, -v)
    pref = math.exp(nu * v) / math.pi
    dens, derr = pref * value, pref * err
    if dens < 0.0:
        if dens < -derr:
            raise QuadratureFailure(
                f"density {dens:g} more negative than quadrature error {derr:g}"
            )
        dens = 0.0
    return dens, derr


def var_for_level(
    p: RemappedPortfolio, level: float, c: ContourChoice, cfg: QuadConfig | None = None
) -> RiskPoint:
    """Solve tail_prob(var) = level by bracketed root finding.

    The tail probability is strictly decreasing in var, so a geometrically
    expanded bracket around -mu1 +- 10 sqrt(mu2) always straddles the level;
    the root is then polished with a bisection/secant hybrid on the log of
    the tail probability.
    """
    if not 0.0 < level < 1.0:
        raise LevelOutOfRange(f"level {level!r} outside (0, 1)")
    m = moments(p)
    scale = math.sqrt(m.mu2)
    log_level = math.log(level)

    def h(d: float) -> float:
        prob, _ = tail_prob(p, d, c, cfg)
        return math.log(max(prob, 1e-300)) - log_level

    lo = -m.mu1 - 10.0 * scale
    hi = -m.mu1 + 10.0 * scale
    hlo, hhi = h(lo), h(hi)
    for _ in range(60):
        if hlo > 0.0:
            break
        lo -= (hi - lo)
        hlo = h(lo)
    else:
        raise BracketingFailure("could not bracket the level from below")
    for _ in range(60):
        if hhi < 0.0:
            break
        hi += (hi - lo)
        hhi = h(hi)
    else:
        raise BracketingFailure("could not bracket the level from above")

    root = scipy.optimize.brentq(h, lo, hi, xtol=1e-12 * scale, rtol=4 * np.finfo(float).eps)
    prob, perr = tail_prob(p, root, c, cfg)
    dens, _ = density_at(p, -root, c, cfg)
    var_err = (abs(prob - level) + perr) / max(dens, _DENSITY_FLOOR)
    return RiskPoint(level=level, var=float(root), es=None, quad_error=var_err, contour=c)


def expected_shortfall(
    p: RemappedPortfolio, rp: RiskPoint, c: ContourChoice | None = None,
    cfg: QuadConfig | None = None,
) -> RiskPoint:
    """Mean loss beyond the VaR threshold; fills es on the risk point."""
    c = c or rp.contour
    nu = c.nu
    kernel = lambda w: cf(p, w + 1j * nu) / (w + 1j * nu) ** 2
    value, err = _invert(p, c, cfg, kernel, rp.var)
    pref = math.exp(-nu * rp.var) / (math.pi * rp.level)
    es = rp.var - pref * value
    # ES is stationary in var at the exact root, so the var error enters
    # only at second order; the integral error dominates
    es_err = pref * err
    return replace(rp, es=float(es), quad_error=rp.quad_error + es_err)


def _sensitivity_map(p, rp, c, cfg, kernel_for, pref, betas) -> tuple[dict[str, float], float]:
    out: dict[str, float] = {}
    worst = 0.0
    for beta in betas if betas is not None else parameter_ids(p):
        value, err = _invert(p, c, cfg, kernel_for(beta), rp.var)
        out[beta] = pref * value
        worst = max(worst, abs(pref) * err)
    return out, worst


def var_sensitivities(
    p: RemappedPortfolio, rp: RiskPoint, c: ContourChoice | None = None,
    cfg: QuadConfig | None = None, betas=None,
) -> SensitivityReport:
    """d var / d beta at fixed level, for every model parameter by default
    or for the ids listed in betas.

    The theta entry equals -1 identically; it doubles as a self-check of
    the whole inversion pipeline.
    """
    c = c or rp.contour
    nu = c.nu
    dens, dens_err = density_at(p, -rp.var, c, cfg)
    if dens <= _DENSITY_FLOOR * max(1.0, dens_err):
        raise VanishingDensity("density at the VaR point is numerically zero")
    pref = math.exp(-nu * rp.var) / (math.pi * dens)
    kernel_for = lambda beta: (lambda w: cf_grad(p, w + 1j * nu, beta) / (nu - 1j * w))
    dvar, err = _sensitivity_map(p, rp, c, cfg, kernel_for, pref, betas)
    return SensitivityReport(dvar=dvar, des=None, density_at_var=dens, quad_error=err)


def es_sensitivities(
    p: RemappedPortfolio, rp: RiskPoint, c: ContourChoice | None = None,
    cfg: QuadConfig | None = None, betas=None,
) -> SensitivityReport:
    """d ES / d beta at fixed level; betas restricts the parameter set."""
    c = c or rp.contour
    nu = c.nu
    pref = -math.exp(-nu * rp.var) / (math.pi * rp.level)
    kernel_for = lambda beta: (lambda w: cf_grad(p, w + 1j * nu, beta) / (w + 1j * nu) ** 2)
    des, err = _sensitivity_map(p, rp, c, cfg, kernel_for, pref, betas)
    return SensitivityReport(dvar=None, des=des, density_at_var=None, quad_error=err)
