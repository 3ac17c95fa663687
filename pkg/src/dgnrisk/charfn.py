"""Characteristic function of the quadratic portfolio and its gradients.

For independent factors the CF factorizes:

    f(phi) = exp(i theta phi) * prod_i (1 - i lambda_i phi)^(-1/2)
             * exp(-delta_i^2 phi^2 / (2 (1 - i lambda_i phi)))

valid for complex phi with Im(phi) inside the strip of regularity.  Inside
the strip every factor 1 - i lambda_i phi has strictly positive real part,
so the principal square root applied factor by factor never crosses a
branch cut and no phase tracking is needed.

Parameters are addressed by string ids: "theta", "delta_<i>", "lambda_<i>"
with 0-based factor index i.
"""

from __future__ import annotations

import numpy as np

from .errors import OutsideStrip, UnknownParameter
from .model import RemappedPortfolio


def strip_of_regularity(p: RemappedPortfolio) -> tuple[float, float]:
    """Return (nu_minus, nu_plus) bounding admissible contour heights.

    The CF has purely imaginary singularities at -i/lambda_i for every
    nonzero eigenvalue.  The nearest ones to the origin come from the
    extreme eigenvalues: nu_plus = 1/|lambda_min| when lambda_min < 0 and
    +inf otherwise; nu_minus = -1/lambda_max when lambda_max > 0 and -inf
    otherwise.
    """
    lam = p.lambda_
    if lam.size == 0:
        return (-np.inf, np.inf)
    lo, hi = float(lam[0]), float(lam[-1])
    nu_plus = abs(1.0 / lo) if lo < 0.0 else np.inf
    nu_minus = -1.0 / hi if hi > 0.0 else -np.inf
    return (nu_minus, nu_plus)


def _check_in_strip(p: RemappedPortfolio, phi) -> None:
    nu_minus, nu_plus = strip_of_regularity(p)
    im = np.imag(np.asarray(phi))
    if np.any(im <= nu_minus) or np.any(im >= nu_plus):
        raise OutsideStrip(
            f"Im(phi) must lie strictly inside ({nu_minus:g}, {nu_plus:g})"
        )


def cf(p: RemappedPortfolio, phi):
    """Characteristic function at complex frequency phi (scalar or array).

    Raises OutsideStrip when Im(phi) reaches a singularity.  f(0) = 1.
    """
    _check_in_strip(p, phi)
    phi = np.asarray(phi, dtype=complex)
    scalar = phi.ndim == 0
    ph = np.atleast_1d(phi)[:, None]
    t = 1.0 - 1j * p.lambda_[None, :] * ph
    expo = 1j * p.theta * ph[:, 0] - 0.5 * np.sum(p.delta[None, :] ** 2 * ph**2 / t, axis=1)
    val = np.exp(expo) / np.prod(np.sqrt(t), axis=1)
    return complex(val[0]) if scalar else val


def parameter_ids(p: RemappedPortfolio) -> list[str]:
    """All first-order parameter ids: theta, delta_0.., lambda_0.."""
    n = p.n_factors
    return ["theta"] + [f"delta_{i}" for i in range(n)] + [f"lambda_{i}" for i in range(n)]


def _parse_parameter(p: RemappedPortfolio, which: str) -> tuple[str, int]:
    if which == "theta":
        return ("theta", -1)
    for kind in ("delta", "lambda"):
        if which.startswith(kind + "_"):
            try:
                i = int(which[len(kind) + 1 :])
            except ValueError:
                break
            if 0 <= i < p.n_factors:
                return (kind, i)
            raise UnknownParameter(f"factor index out of range in {which!r}")
    raise UnknownParameter(f"unknown parameter id {which!r}")


def cf_grad(p: RemappedPortfolio, phi, which: str):
    """Derivative of the CF with respect to one model parameter.

    d f/d theta    = i phi f
    d f/d delta_i  = -delta_i phi^2 f / (1 - i lambda_i phi)
    d f/d lambda_i = i phi / (2 (1 - i lambda_i phi))
                     * [1 - delta_i^2 phi^2 / (1 - i lambda_i phi)] * f
    """
    kind, i = _parse_parameter(p, which)
    f = cf(p, phi)
    phi = np.asarray(phi, dtype=complex)
    if kind == "theta":
        return 1j * phi * f
    t = 1.0 - 1j * p.lambda_[i] * phi
    if kind == "delta":
        return -p.delta[i] * phi**2 / t * f
    return 1j * phi / (2.0 * t) * (1.0 - p.delta[i] ** 2 * phi**2 / t) * f
