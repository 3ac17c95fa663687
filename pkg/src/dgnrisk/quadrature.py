"""Semi-infinite Fourier-type integrals with controlled error.

Evaluates integral_0^inf g(w) cos(w x) dw and the sine companion for
integrands that decay at infinity.  Two strategies:

* oscillatory (x at least pi over the decay scale): integrate consecutive
  half-period cells [k pi/x, (k+1) pi/x] with a 15-node Gauss-Legendre rule
  plus one bisection refinement per cell, then accelerate the alternating
  partial-sum sequence with Wynn's epsilon algorithm;
* quasi-monotone (x = 0 or below the crossover): adaptive bisection
  quadrature over geometrically growing blocks, with a geometric-envelope
  bound for the truncated tail folded into the error estimate.

Integrands must accept 1-D numpy arrays and return arrays of the same
shape.  The decay scale is a caller-supplied hint (the frequency width of
g); it affects routing and block sizing, never correctness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteIntegrand

_NODES15, _WEIGHTS15 = np.polynomial.legendre.leggauss(15)
_T01 = 0.5 * (_NODES15 + 1.0)
_W01 = 0.5 * _WEIGHTS15
# 45 relative abscissae per cell: full-width rule then the two half rules
_PATTERN = np.concatenate([_T01, 0.5 * _T01, 0.5 + 0.5 * _T01])
_CELL_BATCH = 8
_EPS = float(np.finfo(float).eps)


@dataclass(frozen=True)
class QuadConfig:
    """Tolerances and work limits for the Fourier integrators."""

    abs_tol: float = 1e-12
    rel_tol: float = 1e-9
    max_cycles: int = 200
    max_subdivisions_per_cycle: int = 50

    def __post_init__(self):
        if min(self.abs_tol, self.rel_tol) <= 0 or min(self.max_cycles, self.max_subdivisions_per_cycle) <= 0:
            raise ValueError("all QuadConfig fields must be positive")


@dataclass(frozen=True)
class QuadResult:
    value: float
    abs_error_estimate: float
    evaluations: int
    converged: bool


def _eval_panels(g, x: float, trig, a: np.ndarray, b: np.ndarray):
    """Coarse and refined Gauss-Legendre sums over the panels [a_i, b_i].

    Returns (coarse, fine, n_evaluations); fine is the two-half composite.
    """
    width = b - a
    nodes = a[:, None] + width[:, None] * _PATTERN[None, :]
    vals = np.asarray(g(nodes.ravel()), dtype=float).reshape(nodes.shape)
    if not np.all(np.isfinite(vals)):
        raise NonFiniteIntegrand("integrand returned a non-finite value")
    if x != 0.0:
        vals = vals * trig(nodes * x)
    coarse = (vals[:, :15] @ _W01) * width
    fine = ((vals[:, 15:30] @ _W01) + (vals[:, 30:45] @ _W01)) * (0.5 * width)
    return coarse, fine, nodes.size


class _EpsilonTable:
    """Incremental Wynn epsilon extrapolation of a partial-sum sequence."""

    def __init__(self):
        self._diag: list[float] = []
        self.limit = math.nan

    def append(self, s: float) -> float:
        old = self._diag
        new = [s]
        for k in range(1, len(old) + 1):
            denom = old[k - 1] - new[k - 1]
            if denom == 0.0 or not math.isfinite(denom):
                break
            prev2 = old[k - 2] if k >= 2 else 0.0
            val = prev2 + 1.0 / denom
            if not math.isfinite(val):
                break
            new.append(val)
        self._diag = new
        k = len(new) - 1
        if k % 2 == 1:
            k -= 1
        self.limit = new[k]
        return self.limit


def _oscillatory(g, x: float, trig, cfg: QuadConfig, origin: float = 0.0) -> QuadResult:
    """Half-period cells from origin upward, epsilon-accelerated.

    Works for any absolutely or conditionally convergent tail: the partial
    sums alternate once past a one-cell transient, which is exactly what
    Wynn's algorithm accelerates.
    """
    h = math.pi / x
    table = _EpsilonTable()
    partial = 0.0
    cell_err = 0.0
    evals = 0
    limits: list[float] = []
    streak = 0
    err_est = math.inf

    for start in range(0, cfg.max_cycles, _CELL_BATCH):
        ks = np.arange(start, min(start + _CELL_BATCH, cfg.max_cycles), dtype=float)
        coarse, fine, n = _eval_panels(g, x, trig, origin + ks * h, origin + (ks + 1.0) * h)
        evals += n
        for c, f in zip(coarse, fine):
            partial += f
            cell_err += abs(f - c)
            limits.append(table.append(partial))
            if len(limits) < 5:
                continue
            tol = max(cfg.abs_tol, cfg.rel_tol * abs(limits[-1]))
            step = 2.0 * (
                abs(limits[-1] - limits[-2])
                + abs(limits[-2] - limits[-3])
                + 0.5 * abs(limits[-3] - limits[-4])
            )
            err_est = step + cell_err
            if err_est <= 0.5 * tol:
                streak += 1
                if streak >= 3:
                    return QuadResult(limits[-1], err_est, evals, True)
            else:
                streak = 0

    value = limits[-1] if limits else partial
    tol = max(cfg.abs_tol, cfg.rel_tol * abs(value))
    return QuadResult(value, max(err_est, tol), evals, False)


def _adaptive_block(g, x, trig, a, b, tol_alloc, max_splits):
    """Bisection-adaptive quadrature on [a, b]; returns (value, err, evals)."""
    total_width = b - a
    stack_a = np.array([a])
    stack_b = np.array([b])
    value = 0.0
    err = 0.0
    evals = 0
    splits = 0
    while stack_a.size:
        coarse, fine, n = _eval_panels(g, x, trig, stack_a, stack_b)
        evals += n
        diff = np.abs(fine - coarse)
        local_tol = np.maximum(
            tol_alloc * (stack_b - stack_a) / total_width,
            50.0 * _EPS * np.abs(fine),
        )
        ok = (diff <= local_tol) | (splits >= max_splits)
        value += float(fine[ok].sum())
        err += float(diff[ok].sum())
        ra, rb = stack_a[~ok], stack_b[~ok]
        splits += ra.size
        mid = 0.5 * (ra + rb)
        stack_a = np.concatenate([ra, mid])
        stack_b = np.concatenate([mid, rb])
    return value, err, evals


def _quasi_monotone(g, x: float, trig, cfg: QuadConfig, width0: float) -> QuadResult:
    """Geometrically growing adaptive blocks from the origin.

    When x > 0 the block width is capped at the half-period pi/x: once an
    integrand survives that far out, oscillation dominates the block
    structure and the remaining tail is handed to the cell-plus-epsilon
    machinery instead, which also covers conditionally convergent tails.
    """
    cap = math.pi / x if x > 0.0 else math.inf
    total = 0.0
    toterr = 0.0
    evals = 0
    a = 0.0
    width = width0
    prev_mag = None
    small_streak = 0

    for cycle in range(cfg.max_cycles):
        if width > cap:
            osc = _oscillatory(g, x, trig, cfg, origin=a)
            err = toterr + osc.abs_error_estimate
            return QuadResult(total + osc.value, err, evals + osc.evaluations,
                              osc.converged)
        tol = max(cfg.abs_tol, cfg.rel_tol * abs(total))
        v, e, n = _adaptive_block(
            g, x, trig, a, a + width, 0.25 * tol, cfg.max_subdivisions_per_cycle
        )
        total += v
        toterr += e
        evals += n
        mag = abs(v)
        tol = max(cfg.abs_tol, cfg.rel_tol * abs(total))

        tail = math.inf
        if prev_mag is not None and prev_mag > 0.0:
            r = mag / prev_mag
            if r < 0.75:
                tail = mag * r / (1.0 - r)
        elif prev_mag == 0.0 and mag == 0.0:
            tail = 0.0
        if mag <= 0.1 * tol and tail <= 0.5 * tol:
            small_streak += 1
            if small_streak >= 2:
                err = toterr + tail
                return QuadResult(total, err, evals, err <= tol)
        else:
            small_streak = 0

        prev_mag = mag
        a += width
        if cycle >= 1:
            width *= 2.0

    tol = max(cfg.abs_tol, cfg.rel_tol * abs(total))
    return QuadResult(total, max(toterr, tol) + abs(prev_mag or 0.0), evals, False)


def _fourier(g, x, cfg, decay_scale, trig, odd: bool) -> QuadResult:
    if x < 0.0:
        raise ValueError("oscillation frequency x must be non-negative")
    if not (decay_scale > 0.0 and math.isfinite(decay_scale)):
        raise ValueError("decay_scale must be positive and finite")
    cfg = cfg or QuadConfig()
    if odd and x == 0.0:
        return QuadResult(0.0, 0.0, 0, True)
    if x > 0.0 and x >= math.pi / decay_scale:
        # sine cells open with sign +; the first cosine cell integrates to
        # the same alternating pattern after a one-cell transient
        return _oscillatory(g, x, trig, 1.0, cfg)
    return _quasi_monotone(g, x, trig, cfg, decay_scale)


def fourier_cos(g, x: float, cfg: QuadConfig | None = None, *, decay_scale: float = 1.0) -> QuadResult:
    """integral_0^inf g(w) cos(w x) dw for absolutely integrable g."""
    return _fourier(g, x, cfg, decay_scale, np.cos, odd=False)


def fourier_sin(g, x: float, cfg: QuadConfig | None = None, *, decay_scale: float = 1.0) -> QuadResult:
    """integral_0^inf g(w) sin(w x) dw; exactly zero at x = 0."""
    return _fourier(g, x, cfg, decay_scale, np.sin, odd=True)
