"""Command-line surface of the risk engine.

Subcommands: remap | risk | sens | pdf | mc.  CSV goes to stdout,
diagnostics to stderr.  Exit codes: 0 success, 2 parse error, 3 validation
error, 4 quadrature/root-finding failure, 5 Monte Carlo CI miss (mc
without --no-strict).  RISK_QUAD_TOL overrides the default absolute
quadrature tolerance; the --tol flag wins over the environment.
"""

from __future__ import annotations

import json
import math
import os
import sys

import click
import numpy as np

from . import fourier, mc, tails
from .charfn import parameter_ids, strip_of_regularity
from .errors import (
    BracketingFailure,
    DgnRiskError,
    OutsideStrip,
    QuadratureFailure,
)
from .fileio import csv_line, load_portfolio
from .model import moments
from .quadrature import QuadConfig

EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_NUMERICS = 4
EXIT_CI_MISS = 5


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        _fail(EXIT_PARSE, f"cannot read {path}: {exc}")
    try:
        from .fileio import parse_document, portfolio_from_document

        doc = parse_document(text)
    except (json.JSONDecodeError, DgnRiskError) as exc:
        _fail(EXIT_PARSE, f"{path}: {exc}")
    try:
        return portfolio_from_document(doc)
    except (DgnRiskError, ValueError) as exc:
        _fail(EXIT_VALIDATION, f"{path}: {exc}")


def _quad_config(tol: float | None) -> QuadConfig:
    if tol is None:
        env = os.environ.get("RISK_QUAD_TOL")
        tol = float(env) if env else None
    return QuadConfig(abs_tol=tol) if tol else QuadConfig()


def _contour(p, nu: float | None):
    try:
        return fourier.choose_nu(p, nu)
    except OutsideStrip as exc:
        _fail(EXIT_VALIDATION, str(exc))
    except DgnRiskError as exc:
        _fail(EXIT_VALIDATION, str(exc))


def _parse_levels(text: str) -> list[float]:
    try:
        levels = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        _fail(EXIT_VALIDATION, f"cannot parse levels {text!r}")
    if not levels or any(not 0.0 < a < 1.0 for a in levels):
        _fail(EXIT_VALIDATION, "levels must lie strictly inside (0, 1)")
    return levels


@click.group()
def main():
    """Delta-gamma-normal portfolio risk engine."""


@main.command()
@click.argument("input_file", type=click.Path())
def remap(input_file):
    """Remap a portfolio file and print the enriched remapped document."""
    p, meta = _load(input_file)
    nu_minus, nu_plus = strip_of_regularity(p)
    tp = tails.tail_profile(p)
    m = moments(p)
    doc = {
        "metadata": meta,
        "theta": p.theta,
        "delta": p.delta.tolist(),
        "lambda": p.lambda_.tolist(),
        "strip": {"nu_minus": nu_minus, "nu_plus": nu_plus},
        "tail": {
            "regime": tp.regime.value,
            "v_inf": tp.v_inf,
            "v_sup": tp.v_sup,
            "m_bar": tp.m_bar,
            "v0": tp.v0,
            "distinct_lambdas": list(tp.distinct_lambdas),
            "multiplicities": list(tp.multiplicities),
            "delta_bar_sq": list(tp.delta_bar_sq),
        },
        "moments": {
            "mu1": m.mu1,
            "mu2": m.mu2,
            "mu3": m.mu3,
            "mu4": m.mu4,
            "skewness": m.skewness,
            "excess_kurtosis": m.excess_kurtosis,
        },
    }
    click.echo(json.dumps(doc, indent=2))


@main.command()
@click.argument("input_file", type=click.Path())
@click.option("--levels", required=True, help="comma-separated significance levels")
@click.option("--nu", type=float, default=None, help="override the contour height")
@click.option("--tol", type=float, default=None, help="absolute quadrature tolerance")
def risk(input_file, levels, nu, tol):
    """VaR and ES per level as CSV: level,var,es,quad_error."""
    p, _ = _load(input_file)
    cfg = _quad_config(tol)
    c = _contour(p, nu)
    rows = []
    for level in _parse_levels(levels):
        try:
            rp = fourier.var_for_level(p, level, c, cfg)
            rp = fourier.expected_shortfall(p, rp, c, cfg)
        except (QuadratureFailure, BracketingFailure) as exc:
            _fail(EXIT_NUMERICS, f"level {level:g}: {exc}")
        rows.append((level, rp.var, rp.es, rp.quad_error))
    click.echo("level,var,es,quad_error")
    for row in rows:
        click.echo(csv_line(row))


@main.command()
@click.argument("input_file", type=click.Path())
@click.option("--level", type=float, required=True)
@click.option("--nu", type=float, default=None)
@click.option("--tol", type=float, default=None)
def sens(input_file, level, nu, tol):
    """VaR and ES sensitivities per parameter as CSV."""
    if not 0.0 < level < 1.0:
        _fail(EXIT_VALIDATION, "level must lie strictly inside (0, 1)")
    p, _ = _load(input_file)
    cfg = _quad_config(tol)
    c = _contour(p, nu)
    try:
        rp = fourier.var_for_level(p, level, c, cfg)
        rp = fourier.expected_shortfall(p, rp, c, cfg)
        sv = fourier.var_sensitivities(p, rp, c, cfg)
        se = fourier.es_sensitivities(p, rp, c, cfg)
    except (QuadratureFailure, BracketingFailure) as exc:
        _fail(EXIT_NUMERICS, f"level {level:g}: {exc}")
    if abs(sv.dvar["theta"] + 1.0) > 1e-6:
        click.echo(
            f"warning: theta self-check off by {sv.dvar['theta'] + 1.0:.3g}", err=True
        )
    click.echo("parameter,dvar,des")
    for beta in parameter_ids(p):
        click.echo(csv_line((beta, sv.dvar[beta], se.des[beta])))


@main.command()
@click.argument("input_file", type=click.Path())
@click.option("--range", "vrange", required=True, help="grid bounds as lo:hi")
@click.option("--points", type=int, required=True)
@click.option("--overlay-tail", is_flag=True, default=False,
              help="fit and emit the left-tail asymptote column")
@click.option("--nu", type=float, default=None)
@click.option("--tol", type=float, default=None)
def pdf(input_file, vrange, points, overlay_tail, nu, tol):
    """Density on a uniform grid as CSV: v,density[,asymptote]."""
    try:
        lo, hi = (float(tok) for tok in vrange.split(":"))
    except ValueError:
        _fail(EXIT_VALIDATION, f"cannot parse --range {vrange!r}; expected lo:hi")
    if not (hi > lo and points >= 2):
        _fail(EXIT_VALIDATION, "need hi > lo and at least 2 points")
    p, _ = _load(input_file)
    cfg = _quad_config(tol)
    c = _contour(p, nu)
    grid = np.linspace(lo, hi, points)
    dens = np.empty(points)
    for i, v in enumerate(grid):
        try:
            dens[i], _ = fourier.density_at(p, float(v), c, cfg)
        except QuadratureFailure as exc:
            _fail(EXIT_NUMERICS, f"v {v:g}: {exc}")

    overlay = None
    if overlay_tail:
        tp = tails.tail_profile(p)
        if tp.regime is tails.Regime.POSITIVE_MIN:
            _fail(EXIT_VALIDATION,
                  "left tail has bounded support; no asymptote to overlay")
        window = max(2, math.ceil(points * 0.10))
        mask = dens[:window] > 1e-300
        if not mask.any():
            _fail(EXIT_VALIDATION, "no density mass in the tail-fit window")
        logshape = np.asarray(tails.asymptotic_left_log_density(tp, grid))
        const = float(np.mean(np.log(dens[:window][mask]) - logshape[:window][mask]))
        with np.errstate(over="ignore"):
            overlay = np.exp(const + logshape)

    click.echo("v,density,asymptote" if overlay_tail else "v,density")
    for i in range(points):
        row = (float(grid[i]), float(dens[i]))
        if overlay is not None:
            row = row + (float(overlay[i]),)
        click.echo(csv_line(row))


@main.command("mc")
@click.argument("input_file", type=click.Path())
@click.option("--samples", type=int, default=1_000_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--levels", required=True)
@click.option("--cl", type=float, default=0.98, show_default=True)
@click.option("--sens", "sens_betas", default=None,
              help="comma-separated parameter ids for FD sensitivities")
@click.option("--shock", type=float, default=None, help="FD shock size")
@click.option("--no-strict", is_flag=True, default=False,
              help="do not fail the exit code on a CI miss")
@click.option("--nu", type=float, default=None)
@click.option("--tol", type=float, default=None)
def mc_cmd(input_file, samples, seed, levels, cl, sens_betas, shock, no_strict, nu, tol):
    """Fourier vs Monte Carlo comparison CSV, CI offsets included."""
    p, _ = _load(input_file)
    cfg = _quad_config(tol)
    c = _contour(p, nu)
    level_list = _parse_levels(levels)
    if not 0.0 < cl < 1.0:
        _fail(EXIT_VALIDATION, "confidence level must lie inside (0, 1)")
    sample = mc.simulate(p, samples, seed)

    all_inside = True
    risk_rows = []
    for level in level_list:
        try:
            rp = fourier.var_for_level(p, level, c, cfg)
            rp = fourier.expected_shortfall(p, rp, c, cfg)
        except (QuadratureFailure, BracketingFailure) as exc:
            _fail(EXIT_NUMERICS, f"level {level:g}: {exc}")
        try:
            vci = mc.var_ci(sample, level, cl)
            eci = mc.es_ci(sample, level, cl)
        except DgnRiskError as exc:
            _fail(EXIT_VALIDATION, f"level {level:g}: {exc}")
        inside = vci.contains(rp.var) and eci.contains(rp.es)
        all_inside = all_inside and inside
        risk_rows.append((level, rp.var, rp.es, vci.point, vci.lower_offset,
                          vci.upper_offset, eci.point, eci.lower_offset,
                          eci.upper_offset, inside))

    sens_rows = []
    if sens_betas:
        betas = [tok.strip() for tok in sens_betas.split(",") if tok.strip()]
        known = set(parameter_ids(p))
        bad = [b for b in betas if b not in known]
        if bad:
            _fail(EXIT_VALIDATION, f"unknown parameter ids: {', '.join(bad)}")
        for level in level_list:
            try:
                rp = fourier.var_for_level(p, level, c, cfg)
                rp = fourier.expected_shortfall(p, rp, c, cfg)
                sv = fourier.var_sensitivities(p, rp, c, cfg)
                se = fourier.es_sensitivities(p, rp, c, cfg)
            except (QuadratureFailure, BracketingFailure) as exc:
                _fail(EXIT_NUMERICS, f"level {level:g}: {exc}")
            for beta in betas:
                used_shock = shock if shock is not None else mc.default_shock(p, beta)
                for measure, analytic in (("var", sv.dvar[beta]), ("es", se.des[beta])):
                    est = mc.fd_sensitivity(p, beta, used_shock, level, samples,
                                            seed, cl, measure=measure, sample=sample)
                    # the theta row is exact (zero-width CI); compare it at
                    # the quadrature tolerance instead
                    inside = est.contains(analytic) or (
                        beta == "theta" and abs(analytic - est.point) <= 1e-6
                    )
                    all_inside = all_inside and inside
                    sens_rows.append((level, beta, measure, used_shock, est.point,
                                      est.lower_offset, est.upper_offset, analytic,
                                      inside))

    click.echo("level,var_fourier,es_fourier,var_mc,var_err_minus,var_err_plus,"
               "es_mc,es_err_minus,es_err_plus,inside_ci")
    for row in risk_rows:
        click.echo(csv_line(row))
    if sens_rows:
        click.echo("level,parameter,measure,shock,fd_value,fd_err_minus,"
                   "fd_err_plus,fourier_value,inside_ci")
        for row in sens_rows:
            click.echo(csv_line(row))
    if not all_inside and not no_strict:
        click.echo("error: a Fourier value fell outside its Monte Carlo "
                   "confidence interval", err=True)
        sys.exit(EXIT_CI_MISS)


if __name__ == "__main__":
    main()
