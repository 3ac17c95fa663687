"""Portfolio document parsing and report serialization for the CLI.

A portfolio file is a JSON document carrying exactly one of two parameter
blocks:

* raw:      {"theta": s, "delta": [...], "gamma": [[...]], "sigma": [[...]]}
* remapped: {"theta": s, "delta": [...], "lambda": [...]}

plus an optional "metadata" object ({"name": ..., "horizon_days": ...}).
Matrices are row-major lists of rows.  Unknown top-level keys are ignored
so that the remap command's enriched output re-ingests cleanly.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .errors import DgnRiskError
from .model import PortfolioSpec, RemappedPortfolio, remap


class PortfolioFileError(DgnRiskError):
    """Portfolio document is structurally valid JSON but not a portfolio."""


def parse_document(text: str) -> dict:
    """JSON-decode a portfolio document; json.JSONDecodeError on bad input."""
    doc = json.loads(text)
    if not isinstance(doc, dict):
        raise PortfolioFileError("portfolio document must be a JSON object")
    return doc


def portfolio_from_document(doc: dict) -> tuple[RemappedPortfolio, dict]:
    """Build a remapped portfolio from a parsed document.

    Raw documents are remapped on the fly; remapped ones are re-sorted into
    the canonical ascending-lambda order (a factor permutation, harmless).
    Returns (portfolio, metadata).
    """
    has_raw = "gamma" in doc or "sigma" in doc
    has_remapped = "lambda" in doc
    if has_raw and has_remapped:
        raise PortfolioFileError("document carries both raw and remapped parameter blocks")
    if not has_raw and not has_remapped:
        raise PortfolioFileError("document carries neither raw nor remapped parameters")
    if "theta" not in doc or "delta" not in doc:
        raise PortfolioFileError("document must define theta and delta")
    meta = doc.get("metadata", {})
    if not isinstance(meta, dict):
        raise PortfolioFileError("metadata must be an object")

    theta = float(doc["theta"])
    delta = np.asarray(doc["delta"], dtype=float)
    if has_raw:
        if "gamma" not in doc or "sigma" not in doc:
            raise PortfolioFileError("raw documents need both gamma and sigma")
        spec = PortfolioSpec(
            theta=theta,
            delta=delta,
            gamma=np.asarray(doc["gamma"], dtype=float),
            sigma=np.asarray(doc["sigma"], dtype=float),
        )
        return remap(spec), meta

    lam = np.asarray(doc["lambda"], dtype=float)
    if lam.shape != delta.shape:
        raise PortfolioFileError("delta and lambda must have equal length")
    order = np.lexsort((-np.abs(delta), lam))
    return RemappedPortfolio(theta, delta[order], lam[order]), meta


def load_portfolio(path: str) -> tuple[RemappedPortfolio, dict]:
    with open(path, "r", encoding="utf-8") as fh:
        return portfolio_from_document(parse_document(fh.read()))


def format_value(x: Any) -> str:
    """CSV cell serialization: floats at 17 significant digits."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def csv_line(cells) -> str:
    return ",".join(format_value(c) for c in cells)
