"""Manifold-spec JSON loading and validation.

The on-disk format (schema 1):

    {
      "schema": 1,
      "name": "flat-const",              // optional
      "description": "...",              // optional
      "dimension": 2,
      "coordinates": ["x1", "x2"],
      "metric": [["1", "0"], ["0", "1"]],
      "beta": ["0.5", "0"],
      "domain": [[-1.0, 1.0], [-1.0, 1.0]],
      "measure": {"kind": "custom", "density": "exp(x1)"}   // optional
    }

All expressions are strings in the expr-module grammar.  Validation
reproduces the RandersSpace invariants: consistent shapes, parseable
expressions, a symmetric positive-definite metric at probe points, and
sup ||beta|| < 1.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from . import expr, randers, scurvature

SCHEMA_VERSION = 1

__all__ = [
    "SCHEMA_VERSION",
    "SpecValidationError",
    "validate_spec_data",
    "load_spec",
    "space_from_spec",
    "measure_from_spec",
    "spec_digest",
]


class SpecValidationError(ValueError):
    """The manifold spec file is malformed or inconsistent."""


def spec_digest(raw: bytes) -> str:
    return hashlib.sha256(raw).hexdigest()


def load_spec(path) -> tuple[dict, str]:
    """Read and validate a spec file; returns (data, sha256 digest)."""
    raw = Path(path).read_bytes()
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise SpecValidationError(f"not valid JSON: {exc}") from None
    validate_spec_data(data)
    return data, spec_digest(raw)


def validate_spec_data(data) -> None:
    if not isinstance(data, dict):
        raise SpecValidationError("spec must be a JSON object")
    if data.get("schema") != SCHEMA_VERSION:
        raise SpecValidationError(
            f"unsupported schema {data.get('schema')!r}; this tool reads schema {SCHEMA_VERSION}"
        )
    for key in ("dimension", "coordinates", "metric", "beta", "domain"):
        if key not in data:
            raise SpecValidationError(f"missing required field '{key}'")
    n = data["dimension"]
    if not isinstance(n, int) or n < 2:
        raise SpecValidationError(f"dimension must be an integer >= 2, got {n!r}")
    coords = data["coordinates"]
    if (
        not isinstance(coords, list)
        or len(coords) != n
        or not all(isinstance(c, str) for c in coords)
    ):
        raise SpecValidationError(f"coordinates must be {n} names")
    if len(set(coords)) != n:
        raise SpecValidationError("coordinate names must be distinct")
    metric = data["metric"]
    if (
        not isinstance(metric, list)
        or len(metric) != n
        or any(not isinstance(row, list) or len(row) != n for row in metric)
        or any(not isinstance(e, str) for row in metric for e in row)
    ):
        raise SpecValidationError(f"metric must be an {n}x{n} array of expression strings")
    one_form = data["beta"]
    if (
        not isinstance(one_form, list)
        or len(one_form) != n
        or any(not isinstance(e, str) for e in one_form)
    ):
        raise SpecValidationError(f"beta must be {n} expression strings")
    domain = data["domain"]
    if (
        not isinstance(domain, list)
        or len(domain) != n
        or any(not isinstance(iv, list) or len(iv) != 2 for iv in domain)
    ):
        raise SpecValidationError(f"domain must be {n} [lo, hi] intervals")
    for lo, hi in domain:
        if not (isinstance(lo, (int, float)) and isinstance(hi, (int, float)) and lo < hi):
            raise SpecValidationError(f"bad domain interval [{lo!r}, {hi!r}]")
    for source in [e for row in metric for e in row] + list(one_form):
        try:
            expr.parse(source, coords)
        except expr.ExprError as exc:
            raise SpecValidationError(f"bad expression '{source}': {exc}") from None
    measure = data.get("measure")
    if measure is not None:
        if not isinstance(measure, dict) or "kind" not in measure:
            raise SpecValidationError("measure must be an object with a 'kind'")
        kind = measure["kind"]
        if kind not in scurvature.MEASURE_KINDS:
            raise SpecValidationError(
                f"measure kind '{kind}' not in {scurvature.MEASURE_KINDS}"
            )
        if kind == "custom":
            density = measure.get("density")
            if not isinstance(density, str):
                raise SpecValidationError("custom measure needs a 'density' expression")
            try:
                expr.parse(density, coords)
            except expr.ExprError as exc:
                raise SpecValidationError(f"bad density '{density}': {exc}") from None


def space_from_spec(data: dict, probe_count: int = 100, seed: int = 0):
    """Build and probe-validate the RandersSpace described by `data`."""
    space = randers.build_space(
        data["coordinates"], data["domain"], data["metric"], data["beta"]
    )
    randers.validate_space(space, probe_count, seed)
    return space


def measure_from_spec(space, data: dict, kind: str | None = None):
    """Measure selected by `kind`, falling back to the spec's measure field.

    Default when neither is given: the Busemann-Hausdorff measure (the
    certificate measure of the vanishing-S criterion).
    """
    declared = data.get("measure") or {}
    chosen = kind or declared.get("kind") or "busemann-hausdorff"
    density_field = None
    if chosen == "custom":
        source = declared.get("density")
        if not isinstance(source, str):
            raise SpecValidationError(
                "custom measure requested but the spec has no measure.density"
            )
        density_field = expr.parse(source, data["coordinates"])
    return scurvature.measure_from_kind(space, chosen, density_field)
