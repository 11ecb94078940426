"""Randers structures F = alpha + beta and the vanishing-S criterion.

A RandersSpace holds a Riemannian metric a_ij and a one-form b_i as
parsed coordinate expressions.  This module computes the covariant
derivative b_{i|j}, the Killing / constant-length / parallel defects,
the closed-form spray with its X/Y split, the Busemann-Hausdorff
density, and the final verdict: the space admits a measure with
vanishing S-curvature exactly when beta is a Killing form of constant
length, and the certificate measure is the Busemann-Hausdorff one.
"""

from __future__ import annotations

import math
import weakref
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import expr, jets
from .core import CoordinateChart, FinslerStructure, probe_points
from .jets import Scalar, partial, seed_group, standard_part
from .linalg import det, inv, sum_

__all__ = [
    "RandersSpace",
    "BetaAnalysis",
    "TheoremVerdict",
    "InvalidSpaceError",
    "build_space",
    "validate_space",
    "alpha",
    "beta",
    "finsler",
    "beta_length",
    "beta_length_squared",
    "levi_civita",
    "covariant_derivative",
    "length_gradient",
    "spray_closed_form",
    "trace_dX_dv",
    "trace_dY_dv",
    "trace_dY_closed_form",
    "is_berwald",
    "analyze_beta",
    "theorem_verdict",
    "bh_density_closed_form",
]


class InvalidSpaceError(ValueError):
    """The (a, b) data violates a Randers-space requirement."""


@dataclass(frozen=True, eq=False)
class RandersSpace:
    chart: CoordinateChart
    a: tuple  # n x n of ScalarField; [i][j] and [j][i] are the same object
    b: tuple  # n of ScalarField

    @property
    def dimension(self) -> int:
        return self.chart.dimension


# Compiled expression tables, keyed by space identity (spaces are immutable).
_COMPILED: "weakref.WeakKeyDictionary[RandersSpace, dict]" = weakref.WeakKeyDictionary()


def _fns(space: RandersSpace) -> dict:
    table = _COMPILED.get(space)
    if table is None:
        names = space.chart.names
        n = space.dimension
        table = {
            "a": [
                [expr.compile_field(space.a[i][j], names) for j in range(n)]
                for i in range(n)
            ],
            "b": [expr.compile_field(f, names) for f in space.b],
        }
        _COMPILED[space] = table
    return table


@dataclass
class BetaAnalysis:
    """Probe statistics of the one-form's covariant derivative and length."""

    probes: list
    covariant: list  # one b_{i|j} matrix per probe
    killing_defect_sup: float
    parallel_defect_sup: float
    length_min: float
    length_max: float
    length_gradient_sup: float


@dataclass
class TheoremVerdict:
    admits: bool
    reason: str  # killing-violated | length-not-constant | satisfied
    analysis: BetaAnalysis
    bh_density_probe_values: Optional[list]
    tol_killing: float
    tol_length: float


REASON_KILLING = "killing-violated"
REASON_LENGTH = "length-not-constant"
REASON_SATISFIED = "satisfied"


def build_space(
    names: Sequence[str],
    bounds: Sequence[tuple[float, float]],
    metric: Sequence[Sequence[str]],
    one_form: Sequence[str],
) -> RandersSpace:
    """Parse expression strings into a RandersSpace.

    The metric must be symmetric: mirrored entries are accepted when the
    ASTs match or the values agree at 20 probe points; the stored matrix
    then shares one field per unordered index pair, so symmetry is exact
    from here on.  Call validate_space afterwards for the probe-based
    positivity checks.
    """
    chart = CoordinateChart(tuple(names), tuple((float(lo), float(hi)) for lo, hi in bounds))
    n = chart.dimension
    if len(metric) != n or any(len(row) != n for row in metric):
        raise InvalidSpaceError(f"metric must be {n}x{n}")
    if len(one_form) != n:
        raise InvalidSpaceError(f"one-form must have {n} components")
    parsed = [[expr.parse(metric[i][j], names) for j in range(n)] for i in range(n)]
    b = tuple(expr.parse(s, names) for s in one_form)
    _check_symmetry(chart, parsed, metric)
    a = tuple(
        tuple(parsed[i][j] if i <= j else parsed[j][i] for j in range(n))
        for i in range(n)
    )
    return RandersSpace(chart=chart, a=a, b=b)


def _check_symmetry(chart, parsed, metric) -> None:
    n = chart.dimension
    pts = None
    for i in range(n):
        for j in range(i + 1, n):
            if parsed[i][j].ast == parsed[j][i].ast:
                continue
            if pts is None:
                pts = probe_points(chart, 20, seed=0)
            for x in pts:
                env = dict(zip(chart.names, x))
                upper = expr.evaluate(parsed[i][j], env)
                lower = expr.evaluate(parsed[j][i], env)
                if abs(upper - lower) > 1e-10 * (1.0 + abs(upper)):
                    raise InvalidSpaceError(
                        f"asymmetric metric: a[{i}][{j}] = '{metric[i][j]}' vs "
                        f"a[{j}][{i}] = '{metric[j][i]}' differ at x = {x}"
                    )


def validate_space(space: RandersSpace, count: int = 100, seed: int = 0) -> None:
    """Probe-based admissibility: a positive definite and sup ||beta|| < 1."""
    worst_len = 0.0
    for x in probe_points(space.chart, count, seed):
        a = _a_floats(space, x)
        try:
            np.linalg.cholesky(np.array(a))
        except np.linalg.LinAlgError:
            raise InvalidSpaceError(
                f"metric not positive definite at x = {x}"
            ) from None
        worst_len = max(worst_len, beta_length(space, x))
    if worst_len >= 1.0:
        raise InvalidSpaceError(
            f"one-form length reaches {worst_len:.6g} >= 1; F is not positive"
        )


# -- pointwise evaluation -------------------------------------------------------


def a_at(space: RandersSpace, x) -> list:
    """Metric entries at x (floats or jets follow the input scalars)."""
    n = space.dimension
    fns = _fns(space)["a"]
    args = tuple(x)
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            out[i][j] = out[j][i] = fns[i][j](args)
    return out


def b_at(space: RandersSpace, x) -> list:
    args = tuple(x)
    return [fn(args) for fn in _fns(space)["b"]]


def _a_floats(space, x) -> list:
    return [[standard_part(e) for e in row] for row in a_at(space, x)]


def alpha(space: RandersSpace, x, v) -> Scalar:
    a = a_at(space, x)
    n = space.dimension
    quad = sum_(a[i][j] * (v[i] * v[j]) for i in range(n) for j in range(n))
    return jets.sqrt(quad)


def beta(space: RandersSpace, x, v) -> Scalar:
    return sum_(bi * vi for bi, vi in zip(b_at(space, x), v))


def finsler(space: RandersSpace) -> FinslerStructure:
    """Wrap F = alpha + beta for the generic tensor calculus.

    The exact closed-form spray rides along for ODE work; the generic
    jet-derived spray remains the reference and the two are compared in
    the validation suite.
    """

    def func(x, v):
        return alpha(space, x, v) + beta(space, x, v)

    def fast_spray(x, v):
        if all(standard_part(c) == 0.0 for c in v):
            return [0.0] * space.dimension
        return spray_closed_form(space, x, v)[0]

    return FinslerStructure(chart=space.chart, func=func, fast_spray=fast_spray)


def beta_length_squared(space: RandersSpace, x) -> Scalar:
    """||beta||^2(x) = a^ij b_i b_j; jet-evaluable (smooth even at zeros)."""
    a = a_at(space, x)
    b = b_at(space, x)
    a_inv = inv(a)
    n = space.dimension
    return sum_(a_inv[i][j] * (b[i] * b[j]) for i in range(n) for j in range(n))


def beta_length(space: RandersSpace, x) -> float:
    """||beta||(x) at a float point (not differentiable where beta vanishes)."""
    return math.sqrt(standard_part(beta_length_squared(space, x)))


# -- covariant derivative of beta -----------------------------------------------


def _first_order_data(space: RandersSpace, x):
    """a, da, b, db at float x from one jet pass.

    da[k][i][j] = da_ij/dx_k and db[k][i] = db_i/dx_k.
    """
    n = space.dimension
    xs = seed_group([float(c) for c in x], range(n))
    aj = a_at(space, xs)
    bj = b_at(space, xs)
    a = [[standard_part(aj[i][j]) for j in range(n)] for i in range(n)]
    da = [
        [[standard_part(partial(aj[i][j], k)) for j in range(n)] for i in range(n)]
        for k in range(n)
    ]
    b = [standard_part(bi) for bi in bj]
    db = [[standard_part(partial(bj[i], k)) for i in range(n)] for k in range(n)]
    return a, da, b, db


def levi_civita(space: RandersSpace, x) -> list:
    """Christoffel symbols of a_ij at a float point."""
    a, da, _, _ = _first_order_data(space, x)
    return _levi_civita_from(a, da)


def _levi_civita_from(a, da) -> list:
    n = len(a)
    a_inv = inv(a)
    gamma = []
    for k in range(n):
        mat = [[0.0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):  # symmetric in the lower pair
                s = 0.0
                for l in range(n):
                    s += a_inv[k][l] * (da[j][l][i] + da[i][j][l] - da[l][i][j])
                mat[i][j] = mat[j][i] = 0.5 * s
        gamma.append(mat)
    return gamma


def covariant_derivative(space: RandersSpace, x) -> list:
    """b_{i|j} = db_i/dx_j - sum_k b_k gamma~^k_ij at a float point."""
    a, da, b, db = _first_order_data(space, x)
    gamma = _levi_civita_from(a, da)
    n = space.dimension
    return [
        [
            db[j][i] - sum(b[k] * gamma[k][i][j] for k in range(n))
            for j in range(n)
        ]
        for i in range(n)
    ]


def length_gradient(space: RandersSpace, x) -> list:
    """d(||beta||^2)/dx_i via the covariant identity 2 sum_j b_{j|i} b^j."""
    a, da, b, db = _first_order_data(space, x)
    gamma = _levi_civita_from(a, da)
    n = space.dimension
    a_inv = inv(a)
    b_up = [sum(a_inv[i][j] * b[j] for j in range(n)) for i in range(n)]
    bcov = [
        [db[j][i] - sum(b[k] * gamma[k][i][j] for k in range(n)) for j in range(n)]
        for i in range(n)
    ]
    return [2.0 * sum(bcov[j][i] * b_up[j] for j in range(n)) for i in range(n)]


# -- closed-form spray ------------------------------------------------------------


class _PointData:
    """Per-point ingredients of the closed-form spray."""

    __slots__ = ("a", "a_inv", "b", "b_up", "bcov", "gamma")

    def __init__(self, space: RandersSpace, x):
        n = space.dimension
        a, da, b, db = _first_order_data(space, x)
        self.a = a
        self.a_inv = inv(a)
        self.b = b
        self.b_up = [sum(self.a_inv[i][j] * b[j] for j in range(n)) for i in range(n)]
        self.gamma = _levi_civita_from(a, da)
        self.bcov = [
            [db[j][i] - sum(b[k] * self.gamma[k][i][j] for k in range(n)) for j in range(n)]
            for i in range(n)
        ]


def _alpha_of(data: _PointData, v) -> Scalar:
    n = len(data.b)
    return jets.sqrt(
        sum_(data.a[i][j] * (v[i] * v[j]) for i in range(n) for j in range(n))
    )


def _xy_split(data: _PointData, v):
    """(X, Y, riem) of the spray decomposition at generic v."""
    n = len(data.b)
    al = _alpha_of(data, v)
    f = al + sum_(bi * vi for bi, vi in zip(data.b, v))
    riem = [
        sum_(data.gamma[i][j][k] * (v[j] * v[k]) for j in range(n) for k in range(n))
        for i in range(n)
    ]
    q = data.bcov
    x_cmp = []
    for i in range(n):
        s = sum_(
            q[j][k] * (data.a_inv[i][j] * v[k] - data.a_inv[i][k] * v[j])
            for j in range(n)
            for k in range(n)
        )
        x_cmp.append(s * al)
    s1 = sum_(q[j][k] * (v[j] * v[k]) for j in range(n) for k in range(n))
    s2 = sum_(
        q[j][k] * (data.b_up[k] * v[j] - data.b_up[j] * v[k])
        for j in range(n)
        for k in range(n)
    )
    common = s1 + s2 * al
    y_cmp = [(v[i] / f) * common for i in range(n)]
    return x_cmp, y_cmp, riem


def spray_closed_form(space: RandersSpace, x, v):
    """(G, X, Y, riem) from the Randers closed form; v must be nonzero."""
    if all(standard_part(c) == 0.0 for c in v):
        raise InvalidSpaceError("closed-form spray needs v != 0")
    data = _PointData(space, x)
    x_cmp, y_cmp, riem = _xy_split(data, v)
    g = [r + xc + yc for r, xc, yc in zip(riem, x_cmp, y_cmp)]
    return g, x_cmp, y_cmp, riem


def trace_dX_dv(space: RandersSpace, x, v) -> float:
    """sum_i dX^i/dv^i via jets (identically zero, kept as a live check)."""
    data = _PointData(space, x)
    n = space.dimension
    vs = seed_group([float(c) for c in v], range(n))
    x_cmp, _, _ = _xy_split(data, vs)
    return standard_part(sum_(partial(x_cmp[i], i) for i in range(n)))


def trace_dY_dv(space: RandersSpace, x, v) -> float:
    """sum_i dY^i/dv^i via jets."""
    data = _PointData(space, x)
    n = space.dimension
    vs = seed_group([float(c) for c in v], range(n))
    _, y_cmp, _ = _xy_split(data, vs)
    return standard_part(sum_(partial(y_cmp[i], i) for i in range(n)))


def trace_dY_closed_form(space: RandersSpace, x, v) -> float:
    """The reduced form of sum_i dY^i/dv^i:

    (n+1)/2 * sum (b_{i|j}+b_{j|i}) v^i v^j / F
      + (n+1) * sum (b_{i|j}-b_{j|i}) b^j alpha v^i / F.
    """
    data = _PointData(space, x)
    n = space.dimension
    q = data.bcov
    al = standard_part(_alpha_of(data, v))
    f = al + sum(bi * vi for bi, vi in zip(data.b, v))
    sym = sum(
        (q[i][j] + q[j][i]) * v[i] * v[j] for i in range(n) for j in range(n)
    )
    skew = sum(
        (q[i][j] - q[j][i]) * data.b_up[j] * v[i] for i in range(n) for j in range(n)
    )
    return 0.5 * (n + 1) * sym / f + (n + 1) * skew * al / f


# -- beta analysis and the verdict ------------------------------------------------


def analyze_beta(space: RandersSpace, probes: Sequence) -> BetaAnalysis:
    covs = []
    killing = 0.0
    parallel = 0.0
    lmin = float("inf")
    lmax = 0.0
    grad_sup = 0.0
    for x in probes:
        bc = covariant_derivative(space, x)
        covs.append(bc)
        n = space.dimension
        killing = max(
            killing, max(abs(bc[i][j] + bc[j][i]) for i in range(n) for j in range(n))
        )
        parallel = max(
            parallel, max(abs(bc[i][j]) for i in range(n) for j in range(n))
        )
        length = float(standard_part(beta_length(space, x)))
        lmin = min(lmin, length)
        lmax = max(lmax, length)
        grad_sup = max(grad_sup, max(abs(c) for c in length_gradient(space, x)))
    return BetaAnalysis(
        probes=list(probes),
        covariant=covs,
        killing_defect_sup=killing,
        parallel_defect_sup=parallel,
        length_min=lmin,
        length_max=lmax,
        length_gradient_sup=grad_sup,
    )


def is_berwald(space: RandersSpace, probes: Sequence, tol: float) -> bool:
    """True iff beta is parallel (b_{i|j} = 0 up to tol) on the probes."""
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    return analyze_beta(space, probes).parallel_defect_sup <= tol


def theorem_verdict(
    space: RandersSpace,
    probes: Optional[Sequence] = None,
    tol_killing: float = 1e-9,
    tol_length: float = 1e-8,
    probe_count: int = 100,
    seed: int = 0,
) -> TheoremVerdict:
    """Decide whether the space admits a measure with vanishing S-curvature.

    The decision reads the one-form alone: the defect sups must certify a
    Killing form of constant length.  On success the Busemann-Hausdorff
    density samples are attached as the certificate (any other vanishing-S
    measure is a constant multiple of it).
    """
    if tol_killing <= 0 or tol_length <= 0:
        raise ValueError("tolerances must be positive")
    if probes is None:
        probes = probe_points(space.chart, probe_count, seed)
    analysis = analyze_beta(space, probes)
    if analysis.killing_defect_sup > tol_killing:
        return TheoremVerdict(
            False, REASON_KILLING, analysis, None, tol_killing, tol_length
        )
    length_ok = (
        analysis.length_max - analysis.length_min <= tol_length
        and analysis.length_gradient_sup <= tol_length
    )
    if not length_ok:
        return TheoremVerdict(
            False, REASON_LENGTH, analysis, None, tol_killing, tol_length
        )
    densities = [float(bh_density_closed_form(space, x)) for x in probes]
    return TheoremVerdict(
        True, REASON_SATISFIED, analysis, densities, tol_killing, tol_length
    )


def bh_density_closed_form(space: RandersSpace, x) -> Scalar:
    """sigma_BH(x) = (1 - ||beta||^2)^((n+1)/2) * sqrt(det a); jet-evaluable."""
    n = space.dimension
    a = a_at(space, x)
    len_sq = beta_length_squared(space, x)
    if standard_part(len_sq) >= 1.0:
        raise InvalidSpaceError(
            f"||beta||^2 = {standard_part(len_sq):.6g} >= 1 at x = "
            f"{tuple(standard_part(c) for c in x)}"
        )
    base = 1.0 - len_sq
    exponent = 0.5 * (n + 1)
    return jets.powf(base, exponent) * jets.sqrt(det(a))
