"""Measures and the S-curvature.

The primary computation is the trace formula

    S(v) = sum_i { N^i_i(v) - v^i * dlog(sigma)/dx^i },

with the nonlinear connection from the generic tensor calculus and a
jet-evaluable measure density sigma.  The transport-based definition
(the t-derivative of log(sqrt(det g) / sigma) along the unit-speed
geodesic) is implemented independently and serves as the oracle.

The Busemann-Hausdorff density is available in closed form (Randers) and
as a Monte-Carlo unit-ball volume estimate; the Monte-Carlo estimate is
never differentiated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import expr, jets, randers
from .core import FinslerStructure, fundamental_tensor, geodesic, nonlinear_connection
from .jets import partial, seed_group, standard_part
from .linalg import det
from .randers import RandersSpace

__all__ = [
    "Measure",
    "SCurvatureSample",
    "MeasureUniquenessError",
    "MEASURE_KINDS",
    "lebesgue_measure",
    "riemannian_volume_measure",
    "busemann_hausdorff_measure",
    "custom_measure",
    "measure_from_kind",
    "riemannian_volume_density",
    "unit_ball_volume",
    "bh_density_monte_carlo",
    "s_curvature",
    "s_curvature_transport",
    "measure_uniqueness_check",
]

MEASURE_KINDS = ("lebesgue", "riemannian-volume", "busemann-hausdorff", "custom")


class MeasureUniquenessError(RuntimeError):
    """Two vanishing-S measures whose densities were not proportional."""


@dataclass(frozen=True)
class Measure:
    """Positive density sigma(x) relative to the coordinate volume dx."""

    kind: str
    density: Callable  # (x scalars) -> scalar, jet-evaluable

    def __post_init__(self):
        if self.kind not in MEASURE_KINDS:
            raise ValueError(f"measure kind must be one of {MEASURE_KINDS}")


@dataclass
class SCurvatureSample:
    x: tuple
    v: tuple
    s_formula: float
    s_transport: Optional[float]
    measure_kind: str


def lebesgue_measure() -> Measure:
    return Measure("lebesgue", lambda x: 1.0)


def riemannian_volume_measure(space: RandersSpace) -> Measure:
    return Measure("riemannian-volume", lambda x: _sqrt_det_a(space, x))


def busemann_hausdorff_measure(space: RandersSpace) -> Measure:
    return Measure(
        "busemann-hausdorff", lambda x: randers.bh_density_closed_form(space, x)
    )


def custom_measure(field: expr.ScalarField, coordinate_names: Sequence[str]) -> Measure:
    names = tuple(coordinate_names)
    return Measure("custom", lambda x: expr.evaluate(field, dict(zip(names, x))))


def measure_from_kind(
    space: RandersSpace, kind: str, density_field: Optional[expr.ScalarField] = None
) -> Measure:
    if kind == "lebesgue":
        return lebesgue_measure()
    if kind == "riemannian-volume":
        return riemannian_volume_measure(space)
    if kind == "busemann-hausdorff":
        return busemann_hausdorff_measure(space)
    if kind == "custom":
        if density_field is None:
            raise ValueError("custom measure needs a density expression")
        return custom_measure(density_field, space.chart.names)
    raise ValueError(f"unknown measure kind '{kind}'")


def _sqrt_det_a(space: RandersSpace, x):
    return jets.sqrt(det(randers.a_at(space, x)))


def riemannian_volume_density(space: RandersSpace, x) -> float:
    """sqrt(det a_ij(x)) > 0 (the volume density of the alpha-metric)."""
    d = standard_part(det(randers.a_at(space, x)))
    if d <= 0.0:
        raise randers.InvalidSpaceError(f"det a = {d} <= 0 at x = {tuple(x)}")
    return math.sqrt(d)


def unit_ball_volume(n: int) -> float:
    """Volume of the Euclidean unit ball in R^n."""
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


# -- S-curvature ----------------------------------------------------------------


def s_curvature(F: FinslerStructure, measure: Measure, x, v) -> float:
    """Trace formula S(v) = sum_i { N^i_i - v^i dlog(sigma)/dx^i }; S(0) = 0."""
    n = F.chart.dimension
    if all(float(c) == 0.0 for c in v):
        return 0.0
    N = nonlinear_connection(F, x, v)
    trace = sum(N[i][i] for i in range(n))
    xs = seed_group([float(c) for c in x], range(n))
    sigma = measure.density(xs)
    sigma_val = standard_part(sigma)
    if not sigma_val > 0.0:
        raise ValueError(f"measure density {sigma_val} is not positive at x = {tuple(x)}")
    dlog = [standard_part(partial(sigma, i)) / sigma_val for i in range(n)]
    return trace - sum(float(v[i]) * dlog[i] for i in range(n))


def _log_ratio(F: FinslerStructure, measure: Measure, x, u) -> float:
    """log( sqrt(det g_u) / sigma ) at a path state (x, u)."""
    g = fundamental_tensor(F, x, u)
    d = standard_part(det(g))
    sigma = standard_part(measure.density(list(x)))
    return 0.5 * math.log(d) - math.log(sigma)


def s_curvature_transport(
    F: FinslerStructure,
    measure: Measure,
    x,
    v,
    h: float = 1e-3,
    steps: int = 100,
    richardson: bool = True,
) -> float:
    """Transport-definition oracle for the S-curvature.

    Normalizes v to unit F-speed, integrates the geodesic to +-h,
    central-differences log(sqrt(det g)/sigma) and rescales by F(v)
    (S is positively 1-homogeneous).  With richardson=True the h and
    h/2 differences are combined for fourth-order accuracy.
    """
    fval = float(standard_part(F(list(x), list(v))))
    if fval <= 0.0:
        raise ValueError("transport oracle needs F(v) > 0")
    unit = [float(c) / fval for c in v]
    if steps % 2:
        steps += 1
    forward = geodesic(F, x, unit, h, steps)
    backward = geodesic(F, x, unit, -h, steps)

    def phi(path, index):
        xx, uu = path.state(index)
        return _log_ratio(F, measure, xx, uu)

    d_full = (phi(forward, steps) - phi(backward, steps)) / (2.0 * h)
    if not richardson:
        return fval * d_full
    d_half = (phi(forward, steps // 2) - phi(backward, steps // 2)) / h
    return fval * (4.0 * d_half - d_full) / 3.0


# -- Busemann-Hausdorff density by Monte Carlo -----------------------------------


def bh_density_monte_carlo(
    space: RandersSpace, x, sample_count: int, rng_seed: int
) -> tuple[float, float]:
    """(sigma_BH estimate, standard error) via unit-ball volume sampling.

    The F-unit ball satisfies alpha(v) < 1/(1 - ||beta||), so the sampling
    box is that ellipsoid's bounding box in the a(x)-eigenbasis.  The RNG
    is counter-based (numpy Philox keyed with the 64-bit seed), which
    makes estimates bit-reproducible for a fixed seed.
    """
    if sample_count < 10_000:
        raise ValueError("sample_count must be at least 10^4")
    n = space.dimension
    a = np.array([[standard_part(e) for e in row] for row in randers.a_at(space, x)])
    b = np.array([standard_part(c) for c in randers.b_at(space, x)])
    lam, q = np.linalg.eigh(a)
    if lam[0] <= 0.0:
        raise randers.InvalidSpaceError(f"metric not positive definite at x = {tuple(x)}")
    blen = randers.beta_length(space, x)
    if blen >= 1.0:
        raise randers.InvalidSpaceError(
            f"degenerate bounding box: ||beta|| = {blen:.6g} >= 1 at x = {tuple(x)}"
        )
    radius = 1.0 / (1.0 - blen)
    half_width = radius / np.sqrt(lam)
    box_volume = float(np.prod(2.0 * half_width))

    rng = np.random.Generator(np.random.Philox(key=rng_seed))
    y = rng.uniform(-half_width, half_width, size=(sample_count, n))
    alpha_vals = np.sqrt((y * y) @ lam)
    beta_vals = y @ (q.T @ b)
    hits = int(np.count_nonzero(alpha_vals + beta_vals < 1.0))
    p = hits / sample_count
    if p == 0.0:
        raise randers.InvalidSpaceError("unit ball missed entirely; degenerate data")
    ball_volume = box_volume * p
    se_volume = box_volume * math.sqrt(p * (1.0 - p) / sample_count)
    omega = unit_ball_volume(n)
    estimate = omega / ball_volume
    std_error = omega * se_volume / (ball_volume * ball_volume)
    return estimate, std_error


# -- measure uniqueness -----------------------------------------------------------


def measure_uniqueness_check(
    space: RandersSpace,
    measure1: Measure,
    measure2: Measure,
    probes: Sequence,
    tol: float,
) -> tuple[bool, float]:
    """(both_vanishing, density ratio spread max/min - 1) over (x, v) probes.

    When both measures have |S| <= tol everywhere probed, their densities
    must be proportional (spread <= 10*tol); a violation raises, since it
    would contradict the uniqueness of the vanishing-S measure.
    """
    F = randers.finsler(space)
    max1 = 0.0
    max2 = 0.0
    for x, v in probes:
        max1 = max(max1, abs(s_curvature(F, measure1, x, v)))
        max2 = max(max2, abs(s_curvature(F, measure2, x, v)))
    both = max1 <= tol and max2 <= tol
    ratios = [
        standard_part(measure1.density(list(x)))
        / standard_part(measure2.density(list(x)))
        for x, _ in probes
    ]
    spread = max(ratios) / min(ratios) - 1.0
    if both and spread > 10.0 * tol:
        raise MeasureUniquenessError(
            f"both measures have |S| <= {tol} but density ratio spread is {spread:.3e}"
        )
    return both, spread
