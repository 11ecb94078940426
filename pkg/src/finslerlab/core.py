"""Generic Finsler tensor calculus over coordinate charts.

Everything is derived from one scalar function F(x, v) that must be
positively 1-homogeneous in v and smooth away from v = 0.  Derivatives
are taken with nested jets, so the fundamental tensor, Cartan tensor,
formal Christoffel symbols, spray and nonlinear connection come out
exact up to rounding.

Conventions match the source data for this tool: the geodesic equation
is eta'' + G(eta') = 0 with G the plain gamma-contraction (no factor 2),
and N = (1/2) dG/dv.  Textbooks that define G with an extra 1/2 differ
by that factor.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import ndtri
from scipy.stats import qmc

from .jets import Scalar, partial, seed_group, standard_part, value_of
from .linalg import inv, sum_

__all__ = [
    "CoordinateChart",
    "FinslerStructure",
    "SprayOutput",
    "GeodesicPath",
    "StructureValidityError",
    "DomainExitError",
    "NonFiniteStateError",
    "MIN_VECTOR_NORM",
    "fundamental_tensor",
    "cartan_tensor",
    "formal_christoffel",
    "spray",
    "nonlinear_connection",
    "nonlinear_connection_definitional",
    "spray_data",
    "geodesic",
    "euler_identity_residual",
    "probe_pairs",
    "probe_points",
    "corner_points",
]

# Structures are non-smooth at v = 0; tensors reject anything this close.
MIN_VECTOR_NORM = 1e-12


class StructureValidityError(ValueError):
    """The probed function violates a Finsler-structure condition."""


class DomainExitError(RuntimeError):
    """Geodesic left the chart domain; carries the truncated path."""

    def __init__(self, time: float, path: "GeodesicPath"):
        super().__init__(f"geodesic left the chart domain at t = {time}")
        self.time = time
        self.path = path


class NonFiniteStateError(RuntimeError):
    """Geodesic state became non-finite (blow-up or invalid evaluation)."""

    def __init__(self, time: float):
        super().__init__(f"geodesic state became non-finite at t = {time}")
        self.time = time


@dataclass(frozen=True)
class CoordinateChart:
    names: tuple[str, ...]
    bounds: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.names) < 2:
            raise ValueError("charts need dimension >= 2")
        if len(set(self.names)) != len(self.names):
            raise ValueError("coordinate names must be distinct")
        if len(self.bounds) != len(self.names):
            raise ValueError("one (lo, hi) interval per coordinate required")
        for lo, hi in self.bounds:
            if not (lo < hi):
                raise ValueError(f"empty coordinate interval ({lo}, {hi})")

    @property
    def dimension(self) -> int:
        return len(self.names)

    def contains(self, x: Sequence[float]) -> bool:
        return all(lo < xi < hi for xi, (lo, hi) in zip(x, self.bounds))


@dataclass(frozen=True)
class FinslerStructure:
    """A positively 1-homogeneous structure given by a jet-evaluable F(x, v).

    fast_spray, when set, is an exact closed-form spray used for ODE
    integration instead of the jet-derived one (the two are required to
    agree and are cross-checked in the test suite).
    """

    chart: CoordinateChart
    func: Callable
    fast_spray: Optional[Callable] = None

    def __call__(self, x: Sequence[Scalar], v: Sequence[Scalar]) -> Scalar:
        return self.func(x, v)


@dataclass
class SprayOutput:
    G: list
    N: list
    g: list
    g_inv: list
    gamma: list
    cartan: list


@dataclass
class GeodesicPath:
    times: list[float]
    points: list[tuple[float, ...]]
    velocities: list[tuple[float, ...]]

    def state(self, index: int) -> tuple[tuple[float, ...], tuple[float, ...]]:
        return self.points[index], self.velocities[index]


def _check_nonzero(v) -> None:
    norm = math.sqrt(sum(standard_part(c) ** 2 for c in v))
    if norm < MIN_VECTOR_NORM:
        raise StructureValidityError(
            f"tangent vector too close to 0 (|v| = {norm}); tensors are undefined there"
        )


def _is_exact_zero(v) -> bool:
    return all(standard_part(c) == 0.0 for c in v)


def _half_f_squared(F, scalars, n: int) -> Scalar:
    f = F(scalars[:n], scalars[n:])
    return 0.5 * (f * f)


def _metric(F: FinslerStructure, x, v) -> list:
    """g_ij = half v-Hessian of F^2, entries generic scalars."""
    n = F.chart.dimension
    v_idx = range(n, 2 * n)
    s = seed_group(list(x) + list(v), v_idx)
    s = seed_group(s, v_idx)
    r = _half_f_squared(F, s, n)
    return [[partial(partial(r, i), j) for j in range(n)] for i in range(n)]


def _metric_and_dx(F: FinslerStructure, x, v) -> tuple[list, list]:
    """(g, dg) with dg[k][i][j] = dg_ij/dx_k, from one seeded evaluation."""
    n = F.chart.dimension
    v_idx = range(n, 2 * n)
    s = seed_group(list(x) + list(v), v_idx)
    s = seed_group(s, v_idx)
    s = seed_group(s, range(n))
    r = _half_f_squared(F, s, n)
    inner = value_of(r)
    g = [[partial(partial(inner, i), j) for j in range(n)] for i in range(n)]
    dg = [
        [[partial(partial(partial(r, k), i), j) for j in range(n)] for i in range(n)]
        for k in range(n)
    ]
    return g, dg


def fundamental_tensor(F: FinslerStructure, x, v) -> list[list[float]]:
    """g_ij(v) with a positive-definiteness check at float arguments."""
    _check_nonzero(v)
    g = _metric(F, x, v)
    n = len(g)
    gf = [[standard_part(g[i][j]) for j in range(n)] for i in range(n)]
    try:
        np.linalg.cholesky(np.array(gf))
    except np.linalg.LinAlgError:
        raise StructureValidityError(
            f"fundamental tensor not positive definite at x={tuple(map(standard_part, x))}, "
            f"v={tuple(map(standard_part, v))}"
        ) from None
    return g


def cartan_tensor(F: FinslerStructure, x, v) -> list:
    """A_ijk = (F/2) dg_ij/dv_k = (F/4) third v-derivative of F^2."""
    _check_nonzero(v)
    n = F.chart.dimension
    v_idx = range(n, 2 * n)
    s = list(x) + list(v)
    for _ in range(3):
        s = seed_group(s, v_idx)
    r = _half_f_squared(F, s, n)
    fval = F(x, v)
    half_f = 0.5 * fval
    return [
        [
            [half_f * partial(partial(partial(r, i), j), k) for k in range(n)]
            for j in range(n)
        ]
        for i in range(n)
    ]


def formal_christoffel(F: FinslerStructure, x, v) -> list:
    """gamma^i_jk(v), symmetric in (j, k); raises on singular g."""
    _check_nonzero(v)
    g, dg = _metric_and_dx(F, x, v)
    g_inv = inv(g)
    return _gamma_from(g_inv, dg)


def _gamma_from(g_inv, dg) -> list:
    n = len(g_inv)
    gamma = []
    for i in range(n):
        rows = [[0.0] * n for _ in range(n)]
        for j in range(n):
            for k in range(j, n):  # symmetric in the lower pair
                terms = sum_(
                    g_inv[i][l] * (dg[k][l][j] + dg[j][k][l] - dg[l][j][k])
                    for l in range(n)
                )
                rows[j][k] = rows[k][j] = 0.5 * terms
        gamma.append(rows)
    return gamma


def spray(F: FinslerStructure, x, v) -> list:
    """Spray coefficients G^i(v) = sum gamma^i_jk v^j v^k; G(0) = 0."""
    n = F.chart.dimension
    if _is_exact_zero(v):
        return [0.0] * n
    gamma = formal_christoffel(F, x, v)
    return [
        sum_(gamma[i][j][k] * (v[j] * v[k]) for j in range(n) for k in range(n))
        for i in range(n)
    ]


def nonlinear_connection(F: FinslerStructure, x, v) -> list[list[float]]:
    """N^i_j = (1/2) dG^i/dv^j via one extra jet level; N(0) = 0."""
    n = F.chart.dimension
    if _is_exact_zero(v):
        return [[0.0] * n for _ in range(n)]
    s = seed_group([float(c) for c in x] + [float(c) for c in v], range(n, 2 * n))
    G = spray(F, s[:n], s[n:])
    return [
        [0.5 * standard_part(partial(G[i], j)) for j in range(n)] for i in range(n)
    ]


def nonlinear_connection_definitional(F: FinslerStructure, x, v) -> list[list[float]]:
    """N from its defining contraction (test cross-check, v != 0 only):

    N^i_j = sum_k { gamma^i_jk v^k - A^i_jk G^k / F }.
    """
    _check_nonzero(v)
    n = F.chart.dimension
    g, dg = _metric_and_dx(F, x, v)
    g_inv = inv(g)
    gamma = _gamma_from(g_inv, dg)
    A = cartan_tensor(F, x, v)
    G = [
        sum_(gamma[i][j][k] * v[j] * v[k] for j in range(n) for k in range(n))
        for i in range(n)
    ]
    fval = F(x, v)
    out = []
    for i in range(n):
        a_up = [
            [sum_(g_inv[i][l] * A[l][j][k] for l in range(n)) for k in range(n)]
            for j in range(n)
        ]
        out.append(
            [
                standard_part(
                    sum_(
                        gamma[i][j][k] * v[k] - a_up[j][k] * G[k] / fval
                        for k in range(n)
                    )
                )
                for j in range(n)
            ]
        )
    return out


def spray_data(F: FinslerStructure, x, v) -> SprayOutput:
    """All spray by-products at a float (x, v) in one bundle."""
    _check_nonzero(v)
    g, dg = _metric_and_dx(F, x, v)
    g_inv = inv(g)
    gamma = _gamma_from(g_inv, dg)
    n = F.chart.dimension
    G = [
        sum_(gamma[i][j][k] * v[j] * v[k] for j in range(n) for k in range(n))
        for i in range(n)
    ]
    return SprayOutput(
        G=[standard_part(c) for c in G],
        N=nonlinear_connection(F, x, v),
        g=[[standard_part(e) for e in row] for row in g],
        g_inv=[[standard_part(e) for e in row] for row in g_inv],
        gamma=[[[standard_part(e) for e in row] for row in mat] for mat in gamma],
        cartan=[
            [[standard_part(e) for e in row] for row in mat]
            for mat in cartan_tensor(F, x, v)
        ],
    )


# -- geodesics ----------------------------------------------------------------


def geodesic(
    F: FinslerStructure,
    x0: Sequence[float],
    v0: Sequence[float],
    time: float,
    steps: int = 1000,
    spray_fn: Optional[Callable] = None,
) -> GeodesicPath:
    """Classical fixed-step RK4 for eta'' + G(eta') = 0.

    Raises DomainExitError (carrying the truncated path) when the path
    leaves the chart domain, NonFiniteStateError on blow-up.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    _check_nonzero(v0)
    if spray_fn is None:
        spray_fn = F.fast_spray or (lambda xx, vv: spray(F, xx, vv))
    n = F.chart.dimension
    h = time / steps
    x = [float(c) for c in x0]
    u = [float(c) for c in v0]
    path = GeodesicPath(times=[0.0], points=[tuple(x)], velocities=[tuple(u)])

    def rhs(xx, uu):
        G = spray_fn(xx, uu)
        return uu, [-standard_part(c) for c in G]

    for step in range(steps):
        k1x, k1u = rhs(x, u)
        k2x, k2u = rhs(
            [xi + 0.5 * h * ki for xi, ki in zip(x, k1x)],
            [ui + 0.5 * h * ki for ui, ki in zip(u, k1u)],
        )
        k3x, k3u = rhs(
            [xi + 0.5 * h * ki for xi, ki in zip(x, k2x)],
            [ui + 0.5 * h * ki for ui, ki in zip(u, k2u)],
        )
        k4x, k4u = rhs(
            [xi + h * ki for xi, ki in zip(x, k3x)],
            [ui + h * ki for ui, ki in zip(u, k3u)],
        )
        x = [
            xi + (h / 6.0) * (a + 2.0 * b + 2.0 * c + d)
            for xi, a, b, c, d in zip(x, k1x, k2x, k3x, k4x)
        ]
        u = [
            ui + (h / 6.0) * (a + 2.0 * b + 2.0 * c + d)
            for ui, a, b, c, d in zip(u, k1u, k2u, k3u, k4u)
        ]
        t = (step + 1) * h
        if not all(math.isfinite(c) for c in itertools.chain(x, u)):
            raise NonFiniteStateError(t)
        if not F.chart.contains(x):
            raise DomainExitError(t, path)
        path.times.append(t)
        path.points.append(tuple(x))
        path.velocities.append(tuple(u))
    return path


# -- identities ----------------------------------------------------------------


def euler_identity_residual(F: FinslerStructure, x, v) -> float:
    """| sum_i d/dv^i (v^i / F) - (n-1)/F | at a float probe."""
    _check_nonzero(v)
    n = F.chart.dimension
    s = seed_group([float(c) for c in x] + [float(c) for c in v], range(n, 2 * n))
    xs, vs = s[:n], s[n:]
    fval = F(xs, vs)
    trace = sum_(partial(vs[i] / fval, i) for i in range(n))
    return abs(standard_part(trace) - (n - 1) / standard_part(fval))


# -- deterministic probe grids --------------------------------------------------


def probe_pairs(
    chart: CoordinateChart, count: int = 100, seed: int = 0
) -> list[tuple[tuple[float, ...], tuple[float, ...]]]:
    """Low-discrepancy (x, v) probes: x 1% inside the domain, v on the unit sphere.

    Scrambled Halton in 2n dimensions; the first n map to the chart box,
    the rest go through the normal inverse CDF and are normalized.
    """
    n = chart.dimension
    sampler = qmc.Halton(d=2 * n, scramble=True, seed=seed)
    u = sampler.random(count)
    out = []
    for row in u:
        x = tuple(
            lo + (0.01 + 0.98 * float(t)) * (hi - lo)
            for t, (lo, hi) in zip(row[:n], chart.bounds)
        )
        z = ndtri(np.clip(row[n:], 1e-12, 1.0 - 1e-12))
        norm = float(np.linalg.norm(z))
        if norm < 1e-9:
            z = np.zeros(n)
            z[0] = 1.0
            norm = 1.0
        v = tuple(float(c) / norm for c in z)
        out.append((x, v))
    return out


def corner_points(chart: CoordinateChart, shrink: float = 0.01) -> list[tuple[float, ...]]:
    """The 2^n domain corners pulled inward by `shrink` of each width."""
    axes = [
        (lo + shrink * (hi - lo), hi - shrink * (hi - lo)) for lo, hi in chart.bounds
    ]
    return [tuple(p) for p in itertools.product(*axes)]


def probe_points(
    chart: CoordinateChart, count: int = 100, seed: int = 0
) -> list[tuple[float, ...]]:
    """Probe x-positions: the Halton set plus the shrunk domain corners."""
    pts = [x for x, _ in probe_pairs(chart, count, seed)]
    pts.extend(corner_points(chart))
    return pts
