"""Built-in Randers spaces covering every branch of the verdict logic.

Each entry is a plain manifold-spec dict (the same JSON shape the CLI
loads from disk), so the catalog doubles as format documentation.

sphere-hopf is the nontrivial YES case: the round 3-sphere in
stereographic coordinates with the one-form obtained by lowering the
rotation field (x1 x3 - x2, x2 x3 + x1, (1 + x3^2 - x1^2 - x2^2)/2) and
scaling by 0.3.  That field generates an isometry circle action of unit
length, so the form is Killing of constant length 0.3 without being
parallel.
"""

from __future__ import annotations

from . import randers

_SPHERE_CONF = "(1 + x1^2 + x2^2 + x3^2)"

CATALOG: dict[str, dict] = {
    "euclidean2": {
        "schema": 1,
        "name": "euclidean2",
        "description": "Flat Euclidean plane, no one-form (Riemannian baseline)",
        "dimension": 2,
        "coordinates": ["x1", "x2"],
        "metric": [["1", "0"], ["0", "1"]],
        "beta": ["0", "0"],
        "domain": [[-1.0, 1.0], [-1.0, 1.0]],
    },
    "flat-const": {
        "schema": 1,
        "name": "flat-const",
        "description": "Flat metric with constant one-form (parallel, Berwald)",
        "dimension": 2,
        "coordinates": ["x1", "x2"],
        "metric": [["1", "0"], ["0", "1"]],
        "beta": ["0.5", "0"],
        "domain": [[-1.0, 1.0], [-1.0, 1.0]],
    },
    "flat-nonkilling": {
        "schema": 1,
        "name": "flat-nonkilling",
        "description": "Flat metric, one-form 0.4*x1*dx1 (Killing condition fails)",
        "dimension": 2,
        "coordinates": ["x1", "x2"],
        "metric": [["1", "0"], ["0", "1"]],
        "beta": ["0.4*x1", "0"],
        "domain": [[-1.0, 1.0], [-1.0, 1.0]],
    },
    "rotational-killing": {
        "schema": 1,
        "name": "rotational-killing",
        "description": "Flat metric, rotational Killing one-form of non-constant length",
        "dimension": 2,
        "coordinates": ["x1", "x2"],
        "metric": [["1", "0"], ["0", "1"]],
        "beta": ["0.3*x2", "-0.3*x1"],
        "domain": [[-2.0, 2.0], [-2.0, 2.0]],
    },
    "polar-riemannian": {
        "schema": 1,
        "name": "polar-riemannian",
        "description": "Euclidean plane in polar coordinates, no one-form",
        "dimension": 2,
        "coordinates": ["x1", "x2"],
        "metric": [["1", "0"], ["0", "x1^2"]],
        "beta": ["0", "0"],
        "domain": [[0.5, 2.0], [0.0, 6.283185307179586]],
    },
    "sphere-hopf": {
        "schema": 1,
        "name": "sphere-hopf",
        "description": "Round 3-sphere (stereographic) with a Killing form of constant length 0.3, not parallel",
        "dimension": 3,
        "coordinates": ["x1", "x2", "x3"],
        "metric": [
            [f"4/{_SPHERE_CONF}^2", "0", "0"],
            ["0", f"4/{_SPHERE_CONF}^2", "0"],
            ["0", "0", f"4/{_SPHERE_CONF}^2"],
        ],
        "beta": [
            f"1.2*(x1*x3 - x2)/{_SPHERE_CONF}^2",
            f"1.2*(x2*x3 + x1)/{_SPHERE_CONF}^2",
            f"0.6*(1 + x3^2 - x1^2 - x2^2)/{_SPHERE_CONF}^2",
        ],
        "domain": [[-1.0, 1.0], [-1.0, 1.0], [-1.0, 1.0]],
    },
}

NAMES = tuple(CATALOG)


def spec(name: str) -> dict:
    if name not in CATALOG:
        raise KeyError(f"unknown catalog space '{name}'; choose from {', '.join(NAMES)}")
    return CATALOG[name]


def space(name: str) -> randers.RandersSpace:
    data = spec(name)
    return randers.build_space(
        data["coordinates"], data["domain"], data["metric"], data["beta"]
    )


def descriptions() -> list[tuple[str, str]]:
    return [(name, data["description"]) for name, data in CATALOG.items()]
