#!/usr/bin/env python3
"""RK4 order study for the geodesic integrator.

Integrates one geodesic at a ladder of step counts and prints endpoint
errors against a fine reference run; consecutive ratios near 16 confirm
fourth-order convergence.  Also reports the F-speed drift, a first
integral of the flow.
"""

import argparse
import math
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from finslerlab import catalog, randers
from finslerlab.core import geodesic


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--space", default="polar-riemannian", choices=catalog.NAMES)
    parser.add_argument("--time", type=float, default=1.0)
    parser.add_argument("--reference-steps", type=int, default=3200)
    args = parser.parse_args()

    sp = catalog.space(args.space)
    F = randers.finsler(sp)
    x0 = tuple(0.5 * (lo + hi) for lo, hi in sp.chart.bounds)
    v_raw = tuple(0.3 + 0.1 * i for i in range(sp.dimension))
    f0 = F(list(x0), list(v_raw))
    v0 = tuple(0.4 * c / f0 for c in v_raw)

    reference = geodesic(F, x0, v0, args.time, steps=args.reference_steps)
    ref_end = reference.points[-1]
    print(f"space {args.space}, x0 = {x0}, F-speed 0.4, T = {args.time}")
    print(f"{'steps':>7s} {'endpoint error':>16s} {'ratio':>8s} {'speed drift':>12s}")
    previous = None
    for steps in (25, 50, 100, 200, 400):
        path = geodesic(F, x0, v0, args.time, steps=steps)
        end = path.points[-1]
        err = math.sqrt(sum((a - b) ** 2 for a, b in zip(end, ref_end)))
        speeds = [F(list(x), list(v)) for x, v in zip(path.points, path.velocities)]
        drift = max(abs(s - speeds[0]) for s in speeds)
        ratio = f"{previous / err:8.1f}" if previous else f"{'-':>8s}"
        print(f"{steps:7d} {err:16.3e} {ratio} {drift:12.2e}")
        previous = err
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
