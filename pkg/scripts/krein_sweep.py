"""Sweep boundary phases and points, printing the worst resolvent-difference
residual against the closed rank-one formula.
"""

import cmath
import math
import pathlib
import sys

import numpy as np

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from interspec.extensions import UnitIntervalQuadrature, krein_difference_check


def main() -> None:
    quad = UnitIntervalQuadrature(256)
    inputs = {
        "constant": np.ones(quad.n, dtype=complex),
        "linear": quad.nodes.astype(complex),
        "bump": np.exp(-20.0 * (quad.nodes - 0.5) ** 2).astype(complex),
    }
    angles = [0.0, math.pi / 3, math.pi, 4.5]
    points = [1j, 0.5 + 0.5j, -2.0 + 0.25j]
    worst = 0.0
    for name, g in inputs.items():
        for ta in angles:
            for tb in angles:
                for lam in points:
                    check = krein_difference_check(cmath.exp(1j * ta),
                                                   cmath.exp(1j * tb), lam, g, quad)
                    worst = max(worst, check.residual / float(np.max(np.abs(g))))
        print(f"{name}: worst scaled residual so far {worst:.3e}")
    print(f"overall worst residual {worst:.3e} over {len(inputs)} inputs, "
          f"{len(angles) ** 2} phase pairs, {len(points)} points")


if __name__ == "__main__":
    main()
