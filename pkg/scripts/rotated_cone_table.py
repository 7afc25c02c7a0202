"""Table of nu, sigma and Theta for the planar wedge with L the axis line."""

from __future__ import annotations

import argparse
import math
from dataclasses import dataclass

from conicond.cones import Polyhedral2D
from conicond.linalg import orthonormal_basis
from conicond.measures import NormPair, nu, sigma, theta


@dataclass
class TableConfig:
    steps: int = 8
    phi_max: float = math.pi / 4


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--steps", type=int, default=TableConfig.steps)
    cfg = TableConfig(steps=p.parse_args().steps)
    L, np_ = orthonormal_basis([[0, 1]]), NormPair.of("l2")
    print(f"{'phi':>8} {'nu':>10} {'sigma':>10} {'sigma/nu':>10} {'1/sin2phi':>10} {'Theta':>8}")
    for k in range(1, cfg.steps + 1):
        phi = cfg.phi_max * k / (cfg.steps + 1)
        K = Polyhedral2D(phi)
        v, s = nu(L, K, np_).value, sigma(L, K, np_).value
        print(f"{phi:8.4f} {v:10.6f} {s:10.6f} {s / v:10.6f} {1 / math.sin(2 * phi):10.6f} {theta(K):8.4f}")


if __name__ == "__main__":
    main()
