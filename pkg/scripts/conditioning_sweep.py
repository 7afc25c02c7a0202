"""Renegar brackets and preconditioning on random maps into an orthant or PSD cone."""

from __future__ import annotations

import argparse
import math
from dataclasses import dataclass

import numpy as np

from conicond.cones import Orthant, Psd
from conicond.oracle import rdist_estimate
from conicond.renegar import LinearMap, precondition, renegar_sandwich


@dataclass
class SweepConfig:
    count: int = 10
    n: int = 5
    m: int = 2
    psd_k: int = 0  # 0 means an orthant of dimension n
    budget: int = 60
    seed: int = 0


def main():
    p = argparse.ArgumentParser(description=__doc__)
    for f, d in SweepConfig.__dataclass_fields__.items():
        p.add_argument(f"--{f.replace('_', '-')}", type=int, default=d.default)
    cfg = SweepConfig(**vars(p.parse_args()))
    K = Psd(cfg.psd_k) if cfg.psd_k else Orthant(cfg.n)
    rng = np.random.default_rng(cfg.seed)
    print(f"{'kappa':>8} {'lower':>9} {'estimate':>9} {'upper':>9} {'nu(L)':>8} {'nu(PL)':>8} {'1/sqrt r':>8}")
    for i in range(cfg.count):
        M = rng.standard_normal((K.dim, cfg.m))
        M[:, 0] = K.identity() + 0.6 * rng.standard_normal(K.dim) / math.sqrt(K.dim)
        A = LinearMap(M)
        rep = renegar_sandwich(A, K)
        est = rdist_estimate(A, K, budget=cfg.budget, seed=i)
        _, _, pre = precondition(A, K)
        print(f"{rep.norms.kappa:8.3f} {rep.lower:9.5f} {est:9.5f} {rep.upper:9.5f} "
              f"{pre.nu_before:8.5f} {pre.nu_after:8.5f} {pre.bound:8.5f}")


if __name__ == "__main__":
    main()
