"""Acceptance criteria, one test each; every test records a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py`` (lines appear in the terminal
summary) or ``python tests/test_acceptance.py`` (lines printed as they finish).
"""

import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from conicond.cones import Orthant, Polyhedral2D, Product, Psd, SecondOrder, smat
from conicond.instance import generate, parse_instance
from conicond.linalg import Subspace, orthonormal_basis, principal_angles, projection_gap
from conicond.measures import (
    NormPair, cone_alignment_constant, dist, nu, nu_bar, odist, sigma, sym, theta,
)
from conicond.measures.sigma import cone_ball_vertices, sigma_dual_inner, sigma_inner
from conicond.norms import NormSpec, norm_eval
from conicond.oracle import dist_to_illposed_estimate, odist_from_illposed_estimate, rdist_estimate
from conicond.partition import block_decompose, block_subspaces, goldman_tucker, partition_measures
from conicond.renegar import LinearMap, precondition, renegar_sandwich

LINES = []
L2 = NormPair.of("l2")


def record(num, title, ok, detail, elapsed, budget):
    in_time = elapsed <= budget
    status = "PASS" if ok and in_time else "FAIL"
    line = f"[{status}] {num:>2}. {title}: {detail} ({elapsed:.1f}s of {budget:.0f}s)"
    LINES.append(line)
    print(line, flush=True)
    return ok and in_time


def _feasible(rng, n, m, cone=None):
    K = cone or Orthant(n)
    B = rng.standard_normal((n, m))
    B[:, 0] = K.identity() + 0.4 * rng.standard_normal(n) / math.sqrt(n)
    return Subspace.from_columns(B)


def _infeasible(rng, n, m):
    w = rng.uniform(0.2, 1.0, n)
    B = rng.standard_normal((n, m))
    B -= np.outer(w, w @ B) / (w @ w)
    return Subspace.from_columns(B)


# ---------------------------------------------------------------------------


def test_01_asymmetry_example():
    t0 = time.time()
    L1, L2_ = orthonormal_basis([[1, 0]]), orthonormal_basis([[1, 1]])
    np_ = NormPair.of("l1")
    got = [dist(L1, L2_, np_).value, dist(L2_, L1, np_).value, odist(L1, L2_, np_).value, odist(L2_, L1, np_).value]
    want = [1.0, 0.5, 0.5, 1.0]
    err = max(abs(a - b) for a, b in zip(got, want))
    assert record(1, "asymmetric dist/odist", err <= 1e-9, f"values {np.round(got, 12).tolist()}, max err {err:.1e}",
                  time.time() - t0, 1)


def test_02_euclidean_coincidence():
    t0 = time.time()
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(100):
        a = Subspace.from_columns(rng.standard_normal((6, 2)))
        b = Subspace.from_columns(rng.standard_normal((6, 2)))
        d, o = dist(a, b, L2).value, odist(a, b, L2).value
        g, s = projection_gap(a, b), math.sin(principal_angles(a, b).max())
        worst = max(worst, abs(d - o), abs(d - g), abs(d - s), abs(o - g))
    assert record(2, "Euclidean dist = odist = gap = sin(max angle)", worst <= 1e-8,
                  f"100 pairs in Gr(R^6,2), max deviation {worst:.1e}", time.time() - t0, 5)


def _side_instances(rng, feasible):
    out = []
    for _ in range(40):
        n = int(rng.integers(3, 7))
        m = int(rng.integers(1, min(3, n - 1) + 1))
        out.append((_feasible(rng, n, m) if feasible else _infeasible(rng, n, m), L2))
    pairs = [("l1", "l1"), ("linf", "linf"), ("l1", "linf"), ("linf", "l1"), ("l2", "l1")]
    for i in range(10):
        n = int(rng.integers(3, 5))
        L = _feasible(rng, n, 1) if feasible else _infeasible(rng, n, 1)
        out.append((L, NormPair.of(*pairs[i % len(pairs)])))
    return out


def _theorem_check(num, feasible):
    t0 = time.time()
    rng = np.random.default_rng(3 if feasible else 4)
    worst_crit, worst_sample, inexact, count = -math.inf, -math.inf, 0, 0
    for L, np_ in _side_instances(rng, feasible):
        K = Orthant(L.ambient_dim)
        est = dist_to_illposed_estimate if feasible else odist_from_illposed_estimate
        b = est(L, K, np_, budget=2000, seed=count)
        count += 1
        inexact += not b.exact
        worst_crit = max(worst_crit, b.critical - b.measure)
        worst_sample = max(worst_sample, b.measure - b.sampled_min)
        assert b.samples == 2000
    ok = worst_crit <= 1e-7 and worst_sample <= 1e-6 and inexact == 0
    what = "dist(L, critical) - nu" if feasible else "odist(critical, L) - nu_bar"
    name = "feasible side: dist to ill-posed = nu" if feasible else "infeasible side: odist from ill-posed = nu_bar"
    return record(num, name, ok,
                  f"50 instances x 2000 samples, max {what} {worst_crit:.1e}, "
                  f"max measure - sampled min {worst_sample:.1e}, inexact paths {inexact}",
                  time.time() - t0, 60)


def test_03_main_theorem_feasible_side():
    assert _theorem_check(3, True)


def test_04_main_theorem_infeasible_side():
    assert _theorem_check(4, False)


def test_05_rotated_cone_example():
    t0 = time.time()
    worst = 0.0
    for phi in (math.pi / 12, math.pi / 8, math.pi / 6):
        K = Polyhedral2D(phi)
        L = orthonormal_basis([[0, 1]])
        v, s = nu(L, K, L2).value, sigma(L, K, L2).value
        pairs = [(v, math.sin(phi)), (s, 1 / (2 * math.cos(phi))), (s / v, 1 / math.sin(2 * phi)),
                 (theta(K), math.pi / 2 - 2 * phi)]
        worst = max(worst, max(abs(a - b) / abs(b) for a, b in pairs))
    assert record(5, "rotated cone nu, sigma, sigma/nu, Theta", worst <= 1e-6,
                  f"phi in {{pi/12, pi/8, pi/6}}, max relative error {worst:.1e}", time.time() - t0, 1)


def test_06_sigma_equals_nu():
    t0 = time.time()
    rng = np.random.default_rng(6)
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(3, 7))
        L = _feasible(rng, n, int(rng.integers(1, n)))
        worst = max(worst, abs(sigma(L, Orthant(n), L2).value - nu(L, Orthant(n), L2).value))
    # induced tri-norm: the generic vertex route for sigma against the LP for nu
    worst_e, paths = 0.0, set()
    for _ in range(20):
        n = int(rng.integers(3, 6))
        K = Orthant(n)
        L = _feasible(rng, n, int(rng.integers(1, n)))
        for primal in ("l1", "l2", "linf"):
            np_ = NormPair(NormSpec.parse(primal), NormSpec("InducedE", K))
            c = nu(L, K, np_)
            paths.add(c.path)
            s = min(sigma_inner(L, v, K, np_.primal)[0] for v in cone_ball_vertices(K, np_.tri))
            worst_e = max(worst_e, abs(s - c.value))
    ok = worst <= 1e-7 and worst_e <= 1e-7
    assert record(6, "sigma = nu (self-dual l2/l2 and induced tri-norm)", ok,
                  f"50 l2 instances max |sigma-nu| {worst:.1e}; 60 induced instances max {worst_e:.1e}, "
                  f"nu paths {sorted(paths)}", time.time() - t0, 30)


def test_07_symmetry_theorem():
    t0 = time.time()
    rng = np.random.default_rng(7)
    l1 = NormSpec("L1")
    np_ = NormPair.of("l1")
    worst_lo, worst_hi, worst_eq, used = -math.inf, -math.inf, 0.0, 0
    while used < 50:
        n = int(rng.integers(3, 6))
        L = _feasible(rng, n, int(rng.integers(1, n)))
        K = Orthant(n)
        s = sym(L, K, l1).value
        if not 1e-9 < s < 1 - 1e-9:
            continue
        used += 1
        g = sigma(L, K, np_).value
        worst_lo = max(worst_lo, s / (1 + s) - g)
        worst_hi = max(worst_hi, g - s / (1 - s))
        # over the orthant l1 is the induced dual norm, the equality case
        worst_eq = max(worst_eq, abs(g - s / (1 + s)))
    L = orthonormal_basis([[2, 1]])
    reg = (sym(L, Orthant(2), l1).value, sigma(L, Orthant(2), np_).value)
    reg_ok = abs(reg[0] - 0.5) <= 1e-9 and abs(reg[1] - 1 / 3) <= 1e-9
    ok = worst_lo <= 1e-7 and worst_hi <= 1e-7 and worst_eq <= 1e-7 and reg_ok
    assert record(7, "Sym/(1+Sym) <= sigma <= Sym/(1-Sym)", ok,
                  f"50 instances, worst violation (<= 0 holds) lo {worst_lo:.1e} hi {worst_hi:.1e}, equality err {worst_eq:.1e}; "
                  f"span(2,1): Sym={reg[0]:.6f}, sigma={reg[1]:.6f}", time.time() - t0, 30)


def test_08_renegar_sandwich():
    t0 = time.time()
    rng = np.random.default_rng(8)
    outside, worst_iso = 0, 0.0
    doms = ["l2", "l1", "linf"]
    for i in range(25):
        n = int(rng.integers(3, 6))
        m = int(rng.integers(1, 3))
        K = SecondOrder(n) if i % 5 == 4 else Orthant(n)
        M = rng.standard_normal((n, m))
        if i % 2 == 0:
            M[:, 0] = K.identity() + 0.4 * rng.standard_normal(n) / math.sqrt(n)
        if i % 3 == 0:
            M, _ = np.linalg.qr(M)
        A = LinearMap(M, NormSpec.parse(doms[0] if i % 3 == 0 else doms[i % 3]))
        rep = renegar_sandwich(A, K)
        est = rdist_estimate(A, K, budget=60, seed=i)
        if not rep.lower - 1e-6 <= est <= rep.upper + 1e-6:
            outside += 1
        if i % 3 == 0:
            worst_iso = max(worst_iso, abs(est - rep.grassmann_value) / rep.grassmann_value)
    ok = outside == 0 and worst_iso <= 0.05
    assert record(8, "Rdist estimate inside [g/||A^-1||, g||A||]", ok,
                  f"25 maps, {outside} outside, isometries max relative gap to nu {worst_iso:.2%}",
                  time.time() - t0, 120)


def test_09_preconditioning():
    t0 = time.time()
    rng = np.random.default_rng(9)
    worst_nu, worst_ratio = -math.inf, -math.inf
    for i in range(25):
        K = Psd(2) if i % 5 == 0 else (Psd(3) if i % 5 == 1 else Orthant(int(rng.integers(3, 6))))
        n = K.dim
        M = rng.standard_normal((n, 2))
        M[:, 0] = K.identity() + 0.6 * rng.standard_normal(n) / math.sqrt(n)
        A = LinearMap(M)
        P, R, rep = precondition(A, K)
        B = LinearMap(P @ M @ R)
        r = K.rank
        worst_nu = max(worst_nu, 1 / math.sqrt(r) - rep.nu_after)
        est = rdist_estimate(B, K, budget=40, seed=i)
        worst_ratio = max(worst_ratio, (np.linalg.norm(B.matrix, 2) / est) / (math.sqrt(r) * 1.05))
    ok = worst_nu <= 1e-7 and worst_ratio <= 1
    assert record(9, "preconditioned nu(PL) >= 1/sqrt(r)", ok,
                  f"25 orthant/PSD maps, worst 1/sqrt(r) - nu(PL) {worst_nu:.1e}, "
                  f"worst ||PAR||/estimate over 1.05 sqrt(r) {worst_ratio:.3f}", time.time() - t0, 120)


def test_10_goldman_tucker():
    t0 = time.time()
    rng = np.random.default_rng(10)
    bad_support, worst_rec, min_nu = 0, 0.0, math.inf
    for i in range(100):
        # planted block structure so both blocks are usually nonempty
        k = int(rng.integers(1, 6))
        B = rng.standard_normal((6, 3))
        B[:k, 0] = rng.uniform(0.3, 1.0, k)
        B[k:, 0] = 0.0
        w = rng.uniform(0.3, 1.0, 6 - k)
        B[k:, 1:] -= np.outer(w, w @ B[k:, 1:]) / (w @ w)
        L = Subspace.from_columns(B)
        gt = goldman_tucker(L)
        if tuple(np.flatnonzero(gt.x_cert > 1e-9)) != gt.B or tuple(np.flatnonzero(gt.y_cert > 1e-9)) != gt.N:
            bad_support += 1
        worst_rec = max(worst_rec, block_decompose(LinearMap(B), gt).reconstruction_residual)
        LB, LN = block_subspaces(L, gt)
        for S, idx in ((LB, gt.B), (LN, gt.N)):
            if S is not None:
                min_nu = min(min_nu, nu(S, Orthant(len(idx)), L2).value)
    gt = goldman_tucker(orthonormal_basis([[1, 1, 0]]))
    nb = partition_measures(orthonormal_basis([[1, 1, 0]]), NormPair.of("l1", "linf"), gt).nu_B.value
    reg_ok = gt.B == (0, 1) and gt.N == (2,) and abs(nb - 0.5) <= 1e-9
    ok = bad_support == 0 and worst_rec <= 1e-9 and min_nu > 1e-9 and reg_ok
    assert record(10, "Goldman-Tucker partition and blocks", ok,
                  f"100 subspaces in R^6, support mismatches {bad_support}, reconstruction {worst_rec:.1e}, "
                  f"min block nu {min_nu:.2e}; span(1,1,0): B={{1,2}} N={{3}} nu_B={nb:.6f}",
                  time.time() - t0, 30)


def _norm_identities(K, x):
    """Independent closed forms of the induced norm pair."""
    if isinstance(K, Psd):
        X = smat(x, K.k)
        return np.linalg.norm(X, 2), np.linalg.norm(X, "nuc")
    if isinstance(K, SecondOrder):
        nb = np.linalg.norm(x[1:])
        return abs(x[0]) + nb, max(abs(x[0]), nb)
    if isinstance(K, Orthant):
        return np.abs(x).max(), np.abs(x).sum()
    parts = [_norm_identities(b, x[K.offsets[i]:K.offsets[i + 1]]) for i, b in enumerate(K.blocks)]
    return max(p[0] for p in parts), sum(p[1] for p in parts)


def test_11_jordan_layer():
    t0 = time.time()
    rng = np.random.default_rng(11)
    worst = 0.0
    cones = [Orthant(5), SecondOrder(5), Psd(3), Product([Orthant(2), SecondOrder(3), Psd(2)])]
    for K in cones:
        e, w = K.identity(), K.frame_weights()
        ne, nd = NormSpec("InducedE", K), NormSpec("InducedEDual", K)
        for x in rng.standard_normal((1000, K.dim)):
            sd = K.spectral(x)
            C = sd.frame
            spec_e, spec_d = _norm_identities(K, x)
            worst = max(worst,
                        np.abs(sd.reconstruct() - x).max(),
                        np.abs(C.sum(axis=0) - e).max(),
                        np.abs(C @ C.T - np.diag(w)).max(),
                        abs(x @ x - w @ sd.eigenvalues ** 2),
                        abs(norm_eval(ne, x) - spec_e),
                        abs(norm_eval(nd, x) - spec_d))
    assert record(11, "Jordan spectral, frame and norm identities", worst <= 1e-9,
                  f"1000 elements x 4 cone kinds, max residual {worst:.1e}", time.time() - t0, 10)


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
