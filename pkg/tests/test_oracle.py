import math

import numpy as np
import pytest

from conicond.cones import Orthant, Polyhedral2D, Psd, SecondOrder
from conicond.linalg import Subspace, orthonormal_basis
from conicond.measures import NormPair, dist, nu, nu_bar, odist
from conicond.oracle import (
    complementary_pair, dist_l2_batch, dist_to_illposed_estimate, fast_dist, fast_odist, feasibility_status,
    odist_from_illposed_estimate, rdist_estimate, sample_illposed, sample_illposed_bases, verify_suite,
)
from conicond.instance import generate, parse_instance
from conicond.renegar import LinearMap

from conftest import feasible_orthant_subspace, infeasible_orthant_subspace, random_subspace

CONES = [Orthant(4), SecondOrder(4), Psd(2), Polyhedral2D(0.4)]


@pytest.mark.parametrize("K", CONES, ids=repr)
def test_complementary_pairs(rng, K):
    for _ in range(50):
        u, v = complementary_pair(K, rng)
        assert K.dual_contains(u, 1e-12) and K.contains(v, 1e-12)
        assert abs(u @ v) <= 1e-12 and np.linalg.norm(u) > 0 and np.linalg.norm(v) > 0


@pytest.mark.parametrize("K", [Orthant(4), SecondOrder(4)], ids=repr)
def test_samples_have_both_measures_zero(K):
    n = K.dim
    np_ = NormPair.of("l2")
    for S in sample_illposed(K, n, 2, 10, seed=3):
        assert nu(S, K, np_).value <= 1e-6
        assert nu_bar(S, K, np_).value <= 1e-6


def _psd_margin(B, k=3):
    # max t with X = smat(B c) >= t I and trace X <= 1, solved as an SDP
    import cvxpy as cp
    c = cp.Variable(B.shape[1])
    t = cp.Variable()
    X = cp.Variable((k, k), symmetric=True)
    x = B @ c
    iu = np.triu_indices(k)
    cons = [X >> t * np.eye(k), cp.trace(X) <= 1]
    for j, (a, b) in enumerate(zip(*iu)):
        cons.append(X[a, b] == x[j] / (1.0 if a == b else math.sqrt(2.0)))
    cp.Problem(cp.Maximize(t), cons).solve()
    return t.value


def test_psd_samples_miss_both_interiors():
    for S in sample_illposed(Psd(3), 6, 2, 5, seed=3):
        assert _psd_margin(S.basis) <= 1e-6
        assert _psd_margin(S.complement().basis) <= 1e-6


def test_wedge_samples_are_lines_on_the_boundary():
    K = Polyhedral2D(0.4)
    for S in sample_illposed(K, 2, 1, 10, seed=1):
        d = S.basis[:, 0]
        assert min(abs(abs(d @ g) - 1) for g in K.generators()) <= 1e-12


def test_sampling_is_deterministic():
    a = sample_illposed_bases(Orthant(5), 5, 2, 20, seed=7)
    b = sample_illposed_bases(Orthant(5), 5, 2, 20, seed=7)
    assert np.array_equal(a, b)


def test_batch_l2_distance(rng):
    L = random_subspace(rng, 5, 2)
    Q = sample_illposed_bases(Orthant(5), 5, 2, 20, seed=0)
    got = dist_l2_batch(L, Q)
    np_ = NormPair.of("l2")
    want = [dist(L, Subspace(q), np_).value for q in Q]
    assert np.allclose(got, want, atol=1e-9)


@pytest.mark.parametrize("tags", [("l2", "l2"), ("l1", "l1"), ("linf", "linf"), ("l1", "linf"), ("linf", "l2")])
def test_fast_routes_match_measures(rng, tags):
    np_ = NormPair.of(*tags)
    for m in (1, 2):
        L1, L2 = random_subspace(rng, 4, m), random_subspace(rng, 4, m)
        assert fast_dist(L1, L2, np_) == pytest.approx(dist(L1, L2, np_).value, abs=1e-7)
        if m == 1 or np_.euclidean:
            assert fast_odist(L1, L2, np_) == pytest.approx(odist(L1, L2, np_).value, abs=1e-7)


def test_brackets(rng):
    np_ = NormPair.of("l2")
    for _ in range(5):
        L = feasible_orthant_subspace(rng, 5, 2)
        b = dist_to_illposed_estimate(L, Orthant(5), np_, budget=500)
        assert b.consistent and b.exact and b.critical <= b.measure + 1e-7
        L = infeasible_orthant_subspace(rng, 5, 2)
        b = odist_from_illposed_estimate(L, Orthant(5), np_, budget=500)
        assert b.consistent and b.critical <= b.measure + 1e-7


def test_status_by_two_routes(rng):
    # LP margins and eigenvalue margins agree on a second-order cone given as a product of one block
    for _ in range(10):
        M = rng.standard_normal((4, 2))
        s = feasibility_status(M, SecondOrder(4))
        assert s in ("primal", "dual")
        L = Subspace.from_columns(M)
        np_ = NormPair.of("l2")
        assert (s == "primal") == (nu(L, SecondOrder(4), np_).value > 1e-9)


def test_rdist_isometry():
    Q = orthonormal_basis([[1, 1]]).basis
    est = rdist_estimate(LinearMap(Q), Orthant(2), budget=50, detail=True)
    assert est.value == pytest.approx(1 / math.sqrt(2), rel=0.05)
    assert est.value <= est.constructive * (1 + 1e-5)


@pytest.mark.parametrize("cone,norms", [("orthant", ("l2", "l2")), ("soc", ("l2", "l2")),
                                        ("orthant", ("l1", "linf"))])
@pytest.mark.parametrize("side", ["feasible", "infeasible"])
def test_suite_passes_on_generated(cone, norms, side):
    m = 2 if norms == ("l2", "l2") else 1
    inst = parse_instance(generate(5, 4, m, cone, norms, side, with_map=True))
    rep = verify_suite(inst, budget=30)
    assert rep.passed, [c.to_dict() for c in rep.checks if not c.passed]
    assert rep.checks
