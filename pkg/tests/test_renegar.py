import math

import numpy as np
import pytest

from conicond.cones import Orthant, Psd, SecondOrder, smat, svec
from conicond.errors import InfeasibleSide, NotInjective
from conicond.linalg import Subspace
from conicond.measures import NormPair, nu
from conicond.norms import NormSpec, norm_eval
from conicond.oracle import feasibility_status, rdist_estimate
from conicond.renegar import (
    LinearMap, constructive_perturbation, feasibility_side, op_norms, operator_norm, precondition,
    renegar_sandwich,
)



def test_operator_norm_examples():
    assert operator_norm([[1.0], [1.0]], NormSpec("L2"), NormSpec("L1"))[0] == pytest.approx(2.0)
    on = op_norms(LinearMap(np.array([[2.0, 0], [0, 1], [0, 0]])))
    assert (on.norm, on.inv_norm, on.kappa) == pytest.approx((2.0, 1.0, 2.0))
    Q, _ = np.linalg.qr(np.random.default_rng(0).standard_normal((4, 2)))
    on = op_norms(LinearMap(Q))
    assert (on.norm, on.inv_norm, on.kappa) == pytest.approx((1.0, 1.0, 1.0))


@pytest.mark.parametrize("dom", ["l1", "l2", "linf"])
@pytest.mark.parametrize("cod", ["l1", "l2", "linf"])
def test_operator_norm_against_sampling(rng, dom, cod):
    M = rng.standard_normal((4, 2))
    d, c = NormSpec.parse(dom), NormSpec.parse(cod)
    val, exact = operator_norm(M, d, c)
    th = np.linspace(0, 2 * math.pi, 100_001)
    W = np.column_stack([np.cos(th), np.sin(th)])
    W /= np.array([norm_eval(d, w) for w in W[::1]])[:, None]
    sampled = max(norm_eval(c, M @ w) for w in W[::10])
    assert exact
    assert sampled <= val + 1e-9 and val <= sampled * (1 + 1e-3)


def test_inverse_norm_against_sampling(rng):
    for dom, prim in [("l2", "l1"), ("l1", "l2"), ("linf", "linf")]:
        A = LinearMap(rng.standard_normal((4, 2)), NormSpec.parse(dom), NormPair.of(prim))
        th = np.linspace(0, 2 * math.pi, 20_001)
        W = np.column_stack([np.cos(th), np.sin(th)])
        ratio = max(norm_eval(A.domain_norm, w) / norm_eval(A.norms.primal, A.matrix @ w) for w in W)
        inv = op_norms(A).inv_norm
        assert ratio <= inv + 1e-9 and inv <= ratio * (1 + 1e-3)


def test_kappa_at_least_one(rng):
    for _ in range(20):
        assert op_norms(LinearMap(rng.standard_normal((5, 3)))).kappa >= 1 - 1e-12


def test_not_injective():
    with pytest.raises(NotInjective):
        LinearMap(np.array([[1.0, 2.0], [2.0, 4.0], [0, 0]])).image()


def test_isometry_sandwich_collapses(rng):
    Q, _ = np.linalg.qr(np.c_[np.ones(4), rng.standard_normal((4, 1))])
    rep = renegar_sandwich(LinearMap(Q), Orthant(4))
    assert rep.lower == pytest.approx(rep.upper) == pytest.approx(rep.grassmann_value)


def test_scaled_isometry(rng):
    Q, _ = np.linalg.qr(np.c_[np.ones(4), rng.standard_normal((4, 1))])
    A = LinearMap(2 * Q)
    rep = renegar_sandwich(A, Orthant(4))
    g = nu(A.image(), Orthant(4), A.norms).value
    assert rep.lower == pytest.approx(2 * g) and rep.upper == pytest.approx(2 * g)
    est = rdist_estimate(A, Orthant(4), budget=50)
    assert est == pytest.approx(2 * g, rel=0.05)
    assert rep.lower - 1e-6 <= est <= rep.upper + 1e-6


@pytest.mark.parametrize("side", ["feasible", "infeasible"])
def test_constructive_perturbation_reaches_the_boundary(rng, side):
    K = Orthant(4)
    B = rng.standard_normal((4, 2))
    if side == "feasible":
        B[:, 0] = rng.uniform(0.3, 1.0, 4)
    else:
        w = rng.uniform(0.3, 1.0, 4)
        B -= np.outer(w, w @ B) / (w @ w)
    A = LinearMap(B)
    s, cert = feasibility_side(A.image(), K, A.norms)
    assert s == side
    D = constructive_perturbation(A, s, cert)
    assert feasibility_status(B + D, K) == "ill"
    rep = renegar_sandwich(A, K)
    assert rep.lower - 1e-9 <= rep.constructive_upper <= rep.upper + 1e-9


def test_feasibility_status_sides():
    K = Orthant(2)
    assert feasibility_status([[1.0], [1.0]], K) == "primal"
    assert feasibility_status([[1.0], [-1.0]], K) == "dual"
    assert feasibility_status([[1.0], [0.0]], K) == "ill"


def test_precondition_examples():
    P, R, rep = precondition(LinearMap(np.array([[2.0], [1.0]])), Orthant(2))
    # P is the automorphism for the most interior point, a positive multiple of diag(1/2, 1)
    assert np.allclose(P / P[1, 1], np.diag([0.5, 1.0]))
    assert rep.nu_after >= 1 / math.sqrt(2) - 1e-7 and rep.balance_residual <= 1e-10
    n = 5
    P, R, rep = precondition(LinearMap(np.ones((n, 1))), Orthant(n))
    assert np.allclose(P / P[0, 0], np.eye(n))
    assert rep.nu_after == pytest.approx(1 / math.sqrt(n))


def test_precondition_psd_diag():
    K = Psd(2)
    M = np.c_[svec(np.diag([4.0, 1.0])), svec(np.array([[0.0, 1.0], [1.0, 0.0]]))]
    P, R, rep = precondition(LinearMap(M), K)
    assert rep.ok and rep.bound == pytest.approx(1 / math.sqrt(2))
    X0 = smat(rep.x0, 2)
    assert np.allclose(smat(P @ rep.x0, 2), np.eye(2), atol=1e-9)
    assert np.linalg.eigvalsh(X0).min() > 0


def test_precondition_rejects_infeasible():
    with pytest.raises(InfeasibleSide):
        precondition(LinearMap(np.array([[1.0], [-1.0]])), Orthant(2))


@pytest.mark.parametrize("K", [Orthant(5), SecondOrder(4), Psd(2)], ids=repr)
def test_precondition_bound_random(rng, K):
    for _ in range(3):
        B = rng.standard_normal((K.dim, 2))
        B[:, 0] = K.identity() + 0.5 * rng.standard_normal(K.dim) / math.sqrt(K.dim)
        P, R, rep = precondition(LinearMap(B), K)
        PAR = P @ B @ R
        assert rep.ok
        assert np.allclose(PAR.T @ PAR, np.eye(2), atol=1e-10)
        assert nu(Subspace.from_columns(PAR), K, NormPair.of("l2")).value >= 1 / math.sqrt(K.rank) - 1e-7
