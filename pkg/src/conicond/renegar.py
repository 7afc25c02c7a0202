"""Data-dependent conditioning: operator norms, the Renegar sandwich and preconditioning.

A map ``A : W -> V`` is a matrix of shape ``(n, m)`` with ``n = dim V``.
``W`` carries the norm ``|.|`` (``domain_norm``); ``V`` carries the pair
``(||.||, |||.|||)``.  ``||A||`` uses ``||.||`` on ``V`` and perturbation sizes
``|||A - A'|||`` use ``|||.|||``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .cones import Cone, JordanCone
from .errors import IllPosedInstance, InfeasibleSide, NotInjective, UnsupportedNorm
from .linalg import Subspace
from .measures import NormPair, nu, nu_bar
from .measures._common import POSITIVITY_TOL
from .measures.sigma import sigma_inner
from .norms import L1, L2, LINF, NormSpec, ball_vertices, dual_ball_vertices, dual_maximizer, norm_eval

INJECTIVE_TOL = 1e-10
SAMPLED_NORM_BUDGET = 4000


@dataclass(frozen=True, eq=False)
class LinearMap:
    matrix: np.ndarray
    domain_norm: NormSpec = field(default_factory=lambda: NormSpec(L2))
    norms: NormPair = field(default_factory=lambda: NormPair.of("l2"))

    def __post_init__(self):
        M = np.atleast_2d(np.asarray(self.matrix, dtype=float))
        object.__setattr__(self, "matrix", M)
        if self.domain_norm.canonical().kind not in (L1, L2, LINF):
            raise UnsupportedNorm("the domain norm must be l1, l2 or linf")

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def m(self) -> int:
        return self.matrix.shape[1]

    def is_injective(self) -> bool:
        s = np.linalg.svd(self.matrix, compute_uv=False)
        return s.size == self.m and s[-1] > INJECTIVE_TOL

    def check_injective(self):
        if not self.is_injective():
            raise NotInjective("the map has a nontrivial kernel")

    def image(self) -> Subspace:
        self.check_injective()
        return Subspace.from_columns(self.matrix)

    def preimage(self, x) -> np.ndarray:
        return np.linalg.lstsq(self.matrix, np.asarray(x, dtype=float), rcond=None)[0]

    def with_matrix(self, M) -> "LinearMap":
        return LinearMap(M, self.domain_norm, self.norms)


# ---------------------------------------------------------------------------
# operator norms


def _domain_vertices(spec: NormSpec, m: int) -> np.ndarray:
    kind = spec.canonical().kind
    if kind == L1:
        return np.vstack([np.eye(m), -np.eye(m)])
    return np.array(list(itertools.product((1.0, -1.0), repeat=m)))


def operator_norm(M, domain: NormSpec, codomain: NormSpec, seed: int = 0):
    """``max_{|w| = 1} ||M w||``; returns ``(value, exact)``."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    dk, ck = domain.canonical().kind, codomain.canonical().kind
    if dk == L2 and ck == L2:
        return float(np.linalg.norm(M, 2)), True
    if dk in (L1, LINF):
        return max(norm_eval(codomain, M @ w) for w in _domain_vertices(domain, M.shape[1])), True
    if codomain.is_polyhedral:
        A = dual_ball_vertices(codomain, M.shape[0])
        return float(np.linalg.norm(A @ M, axis=1).max()), True
    rng = np.random.default_rng(seed)
    W = rng.standard_normal((SAMPLED_NORM_BUDGET, M.shape[1]))
    W /= np.linalg.norm(W, axis=1, keepdims=True)
    return max(norm_eval(codomain, M @ w) for w in W), False


def inverse_norm(A: LinearMap, seed: int = 0):
    """``max_{x in Image(A), ||x|| = 1} |A^{-1} x|``; returns ``(value, exact)``."""
    A.check_injective()
    M = A.matrix
    dk, primal = A.domain_norm.canonical().kind, A.norms.primal
    pk = primal.canonical().kind
    if dk == L2 and pk == L2:
        return float(1.0 / np.linalg.svd(M, compute_uv=False)[-1]), True
    if primal.is_polyhedral:
        # vertices of {x in Image(A) : ||x|| <= 1} map to those of the pulled-back ball
        V = ball_vertices(primal, A.image())
        return max(norm_eval(A.domain_norm, A.preimage(x)) for x in V), True
    if dk in (L1, LINF) and pk == L2:
        G = np.linalg.inv(M.T @ M)
        B = _domain_vertices(A.domain_norm.dual(), A.m)
        return float(np.sqrt(np.einsum("ij,jk,ik->i", B, G, B).max())), True
    rng = np.random.default_rng(seed)
    W = rng.standard_normal((SAMPLED_NORM_BUDGET, A.m))
    return max(norm_eval(A.domain_norm, w) / norm_eval(primal, M @ w) for w in W), False


@dataclass
class OpNorms:
    norm: float
    tri_norm: float
    inv_norm: float
    kappa: float
    exact: bool

    def to_dict(self) -> dict:
        return {"norm": self.norm, "tri_norm": self.tri_norm, "inv_norm": self.inv_norm,
                "kappa": self.kappa, "exact": self.exact}


def op_norms(A: LinearMap) -> OpNorms:
    a, e1 = operator_norm(A.matrix, A.domain_norm, A.norms.primal)
    t, e2 = operator_norm(A.matrix, A.domain_norm, A.norms.tri)
    inv, e3 = inverse_norm(A)
    return OpNorms(a, t, inv, a * inv, e1 and e2 and e3)


def perturbation_size(A: LinearMap, D) -> float:
    """``|||D||| = max_{|w| = 1} |||D w|||``."""
    return operator_norm(D, A.domain_norm, A.norms.tri)[0]


# ---------------------------------------------------------------------------
# sandwich


def feasibility_side(L: Subspace, K: Cone, np_: NormPair, seed: int = 0):
    """Return ``("feasible", nu_cert)``, ``("infeasible", nu_bar_cert)`` or raise IllPosedInstance."""
    c = nu(L, K, np_, seed=seed)
    if c.value > POSITIVITY_TOL:
        return "feasible", c
    c = nu_bar(L, K, np_, seed=seed)
    if c.value > POSITIVITY_TOL:
        return "infeasible", c
    raise IllPosedInstance("both nu and nu_bar vanish")


def constructive_perturbation(A: LinearMap, side: str, cert) -> np.ndarray:
    """The rank-one perturbation from the sandwich proof that makes ``A`` ill-posed."""
    M = A.matrix
    if side == "feasible":
        u = np.asarray(cert.witness("u"), dtype=float)
        v = dual_maximizer(A.norms.tri, u)
        v = v / float(u @ v)
        return -np.outer(v, M.T @ u)
    x = np.asarray(cert.witness("x"), dtype=float)
    v = np.asarray(cert.witness("v"), dtype=float)
    w = A.preimage(x)
    z = dual_maximizer(A.domain_norm.dual(), w)
    return np.outer(v - x, z) / norm_eval(A.domain_norm, w)


@dataclass
class SandwichReport:
    side: str
    grassmann_value: float
    lower: float
    upper: float
    norms: OpNorms
    constructive_upper: float
    rdist_estimate: Optional[float] = None

    @property
    def contains_estimate(self) -> Optional[bool]:
        if self.rdist_estimate is None:
            return None
        return self.lower - 1e-6 <= self.rdist_estimate <= self.upper + 1e-6

    def to_dict(self) -> dict:
        return {"side": self.side, "grassmann_value": self.grassmann_value, "lower": self.lower,
                "upper": self.upper, "constructive_upper": self.constructive_upper,
                "rdist_estimate": self.rdist_estimate, "contains_estimate": self.contains_estimate,
                "op_norms": self.norms.to_dict()}


def renegar_sandwich(A: LinearMap, K: Cone, estimate: Optional[float] = None, budget: int = 0,
                     seed: int = 0) -> SandwichReport:
    """``Rdist(A)`` lies in ``[g / ||A^{-1}||, g ||A||]`` with ``g = nu`` or ``nu_bar``.

    With ``budget > 0`` and no ``estimate`` the oracle estimate is computed.
    """
    L = A.image()
    side, cert = feasibility_side(L, K, A.norms, seed)
    on = op_norms(A)
    g = cert.value
    D = constructive_perturbation(A, side, cert)
    rep = SandwichReport(side, g, g / on.inv_norm, g * on.norm, on, perturbation_size(A, D), estimate)
    if estimate is None and budget > 0:
        from .oracle import rdist_estimate

        rep.rdist_estimate = rdist_estimate(A, K, budget=budget, seed=seed)
    return rep


# ---------------------------------------------------------------------------
# preconditioning


@dataclass
class PreconditionReport:
    x0: np.ndarray
    margin: float
    nu_before: float
    nu_after: float
    bound: float
    balance_residual: float

    @property
    def ok(self) -> bool:
        return self.nu_after >= self.bound - 1e-7

    def to_dict(self) -> dict:
        return {"x0": self.x0.tolist(), "margin": self.margin, "nu_before": self.nu_before,
                "nu_after": self.nu_after, "bound": self.bound, "balance_residual": self.balance_residual,
                "ok": self.ok}


def most_interior_point(L: Subspace, K: Cone, primal: NormSpec = NormSpec(L2)):
    """``argmax lambda_e(x)`` over ``x in L`` with ``||x|| <= 1``; returns ``(margin, x)``."""
    t, x, _ = sigma_inner(L, K.identity(), K, primal)
    return t, x


def precondition(A: LinearMap, K: Cone):
    """Automorphism ``P`` of ``K`` and ``R`` in GL(W) with ``PAR`` an isometry and ``e in Image(PAR)``."""
    if not isinstance(K, JordanCone):
        raise UnsupportedNorm("preconditioning needs a symmetric cone")
    if not A.norms.euclidean:
        raise UnsupportedNorm("preconditioning is stated for l2/l2")
    L = A.image()
    t, x0 = most_interior_point(L, K)
    if t <= POSITIVITY_TOL:
        raise InfeasibleSide("Image(A) misses the interior of K")
    P = K.automorphism_to_identity(x0)
    Q, Rq = np.linalg.qr(P @ A.matrix)
    R = np.linalg.inv(Rq)
    PAR = P @ A.matrix @ R
    np_ = NormPair.of("l2")
    before = nu(L, K, np_).value
    after = nu(Subspace.from_columns(PAR), K, np_).value
    rep = PreconditionReport(x0, t, before, after, 1.0 / math.sqrt(K.rank),
                             float(np.abs(PAR.T @ PAR - np.eye(A.m)).max()))
    return P, R, rep
