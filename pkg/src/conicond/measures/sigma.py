"""The sigma measure, the symmetry measure and the cone angle ``Theta(K*, K)``.

Both ``sigma`` and ``Sym`` are minima over normalized ``v in K`` of a
function that is quasi-concave and homogeneous of degree -1 in ``v``.  When
``K intersected with the unit ball`` is a polytope the minimum sits at one
of its nonzero vertices, which gives the exact paths below.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .._program import Program, cone_is_polyhedral, facet_matrix
from ..cones import Cone, JordanCone, Orthant, Polyhedral2D, Product, Psd, SecondOrder
from ..linalg import Subspace, min_norm_to_subspace
from ..norms import INDUCED_E_DUAL, L1, L2, LINF, NormSpec, norm_eval
from ._common import (
    CLOSED_FORM, CONIC_EXACT, LP_EXACT, POSITIVITY_TOL, SAMPLED, MeasureCertificate, NormPair,
    sampled_bracket,
)
from .violation import _tri_is_induced_e, nu

MAX_VERTEX_DIM = 10
CONIC_SAMPLE_BUDGET = 200


def cone_ball_vertices(K: Cone, spec: NormSpec) -> np.ndarray:
    """Nonzero extreme points of ``{v in K : ||v|| <= 1}`` when that set is a polytope (rows)."""
    c = spec.canonical().kind
    if K.is_orthant() and c in (L1, LINF):
        n = K.dim
        if c == L1:
            return np.eye(n)
        if n > MAX_VERTEX_DIM:
            raise ValueError(f"dimension {n} too large for vertex enumeration")
        return np.array([s for s in itertools.product((0.0, 1.0), repeat=n) if any(s)])
    if isinstance(K, Polyhedral2D) and c in (L1, LINF):
        out = [g / norm_eval(spec, g) for g in K.generators()]
        ball = np.eye(2) if c == L1 else np.array([[1.0, 1.0], [1.0, -1.0]])
        for b in np.vstack([ball, -ball]):
            if K.contains(b, 1e-12) and not any(np.allclose(b, o) for o in out):
                out.append(b)
        return np.array(out)
    return None


# ---------------------------------------------------------------------------
# sigma


def sigma_inner(L: Subspace, v, K: Cone, primal: NormSpec):
    """``max {t : x - t v in K, x in L, ||x|| <= 1}``; returns ``(t, x, is_lp)``."""
    n, m = L.ambient_dim, L.dim
    prog = Program()
    prog.var("c", m)
    prog.var("t", 1)
    prog.var("z", n)
    prog.eq({"z": np.eye(n), "c": -L.basis, "t": np.asarray(v, float).reshape(-1, 1)}, np.zeros(n))
    prog.in_cone("z", K)
    prog.norm_le({"c": L.basis}, np.zeros(n), primal, 1.0)
    prog.maximize({"t": np.ones(1)})
    status, val, z = prog.solve()
    if status != "Optimal":
        return -np.inf, None, prog.is_lp()
    return float(z["t"][0]), L.basis @ z["c"], prog.is_lp()


def sigma_dual_inner(L: Subspace, v, K: Cone, primal: NormSpec):
    """``min ||u - y||_*`` over ``u in K*`` with ``<u, v> = 1`` and ``y in L^perp``."""
    n = L.ambient_dim
    C = L.complement()
    prog = Program()
    prog.var("u", n)
    terms = {"u": np.eye(n)}
    if C is not None:
        prog.var("w", C.dim)
        terms["w"] = -C.basis
    prog.var("__t", 1, lower=0.0)
    prog.in_cone("u", K, dual=True)
    prog.eq({"u": np.asarray(v, float)}, 1.0)
    prog.norm_le(terms, np.zeros(n), primal.dual(), "__t")
    prog.minimize({"__t": np.ones(1)})
    status, val, z = prog.solve()
    if status != "Optimal":
        return np.inf, None, None
    u = z["u"]
    y = C.basis @ z["w"] if C is not None else np.zeros(n)
    return float(norm_eval(primal.dual(), u - y)), u, y


def _max_over_cone_ball(g, K: Cone, tri: NormSpec) -> float:
    """``max <g, v>`` over ``v in K`` with ``|||v||| <= 1``."""
    if tri.canonical().kind == L2:
        return float(np.linalg.norm(K.project(g)))
    n = K.dim
    prog = Program()
    prog.var("v", n)
    prog.in_cone("v", K)
    prog.norm_le({"v": np.eye(n)}, np.zeros(n), tri, 1.0)
    prog.maximize({"v": g})
    _, val, _ = prog.solve()
    return float(val)


def _sigma_line_polyhedral(L: Subspace, K: Cone, np_: NormPair):
    """Exact sigma for a line ``L`` and a polyhedral ``K = {G x >= 0}``."""
    x = L.basis[:, 0]
    G = facet_matrix(K)
    if np.all(G @ x < 0):
        x = -x
    x = x / norm_eval(np_.primal, x)
    best = (np.inf, None)
    for g in G:
        h = _max_over_cone_ball(g, K, np_.tri)
        if h <= 1e-15:
            continue
        val = float(g @ x) / h
        if val < best[0]:
            best = (val, g)
    return best[0], x


def sigma(L: Subspace, K: Cone, np_: NormPair, samples: int = None, seed: int = 0) -> MeasureCertificate:
    """``min_{v in K, |||v||| = 1} max_{x in L, ||x|| <= 1} lambda_v(x)``.

    On the infeasible side (``nu <= 1e-9``) the value is reported as 0 with
    ``info["infeasible_side"]`` set.
    """
    nu_cert = nu(L, K, np_, seed=seed)
    if nu_cert.value <= POSITIVITY_TOL:
        return MeasureCertificate("sigma", 0.0, nu_cert.path, info={"infeasible_side": True})
    if _tri_is_induced_e(np_.tri, K):
        return MeasureCertificate("sigma", nu_cert.value, nu_cert.path, dict(nu_cert.witnesses),
                                  nu_cert.alignment_residual, nu_cert.bracket, {"via": "nu"})
    if np_.euclidean and K.self_dual and nu_cert.exact:
        # sigma >= nu always; the primal form at v = u_bar gives the matching upper bound
        u = nu_cert.witness("u")
        upper, x, _ = sigma_inner(L, u / np.linalg.norm(u), K, np_.primal)
        wit = dict(nu_cert.witnesses, v=u / np.linalg.norm(u), x=x)
        return MeasureCertificate("sigma", nu_cert.value, nu_cert.path, wit,
                                  max(nu_cert.alignment_residual, abs(upper - nu_cert.value)),
                                  nu_cert.bracket, {"via": "nu", "primal_upper": upper})
    if cone_is_polyhedral(K) and L.dim == 1 and (np_.tri.is_polyhedral or np_.tri.canonical().kind == L2):
        val, x = _sigma_line_polyhedral(L, K, np_)
        path = CLOSED_FORM if np_.tri.canonical().kind == L2 else LP_EXACT
        return MeasureCertificate("sigma", val, path, {"x": x})
    V = cone_ball_vertices(K, np_.tri)
    if V is not None:
        best = (np.inf, None, None, True)
        for v in V:
            t, x, is_lp = sigma_inner(L, v, K, np_.primal)
            if t < best[0] - 1e-12:
                best = (t, v, x, is_lp)
        t, v, x, is_lp = best
        dval, u, y = sigma_dual_inner(L, v, K, np_.primal)
        cert = MeasureCertificate("sigma", t, LP_EXACT if is_lp else CONIC_EXACT,
                                  {"v": v, "x": x, "u": u, "y": y}, abs(t - dval), info={"dual_value": dval})
        return cert
    if np_.tri.kind == INDUCED_E_DUAL and isinstance(K, JordanCone):
        return _sigma_idempotent(L, K, np_, samples or CONIC_SAMPLE_BUDGET, seed)
    rng = np.random.default_rng(seed)
    vs = K.sample(rng, samples or CONIC_SAMPLE_BUDGET)
    best = (np.inf, None, None)
    for v in vs:
        v = v / norm_eval(np_.tri, v)
        t, x, _ = sigma_inner(L, v, K, np_.primal)
        if t < best[0]:
            best = (t, v, x)
    t, v, x = best
    return MeasureCertificate("sigma", t, SAMPLED, {"v": v, "x": x}, bracket=sampled_bracket(t, True))


def _sigma_idempotent(L, K: JordanCone, np_: NormPair, samples: int, seed: int):
    """``min_{c in PI} max_{x in L cap K, ||x|| = 1} <c, x>`` over sampled primitive idempotents."""
    rng = np.random.default_rng(seed)
    n = K.dim
    best = (np.inf, None, None)
    for _ in range(samples):
        sd = K.spectral(K.sample(rng, 1)[0])
        c = sd.frame[rng.integers(len(sd.frame))]
        prog = Program()
        prog.var("c", L.dim)
        prog.var("x", n)
        prog.eq({"x": np.eye(n), "c": -L.basis}, np.zeros(n))
        prog.in_cone("x", K)
        prog.norm_le({"x": np.eye(n)}, np.zeros(n), np_.primal, 1.0)
        prog.maximize({"x": c})
        status, val, z = prog.solve()
        if status == "Optimal" and val < best[0]:
            best = (val, c, z["x"])
    val, c, x = best
    return MeasureCertificate("sigma", float(val), SAMPLED, {"v": c, "x": x}, bracket=sampled_bracket(val, True),
                              info={"via": "primitive idempotents"})


# ---------------------------------------------------------------------------
# Sym


def sym_inner(L: Subspace, v, K: Cone, norm: NormSpec):
    """``max {t : x + t v in L, x in K, ||x|| <= 1}`` (``inf`` when unbounded)."""
    n, m = L.ambient_dim, L.dim
    prog = Program()
    prog.var("x", n)
    prog.var("c", m)
    prog.var("t", 1)
    prog.eq({"x": np.eye(n), "t": np.asarray(v, float).reshape(-1, 1), "c": -L.basis}, np.zeros(n))
    prog.in_cone("x", K)
    prog.norm_le({"x": np.eye(n)}, np.zeros(n), norm, 1.0)
    prog.maximize({"t": np.ones(1)})
    status, val, z = prog.solve()
    if status == "Unbounded":
        return np.inf, None, prog.is_lp()
    return float(z["t"][0]), z["x"], prog.is_lp()


def _sym_kernel_inner(A, p, K: Cone, norm: NormSpec):
    """``max {t : -t A p = A x, x in K, ||x|| <= 1}``."""
    n = A.shape[1]
    Ap = A @ p
    prog = Program()
    prog.var("x", n)
    prog.var("t", 1)
    prog.eq({"x": A, "t": Ap.reshape(-1, 1)}, np.zeros(A.shape[0]))
    prog.in_cone("x", K)
    prog.norm_le({"x": np.eye(n)}, np.zeros(n), norm, 1.0)
    prog.maximize({"t": np.ones(1)})
    status, val, z = prog.solve()
    return np.inf if status == "Unbounded" else float(z["t"][0])


def sym(L: Subspace, K: Cone, norm: NormSpec, samples: int = None, seed: int = 0) -> MeasureCertificate:
    """Symmetry of ``{x in K : ||x|| <= 1}`` about 0 after quotienting by ``L``."""
    V = cone_ball_vertices(K, norm)
    if V is not None:
        path = LP_EXACT
    else:
        rng = np.random.default_rng(seed)
        V = K.sample(rng, samples or CONIC_SAMPLE_BUDGET)
        V = V / np.array([norm_eval(norm, v) for v in V])[:, None]
        path = SAMPLED
    best = (np.inf, None, None)
    for v in V:
        t, x, is_lp = sym_inner(L, v, K, norm)
        if not is_lp and path == LP_EXACT:
            path = CONIC_EXACT
        if t < best[0] - 1e-12:
            best = (t, v, x)
    t, v, x = best
    t = float(min(max(t, 0.0), 1.0))
    cert = MeasureCertificate("sym", t, path, {"v": v, "x": x} if x is not None else {"v": v})
    if path == SAMPLED:
        cert.bracket = sampled_bracket(t, True)
    return cert


def sym_via_kernel(A, K: Cone, norm: NormSpec) -> float:
    """Sym computed from a matrix ``A`` with ``ker(A) = L`` (exact paths only)."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    V = cone_ball_vertices(K, norm)
    if V is None:
        raise ValueError("kernel route needs a polytope cone-ball section")
    best = np.inf
    for p in V:
        if np.abs(A @ p).max() <= 1e-12:
            continue
        best = min(best, _sym_kernel_inner(A, p, K, norm))
    return float(min(max(best, 0.0), 1.0))


# ---------------------------------------------------------------------------
# Theta


def _self_dual_kind(K: Cone) -> bool:
    if isinstance(K, (Orthant, SecondOrder, Psd)):
        return True
    if isinstance(K, Product):
        return all(_self_dual_kind(b) for b in K.blocks)
    return bool(getattr(K, "self_dual", False))


def theta(K: Cone, samples: int = 4000, seed: int = 0) -> float:
    """``max_{u in K*} min_{v in K} angle(u, v)`` in the Euclidean geometry."""
    if _self_dual_kind(K):
        return 0.0
    if isinstance(K, Polyhedral2D):
        return max(0.0, math.pi / 2 - 2.0 * K.phi)
    rng = np.random.default_rng(seed)
    U = K.sample_dual(rng, samples)
    best = 0.0
    for u in U:
        p = K.project(u)
        nu_, npj = np.linalg.norm(u), np.linalg.norm(p)
        ang = math.pi / 2 if npj <= 1e-15 else math.acos(min(1.0, float(u @ p) / (nu_ * npj)))
        best = max(best, ang)
    return best


def cone_alignment_constant(K: Cone, np_: NormPair) -> float:
    """``min_{u in K*, |||u|||_* = 1} max_{v in K, |||v||| = 1} <u, v>`` (ratio bound for sigma/nu)."""
    if np_.tri.canonical().kind == L2:
        return math.cos(theta(K))
    if _tri_is_induced_e(np_.tri, K) or (K.is_orthant() and np_.tri.is_polyhedral):
        return 1.0
    rng = np.random.default_rng(0)
    U = K.sample_dual(rng, CONIC_SAMPLE_BUDGET)
    vals = [_max_over_cone_ball(u / norm_eval(np_.tri.dual(), u), K, np_.tri) for u in U]
    return float(min(vals))
