"""Least-violation measures ``nu`` (feasible side) and ``nu_bar`` (infeasible side)."""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.optimize import brentq

from .._program import Program, cone_is_polyhedral, minimize_norm
from ..cones import Cone, JordanCone, Polyhedral2D, Psd, SecondOrder
from ..linalg import Subspace, min_norm_to_subspace
from ..norms import INDUCED_E, L1, L2, LINF, NormSpec, dual_ball_vertices, dual_maximizer, norm_eval
from ._common import (
    CLOSED_FORM, CONIC_EXACT, LP_EXACT, POSITIVITY_TOL, SAMPLED, MeasureCertificate, NormPair,
    sampled_bracket,
)
from .distances import min_ratio

MAX_SUPPORT_DIM = 10
CONIC_SAMPLE_BUDGET = 200


# ---------------------------------------------------------------------------
# Euclidean helper: min_{u in C, ||u||_2 = 1} ||P_S u||_2


def min_projection_on_cone(S: Subspace, C: Cone, dual: bool, samples: int = 2000, seed: int = 0):
    """Minimize ``||P_S u||`` over unit ``u`` in ``C`` (``C*`` when ``dual``).

    Returns ``(value, u, path)``.  Exact for orthants (support enumeration,
    n <= 10), planar wedges, second-order cones and 2x2 PSD; sampled
    otherwise.
    """
    P = S.projector
    if isinstance(C, Polyhedral2D):
        W = C.dual() if dual else C
        return _min_quadratic_wedge(P, W) + (CLOSED_FORM,)
    if C.is_orthant() and C.dim <= MAX_SUPPORT_DIM:
        return _min_quadratic_orthant(P) + (CLOSED_FORM,)
    if isinstance(C, SecondOrder):
        return _min_quadratic_soc(P) + (CLOSED_FORM,)
    if isinstance(C, Psd) and C.k == 2:
        T = _psd2_to_soc3()
        val, u = _min_quadratic_soc(T @ P @ T.T)
        return val, T.T @ u, CLOSED_FORM
    val, u = _min_quadratic_sampled(P, C, samples, seed)
    return val, u, SAMPLED


def _psd2_to_soc3() -> np.ndarray:
    """Isometry of svec coordinates of 2x2 symmetric matrices onto R^3 mapping PSD onto SOC."""
    r = 1.0 / math.sqrt(2.0)
    return np.array([[r, 0.0, r], [r, 0.0, -r], [0.0, 1.0, 0.0]])


def _min_quadratic_orthant(P):
    n = P.shape[0]
    best, best_u = np.inf, None
    for size in range(1, n + 1):
        for S in itertools.combinations(range(n), size):
            idx = list(S)
            w, Q = np.linalg.eigh(P[np.ix_(idx, idx)])
            for j in range(size):
                q = Q[:, j]
                q = q if q.sum() >= 0 else -q
                if q.min() < -1e-12:
                    continue
                if w[j] < best - 1e-15:
                    u = np.zeros(n)
                    u[idx] = np.maximum(q, 0.0)
                    u /= np.linalg.norm(u)
                    best, best_u = w[j], u
    val = float(np.sqrt(max(best_u @ P @ best_u, 0.0)))
    return val, best_u


def _min_quadratic_wedge(P, W: Polyhedral2D):
    cands = [g / np.linalg.norm(g) for g in W.generators()]
    _, Q = np.linalg.eigh(P)
    for j in range(2):
        for s in (1.0, -1.0):
            if W.contains(s * Q[:, j], 1e-13):
                cands.append(s * Q[:, j])
    vals = [float(u @ P @ u) for u in cands]
    k = int(np.argmin(vals))
    return float(np.sqrt(max(vals[k], 0.0))), cands[k]


def _min_quadratic_soc(P):
    """Exact ``min u'Pu`` over unit vectors of the second-order cone."""
    n = P.shape[0]
    cands = []
    w, Q = np.linalg.eigh(P)
    for j in range(n):
        for s in (1.0, -1.0):
            q = s * Q[:, j]
            if q[0] >= np.linalg.norm(q[1:]) - 1e-13:
                cands.append(q)
    # boundary: u = (1, d)/sqrt(2), ||d|| = 1, minimize d'Qd + 2 p'd
    p, Qb = P[0, 1:], P[1:, 1:]
    for d in _sphere_quadratic_min(Qb, p):
        cands.append(np.concatenate([[1.0], d]) / math.sqrt(2.0))
    vals = [float(u @ P @ u) for u in cands]
    k = int(np.argmin(vals))
    return float(np.sqrt(max(vals[k], 0.0))), cands[k]


def _sphere_quadratic_min(Q, p):
    """Global minimizers (candidates) of ``d'Qd + 2p'd`` over the unit sphere."""
    k = Q.shape[0]
    if k == 1:
        return [np.array([1.0]), np.array([-1.0])]
    lam, W = np.linalg.eigh(Q)
    pt = W.T @ p
    lmin = lam[0]
    tol = 1e-10 * max(1.0, np.abs(lam).max())
    low = np.abs(lam - lmin) <= tol
    out = []
    if np.linalg.norm(pt[low]) <= 1e-12 * max(1.0, np.linalg.norm(p)):
        # possible hard case
        d0 = np.zeros(k)
        d0[~low] = -pt[~low] / (lam[~low] - lmin)
        r2 = 1.0 - float(d0 @ d0)
        if r2 >= 0.0:
            for j in np.flatnonzero(low)[:1]:
                for s in (1.0, -1.0):
                    d = d0.copy()
                    d[j] += s * math.sqrt(r2)
                    out.append(W @ d)
            return out

    def phi(mu):
        return float(np.sum(pt ** 2 / (lam - mu) ** 2)) - 1.0

    lo = lmin - np.linalg.norm(p) - 1.0
    hi = lmin - 1e-14 * max(1.0, abs(lmin))
    while phi(hi) < 0:
        hi = lmin - (lmin - hi) * 1e-3
        if lmin - hi < 1e-300:
            break
    mu = brentq(phi, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    d = -pt / (lam - mu)
    d /= np.linalg.norm(d)
    out.append(W @ d)
    return out


def _min_quadratic_sampled(P, C: Cone, samples: int, seed: int):
    rng = np.random.default_rng(seed)
    U = C.sample(rng, samples)
    U /= np.linalg.norm(U, axis=1, keepdims=True)
    vals = np.einsum("ij,jk,ik->i", U, P, U)
    order = np.argsort(vals)[:20]
    best, best_u = np.inf, None
    for i in order:
        u = U[i]
        for _ in range(50):
            z = C.project(u - 0.5 * (P @ u))
            nz = np.linalg.norm(z)
            if nz < 1e-14:
                break
            u = z / nz
        v = float(u @ P @ u)
        if v < best:
            best, best_u = v, u
    return float(np.sqrt(max(best, 0.0))), best_u


# ---------------------------------------------------------------------------
# nu


def _nu_alignment(u, y, x, np_: NormPair) -> float:
    ux = float(u @ x)
    return float(max(
        abs(norm_eval(np_.tri.dual(), u) - 1.0),
        abs(norm_eval(np_.primal, x) - 1.0),
        abs(float((u - y) @ x) - ux),
        abs(norm_eval(np_.primal.dual(), u - y) - ux),
    ))


def _nu_certificate(L: Subspace, u, np_: NormPair, path: str, info=None) -> MeasureCertificate:
    C = L.complement()
    if C is None:
        y, x = np.zeros_like(u), dual_maximizer(np_.primal, u)
    else:
        mn = min_norm_to_subspace(C, u, np_.primal.dual())
        y, x = mn.minimizer, mn.dual
    val = norm_eval(np_.primal.dual(), u - y)
    cert = MeasureCertificate("nu", float(val), path, {"u": u, "y": y, "x": x},
                              _nu_alignment(u, y, x, np_), info=dict(info or {}))
    cert.info["feasible_side"] = bool(val > POSITIVITY_TOL)
    return cert


def _dist_to_perp(C, u, pd: NormSpec) -> float:
    return norm_eval(pd, u) if C is None else min_norm_to_subspace(C, u, pd).value


def _tri_is_induced_e(tri: NormSpec, K: Cone) -> bool:
    c = tri.canonical()
    if tri.kind == INDUCED_E and isinstance(tri.cone, JordanCone):
        return True
    return K.is_orthant() and c.kind == LINF


def nu(L: Subspace, K: Cone, np_: NormPair, samples: int = None, seed: int = 0) -> MeasureCertificate:
    """``min ||u - y||_*`` over ``u in K*`` with ``|||u|||_* = 1`` and ``y in L^perp``."""
    n = L.ambient_dim
    if K.dim != n:
        raise ValueError("cone and subspace dimensions differ")
    C = L.complement()
    Cb = C.basis if C is not None else np.zeros((n, 0))
    if np_.euclidean:
        val, u, path = min_projection_on_cone(L, K, dual=True, seed=seed)
        y = Cb @ (Cb.T @ u)
        px = u - y
        nx = np.linalg.norm(px)
        x = px / nx if nx > 1e-15 else L.basis[:, 0]
        cert = MeasureCertificate("nu", float(nx), path, {"u": u, "y": y, "x": x},
                                  _nu_alignment(u, y, x, np_) if nx > 1e-15 else 0.0)
        cert.info["feasible_side"] = bool(nx > POSITIVITY_TOL)
        if path == SAMPLED:
            cert.bracket = sampled_bracket(cert.value, minimize=True)
        return cert
    pd = np_.primal.dual()

    def solve_piece(setup):
        prog = Program()
        prog.var("u", n)
        terms = {"u": np.eye(n)}
        if C is not None:
            prog.var("w", C.dim)
            terms["w"] = -Cb
        prog.in_cone("u", K, dual=True)
        setup(prog)
        status, _, z = minimize_norm(terms, np.zeros(n), pd, prog)
        if status != "Optimal":
            return None
        return z["u"], prog.is_lp()

    if _tri_is_induced_e(np_.tri, K):
        e = K.identity()
        res = solve_piece(lambda prog: prog.eq({"u": e}, 1.0))
        u, is_lp = res
        return _nu_certificate(L, u, np_, LP_EXACT if is_lp else CONIC_EXACT)
    if K.is_orthant() and np_.tri.canonical().kind == L1:
        best = None
        for i in range(n):
            def setup(prog, i=i):
                prog.upper["u"] = np.ones(n)
                prog.lower["u"] = np.zeros(n)
                prog.lower["u"][i] = 1.0
            res = solve_piece(setup)
            if res is None:
                continue
            u, is_lp = res
            val = _dist_to_perp(C, u, pd)
            if best is None or val < best[0] - 1e-13:
                best = (val, u, is_lp)
        return _nu_certificate(L, best[1], np_, LP_EXACT if best[2] else CONIC_EXACT)
    # sampled over the dual cone
    rng = np.random.default_rng(seed)
    budget = samples or (10_000 if pd.canonical().kind == L2 else CONIC_SAMPLE_BUDGET)
    U = K.sample_dual(rng, budget)
    U /= np.array([norm_eval(np_.tri.dual(), u) for u in U])[:, None]
    if pd.canonical().kind == L2:
        vals = np.linalg.norm(U @ L.projector, axis=1)
    else:
        vals = np.array([_dist_to_perp(C, u, pd) for u in U])
    k = int(np.argmin(vals))
    cert = _nu_certificate(L, U[k], np_, SAMPLED)
    cert.bracket = sampled_bracket(cert.value, minimize=True)
    return cert


# ---------------------------------------------------------------------------
# nu_bar


def nu_bar(L: Subspace, K: Cone, np_: NormPair, samples: int = None, seed: int = 0) -> MeasureCertificate:
    """``min |||v - x|||`` over ``v in K`` and ``x in L`` with ``||x|| = 1``."""
    n = L.ambient_dim
    B = L.basis
    upper = min_ratio(L, np_)
    if np_.euclidean:
        C = L.complement()
        val, v_unit, path = min_projection_on_cone(C, K, dual=False, seed=seed)
        px = L.project(v_unit)
        cos = float(np.linalg.norm(px))
        if cos > 1e-12:
            x, v = px / cos, cos * v_unit
        else:
            x, v = B[:, 0], np.zeros(n)
        cert = MeasureCertificate("nu_bar", float(norm_eval(np_.tri, v - x)), path, {"x": x, "v": v})
        cert.info["infeasible_side"] = bool(cert.value > POSITIVITY_TOL)
        if path == SAMPLED:
            cert.bracket = sampled_bracket(cert.value, minimize=True)
        return cert
    if np_.primal.is_polyhedral:
        A = dual_ball_vertices(np_.primal, n)
        seen = []
        best = None
        is_lp = True
        for a in A:
            g = B.T @ a
            if np.abs(g).max() <= 1e-12 or any(np.abs(g - h).max() <= 1e-12 for h in seen):
                continue
            seen.append(g)
            prog = Program()
            prog.var("v", n)
            prog.var("c", B.shape[1])
            prog.in_cone("v", K)
            prog.le({"c": -g}, -1.0)
            status, _, z = minimize_norm({"v": np.eye(n), "c": -B}, np.zeros(n), np_.tri, prog)
            is_lp = is_lp and prog.is_lp()
            if status != "Optimal":
                continue
            x = B @ z["c"]
            s = norm_eval(np_.primal, x)
            x, v = x / s, z["v"] / s
            val = norm_eval(np_.tri, v - x)
            if best is None or val < best[0] - 1e-13:
                best = (val, x, v)
        val, x, v = best
        path = LP_EXACT if is_lp else CONIC_EXACT
    elif B.shape[1] == 1:
        # the unit sphere of a line is two points
        best = None
        for x in (B[:, 0], -B[:, 0]):
            x = x / norm_eval(np_.primal, x)
            v = _nearest_in_cone(x, K, np_.tri)
            val = norm_eval(np_.tri, v - x)
            if best is None or val < best[0]:
                best = (val, x, v)
        val, x, v = best
        path = LP_EXACT if cone_is_polyhedral(K) and np_.tri.is_polyhedral else CONIC_EXACT
    else:
        rng = np.random.default_rng(seed)
        budget = samples or CONIC_SAMPLE_BUDGET
        X = rng.standard_normal((budget, B.shape[1])) @ B.T
        X /= np.array([norm_eval(np_.primal, x) for x in X])[:, None]
        best = None
        for x in X:
            v = _nearest_in_cone(x, K, np_.tri)
            val = norm_eval(np_.tri, v - x)
            if best is None or val < best[0]:
                best = (val, x, v)
        val, x, v = best
        path = SAMPLED
    cert = MeasureCertificate("nu_bar", float(val), path, {"x": x, "v": v},
                              abs(norm_eval(np_.primal, x) - 1.0), info={"upper_bound": upper.value})
    cert.info["infeasible_side"] = bool(val > POSITIVITY_TOL)
    if path == SAMPLED:
        cert.bracket = sampled_bracket(cert.value, minimize=True)
    return cert


def _nearest_in_cone(x, K: Cone, tri: NormSpec):
    if tri.canonical().kind == L2:
        return K.project(x)
    prog = Program()
    prog.var("v", K.dim)
    prog.in_cone("v", K)
    status, _, z = minimize_norm({"v": np.eye(K.dim)}, -x, tri, prog)
    return z["v"]
