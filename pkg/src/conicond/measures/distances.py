"""The two Grassmann distances ``dist`` and ``odist`` and their norm-ratio bounds.

``dist(L1, L2) = max_{x in L1, x != 0} min_{v in L2} |||x - v||| / ||x||``
``odist(L1, L2) = max_{x in L1, x != 0} inf_{v in L2, v != 0} |||x - v||| / ||v||``
"""

from __future__ import annotations

import numpy as np

from .._program import Program, minimize_norm
from ..linalg import Subspace, min_norm_to_subspace, orth_complement
from ..norms import L2 as L2_KIND, NormSpec, ball_vertices, dual_ball_vertices, norm_eval
from ._common import (
    CLOSED_FORM, CONIC_EXACT, LP_EXACT, SAMPLED, MeasureCertificate, NormPair, check_same_space,
    sampled_bracket, unit_sphere_samples,
)

CONIC_SAMPLE_BUDGET = 200


def _is_l2(spec: NormSpec) -> bool:
    return spec.canonical().kind == L2_KIND


def _halve_symmetric(V: np.ndarray) -> np.ndarray:
    """Keep one point out of each antipodal pair."""
    keep = []
    for v in V:
        if not any(np.abs(v + w).max() <= 1e-9 for w in keep):
            keep.append(v)
    return np.array(keep)


# ---------------------------------------------------------------------------
# norm ratios


def max_ratio(L: Subspace, np_: NormPair, samples: int = 2000, seed: int = 0) -> MeasureCertificate:
    """``max_{x in L, x != 0} |||x||| / ||x||`` (upper bound for ``dist``)."""
    p, t = np_.primal, np_.tri
    if _is_l2(p) and _is_l2(t):
        return MeasureCertificate("max_ratio", 1.0, CLOSED_FORM)
    if p.is_polyhedral:
        V = ball_vertices(p, L)
        vals = np.array([norm_eval(t, v) for v in V])
        k = int(np.argmax(vals))
        return MeasureCertificate("max_ratio", float(vals[k]), LP_EXACT, {"x": V[k]})
    if _is_l2(p) and t.is_polyhedral:
        A = dual_ball_vertices(t, L.ambient_dim)
        proj = A @ L.projector
        vals = np.linalg.norm(proj, axis=1)
        k = int(np.argmax(vals))
        return MeasureCertificate("max_ratio", float(vals[k]), LP_EXACT, {"x": proj[k] / vals[k]})
    X = unit_sphere_samples(L, samples, np.random.default_rng(seed), p)
    vals = np.array([norm_eval(t, x) for x in X])
    k = int(np.argmax(vals))
    best = float(vals[k])
    return MeasureCertificate("max_ratio", best, SAMPLED, {"x": X[k]}, bracket=sampled_bracket(best, False))


def min_ratio(L: Subspace, np_: NormPair, samples: int = 2000, seed: int = 0) -> MeasureCertificate:
    """``min_{x in L, x != 0} |||x||| / ||x||`` (upper bound for ``odist``)."""
    p, t = np_.primal, np_.tri
    if _is_l2(p) and _is_l2(t):
        x = L.basis[:, 0]
        return MeasureCertificate("min_ratio", 1.0, CLOSED_FORM, {"x": x})
    if t.is_polyhedral:
        V = ball_vertices(t, L)
        vals = np.array([norm_eval(p, v) for v in V])
        k = int(np.argmax(vals))
        return MeasureCertificate("min_ratio", float(1.0 / vals[k]), LP_EXACT, {"x": V[k] / vals[k]})
    if _is_l2(t) and p.is_polyhedral:
        A = dual_ball_vertices(p, L.ambient_dim)
        proj = A @ L.projector
        vals = np.linalg.norm(proj, axis=1)
        k = int(np.argmax(vals))
        x = proj[k] / vals[k]
        return MeasureCertificate("min_ratio", float(1.0 / vals[k]), LP_EXACT, {"x": x / norm_eval(p, x)})
    X = unit_sphere_samples(L, samples, np.random.default_rng(seed), p)
    vals = np.array([norm_eval(t, x) for x in X])
    k = int(np.argmin(vals))
    best = float(vals[k])
    return MeasureCertificate("min_ratio", best, SAMPLED, {"x": X[k]}, bracket=sampled_bracket(best, True))


# ---------------------------------------------------------------------------
# dist


def dist_alignment(x, v, u, y, np_: NormPair) -> float:
    """Residual of the optimality conditions for ``dist`` witnesses."""
    ux = float(u @ x)
    res = [
        abs(norm_eval(np_.primal, x) - 1.0),
        abs(norm_eval(np_.tri.dual(), u) - 1.0),
        abs(float(u @ (x - v)) - ux),
        abs(norm_eval(np_.tri, x - v) - ux),
        abs(float(x @ (u - y)) - ux),
        abs(norm_eval(np_.primal.dual(), u - y) - ux),
    ]
    return float(max(res))


def _dist_witness(L1, L2, x, np_, path, info=None):
    inner = min_norm_to_subspace(L2, x, np_.tri)
    u = inner.dual
    y = min_norm_to_subspace(L1.complement(), u, np_.primal.dual()).minimizer if L1.complement() else np.zeros_like(u)
    res = dist_alignment(x, inner.minimizer, u, y, np_)
    return MeasureCertificate("dist", inner.value, path, {"x": x, "v": inner.minimizer, "u": u, "y": y}, res,
                              info=info or {})


def dist(L1: Subspace, L2: Subspace, np_: NormPair, samples: int = None, seed: int = 0) -> MeasureCertificate:
    check_same_space(L1, L2)
    p, t = np_.primal, np_.tri
    if _is_l2(p) and _is_l2(t):
        M = L2.complement().projector @ L1.basis if L2.complement() else np.zeros_like(L1.basis)
        U, s, Vt = np.linalg.svd(M, full_matrices=False)
        x = L1.basis @ Vt[0]
        r = M @ Vt[0]
        val = float(s[0])
        u = r / val if val > 1e-15 else (L2.complement().basis[:, 0] if L2.complement() else np.zeros_like(x))
        y = u - L1.project(u)
        cert = MeasureCertificate("dist", val, CLOSED_FORM, {"x": x, "v": L2.project(x), "u": u, "y": y},
                                  dist_alignment(x, L2.project(x), u, y, np_) if val > 1e-15 else 0.0)
        return cert
    if p.is_polyhedral:
        V = _halve_symmetric(ball_vertices(p, L1))
        best_val, best_x = -1.0, None
        for x in V:
            val = min_norm_to_subspace(L2, x, t).value
            if val > best_val + 1e-13:
                best_val, best_x = val, x
        path = LP_EXACT if (t.is_polyhedral or _is_l2(t)) else CONIC_EXACT
        return _dist_witness(L1, L2, best_x, np_, path)
    if _is_l2(p) and t.is_polyhedral:
        C2 = orth_complement(L2) if L2.complement() is not None else None
        Q = ball_vertices(t.dual(), C2)
        proj = Q @ L1.projector
        vals = np.linalg.norm(proj, axis=1)
        k = int(np.argmax(vals))
        x = proj[k] / vals[k] if vals[k] > 0 else L1.basis[:, 0]
        return _dist_witness(L1, L2, x, np_, LP_EXACT)
    # curved primal ball: sample its section
    budget = samples or (10_000 if _is_l2(t) else CONIC_SAMPLE_BUDGET)
    X = unit_sphere_samples(L1, budget, np.random.default_rng(seed), p)
    if _is_l2(t):
        P = L2.complement().projector if L2.complement() else np.zeros((L1.ambient_dim,) * 2)
        vals = np.linalg.norm(X @ P, axis=1)
    else:
        vals = np.array([min_norm_to_subspace(L2, x, t).value for x in X])
    k = int(np.argmax(vals))
    cert = _dist_witness(L1, L2, X[k], np_, SAMPLED)
    cert.bracket = sampled_bracket(cert.value, minimize=False)
    return cert


# ---------------------------------------------------------------------------
# odist


def odist_inner(x, L2: Subspace, np_: NormPair, a_set=None):
    """``inf_{v in L2, v != 0} |||x - v||| / ||v||`` for one ``x``.

    Uses ``inf = min_{s >= 0, d in L2, ||d|| >= 1} |||s x - d|||`` and writes
    ``||d|| >= 1`` as a union over dual-ball vertices ``a`` of ``<a, d> >= 1``.
    Returns ``(value, s, d)``; ``s == 0`` means the infimum is only approached.
    """
    x = np.asarray(x, dtype=float)
    B = L2.basis
    A = dual_ball_vertices(np_.primal, L2.ambient_dim) if a_set is None else a_set
    best = (np.inf, None, None)
    for a in A:
        g = B.T @ a
        if np.abs(g).max() <= 1e-12:
            continue
        prog = Program()
        prog.var("s", 1, lower=0.0)
        prog.var("c", B.shape[1])
        prog.le({"c": -g}, -1.0)
        status, val, z = minimize_norm({"s": x.reshape(-1, 1), "c": -B}, np.zeros_like(x), np_.tri, prog)
        if status != "Optimal":
            continue
        val = norm_eval(np_.tri, z["s"][0] * x - B @ z["c"])
        if val < best[0] - 1e-13:
            best = (val, float(z["s"][0]), B @ z["c"])
    return best


def odist(L1: Subspace, L2: Subspace, np_: NormPair, samples: int = 64, seed: int = 0) -> MeasureCertificate:
    check_same_space(L1, L2)
    p, t = np_.primal, np_.tri
    if _is_l2(p) and _is_l2(t):
        c = dist(L1, L2, np_)
        c.name = "odist"
        return c
    upper = min_ratio(L2, np_)
    if p.is_polyhedral:
        A = dual_ball_vertices(p, L2.ambient_dim)
        if L1.dim == 1:
            cands = L1.basis.T
            path = LP_EXACT if t.is_polyhedral or _is_l2(t) else CONIC_EXACT
        else:
            rng = np.random.default_rng(seed)
            cands = np.vstack([_halve_symmetric(ball_vertices(p, L1)), (rng.standard_normal((samples, L1.dim)) @ L1.basis.T)])
            path = SAMPLED
        best = (-1.0, None, None, None)
        for x in cands:
            val, s, d = odist_inner(x, L2, np_, A)
            if val > best[0] + 1e-13:
                best = (val, x, s, d)
        val, x, s, d = best
    else:
        # l2 primal with a non-Euclidean tri-norm: linearize ||d||_2 >= 1 with sampled unit a in L2
        rng = np.random.default_rng(seed)
        A = unit_sphere_samples(L2, max(samples, 16), rng, NormSpec(L2_KIND))
        A = np.vstack([A, -A])
        cands = L1.basis.T if L1.dim == 1 else rng.standard_normal((samples, L1.dim)) @ L1.basis.T
        best = (-1.0, None, None, None)
        for x in cands:
            v_, s_, d_ = odist_inner(x, L2, np_, A)
            if v_ > best[0]:
                best = (v_, x, s_, d_)
        val, x, s, d = best
        path = SAMPLED
    attained = s is not None and s > 1e-9
    wit = {"x": x / norm_eval(p, x)}
    if attained:
        wit["v"] = d / s / norm_eval(p, x)
    cert = MeasureCertificate("odist", float(val), path, wit,
                              info={"attained": bool(attained), "upper_bound": upper.value})
    if path == SAMPLED:
        lo, hi = sampled_bracket(cert.value, minimize=False)
        cert.bracket = (lo, min(hi, upper.value) if upper.exact else hi)
    return cert
