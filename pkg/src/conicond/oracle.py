"""Brute-force estimators used to check the measures independently.

Nothing here reuses the optimisation routes of :mod:`conicond.measures` for
the quantity being checked: distances to sampled ill-posed subspaces are
evaluated by vertex/vertex or one-dimensional formulas, and Renegar's
distance is bracketed by bisection on explicit perturbations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.optimize import minimize_scalar

from ._program import Program
from .cones import Cone, JordanCone, Polyhedral2D, Product, Psd, SecondOrder, smat
from .errors import ConicondError, IllPosedInstance, SamplingExhausted
from .linalg import Subspace
from .measures import (
    NormPair, critical_subspace_feasible, critical_subspace_infeasible, dist, nu, nu_bar, odist, sigma,
)
from .measures._common import EXACT_PATHS, POSITIVITY_TOL
from .norms import L2, ball_vertices, dual_ball_vertices, norm_eval
from .renegar import LinearMap, constructive_perturbation, feasibility_side, perturbation_size

MAX_REJECTIONS = 100_000
SUBSPACE_BUDGET = 2000
DIRECTION_BUDGET = 200
BISECTION_STEPS = 40
STATUS_TOL = 1e-9
ANGLE_GRID = 720


# ---------------------------------------------------------------------------
# sampling Sigma_m


def complementary_pair(K: Cone, rng, near: Optional[np.ndarray] = None):
    """Nonzero ``u in K*`` and ``v in K`` with ``<u, v> = 0``.

    For Jordan cones both are built on one frame with disjoint supports; the
    frame comes from ``near`` when given.
    """
    if isinstance(K, Polyhedral2D):
        k = int(rng.integers(2))
        return K.facet_normals()[k], K.generators()[1 - k]
    if not isinstance(K, JordanCone):
        raise TypeError(f"no complementary pairs for {K!r}")
    x = rng.standard_normal(K.dim) if near is None else near + 1e-3 * rng.standard_normal(K.dim)
    F = K.spectral(x).frame
    r = F.shape[0]
    perm = rng.permutation(r)
    k = int(rng.integers(1, r))
    a = rng.uniform(0.1, 1.0, k)
    b = rng.uniform(0.1, 1.0, r - k)
    return a @ F[perm[:k]], b @ F[perm[k:]]


def is_illposed(S: Subspace, K: Cone, u, v, tol: float = 1e-9) -> bool:
    """Membership in Sigma_m through the witnesses ``v in S cap K`` and ``u in S^perp cap K*``."""
    u = np.asarray(u, float) / np.linalg.norm(u)
    v = np.asarray(v, float) / np.linalg.norm(v)
    return (np.linalg.norm(S.project(u)) <= tol and np.linalg.norm(v - S.project(v)) <= tol
            and K.contains(v, tol) and K.dual_contains(u, tol))


def _pairs(K: Cone, rng, count: int, near: list):
    """``count`` complementary pairs as two ``(count, n)`` arrays; non-None ``near[i]`` seeds frame ``i``."""
    if K.is_orthant():
        n = K.dim
        # a random nonempty proper subset carries u, the rest carries v
        k = rng.integers(1, n, count)
        order = np.argsort(rng.random((count, n)), axis=1)
        in_u = np.zeros((count, n), bool)
        np.put_along_axis(in_u, order, np.arange(n)[None, :] < k[:, None], axis=1)
        w = rng.uniform(0.1, 1.0, (count, n))
        return np.where(in_u, w, 0.0), np.where(in_u, 0.0, w)
    U, V = [], []
    for i in range(count):
        u, v = complementary_pair(K, rng, near[i])
        U.append(u)
        V.append(v)
    return np.array(U), np.array(V)


def _illposed_batch(K: Cone, n: int, m: int, count: int, rng, near: Optional[Subspace]):
    """Orthonormal bases ``(k, n, m)`` of checked members of Sigma_m, ``k <= count``."""
    biased = np.zeros(count, bool)
    if near is not None:
        biased[1::2] = True
    Z = None
    if near is not None:
        Z = rng.standard_normal((count, near.dim)) @ near.basis.T
    U, V = _pairs(K, rng, count, [Z[i] if biased[i] else None for i in range(count)])
    G = rng.standard_normal((count, n, m - 1))
    if near is not None:
        Gn = np.einsum("nd,kdj->knj", near.basis, rng.standard_normal((count, near.dim, m - 1)))
        Gn += 1e-2 * rng.standard_normal(Gn.shape)
        G[biased] = Gn[biased]
    # the other m - 1 directions live in u^perp
    G -= U[:, :, None] * (np.einsum("kn,knj->kj", U, G) / np.einsum("kn,kn->k", U, U)[:, None])[:, None, :]
    Q, R = np.linalg.qr(np.concatenate([V[:, :, None], G], axis=2))
    d = np.abs(np.diagonal(R, axis1=1, axis2=2))
    ok = d.min(axis=1) > 1e-10 * np.maximum(1.0, d.max(axis=1))
    Un = U / np.linalg.norm(U, axis=1, keepdims=True)
    Vn = V / np.linalg.norm(V, axis=1, keepdims=True)
    ok &= np.linalg.norm(np.einsum("knj,kn->kj", Q, Un), axis=1) <= 1e-9
    ok &= np.linalg.norm(Vn - np.einsum("knj,kj->kn", Q, np.einsum("knj,kn->kj", Q, Vn)), axis=1) <= 1e-9
    if K.is_orthant():
        ok &= (U.min(axis=1) >= 0) & (V.min(axis=1) >= 0)
    else:
        ok &= np.array([K.contains(v, 1e-9) and K.dual_contains(u, 1e-9) for u, v in zip(Un, Vn)], bool)
    return Q[ok]


def sample_illposed_bases(K: Cone, n: int, m: int, count: int, seed: int = 0,
                          near: Optional[Subspace] = None) -> np.ndarray:
    """Like :func:`sample_illposed` but returns the orthonormal bases as one array."""
    if not 0 < m < n:
        raise ValueError("need 0 < m < n")
    if K.dim != n:
        raise ValueError(f"cone lives in R^{K.dim}, not R^{n}")
    rng = np.random.default_rng(seed)
    got, total, rejected = [], 0, 0
    while total < count:
        want = count - total
        Q = _illposed_batch(K, n, m, want, rng, near)
        got.append(Q)
        total += Q.shape[0]
        rejected += want - Q.shape[0]
        if rejected >= MAX_REJECTIONS:
            raise SamplingExhausted(f"{rejected} rejections after {total} samples")
    return np.concatenate(got)[:count] if got else np.zeros((0, n, m))


def sample_illposed(K: Cone, n: int, m: int, count: int, seed: int = 0,
                    near: Optional[Subspace] = None) -> List[Subspace]:
    """``count`` random members of Sigma_m, each checked through its witnesses.

    Every sample is ``span(v, W)`` with ``u in K*``, ``v in K``, ``<u, v> = 0``
    and ``W`` inside ``u^perp``.  With ``near``, every other sample draws its
    frame and ``W`` from ``near`` so it lands close to that subspace.
    """
    return [Subspace(Q) for Q in sample_illposed_bases(K, n, m, count, seed, near)]


def dist_l2_batch(L: Subspace, Q: np.ndarray) -> np.ndarray:
    """Euclidean ``dist(L, span Q_k)`` for a stack of orthonormal bases (same dimension)."""
    s = np.linalg.svd(np.einsum("nd,knj->kdj", L.basis, Q), compute_uv=False)
    return np.sqrt(np.maximum(0.0, 1.0 - s.min(axis=1) ** 2))


# ---------------------------------------------------------------------------
# distances by enumeration


def _min_on_line(x, l, spec) -> float:
    """``min_r |||r x - l|||``."""
    kind = spec.canonical().kind
    if kind == L2:
        xx = float(x @ x)
        return float(np.linalg.norm(l - x * (x @ l) / xx)) if xx > 0 else float(np.linalg.norm(l))
    A = dual_ball_vertices(spec, x.size)
    alpha, beta = A @ x, A @ l
    # the minimum of a max of lines sits where two of them cross
    da = alpha[:, None] - alpha[None, :]
    db = beta[:, None] - beta[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        r = db[np.abs(da) > 1e-14] / da[np.abs(da) > 1e-14]
    r = np.concatenate([np.unique(r), [0.0]])
    return float((np.outer(r, alpha) - beta).max(axis=1).min())


def fast_dist(L1: Subspace, L2: Subspace, np_: NormPair) -> float:
    """``dist(L1, L2)`` from a second route.

    Uses ``max_{x, u} <u, x>`` over ball vertices of ``L1`` and dual-ball
    vertices of ``L2^perp``, or a line search when both are lines.
    """
    p, t = np_.primal, np_.tri
    pk, tk = p.canonical().kind, t.canonical().kind
    C2 = L2.complement()
    if C2 is None:
        return 0.0
    if pk == L2 and tk == L2:
        return float(np.linalg.norm(C2.projector @ L1.basis, 2))
    if L1.dim == 1 and L2.dim == 1 and (tk == L2 or t.is_polyhedral):
        x = L1.basis[:, 0]
        return _min_on_line(L2.basis[:, 0], x, t) / norm_eval(p, x)
    if p.is_polyhedral and (tk == L2 or t.is_polyhedral):
        X = ball_vertices(p, L1)
        if tk == L2:
            return float(np.linalg.norm(X @ C2.projector, axis=1).max())
        U = ball_vertices(t.dual(), C2)
        return float((X @ U.T).max())
    if pk == L2 and t.is_polyhedral:
        U = ball_vertices(t.dual(), C2)
        return float(np.linalg.norm(U @ L1.projector, axis=1).max())
    return dist(L1, L2, np_).value


def fast_odist(L1: Subspace, L2: Subspace, np_: NormPair) -> float:
    """``odist(L1, L2)``; closed form for lines, ``dist`` in l2/l2."""
    p, t = np_.primal, np_.tri
    if np_.euclidean:
        return fast_dist(L1, L2, np_)
    if L1.dim == 1 and L2.dim == 1 and (t.canonical().kind == L2 or t.is_polyhedral):
        # inf over v = s l of |||x - s l||| / ||s l||, substituting r = 1/s
        l = L2.basis[:, 0]
        return _min_on_line(L1.basis[:, 0], l, t) / norm_eval(p, l)
    return odist(L1, L2, np_).value


# ---------------------------------------------------------------------------
# distance to Sigma_m


def _sampled_values(L, K, np_, budget, seed, fn):
    if not budget:
        return [], 0
    Q = sample_illposed_bases(K, L.ambient_dim, L.dim, budget, seed, near=L)
    if np_.euclidean:
        # equal dimensions: dist and odist are both the sine of the largest principal angle
        return dist_l2_batch(L, Q), len(Q)
    return [fn(Subspace(q)) for q in Q], len(Q)


@dataclass
class Bracket:
    lo: float
    hi: float
    measure: float
    exact: bool
    critical: Optional[float] = None
    sampled_min: Optional[float] = None
    samples: int = 0

    @property
    def consistent(self) -> bool:
        return self.lo <= self.hi + 1e-6

    def to_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "measure": self.measure, "exact": self.exact,
                "critical": self.critical, "sampled_min": self.sampled_min, "samples": self.samples,
                "consistent": self.consistent}


def dist_to_illposed_estimate(L: Subspace, K: Cone, np_: NormPair, budget: int = SUBSPACE_BUDGET,
                              seed: int = 0, tol: float = 1e-7) -> Bracket:
    """``[nu - tol, min dist(L, L~)]`` over sampled and constructed ill-posed ``L~``.

    ``exact`` is False when ``nu`` came from a sampled path; then ``lo`` is
    only approximate.
    """
    c = nu(L, K, np_, seed=seed)
    vals, count = _sampled_values(L, K, np_, budget, seed, lambda S: fast_dist(L, S, np_))
    crit = None
    if c.value > POSITIVITY_TOL:
        crit = fast_dist(L, critical_subspace_feasible(L, K, np_, c), np_)
    smin = float(min(vals)) if len(vals) else None
    cands = [v for v in (crit, smin) if v is not None]
    hi = min(cands) if cands else math.inf
    return Bracket(c.value - tol, hi, c.value, c.path in EXACT_PATHS, crit, smin, count)


def odist_from_illposed_estimate(L: Subspace, K: Cone, np_: NormPair, budget: int = SUBSPACE_BUDGET,
                                 seed: int = 0, tol: float = 1e-7) -> Bracket:
    """Mirror image: ``[nu_bar - tol, min odist(L~, L)]``."""
    c = nu_bar(L, K, np_, seed=seed)
    vals, count = _sampled_values(L, K, np_, budget, seed, lambda S: fast_odist(S, L, np_))
    crit = None
    if c.value > POSITIVITY_TOL:
        crit = fast_odist(critical_subspace_infeasible(L, K, np_, c), L, np_)
    smin = float(min(vals)) if len(vals) else None
    cands = [v for v in (crit, smin) if v is not None]
    hi = min(cands) if cands else math.inf
    return Bracket(c.value - tol, hi, c.value, c.path in EXACT_PATHS, crit, smin, count)


# ---------------------------------------------------------------------------
# Renegar distance by bisection


def _status_from_margin(p: float, tol: float) -> str:
    if p > tol:
        return "primal"
    if p < -tol:
        return "dual"
    return "ill"


def _margin_primal_program(M, K: Cone) -> float:
    """``max t`` with ``M w - t e in K``, ``|w|_inf <= 1``."""
    n, m = M.shape
    prog = Program()
    prog.var("w", m, lower=-1.0, upper=1.0)
    prog.var("z", n)
    prog.var("t", 1, upper=1.0)
    prog.eq({"z": np.eye(n), "w": -M, "t": K.identity().reshape(-1, 1)}, np.zeros(n))
    prog.in_cone("z", K)
    prog.maximize({"t": np.ones(1)})
    status, val, _ = prog.solve()
    return float(val) if status == "Optimal" else -math.inf


def _margin_dual_program(M, K: Cone) -> float:
    """``max t`` with ``M^T u = 0``, ``u - t e in K*``, ``<u, e> <= 1``."""
    n, m = M.shape
    e = K.identity()
    prog = Program()
    prog.var("u", n)
    prog.var("y", n)
    prog.var("t", 1, upper=1.0)
    prog.eq({"u": M.T}, np.zeros(m))
    prog.eq({"y": np.eye(n), "u": -np.eye(n), "t": e.reshape(-1, 1)}, np.zeros(n))
    prog.in_cone("y", K, dual=True)
    prog.le({"u": e.reshape(1, -1)}, 1.0)
    prog.maximize({"t": np.ones(1)})
    status, val, _ = prog.solve()
    return float(val) if status == "Optimal" else -math.inf


def _lambda_min_many(K: JordanCone, X: np.ndarray) -> np.ndarray:
    """``lambda_min`` of each row of ``X``."""
    if K.is_orthant():
        return X.min(axis=1)
    if isinstance(K, SecondOrder):
        return X[:, 0] - np.linalg.norm(X[:, 1:], axis=1)
    if isinstance(K, Psd):
        T = np.array([smat(e, K.k) for e in np.eye(K.dim)])
        return np.linalg.eigvalsh(np.einsum("rj,jab->rab", X, T))[:, 0]
    if isinstance(K, Product):
        out, start = np.full(X.shape[0], np.inf), 0
        for blk in K.blocks:
            out = np.minimum(out, _lambda_min_many(blk, X[:, start:start + blk.dim]))
            start += blk.dim
        return out
    return np.array([K.lambda_e(x) for x in X])


def _lambda_margin(M, K: JordanCone) -> float:
    """``max_{|w|_2 = 1} lambda_min(M w)`` for ``m <= 2``."""
    m = M.shape[1]
    if m == 1:
        ev = K.eigenvalues(M[:, 0])
        return float(max(ev.min(), -ev.max()))
    th = np.linspace(0.0, 2 * math.pi, ANGLE_GRID, endpoint=False)
    vals = _lambda_min_many(K, np.column_stack([np.cos(th), np.sin(th)]) @ M.T)
    k = int(np.argmax(vals))
    f = lambda s: K.lambda_e(M @ np.array([math.cos(s), math.sin(s)]))
    h = 2 * math.pi / ANGLE_GRID
    res = minimize_scalar(lambda s: -f(s), bounds=(th[k] - h, th[k] + h), method="bounded",
                          options={"xatol": 1e-12})
    return float(max(vals[k], -res.fun))


def feasibility_status(M, K: Cone, tol: float = STATUS_TOL) -> str:
    """``"primal"`` if ``Image(M)`` meets ``int K``, ``"dual"`` if its complement meets ``int K*``, else ``"ill"``."""
    M = np.atleast_2d(np.asarray(M, float))
    scale = np.linalg.norm(M, 2)
    if scale <= 1e-300:
        return "ill"
    M = M / scale
    if isinstance(K, JordanCone) and not K.is_orthant() and M.shape[1] <= 2:
        return _status_from_margin(_lambda_margin(M, K), tol)
    if _margin_primal_program(M, K) > tol:
        return "primal"
    if _margin_dual_program(M, K) > tol:
        return "dual"
    return "ill"


def _bisect(M, D, K, status0, hi, steps):
    lo = 0.0
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if feasibility_status(M + mid * D, K) == status0:
            lo = mid
        else:
            hi = mid
    return hi


def _directions(A: LinearMap, rng, count):
    n, m = A.matrix.shape
    for k in range(count):
        if k % 2 == 0:
            D = np.outer(rng.standard_normal(n), rng.standard_normal(m))
        else:
            D = rng.standard_normal((n, m))
        yield D / perturbation_size(A, D)


@dataclass
class RdistEstimate:
    value: float
    constructive: Optional[float]
    directions_tried: int
    improved_by_sampling: int = 0

    def to_dict(self) -> dict:
        return {"value": self.value, "constructive": self.constructive,
                "directions_tried": self.directions_tried, "improved_by_sampling": self.improved_by_sampling}


def rdist_estimate(A: LinearMap, K: Cone, budget: int = DIRECTION_BUDGET, seed: int = 0,
                   steps: int = BISECTION_STEPS, detail: bool = False):
    """Upper bound on ``Rdist(A)``: the smallest flipping size over the tried directions.

    Each unit direction ``D`` is bisected on ``[0, best]``, so only directions
    that beat the current best cost more than one status test.  The
    perturbation from the sandwich proof is tried first.
    """
    M = A.matrix
    status0 = feasibility_status(M, K)
    if status0 == "ill":
        raise IllPosedInstance("A already lies on the ill-posed set")
    best, cons = math.inf, None
    try:
        side, cert = feasibility_side(A.image(), K, A.norms, seed)
        Dc = constructive_perturbation(A, side, cert)
        cons = perturbation_size(A, Dc)
    except ConicondError:
        Dc = None
    if Dc is not None and cons > 0:
        D = Dc / cons
        # the constructed map sits on Sigma; bisect just above it to absorb rounding
        top = cons * (1 + 1e-6)
        if feasibility_status(M + top * D, K) != status0:
            best = _bisect(M, D, K, status0, top, steps)
    if not math.isfinite(best):
        best = 2.0 * perturbation_size(A, M)  # -A flattens the map to zero, which is ill-posed
        if feasibility_status(M - best / 2 * M / perturbation_size(A, M), K) != status0:
            best = best / 2
    rng = np.random.default_rng(seed)
    improved = 0
    for D in _directions(A, rng, budget):
        for s in (1.0, -1.0):
            if feasibility_status(M + s * best * D, K) != status0:
                t = _bisect(M, s * D, K, status0, best, steps)
                if t < best:
                    best, improved = t, improved + 1
    out = RdistEstimate(float(best), cons, budget, improved)
    return out if detail else out.value


# ---------------------------------------------------------------------------
# verification suite


@dataclass
class Check:
    name: str
    passed: bool
    residual: float
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "residual": self.residual, "detail": self.detail}


@dataclass
class SuiteReport:
    checks: List[Check] = field(default_factory=list)
    skipped: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name, residual, tol, detail=""):
        self.checks.append(Check(name, bool(residual <= tol), float(residual), detail))

    def to_dict(self) -> dict:
        return {"passed": self.passed, "checks": [c.to_dict() for c in self.checks], "skipped": self.skipped}


def _guard(report: SuiteReport, name: str, fn):
    try:
        fn()
    except ConicondError as exc:
        report.checks.append(Check(name, False, math.inf, f"{type(exc).__name__}: {exc}"))


def verify_suite(instance, seed: int = 0, budget: int = 200) -> SuiteReport:
    """Run every check that applies to ``instance`` (``L``, ``cone``, ``norms``, optional ``map``).

    Failures are recorded, never raised.
    """
    from .measures import cone_alignment_constant, sym, theta

    L, K, np_ = instance.subspace, instance.cone, instance.norms
    rep = SuiteReport()
    c_nu = nu(L, K, np_, seed=seed)
    feasible = c_nu.value > POSITIVITY_TOL
    exact = c_nu.path in EXACT_PATHS

    def feasible_checks():
        b = dist_to_illposed_estimate(L, K, np_, budget=budget, seed=seed)
        rep.add("critical subspace attains nu", max(0.0, b.critical - b.measure), 1e-7, f"{b.critical!r}")
        rep.add("sampled ill-posed subspaces stay beyond nu", max(0.0, b.measure - b.sampled_min), 1e-6)
        s = sigma(L, K, np_, seed=seed)
        rep.add("sigma >= nu", max(0.0, c_nu.value - s.value), 1e-7)
        cac = cone_alignment_constant(K, np_)
        rep.add("sigma <= nu / alignment", max(0.0, s.value * cac - c_nu.value), 1e-6)
        if np_.euclidean and K.self_dual:
            rep.add("sigma = nu (l2, self-dual)", abs(s.value - c_nu.value), 1e-7)
        if np_.tri.canonical().kind == "InducedE":
            rep.add("sigma = nu (induced tri-norm)", abs(s.value - c_nu.value), 1e-7)
        if np_.primal.canonical().kind == np_.tri.canonical().kind and np_.primal.is_polyhedral:
            y = sym(L, K, np_.primal, seed=seed).value
            if y < 1:
                rep.add("Sym/(1+Sym) <= sigma", max(0.0, y / (1 + y) - s.value), 1e-7)
                rep.add("sigma <= Sym/(1-Sym)", max(0.0, s.value - y / (1 - y)), 1e-7)
        if isinstance(K, Polyhedral2D):
            th = theta(K)
            rep.add("Theta = pi/2 - 2 phi", abs(th - max(0.0, math.pi / 2 - 2 * K.phi)), 1e-9)
            rep.add("sigma / nu = 1 / cos(Theta)", abs(s.value / c_nu.value * math.cos(th) - 1.0), 1e-6)

    def infeasible_checks():
        b = odist_from_illposed_estimate(L, K, np_, budget=budget, seed=seed)
        if b.critical is not None:
            rep.add("critical subspace attains nu_bar", max(0.0, b.critical - b.measure), 1e-7)
        rep.add("sampled ill-posed subspaces stay beyond nu_bar", max(0.0, b.measure - b.sampled_min), 1e-6)

    if feasible:
        if exact:
            _guard(rep, "feasible side", feasible_checks)
        else:
            rep.skipped.append("feasible side: nu is sampled")
    else:
        rep.skipped.append("feasible side: nu vanishes")
        nb = nu_bar(L, K, np_, seed=seed)
        if nb.value > POSITIVITY_TOL and nb.path in EXACT_PATHS:
            _guard(rep, "infeasible side", infeasible_checks)
        else:
            rep.skipped.append("infeasible side: nu_bar vanishes or is sampled")

    if K.is_orthant():
        from .partition import goldman_tucker, partition_measures

        def partition_checks():
            gt = goldman_tucker(L)
            rep.add("x_cert support is B", 0.0 if set(np.flatnonzero(gt.x_cert > 1e-9)) == set(gt.B) else 1.0, 0.0)
            rep.add("y_cert support is N", 0.0 if set(np.flatnonzero(gt.y_cert > 1e-9)) == set(gt.N) else 1.0, 0.0)
            rep.add("<x_cert, y_cert> = 0", abs(float(gt.x_cert @ gt.y_cert)), 1e-12)
            pm = partition_measures(L, np_, gt)
            for name in ("nu_B", "nu_N"):
                c = getattr(pm, name)
                if c is not None:
                    rep.add(f"{name} > 0", 0.0 if c.value > POSITIVITY_TOL else 1.0, 0.0, f"{c.value!r}")

        _guard(rep, "partition", partition_checks)

    A = getattr(instance, "map", None)
    if A is not None and A.is_injective():
        from .renegar import renegar_sandwich

        def renegar_checks():
            s = renegar_sandwich(A, K, seed=seed)
            est = rdist_estimate(A, K, budget=min(budget, DIRECTION_BUDGET), seed=seed)
            rep.add("Rdist estimate >= lower bound", max(0.0, s.lower - est), 1e-6)
            rep.add("Rdist estimate <= upper bound", max(0.0, est - s.upper), 1e-6)

        _guard(rep, "renegar", renegar_checks)
    return rep
