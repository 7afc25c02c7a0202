"""Small dense linear programs and vertex enumeration.

Problems here are tiny (tens to a few hundred columns), so everything is
dense.  The solver core is HiGHS through :func:`scipy.optimize.linprog`;
this module adds the certificate bookkeeping the rest of the package relies
on (dual multipliers on every constraint, Farkas rays for infeasible
systems) and a basis-enumeration vertex lister for low-dimensional
polytopes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from .errors import DimensionTooLarge, NumericalFailure, UnboundedPolytope

OPTIMAL = "Optimal"
INFEASIBLE = "Infeasible"
UNBOUNDED = "Unbounded"

MAX_VERTEX_DIM = 10


@dataclass
class LpProblem:
    """``min/max c.x`` s.t. ``A_eq x = b_eq``, ``A_ub x <= b_ub``, ``lower <= x <= upper``.

    Bounds default to ``x >= 0``; use ``-inf``/``inf`` for free variables.
    """

    c: np.ndarray
    A_eq: Optional[np.ndarray] = None
    b_eq: Optional[np.ndarray] = None
    A_ub: Optional[np.ndarray] = None
    b_ub: Optional[np.ndarray] = None
    lower: Optional[np.ndarray] = None
    upper: Optional[np.ndarray] = None
    sense: str = "min"

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).ravel()
        n = self.c.size
        self.A_eq, self.b_eq = _rows(self.A_eq, self.b_eq, n, "A_eq")
        self.A_ub, self.b_ub = _rows(self.A_ub, self.b_ub, n, "A_ub")
        self.lower = np.zeros(n) if self.lower is None else np.broadcast_to(
            np.asarray(self.lower, dtype=float), (n,)).copy()
        self.upper = np.full(n, np.inf) if self.upper is None else np.broadcast_to(
            np.asarray(self.upper, dtype=float), (n,)).copy()
        if self.sense not in ("min", "max"):
            raise ValueError(f"sense must be 'min' or 'max', got {self.sense!r}")
        for name in ("c", "A_eq", "b_eq", "A_ub", "b_ub"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"{name} contains non-finite entries")

    @property
    def num_vars(self) -> int:
        return self.c.size


def _rows(A, b, n, name):
    if A is None:
        return np.zeros((0, n)), np.zeros(0)
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).ravel()
    if A.shape[1] != n or A.shape[0] != b.size:
        raise ValueError(f"{name} has shape {A.shape}, rhs {b.size}, expected (*, {n})")
    return A, b


@dataclass
class LpSolution:
    """Solver output with multipliers in the sign convention of the user's sense.

    On ``Optimal``: ``y_eq``/``y_ub`` are the sensitivities of the optimal
    value to ``b_eq``/``b_ub`` and ``z`` the reduced costs ``c - A^T y``.  On
    ``Infeasible``: ``farkas`` holds multipliers ``(y_eq, y_ub, z_lo, z_hi)``
    proving the system has no solution (see :func:`farkas_certificate`).
    """

    status: str
    x: Optional[np.ndarray] = None
    value: Optional[float] = None
    y_eq: Optional[np.ndarray] = None
    y_ub: Optional[np.ndarray] = None
    z: Optional[np.ndarray] = None
    farkas: Optional[dict] = field(default=None, repr=False)

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def solve_lp(p: LpProblem) -> LpSolution:
    sign = 1.0 if p.sense == "min" else -1.0
    bounds = list(zip(_none_if_inf(p.lower), _none_if_inf(p.upper)))
    kwargs = dict(
        A_eq=p.A_eq if p.A_eq.shape[0] else None,
        b_eq=p.b_eq if p.A_eq.shape[0] else None,
        A_ub=p.A_ub if p.A_ub.shape[0] else None,
        b_ub=p.b_ub if p.A_ub.shape[0] else None,
        bounds=bounds,
    )
    res = None
    for method in ("highs-ds", "highs-ipm", "highs"):
        res = linprog(sign * p.c, method=method, **kwargs)
        if res.status in (0, 2, 3):
            break
    if res is None or res.status not in (0, 2, 3):
        raise NumericalFailure(f"LP solver failed: {getattr(res, 'message', '')}")
    if res.status == 2:
        return LpSolution(INFEASIBLE, farkas=farkas_certificate(p))
    if res.status == 3:
        return LpSolution(UNBOUNDED)
    x = np.asarray(res.x, dtype=float)
    y_eq = sign * np.asarray(res.eqlin.marginals) if p.A_eq.shape[0] else np.zeros(0)
    y_ub = sign * np.asarray(res.ineqlin.marginals) if p.A_ub.shape[0] else np.zeros(0)
    z = p.c - p.A_eq.T @ y_eq - p.A_ub.T @ y_ub
    return LpSolution(OPTIMAL, x=x, value=float(p.c @ x), y_eq=y_eq, y_ub=y_ub, z=z)


def _none_if_inf(v):
    return [None if not np.isfinite(t) else float(t) for t in v]


def farkas_certificate(p: LpProblem) -> Optional[dict]:
    """Multipliers proving ``{A_eq x = b_eq, A_ub x <= b_ub, lower <= x <= upper}`` empty.

    Returns ``y_eq`` (free), ``y_ub >= 0``, ``z_lo >= 0``, ``z_hi >= 0`` with
    ``A_eq^T y_eq + A_ub^T y_ub - z_lo + z_hi = 0`` and
    ``b_eq.y_eq + b_ub.y_ub - lower.z_lo + upper.z_hi < 0`` (infinite bounds
    carry zero multipliers), or ``None`` when no such ray exists.
    """
    n = p.num_vars
    me, mu = p.A_eq.shape[0], p.A_ub.shape[0]
    lo_idx = np.flatnonzero(np.isfinite(p.lower))
    hi_idx = np.flatnonzero(np.isfinite(p.upper))
    nl, nh = lo_idx.size, hi_idx.size
    # variable blocks: y_eq | y_ub | z_lo | z_hi, each boxed to keep the LP bounded
    E_lo = np.zeros((n, nl))
    E_lo[lo_idx, np.arange(nl)] = 1.0
    E_hi = np.zeros((n, nh))
    E_hi[hi_idx, np.arange(nh)] = 1.0
    A = np.hstack([p.A_eq.T, p.A_ub.T, -E_lo, E_hi])
    c = np.concatenate([p.b_eq, p.b_ub, -p.lower[lo_idx], p.upper[hi_idx]])
    lower = np.concatenate([-np.ones(me), np.zeros(mu + nl + nh)])
    upper = np.ones(me + mu + nl + nh)
    res = linprog(c, A_eq=A, b_eq=np.zeros(n), bounds=list(zip(lower, upper)), method="highs")
    if res.status != 0 or res.fun > -1e-9:
        return None
    w = res.x
    return {
        "y_eq": w[:me],
        "y_ub": w[me:me + mu],
        "z_lo": _scatter(w[me + mu:me + mu + nl], lo_idx, n),
        "z_hi": _scatter(w[me + mu + nl:], hi_idx, n),
        "gap": float(res.fun),
    }


def _scatter(vals, idx, n):
    out = np.zeros(n)
    out[idx] = vals
    return out


def enumerate_vertices(G, h, tol: float = 1e-9, merge_tol: float = 1e-8) -> np.ndarray:
    """All vertices of the bounded polytope ``{x : G x <= h}`` (rows of the result).

    Plain basis enumeration: every ``d``-subset of constraints with a
    nonsingular system is solved and kept if feasible.  Exact but
    exponential, so limited to ``d <= 10``.
    """
    G = np.atleast_2d(np.asarray(G, dtype=float))
    h = np.asarray(h, dtype=float).ravel()
    d = G.shape[1]
    if d > MAX_VERTEX_DIM:
        raise DimensionTooLarge(f"vertex enumeration limited to dimension {MAX_VERTEX_DIM}, got {d}")
    _check_bounded(G, h)
    verts = []
    scale = 1.0 + np.abs(h)
    for rows in itertools.combinations(range(G.shape[0]), d):
        M = G[list(rows)]
        if abs(np.linalg.det(M)) < 1e-12 * max(1.0, np.abs(M).max() ** d):
            continue
        x = np.linalg.solve(M, h[list(rows)])
        if np.all(G @ x - h <= tol * scale):
            if not any(np.max(np.abs(x - v)) <= merge_tol for v in verts):
                verts.append(x)
    if not verts:
        return np.zeros((0, d))
    return np.array(verts)


def _check_bounded(G, h):
    d = G.shape[1]
    for i in range(d):
        for s in (1.0, -1.0):
            c = np.zeros(d)
            c[i] = s
            sol = solve_lp(LpProblem(c, A_ub=G, b_ub=h, lower=-np.inf, upper=np.inf, sense="max"))
            if sol.status == UNBOUNDED:
                raise UnboundedPolytope(f"polytope unbounded along coordinate {i}")
