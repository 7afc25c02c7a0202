"""Subspaces of R^n and nearest-point problems under general norms."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import qr

from .errors import DegenerateSubspace, DimensionMismatch, NumericalFailure, UnsupportedNorm

RANK_TOL = 1e-10
EQ_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Subspace:
    """A linear subspace stored by an orthonormal basis (columns of ``basis``).

    Public constructors enforce ``0 < dim < ambient_dim``.  Internally the
    whole space is allowed (``allow_full``) because some block
    decompositions produce it.
    """

    basis: np.ndarray
    allow_full: bool = field(default=False, repr=False)

    def __post_init__(self):
        B = np.asarray(self.basis, dtype=float)
        if B.ndim != 2:
            raise ValueError("basis must be a 2-D array")
        object.__setattr__(self, "basis", B)
        n, m = B.shape
        if m == 0 or (m >= n and not self.allow_full):
            raise DegenerateSubspace(f"subspace dimension {m} not in (0, {n})")
        if np.abs(B.T @ B - np.eye(m)).max() > 1e-10:
            raise ValueError("basis columns are not orthonormal")

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.T

    def project(self, x) -> np.ndarray:
        return self.basis @ (self.basis.T @ np.asarray(x, dtype=float))

    def contains(self, x, tol: float = 1e-9) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.linalg.norm(x - self.project(x)) <= tol * max(1.0, np.linalg.norm(x)))

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        if other.ambient_dim != self.ambient_dim or other.dim != self.dim:
            return False
        return bool(np.abs(self.projector - other.projector).max() <= EQ_TOL)

    __hash__ = None

    @classmethod
    def from_columns(cls, M, allow_full: bool = False) -> "Subspace":
        """Column span of ``M`` (rank decided like :func:`orthonormal_basis`)."""
        Q = _range_basis(np.atleast_2d(np.asarray(M, dtype=float)))
        if Q is None:
            raise DegenerateSubspace("columns span the zero subspace")
        return cls(Q, allow_full=allow_full)

    def complement(self) -> Optional["Subspace"]:
        """``L^perp``, or ``None`` when ``L`` is the whole space."""
        Q = _kernel_basis(self.basis.T)
        return None if Q is None else Subspace(Q, allow_full=True)


def _range_basis(M) -> Optional[np.ndarray]:
    if M.size == 0:
        return None
    Q, R, _ = qr(M, mode="economic", pivoting=True)
    scale = np.linalg.norm(M, axis=0).max()
    if scale == 0.0:
        return None
    diag = np.abs(np.diag(R))
    r = int(np.sum(diag > RANK_TOL * scale))
    if r == 0:
        return None
    return Q[:, :r]


def _kernel_basis(M) -> Optional[np.ndarray]:
    """Orthonormal basis of ``ker M`` (columns), ``None`` if trivial."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    n = M.shape[1]
    if M.shape[0] == 0 or not np.any(M):
        return np.eye(n)
    _, s, Vt = np.linalg.svd(M)
    r = int(np.sum(s > RANK_TOL * max(1.0, s[0]) if s.size else 0))
    if r >= n:
        return None
    return Vt[r:].T


def orthonormal_basis(vectors) -> Subspace:
    """Subspace spanned by ``vectors`` (a sequence of n-vectors, or rows of an array)."""
    V = np.atleast_2d(np.asarray(vectors, dtype=float))
    return Subspace.from_columns(V.T)


def orth_complement(S: Subspace) -> Subspace:
    C = S.complement()
    if C is None:
        raise DegenerateSubspace("the whole space has a trivial complement")
    return C


def image(A) -> Optional[Subspace]:
    Q = _range_basis(np.atleast_2d(np.asarray(A, dtype=float)))
    return None if Q is None else Subspace(Q, allow_full=True)


def kernel(A) -> Optional[Subspace]:
    Q = _kernel_basis(A)
    return None if Q is None else Subspace(Q, allow_full=True)


def intersection(S1: Subspace, S2: Subspace) -> Optional[Subspace]:
    """``S1 ∩ S2``, or ``None`` if it is ``{0}``."""
    _same_ambient(S1, S2)
    Q = _kernel_basis(np.hstack([S1.basis, -S2.basis]))
    if Q is None:
        return None
    return image(S1.basis @ Q[: S1.dim])


def principal_angles(S1: Subspace, S2: Subspace) -> np.ndarray:
    """Principal angles in nonincreasing order.

    Small angles are read from sines and large ones from cosines, since
    arccos loses about half the digits near 0.
    """
    _same_ambient(S1, S2)
    if S1.dim > S2.dim:
        S1, S2 = S2, S1
    C = S1.basis.T @ S2.basis
    cos = np.sort(np.clip(np.linalg.svd(C, compute_uv=False), 0.0, 1.0))[::-1]
    sin = np.sort(np.clip(np.linalg.svd(S1.basis - S2.basis @ C.T, compute_uv=False), 0.0, 1.0))
    ang = np.where(cos >= np.sqrt(0.5), np.arcsin(sin), np.arccos(cos))
    return ang[::-1]


def projection_gap(S1: Subspace, S2: Subspace) -> float:
    """``||P1 - P2||_2``; equals the sine of the largest principal angle."""
    _same_ambient(S1, S2)
    if S1.dim != S2.dim:
        raise DimensionMismatch("projection gap needs subspaces of equal dimension")
    return float(np.linalg.norm(S1.projector - S2.projector, 2))


def _same_ambient(S1, S2):
    if S1.ambient_dim != S2.ambient_dim:
        raise DimensionMismatch(f"ambient dimensions {S1.ambient_dim} and {S2.ambient_dim} differ")


# ---------------------------------------------------------------------------
# min-norm projection


@dataclass(frozen=True)
class MinNormCertificate:
    """``value = ||p - minimizer|| = <dual, p>`` with ``dual`` in ``L^perp``, dual norm 1."""

    value: float
    minimizer: np.ndarray
    dual: np.ndarray
    dual_value: float

    @property
    def gap(self) -> float:
        return self.value - self.dual_value


def min_norm_to_subspace(S: Subspace, p, norm) -> MinNormCertificate:
    """Distance from ``p`` to ``S`` in ``norm`` together with a dual certificate.

    ``norm`` is a :class:`conicond.norms.NormSpec`.
    """
    from . import norms as _norms

    p = np.asarray(p, dtype=float).ravel()
    if p.size != S.ambient_dim:
        raise DimensionMismatch("point and subspace live in different spaces")
    spec = norm.canonical()
    C = S.complement()
    if C is None:
        # whole space: distance zero and L^perp = {0} has no unit functional, so the dual is 0
        return MinNormCertificate(0.0, p.copy(), np.zeros_like(p), 0.0)
    if spec.kind == _norms.L2:
        r = C.project(p)
        val = float(np.linalg.norm(r))
        q = r / val if val > 0 else C.basis[:, 0].copy()
        return MinNormCertificate(val, p - r, q, float(q @ p))
    if spec.kind in (_norms.L1, _norms.LINF):
        z, q = _polyhedral_min_norm(S, C, p, spec.kind)
    elif spec.kind in (_norms.INDUCED_E, _norms.INDUCED_E_DUAL):
        z, q = _conic_min_norm(S, C, p, spec)
    else:  # pragma: no cover - NormSpec validates kinds
        raise UnsupportedNorm(spec.kind)
    val = float(_norms.norm_eval(spec, p - z))
    dq = float(_norms.dual_norm_eval(spec, q))
    if dq > 0:
        q = q / dq
    else:
        q = C.basis[:, 0] / _norms.dual_norm_eval(spec, C.basis[:, 0])
    return MinNormCertificate(val, z, q, float(q @ p))


def _polyhedral_min_norm(S, C, p, kind):
    from . import norms as _norms
    from .lp import LpProblem, solve_lp

    n, m = S.ambient_dim, S.dim
    B = S.basis
    I = np.eye(n)
    if kind == _norms.L1:
        # min 1.s  s.t. -s <= p - Bc <= s ; vars (c, s)
        c = np.concatenate([np.zeros(m), np.ones(n)])
        A_ub = np.block([[-B, -I], [B, -I]])
        b_ub = np.concatenate([-p, p])
        lower = np.concatenate([np.full(m, -np.inf), np.zeros(n)])
    else:
        # min t s.t. -t <= p - Bc <= t ; vars (c, t)
        c = np.concatenate([np.zeros(m), [1.0]])
        one = np.ones((n, 1))
        A_ub = np.block([[-B, -one], [B, -one]])
        b_ub = np.concatenate([-p, p])
        lower = np.concatenate([np.full(m, -np.inf), [0.0]])
    sol = solve_lp(LpProblem(c, A_ub=A_ub, b_ub=b_ub, lower=lower, upper=np.inf))
    if not sol.optimal:
        raise NumericalFailure(f"min-norm LP returned {sol.status}")
    z = B @ sol.x[:m]
    # dual: max <q,p> s.t. q in L^perp, ||q||_* <= 1
    Cb = C.basis
    if kind == _norms.L1:
        # q = Cb w, -1 <= Cb w <= 1
        dsol = solve_lp(LpProblem(Cb.T @ p, A_ub=np.vstack([Cb, -Cb]), b_ub=np.ones(2 * n),
                                  lower=-np.inf, upper=np.inf, sense="max"))
        q = Cb @ dsol.x
    else:
        # q = a - b, a,b >= 0, 1.(a+b) <= 1, Bt(a-b) = 0
        dsol = solve_lp(LpProblem(np.concatenate([p, -p]), A_eq=np.hstack([B.T, -B.T]), b_eq=np.zeros(m),
                                  A_ub=np.ones((1, 2 * n)), b_ub=[1.0], sense="max"))
        q = dsol.x[:n] - dsol.x[n:]
        q = Cb @ (Cb.T @ q)
    if not dsol.optimal:
        raise NumericalFailure(f"min-norm dual LP returned {dsol.status}")
    return z, q


def _conic_min_norm(S, C, p, spec):
    import cvxpy as cp

    from . import norms as _norms

    c = cp.Variable(S.dim)
    prob = cp.Problem(cp.Minimize(_norms.cvx_norm(spec, p - S.basis @ c)))
    _norms.solve_cvx(prob)
    z = S.basis @ c.value
    w = cp.Variable(C.dim)
    q = C.basis @ w
    dprob = cp.Problem(cp.Maximize(p @ q), [_norms.cvx_norm(spec.dual(), q) <= 1])
    _norms.solve_cvx(dprob)
    return z, C.basis @ w.value
