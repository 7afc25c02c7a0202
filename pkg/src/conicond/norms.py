"""Norm specifications, their duals, and unit-ball sections.

Five kinds are supported: the three ``l_p`` norms and the pair of norms
induced by a Jordan cone, ``InducedE(x) = max_i |lambda_i(x)|`` and its dual
with respect to the dot product.  With the coordinate conventions in
:mod:`conicond.cones` that dual is ``sum_i w_i |lambda_i(x)|`` where ``w_i`` are
the frame weights (1 for orthant and PSD blocks, 1/2 for SOC blocks).
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .cones import Cone, JordanCone, Orthant, Product, Psd, SecondOrder, smat
from .errors import DimensionTooLarge, MissingCone, NonPolyhedralNorm, NumericalFailure, UnsupportedNorm

L1 = "L1"
L2 = "L2"
LINF = "LInf"
INDUCED_E = "InducedE"
INDUCED_E_DUAL = "InducedEDual"
KINDS = (L1, L2, LINF, INDUCED_E, INDUCED_E_DUAL)

_DUAL = {L1: LINF, LINF: L1, L2: L2, INDUCED_E: INDUCED_E_DUAL, INDUCED_E_DUAL: INDUCED_E}
_ALIASES = {
    "l1": L1, "1": L1, "l2": L2, "2": L2, "linf": LINF, "inf": LINF, "infinity": LINF,
    "e": INDUCED_E, "inducede": INDUCED_E, "e*": INDUCED_E_DUAL, "inducededual": INDUCED_E_DUAL,
}

MAX_BALL_DIM = 10


@dataclass(frozen=True)
class NormSpec:
    kind: str
    cone: Optional[Cone] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UnsupportedNorm(f"unknown norm kind {self.kind!r}")

    @classmethod
    def parse(cls, name: str, cone: Optional[Cone] = None) -> "NormSpec":
        key = name.strip().lower().replace("_", "").replace("-", "")
        if key not in _ALIASES:
            raise UnsupportedNorm(f"unknown norm {name!r}")
        kind = _ALIASES[key]
        return cls(kind, cone if kind in (INDUCED_E, INDUCED_E_DUAL) else None)

    @property
    def induced(self) -> bool:
        return self.kind in (INDUCED_E, INDUCED_E_DUAL)

    def _need_cone(self):
        if self.induced and self.cone is None:
            raise MissingCone(f"{self.kind} needs a cone")
        if self.induced and not isinstance(self.cone, JordanCone):
            raise UnsupportedNorm(f"{self.kind} needs a Jordan cone, got {self.cone!r}")

    def dual(self) -> "NormSpec":
        return NormSpec(_DUAL[self.kind], self.cone)

    def canonical(self) -> "NormSpec":
        """Induced norms over an orthant are rewritten as plain ``l_inf``/``l_1``."""
        self._need_cone()
        if self.induced and self.cone.is_orthant():
            return NormSpec(LINF if self.kind == INDUCED_E else L1)
        return self

    @property
    def is_polyhedral(self) -> bool:
        return self.canonical().kind in (L1, LINF)

    def __call__(self, x) -> float:
        return norm_eval(self, x)

    def label(self) -> str:
        return self.kind if self.cone is None else f"{self.kind}[{self.cone!r}]"


def norm_eval(spec: NormSpec, x) -> float:
    x = np.asarray(x, dtype=float).ravel()
    spec._need_cone()
    if spec.kind == L1:
        return float(np.abs(x).sum())
    if spec.kind == L2:
        return float(np.linalg.norm(x))
    if spec.kind == LINF:
        return float(np.abs(x).max()) if x.size else 0.0
    lam = spec.cone.eigenvalues(x)
    if spec.kind == INDUCED_E:
        return float(np.abs(lam).max())
    return float(np.abs(lam) @ _weights_in_eigen_order(spec.cone))


def _weights_in_eigen_order(cone: JordanCone) -> np.ndarray:
    # eigenvalues of a product are reported block by block, weights likewise
    return cone.frame_weights()


def dual_norm_eval(spec: NormSpec, u) -> float:
    return norm_eval(spec.dual(), u)


def dual_maximizer(spec: NormSpec, u) -> np.ndarray:
    """A point ``x`` with ``||x|| = 1`` and ``<u, x> = ||u||_*``."""
    u = np.asarray(u, dtype=float).ravel()
    spec._need_cone()
    n = u.size
    if not np.any(u):
        x = np.zeros(n)
        x[0] = 1.0
        return x / norm_eval(spec, x)
    if spec.kind == L2:
        return u / np.linalg.norm(u)
    if spec.kind == L1:
        k = int(np.argmax(np.abs(u)))
        x = np.zeros(n)
        x[k] = math.copysign(1.0, u[k])
        return x
    if spec.kind == LINF:
        return np.where(u >= 0, 1.0, -1.0)
    sd = spec.cone.spectral(u)
    w = spec.cone.frame_weights()
    signs = np.where(sd.eigenvalues >= 0, 1.0, -1.0)
    if spec.kind == INDUCED_E:
        return signs @ sd.frame
    k = int(np.argmax(np.abs(sd.eigenvalues)))
    return signs[k] * sd.frame[k] / w[k]


def holder_gap(spec: NormSpec, u, x) -> float:
    """``||u||_* ||x|| - |<u, x>|`` (nonnegative up to rounding)."""
    u = np.asarray(u, dtype=float)
    x = np.asarray(x, dtype=float)
    return dual_norm_eval(spec, u) * norm_eval(spec, x) - abs(float(u @ x))


# ---------------------------------------------------------------------------
# polyhedral unit balls


def dual_ball_vertices(spec: NormSpec, n: int) -> np.ndarray:
    """Vertices of the dual unit ball ``{u : ||u||_* <= 1}`` in R^n (rows)."""
    c = spec.canonical()
    if c.kind == L1:
        if n > 16:
            raise DimensionTooLarge("too many sign vectors")
        return np.array(list(itertools.product((1.0, -1.0), repeat=n)))
    if c.kind == LINF:
        eye = np.eye(n)
        return np.vstack([eye, -eye])
    raise NonPolyhedralNorm(spec.label())


def ball_vertices(spec: NormSpec, S) -> np.ndarray:
    """Extreme points of ``{x in S : ||x|| <= 1}`` as rows in ambient coordinates."""
    from .lp import enumerate_vertices

    c = spec.canonical()
    if c.kind not in (L1, LINF):
        raise NonPolyhedralNorm(f"{spec.label()} has a curved unit ball")
    B = S.basis
    n, m = B.shape
    if m > MAX_BALL_DIM:
        raise DimensionTooLarge(f"section dimension {m} exceeds {MAX_BALL_DIM}")
    out = []
    if c.kind == L1:
        # every vertex has m-1 vanishing coordinates
        for Z in itertools.combinations(range(n), m - 1):
            Bz = B[list(Z)]
            if m > 1:
                _, s, Vt = np.linalg.svd(Bz)
                if s.size < m - 1 or s[m - 2] < 1e-10 * max(1.0, s[0]):
                    continue
                d = Vt[-1]
            else:
                d = np.ones(1)
            x = B @ d
            x /= np.abs(x).sum()
            for y in (x, -x):
                if not any(np.abs(y - v).max() <= 1e-8 for v in out):
                    out.append(y)
    else:
        verts = enumerate_vertices(np.vstack([B, -B]), np.ones(2 * n))
        out = [B @ v for v in verts]
    return np.array(out)


# ---------------------------------------------------------------------------
# cvxpy encodings for the curved cases


def cvx_norm(spec: NormSpec, expr):
    """cvxpy expression for ``spec`` applied to the affine expression ``expr``."""
    import cvxpy as cp

    spec._need_cone()
    if spec.kind == L1:
        return cp.norm1(expr)
    if spec.kind == L2:
        return cp.norm2(expr)
    if spec.kind == LINF:
        return cp.norm_inf(expr)
    return _cvx_induced(spec.cone, expr, spec.kind == INDUCED_E)


def _cvx_induced(cone, expr, primal: bool):
    import cvxpy as cp

    if isinstance(cone, Orthant):
        return cp.norm_inf(expr) if primal else cp.norm1(expr)
    if isinstance(cone, SecondOrder):
        a, b = cp.abs(expr[0]), cp.norm2(expr[1:])
        return a + b if primal else cp.maximum(a, b)
    if isinstance(cone, Psd):
        X = _cvx_smat(expr, cone.k)
        return cp.sigma_max(X) if primal else cp.normNuc(X)
    if isinstance(cone, Product):
        parts = [_cvx_induced(b, expr[cone.offsets[i]:cone.offsets[i + 1]], primal)
                 for i, b in enumerate(cone.blocks)]
        return cp.maximum(*parts) if primal else cp.sum(cp.hstack(parts))
    raise UnsupportedNorm(f"no induced norm for {cone!r}")


def _cvx_smat(expr, k: int):
    import cvxpy as cp

    n = k * (k + 1) // 2
    M = np.zeros((k * k, n))
    eye = np.eye(n)
    for j in range(n):
        M[:, j] = smat(eye[j], k).ravel(order="F")
    return cp.reshape(M @ expr, (k, k), order="F")


def solve_cvx(prob) -> None:
    """Solve with Clarabel, falling back to SCS; raise if neither succeeds."""
    import cvxpy as cp

    last = None
    attempts = (
        (cp.CLARABEL, dict(tol_gap_abs=1e-11, tol_gap_rel=1e-11, tol_feas=1e-11, max_iter=400)),
        (cp.CLARABEL, {}),
        (cp.SCS, dict(eps_abs=1e-9, eps_rel=1e-9, max_iters=200000)),
    )
    for solver, opts in attempts:
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                prob.solve(solver=solver, **opts)
        except (cp.error.SolverError, ValueError) as exc:  # pragma: no cover - solver specific
            last = exc
            continue
        if prob.status in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
            return
        last = prob.status
    raise NumericalFailure(f"conic solver failed: {last}")
