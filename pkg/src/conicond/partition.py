"""Goldman-Tucker partition for the nonnegative orthant and the measures it induces.

Every subspace ``L`` of R^n splits the coordinates as ``B | N`` so that ``L``
has a point positive exactly on ``B`` and ``L^perp`` one positive exactly on
``N``.  Indices are 0-based throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from ._program import Program
from .cones import Orthant
from .errors import InfeasibleSide, NumericalFailure, RankDeficientBlock, UnsupportedNorm
from .linalg import Subspace, intersection
from .measures import MeasureCertificate, NormPair, nu, sigma
from .norms import L1, LINF, norm_eval
from .renegar import LinearMap, SandwichReport, renegar_sandwich

SUPPORT_TOL = 1e-9
ZERO_TOL = 1e-12


@dataclass
class GtPartition:
    B: Tuple[int, ...]
    N: Tuple[int, ...]
    x_cert: np.ndarray
    y_cert: np.ndarray

    @property
    def n(self) -> int:
        return self.x_cert.size

    @property
    def ill_posed(self) -> bool:
        return bool(self.B) and bool(self.N)

    def to_dict(self) -> dict:
        return {"B": list(self.B), "N": list(self.N), "x_cert": self.x_cert.tolist(), "y_cert": self.y_cert.tolist()}


def _max_coordinate(S: Optional[Subspace], n: int, i: int):
    """``max x_i`` over ``x in S``, ``x >= 0``, ``sum(x) <= 1``."""
    if S is None:
        return 0.0, np.zeros(n)
    prog = Program()
    prog.var("x", n, lower=0.0)
    prog.var("c", S.dim)
    prog.eq({"x": np.eye(n), "c": -S.basis}, np.zeros(n))
    prog.le({"x": np.ones(n)}, 1.0)
    obj = np.zeros(n)
    obj[i] = 1.0
    prog.maximize({"x": obj})
    status, val, z = prog.solve()
    if status != "Optimal":
        raise NumericalFailure(f"coordinate LP {i} failed: {status}")
    return float(val), z["x"]


def _support_certificate(S: Optional[Subspace], n: int):
    idx, total = [], np.zeros(n)
    for i in range(n):
        val, x = _max_coordinate(S, n, i)
        if val > SUPPORT_TOL:
            idx.append(i)
            total += x
    if idx:
        total /= total.sum()
    total[np.abs(total) <= ZERO_TOL] = 0.0
    return tuple(idx), total


def goldman_tucker(L: Subspace) -> GtPartition:
    n = L.ambient_dim
    B, x = _support_certificate(L, n)
    N, y = _support_certificate(L.complement(), n)
    if set(B) & set(N) or len(B) + len(N) != n:
        raise NumericalFailure(f"supports {B} and {N} do not partition the indices")
    x[list(N)] = 0.0
    y[list(B)] = 0.0
    return GtPartition(B, N, x, y)


# ---------------------------------------------------------------------------
# block subspaces and measures


def _coordinate_section(S: Optional[Subspace], idx) -> Optional[Subspace]:
    """``S cap V_idx`` written in the coordinates ``idx``."""
    if S is None or not idx:
        return None
    n = S.ambient_dim
    V = Subspace(np.eye(n)[:, list(idx)], allow_full=True)
    I = intersection(S, V) if len(idx) < n else S
    if I is None:
        return None
    return Subspace.from_columns(I.basis[list(idx)], allow_full=True)


def block_subspaces(L: Subspace, gt: GtPartition):
    """``(L_B, L_N)`` with ``L_B = L cap V_B`` and ``L_N = L^perp cap V_N`` in block coordinates."""
    return _coordinate_section(L, gt.B), _coordinate_section(L.complement(), gt.N)


@dataclass
class PartitionMeasures:
    partition: GtPartition
    nu_B: Optional[MeasureCertificate] = None
    sigma_B: Optional[MeasureCertificate] = None
    nu_N: Optional[MeasureCertificate] = None
    sigma_N: Optional[MeasureCertificate] = None

    def to_dict(self) -> dict:
        out = {"partition": self.partition.to_dict()}
        for k in ("nu_B", "sigma_B", "nu_N", "sigma_N"):
            c = getattr(self, k)
            if c is not None:
                out[k] = c.to_dict()
        return out


def _rebase(np_: NormPair, k: int) -> NormPair:
    # induced norms follow the block cone
    def fix(s):
        return s.__class__(s.kind, Orthant(k)) if s.induced else s

    return NormPair(fix(np_.primal), fix(np_.tri))


def partition_measures(L: Subspace, np_: NormPair, gt: Optional[GtPartition] = None) -> PartitionMeasures:
    gt = gt or goldman_tucker(L)
    LB, LN = block_subspaces(L, gt)
    out = PartitionMeasures(gt)
    if LB is not None:
        k = len(gt.B)
        out.nu_B = nu(LB, Orthant(k), _rebase(np_, k))
        out.sigma_B = sigma(LB, Orthant(k), _rebase(np_, k))
    if LN is not None:
        k = len(gt.N)
        out.nu_N = nu(LN, Orthant(k), _rebase(np_, k))
        out.sigma_N = sigma(LN, Orthant(k), _rebase(np_, k))
    return out


def ye_closed_form(L: Subspace, gt: GtPartition, np_: NormPair, side: str = "B") -> float:
    """Index forms of the block measures for ``|||.|||`` in ``{l_inf, l_1}``.

    ``l_inf``: ``max_{x in S cap R^n_+, ||x|| <= 1} min_{i in I} x_i``;
    ``l_1``: ``min_{i in I} max_{x in S cap R^n_+, ||x|| <= 1} x_i``; with
    ``S = L`` and ``I = B`` or ``S = L^perp`` and ``I = N``.
    """
    S, idx = (L, gt.B) if side == "B" else (L.complement(), gt.N)
    if not idx:
        raise ValueError(f"block {side} is empty")
    n = L.ambient_dim
    kind = np_.tri.canonical().kind

    def solve(obj_rows):
        prog = Program()
        prog.var("x", n, lower=0.0)
        prog.var("c", S.dim)
        prog.var("t", 1)
        prog.eq({"x": np.eye(n), "c": -S.basis}, np.zeros(n))
        prog.norm_le({"x": np.eye(n)}, np.zeros(n), np_.primal, 1.0)
        for r in obj_rows:
            prog.le({"t": np.ones((1, 1)), "x": -r}, 0.0)
        prog.maximize({"t": np.ones(1)})
        _, val, _ = prog.solve()
        return float(val)

    eye = np.eye(n)
    if kind == LINF:
        return solve([eye[i] for i in idx])
    if kind == L1:
        return min(solve([eye[i]]) for i in idx)
    raise UnsupportedNorm("index forms exist for l_inf and l_1 tri-norms")


# ---------------------------------------------------------------------------
# block decomposition of a map


@dataclass
class BlockDecomposition:
    rows_B: Tuple[int, ...]
    rows_N: Tuple[int, ...]
    U_B: np.ndarray
    U_N: np.ndarray
    A_BB: Optional[np.ndarray]
    A_NB: Optional[np.ndarray]
    A_NN: Optional[np.ndarray]
    reconstruction_residual: float
    L_B: Optional[Subspace] = None
    L_N: Optional[Subspace] = None
    identity_residual_B: Optional[float] = None
    identity_residual_N: Optional[float] = None
    sandwich_BB: Optional[SandwichReport] = None
    sandwich_NN: Optional[SandwichReport] = None

    def to_dict(self) -> dict:
        def arr(a):
            return None if a is None else np.asarray(a).tolist()

        return {
            "rows_B": list(self.rows_B), "rows_N": list(self.rows_N),
            "A_BB": arr(self.A_BB), "A_NB": arr(self.A_NB), "A_NN": arr(self.A_NN),
            "reconstruction_residual": self.reconstruction_residual,
            "identity_residual_B": self.identity_residual_B, "identity_residual_N": self.identity_residual_N,
            "sandwich_BB": None if self.sandwich_BB is None else self.sandwich_BB.to_dict(),
            "sandwich_NN": None if self.sandwich_NN is None else self.sandwich_NN.to_dict(),
        }


def _range_and_kernel(M, m: int):
    if M.shape[0] == 0:
        return np.zeros((m, 0)), np.eye(m)
    U, s, Vt = np.linalg.svd(M)
    r = int(np.sum(s > 1e-10 * max(1.0, s[0] if s.size else 0.0)))
    return Vt[:r].T, Vt[r:].T


def _full_column_rank(M) -> bool:
    if M.shape[1] == 0:
        return True
    return np.linalg.matrix_rank(M, tol=1e-10 * max(1.0, np.abs(M).max())) == M.shape[1]


def _identity_residual(S: Optional[Subspace], M: np.ndarray, perp: bool) -> float:
    """Gap between ``S`` and ``Image(M)`` (``ker(M^T)`` when ``perp``); 1 on a dimension mismatch."""
    k = M.shape[0]
    T = Subspace.from_columns(M, allow_full=True) if M.shape[1] else None
    if perp:
        T = Subspace(np.eye(k), allow_full=True) if T is None else T.complement()
    if S is None and T is None:
        return 0.0
    if S is None or T is None or S.dim != T.dim:
        return 1.0
    return float(np.linalg.norm(S.projector - T.projector, 2))


def _proper_sandwich(M, K, A: LinearMap, budget: int, seed: int):
    if M is None or M.shape[1] == 0 or M.shape[1] >= M.shape[0]:
        return None
    return renegar_sandwich(LinearMap(M, A.domain_norm, _rebase(A.norms, M.shape[0])), K, budget=budget, seed=seed)


def block_decompose(A: LinearMap, gt: Optional[GtPartition] = None, budget: Optional[int] = None,
                    seed: int = 0) -> BlockDecomposition:
    """``A = [[A_BB, 0], [A_NB, A_NN]]`` after rotating the domain onto ``Image(A_B^T) + ker(A_B)``.

    ``L_B`` and ``L_N`` are computed by direct intersection; the residuals
    record how far they are from ``Image(A_BB)`` and ``ker(A_NN^T)``.  With
    ``budget`` set, the sandwich is evaluated on each proper block.
    """
    L = A.image()
    gt = gt or goldman_tucker(L)
    M = A.matrix
    m = A.m
    AB, AN = M[list(gt.B)], M[list(gt.N)]
    UB, UN = _range_and_kernel(AB, m)
    A_BB = AB @ UB if gt.B else None
    A_NB = AN @ UB if gt.N and UB.shape[1] else None
    A_NN = AN @ UN if gt.N else None
    for name, blk in (("A_BB", A_BB), ("A_NN", A_NN)):
        if blk is not None and not _full_column_rank(blk):
            raise RankDeficientBlock(f"{name} is not of full column rank")
    U = np.hstack([UB, UN])
    top = np.hstack([AB @ UB, AB @ UN]) if gt.B else np.zeros((0, m))
    bottom = np.hstack([AN @ UB, AN @ UN]) if gt.N else np.zeros((0, m))
    blocks = np.vstack([top, bottom])
    perm = list(gt.B) + list(gt.N)
    resid = float(np.abs(blocks @ U.T - M[perm]).max())
    if gt.B:
        resid = max(resid, float(np.abs(AB @ UN).max()) if UN.shape[1] else 0.0)
    LB, LN = block_subspaces(L, gt)
    dec = BlockDecomposition(gt.B, gt.N, UB, UN, A_BB, A_NB, A_NN, resid, LB, LN)
    if gt.B:
        dec.identity_residual_B = _identity_residual(LB, A_BB, perp=False)
    if gt.N:
        dec.identity_residual_N = _identity_residual(LN, A_NN, perp=True)
    if budget is not None:
        if gt.B:
            dec.sandwich_BB = _proper_sandwich(A_BB, Orthant(len(gt.B)), A, budget, seed)
        if gt.N:
            dec.sandwich_NN = _proper_sandwich(A_NN, Orthant(len(gt.N)), A, budget, seed)
    return dec


# ---------------------------------------------------------------------------
# preconditioning


@dataclass
class PartitionPreconditionReport:
    partition: GtPartition
    same_partition: bool
    nu_B: Optional[float]
    nu_N: Optional[float]
    bound_B: Optional[float]
    bound_N: Optional[float]
    balance_residual: float

    @property
    def ok(self) -> bool:
        good = self.same_partition
        if self.nu_B is not None:
            good = good and self.nu_B >= self.bound_B - 1e-7
        if self.nu_N is not None:
            good = good and self.nu_N >= self.bound_N - 1e-7
        return good

    def to_dict(self) -> dict:
        return {"partition": self.partition.to_dict(), "same_partition": self.same_partition,
                "nu_B": self.nu_B, "nu_N": self.nu_N, "bound_B": self.bound_B, "bound_N": self.bound_N,
                "balance_residual": self.balance_residual, "ok": self.ok}


def partition_precondition(A: LinearMap):
    """Positive diagonal ``D`` and ``R`` with ``DAR`` orthonormal and the block certificates scaled to ones."""
    if not A.norms.euclidean:
        raise UnsupportedNorm("partition preconditioning is stated for l2/l2")
    L = A.image()
    gt = goldman_tucker(L)
    d = np.ones(A.n)
    if gt.B:
        d[list(gt.B)] = 1.0 / gt.x_cert[list(gt.B)]
    if gt.N:
        d[list(gt.N)] = gt.y_cert[list(gt.N)]
    D = np.diag(d)
    Q, Rq = np.linalg.qr(D @ A.matrix)
    R = np.linalg.inv(Rq)
    hat = D @ A.matrix @ R
    DL = Subspace.from_columns(hat)
    gt2 = goldman_tucker(DL)
    LB, LN = block_subspaces(DL, gt2)
    np_ = NormPair.of("l2")
    nb = nu(LB, Orthant(len(gt2.B)), np_).value if LB is not None else None
    nn = nu(LN, Orthant(len(gt2.N)), np_).value if LN is not None else None
    rep = PartitionPreconditionReport(
        gt2, gt2.B == gt.B and gt2.N == gt.N, nb, nn,
        1.0 / math.sqrt(len(gt.B)) if gt.B else None,
        1.0 / math.sqrt(len(gt.N)) if gt.N else None,
        float(np.abs(hat.T @ hat - np.eye(A.m)).max()),
    )
    return D, R, rep
