"""Explicit ill-posed subspaces at distance ``nu`` (feasible side) or ``nu_bar`` (infeasible side)."""

from __future__ import annotations

import numpy as np

from ..cones import Cone
from ..errors import DegenerateSubspace, DegenerateVbar, MissingWitnesses
from ..linalg import Subspace
from ..norms import dual_maximizer
from ._common import MeasureCertificate, NormPair
from .distances import min_ratio


def _section(L: Subspace, h) -> np.ndarray:
    """Columns spanning ``L cap {x : <h, x> = 0}``."""
    g = L.basis.T @ h
    if np.linalg.norm(g) <= 1e-14:
        return L.basis
    _, _, Vt = np.linalg.svd(g.reshape(1, -1))
    return L.basis @ Vt[1:].T


def _span(first, rest: np.ndarray, m: int) -> Subspace:
    M = np.column_stack([first, rest]) if rest.size else np.asarray(first, float).reshape(-1, 1)
    S = Subspace.from_columns(M)
    if S is None or S.dim != m:
        raise DegenerateSubspace("constructed subspace lost dimension")
    return S


def _need(cert: MeasureCertificate, *keys):
    missing = [k for k in keys if cert.witness(k) is None]
    if missing:
        raise MissingWitnesses(f"certificate lacks {', '.join(missing)}")
    return [np.asarray(cert.witness(k), dtype=float) for k in keys]


def critical_subspace_feasible(L: Subspace, K: Cone, np_: NormPair, cert: MeasureCertificate) -> Subspace:
    """``span({x - nu v} and L cap H)`` with ``H = (u - y)^perp``; ``u`` lies in its complement."""
    u, y, x = _need(cert, "u", "y", "x")
    nu_val = float(cert.value)
    v = dual_maximizer(np_.tri, u)
    v = v / float(u @ v)
    return _span(x - nu_val * v, _section(L, u - y), L.dim)


def critical_subspace_infeasible(L: Subspace, K: Cone, np_: NormPair, cert: MeasureCertificate) -> Subspace:
    """``span({v} and L cap H)`` with ``H = y^perp`` for ``y`` norming ``x``.

    Raises :class:`DegenerateVbar` carrying ``min_{x in L, ||x|| = 1} |||x|||``
    when the optimal cone point is zero.
    """
    x, v = _need(cert, "x", "v")
    if np.linalg.norm(v) <= 1e-12:
        raise DegenerateVbar(min_ratio(L, np_).value)
    y = dual_maximizer(np_.primal.dual(), x)
    return _span(v, _section(L, y), L.dim)
