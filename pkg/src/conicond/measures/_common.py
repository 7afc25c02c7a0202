from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from ..errors import DimensionMismatch
from ..linalg import Subspace
from ..norms import L2, NormSpec

CLOSED_FORM = "ClosedForm"
LP_EXACT = "LpExact"
CONIC_EXACT = "ConicExact"
SAMPLED = "Sampled"
EXACT_PATHS = (CLOSED_FORM, LP_EXACT, CONIC_EXACT)

POSITIVITY_TOL = 1e-9
SAMPLE_SLACK = 0.05
DEFAULT_SAMPLES = 10_000


@dataclass(frozen=True)
class NormPair:
    """``primal`` is the norm written ``||.||``, ``tri`` the one written ``|||.|||``."""

    primal: NormSpec
    tri: NormSpec

    @classmethod
    def of(cls, primal, tri=None, cone=None) -> "NormPair":
        def mk(s):
            return s if isinstance(s, NormSpec) else NormSpec.parse(s, cone)

        return cls(mk(primal), mk(primal if tri is None else tri))

    @property
    def euclidean(self) -> bool:
        return self.primal.canonical().kind == L2 and self.tri.canonical().kind == L2

    def label(self) -> str:
        return f"{self.primal.label()}/{self.tri.label()}"


@dataclass
class MeasureCertificate:
    """A measure value with the computation path and optimality witnesses.

    ``bracket`` is ``(lo, hi)``; exact paths have ``lo == hi == value``.
    """

    name: str
    value: float
    path: str
    witnesses: Dict[str, np.ndarray] = field(default_factory=dict)
    alignment_residual: float = 0.0
    bracket: Optional[Tuple[float, float]] = None
    info: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.bracket is None:
            self.bracket = (self.value, self.value)

    @property
    def approximate(self) -> bool:
        return self.path not in EXACT_PATHS

    @property
    def exact(self) -> bool:
        return not self.approximate

    def witness(self, key: str) -> Optional[np.ndarray]:
        return self.witnesses.get(key)

    def to_dict(self) -> dict:
        out = {
            "value": float(self.value),
            "path": self.path,
            "residual": float(self.alignment_residual),
            "bracket": [float(self.bracket[0]), float(self.bracket[1])],
        }
        if self.witnesses:
            out["certificate"] = {k: np.asarray(v, dtype=float).tolist() for k, v in self.witnesses.items()}
        if self.info:
            out["info"] = {k: _jsonable(v) for k, v in self.info.items()}
        return out


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, (list, tuple)):
        return [_jsonable(t) for t in v]
    return v


def check_same_space(*subspaces: Subspace):
    n = subspaces[0].ambient_dim
    for S in subspaces[1:]:
        if S.ambient_dim != n:
            raise DimensionMismatch(f"ambient dimensions {n} and {S.ambient_dim} differ")


def unit_sphere_samples(S: Subspace, count: int, rng, norm: NormSpec) -> np.ndarray:
    """``count`` points of ``S`` normalized in ``norm`` (rows)."""
    z = rng.standard_normal((count, S.dim)) @ S.basis.T
    scale = np.array([norm(r) for r in z])
    return z / scale[:, None]


def sampled_bracket(best: float, minimize: bool) -> Tuple[float, float]:
    if minimize:
        return best / (1.0 + SAMPLE_SLACK), best
    return best, best * (1.0 + SAMPLE_SLACK)
