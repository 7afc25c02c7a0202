"""Condition measures for conic feasibility problems over subspaces."""

from ._common import (
    CLOSED_FORM, CONIC_EXACT, LP_EXACT, SAMPLED, MeasureCertificate, NormPair,
)
from .distances import dist, max_ratio, min_ratio, odist
from .violation import min_projection_on_cone, nu, nu_bar
from .sigma import cone_alignment_constant, sigma, sym, sym_via_kernel, theta
from .critical import critical_subspace_feasible, critical_subspace_infeasible

__all__ = [
    "CLOSED_FORM", "CONIC_EXACT", "LP_EXACT", "SAMPLED", "MeasureCertificate", "NormPair",
    "dist", "odist", "max_ratio", "min_ratio", "nu", "nu_bar", "min_projection_on_cone",
    "sigma", "sym", "sym_via_kernel", "theta", "cone_alignment_constant",
    "critical_subspace_feasible", "critical_subspace_infeasible",
]
