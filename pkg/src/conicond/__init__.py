"""Condition measures for the conic feasibility problem ``find x in L cap K, x != 0``."""

__version__ = "0.1.0"

from .cones import Orthant, Polyhedral2D, Product, Psd, SecondOrder
from .linalg import Subspace, orthonormal_basis
from .measures import (
    MeasureCertificate, NormPair, dist, nu, nu_bar, odist, sigma, sym, theta,
)
from .norms import NormSpec
from .renegar import LinearMap

__all__ = [
    "Orthant", "Polyhedral2D", "Product", "Psd", "SecondOrder", "Subspace", "orthonormal_basis", "MeasureCertificate",
    "NormPair", "NormSpec", "LinearMap", "dist", "odist", "nu", "nu_bar", "sigma", "sym", "theta",
]
