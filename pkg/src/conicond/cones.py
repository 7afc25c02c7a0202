"""Regular cones with their Euclidean Jordan algebra structure.

Supported: the nonnegative orthant, the second-order cone, the PSD cone in
scaled symmetric coordinates, direct products of those, and a planar
polyhedral cone family (``Polyhedral2D``) that is *not* symmetric and only
supports the geometric operations (membership, duals, ``lambda_v``).

Coordinates.  Every cone lives in R^n with the plain dot product.  PSD
matrices are stored as ``svec`` (upper triangle, row major, off-diagonals
times sqrt(2)), which makes the dot product equal to the trace inner
product.  The second-order cone keeps its natural coordinates
``(x0, xbar)`` with the product ``x o z = (x.z, x0 zbar + z0 xbar)``; for
that block the trace inner product is twice the dot product, which is
recorded in :meth:`JordanCone.frame_weights`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NotInterior, VNotInCone

BISECTION_TOL = 1e-11


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: np.ndarray  # (r,)
    frame: np.ndarray  # (r, n), rows are primitive idempotents

    def reconstruct(self) -> np.ndarray:
        return self.eigenvalues @ self.frame


class Cone:
    """Common interface.  Subclasses set ``dim``."""

    dim: int
    self_dual = False
    is_jordan = False

    def contains(self, x, tol: float = 0.0) -> bool:
        raise NotImplementedError

    def dual_contains(self, u, tol: float = 0.0) -> bool:
        raise NotImplementedError

    def identity(self) -> np.ndarray:
        raise NotImplementedError

    def project(self, x) -> np.ndarray:
        """Euclidean projection onto the cone."""
        raise NotImplementedError

    def project_dual(self, u) -> np.ndarray:
        raise NotImplementedError

    def lambda_e(self, x) -> float:
        return self.lambda_v(x, self.identity())

    def lambda_v(self, x, v) -> float:
        raise NotImplementedError

    def sample(self, rng, count: int) -> np.ndarray:
        """``count`` random nonzero cone elements (rows), not normalized."""
        raise NotImplementedError

    def sample_dual(self, rng, count: int) -> np.ndarray:
        raise NotImplementedError

    def is_orthant(self) -> bool:
        return False

    def _check(self, x):
        x = np.asarray(x, dtype=float).ravel()
        if x.size != self.dim:
            raise ValueError(f"expected a vector of length {self.dim}, got {x.size}")
        return x


# ---------------------------------------------------------------------------
# Jordan cones


class JordanCone(Cone):
    """Cone of squares of a Euclidean Jordan algebra."""

    self_dual = True
    is_jordan = True
    rank: int

    # algebra
    def product(self, x, y) -> np.ndarray:
        raise NotImplementedError

    def spectral(self, x) -> SpectralDecomposition:
        raise NotImplementedError

    def frame_weights(self) -> np.ndarray:
        """Dot-product squared norm of each primitive idempotent in a frame."""
        return np.ones(self.rank)

    def trace(self, x) -> float:
        return float(np.sum(self.spectral(x).eigenvalues))

    def eigenvalues(self, x) -> np.ndarray:
        return self.spectral(x).eigenvalues

    # geometry
    def contains(self, x, tol: float = 0.0) -> bool:
        return bool(np.min(self.eigenvalues(self._check(x))) >= -tol)

    def dual_contains(self, u, tol: float = 0.0) -> bool:
        return self.contains(u, tol)

    def lambda_e(self, x) -> float:
        return float(np.min(self.eigenvalues(self._check(x))))

    def project(self, x) -> np.ndarray:
        sd = self.spectral(self._check(x))
        return np.maximum(sd.eigenvalues, 0.0) @ sd.frame

    def project_dual(self, u) -> np.ndarray:
        return self.project(u)

    def spectral_function(self, x, f) -> np.ndarray:
        sd = self.spectral(self._check(x))
        return f(sd.eigenvalues) @ sd.frame

    def multiplication_matrix(self, x) -> np.ndarray:
        """Matrix of ``z -> x o z``."""
        x = self._check(x)
        eye = np.eye(self.dim)
        return np.column_stack([self.product(x, eye[j]) for j in range(self.dim)])

    def quadratic_representation(self, x) -> np.ndarray:
        """``P(x) = 2 L(x)^2 - L(x^2)``; maps ``e`` to ``x^2`` and preserves the cone."""
        Lx = self.multiplication_matrix(x)
        return 2.0 * Lx @ Lx - self.multiplication_matrix(self.product(x, x))

    def lambda_v(self, x, v) -> float:
        x = self._check(x)
        v = self._check(v)
        if not self.contains(v, 1e-12) or np.allclose(v, 0.0):
            raise VNotInCone("v must be a nonzero element of the cone")
        if np.allclose(v, self.identity(), rtol=0, atol=1e-15):
            return self.lambda_e(x)
        if self.lambda_e(v) > 1e-8 * max(1.0, np.abs(v).max()):
            # interior v: move v to e with an automorphism, then read off lambda_e
            P = self.quadratic_representation(self.spectral_function(v, lambda l: l ** -0.5))
            return self.lambda_e(P @ x)
        return _bisect_lambda_v(self, x, v)

    def automorphism_to_identity(self, x0, tol: float = 1e-12) -> np.ndarray:
        x0 = self._check(x0)
        if self.lambda_e(x0) <= tol:
            raise NotInterior(f"lambda_e(x0) = {self.lambda_e(x0):.3e} is not positive")
        return self.quadratic_representation(self.spectral_function(x0, lambda l: l ** -0.5))

    def random_frame(self, rng) -> np.ndarray:
        """A random Jordan frame (rows)."""
        return self.spectral(rng.standard_normal(self.dim)).frame


def _bisect_lambda_v(cone: Cone, x, v) -> float:
    """``max{t : x - t v in K}`` for boundary ``v`` by bisection.

    The feasible set in ``t`` is an interval ``(-inf, t*]`` because ``v`` is in
    the cone; an upper bracket is ``<e, x> / <e, v>``.
    """
    e = cone.identity()
    hi = float(e @ x) / float(e @ v)
    scale = max(1.0, float(np.abs(x).max()), abs(hi))
    lo = hi - scale
    while not cone.contains(x - lo * v, 1e-13 * scale):
        lo -= 2.0 * (hi - lo)
        if hi - lo > 1e12 * scale:
            return -math.inf
    if cone.contains(x - hi * v, 1e-13 * scale):
        return hi
    while hi - lo > BISECTION_TOL:
        mid = 0.5 * (lo + hi)
        if cone.contains(x - mid * v, 1e-13 * scale):
            lo = mid
        else:
            hi = mid
    return lo


class Orthant(JordanCone):
    def __init__(self, n: int):
        if n < 1:
            raise ValueError("orthant dimension must be positive")
        self.dim = self.rank = int(n)

    def __repr__(self):
        return f"Orthant({self.dim})"

    def is_orthant(self) -> bool:
        return True

    def product(self, x, y):
        return np.asarray(x, dtype=float) * np.asarray(y, dtype=float)

    def identity(self):
        return np.ones(self.dim)

    def spectral(self, x):
        x = self._check(x)
        order = np.argsort(-x, kind="stable")
        return SpectralDecomposition(x[order], np.eye(self.dim)[order])

    def eigenvalues(self, x):
        return np.sort(self._check(x))[::-1]

    def project(self, x):
        return np.maximum(self._check(x), 0.0)

    def lambda_e(self, x):
        return float(np.min(self._check(x)))

    def lambda_v(self, x, v):
        x, v = self._check(x), self._check(v)
        if np.any(v < -1e-12) or np.allclose(v, 0.0):
            raise VNotInCone("v must be a nonzero element of the orthant")
        return _polyhedral_lambda_v(np.eye(self.dim), x, v)

    def automorphism_to_identity(self, x0, tol: float = 1e-12):
        x0 = self._check(x0)
        if x0.min() <= tol:
            raise NotInterior(f"min(x0) = {x0.min():.3e} is not positive")
        return np.diag(1.0 / x0)

    def sample(self, rng, count):
        return np.abs(rng.standard_normal((count, self.dim)))

    sample_dual = sample


class SecondOrder(JordanCone):
    """``{(x0, xbar) : x0 >= ||xbar||_2}`` in R^n, rank 2."""

    rank = 2

    def __init__(self, n: int):
        if n < 2:
            raise ValueError("second-order cone needs n >= 2")
        self.dim = int(n)

    def __repr__(self):
        return f"SecondOrder({self.dim})"

    def product(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return np.concatenate([[x @ y], x[0] * y[1:] + y[0] * x[1:]])

    def identity(self):
        e = np.zeros(self.dim)
        e[0] = 1.0
        return e

    def frame_weights(self):
        return np.full(2, 0.5)

    def spectral(self, x):
        x = self._check(x)
        nb = float(np.linalg.norm(x[1:]))
        if nb > 0.0:
            d = x[1:] / nb
        else:
            d = np.zeros(self.dim - 1)
            d[0] = 1.0
        c1 = 0.5 * np.concatenate([[1.0], d])
        c2 = 0.5 * np.concatenate([[1.0], -d])
        return SpectralDecomposition(np.array([x[0] + nb, x[0] - nb]), np.vstack([c1, c2]))

    def trace(self, x):
        return 2.0 * float(self._check(x)[0])

    def sample(self, rng, count):
        z = rng.standard_normal((count, self.dim))
        z[:, 0] = np.linalg.norm(z[:, 1:], axis=1) * (1.0 + np.abs(rng.standard_normal(count)))
        return z

    sample_dual = sample


def svec(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    k = X.shape[0]
    iu = np.triu_indices(k)
    scale = np.where(iu[0] == iu[1], 1.0, math.sqrt(2.0))
    return X[iu] * scale


def smat(x, k: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    iu = np.triu_indices(k)
    scale = np.where(iu[0] == iu[1], 1.0, 1.0 / math.sqrt(2.0))
    X = np.zeros((k, k))
    X[iu] = x * scale
    return X + np.triu(X, 1).T


class Psd(JordanCone):
    """k-by-k PSD matrices in ``svec`` coordinates (n = k(k+1)/2), rank k."""

    def __init__(self, k: int):
        if k < 1:
            raise ValueError("matrix order must be positive")
        self.k = self.rank = int(k)
        self.dim = self.k * (self.k + 1) // 2

    def __repr__(self):
        return f"Psd({self.k})"

    def product(self, x, y):
        X, Y = smat(x, self.k), smat(y, self.k)
        return svec(0.5 * (X @ Y + Y @ X))

    def identity(self):
        return svec(np.eye(self.k))

    def spectral(self, x):
        w, Q = np.linalg.eigh(smat(self._check(x), self.k))
        w, Q = w[::-1], Q[:, ::-1]
        frame = np.vstack([svec(np.outer(Q[:, i], Q[:, i])) for i in range(self.k)])
        return SpectralDecomposition(w, frame)

    def eigenvalues(self, x):
        return np.linalg.eigvalsh(smat(self._check(x), self.k))[::-1]

    def trace(self, x):
        return float(np.trace(smat(self._check(x), self.k)))

    def automorphism_to_identity(self, x0, tol: float = 1e-12):
        X0 = smat(self._check(x0), self.k)
        w, Q = np.linalg.eigh(X0)
        if w.min() <= tol:
            raise NotInterior(f"lambda_min(X0) = {w.min():.3e} is not positive")
        S = (Q / np.sqrt(w)) @ Q.T
        eye = np.eye(self.dim)
        return np.column_stack([svec(S @ smat(eye[j], self.k) @ S) for j in range(self.dim)])

    def sample(self, rng, count):
        out = np.empty((count, self.dim))
        for i in range(count):
            G = rng.standard_normal((self.k, self.k))
            out[i] = svec(G @ G.T)
        return out

    sample_dual = sample


class Product(JordanCone):
    def __init__(self, blocks: Sequence[JordanCone]):
        if not blocks:
            raise ValueError("product cone needs at least one block")
        for b in blocks:
            if not isinstance(b, JordanCone):
                raise TypeError("product blocks must be Jordan cones")
        self.blocks = list(blocks)
        self.offsets = np.cumsum([0] + [b.dim for b in self.blocks])
        self.dim = int(self.offsets[-1])
        self.rank = sum(b.rank for b in self.blocks)

    def __repr__(self):
        return f"Product({self.blocks!r})"

    def is_orthant(self) -> bool:
        return all(b.is_orthant() for b in self.blocks)

    def _split(self, x):
        return [x[self.offsets[i]:self.offsets[i + 1]] for i in range(len(self.blocks))]

    def product(self, x, y):
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        return np.concatenate([b.product(a, c) for b, a, c in zip(self.blocks, self._split(x), self._split(y))])

    def identity(self):
        return np.concatenate([b.identity() for b in self.blocks])

    def frame_weights(self):
        return np.concatenate([b.frame_weights() for b in self.blocks])

    def spectral(self, x):
        x = self._check(x)
        vals, rows = [], []
        for i, (b, xb) in enumerate(zip(self.blocks, self._split(x))):
            sd = b.spectral(xb)
            vals.append(sd.eigenvalues)
            pad = np.zeros((b.rank, self.dim))
            pad[:, self.offsets[i]:self.offsets[i + 1]] = sd.frame
            rows.append(pad)
        return SpectralDecomposition(np.concatenate(vals), np.vstack(rows))

    def trace(self, x):
        return sum(b.trace(xb) for b, xb in zip(self.blocks, self._split(self._check(x))))

    def automorphism_to_identity(self, x0, tol: float = 1e-12):
        x0 = self._check(x0)
        P = np.zeros((self.dim, self.dim))
        for i, (b, xb) in enumerate(zip(self.blocks, self._split(x0))):
            s = slice(self.offsets[i], self.offsets[i + 1])
            P[s, s] = b.automorphism_to_identity(xb, tol)
        return P

    def sample(self, rng, count):
        return np.hstack([b.sample(rng, count) for b in self.blocks])

    sample_dual = sample


# ---------------------------------------------------------------------------
# planar polyhedral wedge


class Polyhedral2D(Cone):
    """``{x in R^2 : cos(phi) x2 >= sin(phi) |x1|}``: half-angle ``phi`` about the x2 axis.

    Its dual is the wedge of half-angle ``pi/2 - phi``.  Not self-dual unless
    ``phi = pi/4``.
    """

    dim = 2

    def __init__(self, phi: float):
        if not 0.0 < phi < math.pi / 2:
            raise ValueError("half-angle must lie in (0, pi/2)")
        self.phi = float(phi)

    def __repr__(self):
        return f"Polyhedral2D({self.phi!r})"

    @property
    def self_dual(self):
        return abs(self.phi - math.pi / 4) < 1e-15

    def facet_normals(self) -> np.ndarray:
        """Rows ``g`` with ``K = {x : g.x >= 0}``."""
        s, c = math.sin(self.phi), math.cos(self.phi)
        return np.array([[c, s], [-c, s]])

    def generators(self) -> np.ndarray:
        s, c = math.sin(self.phi), math.cos(self.phi)
        return np.array([[s, c], [-s, c]])

    def dual(self) -> "Polyhedral2D":
        return Polyhedral2D(math.pi / 2 - self.phi)

    def contains(self, x, tol: float = 0.0):
        return bool(np.all(self.facet_normals() @ self._check(x) >= -tol))

    def dual_contains(self, u, tol: float = 0.0):
        return self.dual().contains(u, tol)

    def identity(self):
        return np.array([0.0, 1.0])

    def lambda_v(self, x, v):
        x, v = self._check(x), self._check(v)
        if not self.contains(v, 1e-12) or np.allclose(v, 0.0):
            raise VNotInCone("v must be a nonzero element of the wedge")
        return _polyhedral_lambda_v(self.facet_normals(), x, v)

    def project(self, x):
        return _project_planar_wedge(self._check(x), self.phi)

    def project_dual(self, u):
        return _project_planar_wedge(self._check(u), math.pi / 2 - self.phi)

    def sample(self, rng, count):
        ang = rng.uniform(-self.phi, self.phi, count)
        return np.column_stack([np.sin(ang), np.cos(ang)])

    def sample_dual(self, rng, count):
        return self.dual().sample(rng, count)


def _project_planar_wedge(x, phi):
    if np.all(Polyhedral2D(phi).facet_normals() @ x >= 0):
        return x.copy()
    best = np.zeros(2)
    for g in Polyhedral2D(phi).generators():
        t = max(0.0, float(g @ x))
        if np.linalg.norm(x - t * g) < np.linalg.norm(x - best):
            best = t * g
    return best


def _polyhedral_lambda_v(G, x, v) -> float:
    """``max{t : G (x - t v) >= 0}`` in closed form, ``-inf`` if empty."""
    gx, gv = G @ x, G @ v
    tol = 1e-12 * max(1.0, np.abs(gv).max())
    pos, neg, zero = gv > tol, gv < -tol, np.abs(gv) <= tol
    if np.any(gx[zero] < -1e-12 * max(1.0, np.abs(gx).max())):
        return -math.inf
    upper = np.min(gx[pos] / gv[pos]) if pos.any() else math.inf
    lower = np.max(gx[neg] / gv[neg]) if neg.any() else -math.inf
    if lower > upper + 1e-12 * max(1.0, abs(upper)):
        return -math.inf
    return float(upper)
