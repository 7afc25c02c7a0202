import math

import numpy as np
import pytest

from conicond.errors import DegenerateSubspace, DimensionMismatch
from conicond.linalg import (
    Subspace, intersection, min_norm_to_subspace, orth_complement, orthonormal_basis, principal_angles,
    projection_gap,
)
from conicond.norms import NormSpec

from conftest import random_subspace


def test_duplicate_direction_collapses():
    S = orthonormal_basis([[1, 0], [2, 0]])
    assert S.dim == 1
    assert np.allclose(np.abs(S.basis[:, 0]), [1, 0])


def test_normalized_diagonal():
    S = orthonormal_basis([[1, 1]])
    assert np.allclose(np.abs(S.basis[:, 0]), [1 / math.sqrt(2)] * 2)


def test_coordinate_plane_complement():
    C = orth_complement(orthonormal_basis([[1, 0, 0], [0, 1, 0]]))
    assert C.dim == 1 and np.allclose(np.abs(C.basis[:, 0]), [0, 0, 1])


@pytest.mark.parametrize("vectors", [[[0, 0]], [[1, 0], [0, 1]]])
def test_degenerate_spans_rejected(vectors):
    with pytest.raises(DegenerateSubspace):
        orthonormal_basis(vectors)


def test_complement_examples():
    assert orth_complement(orthonormal_basis([[1, 0]])) == orthonormal_basis([[0, 1]])
    assert orth_complement(orthonormal_basis([[1, 1]])) == orthonormal_basis([[1, -1]])


def test_complement_involution(rng):
    S = random_subspace(rng, 6, 2)
    assert orth_complement(orth_complement(S)) == S
    assert np.allclose(S.projector + orth_complement(S).projector, np.eye(6), atol=1e-12)


def test_equality_is_basis_free(rng):
    S = random_subspace(rng, 5, 2)
    Q, _ = np.linalg.qr(rng.standard_normal((2, 2)))
    assert Subspace(S.basis @ Q) == S


def test_principal_angle_examples():
    e1, e2, d = orthonormal_basis([[1, 0]]), orthonormal_basis([[0, 1]]), orthonormal_basis([[1, 1]])
    assert np.allclose(principal_angles(e1, e1), [0.0])
    assert np.allclose(principal_angles(e1, e2), [math.pi / 2])
    assert np.allclose(principal_angles(e1, d), [math.pi / 4])
    assert projection_gap(e1, e1) == pytest.approx(0.0, abs=1e-12)
    assert projection_gap(e1, d) == pytest.approx(math.sin(math.pi / 4), abs=1e-9)


def test_projection_gap_matches_grid_over_unit_circle(rng):
    L1, L2 = random_subspace(rng, 5, 2), random_subspace(rng, 5, 2)
    th = np.linspace(0, math.pi, 200001)
    X = np.column_stack([np.cos(th), np.sin(th)]) @ L1.basis.T
    grid = np.linalg.norm(X - X @ L2.projector, axis=1).max()
    assert projection_gap(L1, L2) == pytest.approx(grid, abs=1e-6)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        principal_angles(orthonormal_basis([[1, 0]]), orthonormal_basis([[1, 0, 0]]))
    with pytest.raises(DimensionMismatch):
        projection_gap(orthonormal_basis([[1, 0, 0]]), orthonormal_basis([[1, 0, 0], [0, 1, 0]]))


def test_min_norm_l2_example():
    c = min_norm_to_subspace(orthonormal_basis([[1, 0]]), [3, 4], NormSpec("L2"))
    assert c.value == pytest.approx(4.0)
    assert np.allclose(c.minimizer, [3, 0]) and np.allclose(c.dual, [0, 1])


def test_min_norm_l1_example_against_scan():
    c = min_norm_to_subspace(orthonormal_basis([[1, 0]]), [3, 4], NormSpec("L1"))
    t = np.linspace(-10, 10, 20001)
    scan = (np.abs(3 - t) + 4).min()
    assert c.value == pytest.approx(scan, abs=1e-9)
    assert np.allclose(c.dual, [0, 1]) and np.abs(c.dual).max() == pytest.approx(1.0)


@pytest.mark.parametrize("kind", ["L1", "L2", "LInf"])
def test_min_norm_member_is_zero(rng, kind):
    S = random_subspace(rng, 4, 2)
    p = S.basis @ [1.0, -2.0]
    c = min_norm_to_subspace(S, p, NormSpec(kind))
    assert c.value == pytest.approx(0.0, abs=1e-9)
    assert np.allclose(c.minimizer, p, atol=1e-8)


def test_intersection_of_planes():
    S1 = orthonormal_basis([[1, 0, 0], [0, 1, 0]])
    S2 = orthonormal_basis([[0, 1, 0], [0, 0, 1]])
    assert intersection(S1, S2) == orthonormal_basis([[0, 1, 0]])
    assert intersection(orthonormal_basis([[1, 0, 0]]), orthonormal_basis([[0, 1, 0]])) is None
