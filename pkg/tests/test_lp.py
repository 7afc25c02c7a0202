import numpy as np
import pytest

from conicond.errors import DimensionTooLarge, UnboundedPolytope
from conicond.lp import LpProblem, enumerate_vertices, solve_lp


def test_simple_max():
    sol = solve_lp(LpProblem([1, 1], A_ub=[[1, 1]], b_ub=[1], sense="max"))
    assert sol.optimal and sol.value == pytest.approx(1.0)


def test_infeasible_has_farkas_ray():
    # x <= -1 with x >= 0
    p = LpProblem([0.0], A_ub=[[1.0]], b_ub=[-1.0])
    sol = solve_lp(p)
    assert sol.status == "Infeasible"
    f = sol.farkas
    assert f is not None
    combo = p.A_eq.T @ f["y_eq"] + p.A_ub.T @ f["y_ub"] - f["z_lo"] + f["z_hi"]
    assert np.allclose(combo, 0, atol=1e-9)
    assert np.all(f["y_ub"] >= -1e-12) and f["gap"] < 0


def test_point_of_subspace_in_simplex():
    # x = c (1,1,0), x >= 0, sum x = 1
    A_eq = np.array([[1, 0, 0, -1], [0, 1, 0, -1], [0, 0, 1, 0], [1, 1, 1, 0]], float)
    sol = solve_lp(LpProblem(np.zeros(4), A_eq=A_eq, b_eq=[0, 0, 0, 1],
                             lower=[0, 0, 0, -np.inf], upper=np.inf))
    assert sol.optimal and np.allclose(sol.x[:3], [0.5, 0.5, 0])


def test_duality_gap_and_slackness(rng):
    for _ in range(20):
        A = rng.uniform(0.1, 1.0, (4, 3))
        b = rng.uniform(1.0, 2.0, 4)
        c = rng.uniform(0.1, 1.0, 3)
        sol = solve_lp(LpProblem(c, A_ub=A, b_ub=b, sense="max"))
        assert sol.optimal
        assert np.all(A @ sol.x <= b + 1e-9)
        assert b @ sol.y_ub == pytest.approx(sol.value, abs=1e-8 * (1 + abs(sol.value)))
        assert abs(sol.y_ub @ (b - A @ sol.x)) <= 1e-8


def test_square_and_cross_polytope_vertices():
    sq = enumerate_vertices(np.vstack([np.eye(2), -np.eye(2)]), np.ones(4))
    assert sorted(map(tuple, np.round(sq, 12))) == [(-1, -1), (-1, 1), (1, -1), (1, 1)]
    signs = np.array([[1, 1], [1, -1], [-1, 1], [-1, -1]], float)
    cp = enumerate_vertices(signs, np.ones(4))
    assert sorted(map(tuple, np.round(cp, 12))) == [(-1, 0), (0, -1), (0, 1), (1, 0)]


def test_segment_on_a_line():
    # chart t -> t (2,1)/sqrt(5); |2t| + |t| <= sqrt(5)
    d = np.array([2.0, 1.0]) / np.sqrt(5)
    G = np.array([[s1 * d[0] + s2 * d[1]] for s1 in (1, -1) for s2 in (1, -1)])
    V = enumerate_vertices(G, np.ones(4))
    pts = sorted(tuple(np.round(v * d, 12)) for v in V)
    assert np.allclose(pts, [(-2 / 3, -1 / 3), (2 / 3, 1 / 3)])


def test_errors():
    with pytest.raises(UnboundedPolytope):
        enumerate_vertices(np.array([[1.0, 0.0]]), np.ones(1))
    with pytest.raises(DimensionTooLarge):
        enumerate_vertices(np.eye(11), np.ones(11))
