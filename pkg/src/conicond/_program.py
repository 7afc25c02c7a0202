"""A tiny modelling layer over :mod:`conicond.lp` and cvxpy.

Measures state their convex subproblems once, in terms of named variable
blocks, linear rows, norm balls and cone memberships.  If every piece is
polyhedral the program is assembled as a dense LP; otherwise it goes to
cvxpy.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Tuple

import numpy as np

from .cones import Cone, JordanCone, Orthant, Polyhedral2D, Product, Psd, SecondOrder
from .errors import NumericalFailure
from .lp import INFEASIBLE, UNBOUNDED, LpProblem, solve_lp
from .norms import L1, L2, LINF, NormSpec, cvx_norm, solve_cvx

Terms = Dict[str, np.ndarray]


def cone_is_polyhedral(cone: Cone) -> bool:
    return cone.is_orthant() or isinstance(cone, Polyhedral2D)


def facet_matrix(cone: Cone) -> np.ndarray:
    """Rows ``g`` with ``K = {x : G x >= 0}`` for polyhedral cones."""
    if cone.is_orthant():
        return np.eye(cone.dim)
    if isinstance(cone, Polyhedral2D):
        return cone.facet_normals()
    raise TypeError(f"{cone!r} is not polyhedral")


def dual_facet_matrix(cone: Cone) -> np.ndarray:
    if cone.is_orthant():
        return np.eye(cone.dim)
    if isinstance(cone, Polyhedral2D):
        return cone.dual().facet_normals()
    raise TypeError(f"{cone!r} is not polyhedral")


class Program:
    def __init__(self):
        self.sizes: Dict[str, int] = {}
        self.lower: Dict[str, np.ndarray] = {}
        self.upper: Dict[str, np.ndarray] = {}
        self.eqs: List[Tuple[Terms, np.ndarray]] = []
        self.les: List[Tuple[Terms, np.ndarray]] = []
        self.norms: List[Tuple[Terms, np.ndarray, NormSpec, object]] = []
        self.cones: List[Tuple[str, Cone, bool]] = []
        self.objective: Terms = {}
        self.sense = "min"
        self._aux = 0

    def var(self, name: str, size: int, lower=-np.inf, upper=np.inf) -> str:
        self.sizes[name] = int(size)
        self.lower[name] = np.broadcast_to(np.asarray(lower, dtype=float), (size,)).copy()
        self.upper[name] = np.broadcast_to(np.asarray(upper, dtype=float), (size,)).copy()
        return name

    def eq(self, terms: Terms, rhs):
        self.eqs.append((_norm_terms(terms), np.atleast_1d(np.asarray(rhs, dtype=float))))

    def le(self, terms: Terms, rhs):
        self.les.append((_norm_terms(terms), np.atleast_1d(np.asarray(rhs, dtype=float))))

    def norm_le(self, terms: Terms, const, spec: NormSpec, bound):
        """``||sum_i M_i z_i + const|| <= bound``; ``bound`` is a float or a scalar variable name."""
        self.norms.append((_norm_terms(terms), np.asarray(const, dtype=float), spec, bound))

    def in_cone(self, name: str, cone: Cone, dual: bool = False):
        self.cones.append((name, cone, dual))

    def minimize(self, terms: Terms):
        self.objective, self.sense = _norm_terms(terms), "min"

    def maximize(self, terms: Terms):
        self.objective, self.sense = _norm_terms(terms), "max"

    # ------------------------------------------------------------------
    def is_lp(self) -> bool:
        if any(not spec.is_polyhedral for _, _, spec, _ in self.norms):
            return False
        return all(cone_is_polyhedral(c) for _, c, _ in self.cones)

    def solve(self) -> Tuple[str, Optional[float], Optional[Dict[str, np.ndarray]]]:
        """Return ``(status, value, values_by_name)``."""
        return self._solve_lp() if self.is_lp() else self._solve_cvx()

    # ------------------------------------------------------------------
    def _solve_lp(self):
        sizes = dict(self.sizes)
        lower, upper = dict(self.lower), dict(self.upper)
        eqs, les = list(self.eqs), list(self.les)
        for name, cone, dual in self.cones:
            G = dual_facet_matrix(cone) if dual else facet_matrix(cone)
            if cone.is_orthant():
                lower[name] = np.maximum(lower[name], 0.0)
            else:
                les.append(({name: -G}, np.zeros(G.shape[0])))
        for k, (terms, const, spec, bound) in enumerate(self.norms):
            kind = spec.canonical().kind
            rows = const.size
            bterms = {bound: -np.ones((rows, 1))} if isinstance(bound, str) else {}
            brhs = 0.0 if isinstance(bound, str) else float(bound)
            if kind == LINF:
                les.append(({**terms, **bterms}, -const + brhs))
                les.append(({**{n: -M for n, M in terms.items()}, **bterms}, const + brhs))
            else:
                s = f"__s{k}"
                sizes[s] = rows
                lower[s], upper[s] = np.zeros(rows), np.full(rows, np.inf)
                I = np.eye(rows)
                les.append(({**terms, s: -I}, -const))
                les.append(({**{n: -M for n, M in terms.items()}, s: -I}, const))
                sb = {s: np.ones((1, rows))}
                if isinstance(bound, str):
                    sb[bound] = -np.ones((1, 1))
                les.append((sb, np.array([brhs])))
        names = list(sizes)
        off = {}
        pos = 0
        for n in names:
            off[n] = pos
            pos += sizes[n]

        def assemble(rows):
            if not rows:
                return None, None
            A = np.zeros((sum(r.size for _, r in rows), pos))
            b = np.concatenate([r for _, r in rows])
            i = 0
            for terms, rhs in rows:
                for n, M in terms.items():
                    A[i:i + rhs.size, off[n]:off[n] + sizes[n]] += M
                i += rhs.size
            return A, b

        A_eq, b_eq = assemble(eqs)
        A_ub, b_ub = assemble(les)
        c = np.zeros(pos)
        for n, M in self.objective.items():
            c[off[n]:off[n] + sizes[n]] += np.asarray(M).ravel()
        lo = np.concatenate([lower[n] for n in names])
        hi = np.concatenate([upper[n] for n in names])
        sol = solve_lp(LpProblem(c, A_eq, b_eq, A_ub, b_ub, lo, hi, sense=self.sense))
        if sol.status in (INFEASIBLE, UNBOUNDED):
            return sol.status, None, None
        vals = {n: sol.x[off[n]:off[n] + sizes[n]] for n in self.sizes}
        return "Optimal", sol.value, vals

    def _solve_cvx(self):
        import cvxpy as cp

        v = {n: cp.Variable(s) for n, s in self.sizes.items()}
        cons = []
        for n in self.sizes:
            lo, hi = self.lower[n], self.upper[n]
            if np.any(np.isfinite(lo)):
                idx = np.flatnonzero(np.isfinite(lo))
                cons.append(v[n][idx] >= lo[idx])
            if np.any(np.isfinite(hi)):
                idx = np.flatnonzero(np.isfinite(hi))
                cons.append(v[n][idx] <= hi[idx])

        def expr(terms):
            return sum(M @ v[n] for n, M in terms.items())

        for terms, rhs in self.eqs:
            cons.append(expr(terms) == rhs)
        for terms, rhs in self.les:
            cons.append(expr(terms) <= rhs)
        for terms, const, spec, bound in self.norms:
            b = v[bound][0] if isinstance(bound, str) else float(bound)
            cons.append(cvx_norm(spec, expr(terms) + const) <= b)
        for name, cone, dual in self.cones:
            cons.extend(cvx_cone_constraints(cone.dual() if dual and isinstance(cone, Polyhedral2D) else cone, v[name]))
        obj = sum(np.asarray(M).ravel() @ v[n] for n, M in self.objective.items()) if self.objective else 0
        prob = cp.Problem(cp.Minimize(obj) if self.sense == "min" else cp.Maximize(obj), cons)
        try:
            solve_cvx(prob)
        except NumericalFailure:
            if prob.status in (cp.INFEASIBLE, cp.INFEASIBLE_INACCURATE):
                return INFEASIBLE, None, None
            if prob.status in (cp.UNBOUNDED, cp.UNBOUNDED_INACCURATE):
                return UNBOUNDED, None, None
            raise
        vals = {n: np.asarray(var.value, dtype=float).ravel() for n, var in v.items()}
        return "Optimal", float(prob.value), vals


def cvx_cone_constraints(cone: Cone, x) -> list:
    import cvxpy as cp

    from .norms import _cvx_smat

    if isinstance(cone, Orthant):
        return [x >= 0]
    if isinstance(cone, SecondOrder):
        return [cp.SOC(x[0], x[1:])]
    if isinstance(cone, Psd):
        X = _cvx_smat(x, cone.k)
        return [0.5 * (X + X.T) >> 0]
    if isinstance(cone, Product):
        out = []
        for i, b in enumerate(cone.blocks):
            out.extend(cvx_cone_constraints(b, x[cone.offsets[i]:cone.offsets[i + 1]]))
        return out
    if isinstance(cone, Polyhedral2D):
        return [cone.facet_normals() @ x >= 0]
    raise TypeError(f"unsupported cone {cone!r}")


def _norm_terms(terms: Terms) -> Terms:
    out = {}
    for n, M in terms.items():
        M = np.asarray(M, dtype=float)
        out[n] = M.reshape(1, -1) if M.ndim == 1 else (M.reshape(1, 1) if M.ndim == 0 else M)
    return out


def minimize_norm(terms: Terms, const, spec: NormSpec, prog: Program):
    """Add ``min ||expr||`` to ``prog`` (an epigraph variable ``__t``) and solve."""
    prog.var("__t", 1, lower=0.0)
    prog.norm_le(terms, const, spec, "__t")
    prog.minimize({"__t": np.ones(1)})
    return prog.solve()


__all__ = ["Program", "minimize_norm", "cone_is_polyhedral", "facet_matrix", "dual_facet_matrix",
           "cvx_cone_constraints", "L1", "L2", "LINF"]
