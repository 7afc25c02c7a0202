"""JSON instance files: a cone, a subspace, a norm pair and optionally a map.

Example::

    {"version": 1, "n": 3,
     "cone": {"type": "orthant"},
     "subspace": {"basis": [[1, 1, 0]]},
     "norms": {"primal": "l1", "tri": "linf"}}

``subspace`` holds exactly one of ``basis`` (rows span the subspace),
``image_of`` (an n x m matrix) or ``kernel_of`` (a k x n matrix).
``map`` is ``{"matrix": n x m, "domain_norm": tag}``; when present the
subspace may be omitted and defaults to the image of the map.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np

from .cones import Cone, Orthant, Polyhedral2D, Product, Psd, SecondOrder
from .errors import ConicondError, ValidationError
from .linalg import Subspace, image, kernel
from .measures import NormPair
from .norms import NormSpec
from .renegar import LinearMap

VERSION = 1
TOP_FIELDS = {"version", "n", "cone", "subspace", "norms", "map", "other_subspace"}
NORM_TAGS = ("l1", "l2", "linf", "induced_e", "induced_e_dual")


def _fail(field: str, msg: str):
    raise ValidationError(f"{field}: {msg}")


def _only(obj, allowed, field):
    if not isinstance(obj, dict):
        _fail(field, "expected an object")
    extra = sorted(set(obj) - set(allowed))
    if extra:
        _fail(field, f"unknown field(s) {', '.join(extra)}")


def _int(obj, key, field, lo=1):
    v = obj.get(key)
    if isinstance(v, bool) or not isinstance(v, int) or v < lo:
        _fail(f"{field}.{key}" if field else key, f"expected an integer >= {lo}, got {v!r}")
    return v


def _matrix(v, field, cols: Optional[int] = None) -> np.ndarray:
    try:
        M = np.array(v, dtype=float)
    except (TypeError, ValueError):
        _fail(field, "expected a numeric matrix")
    if M.ndim != 2 or M.size == 0:
        _fail(field, "expected a nonempty list of equal-length rows")
    if not np.all(np.isfinite(M)):
        _fail(field, "entries must be finite")
    if cols is not None and M.shape[1] != cols:
        _fail(field, f"rows must have length {cols}, got {M.shape[1]}")
    return M


# ---------------------------------------------------------------------------
# cones


def parse_cone(spec, n: Optional[int], field: str = "cone") -> Cone:
    """Cone from its tag.  ``n`` is the ambient dimension when known."""
    if not isinstance(spec, dict) or "type" not in spec:
        _fail(field, "expected an object with a 'type'")
    kind = spec["type"]
    if kind == "orthant" or kind == "soc":
        _only(spec, {"type", "n"}, field)
        d = spec["n"] if "n" in spec else n
        if d is None:
            _fail(f"{field}.n", "dimension required inside a product")
        d = _int({"n": d}, "n", field, lo=1 if kind == "orthant" else 2)
        cone = Orthant(d) if kind == "orthant" else SecondOrder(d)
    elif kind == "psd":
        _only(spec, {"type", "k"}, field)
        cone = Psd(_int(spec, "k", field))
    elif kind == "product":
        _only(spec, {"type", "blocks"}, field)
        blocks = spec.get("blocks")
        if not isinstance(blocks, list) or not blocks:
            _fail(f"{field}.blocks", "expected a nonempty list")
        cone = Product([parse_cone(b, None, f"{field}.blocks[{i}]") for i, b in enumerate(blocks)])
    elif kind == "polyhedral2d":
        _only(spec, {"type", "phi"}, field)
        phi = spec.get("phi")
        if isinstance(phi, bool) or not isinstance(phi, (int, float)) or not 0 < phi < math.pi / 2:
            _fail(f"{field}.phi", "expected a half-angle in (0, pi/2)")
        cone = Polyhedral2D(float(phi))
    else:
        _fail(f"{field}.type", f"unknown cone {kind!r}")
    if n is not None and cone.dim != n:
        _fail(field, f"cone dimension {cone.dim} does not match n = {n}")
    return cone


def cone_to_json(K: Cone, top: bool = True) -> dict:
    if isinstance(K, Orthant):
        return {"type": "orthant"} if top else {"type": "orthant", "n": K.dim}
    if isinstance(K, SecondOrder):
        return {"type": "soc"} if top else {"type": "soc", "n": K.dim}
    if isinstance(K, Psd):
        return {"type": "psd", "k": K.k}
    if isinstance(K, Product):
        return {"type": "product", "blocks": [cone_to_json(b, False) for b in K.blocks]}
    if isinstance(K, Polyhedral2D):
        return {"type": "polyhedral2d", "phi": K.phi}
    raise ValidationError(f"cone: cannot serialize {K!r}")


# ---------------------------------------------------------------------------
# subspaces and norms


def parse_subspace(spec, n: int, field: str = "subspace") -> Subspace:
    _only(spec, {"basis", "image_of", "kernel_of"}, field)
    if len(spec) != 1:
        _fail(field, "give exactly one of basis, image_of, kernel_of")
    (key, val), = spec.items()
    if key == "basis":
        S = image(_matrix(val, f"{field}.basis", n).T)
    elif key == "image_of":
        M = _matrix(val, f"{field}.image_of")
        if M.shape[0] != n:
            _fail(f"{field}.image_of", f"expected {n} rows, got {M.shape[0]}")
        S = image(M)
    else:
        S = kernel(_matrix(val, f"{field}.kernel_of", n))
    if S is None or S.dim == n:
        _fail(field, "subspace must have dimension strictly between 0 and n")
    return Subspace(S.basis)


def parse_norms(spec, K: Cone, field: str = "norms") -> NormPair:
    _only(spec, {"primal", "tri"}, field)
    out = []
    for key in ("primal", "tri"):
        tag = spec.get(key)
        if tag not in NORM_TAGS:
            _fail(f"{field}.{key}", f"expected one of {', '.join(NORM_TAGS)}, got {tag!r}")
        try:
            s = NormSpec.parse(tag, K)
            s.canonical()
        except ConicondError as exc:
            _fail(f"{field}.{key}", str(exc))
        out.append(s)
    return NormPair(*out)


def _tag(spec: NormSpec) -> str:
    return {"L1": "l1", "L2": "l2", "LInf": "linf", "InducedE": "induced_e", "InducedEDual": "induced_e_dual"}[spec.kind]


# ---------------------------------------------------------------------------
# instances


@dataclass
class Instance:
    n: int
    cone: Cone
    subspace: Subspace
    norms: NormPair
    map: Optional[LinearMap] = None
    other_subspace: Optional[Subspace] = None
    data: Optional[Dict[str, Any]] = None

    def to_json(self) -> dict:
        if self.data is not None:
            return self.data
        out = {"version": VERSION, "n": self.n, "cone": cone_to_json(self.cone),
               "subspace": {"basis": self.subspace.basis.T.tolist()},
               "norms": {"primal": _tag(self.norms.primal), "tri": _tag(self.norms.tri)}}
        if self.map is not None:
            out["map"] = {"matrix": self.map.matrix.tolist(), "domain_norm": _tag(self.map.domain_norm)}
        if self.other_subspace is not None:
            out["other_subspace"] = {"basis": self.other_subspace.basis.T.tolist()}
        return out

    def dumps(self) -> str:
        return dumps(self.to_json())

    def digest(self) -> str:
        return hashlib.sha256(self.dumps().encode()).hexdigest()


def dumps(data: dict) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def parse_instance(data) -> Instance:
    _only(data, TOP_FIELDS, "instance")
    if data.get("version") != VERSION:
        _fail("version", f"expected {VERSION}, got {data.get('version')!r}")
    n = _int(data, "n", "")
    if "cone" not in data:
        _fail("cone", "missing")
    K = parse_cone(data["cone"], n)
    if "norms" not in data:
        _fail("norms", "missing")
    np_ = parse_norms(data["norms"], K)
    A = None
    if "map" in data:
        spec = data["map"]
        _only(spec, {"matrix", "domain_norm"}, "map")
        M = _matrix(spec.get("matrix"), "map.matrix")
        if M.shape[0] != n:
            _fail("map.matrix", f"expected {n} rows, got {M.shape[0]}")
        tag = spec.get("domain_norm", "l2")
        if tag not in ("l1", "l2", "linf"):
            _fail("map.domain_norm", f"expected l1, l2 or linf, got {tag!r}")
        A = LinearMap(M, NormSpec.parse(tag), np_)
        if M.shape[1] >= n or not A.is_injective():
            _fail("map.matrix", "the map must be injective with fewer columns than rows")
    if "subspace" in data:
        L = parse_subspace(data["subspace"], n)
    elif A is not None:
        L = A.image()
    else:
        _fail("subspace", "missing (and no map to take the image of)")
    other = parse_subspace(data["other_subspace"], n, "other_subspace") if "other_subspace" in data else None
    return Instance(n, K, L, np_, A, other, json.loads(json.dumps(data)))


def loads(text: str) -> Instance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"instance: not valid JSON ({exc})") from exc
    return parse_instance(data)


def load(path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


# ---------------------------------------------------------------------------
# generation


def _rounded(M) -> list:
    return np.round(np.asarray(M, float), 12).tolist()


def generate(seed: int, n: int, m: int, cone: str = "orthant", norms=("l2", "l2"), side: str = "any",
             with_map: bool = False) -> dict:
    """A random instance as JSON data; same arguments give the same bytes.

    ``side="feasible"`` plants a point of ``int K`` in the subspace and
    ``side="infeasible"`` plants one of ``int K*`` in its complement.
    """
    if not 0 < m < n:
        raise ValidationError(f"m: need 0 < m < n, got m={m}, n={n}")
    if cone == "psd":
        k = int(round((math.sqrt(8 * n + 1) - 1) / 2))
        if k * (k + 1) // 2 != n:
            raise ValidationError(f"n: {n} is not k(k+1)/2 for any k")
        cspec = {"type": "psd", "k": k}
    elif cone in ("orthant", "soc"):
        cspec = {"type": cone}
    else:
        raise ValidationError(f"cone: gen supports orthant, soc and psd, not {cone!r}")
    K = parse_cone(cspec, n)
    rng = np.random.default_rng(seed)
    B = rng.standard_normal((n, m))
    if side == "feasible":
        B[:, 0] = K.identity() + 0.3 * rng.standard_normal(n) / math.sqrt(n)
    elif side == "infeasible":
        e = K.identity()
        B -= np.outer(e, e @ B) / float(e @ e)
    elif side != "any":
        raise ValidationError(f"side: expected feasible, infeasible or any, got {side!r}")
    data = {"version": VERSION, "n": n, "cone": cspec, "norms": {"primal": norms[0], "tri": norms[1]}}
    if with_map:
        data["map"] = {"matrix": _rounded(B), "domain_norm": "l2"}
    else:
        data["subspace"] = {"image_of": _rounded(B)}
    parse_instance(data)
    return data
