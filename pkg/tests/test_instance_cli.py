import io
import json
import math

import numpy as np
import pytest

from conicond.cli import run
from conicond.cones import Orthant, Polyhedral2D, Product, SecondOrder
from conicond.errors import ValidationError
from conicond.instance import dumps, generate, loads, parse_instance

BASE = {"version": 1, "n": 3, "cone": {"type": "orthant"}, "subspace": {"basis": [[1, 1, 0]]},
        "norms": {"primal": "l2", "tri": "l2"}}


def call(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, out, err)
    return code, out.getvalue(), err.getvalue()


def write(tmp_path, data, name="inst.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return str(p)


# ---------------------------------------------------------------------------
# instances


def test_parse_basics():
    inst = parse_instance(BASE)
    assert inst.n == 3 and isinstance(inst.cone, Orthant) and inst.subspace.dim == 1
    assert loads(inst.dumps()).subspace == inst.subspace


def test_parse_cones():
    d = dict(BASE, n=5, cone={"type": "product", "blocks": [{"type": "orthant", "n": 2}, {"type": "soc", "n": 3}]},
             subspace={"basis": [[1, 1, 1, 0, 0]]})
    K = parse_instance(d).cone
    assert isinstance(K, Product) and isinstance(K.blocks[1], SecondOrder)
    d = dict(BASE, n=2, cone={"type": "polyhedral2d", "phi": 0.5}, subspace={"basis": [[0, 1]]})
    assert isinstance(parse_instance(d).cone, Polyhedral2D)


def test_subspace_forms_agree():
    a = parse_instance(dict(BASE, subspace={"image_of": [[1], [1], [0]]})).subspace
    b = parse_instance(dict(BASE, subspace={"kernel_of": [[1, -1, 0], [0, 0, 1]]})).subspace
    assert a == b == parse_instance(BASE).subspace


@pytest.mark.parametrize("patch,field", [
    ({"version": 2}, "version"),
    ({"n": 0}, "n"),
    ({"cone": {"type": "cube"}}, "cone.type"),
    ({"cone": {"type": "soc"}, "n": 1}, "cone.n"),
    ({"norms": {"primal": "l3", "tri": "l2"}}, "norms.primal"),
    ({"subspace": {"basis": [[1, 1]]}}, "subspace.basis"),
    ({"subspace": {"basis": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]}}, "subspace"),
    ({"subspace": {"basis": [[1, 1, 0]], "kernel_of": [[1, 0, 0]]}}, "subspace"),
    ({"extra": 1}, "instance"),
    ({"map": {"matrix": [[1, 2], [2, 4], [0, 0]]}}, "map.matrix"),
])
def test_validation_errors_name_the_field(patch, field):
    with pytest.raises(ValidationError) as e:
        parse_instance(dict(BASE, **patch))
    assert str(e.value).startswith(field)


def test_induced_norm_needs_jordan_cone():
    d = dict(BASE, n=2, cone={"type": "polyhedral2d", "phi": 0.5}, subspace={"basis": [[0, 1]]},
             norms={"primal": "induced_e", "tri": "l2"})
    with pytest.raises(ValidationError):
        parse_instance(d)


def test_generate_is_deterministic_and_sided():
    for side in ("feasible", "infeasible"):
        a = dumps(generate(11, 5, 2, "orthant", ("l2", "l2"), side))
        assert a == dumps(generate(11, 5, 2, "orthant", ("l2", "l2"), side))
    inst = parse_instance(generate(3, 6, 2, "psd"))
    assert inst.cone.k == 3
    with pytest.raises(ValidationError):
        generate(3, 5, 2, "psd")


# ---------------------------------------------------------------------------
# command line


def test_gen_and_measure(tmp_path):
    out = tmp_path / "g.json"
    code, _, _ = call(["gen", "--seed", "4", "--n", "4", "--m", "2", "--side", "feasible", "--out", str(out)])
    assert code == 0
    code, text, _ = call(["measure", str(out), "--json"])
    assert code == 0
    env = json.loads(text)
    assert set(env) == {"command", "inputs_digest", "results", "seed"}
    for name in ("nu", "nu_bar", "sigma"):
        assert {"value", "path", "residual"} <= set(env["results"][name])
    assert env["results"]["nu"]["value"] > 0


def test_output_is_reproducible(tmp_path):
    p = write(tmp_path, BASE)
    a = call(["measure", p, "--json", "--seed", "1"])[1]
    assert a == call(["measure", p, "--json", "--seed", "1"])[1]


def test_text_output(tmp_path):
    code, text, _ = call(["measure", write(tmp_path, BASE)])
    assert code == 0 and "nu:" in text and "  value: " in text


def test_asymmetric_distances(tmp_path):
    d = dict(BASE, n=2, subspace={"basis": [[1, 0]]}, other_subspace={"basis": [[1, 1]]},
             norms={"primal": "l1", "tri": "l1"})
    code, text, _ = call(["dist", write(tmp_path, d), "--json"])
    r = json.loads(text)["results"]
    assert code == 0
    assert r["dist_12"]["value"] == pytest.approx(1.0) and r["dist_21"]["value"] == pytest.approx(0.5)
    assert r["odist_12"]["value"] == pytest.approx(0.5) and r["odist_21"]["value"] == pytest.approx(1.0)


def test_partition_command_is_one_based(tmp_path):
    code, text, _ = call(["partition", write(tmp_path, BASE), "--json"])
    r = json.loads(text)["results"]
    assert code == 0 and r["partition"]["value"] == {"B": [1, 2], "N": [3]}


def test_other_commands(tmp_path):
    d = generate(2, 4, 2, "orthant", ("l2", "l2"), "feasible", with_map=True)
    p = write(tmp_path, d)
    for cmd in ("renegar", "precondition", "certify", "oracle"):
        code, text, err = call([cmd, p, "--json", "--budget", "20"])
        assert code == 0, err
        assert json.loads(text)["command"] == cmd


def test_exit_codes(tmp_path):
    assert call(["measure", str(tmp_path / "missing.json")])[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert call(["measure", str(bad)])[0] == 2
    assert call(["dist", write(tmp_path, BASE)])[0] == 2
    # ill-posed: span(1, 0) touches the orthant only on its boundary
    ill = dict(BASE, n=2, subspace={"basis": [[1, 0]]})
    code, _, err = call(["certify", write(tmp_path, ill, "ill.json")])
    assert code == 3 and "IllPosed" in err
