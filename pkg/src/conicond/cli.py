"""Command line front end.

    conicond measure instance.json [--json] [--seed S]
    conicond gen --seed 7 --n 4 --m 2 --cone orthant > instance.json

Every command prints ``key: value`` blocks, or with ``--json`` one object
``{command, inputs_digest, results, seed}`` where each result carries
``value``, ``path`` and ``residual``.  Exit status: 0 success, 2 invalid
input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from typing import Dict

import numpy as np

from . import __version__
from .errors import (
    ConicondError, DegenerateSubspace, DimensionMismatch, IllPosedInstance, MissingCone, NotInjective, UnsupportedNorm,
    ValidationError,
)
from .instance import Instance, dumps, generate, load
from .measures import (
    CLOSED_FORM, LP_EXACT, SAMPLED, MeasureCertificate, critical_subspace_feasible,
    critical_subspace_infeasible, dist, nu, nu_bar, odist, sigma, sym,
)
from .measures._common import POSITIVITY_TOL
from .renegar import LinearMap

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3
COMMANDS = ("measure", "dist", "partition", "renegar", "precondition", "certify", "oracle", "gen")
INPUT_ERRORS = (ValidationError, DimensionMismatch, UnsupportedNorm, MissingCone, DegenerateSubspace, NotInjective)


def _result(value, path: str, residual: float = 0.0, certificate=None, **extra) -> dict:
    out = {"value": value, "path": path, "residual": float(residual)}
    if certificate is not None:
        out["certificate"] = certificate
    out.update(extra)
    return out


def _from_cert(c: MeasureCertificate) -> dict:
    d = c.to_dict()
    extra = {k: d[k] for k in ("bracket", "info") if k in d}
    return _result(d["value"], d["path"], d["residual"], d.get("certificate"), **extra)


def _the_map(inst: Instance) -> LinearMap:
    if inst.map is not None:
        return inst.map
    return LinearMap(inst.subspace.basis, norms=inst.norms)


def _exact_or_sampled(flag: bool) -> str:
    return LP_EXACT if flag else SAMPLED


# ---------------------------------------------------------------------------
# commands


def cmd_measure(inst: Instance, args) -> Dict[str, dict]:
    L, K, np_ = inst.subspace, inst.cone, inst.norms
    out = {"nu": _from_cert(nu(L, K, np_, seed=args.seed))}
    out["nu_bar"] = _from_cert(nu_bar(L, K, np_, seed=args.seed))
    out["sigma"] = _from_cert(sigma(L, K, np_, seed=args.seed))
    if out["nu"]["value"] > POSITIVITY_TOL:
        out["sym"] = _from_cert(sym(L, K, np_.primal, seed=args.seed))
    return out


def cmd_dist(inst: Instance, args) -> Dict[str, dict]:
    if inst.other_subspace is None:
        raise ValidationError("other_subspace: required by the dist command")
    L1, L2, np_ = inst.subspace, inst.other_subspace, inst.norms
    return {
        "dist_12": _from_cert(dist(L1, L2, np_, seed=args.seed)),
        "dist_21": _from_cert(dist(L2, L1, np_, seed=args.seed)),
        "odist_12": _from_cert(odist(L1, L2, np_, seed=args.seed)),
        "odist_21": _from_cert(odist(L2, L1, np_, seed=args.seed)),
    }


def cmd_partition(inst: Instance, args) -> Dict[str, dict]:
    from .partition import block_decompose, goldman_tucker, partition_measures

    if not inst.cone.is_orthant():
        raise ValidationError("cone: the partition command needs an orthant")
    gt = goldman_tucker(inst.subspace)
    pm = partition_measures(inst.subspace, inst.norms, gt)
    res = float(abs(gt.x_cert @ gt.y_cert))
    out = {"partition": _result({"B": [i + 1 for i in gt.B], "N": [i + 1 for i in gt.N]}, LP_EXACT, res,
                                {"x": gt.x_cert.tolist(), "y": gt.y_cert.tolist()})}
    for name in ("nu_B", "sigma_B", "nu_N", "sigma_N"):
        c = getattr(pm, name)
        if c is not None:
            out[name] = _from_cert(c)
    if inst.map is not None:
        bd = block_decompose(inst.map, gt, budget=args.budget or None, seed=args.seed)
        out["blocks"] = _result(bd.to_dict(), LP_EXACT, bd.reconstruction_residual)
    return out


def cmd_renegar(inst: Instance, args) -> Dict[str, dict]:
    from .renegar import renegar_sandwich

    A = _the_map(inst)
    rep = renegar_sandwich(A, inst.cone, budget=args.budget, seed=args.seed)
    d = rep.to_dict()
    path = _exact_or_sampled(rep.norms.exact)
    out = {
        "side": _result(rep.side, path),
        "grassmann": _result(rep.grassmann_value, path),
        "lower": _result(rep.lower, path),
        "upper": _result(rep.upper, path),
        "constructive_upper": _result(rep.constructive_upper, path),
        "op_norms": _result(d["op_norms"], path),
    }
    if rep.rdist_estimate is not None:
        inside = bool(rep.contains_estimate)
        out["rdist_estimate"] = _result(rep.rdist_estimate, SAMPLED, 0.0, contained=inside)
    return out


def cmd_precondition(inst: Instance, args) -> Dict[str, dict]:
    from .renegar import precondition

    P, R, rep = precondition(_the_map(inst), inst.cone)
    return {
        "P": _result(P.tolist(), CLOSED_FORM),
        "R": _result(R.tolist(), CLOSED_FORM, rep.balance_residual),
        "nu_before": _result(rep.nu_before, CLOSED_FORM),
        "nu_after": _result(rep.nu_after, CLOSED_FORM, max(0.0, rep.bound - rep.nu_after), bound=rep.bound),
        "margin": _result(rep.margin, CLOSED_FORM, certificate={"x0": rep.x0.tolist()}),
    }


def cmd_certify(inst: Instance, args) -> Dict[str, dict]:
    from .oracle import dist_to_illposed_estimate, odist_from_illposed_estimate

    L, K, np_ = inst.subspace, inst.cone, inst.norms
    c = nu(L, K, np_, seed=args.seed)
    if c.value > POSITIVITY_TOL:
        S = critical_subspace_feasible(L, K, np_, c)
        b = dist_to_illposed_estimate(L, K, np_, budget=args.budget, seed=args.seed, tol=args.tol)
        name = "nu"
    else:
        c = nu_bar(L, K, np_, seed=args.seed)
        if c.value <= POSITIVITY_TOL:
            raise IllPosedInstance("both nu and nu_bar vanish; the subspace is already ill-posed")
        S = critical_subspace_infeasible(L, K, np_, c)
        b = odist_from_illposed_estimate(L, K, np_, budget=args.budget, seed=args.seed, tol=args.tol)
        name = "nu_bar"
    return {
        name: _from_cert(c),
        "critical_subspace": _result(S.basis.T.tolist(), c.path, max(0.0, b.critical - b.measure)),
        "bracket": _result([b.lo, b.hi], c.path, max(0.0, b.lo - b.hi), samples=b.samples),
    }


def cmd_oracle(inst: Instance, args) -> Dict[str, dict]:
    from .oracle import verify_suite

    rep = verify_suite(inst, seed=args.seed, budget=args.budget)
    out = {c.name: _result(c.passed, SAMPLED, c.residual, detail=c.detail) for c in rep.checks}
    out["all_passed"] = _result(rep.passed, SAMPLED, skipped=rep.skipped)
    return out


HANDLERS = {
    "measure": cmd_measure, "dist": cmd_dist, "partition": cmd_partition, "renegar": cmd_renegar,
    "precondition": cmd_precondition, "certify": cmd_certify, "oracle": cmd_oracle,
}


# ---------------------------------------------------------------------------
# output


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else str(v)
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True)
    return str(v)


def render_text(envelope: dict) -> str:
    lines = [f"command: {envelope['command']}", f"inputs_digest: {envelope['inputs_digest']}",
             f"seed: {envelope['seed']}"]
    for name, res in envelope["results"].items():
        lines.append("")
        lines.append(f"{name}:")
        for k, v in res.items():
            lines.append(f"  {k}: {_fmt(v)}")
    return "\n".join(lines) + "\n"


def _digest(command: str, inst_text: str, args) -> str:
    h = hashlib.sha256()
    h.update(command.encode())
    h.update(inst_text.encode())
    h.update(json.dumps({"budget": args.budget, "tol": args.tol}, sort_keys=True).encode())
    return h.hexdigest()


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print one JSON object")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget", type=int, default=200, help="sample or direction budget for oracle work")
    common.add_argument("--tol", type=float, default=1e-7, help="slack for reported brackets")
    common.add_argument("--threads", type=int, default=1, help="accepted for compatibility; work runs serially")

    p = argparse.ArgumentParser(prog="conicond", description="Condition measures for conic feasibility.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    for name in HANDLERS:
        s = sub.add_parser(name, parents=[common])
        s.add_argument("instance", help="path to an instance JSON file")
    g = sub.add_parser("gen", parents=[common], help="write a random instance")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--cone", default="orthant", choices=("orthant", "soc", "psd"))
    g.add_argument("--norms", default="l2/l2", help="primal/tri tags, e.g. l1/linf")
    g.add_argument("--side", default="any", choices=("any", "feasible", "infeasible"))
    g.add_argument("--map", action="store_true", help="store a map instead of a subspace")
    g.add_argument("--out", help="file to write (default stdout)")
    return p


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        if args.command == "gen":
            norms = args.norms.split("/")
            if len(norms) != 2:
                raise ValidationError(f"norms: expected primal/tri, got {args.norms!r}")
            text = dumps(generate(args.seed, args.n, args.m, args.cone, tuple(norms), args.side, args.map))
            if args.out:
                with open(args.out, "w", encoding="utf-8") as fh:
                    fh.write(text)
            else:
                stdout.write(text)
            return EXIT_OK
        try:
            inst = load(args.instance)
        except OSError as exc:
            raise ValidationError(f"instance: cannot read {args.instance!r} ({exc.strerror})") from exc
        results = HANDLERS[args.command](inst, args)
    except INPUT_ERRORS as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    except (ConicondError, np.linalg.LinAlgError) as exc:
        stderr.write(f"numerical failure: {type(exc).__name__}: {exc}\n")
        return EXIT_NUMERICAL
    envelope = _clean({"command": args.command, "inputs_digest": _digest(args.command, inst.dumps(), args),
                       "results": results, "seed": args.seed})
    if args.json:
        stdout.write(json.dumps(envelope, sort_keys=True) + "\n")
    else:
        stdout.write(render_text(envelope))
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
