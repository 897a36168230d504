"""Command line interface: ``kenmotsu {check,classify,soliton,curvature}``.

Exit codes: 0 when every asserted check passes, 1 when one fails, 2 on a
usage or input error (reported as a single ``error: ...`` line on stderr).
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

import numpy as np

from kenmotsu import __version__
from kenmotsu._kernels import BACKEND
from kenmotsu.classifier import (
    classification_failed,
    classify,
    soliton_eta_coefficient,
    soliton_residual,
    soliton_solve_lambda,
)
from kenmotsu.contact import (
    DEFAULT_TOL,
    MissingStructure,
    kenmotsu_checks,
    kenmotsu_identity_suite,
    validate_structure,
)
from kenmotsu.geometry import local_geometry
from kenmotsu.jet import DomainError
from kenmotsu.library import PINNED_EPSILON, UnknownBuiltin, builtin, names
from kenmotsu.loader import ManifestError, load_manifest
from kenmotsu.manifold import ManifoldSpec
from kenmotsu.report import CheckEntry, Report, check, digest_text, info, skipped

ENGINE = f"kenmotsu {__version__} ({BACKEND})"


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _param(text: str):
    name, sep, value = text.partition("=")
    if not sep or not name.strip():
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}")
    try:
        return name.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"parameter value must be a number: {text!r}") from None


def _point(text: str):
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"point must be comma-separated numbers: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kenmotsu", description="Check almost contact pseudo-metric manifolds.")
    parser.add_argument("--version", action="version", version=ENGINE)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    common = _Parser(add_help=False)
    src = common.add_mutually_exclusive_group(required=True)
    src.add_argument("--manifest", metavar="PATH", help="TOML manifest")
    src.add_argument("--builtin", metavar="NAME", help=f"builtin manifold: {', '.join(names())}")
    common.add_argument("--epsilon", type=float, choices=(1.0, -1.0), help="override eps")
    common.add_argument("--param", type=_param, action="append", default=[], metavar="NAME=VALUE")
    common.add_argument("--json", action="store_true", help="machine-readable report")

    sampled = _Parser(add_help=False)
    sampled.add_argument("--tol", type=float, help=f"default tolerance (default {DEFAULT_TOL:g})")
    sampled.add_argument("--seed", type=int, help="seed for sampling points and directions")
    sampled.add_argument("--samples", type=int, help="number of random points in the sampling box")

    sub.add_parser("check", parents=[common, sampled], help="structure axioms and Kenmotsu identities")
    sub.add_parser("classify", parents=[common, sampled], help="theorem-level classification")
    sol = sub.add_parser("soliton", parents=[common, sampled], help="Ricci soliton residuals")
    sol.add_argument("--solve-lambda", action="store_true", help="also solve for the best lambda")
    cur = sub.add_parser("curvature", parents=[common], help="dump curvature components at a point")
    cur.add_argument("--point", type=_point, help="comma-separated coordinates")
    return parser


# --- input ---------------------------------------------------------------------


def resolve_spec(args) -> ManifoldSpec:
    if args.manifest is not None:
        try:
            spec = load_manifest(args.manifest)
        except OSError as exc:
            raise InputError(f"cannot read manifest {args.manifest}: {exc.strerror}") from None
    else:
        spec = builtin(args.builtin)
    if args.epsilon is not None:
        if args.builtin in PINNED_EPSILON and args.epsilon != spec.epsilon:
            raise InputError(f"{args.builtin} has eps pinned to {spec.epsilon:+g}")
        spec = spec.with_epsilon(args.epsilon)
    if args.param:
        known = set(dict(spec.params))
        for name, _ in args.param:
            if name not in known:
                raise InputError(f"unknown parameter {name!r}")
        spec = spec.with_params(**dict(args.param))
    return spec


def _tolerance(spec: ManifoldSpec, args) -> float:
    return args.tol if args.tol is not None else spec.tolerance("default", DEFAULT_TOL)


def apply_tolerances(entries, spec: ManifoldSpec) -> list:
    """Re-judge entries that have a per-check tolerance in the spec."""
    overrides = {k: v for k, v in spec.tolerances if k != "default"}
    out = []
    for e in entries:
        if e.name in overrides and e.tolerance is not None and e.residual is not None:
            e = CheckEntry(e.name, e.residual, overrides[e.name], note=e.note)
        out.append(e)
    return out


def _report(command, spec, args, entries, points, constants=None) -> Report:
    return Report(
        command=command,
        manifold=spec.name,
        digest=digest_text(repr(spec)),
        epsilon=spec.epsilon,
        n=spec.n,
        seed=_seed(spec, args),
        entries=apply_tolerances(entries, spec),
        constants=constants or {},
        points=[tuple(p) for p in points],
        engine=ENGINE,
    )


def _seed(spec, args) -> int:
    seed = getattr(args, "seed", None)
    return spec.sampling.seed if seed is None else seed


def _points(spec, args):
    pts = spec.sample_points(seed=args.seed, count=args.samples)
    if not pts:
        raise InputError("no sample points: give [sampling] points or a box")
    return pts


# --- commands ---------------------------------------------------------------------


def cmd_check(spec, args):
    if spec.structure is None:
        raise InputError(f"{spec.name}: no structure block")
    tol = _tolerance(spec, args)
    pts = _points(spec, args)
    entries = validate_structure(spec, pts, tol)
    entries += kenmotsu_checks(spec, pts, tol)
    if all(e.passed for e in entries if e.name.startswith("structure.")):
        entries += kenmotsu_identity_suite(spec, pts, tol)
    else:
        entries.append(skipped("kenmotsu.identities", "almost contact axioms fail"))
    rep = _report("check", spec, args, entries, pts)
    return rep, 0 if rep.ok else 1


def cmd_classify(spec, args):
    tol = _tolerance(spec, args)
    pts = _points(spec, args)
    rep = classify(spec, pts, tol=tol, seed=_seed(spec, args), engine=ENGINE, digest=digest_text(repr(spec)))
    rep.entries = apply_tolerances(rep.entries, spec)
    return rep, 1 if classification_failed(rep) else 0


def cmd_soliton(spec, args):
    if spec.soliton is None:
        raise InputError(f"{spec.name}: no soliton block")
    tol = _tolerance(spec, args)
    pts = _points(spec, args)
    lam = spec.lam_value()
    entries = [check("soliton.residual", soliton_residual(spec, pts), tol, f"lambda = {lam:.12g}")]
    consts = {"lambda": lam}
    if spec.structure is not None:
        b = soliton_eta_coefficient(spec, pts)
        entries.append(info("soliton.eta_eta_coefficient", b, "b in L_V g + 2Ric = a g + b eta(x)eta"))
    if args.solve_lambda:
        solved = soliton_solve_lambda(spec, pts, tol=tol)
        entries += solved.entries
        consts["lambda_solved"] = solved.lam
        kenmotsu = False
        if spec.structure is not None and all(e.passed for e in validate_structure(spec, pts, tol)):
            kc = kenmotsu_checks(spec, pts, tol)
            kenmotsu = all(e.passed for e in kc if e.name in ("kenmotsu.condition", "kenmotsu.normality"))
        gap = abs(solved.lam - solved.target)
        if kenmotsu and solved.residual < tol:
            entries.append(check("soliton.lambda_target", gap, tol, "lambda* = 2n eps"))
        else:
            entries.append(skipped("soliton.lambda_target", "not a Kenmotsu soliton"))
    rep = _report("soliton", spec, args, entries, pts, consts)
    return rep, 0 if rep.ok else 1


def _labels(spec, variance, index) -> str:
    up = "".join(spec.coords[i] if v == "u" else "" for v, i in zip(variance, index))
    low = "".join(spec.coords[i] if v == "l" else "" for v, i in zip(variance, index))
    return (f"^{up}" if up else "") + (f"_{low}" if low else "")


def curvature_dump(spec: ManifoldSpec, point) -> dict:
    geo = local_geometry(spec, tuple(point))
    return {
        "gamma": (geo.gamma.value, ("u", "l", "l")),
        "riemann": (geo.riemann.value, ("u", "l", "l", "l")),
        "riemann_low": (geo.riemann_low.value, ("l", "l", "l", "l")),
        "ricci": (geo.ricci.value, ("l", "l")),
        "ricci_op": (geo.ricci_op.value, ("u", "l")),
        "scalar": (np.asarray(geo.scalar.value), ()),
        "weyl": (geo.weyl.value, ("u", "l", "l", "l")),
    }


def cmd_curvature(spec, args):
    point = args.point
    if point is None:
        pts = spec.sample_points(count=0)
        point = pts[0] if pts else (0.0,) * spec.dim
    if len(point) != spec.dim:
        raise InputError(f"--point needs {spec.dim} coordinates")
    return curvature_dump(spec, point), tuple(point)


def _curvature_json(spec, point, dump) -> str:
    doc = {
        "command": "curvature",
        "manifold": spec.name,
        "digest": digest_text(repr(spec)),
        "epsilon": spec.epsilon,
        "coords": list(spec.coords),
        "point": list(point),
        "engine": ENGINE,
        "layouts": {
            "gamma": "[k,i,j] = Gamma^k_ij",
            "riemann": "[l,k,i,j]: R(d_i,d_j)d_k = R^l_kij d_l",
            "riemann_low": "[i,j,k,w] = g(R(d_i,d_j)d_k, d_w)",
            "ricci": "[j,k]",
            "ricci_op": "[a,b] = Q^a_b",
            "weyl": "[l,k,i,j], like riemann",
        },
        "tensors": {k: {"variance": list(v), "components": np.asarray(c).tolist()} for k, (c, v) in dump.items()},
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def _curvature_text(spec, point, dump, zero_tol=1e-13) -> str:
    lines = [f"curvature: {spec.name}  (eps={spec.epsilon:+g}) at {', '.join(f'{x:g}' for x in point)}"]
    for name, (comps, variance) in dump.items():
        comps = np.asarray(comps)
        if comps.ndim == 0:
            lines.append(f"  {name} = {float(comps):.12g}")
            continue
        nz = [(idx, v) for idx, v in np.ndenumerate(comps) if abs(v) > zero_tol]
        lines.append(f"  {name}:" + ("" if nz else " all zero"))
        for idx, v in nz:
            lines.append(f"    {name}{_labels(spec, variance, idx)} = {v:.12g}")
    return "\n".join(lines)


COMMANDS = {"check": cmd_check, "classify": cmd_classify, "soliton": cmd_soliton}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        spec = resolve_spec(args)
        if args.command == "curvature":
            dump, point = cmd_curvature(spec, args)
            print(_curvature_json(spec, point, dump) if args.json else _curvature_text(spec, point, dump))
            return 0
        rep, code = COMMANDS[args.command](spec, args)
    except (InputError, ManifestError, UnknownBuiltin, MissingStructure, DomainError, ValueError,
            ArithmeticError, RuntimeError) as exc:
        msg = " ".join(str(exc).split())
        print(f"error: {msg}", file=sys.stderr)
        return 2
    print(rep.to_json() if args.json else rep.to_text())
    return code


if __name__ == "__main__":
    sys.exit(main())
