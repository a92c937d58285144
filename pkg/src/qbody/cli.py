"""Command-line front end.

Points are flat JSON arrays ``[c11, c12, c21, c22]``, functionals
``[f11, f12, f21, f22]``, angles ``[alpha, beta, gamma, delta]`` in
radians.  Output is JSON on stdout (CSV for the tabular subcommands when
``--out`` is given).  Exit status: 0 success, 1 domain error (with a
machine-readable ``{"error": {...}}`` payload), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys


from . import boundary, core, duality, measures, membership, quantum
from .core import Correlation, Functional, QBodyError, Tolerance

_ORACLES = {
    "semialg": membership.Oracle.SEMIALG,
    "pushout": membership.Oracle.PUSHOUT,
    "completion": membership.Oracle.COMPLETION,
    "timo": membership.Oracle.TIMO,
    "landau": membership.Oracle.LANDAU,
}

_BODIES = {
    "q": measures.Body.Q,
    "cl": measures.Body.CL,
    "elliptope": measures.Body.ELLIPTOPE3,
}

_TARGETS = {
    "cube": measures.SampleTarget.CUBE,
    "cl": measures.SampleTarget.CL,
    "q-interior": measures.SampleTarget.Q_INTERIOR,
    "q4": measures.SampleTarget.Q4_STRATUM,
    "q5": measures.SampleTarget.Q5_STRATUM,
}


def _vector(text: str, what: str) -> list[float]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise argparse.ArgumentTypeError(f"{what} is not valid JSON: {exc}")
    if not isinstance(data, list) or len(data) != 4 \
            or not all(isinstance(v, (int, float)) for v in data):
        raise argparse.ArgumentTypeError(
            f"{what} must be a JSON array of 4 numbers")
    return [float(v) for v in data]


def _point_arg(text: str) -> list[float]:
    return _vector(text, "--point")


def _functional_arg(text: str) -> list[float]:
    return _vector(text, "--functional")


def _angles_arg(text: str) -> list[float]:
    return _vector(text, "--angles")


def _normal_arg(text: str) -> list[float]:
    return _vector(text, "--normal")


def _fix_arg(text: str) -> tuple[str, float]:
    if "=" not in text:
        raise argparse.ArgumentTypeError("--fix expects cij=VALUE")
    name, _, value = text.partition("=")
    if name not in measures.AXES:
        raise argparse.ArgumentTypeError(
            f"--fix coordinate must be one of {measures.AXES}")
    try:
        return name, float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--fix value {value!r} not a number")


def _add_eps_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--eps-boundary", type=float, default=1e-9)
    parser.add_argument("--eps-angle", type=float, default=1e-9)
    parser.add_argument("--eps-psd", type=float, default=1e-10)


def _tolerance(args: argparse.Namespace) -> Tolerance:
    return Tolerance(eps_boundary=args.eps_boundary,
                     eps_angle=args.eps_angle, eps_psd=args.eps_psd)


def _default_seed() -> int:
    env = os.environ.get("QBODY_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            pass
    return 0


_POINT_HELP = "JSON array [c11,c12,c21,c22]"
_FUNCTIONAL_HELP = "JSON array [f11,f12,f21,f22] of inequality coefficients"
_ANGLES_HELP = "JSON array [alpha,beta,gamma,delta] in radians, sum 0 mod 2*pi"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qbody",
        description="Compute with the minimal-scenario quantum correlation body.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("member", help="membership of a point in Q")
    p.add_argument("--point", type=_point_arg, required=True, help=_POINT_HELP)
    p.add_argument("--oracle", choices=["all"] + sorted(_ORACLES), default="all")
    _add_eps_flags(p)

    p = sub.add_parser("classify", help="boundary stratum of a point")
    p.add_argument("--point", type=_point_arg, required=True, help=_POINT_HELP)
    _add_eps_flags(p)

    p = sub.add_parser("support", help="support function of a functional")
    p.add_argument("--functional", type=_functional_arg, required=True,
                   help=_FUNCTIONAL_HELP)
    _add_eps_flags(p)

    p = sub.add_parser("gauge", help="gauge function of a point")
    p.add_argument("--point", type=_point_arg, required=True, help=_POINT_HELP)
    _add_eps_flags(p)

    p = sub.add_parser("dual", help="polar-body membership of a functional")
    p.add_argument("--functional", type=_functional_arg, required=True,
                   help=_FUNCTIONAL_HELP)
    _add_eps_flags(p)

    p = sub.add_parser("complete", help="matrix completion of a point")
    p.add_argument("--point", type=_point_arg, required=True, help=_POINT_HELP)
    _add_eps_flags(p)

    p = sub.add_parser("angles", help="angles <-> point conversions")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--point", type=_point_arg, help=_POINT_HELP)
    group.add_argument("--angles", type=_angles_arg, help=_ANGLES_HELP)
    _add_eps_flags(p)

    p = sub.add_parser("expose", help="exposing functional of an extreme point")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--angles", type=_angles_arg, help=_ANGLES_HELP)
    group.add_argument("--point", type=_point_arg, help=_POINT_HELP)
    _add_eps_flags(p)

    p = sub.add_parser("model", help="explicit quantum model for angles")
    p.add_argument("--angles", type=_angles_arg, required=True,
                   help=_ANGLES_HELP)
    _add_eps_flags(p)

    p = sub.add_parser("selftest", help="self-testing residuals of a model")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--angles", type=_angles_arg, help=_ANGLES_HELP)
    group.add_argument("--model", help="path to a model JSON file")
    _add_eps_flags(p)

    p = sub.add_parser("volume", help="Monte-Carlo volume fraction")
    p.add_argument("--body", choices=sorted(_BODIES), default="q")
    p.add_argument("--samples", type=int, default=1000000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("sample", help="draw points from a target set")
    p.add_argument("--target", choices=sorted(_TARGETS), default="cube")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="write CSV to this path instead of JSON")

    p = sub.add_parser("slice", help="labelled grid over a slice of the cube")
    p.add_argument("--fix", type=_fix_arg, action="append", default=[],
                   help="fix a coordinate, e.g. c11=-0.8 (repeatable)")
    p.add_argument("--normal", type=_normal_arg, default=None,
                   help="hyperplane normal as a JSON 4-array")
    p.add_argument("--offset", type=float, default=0.0,
                   help="hyperplane offset (normal . c = offset)")
    p.add_argument("--grid", type=int, default=50,
                   help="grid resolution per free axis")
    p.add_argument("--out", help="write CSV to this path instead of JSON")
    _add_eps_flags(p)

    p = sub.add_parser("orbit", help="symmetry orbit of a point")
    p.add_argument("--point", type=_point_arg, required=True, help=_POINT_HELP)
    _add_eps_flags(p)

    p = sub.add_parser("ncycle", help="normal-cycle residuals of a pair")
    p.add_argument("--point", type=_point_arg, required=True, help=_POINT_HELP)
    p.add_argument("--functional", type=_functional_arg, required=True,
                   help=_FUNCTIONAL_HELP)
    _add_eps_flags(p)

    return parser


def _verdict_dict(v: membership.MembershipVerdict) -> dict:
    return {
        "inside": bool(v.inside),
        "margin": v.margin,
        "oracle": v.oracle.value if v.oracle is not None else None,
    }


def _run(args: argparse.Namespace) -> dict | measures.SliceTable | list:
    cmd = args.command

    if cmd == "member":
        c = Correlation.from_sequence(args.point)
        tol = _tolerance(args)
        names = sorted(_ORACLES) if args.oracle == "all" else [args.oracle]
        return {name: _verdict_dict(membership.member(c, _ORACLES[name], tol))
                for name in names}

    if cmd == "classify":
        c = Correlation.from_sequence(args.point)
        stratum = boundary.classify(c, _tolerance(args))
        return {"stratum": stratum.value}

    if cmd == "support":
        f = Functional.from_sequence(args.functional)
        tol = _tolerance(args)
        phi = duality.support(f, tol)
        if max(abs(v) for v in f.as_tuple()) == 0.0:
            case = "zero"
        else:
            case = "quantum" if duality.quantum_case(f, tol).quantum_case \
                else "classical"
        return {"phi": phi, "case": case}

    if cmd == "gauge":
        c = Correlation.from_sequence(args.point)
        return {"gauge": duality.gauge(c, _tolerance(args))}

    if cmd == "dual":
        f = Functional.from_sequence(args.functional)
        tol = _tolerance(args)
        verdict = duality.dual_member(f, tol=tol)
        completion = duality.dual_completion(f, tol)
        return {
            "member": _verdict_dict(verdict),
            "support": duality.support(f, tol),
            "completion": {
                "feasible": completion.feasible,
                "p": [completion.witness.p1, completion.witness.p2,
                      completion.witness.p3, completion.witness.p4],
            },
        }

    if cmd == "complete":
        c = Correlation.from_sequence(args.point)
        result = boundary.solve_completion(c, _tolerance(args))
        return {
            "feasible": result.feasible,
            "u": result.witness.u,
            "v": result.witness.v,
            "unique": result.unique,
            "rank": result.rank,
        }

    if cmd == "angles":
        tol = _tolerance(args)
        if args.point is not None:
            t = boundary.angles_from_point(
                Correlation.from_sequence(args.point), tol)
            return {"angles": list(t.as_tuple())}
        t = boundary.AngleTuple(*args.angles)
        ext = boundary.extreme_from_angles(t, tol)
        return {"point": list(ext.c.as_tuple()), "stratum": ext.stratum.value}

    if cmd == "expose":
        tol = _tolerance(args)
        if args.angles is not None:
            t = boundary.AngleTuple(*args.angles)
        else:
            t = boundary.angles_from_point(
                Correlation.from_sequence(args.point), tol)
        f = boundary.exposing_functional(t, tol)
        return {"functional": list(f.as_tuple())}

    if cmd == "model":
        t = boundary.AngleTuple(*args.angles)
        model = quantum.build_model(t)
        payload = model.to_json_dict()
        payload["correlations"] = list(quantum.correlations_of(model).as_tuple())
        return payload

    if cmd == "selftest":
        if args.angles is not None:
            model = quantum.build_model(boundary.AngleTuple(*args.angles))
        else:
            with open(args.model, encoding="utf-8") as fh:
                model = quantum.QuantumModel.from_json_dict(json.load(fh))
        report = quantum.selftest_residuals(model)
        return {
            "gamma": report.gamma.tolist(),
            "residual_bpsi": report.residual_bpsi,
            "residual_squares": report.residual_squares,
            "residual_anticommutator": report.residual_anticommutator,
            "residual_tracial": report.residual_tracial,
            "u_value": report.u_value,
        }

    if cmd == "volume":
        seed = args.seed if args.seed is not None else _default_seed()
        cfg = measures.SamplerConfig(seed=seed, samples=args.samples,
                                     workers=args.workers)
        estimate = measures.mc_volume(_BODIES[args.body], cfg)
        return {"fraction": estimate.fraction, "stderr": estimate.stderr}

    if cmd == "sample":
        seed = args.seed if args.seed is not None else _default_seed()
        cfg = measures.SamplerConfig(seed=seed, samples=args.samples,
                                     workers=args.workers)
        points = measures.sample(_TARGETS[args.target], cfg)
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(",".join(measures.AXES) + "\n")
                for c in points:
                    fh.write(",".join(f"{v:.17g}" for v in c.as_tuple()) + "\n")
            return {"written": args.out, "count": len(points)}
        return {"points": [list(c.as_tuple()) for c in points]}

    if cmd == "slice":
        fixed = dict(args.fix) if args.fix else None
        spec = measures.SliceSpec(fixed=fixed, normal=args.normal,
                                  offset=args.offset, resolution=args.grid)
        table = measures.slice_grid(spec, _tolerance(args))
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
                table.write_csv(fh)
            return {"written": args.out, "rows": len(table.rows)}
        return {"columns": list(table.columns),
                "rows": [list(row) for row in table.rows]}

    if cmd == "orbit":
        c = Correlation.from_sequence(args.point)
        points = core.orbit(c, _tolerance(args))
        return {"size": len(points),
                "orbit": [list(p.as_tuple()) for p in points]}

    if cmd == "ncycle":
        c = Correlation.from_sequence(args.point)
        f = Functional.from_sequence(args.functional)
        residuals = duality.ncycle_residuals(c, f)
        return {"names": list(duality.NCYCLE_RESIDUAL_NAMES),
                "residuals": list(residuals)}

    raise AssertionError(f"unhandled command {cmd!r}")  # pragma: no cover


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        result = _run(args)
    except QBodyError as exc:
        payload = {"error": {"kind": type(exc).__name__, "detail": str(exc)}}
        print(json.dumps(payload))
        return 1
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        parser.exit(2, f"{parser.prog}: error: {exc}\n")
    print(json.dumps(result))
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
