"""Command-line front end.

Exit codes: 0 success, 1 invalid input, 2 check failed, 3 clip-sensitive or
unsupported configuration.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import corpus
from .constructions import (
    cardioid_profile,
    junction_report,
    lemma41_map,
    lemma41_solve,
    nonconvex_deformation,
    random_problem,
    revolve_export,
    step5_pair,
)
from .errors import (
    ClipSensitive,
    ClipTooSmall,
    EpsilonTooLargeForClip,
    InvalidDomain,
    NotSimplyBounded,
    RigidityError,
)
from .geometry import BoundaryPoint, Domain, convexity_report, dump_domain, load_domain, maximal_segments, validate
from .isometry import (
    BoundaryCorrespondence,
    check_intrinsic_isometry,
    check_local_isometry_ladder,
    find_congruence,
)
from .metric import geodesic, metric_matrix
from .svg import write_svg

log = logging.getLogger("rigidity")

EXIT_OK, EXIT_INVALID, EXIT_FAILED, EXIT_CLIP = 0, 1, 2, 3


class CheckFailed(Exception):
    """Raised by a command whose check ran to completion with a negative verdict."""


def _emit(obj, out: str | None) -> None:
    text = json.dumps(obj, indent=1, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _positive(value: str) -> float:
    v = float(value)
    if not v > 0 or not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"{value} is not a positive number")
    return v


def _domain(spec: str) -> Domain:
    """Load a domain JSON file; a bare corpus name such as ``lshape`` also works."""
    if not Path(spec).exists() and spec in corpus.NAMES:
        domain = corpus.named(spec)
    else:
        domain = load_domain(spec)
    report = validate(domain)
    if not report.ok:
        raise InvalidDomain("invalid domain: " + ", ".join(sorted(report.codes())))
    return domain


def _boundary_point(text: str) -> BoundaryPoint:
    comp, _, s = text.rpartition(":")
    return BoundaryPoint(int(comp) if comp else 0, float(s))


def cmd_classify(args) -> int:
    domain = _domain(args.domain)
    rep = convexity_report(domain)
    segs = maximal_segments(domain)
    rep["segment_intervals"] = [list(s) for s in segs.segments]
    _emit(rep, args.out)
    return EXIT_OK


def cmd_metric(args) -> int:
    domain = _domain(args.domain)
    sample = metric_matrix(domain, args.n, args.offset, args.tol_flat)
    text = sample.to_csv()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_geodesic(args) -> int:
    domain = _domain(args.domain)
    a, b = _boundary_point(args.from_), _boundary_point(args.to)
    pa, pb = domain.point_at(a), domain.point_at(b)
    path = geodesic(domain, pa, pb, args.tol_flat)
    _emit(path.to_json(), args.out)
    if args.svg:
        write_svg(args.svg, [domain], [path.waypoints], [pa, pb])
    return EXIT_OK


def _ladder(text: str | None):
    if text is None or text == "default":
        return None
    return [_positive(v) for v in text.split(",")]


def cmd_check(args) -> int:
    U, V = _domain(args.U), _domain(args.V)
    f = BoundaryCorrespondence.from_json(json.loads(Path(args.corr).read_text()))
    intrinsic = check_intrinsic_isometry(U, V, f)
    out = {"intrinsic": intrinsic}
    if intrinsic:
        ladder = check_local_isometry_ladder(U, V, f, args.samples or 128, _ladder(args.eps_ladder), args.seed,
                                             args.tol_flat, args.tol_iso)
        out["local"] = ladder.to_json()
        out["passed"] = ladder.passed
    else:
        out["passed"] = False
    _emit(out, args.out)
    return EXIT_OK if out["passed"] else EXIT_FAILED


def cmd_congruence(args) -> int:
    U, V = _domain(args.U), _domain(args.V)
    _emit(find_congruence(U, V, args.samples or 512).to_json(), args.out)
    return EXIT_OK


def _write_pair(pair, outdir: Path) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    dump_domain(pair.U, outdir / "U.json")
    dump_domain(pair.V, outdir / "V.json")
    (outdir / "corr.json").write_text(json.dumps(pair.f.to_json(), indent=1) + "\n")
    write_svg(outdir / "preview.svg", [pair.U, pair.V])


def cmd_construct(args) -> int:
    outdir = Path(args.out or ".")
    if args.kind == "step5":
        pair = step5_pair(args.l, args.half_width)
        _write_pair(pair, outdir)
        _emit({"files": ["U.json", "V.json", "corr.json", "preview.svg"], "info": pair.info}, None)
    elif args.kind == "deform":
        if not args.domain:
            raise ValueError("construct deform needs --domain")
        U = _domain(args.domain)
        pair = nonconvex_deformation(U, args.amplitude * U.diameter)
        _write_pair(pair, outdir)
        _emit({"files": ["U.json", "V.json", "corr.json", "preview.svg"], "info": pair.info}, None)
    elif args.kind == "lemma41":
        prob = random_problem(np.random.default_rng(args.seed))
        sol = lemma41_solve(prob, args.delta)
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "solution.json").write_text(sol.dumps() + "\n")
        rep = lemma41_map(prob.f1, sol.f2)
        summary = {"k": sol.k.tolist(), "residual": sol.residual_norm, "sup_norm_diff": sol.sup_norm_diff,
                   "straightness": rep.max_straightness, "length_error": rep.max_length_error}
        _emit(summary, None)
        if sol.residual_norm > 1e-10:
            raise CheckFailed(f"residual {sol.residual_norm:.3g} above 1e-10")
    elif args.kind == "cardioid":
        profile = cardioid_profile(args.tol_flat or 2e-5)
        outdir.mkdir(parents=True, exist_ok=True)
        jr = junction_report(profile)
        (outdir / "profile.json").write_text(json.dumps(
            {"profile": profile.to_json(), "junction": jr.__dict__}, indent=1) + "\n")
        n = revolve_export(profile, outdir / "surface.stl", args.segments)
        _emit({"files": ["profile.json", "surface.stl"], "triangles": n, "junction": jr.__dict__}, None)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-flat", type=_positive, default=None, help="absolute flattening tolerance")
    common.add_argument("--tol-iso", type=_positive, default=None, help="local isometry tolerance")
    common.add_argument("--samples", type=int, default=None,
                        help="boundary samples per component (128 for check, 512 for congruence)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="output file (directory for construct)")
    common.add_argument("--svg", default=None, help="SVG picture of the result")

    parser = argparse.ArgumentParser(prog="rigidity", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="convexity and maximal straight segments")
    p.add_argument("domain")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("metric", parents=[common], help="relative distances between equally spaced points")
    p.add_argument("domain")
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--offset", type=float, default=0.0, help="arc-length position of the first point")
    p.set_defaults(func=cmd_metric)

    p = sub.add_parser("geodesic", parents=[common], help="shortest path between two boundary points")
    p.add_argument("domain")
    p.add_argument("--from", dest="from_", required=True, help="arc length s, or c:s for component c")
    p.add_argument("--to", required=True)
    p.set_defaults(func=cmd_geodesic)

    p = sub.add_parser("check", parents=[common], help="intrinsic and local isometry of a correspondence")
    p.add_argument("U")
    p.add_argument("V")
    p.add_argument("corr")
    p.add_argument("--eps-ladder", nargs="?", const="default", default=None,
                   help="comma-separated radii; the default ladder when no value is given")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("congruence", parents=[common], help="best rigid motion between two boundaries")
    p.add_argument("U")
    p.add_argument("V")
    p.set_defaults(func=cmd_congruence)

    p = sub.add_parser("construct", parents=[common], help="build a domain pair or auxiliary object")
    p.add_argument("kind", choices=["step5", "deform", "lemma41", "cardioid"])
    p.add_argument("--l", type=_positive, default=1.0)
    p.add_argument("--half-width", type=_positive, default=None)
    p.add_argument("--domain", default=None)
    p.add_argument("--amplitude", type=float, default=0.02, help="bump size as a fraction of the diameter")
    p.add_argument("--delta", type=float, default=1e-2)
    p.add_argument("--segments", type=int, default=64, help="angular subdivisions of the revolved mesh")
    p.set_defaults(func=cmd_construct)
    return parser


def _setup_logging() -> None:
    level = os.environ.get("RIGIDITY_LOG", "error").upper()
    logging.basicConfig(level=getattr(logging, level, logging.ERROR), format="%(levelname)s %(name)s: %(message)s")


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CheckFailed as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except (ClipSensitive, EpsilonTooLargeForClip, ClipTooSmall, NotSimplyBounded) as exc:
        print(f"clip-sensitive or unsupported: {exc}", file=sys.stderr)
        return EXIT_CLIP
    except (RigidityError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
