"""Command-line interface: ``mercator {euler,coeffs,gd,madd,rotate,render,verify}``.

Exit status: 0 success, 1 bad usage or input, 2 domain error (a puncture of
the torus, ``|v| >= 1``, ...), 3 failed internal check.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from . import gudermann, render, series, terrell
from .errors import DomainError, InvariantError
from .verify import SEED, format_report, run_checks

EXIT_USAGE = 1
EXIT_DOMAIN = 2
EXIT_INVARIANT = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _num(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


def _float_list(text: str) -> List[float]:
    """``a,b,c`` or ``start:stop:count`` (inclusive, evenly spaced)."""
    text = text.strip()
    if not text:
        return []
    if text.count(":") == 2 and "," not in text:
        start, stop, count = text.split(":")
        n = int(count)
        if n < 1:
            raise UsageError("range count must be >= 1")
        if n == 1:
            return [float(start)]
        a, b = float(start), float(stop)
        return [a + (b - a) * k / (n - 1) for k in range(n)]
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"bad number list {text!r}") from exc


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_euler(args) -> int:
    if args.count < 0:
        raise UsageError("--count must be >= 0")
    values = series.euler_numbers(args.count)
    _emit(json.dumps([str(e) for e in values], separators=(",", ":")) + "\n", args.output)
    return 0


def cmd_coeffs(args) -> int:
    if args.order < 1:
        raise UsageError("--order must be >= 1")
    build = {
        "lambda": series.gudermann_log_series,
        "lambda-inv": series.gudermann_exp_series,
        "group-law": series.mercator_group_law,
    }[args.series]
    s = build(args.order)
    text = s.to_json() + "\n" if args.format == "json" else s.to_csv()
    _emit(text, args.output)
    return 0


def cmd_gd(args) -> int:
    if args.inverse:
        value = gudermann.lambda_inv_num(args.eval)
    else:
        value = gudermann.lambda_num(args.eval, args.formula)
    _emit(_num(value) + "\n", args.output)
    return 0


def cmd_madd(args) -> int:
    _emit(_num(gudermann.mercator_add(args.x, args.y)) + "\n", args.output)
    return 0


def cmd_rotate(args) -> int:
    if args.table is not None:
        if ":" not in args.table:
            raise UsageError("--table expects VLIST:TLIST")
        vpart, tpart = args.table.split(":", 1)
        rows = terrell.rotation_table(_float_list(vpart), _float_list(tpart))
        _emit(terrell.format_table(rows), args.output)
        return 0
    if args.v is None:
        raise UsageError("--v is required unless --table is given")
    if args.psi is not None and args.psi_tilde is not None:
        raise UsageError("give only one of --psi and --psi-tilde")
    if args.psi is not None:
        psi_tilde = terrell.to_psi_tilde(args.psi)
    elif args.psi_tilde is not None:
        psi_tilde = args.psi_tilde
    else:
        raise UsageError("one of --psi, --psi-tilde or --table is required")
    if args.route == "taylor":
        result = terrell.rotation_taylor(args.v, psi_tilde + 0.5 * math.pi)
    else:
        result = terrell.rotation_fgl(args.v, psi_tilde)
    _emit(_num(result.phi) + "\n", args.output)
    return 0


def cmd_render(args) -> int:
    if args.mesh == "cube":
        mesh = render.Mesh.cube()
    else:
        try:
            mesh = render.Mesh.load(args.mesh)
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"cannot read mesh {args.mesh!r}: {exc}") from exc
    if args.subdivide < 0:
        raise UsageError("--subdivide must be >= 0")
    angles = _float_list(args.sight_angles)
    motion = render.MotionState(args.v, args.y0)
    camera = None
    if args.fov is not None:
        camera = render.Camera(field_of_view=math.radians(args.fov), width=args.width, height=args.height)
    mode = "svg-wireframe" if args.mode == "svg" else "ppm-raster"
    pairs, csv_text = render.render_sequence(
        mesh, motion, camera, angles, args.subdivide, mode, workers=args.workers
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for k, pair in enumerate(pairs):
        overlay = pair.oracle if args.oracle else None
        if args.mode == "svg":
            (out / f"frame_{k:04d}.svg").write_text(render.frame_to_svg(pair.apparent, overlay))
        else:
            data = render.frame_to_ppm(pair.apparent, args.width, args.height, overlay)
            (out / f"frame_{k:04d}.ppm").write_bytes(data)
    (out / "mismatch.csv").write_text(csv_text)
    sys.stdout.write(f"wrote {len(pairs)} frame(s) and mismatch.csv to {out}\n")
    return 0


def cmd_verify(args) -> int:
    if args.order < 3 or args.grid < 2:
        raise UsageError("--order must be >= 3 and --grid >= 2")
    results = run_checks(args.order, args.grid, args.workers, SEED)
    _emit(format_report(results, args.order, args.grid, SEED), args.output)
    return 0 if all(r.passed for r in results) else EXIT_INVARIANT


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mercator", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_output(p):
        p.add_argument("-o", "--output", help="write to this file instead of stdout")
        return p

    p = with_output(sub.add_parser("euler", help="secant (Euler) numbers"))
    p.add_argument("--count", type=int, required=True)
    p.set_defaults(func=cmd_euler)

    p = with_output(sub.add_parser("coeffs", help="exact series coefficients"))
    p.add_argument("--series", choices=["lambda", "lambda-inv", "group-law"], required=True)
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_coeffs)

    p = with_output(sub.add_parser("gd", help="evaluate lambda = arctanh(sin x) or its inverse"))
    p.add_argument("--eval", type=float, required=True)
    p.add_argument("--formula", choices=list(gudermann.FORMULAS), default="arctanh-sin")
    p.add_argument("--inverse", action="store_true")
    p.set_defaults(func=cmd_gd)

    p = with_output(sub.add_parser("madd", help="Mercator sum of two angles"))
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--y", type=float, required=True)
    p.set_defaults(func=cmd_madd)

    p = with_output(sub.add_parser("rotate", help="apparent rotation angle"))
    p.add_argument("--v", type=float)
    p.add_argument("--psi-tilde", type=float)
    p.add_argument("--psi", type=float)
    p.add_argument("--route", choices=["fgl", "taylor"], default="fgl")
    p.add_argument("--table", metavar="VLIST:TLIST")
    p.set_defaults(func=cmd_rotate)

    p = sub.add_parser("render", help="render apparent frames and mismatch CSV")
    p.add_argument("--v", type=float, required=True)
    p.add_argument("--y0", type=float, required=True)
    p.add_argument("--mesh", default="cube", help="'cube' or a mesh JSON file")
    p.add_argument("--sight-angles", required=True, help="comma list or start:stop:count")
    p.add_argument("--mode", choices=["svg", "ppm"], default="svg")
    p.add_argument("--oracle", action="store_true", help="overlay the rotated-object prediction")
    p.add_argument("--subdivide", type=int, default=0)
    p.add_argument("--fov", type=float, help="fixed camera looking along +y (degrees); default aims at the object")
    p.add_argument("--width", type=int, default=512)
    p.add_argument("--height", type=int, default=512)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_render)

    p = with_output(sub.add_parser("verify", help="run the invariant suite"))
    p.add_argument("--order", type=int, default=13)
    p.add_argument("--grid", type=int, default=1000)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"mercator: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"mercator: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except InvariantError as exc:
        print(f"mercator: invariant failure: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except ValueError as exc:
        print(f"mercator: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
