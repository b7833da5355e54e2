"""Command-line front end.

Exit codes: 0 success, 2 bad input or configuration, 3 numerical degeneracy.
"""
from __future__ import annotations

import argparse
import datetime
import json
import math
import sys
from pathlib import Path

from . import __version__
from .conditioning import analyze
from .errors import (
    ConfigError,
    DegenerateAlignmentError,
    EmptyRegionError,
    IndeterminateRotationError,
    InvalidArgumentError,
    PreconditionError,
)
from .geometry import PointSet2, trivial_set
from .isocontour import contours_to_json, evaluate_grid, extract_isocontours, workspace_area
from .kinematics import Manipulator, Posture
from .optimize import OptimizationConfig, optimum_posture

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3


class InputError(Exception):
    pass


def _read_json(path: str):
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON ({exc})") from None


def _load(cls, path: str):
    data = _read_json(path)
    try:
        return cls.from_dict(data)
    except (InvalidArgumentError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _angle(args, value: float) -> float:
    return math.radians(value) if args.degrees else value


def _permutation(args, n: int):
    if args.permutation is None:
        return None
    # labels on the command line are 1-based, like K_1..K_n
    perm = [p - 1 for p in args.permutation]
    if sorted(perm) != list(range(n)):
        raise InputError(f"--permutation must be a permutation of 1..{n}")
    return perm


def _model_set(args):
    return None if args.set is None else _load(PointSet2, args.set)


def _emit(args, text: str):
    if not text.endswith("\n"):
        text += "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2)


def cmd_analyze(args) -> None:
    m = _load(Manipulator, args.manipulator)
    p = _load(Posture, args.posture)
    s = _model_set(args)
    if p.n != m.n:
        raise InputError(f"{args.posture}: {p.n} joint angles for a {m.n}-joint manipulator")
    rec = analyze(m, p, s, permutation=_permutation(args, m.n))
    _emit(args, _dump(rec.to_dict()))


def cmd_optimize(args) -> None:
    m = _load(Manipulator, args.manipulator)
    overrides = {}
    if args.config:
        overrides.update(_read_json(args.config))
    if args.resolution is not None:
        if args.resolution < 4:
            raise ConfigError(f"--resolution must be at least 4, got {args.resolution}")
        overrides["grid_resolution"] = 2 * math.pi / args.resolution
    if args.theta1 is not None:
        overrides["theta1"] = _angle(args, args.theta1)
    cfg = OptimizationConfig.from_dict(overrides)
    res = optimum_posture(m, _model_set(args), cfg, permutation=_permutation(args, m.n))
    _emit(args, _dump(res.to_dict()))


def _grid(args, m):
    theta1 = 0.0 if args.theta1 is None else _angle(args, args.theta1)
    return evaluate_grid(m, _model_set(args), resolution=args.resolution, theta1=theta1,
                         permutation=_permutation(args, m.n))


def cmd_isocontour(args) -> None:
    m = _load(Manipulator, args.manipulator)
    if args.resolution < 8:
        raise ConfigError(f"--resolution must be at least 8, got {args.resolution}")
    if not args.levels:
        raise ConfigError("--levels needs at least one value")
    g = _grid(args, m)
    if args.grid_out:
        Path(args.grid_out).write_text(g.to_csv())
    contours = extract_isocontours(g, args.levels, wrap=not args.no_wrap)
    _emit(args, contours_to_json(contours, indent=1))


def cmd_workspace_area(args) -> None:
    m = _load(Manipulator, args.manipulator)
    g = _grid(args, m)
    _emit(args, _dump(workspace_area(g, args.z_max).to_dict()))


def cmd_trivial_set(args) -> None:
    phase = None if args.phase is None else _angle(args, args.phase)
    _emit(args, _dump(trivial_set(args.n, phase).to_dict()))


def _write_manifest(args, argv) -> None:
    inputs = [getattr(args, name) for name in ("manipulator", "posture", "set", "config")
              if getattr(args, name, None)]
    manifest = {
        "command": args.command,
        "inputs": inputs,
        "output": args.out,
        "argv": list(argv),
        "tool_version": __version__,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    Path(args.manifest).write_text(_dump(manifest) + "\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isocond",
        description="Kinetostatic conditioning of planar n-revolute manipulators.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", metavar="PATH", help="write the result here instead of stdout")
    common.add_argument("--manifest", metavar="PATH", help="also write a run manifest (JSON)")
    units = common.add_mutually_exclusive_group()
    units.add_argument("--degrees", dest="degrees", action="store_true", default=True,
                       help="angles given on the command line are in degrees (default)")
    units.add_argument("--radians", dest="degrees", action="store_false")

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--set", metavar="SET.json", help="model point set (default: regular n-gon)")
    model.add_argument("--permutation", type=_int_list, metavar="i,j,k",
                       help="1-based model point assigned to each joint")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common, model], help="conditioning record of one posture")
    p.add_argument("manipulator")
    p.add_argument("posture")
    p.add_argument("set_positional", nargs="?", metavar="set", help="model point set")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("optimize", parents=[common, model], help="globally optimum posture")
    p.add_argument("manipulator")
    p.add_argument("--config", metavar="CONFIG.json", help="OptimizationConfig overrides")
    p.add_argument("--resolution", type=int, metavar="N", help="lattice samples per joint")
    p.add_argument("--theta1", type=float, metavar="v", help="fixed angle of joint 1")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("isocontour", parents=[common, model], help="z grid and level curves")
    p.add_argument("manipulator")
    p.add_argument("--resolution", type=int, default=720, metavar="N")
    p.add_argument("--levels", type=_float_list, required=True, metavar="a,b,c")
    p.add_argument("--theta1", type=float, metavar="v")
    p.add_argument("--no-wrap", action="store_true",
                   help="treat [0, 2pi]^2 as a flat window (closure flags only)")
    p.add_argument("--grid-out", metavar="GRID.csv", help="write the z grid as CSV")
    p.set_defaults(func=cmd_isocontour)

    p = sub.add_parser("workspace-area", parents=[common, model], help="area where z <= z_M")
    p.add_argument("manipulator")
    p.add_argument("--z-max", type=float, required=True, metavar="z_M")
    p.add_argument("--resolution", type=int, default=720, metavar="N")
    p.add_argument("--theta1", type=float, metavar="v")
    p.set_defaults(func=cmd_workspace_area)

    p = sub.add_parser("trivial-set", parents=[common], help="regular-polygon model set")
    p.add_argument("n", type=int)
    p.add_argument("--phase", type=float, help="angle of the first vertex")
    p.set_defaults(func=cmd_trivial_set)
    return parser


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "set_positional", None):
        if args.set:
            parser.error("give the model set either positionally or with --set, not both")
        args.set = args.set_positional
    try:
        args.func(args)
    except (InputError, ConfigError, InvalidArgumentError, PreconditionError, EmptyRegionError) as exc:
        print(f"isocond {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (DegenerateAlignmentError, IndeterminateRotationError) as exc:
        print(f"isocond {args.command}: numerical degeneracy: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if args.manifest:
        _write_manifest(args, argv)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
