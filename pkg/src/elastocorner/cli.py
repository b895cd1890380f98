'''The `elastocorner` command line.

    elastocorner verify [--suite NAME] [--seed N] [--json PATH]
    elastocorner farfield --scene PATH [--directions M] [--out CSV] [--json PATH]
    elastocorner witness --scene PATH --vertex I [--s-grid a,b,c] [--out CSV] [--json PATH]
    elastocorner moment --scene PATH --vertex I [--s-grid a,b,c] [--out CSV] [--json PATH]
    elastocorner nonradiating [--omega W] [--zero-p P] [--zero-s S] [--directions M] [--lambda L --mu M]
    elastocorner reduce --prism PATH [--xi a,b,c] [--json PATH]

Reports are JSON with sorted keys, written to `--json` or standard output; plot data is CSV. The exit code is 0 on
success, 1 when a check fails and 2 for usage, parsing and input errors.
'''
import argparse
import json
import logging
import sys
from pathlib import Path

import elastocorner
from elastocorner import ElastoCornerException
from elastocorner.config import Convention, to_convention
from elastocorner.corner import (DimensionReductionSpec, ManufacturedCornerField, edge_vanishing_demo, moment_sweep,
                                 reduced_equation_check, witness)
from elastocorner.elastic import LameParameters, far_field_pattern
from elastocorner.geometry import corner_chart
from elastocorner.nonradiating import verify_nonradiating
from elastocorner.scene import load_prism, load_scene
from elastocorner.verify import SUITES, run_checks


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def _float_list(text: str) -> tuple:
    '''Parses "a,b,c" into a tuple of floats.'''
    try:
        values = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"'{text}' is not a comma-separated list of numbers") from None
    if not values:
        raise argparse.ArgumentTypeError("the list is empty")
    return values


def _emit(report: dict, path=None):
    text = json.dumps(report, sort_keys=True, indent=2)
    if path:
        Path(path).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _load(args):
    parsed = load_scene(args.scene)
    if args.convention is None and parsed.convention is not None:
        elastocorner.settings().convention = parsed.convention
    return parsed.scene


def cmd_verify(args) -> int:
    report = run_checks(args.suite, args.seed)
    _emit(report, args.json)
    logger.info("%d of %d checks passed", report["count"] - len(report["failed"]), report["count"])
    return EXIT_OK if report["passed"] else EXIT_FAILED


def cmd_farfield(args) -> int:
    scene = _load(args)
    pattern = far_field_pattern(scene, args.directions)
    if args.out:
        pattern.to_csv(args.out)
    _emit({"scene": scene.name, "dim": scene.dim, "directions": len(pattern),
           "max_magnitude": pattern.max_magnitude, "projection_defect": pattern.projection_defect(),
           "csv": str(args.out) if args.out else None}, args.json)
    return EXIT_OK


def _polygon_chart(scene, vertex):
    if scene.dim != 2:
        raise UsageError("Corner commands need a 2D polygon scene")
    return corner_chart(scene.support, vertex)


def cmd_witness(args) -> int:
    scene = _load(args)
    chart = _polygon_chart(scene, args.vertex)
    sweep = witness(scene, args.vertex, args.s_grid)
    moments = moment_sweep(scene.density, chart, args.s_grid, scene.holder_alpha)
    if args.out:
        sweep.to_csv(args.out)
    _emit({"scene": scene.name, "vertex": args.vertex, "opening": chart.sector.opening, "h": chart.h,
           "witness": sweep.to_dict(), "moment": moments.to_dict()}, args.json)
    return EXIT_OK


def cmd_moment(args) -> int:
    scene = _load(args)
    chart = _polygon_chart(scene, args.vertex)
    sweep = moment_sweep(scene.density, chart, args.s_grid, scene.holder_alpha)
    if args.out:
        sweep.to_csv(args.out)
    _emit({"scene": scene.name, "vertex": args.vertex, "opening": chart.sector.opening, "h": chart.h,
           "moment": sweep.to_dict()}, args.json)
    return EXIT_OK


def cmd_nonradiating(args) -> int:
    material = None
    if (args.lam is None) != (args.mu is None):
        raise UsageError("--lambda and --mu must be given together")
    if args.lam is not None:
        material = LameParameters(args.lam, args.mu, 3)
    report = verify_nonradiating(args.omega, args.zero_p, args.zero_s, args.directions, material)
    _emit(report, args.json)
    return EXIT_OK


def cmd_reduce(args) -> int:
    prism = load_prism(args.prism)
    xis = args.xi if args.xi is not None else prism.xis
    if not xis:
        raise UsageError("At least one ξ is needed")
    convention = args.convention or prism.convention
    field = ManufacturedCornerField(prism.chart, prism.core)
    specs = [DimensionReductionSpec(xi, prism.L, width=prism.width) for xi in xis]
    report = {"name": prism.name, "check": reduced_equation_check(field, specs, prism.material, prism.omega,
                                                                  convention)}
    if prism.edge_density is not None:
        report["edge"] = edge_vanishing_demo(prism.edge_density, xis, prism.chart, prism.L, args.s_grid,
                                             prism.chart.h, prism.width)
    _emit(report, args.json)
    return EXIT_OK if report["check"]["passed"] else EXIT_FAILED


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", help="log progress at DEBUG level")
    common.add_argument("--json", type=Path, help="write the JSON report here instead of standard output")
    common.add_argument("--convention", choices=[c.value for c in Convention],
                        help="operator convention (default: the scene's, else the package setting)")

    parser = argparse.ArgumentParser(prog="elastocorner", description="Corner scattering checks for elastic sources.")
    commands = parser.add_subparsers(dest="command", required=True)

    verify = commands.add_parser("verify", parents=[common], help="run the numerical checks")
    verify.add_argument("--suite", default="all", choices=("all",) + SUITES)
    verify.add_argument("--seed", type=int, default=0, help="seed of the randomised checks")
    verify.set_defaults(func=cmd_verify)

    farfield = commands.add_parser("farfield", parents=[common], help="far-field pattern of a scene")
    farfield.add_argument("--scene", type=Path, required=True)
    farfield.add_argument("--directions", type=int, default=64)
    farfield.add_argument("--out", type=Path, help="CSV of the far-field pattern")
    farfield.set_defaults(func=cmd_farfield)

    for name, func, text in (("witness", cmd_witness, "corner witness of a polygon scene"),
                             ("moment", cmd_moment, "scaled corner moments of a polygon scene")):
        sub = commands.add_parser(name, parents=[common], help=text)
        sub.add_argument("--scene", type=Path, required=True)
        sub.add_argument("--vertex", type=int, default=0)
        sub.add_argument("--s-grid", type=_float_list, help="comma-separated probe parameters")
        sub.add_argument("--out", type=Path, help="CSV of s, |value|, arg value")
        sub.set_defaults(func=func)

    nonradiating = commands.add_parser("nonradiating", parents=[common], help="the nonradiating ball source")
    nonradiating.add_argument("--omega", type=float, default=1.0)
    nonradiating.add_argument("--zero-p", type=int, default=1, help="index of the J_{3/2} zero used for ω_p")
    nonradiating.add_argument("--zero-s", type=int, default=2, help="index of the J_{3/2} zero used for ω_s")
    nonradiating.add_argument("--directions", type=int, default=64)
    nonradiating.add_argument("--lambda", dest="lam", type=float, help="override the tuned λ")
    nonradiating.add_argument("--mu", type=float, help="override the tuned μ")
    nonradiating.set_defaults(func=cmd_nonradiating)

    reduce = commands.add_parser("reduce", parents=[common], help="dimension reduction along an edge")
    reduce.add_argument("--prism", type=Path, required=True)
    reduce.add_argument("--xi", type=_float_list, help="comma-separated frequencies (default: the prism file's)")
    reduce.add_argument("--s-grid", type=_float_list)
    reduce.set_defaults(func=cmd_reduce)
    return parser


def main(argv=None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    config = elastocorner.settings()
    saved = config.convention
    try:
        if args.convention is not None:
            config.convention = to_convention(args.convention)
        return args.func(args)
    except (ElastoCornerException, OSError) as e:
        logger.debug("Command failed", exc_info=True)
        print(f"elastocorner {args.command}: {e}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        config.convention = saved


class UsageError(ElastoCornerException):
    '''Raised for command-line arguments that are individually valid but do not fit together.'''


if __name__ == "__main__":
    sys.exit(main())
