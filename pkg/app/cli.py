"""
Command-line front end: ``holoweb <command> [inputs] [options]``.
"""
import argparse
import sys
from typing import List, Optional

from pydantic import ValidationError

from app.core.config import load_settings
from app.core.monitoring import setup_logging
from app.schemas.job_schemas import Command, JobOptions, JobSpec
from app.services.jobs import EXIT_INPUT_ERROR, render, run

_OPTION_FLAGS = ("seed", "samples", "tol", "step", "steps", "theta", "max_denominator", "residual_bound",
                 "brill_tolerance")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="holoweb",
        description="Exact and numeric computations with holomorphic webs, first integrals and Levi-flat hypersurfaces.",
    )
    p.add_argument("command", choices=[command.value for command in Command])
    p.add_argument("--web", help="Web file or inline planar form in x, y, dx, dy.")
    p.add_argument("--fi", help="First-integral file or inline polynomial in x, y, z.")
    p.add_argument("--clairaut", help="Clairaut f(p), as a polynomial in p.")
    p.add_argument("--plane", help="Comma separated n x 2 matrix entries (row-major) of a 2-plane.")
    p.add_argument("--point", help="Comma separated complex coordinates, e.g. '0,1' or '1,1,-1'.")
    p.add_argument("--function", help="Polynomial g(x, y, p) for charpoly (default: p).")
    p.add_argument("--s0", help="Leaf parameter (slope) of a Clairaut leaf to trace.")
    p.add_argument("--csv", help="Path for trace CSV output.")
    p.add_argument("--seed", type=int, help="Sampling seed (default: 0).")
    p.add_argument("--samples", type=int, help="Brill base points (default: 20).")
    p.add_argument("--tol", type=float, help="Fiber / classifier tolerance (default: 1e-6).")
    p.add_argument("--step", type=float, help="Tracer arc-length step (default: 1e-3).")
    p.add_argument("--steps", type=int, help="Tracer step count (default: 10000).")
    p.add_argument("--theta", type=float, help="Complex-time direction of traces (default: 0).")
    p.add_argument("--max-denominator", type=int, dest="max_denominator",
                   help="Largest denominator of eigenvalue ratios (default: 50).")
    p.add_argument("--residual-bound", type=float, dest="residual_bound",
                   help="Largest |F| accepted along traces (default: 1e-6).")
    p.add_argument("--brill-tolerance", type=float, dest="brill_tolerance",
                   help="Brill flatness and Levi-flat residual tolerance (default: 1e-8).")
    p.add_argument("--json", action="store_true", help="Print the report as JSON.")
    p.add_argument("--log-level", dest="log_level", help="Logging level (default: INFO).")
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = load_settings()
        setup_logging(args.log_level or settings.log_level)
        overrides = {name: getattr(args, name) for name in _OPTION_FLAGS if getattr(args, name) is not None}
        options = JobOptions(**{**JobOptions.from_settings(settings).model_dump(), **overrides})
        job = JobSpec(command=args.command, web=args.web, fi=args.fi, clairaut=args.clairaut, plane=args.plane,
                      point=args.point, function=args.function, s0=args.s0, csv=args.csv, options=options)
    except (ValueError, ValidationError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    outcome = run(job, settings)
    print(render(outcome.report, as_json=args.json))
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
