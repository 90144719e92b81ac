"""
Command dispatch shared by the CLI and the HTTP surface.
"""
import json
import logging
import threading
from pathlib import Path
from typing import Any, Callable, NamedTuple

from app.core.config import Settings, get_settings
from app.core.errors import FormatError, HolowebError
from app.schemas.job_schemas import Command, JobOptions, JobReport, JobSpec
from app.services.clairaut import (
    ClairautEquation,
    clairaut_alpha_restriction,
    clairaut_criminant,
    clairaut_envelope,
    clairaut_first_integral,
    clairaut_leviflat,
    clairaut_ode,
    clairaut_web,
    leaf_start,
)
from app.services.contact_lift import (
    ImplicitOde,
    criminant_ideal,
    discriminant_curve,
    fiber_points,
    lifted_field,
    to_implicit_ode,
)
from app.services.elimination import (
    FirstIntegral,
    annihilates,
    char_poly_of_function,
    leviflat_from_first_integral,
    leviflat_membership,
    verify_first_integral,
)
from app.services.formats import (
    parse_clairaut_text,
    parse_first_integral_text,
    parse_function_text,
    parse_plane,
    parse_point,
    parse_web_text,
    read_input,
)
from app.services.numeric_lab import classify_singularity, leaf_in_leviflat, trace_leaves, trace_to_csv
from app.services.web_model import Web, adapt_chart, brill_check, restrict_to_plane

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_INPUT_ERROR = 2


class JobOutcome(NamedTuple):
    exit_code: int
    report: JobReport


class _Diagnostics(logging.Handler):
    """Collects warnings logged by the services on the calling thread."""

    def __init__(self) -> None:
        super().__init__(level=logging.WARNING)
        self.thread = threading.get_ident()
        self.messages: list[str] = []

    def emit(self, record: logging.LogRecord) -> None:
        if record.thread == self.thread:
            self.messages.append(record.getMessage())


def _complex(value: complex) -> list[float]:
    return [float(value.real), float(value.imag)]


def _require(job: JobSpec, name: str) -> str:
    value = getattr(job, name)
    if value is None:
        raise FormatError(f"{job.command.value} needs --{name}")
    return value


def _web(job: JobSpec) -> Web:
    return parse_web_text(read_input(_require(job, "web")))


def _first_integral(job: JobSpec) -> FirstIntegral:
    return parse_first_integral_text(read_input(_require(job, "fi")))


def _clairaut(job: JobSpec) -> ClairautEquation:
    return parse_clairaut_text(read_input(_require(job, "clairaut")))


def _ode(job: JobSpec, result: dict[str, Any]) -> ImplicitOde:
    """The ODE of --clairaut, else of --web in an adapted chart."""
    if job.clairaut is not None:
        return clairaut_ode(_clairaut(job))
    web, change = adapt_chart(_web(job))
    if not change.is_identity:
        logger.warning("chart adapted by the linear change %s", [list(row) for row in change.matrix])
        result["chart_change"] = [list(row) for row in change.matrix]
    return to_implicit_ode(web)


def _validate(job: JobSpec, options: JobOptions) -> tuple[bool, dict]:
    web = _web(job)
    brill = brill_check(web, options.samples, options.brill_tolerance, options.seed)
    result = {"n": web.n, "k": web.k, "coordinates": list(web.coordinates), "form": str(web.form), "brill": brill}
    if job.plane is not None:
        result["restricted"] = str(restrict_to_plane(web, parse_plane(read_input(job.plane))).form)
    return brill, result


def _lift(job: JobSpec, options: JobOptions) -> tuple[bool, dict]:
    result: dict[str, Any] = {}
    ode = _ode(job, result)
    field = lifted_field(ode)
    result.update({
        "F": str(ode.F),
        "k": ode.k,
        "field": [str(component) for component in field.components],
        "criminant": [str(component) for component in criminant_ideal(ode)],
    })
    return True, result


def _discriminant(job: JobSpec, options: JobOptions) -> tuple[bool, dict]:
    result: dict[str, Any] = {}
    ode = _ode(job, result)
    result.update({"F": str(ode.F), "discriminant": str(discriminant_curve(ode))})
    return True, result


def _verify_fi(job: JobSpec, options: JobOptions) -> tuple[bool, dict]:
    verification = verify_first_integral(_web(job), _first_integral(job))
    return verification.verified, {"verified": verification.verified, "reason": verification.reason,
                                   "detail": verification.detail}


def _leviflat(job: JobSpec, options: JobOptions) -> tuple[bool, dict]:
    P = clairaut_first_integral(_clairaut(job)) if job.clairaut is not None else _first_integral(job)
    F = leviflat_from_first_integral(P)
    result: dict[str, Any] = {"first_integral": str(P), "leviflat": str(F), "variables": list(F.base.variables),
                              "real": F.is_real()}
    if job.point is None:
        return True, result
    membership = leviflat_membership(F, parse_point(job.point, len(F.holomorphic_variables)), options.tol)
    result["membership"] = {"member": membership.member, "residual": membership.residual}
    return membership.member, result


def _charpoly(job: JobSpec, options: JobOptions) -> tuple[bool, dict]:
    result: dict[str, Any] = {}
    ode = _ode(job, result)
    g = parse_function_text(job.function or "p")
    P = char_poly_of_function(ode, g)
    square_free = P.is_square_free()
    result.update({"F": str(ode.F), "function": str(g), "P": str(P), "annihilates": annihilates(ode, g, P),
                   "square_free": square_free})
    return result["annihilates"], result


def _clairaut_job(job: JobSpec, options: JobOptions) -> tuple[bool, dict]:
    eq = _clairaut(job)
    P = clairaut_first_integral(eq)
    web = clairaut_web(eq)
    verification = verify_first_integral(web, P)
    closure = char_poly_of_function(clairaut_ode(eq), parse_function_text("p")) == P
    result = {
        "f": str(eq.f),
        "F": str(clairaut_ode(eq).F),
        "web": str(web.form),
        "first_integral": str(P),
        "criminant": [str(component) for component in clairaut_criminant(eq)],
        "alpha_restriction": str(clairaut_alpha_restriction(eq)),
        "envelope": str(clairaut_envelope(eq)),
        "leviflat": str(clairaut_leviflat(eq)),
        "verified": verification.verified,
        "char_poly_closure": closure,
    }
    return verification.verified and closure, result


def _trace(job: JobSpec, options: JobOptions) -> tuple[bool, dict]:
    result: dict[str, Any] = {}
    ode = _ode(job, result)
    s0 = parse_point(job.s0, 1)[0] if job.s0 is not None else None
    if job.point is not None:
        point = parse_point(job.point)
        if len(point) == 3:
            starts = [point]
        elif len(point) == 2:
            fiber = fiber_points(ode, point[0], point[1], options.tol)
            starts = [(point[0], point[1], root) for root in fiber.distinct_roots]
        else:
            raise FormatError("trace --point takes x,y (all sheets) or x,y,p")
    elif s0 is not None and job.clairaut is not None:
        starts = [leaf_start(_clairaut(job), s0)]
    else:
        raise FormatError("trace needs --point, or --clairaut with --s0")

    traces = trace_leaves(ode, starts, options.step, options.steps, options.theta, options.residual_bound)
    result["traces"] = [{"start": [_complex(c) for c in trace.points[0]], "end": [_complex(c) for c in trace.points[-1]],
                         "points": len(trace.points), "residual_max": trace.residual_max} for trace in traces]
    ok = True
    leviflat = None
    if job.clairaut is not None:
        leviflat = clairaut_leviflat(_clairaut(job))
    elif job.fi is not None:
        leviflat = leviflat_from_first_integral(_first_integral(job))
    if leviflat is not None:
        checks = [leaf_in_leviflat(trace, leviflat, options.brill_tolerance, s0) for trace in traces]
        result["leviflat"] = [{"passed": check.passed, "max_residual": check.max_residual} for check in checks]
        if s0 is not None:
            result["s0"] = _complex(s0)
        ok = all(check.passed for check in checks)
    if job.csv is not None:
        result["csv"] = _write_csv(traces, Path(job.csv))
    return ok, result


def _write_csv(traces, path: Path) -> list[str]:
    if len(traces) == 1:
        paths = [path]
    else:
        paths = [path.with_name(f"{path.stem}-{j}{path.suffix}") for j in range(len(traces))]
    for trace, target in zip(traces, paths):
        trace_to_csv(trace, target)
    return [str(target) for target in paths]


def _classify(job: JobSpec, options: JobOptions) -> tuple[bool, dict]:
    result: dict[str, Any] = {}
    ode = _ode(job, result)
    report = classify_singularity(ode, parse_point(_require(job, "point"), 3), options.tol, options.max_denominator)
    result.update({
        "location": [_complex(c) for c in report.location],
        "chart": list(report.chart),
        "eigenvalues": [_complex(value) for value in report.eigenvalues],
        "ratio": None if report.ratio is None else _complex(report.ratio),
        "verdict": report.verdict.value,
        "rational_approx": None if report.rational_approx is None else list(report.rational_approx),
        "first_integral_model": report.first_integral_model,
    })
    return True, result


HANDLERS: dict[Command, Callable[[JobSpec, JobOptions], tuple[bool, dict]]] = {
    Command.VALIDATE: _validate,
    Command.LIFT: _lift,
    Command.DISCRIMINANT: _discriminant,
    Command.VERIFY_FI: _verify_fi,
    Command.LEVIFLAT: _leviflat,
    Command.CHARPOLY: _charpoly,
    Command.CLAIRAUT: _clairaut_job,
    Command.TRACE: _trace,
    Command.CLASSIFY: _classify,
}


def run(job: JobSpec, settings: Settings | None = None) -> JobOutcome:
    """
    Run one job.

    Args:
        job (JobSpec): Command and inputs.
        settings (Settings | None): Defaults for options the job leaves unset.

    Returns:
        JobOutcome: Exit code (0 success, 1 false verdict, 2 input error) and the report.
    """
    options = job.options or JobOptions.from_settings(settings or get_settings())
    diagnostics = _Diagnostics()
    root = logging.getLogger("app")
    root.addHandler(diagnostics)
    try:
        ok, result = HANDLERS[job.command](job, options)
        exit_code = EXIT_OK if ok else EXIT_FALSE
    except HolowebError as e:
        logger.info("%s rejected: %s", job.command.value, e)
        result = {"error": str(e), "kind": type(e).__name__}
        exit_code = EXIT_INPUT_ERROR
    finally:
        root.removeHandler(diagnostics)
    report = JobReport(command=job.command.value, options=options.model_dump(), result=result,
                       diagnostics=diagnostics.messages)
    return JobOutcome(exit_code, report)


def render(report: JobReport, as_json: bool = False) -> str:
    """Indented JSON, or one "key: value" line per result entry."""
    if as_json:
        return report.model_dump_json(indent=2)
    lines = [f"command: {report.command}"]
    for key, value in report.result.items():
        lines.append(f"{key}: {_text_value(value)}")
    lines += [f"diagnostic: {message}" for message in report.diagnostics]
    return "\n".join(lines)


def _text_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (list, dict)):
        return json.dumps(value)
    if value is None:
        return "none"
    return str(value)
