"""
Floating-point evidence: leaf tracing, Levi-flat residuals along leaves and
eigenvalue classification of singular points of the lifted field.
"""
import csv
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Callable, Sequence, TextIO

import numpy as np

from app.core.errors import (
    DegenerateChartError,
    NearCriminantError,
    NotSingularError,
    ResidualExceededError,
    StartNotOnSurfaceError,
)
from app.core.monitoring import timeit
from app.services.contact_lift import ODE_VARIABLES, ImplicitOde, lifted_field
from app.services.elimination import leviflat_residuals
from app.services.polynomial import HermitianPoly

logger = logging.getLogger(__name__)

START_TOLERANCE = 1e-8
CRIMINANT_TOLERANCE = 1e-8
CSV_HEADER = ("x_re", "x_im", "y_re", "y_im", "p_re", "p_im", "residual")

Point = tuple[complex, complex, complex]


@dataclass(frozen=True)
class LeafTrace:
    """
    Attributes:
        points (tuple[Point, ...]): Successive (x, y, p) points, start included.
        residuals (tuple[float, ...]): |F| at each point.
        step (float): Nominal arc-length step.
        residual_max (float): Largest recorded residual.
        theta (float): Complex-time direction e^{i theta}.
    """
    points: tuple[Point, ...]
    residuals: tuple[float, ...]
    step: float
    residual_max: float
    theta: float = 0.0


class Verdict(str, Enum):
    SADDLE = "saddle_with_first_integral_candidate"
    NON_REDUCED = "non_reduced"
    OTHER = "other"


@dataclass(frozen=True)
class SingularityReport:
    location: Point
    eigenvalues: tuple[complex, complex]
    ratio: complex | None
    verdict: Verdict
    rational_approx: tuple[int, int] | None = None
    chart: tuple[str, str] = ("x", "p")
    first_integral_model: str | None = None


@dataclass(frozen=True)
class LeviFlatCheck:
    passed: bool
    max_residual: float
    points: int
    parameter: complex | None = None


@dataclass
class _OdeNumerics:
    F: Callable[..., complex]
    gradient: list[Callable[..., complex]]
    vector: list[Callable[..., complex]]
    jacobian: list[list[Callable[..., complex]]]


@lru_cache(maxsize=64)
def _numerics(ode: ImplicitOde) -> _OdeNumerics:
    vector = lifted_field(ode).components
    return _OdeNumerics(
        F=ode.F.numeric_function(),
        gradient=[g.numeric_function() for g in ode.partials],
        vector=[v.numeric_function() for v in vector],
        jacobian=[[v.diff(name).numeric_function() for name in ODE_VARIABLES] for v in vector],
    )


def _evaluate(functions: Sequence[Callable[..., complex]], state: np.ndarray) -> np.ndarray:
    return np.array([fn(*state) for fn in functions], dtype=complex)


@timeit
def trace_leaf(ode: ImplicitOde, start: Sequence[complex], step: float = 1e-3, steps: int = 10_000,
               theta: float = 0.0, residual_bound: float = 1e-6) -> LeafTrace:
    """
    Follow the leaf of the lifted field through ``start``.

    Classical fourth-order Runge-Kutta on e^{i theta} V / |V| (so ``step`` is
    the arc length of each step), followed by one Newton correction of p
    back onto F = 0.

    Raises:
        StartNotOnSurfaceError: If |F(start)| >= 1e-8.
        NearCriminantError: If |F_p| < 1e-8 at a step; carries the partial trace.
        ResidualExceededError: If |F| exceeds ``residual_bound``; carries the partial trace.
    """
    numerics = _numerics(ode)
    state = np.array([complex(c) for c in start], dtype=complex)
    residual = abs(numerics.F(*state))
    if residual >= START_TOLERANCE:
        raise StartNotOnSurfaceError(f"|F(start)| = {residual:.3e} is not below {START_TOLERANCE}")
    direction = np.exp(1j * theta)
    points, residuals = [tuple(state)], [residual]

    def partial() -> LeafTrace:
        return LeafTrace(tuple(points), tuple(residuals), step, max(residuals), theta)

    def velocity(s: np.ndarray) -> np.ndarray:
        v = _evaluate(numerics.vector, s)
        norm = np.linalg.norm(v)
        if norm < CRIMINANT_TOLERANCE:
            raise NearCriminantError(f"lifted field vanishes near {tuple(s)}", trace=partial())
        return direction * v / norm

    if abs(numerics.gradient[2](*state)) < CRIMINANT_TOLERANCE:
        raise NearCriminantError("start lies on the criminant", trace=partial())
    for _ in range(steps):
        k1 = velocity(state)
        k2 = velocity(state + 0.5 * step * k1)
        k3 = velocity(state + 0.5 * step * k2)
        k4 = velocity(state + step * k3)
        state = state + step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        F_p = numerics.gradient[2](*state)
        if abs(F_p) < CRIMINANT_TOLERANCE:
            raise NearCriminantError(f"|F_p| = {abs(F_p):.3e} near {tuple(state)}", trace=partial())
        state[2] -= numerics.F(*state) / F_p
        residual = abs(numerics.F(*state))
        if residual > residual_bound:
            raise ResidualExceededError(f"|F| = {residual:.3e} exceeds {residual_bound}", trace=partial())
        points.append(tuple(state))
        residuals.append(residual)
    trace = partial()
    logger.debug("traced %d steps, residual_max %.3e", steps, trace.residual_max)
    return trace


def trace_leaves(ode: ImplicitOde, starts: Sequence[Sequence[complex]], step: float = 1e-3, steps: int = 10_000,
                 theta: float = 0.0, residual_bound: float = 1e-6, workers: int | None = None) -> list[LeafTrace]:
    """Independent traces on a thread pool, returned in the order of ``starts``."""
    _numerics(ode)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(trace_leaf, ode, start, step, steps, theta, residual_bound) for start in starts]
        return [future.result() for future in futures]


def trace_to_csv(trace: LeafTrace, target: str | Path | TextIO) -> None:
    """Write one row per point: x_re,x_im,y_re,y_im,p_re,p_im,residual."""
    if isinstance(target, (str, Path)):
        with open(target, "w", newline="") as stream:
            trace_to_csv(trace, stream)
        return
    writer = csv.writer(target)
    writer.writerow(CSV_HEADER)
    for (x, y, p), residual in zip(trace.points, trace.residuals):
        writer.writerow([repr(x.real), repr(x.imag), repr(y.real), repr(y.imag),
                         repr(p.real), repr(p.imag), repr(residual)])


def leaf_in_leviflat(trace: LeafTrace, F: HermitianPoly, tolerance: float = 1e-8,
                     parameter: complex | None = None) -> LeviFlatCheck:
    """Largest Levi-flat residual over the (x, y) projections of the trace points."""
    worst = float(leviflat_residuals(F, [point[:2] for point in trace.points]).max())
    return LeviFlatCheck(worst <= tolerance, worst, len(trace.points), parameter)


def _model_first_integral(p: int, q: int) -> str:
    def power(name: str, exponent: int) -> str:
        return name if exponent == 1 else f"{name}^{exponent}"

    return f"{power('u', p)}*{power('v', q)}"


def classify_singularity(ode: ImplicitOde, point: Sequence[complex], tol: float = 1e-6,
                         max_denominator: int = 50) -> SingularityReport:
    """
    Eigenvalue test for a singular point of the lifted field on F = 0.

    The surface is charted by the two coordinates other than the largest
    component of grad F; the third coordinate is the implicit function of
    those two. With eigenvalues sorted by modulus (l1 the smaller), the
    point is a saddle candidate when l2 / l1 is within ``tol`` of a negative
    rational -p/q with q <= ``max_denominator``.

    Raises:
        NotSingularError: If the point is off the surface or the field does not vanish.
        DegenerateChartError: If grad F vanishes (singular point of the surface).
    """
    numerics = _numerics(ode)
    state = np.array([complex(c) for c in point], dtype=complex)
    if abs(numerics.F(*state)) > tol:
        raise NotSingularError(f"point {tuple(state)} is not on F = 0")
    if np.max(np.abs(_evaluate(numerics.vector, state))) > tol:
        raise NotSingularError(f"lifted field does not vanish at {tuple(state)}")
    gradient = _evaluate(numerics.gradient, state)
    if np.max(np.abs(gradient)) < tol:
        raise DegenerateChartError(f"grad F vanishes at {tuple(state)}: singular point of the surface")

    dependent = int(np.argmax(np.abs(gradient)))
    chart = [i for i in range(3) if i != dependent]
    jacobian = np.array([_evaluate(row, state) for row in numerics.jacobian])
    slope = -gradient[chart] / gradient[dependent]
    reduced = jacobian[np.ix_(chart, chart)] + np.outer(jacobian[chart, dependent], slope)
    eigenvalues = sorted(np.linalg.eigvals(reduced), key=lambda value: (abs(value), value.real, value.imag))
    small, large = (complex(value) for value in eigenvalues)
    chart_names = (ODE_VARIABLES[chart[0]], ODE_VARIABLES[chart[1]])
    location = tuple(complex(c) for c in state)

    if abs(large) == 0.0 or abs(small) <= tol * abs(large):
        return SingularityReport(location, (small, large), None, Verdict.NON_REDUCED, chart=chart_names)
    ratio = large / small
    scale = max(1.0, abs(ratio))
    if abs(ratio.imag) <= tol * scale and ratio.real < 0:
        fraction = Fraction(-ratio.real).limit_denominator(max_denominator)
        if fraction > 0 and abs(-float(fraction) - ratio) <= tol * scale:
            p, q = fraction.numerator, fraction.denominator
            return SingularityReport(location, (small, large), ratio, Verdict.SADDLE, (p, q), chart_names,
                                     _model_first_integral(p, q))
    return SingularityReport(location, (small, large), ratio, Verdict.OTHER, chart=chart_names)
