"""
Clairaut equations y = x p + f(p) and everything derived from them.
"""
import logging
from dataclasses import dataclass
from typing import Iterable

from sympy.polys.domains import QQ_I

from app.core.errors import ConsistencyError, DegreeError, HolowebError
from app.services.contact_lift import ODE_VARIABLES, SLOPE, ImplicitOde, discriminant_curve, to_web
from app.services.elimination import PARAMETER, FirstIntegral, leviflat_from_first_integral
from app.services.polynomial import HermitianPoly, MultiPoly
from app.services.web_model import Web

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ClairautEquation:
    """
    y = x p + f(p) with f monic of degree k >= 2.

    Attributes:
        f (MultiPoly): Univariate polynomial over (p,).
    """
    f: MultiPoly

    def __post_init__(self) -> None:
        try:
            f = self.f.with_variables((SLOPE,))
        except ValueError as e:
            raise HolowebError(f"f must be a polynomial in {SLOPE} only") from e
        if f.degree(SLOPE) < 2:
            raise DegreeError(f"Clairaut equations need deg f >= 2, got {f.degree(SLOPE)}")
        object.__setattr__(self, "f", f.scale(QQ_I.one / f.coefficient(SLOPE, f.degree(SLOPE)).constant_value))

    @property
    def k(self) -> int:
        return self.f.degree(SLOPE)

    def f_at(self, name: str, variables: tuple[str, ...]) -> MultiPoly:
        """f with its variable renamed to ``name`` and embedded over ``variables``."""
        return self.f.rename({SLOPE: name}).with_variables(variables)


def _ode_variable(name: str) -> MultiPoly:
    return MultiPoly.variable(name, ODE_VARIABLES)


def clairaut_ode(eq: ClairautEquation) -> ImplicitOde:
    x, y, p = (_ode_variable(name) for name in ODE_VARIABLES)
    return ImplicitOde(y - x * p - eq.f_at(SLOPE, ODE_VARIABLES), eq.k)


def clairaut_first_integral(eq: ClairautEquation) -> FirstIntegral:
    """P(z) = f(z) + x z - y; its levels are the lines y = z x + f(z)."""
    variables = ("x", "y", PARAMETER)
    x, y, z = (MultiPoly.variable(name, variables) for name in variables)
    return FirstIntegral.from_polynomial(eq.f_at(PARAMETER, variables) + x * z - y)


def clairaut_criminant(eq: ClairautEquation) -> tuple[MultiPoly, MultiPoly]:
    x = _ode_variable("x")
    F = clairaut_ode(eq).F
    return F, x + eq.f_at(SLOPE, ODE_VARIABLES).diff(SLOPE)


def clairaut_alpha_restriction(eq: ClairautEquation) -> MultiPoly:
    """
    Coefficient of dp in (dy - p dx) restricted to y = x p + f(p), chart (x, p).

    Raises:
        ConsistencyError: If the dx-coefficient does not cancel.
    """
    chart = ("x", SLOPE)
    x, p = (MultiPoly.variable(name, chart) for name in chart)
    y = x * p + eq.f_at(SLOPE, chart)
    dx_coefficient = y.diff("x") - p
    if not dx_coefficient.is_zero:
        raise ConsistencyError(f"dx-coefficient {dx_coefficient} of the restricted contact form does not cancel")
    return y.diff(SLOPE).with_variables(ODE_VARIABLES)


def clairaut_web(eq: ClairautEquation) -> Web:
    return to_web(clairaut_ode(eq))


def clairaut_envelope(eq: ClairautEquation) -> MultiPoly:
    """The singular solution: discriminant curve of the equation."""
    return discriminant_curve(clairaut_ode(eq))


def clairaut_leviflat(eq: ClairautEquation) -> HermitianPoly:
    return leviflat_from_first_integral(clairaut_first_integral(eq))


def leaf_points(eq: ClairautEquation, s0: complex, xs: Iterable[complex]) -> list[tuple[complex, complex, complex]]:
    """Points (x, s0 x + f(s0), s0) of the leaf with slope s0, in (x, y, p) coordinates."""
    s0 = complex(s0)
    f_value = eq.f.evaluate_numeric({SLOPE: s0})
    return [(complex(x), s0 * complex(x) + f_value, s0) for x in xs]


def leaf_start(eq: ClairautEquation, s0: complex, distance: float = 2.0) -> tuple[complex, complex, complex]:
    """A leaf point at distance ``distance`` in x from the envelope contact point x = -f'(s0)."""
    contact = -eq.f.diff(SLOPE).evaluate_numeric({SLOPE: complex(s0)})
    return leaf_points(eq, s0, [contact + distance])[0]

