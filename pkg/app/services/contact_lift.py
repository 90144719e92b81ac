"""
Planar webs as implicit first-order ODEs on the contact chart p = dy/dx.
"""
import logging
from dataclasses import dataclass
from functools import cached_property, lru_cache, reduce

import numpy as np
from sympy.polys.domains import QQ_I

from app.core.errors import ConsistencyError, DegenerateWebError, DegreeError, HolowebError, SquareFactorError
from app.services.polynomial import MultiPoly, discriminant_in, gcd
from app.services.roots import RootCluster, cluster_roots, polynomial_roots
from app.services.web_model import PLANAR_COORDINATES, Web, differential, make_web

logger = logging.getLogger(__name__)

SLOPE = "p"
ODE_VARIABLES = PLANAR_COORDINATES + (SLOPE,)


@dataclass(frozen=True)
class ImplicitOde:
    """
    F(x, y, p) = a_0(x, y) p^k + ... + a_k(x, y) = 0.

    Attributes:
        F (MultiPoly): Defining polynomial over (x, y, p).
        k (int): Degree in p.
    """
    F: MultiPoly
    k: int

    def __post_init__(self) -> None:
        try:
            object.__setattr__(self, "F", self.F.with_variables(ODE_VARIABLES))
        except ValueError as e:
            raise HolowebError(f"an implicit ODE is a polynomial in x, y, p: {e}") from e
        if self.k < 1 or self.F.degree(SLOPE) != self.k:
            raise DegreeError(f"F has degree {self.F.degree(SLOPE)} in p, expected {self.k} >= 1")
        shared = reduce(gcd, self.F.coefficients(SLOPE))
        if not shared.is_constant:
            raise HolowebError(f"the coefficients of F share the factor {shared}")
        repeated = gcd(self.F, self.F.diff(SLOPE))
        if repeated.degree(SLOPE) > 0:
            raise SquareFactorError(f"square factor {repeated} in p")

    @cached_property
    def partials(self) -> tuple[MultiPoly, MultiPoly, MultiPoly]:
        """(F_x, F_y, F_p)."""
        return tuple(self.F.diff(name) for name in ODE_VARIABLES)

    def leading_coefficient(self) -> MultiPoly:
        return self.F.coefficient(SLOPE, self.k)


@dataclass(frozen=True)
class LiftedField:
    """Vector field (Vx, Vy, Vp) on (x, y, p)-space generating the foliation of F = 0."""
    Vx: MultiPoly
    Vy: MultiPoly
    Vp: MultiPoly

    @property
    def components(self) -> tuple[MultiPoly, MultiPoly, MultiPoly]:
        return self.Vx, self.Vy, self.Vp

    def tangency_defect(self, ode: ImplicitOde) -> MultiPoly:
        F_x, F_y, F_p = ode.partials
        return self.Vx * F_x + self.Vy * F_y + self.Vp * F_p

    def contact_defect(self) -> MultiPoly:
        return self.Vy - MultiPoly.variable(SLOPE, ODE_VARIABLES) * self.Vx


@dataclass(frozen=True)
class Fiber:
    """
    Roots of F(x0, y0, p) = 0.

    Attributes:
        base (tuple[complex, complex]): (x0, y0).
        roots (tuple[complex, ...]): All roots found by the root finder.
        clusters (tuple[RootCluster, ...]): Roots grouped by multiplicity.
        discriminant_value (complex | None): The reduced discriminant at the base, k >= 2.
    """
    base: tuple[complex, complex]
    roots: tuple[complex, ...]
    clusters: tuple[RootCluster, ...]
    discriminant_value: complex | None

    @property
    def distinct_roots(self) -> tuple[complex, ...]:
        return tuple(cluster.center for cluster in self.clusters)


def to_implicit_ode(web: Web) -> ImplicitOde:
    """
    Substitute dx -> 1, dy -> p in a planar web.

    Raises:
        DegenerateWebError: If a_0 vanishes identically (every leaf is
            tangent to the x-direction); run ``adapt_chart`` first.
    """
    if web.n != 2:
        raise HolowebError(f"implicit ODEs need a planar web, got n = {web.n}")
    first, second = web.coordinates
    p = MultiPoly.variable(SLOPE, ODE_VARIABLES)
    F = web.form.subs({
        first: MultiPoly.variable("x", ODE_VARIABLES),
        second: MultiPoly.variable("y", ODE_VARIABLES),
        differential(first): 1,
        differential(second): p,
    }).with_variables(ODE_VARIABLES)
    if F.degree(SLOPE) < web.k:
        raise DegenerateWebError("a_0 vanishes identically: the web contains the x-direction; adapt the chart first")
    ode = ImplicitOde(F, web.k)
    if ode.leading_coefficient().subs({"x": 0, "y": 0}).constant_value == QQ_I.zero:
        logger.warning("a_0(0, 0) = 0: the chart p = dy/dx is not adapted at the origin")
    return ode


def to_web(ode: ImplicitOde) -> Web:
    """Homogenize F: p^j -> dy^j dx^(k - j)."""
    variables = PLANAR_COORDINATES + tuple(map(differential, PLANAR_COORDINATES))
    terms = {(ex, ey, ode.k - ep, ep): c for (ex, ey, ep), c in ode.F.terms.items()}
    return make_web(MultiPoly(terms, variables), 2, ode.k)


def criminant_ideal(ode: ImplicitOde) -> tuple[MultiPoly, MultiPoly]:
    return ode.F, ode.partials[2]


@lru_cache(maxsize=128)
def discriminant_curve(ode: ImplicitOde) -> MultiPoly:
    """Reduced defining polynomial of the discriminant in (x, y)."""
    if ode.k < 2:
        raise DegreeError("a 1-web has an empty discriminant")
    return discriminant_in(ode.F, SLOPE).with_variables(PLANAR_COORDINATES)


def lifted_field(ode: ImplicitOde) -> LiftedField:
    """
    (F_p, p F_p, -(F_x + p F_y)), checked against both contact identities.

    Raises:
        ConsistencyError: If an identity fails (cannot happen for valid input).
    """
    F_x, F_y, F_p = ode.partials
    p = MultiPoly.variable(SLOPE, ODE_VARIABLES)
    field = LiftedField(F_p, p * F_p, -(F_x + p * F_y))
    if not field.tangency_defect(ode).is_zero or not field.contact_defect().is_zero:
        raise ConsistencyError("lifted field violates the contact identities")
    return field


def fiber_points(ode: ImplicitOde, x0: complex, y0: complex, tolerance: float = 1e-6) -> Fiber:
    """
    Roots of F(x0, y0, .) by simultaneous iteration.

    When |Delta(x0, y0)| < tolerance the roots are clustered and at least
    the closest pair is merged.
    """
    values = {"x": complex(x0), "y": complex(y0)}
    coefficients = [
        ode.F.coefficient(SLOPE, j).with_variables(PLANAR_COORDINATES).evaluate_numeric(values)
        for j in range(ode.k, -1, -1)
    ]
    roots = polynomial_roots(coefficients)
    delta = None
    near_discriminant = False
    if ode.k >= 2:
        delta = discriminant_curve(ode).evaluate_numeric(values)
        near_discriminant = abs(delta) < tolerance
    if near_discriminant:
        radius = np.sqrt(tolerance) * (1.0 + float(np.max(np.abs(roots))))
        clusters = cluster_roots(roots, radius, merge_closest=True)
        logger.debug("fiber over (%s, %s) lies on the discriminant: %d clusters", x0, y0, len(clusters))
    else:
        clusters = [RootCluster(complex(r), 1, (complex(r),)) for r in roots]
    return Fiber((complex(x0), complex(y0)), tuple(complex(r) for r in roots), tuple(clusters), delta)
