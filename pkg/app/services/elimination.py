"""
First integrals and Levi-flat hypersurfaces by elimination.

A monic first integral P(z) = f_0 + f_1 z + ... + z^k determines its web by
eliminating z from P = dP = 0, and a real hypersurface by eliminating z from
P = conj(P) = 0. Both eliminations are Sylvester resultants.
"""
import logging
from dataclasses import InitVar, dataclass
from typing import NamedTuple, Sequence

import numpy as np
from sympy.polys.domains import QQ_I

from app.core.errors import (
    ConsistencyError,
    DegenerateWebError,
    DegreeError,
    HolowebError,
    NonRealValueError,
    NotNormalizableError,
    SquareFactorError,
    ZeroResultantError,
)
from app.core.monitoring import timeit
from app.services.contact_lift import ODE_VARIABLES, SLOPE, ImplicitOde
from app.services.polynomial import (
    HermitianPoly,
    MultiPoly,
    conj_swap,
    conjugate_pairing,
    gcd,
    pseudo_remainder,
    resultant,
    union_variables,
)
from app.services.web_model import (
    PLANAR_COORDINATES,
    Web,
    differential,
    differential_degree,
    differential_square_free_part,
    make_web,
    remove_content,
)

logger = logging.getLogger(__name__)

PARAMETER = "z"
FAMILY_PARAMETER = "s"


@dataclass(frozen=True)
class FirstIntegral:
    """
    Monic polynomial family P(z) = f_0 + f_1 z + ... + f_{k-1} z^{k-1} + z^k.

    Attributes:
        coefficients (tuple[MultiPoly, ...]): f_0 .. f_{k-1}, over ``coordinates``.
        coordinates (tuple[str, ...]): Base coordinates.
        parameter (str): Name of the level variable.
        check (bool): Reject families that are not square-free in the parameter.
    """
    coefficients: tuple[MultiPoly, ...]
    coordinates: tuple[str, ...] = PLANAR_COORDINATES
    parameter: str = PARAMETER
    check: InitVar[bool] = True

    def __post_init__(self, check: bool) -> None:
        if not self.coefficients:
            raise DegreeError("a first integral has degree k >= 1")
        if self.parameter in self.coordinates:
            raise HolowebError(f"parameter {self.parameter} clashes with a coordinate")
        try:
            aligned = tuple(f.with_variables(self.coordinates) for f in self.coefficients)
        except ValueError as e:
            raise HolowebError(f"first integral coefficients must be polynomials in {self.coordinates}") from e
        object.__setattr__(self, "coefficients", aligned)
        object.__setattr__(self, "coordinates", tuple(self.coordinates))
        if check and not self.is_square_free():
            raise SquareFactorError(f"{self.polynomial()} has a square factor in {self.parameter}")

    @classmethod
    def from_polynomial(cls, P: MultiPoly, coordinates: Sequence[str] = PLANAR_COORDINATES,
                        parameter: str = PARAMETER, check: bool = True) -> "FirstIntegral":
        """
        Read the coefficients of a polynomial in ``coordinates`` and ``parameter``.

        A constant leading coefficient is divided out.

        Raises:
            DegreeError: If P has degree zero in the parameter.
            NotNormalizableError: If the leading coefficient is not a constant.
        """
        k = P.degree(parameter)
        if k < 1:
            raise DegreeError(f"{P} has degree zero in {parameter}")
        lead = P.coefficient(parameter, k)
        if not lead.is_constant:
            raise NotNormalizableError(f"leading coefficient {lead} in {parameter} is not a unit")
        P = P.scale(QQ_I.one / lead.constant_value)
        return cls(tuple(P.coefficient(parameter, j) for j in range(k)), tuple(coordinates), parameter, check)

    @property
    def k(self) -> int:
        return len(self.coefficients)

    @property
    def variables(self) -> tuple[str, ...]:
        return self.coordinates + (self.parameter,)

    def polynomial(self) -> MultiPoly:
        z = MultiPoly.variable(self.parameter, self.variables)
        total = z ** self.k
        for j, f in enumerate(self.coefficients):
            total = total + f.with_variables(self.variables) * z ** j
        return total

    def is_square_free(self) -> bool:
        P = self.polynomial()
        return gcd(P, P.diff(self.parameter)).degree(self.parameter) == 0

    def shifted(self, c) -> "FirstIntegral":
        """The reparametrized family P(z - c)."""
        z = MultiPoly.variable(self.parameter, self.variables)
        return FirstIntegral.from_polynomial(self.polynomial().subs({self.parameter: z - c}),
                                             self.coordinates, self.parameter)

    def renamed(self, coordinates: Sequence[str]) -> "FirstIntegral":
        mapping = dict(zip(self.coordinates, coordinates))
        return FirstIntegral(tuple(f.rename(mapping) for f in self.coefficients), tuple(coordinates),
                             self.parameter, check=False)

    def to_text(self) -> str:
        lines = [f"fi k={self.k} vars={','.join(self.coordinates)}"]
        lines += [f"f{j} = {f}" for j, f in enumerate(self.coefficients)]
        return "\n".join(lines) + "\n"

    def __str__(self) -> str:
        return str(self.polynomial())


class Verification(NamedTuple):
    """Outcome of ``verify_first_integral``; truthy iff verified."""
    verified: bool
    reason: str = ""
    detail: str = ""

    def __bool__(self) -> bool:
        return self.verified


class Membership(NamedTuple):
    member: bool
    residual: float

    def __bool__(self) -> bool:
        return self.member


@timeit
def web_from_first_integral(P: FirstIntegral, n: int | None = None) -> Web:
    """
    Eliminate z from P = 0 and dP = sum_j dP/dx_j dx_j = 0.

    Res_z(P, dP) is taken as a polynomial in the differentials; its content
    and repeated factors are removed. When dP does not involve z the
    resultant is dP^k.

    Raises:
        ZeroResultantError: If the resultant vanishes identically.
        DegenerateWebError: If the eliminated form drops below degree k.
    """
    coordinates = P.coordinates
    if n is not None and n != len(coordinates):
        raise HolowebError(f"first integral lives in dimension {len(coordinates)}, not {n}")
    variables = coordinates + tuple(map(differential, coordinates))
    poly = P.polynomial()
    dP = MultiPoly.zero(variables + (P.parameter,))
    for name in coordinates:
        dP = dP + poly.diff(name) * MultiPoly.variable(differential(name), dP.variables)
    if dP.is_zero:
        raise DegenerateWebError(f"{poly} does not depend on {coordinates}")
    if dP.degree(P.parameter) == 0:
        raw = dP ** P.k
    else:
        raw = resultant(poly, dP, P.parameter)
    if raw.is_zero:
        raise ZeroResultantError(f"Res_{P.parameter}(P, dP) vanishes identically for P = {poly}")
    form = raw.with_variables(variables)
    form = differential_square_free_part(remove_content(form, coordinates), coordinates)
    degree = differential_degree(form, coordinates)
    if degree != P.k:
        raise DegenerateWebError(f"eliminated form has degree {degree} < {P.k}: the leaf family is not reduced")
    return make_web(form, len(coordinates), P.k, coordinates)


def verify_first_integral(web: Web, P: FirstIntegral) -> Verification:
    """Exact comparison of the web with the web eliminated from ``P``."""
    if web.n != len(P.coordinates):
        raise HolowebError(f"web lives in dimension {web.n}, first integral in dimension {len(P.coordinates)}")
    if P.coordinates != web.coordinates:
        P = P.renamed(web.coordinates)
    if P.k != web.k:
        return Verification(False, "degree", f"web has degree {web.k}, first integral has degree {P.k}")
    try:
        built = web_from_first_integral(P)
    except (DegenerateWebError, ZeroResultantError, SquareFactorError) as e:
        return Verification(False, "degenerate", str(e))
    if built.form != web.form:
        return Verification(False, "coefficients", f"eliminated web is {built.form}")
    return Verification(True)


@timeit
def char_poly_of_function(ode: ImplicitOde, g: MultiPoly) -> FirstIntegral:
    """
    Characteristic polynomial P_g(z) = Res_p(F, z - g), made monic.

    If g does not involve p the result is (z - g)^k, returned with a warning.

    Raises:
        NotNormalizableError: If the leading z-coefficient is not a constant.
    """
    variables = ODE_VARIABLES + (PARAMETER,)
    try:
        g = g.with_variables(ODE_VARIABLES)
    except ValueError as e:
        raise HolowebError(f"g must be a polynomial in {ODE_VARIABLES}") from e
    G = MultiPoly.variable(PARAMETER, variables) - g
    if G.degree(SLOPE) == 0:
        logger.warning("g = %s does not separate the sheets: P_g = (z - g)^%d", g, ode.k)
        raw = G ** ode.k
    else:
        raw = resultant(ode.F, G, SLOPE)
    raw = raw.with_variables(PLANAR_COORDINATES + (PARAMETER,))
    P = FirstIntegral.from_polynomial(raw, PLANAR_COORDINATES, PARAMETER, check=False)
    if not P.is_square_free():
        logger.warning("characteristic polynomial of %s is not square-free", g)
    return P


def annihilates(ode: ImplicitOde, g: MultiPoly, P: FirstIntegral) -> bool:
    """Exact check that P(g) vanishes modulo F (pseudo-remainder in p)."""
    composed = P.polynomial().subs({P.parameter: g.with_variables(ODE_VARIABLES)})
    composed = composed.with_variables(union_variables(composed, ode.F))
    return pseudo_remainder(composed, ode.F, SLOPE).is_zero


def _real_normalization(raw: MultiPoly, pairing: dict[str, str]) -> MultiPoly:
    """Scale Res(P, conj P) into a conj-swap invariant polynomial with a real leading rational 1."""
    swapped = conj_swap(raw, pairing)
    if swapped == raw:
        real = raw
    elif swapped == -raw:
        real = raw.scale(QQ_I(0, -1))
    else:
        raise ConsistencyError("resultant with the conjugate family is neither real nor imaginary")
    lead = real.leading_coefficient
    scale = lead.x if lead.x != 0 else lead.y
    return real.scale(QQ_I(1 / scale, 0))


def _conjugate_resultant(family: MultiPoly, coordinates: Sequence[str], parameter: str) -> HermitianPoly:
    pairing = conjugate_pairing(coordinates)
    conjugate = conj_swap(family, pairing)
    raw = resultant(family, conjugate, parameter)
    if raw.is_zero:
        raise ZeroResultantError("the family and its conjugate share a factor identically")
    bars = tuple(pairing[name] for name in coordinates)
    real = _real_normalization(raw.with_variables(tuple(coordinates) + bars), pairing)
    return HermitianPoly(real, pairing)


@timeit
def leviflat_from_first_integral(P: FirstIntegral) -> HermitianPoly:
    """
    Real hypersurface swept by the leaves P = z0 for real z0.

    Res_z(P, conj P) with the coordinates paired to their ``_bar``
    conjugates and z fixed, normalized to be conj-swap invariant with
    graded-lex leading coefficient 1.
    """
    return _conjugate_resultant(P.polynomial(), P.coordinates, P.parameter)


def leviflat_from_family(coefficients: Sequence[MultiPoly], coordinates: Sequence[str] = PLANAR_COORDINATES,
                         parameter: str = FAMILY_PARAMETER) -> HermitianPoly:
    """
    Real hypersurface containing every member of G_s = f_0 + f_1 s + ... + f_k s^k, s real.

    No monic normalization is required of the family.
    """
    coordinates = tuple(coordinates)
    variables = coordinates + (parameter,)
    s = MultiPoly.variable(parameter, variables)
    family = MultiPoly.zero(variables)
    for j, f in enumerate(coefficients):
        family = family + f.with_variables(variables) * s ** j
    if family.degree(parameter) < 1:
        raise DegreeError("the family does not depend on its parameter")
    return _conjugate_resultant(family, coordinates, parameter)


def leviflat_residuals(F: HermitianPoly, points: Sequence[Sequence[complex]]) -> np.ndarray:
    """
    |F(x, conj x)| at every point, evaluated on numpy arrays in one call.

    Raises:
        ValueError: If a point does not have one coordinate per holomorphic variable.
        NonRealValueError: If a value has an imaginary part above 1e-12
            relative to the size of the terms.
    """
    names = F.holomorphic_variables
    coordinates = np.asarray(points, dtype=complex)
    if coordinates.ndim != 2 or coordinates.shape[1] != len(names):
        raise ValueError(f"points have shape {coordinates.shape}, expected (m, {len(names)}) for {names}")
    values, magnitudes = {}, {}
    for name, column in zip(names, coordinates.T):
        values[name], values[F.pairing[name]] = column, column.conj()
        magnitudes[name] = magnitudes[F.pairing[name]] = np.abs(column)
    count = len(coordinates)
    value = np.broadcast_to(F.base.numeric_function()(*[values[name] for name in F.base.variables]), count)
    bound = np.broadcast_to(F.base.majorant().numeric_function()(*[magnitudes[name] for name in F.base.variables]),
                            count)
    non_real = np.abs(value.imag) > 1e-12 * np.maximum(1.0, np.abs(bound))
    if non_real.any():
        raise NonRealValueError(f"F evaluates to {complex(value[non_real][0])}, which is not real")
    return np.abs(value)


def leviflat_membership(F: HermitianPoly, point: Sequence[complex], tolerance: float = 1e-8) -> Membership:
    """
    Evaluate F at (x, conj x).

    Raises:
        NonRealValueError: If the value has an imaginary part above
            1e-12 relative to the size of the terms.
    """
    names = F.holomorphic_variables
    if len(point) != len(names):
        raise ValueError(f"point has {len(point)} coordinates, expected {len(names)} for {names}")
    residual = float(leviflat_residuals(F, [point])[0])
    return Membership(residual <= tolerance, residual)
