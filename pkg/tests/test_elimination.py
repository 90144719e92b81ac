import logging

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from app.core.errors import (
    DegenerateWebError,
    HolowebError,
    NonRealValueError,
    NotNormalizableError,
    SquareFactorError,
    ZeroResultantError,
)
from app.services.contact_lift import ODE_VARIABLES
from app.services.elimination import (
    FirstIntegral,
    annihilates,
    char_poly_of_function,
    leviflat_from_family,
    leviflat_from_first_integral,
    leviflat_membership,
    leviflat_residuals,
    verify_first_integral,
    web_from_first_integral,
)
from app.services.polynomial import HermitianPoly, MultiPoly, conj_swap, conjugate_pairing
from app.services.web_model import make_web
from .conftest import PLANAR_FORM_VARIABLES
from .strategies import first_integrals, rationals, reduced_first_integrals

XY = ("x", "y")
XY_BAR = ("x", "y", "x_bar", "y_bar")

round_trip_settings = settings(max_examples=100, deadline=None, suppress_health_check=[HealthCheck.too_slow])


# Test: FirstIntegral
def test_first_integral_from_polynomial_is_monic(first_integral, poly):
    P = first_integral("3*z^2 + 3*x*z - 3*y")
    assert P.k == 2
    assert P.coefficients == (poly("-y", XY), poly("x", XY))
    assert P.polynomial() == poly("z^2 + x*z - y", ("x", "y", "z"))


def test_first_integral_rejections(first_integral):
    with pytest.raises(NotNormalizableError):
        first_integral("x*z^2 + z - y")
    with pytest.raises(SquareFactorError):
        first_integral("(z - x)^2")
    with pytest.raises(HolowebError):
        first_integral("x + y")


def test_first_integral_text_round_trip(first_integral):
    assert first_integral("z^2 + x*z - y").to_text() == "fi k=2 vars=x,y\nf0 = -y\nf1 = x\n"


# Test: Web of a first integral
def test_web_of_a_clairaut_first_integral(first_integral, planar_web, clairaut_web_text):
    assert web_from_first_integral(first_integral("z^2 + x*z - y")) == planar_web(clairaut_web_text, 2)


def test_web_of_a_single_function(first_integral, planar_web):
    """For k = 1 the web is df: P = z - f gives f_x dx + f_y dy."""
    web = web_from_first_integral(first_integral("z - x^2 - x*y"))
    assert web == planar_web("(2*x + y)*dx + x*dy", 1)


def test_non_reduced_family_is_degenerate(first_integral):
    with pytest.raises(DegenerateWebError):
        web_from_first_integral(first_integral("z^2 - x"))


def test_verify_first_integral(first_integral, planar_web, clairaut_web_text):
    web = planar_web(clairaut_web_text, 2)
    assert verify_first_integral(web, first_integral("z^2 + x*z - y"))
    assert verify_first_integral(web, first_integral("z^2 + y*z - x")).reason == "coefficients"
    assert verify_first_integral(web, first_integral("z^2 - x")).reason == "degenerate"
    assert verify_first_integral(planar_web("dx*dy", 2), first_integral("z - x")).reason == "degree"


@round_trip_settings
@given(reduced_first_integrals(), rationals)
def test_round_trip_and_reparametrization(P, c):
    """
    Test Case: Random reduced monic first integrals (k <= 3, coefficient degree <= 2)
    - Expected Outcome: The eliminated web has degree k and verifies against P,
      and P(z - c) gives the same web.
    """
    web = web_from_first_integral(P)
    assert web.k == P.k
    assert verify_first_integral(web, P).verified
    assert web_from_first_integral(P.shifted(c)) == web


@round_trip_settings
@given(first_integrals())
def test_general_families_verify_or_report_degenerate(P):
    """Any square-free family eliminates to a web it verifies against, or is reported degenerate."""
    try:
        web = web_from_first_integral(P)
    except (DegenerateWebError, ZeroResultantError, SquareFactorError):
        other = make_web(MultiPoly.parse(f"dy^{P.k} - dx^{P.k}", PLANAR_FORM_VARIABLES), 2, P.k)
        assert verify_first_integral(other, P).reason == "degenerate"
        return
    assert verify_first_integral(web, P).verified


# Test: Characteristic polynomials
def test_char_poly_of_the_slope(ode, first_integral, poly):
    clairaut = ode("y - x*p - p^2")
    slope = poly("p", ODE_VARIABLES)
    P = char_poly_of_function(clairaut, slope)
    assert P == first_integral("z^2 + x*z - y")
    assert annihilates(clairaut, slope, P)
    assert not annihilates(clairaut, slope, first_integral("z^2 + y*z - x"))


def test_char_poly_of_a_linear_equation(ode, first_integral, poly):
    assert char_poly_of_function(ode("p - x*y"), poly("p", ODE_VARIABLES)) == first_integral("z - x*y")


def test_char_poly_of_a_function_without_slope_warns(ode, first_integral, poly, caplog):
    with caplog.at_level(logging.WARNING):
        P = char_poly_of_function(ode("y - x*p - p^2"), poly("2", ODE_VARIABLES))
    assert P.polynomial() == poly("(z - 2)^2", ("x", "y", "z"))
    assert "does not separate" in caplog.text
    assert "not square-free" in caplog.text


def test_char_poly_needs_a_unit_leading_coefficient(ode, poly):
    with pytest.raises(NotNormalizableError):
        char_poly_of_function(ode("x*p^2 + p - y"), poly("p", ODE_VARIABLES))


# Test: Levi-flat hypersurfaces
def test_leviflat_of_the_clairaut_first_integral(first_integral, poly):
    """
    Test Case: P = z^2 + x z - y
    - Expected Outcome: Up to a unit, y_bar^2 + y^2 - y x_bar^2 - y_bar x^2 + x x_bar (y + y_bar) - 2 y y_bar,
      normalized to a real (conj-swap invariant) polynomial.
    """
    F = leviflat_from_first_integral(first_integral("z^2 + x*z - y"))
    expected = poly("y_bar^2 + y^2 - y*x_bar^2 - y_bar*x^2 + x*x_bar*(y + y_bar) - 2*y*y_bar", XY_BAR)
    assert F.base.is_proportional(expected)
    assert F.is_real()
    assert F.holomorphic_variables == XY


def test_leviflat_of_a_single_function_is_im_f():
    """
    Test Case: P = z - f for 10 seeded f
    - Expected Outcome: The real generator i (f - f_bar) of Im f = 0, up to a unit.
    """
    rng = np.random.default_rng(5)
    monomials = [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (0, 0)]
    pairing = conjugate_pairing(XY)
    for _ in range(10):
        terms = {e: (int(rng.integers(-3, 4)), int(rng.integers(-3, 4))) for e in monomials}
        terms[(1, 0)] = (int(rng.integers(1, 4)), 0)
        f = MultiPoly(terms, XY)
        F = leviflat_from_first_integral(FirstIntegral((-f,), XY))
        f_bar = conj_swap(f, pairing)
        assert F.base.is_proportional((f - f_bar).scale((0, 1)))
        assert F.is_real()


def test_leviflat_of_a_symbolic_family(poly):
    names = ("f0", "f1", "f2")
    F = leviflat_from_family([poly(name, names) for name in names], names)
    expected = poly(
        "f0^2*f2_bar^2 + f0_bar^2*f2^2 + f0*f2*f1_bar^2 + f0_bar*f2_bar*f1^2"
        " - f1*f1_bar*(f0*f2_bar + f0_bar*f2) - 2*f0*f0_bar*f2*f2_bar",
        names + ("f0_bar", "f1_bar", "f2_bar"),
    )
    assert F.base.is_proportional(expected)
    assert F.is_real()


@pytest.mark.parametrize("text", ["z^3 + x*z - y", "z^3 + i*x*z^2 - y", "z^2 + (1+i)*x*z - y^2"])
def test_leviflat_is_real_for_any_degree(first_integral, text):
    assert leviflat_from_first_integral(first_integral(text)).is_real()


def test_leviflat_commutes_with_restriction(poly):
    """
    Test Case: P on (C^3, 0) restricted to the plane x1 = u, x2 = v, x3 = u
    - Expected Outcome: Restricting the Levi-flat hypersurface equals the
      Levi-flat hypersurface of the restricted first integral, up to a unit.
    """
    X3 = ("x1", "x2", "x3")
    UV = ("u", "v", "u_bar", "v_bar")
    P = FirstIntegral((poly("x3 - x2", X3), poly("x1", X3)), X3)
    restricted = FirstIntegral((poly("u - v", ("u", "v")), poly("u", ("u", "v"))), ("u", "v"))
    u, v, u_bar, v_bar = (MultiPoly.variable(name, UV) for name in UV)
    pulled = leviflat_from_first_integral(P).base.subs(
        {"x1": u, "x2": v, "x3": u, "x1_bar": u_bar, "x2_bar": v_bar, "x3_bar": u_bar})
    assert pulled.is_proportional(leviflat_from_first_integral(restricted).base)


def test_leviflat_membership(first_integral):
    F = leviflat_from_first_integral(first_integral("z - x^2", coordinates=("x",)))
    assert leviflat_membership(F, (2.0,)).member
    outside = leviflat_membership(F, (1 + 1j,))
    assert not outside
    assert outside.residual == pytest.approx(4)
    with pytest.raises(ValueError):
        leviflat_membership(F, (1.0, 2.0))


def test_leviflat_residuals_over_many_points(first_integral):
    F = leviflat_from_first_integral(first_integral("z - x^2", coordinates=("x",)))
    residuals = leviflat_residuals(F, [(2.0,), (1 + 1j,), (-3.0,)])
    assert residuals.shape == (3,)
    assert list(residuals) == pytest.approx([0, 4, 0], abs=1e-12)
    with pytest.raises(ValueError):
        leviflat_residuals(F, [(1.0, 2.0)])


CLAIRAUT_LEVIFLAT = leviflat_from_first_integral(
    FirstIntegral.from_polynomial(MultiPoly.parse("z^2 + x*z - y", ("x", "y", "z"))))


@given(st.floats(-3, 3), st.floats(-3, 3))
def test_clairaut_leaves_lie_in_their_leviflat(s0, x):
    """Points (x, s0 x + s0^2) of real leaves give a vanishing residual."""
    F = CLAIRAUT_LEVIFLAT
    x = complex(x, 0.5)
    assert leviflat_membership(F, (x, s0 * x + s0 ** 2), 1e-8).member


def test_non_real_values_are_rejected(poly):
    F = HermitianPoly(poly("i*x + i*x_bar", ("x", "x_bar")), conjugate_pairing(["x"]))
    with pytest.raises(NonRealValueError):
        leviflat_membership(F, (1.0,))
