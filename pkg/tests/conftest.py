import pytest
from fastapi.testclient import TestClient

from app.services.clairaut import ClairautEquation
from app.services.contact_lift import ODE_VARIABLES, ImplicitOde
from app.services.elimination import FirstIntegral
from app.services.parser import parse_poly
from app.services.web_model import make_web
from main import app

PLANAR_FORM_VARIABLES = ("x", "y", "dx", "dy")
SPATIAL_FORM_VARIABLES = ("x1", "x2", "x3", "dx1", "dx2", "dx3")

# Planar 2-web of the Clairaut equation y = x p + p^2.
CLAIRAUT_FORM = "dy^2 + x*dx*dy - y*dx^2"


@pytest.fixture(scope="session")
def client():
    """
    HTTP client bound to the FastAPI application.

    Returns:
        TestClient: Client for ``/api/v1`` requests.

    Scope:
        "session" scope, the application is stateless.
    """
    return TestClient(app)


@pytest.fixture
def poly():
    """Parse polynomial text; planar form variables unless given."""

    def parse(text, variables=PLANAR_FORM_VARIABLES):
        return parse_poly(text, variables)

    return parse


@pytest.fixture
def planar_web(poly):
    """Build a planar web from form text, degree given explicitly."""

    def build(text, k):
        return make_web(poly(text), 2, k)

    return build


@pytest.fixture
def spatial_web(poly):
    """Build a web on (C^3, 0) in x1, x2, x3 from form text."""

    def build(text, k):
        return make_web(poly(text, SPATIAL_FORM_VARIABLES), 3, k)

    return build


@pytest.fixture
def ode(poly):
    """Implicit ODE F(x, y, p) = 0 from text; k is the p-degree."""

    def build(text):
        F = poly(text, ODE_VARIABLES)
        return ImplicitOde(F, F.degree("p"))

    return build


@pytest.fixture
def first_integral(poly):
    """Monic first integral from a polynomial in x, y, z."""

    def build(text, coordinates=("x", "y")):
        return FirstIntegral.from_polynomial(poly(text, tuple(coordinates) + ("z",)), coordinates)

    return build


@pytest.fixture
def clairaut(poly):
    """Clairaut equation y = x p + f(p) from the text of f."""

    def build(text):
        return ClairautEquation(poly(text, ("p",)))

    return build


@pytest.fixture
def clairaut_web_text():
    return CLAIRAUT_FORM
