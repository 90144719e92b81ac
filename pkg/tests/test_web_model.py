import pytest

from app.core.errors import (
    CommonFactorError,
    DegenerateWebError,
    NonTransversePlaneError,
    NotHomogeneousError,
    SquareFactorError,
)
from app.services.elimination import FirstIntegral, web_from_first_integral
from app.services.web_model import (
    PlaneEmbedding,
    adapt_chart,
    apply_linear_change,
    brill_check,
    frobenius_check_decomposable,
    make_web,
    restrict_to_plane,
    superpose,
    web_symbol,
)

X3 = ("x1", "x2", "x3")
UV_FORM = ("u", "v", "du", "dv")


# Test: make_web validation
def test_make_web_accepts_the_clairaut_form(planar_web, poly, clairaut_web_text):
    web = planar_web(clairaut_web_text, 2)
    assert (web.n, web.k, web.coordinates) == (2, 2, ("x", "y"))
    assert web.form == poly(clairaut_web_text)


def test_make_web_normalizes_units(planar_web, clairaut_web_text):
    assert planar_web(f"3*({clairaut_web_text})", 2) == planar_web(clairaut_web_text, 2)
    assert planar_web(f"i*({clairaut_web_text})", 2).form == planar_web(clairaut_web_text, 2).form


@pytest.mark.parametrize("text, k, error", [
    ("(dy - dx)^2", 2, SquareFactorError),
    ("x*dy - x*dx", 1, CommonFactorError),
    ("dx + dy^2", 2, NotHomogeneousError),
    ("dx*dy", 1, NotHomogeneousError),
    ("0", 1, DegenerateWebError),
])
def test_make_web_rejections(planar_web, text, k, error):
    with pytest.raises(error):
        planar_web(text, k)


def test_square_factor_message(planar_web):
    with pytest.raises(SquareFactorError) as excinfo:
        planar_web("(dy - dx)^2", 2)
    assert "square factor" in str(excinfo.value)


# Test: Superposition
def test_superpose_multiplies_forms(planar_web):
    product = superpose([planar_web("dx", 1), planar_web("dy", 1)])
    assert product.k == 2
    assert product.form == planar_web("dx*dy", 2).form
    assert superpose([planar_web("dy - y*dx", 1), planar_web("dy + y*dx", 1)]) == planar_web("dy^2 - y^2*dx^2", 2)


def test_superpose_is_commutative(planar_web):
    a, b = planar_web("dy - x*dx", 1), planar_web("dy^2 + y*dx^2", 2)
    assert superpose([a, b]) == superpose([b, a])


def test_superpose_is_associative(planar_web):
    """
    Test Case: Three coprime planar webs grouped both ways
    - Expected Outcome: (a b) c, a (b c) and the flat superposition agree as 3-webs.
    """
    a, b, c = planar_web("dy - dx", 1), planar_web("dy + dx", 1), planar_web("dy - x*dx", 1)
    left = superpose([superpose([a, b]), c])
    right = superpose([a, superpose([b, c])])
    assert left == right == superpose([a, b, c])
    assert left.k == 3


def test_superpose_rejects_shared_factors(planar_web):
    with pytest.raises(SquareFactorError):
        superpose([planar_web("dx", 1), planar_web("2*dx", 1)])


def test_web_symbol(planar_web, poly):
    symbol = web_symbol(planar_web("dy^2 + x*dx*dy - y*dx^2", 2), (1, 2))
    assert symbol == poly("dy^2 + dx*dy - 2*dx^2", ("dx", "dy"))


# Test: Chart adaptation
def test_adapt_chart_keeps_adapted_webs(planar_web, clairaut_web_text):
    web = planar_web(clairaut_web_text, 2)
    adapted, change = adapt_chart(web)
    assert change.is_identity
    assert adapted is web


def test_adapt_chart_shears_a_vertical_direction(planar_web):
    """
    Test Case: dx * dy at the origin
    - Expected Outcome: The first shear found is x -> x - y, i.e. the matrix ((1, -1), (0, 1)),
      and the new symbol has a nonzero dy^2 coefficient.
    """
    adapted, change = adapt_chart(planar_web("dx*dy", 2))
    assert change.matrix == ((1, -1), (0, 1))
    assert not web_symbol(adapted, (0, 0)).subs({"dx": 0, "dy": 1}).is_zero
    _, change = adapt_chart(planar_web("dx", 1))
    assert change.matrix == ((1, -1), (0, 1))


def test_adapt_chart_in_three_dimensions(spatial_web):
    adapted, change = adapt_chart(spatial_web("dx1*dx2*dx3", 3))
    assert not change.is_identity
    assert not web_symbol(adapted, (0, 0, 0)).subs({"dx1": 0, "dx2": 0, "dx3": 1}).is_zero


def test_apply_linear_change_round_trip(planar_web, clairaut_web_text):
    web = planar_web(clairaut_web_text, 2)
    sheared = apply_linear_change(web, ((1, 2), (0, 1)))
    assert apply_linear_change(sheared, ((1, -2), (0, 1))) == web


# Test: Brill and Frobenius conditions
def test_planar_webs_pass_brill(planar_web, clairaut_web_text):
    assert brill_check(planar_web(clairaut_web_text, 2))


def test_brill_accepts_products_of_linear_forms(spatial_web):
    assert brill_check(spatial_web("dx1*dx2", 2))
    assert brill_check(spatial_web("(x2*dx1 - x1*dx2)*dx3", 2))


def test_brill_rejects_a_smooth_quadric_cone(spatial_web):
    """
    Test Case: dx1^2 + dx2^2 + dx3^2
    - The symbol cone is an irreducible smooth quadric, so its Hessian does
      not vanish on the tangent planes.
    - Expected Outcome: ``False``.
    """
    assert not brill_check(spatial_web("dx1^2 + dx2^2 + dx3^2", 2))


def test_brill_is_reproducible_for_a_seed(spatial_web):
    web = spatial_web("dx1^2 + dx2^2 + dx3^2", 2)
    assert brill_check(web, seed=5) == brill_check(web, seed=5)


def test_frobenius(poly):
    names = ("x", "y", "z", "dx", "dy", "dz")
    assert frobenius_check_decomposable([poly("x*dy + y*dx")])
    assert frobenius_check_decomposable([poly(text, names) for text in ("dx", "dy", "dz")])
    assert frobenius_check_decomposable([poly("y*z*dx + x*z*dy + x*y*dz", names)])
    assert not frobenius_check_decomposable([poly("z*dx + x*dy + y*dz", names)])
    with pytest.raises(NotHomogeneousError):
        frobenius_check_decomposable([poly("dx*dy")])


# Test: Restriction to 2-planes
def test_restrict_to_plane_pulls_back(spatial_web, poly):
    plane = PlaneEmbedding(((1, 0), (0, 1), (1, 1)))
    restricted = restrict_to_plane(spatial_web("dx3", 1), plane)
    assert restricted.coordinates == ("u", "v")
    assert restricted.form == poly("du + dv", UV_FORM)


def test_restrict_to_plane_rejects_degenerate_planes(spatial_web):
    with pytest.raises(NonTransversePlaneError):
        restrict_to_plane(spatial_web("dx1", 1), PlaneEmbedding(((0, 0), (1, 0), (0, 1))))
    with pytest.raises(NonTransversePlaneError):
        PlaneEmbedding(((1, 2), (2, 4), (3, 6)))


def test_restrict_commutes_with_superposition(spatial_web):
    plane = PlaneEmbedding(((1, 0), (0, 1), (1, 2)))
    a, b = spatial_web("dx1", 1), spatial_web("dx2 + x3*dx3", 1)
    assert restrict_to_plane(superpose([a, b]), plane) == superpose(
        [restrict_to_plane(a, plane), restrict_to_plane(b, plane)])


def test_restrict_commutes_with_first_integral_elimination(poly):
    """
    Test Case: web of a first integral on (C^3, 0), restricted to x3 = x1
    - Steps:
        1. Eliminate z from P = z^2 + x1 z - x2 + x3 and restrict to the plane.
        2. Restrict P first (z^2 + u z - v + u) and eliminate.
    - Expected Outcome: The same planar web.
    """
    P = FirstIntegral((poly("x3 - x2", X3), poly("x1", X3)), X3)
    plane = PlaneEmbedding(((1, 0), (0, 1), (1, 0)))
    restricted_P = FirstIntegral((poly("u - v", ("u", "v")), poly("u", ("u", "v"))), ("u", "v"))
    assert restrict_to_plane(web_from_first_integral(P), plane) == web_from_first_integral(restricted_P)


def test_to_text(planar_web, clairaut_web_text):
    web = planar_web(clairaut_web_text, 2)
    assert web.to_text() == "web n=2 k=2 vars=x,y\nx*dx*dy - y*dx^2 + dy^2\n"
