"""
Codimension-one k-webs as symmetric differential forms.

A web on (C^n, 0) is stored as one polynomial in the coordinates
x1..xn and their differentials dx1..dxn, homogeneous of degree k in the
differentials. The planar case uses the names x, y, dx, dy.
"""
import logging
from collections import defaultdict
from dataclasses import dataclass
from functools import reduce
from itertools import combinations, product
from typing import Sequence

import numpy as np
from sympy import Matrix
from sympy.polys.domains import QQ_I

from app.core.errors import (
    ChartSearchExhaustedError,
    CommonFactorError,
    DegenerateSymbolError,
    DegenerateWebError,
    HolowebError,
    NonTransversePlaneError,
    NotHomogeneousError,
    RootFinderError,
    SquareFactorError,
)
from app.core.monitoring import timeit
from app.services.polynomial import Coefficient, MultiPoly, gcd, to_gaussian
from app.services.roots import polynomial_roots

logger = logging.getLogger(__name__)

PLANAR_COORDINATES = ("x", "y")
PLANE_COORDINATES = ("u", "v")
SHEAR_RANGE = 3


def differential(name: str) -> str:
    return f"d{name}"


def coordinate_names(n: int) -> tuple[str, ...]:
    if n < 2:
        raise ValueError(f"webs live in dimension >= 2, got {n}")
    if n == 2:
        return PLANAR_COORDINATES
    return tuple(f"x{j}" for j in range(1, n + 1))


@dataclass(frozen=True)
class Web:
    """
    A validated k-web; build instances with ``make_web``.

    Attributes:
        coordinates (tuple[str, ...]): Names x1..xn.
        k (int): Degree in the differentials.
        form (MultiPoly): Normalized form over ``coordinates + differentials``.
    """
    coordinates: tuple[str, ...]
    k: int
    form: MultiPoly

    @property
    def n(self) -> int:
        return len(self.coordinates)

    @property
    def differentials(self) -> tuple[str, ...]:
        return tuple(differential(name) for name in self.coordinates)

    @property
    def variables(self) -> tuple[str, ...]:
        return self.coordinates + self.differentials

    def blocks(self) -> dict[tuple[int, ...], MultiPoly]:
        return differential_blocks(self.form, self.coordinates)

    def to_text(self) -> str:
        return f"web n={self.n} k={self.k} vars={','.join(self.coordinates)}\n{self.form}\n"

    def __str__(self) -> str:
        return str(self.form)


@dataclass(frozen=True)
class PlaneEmbedding:
    """
    Linear 2-plane through the origin: x = A (u, v).

    Attributes:
        matrix (tuple[tuple[GaussianRational, GaussianRational], ...]): The n x 2 matrix A.
    """
    matrix: tuple[tuple, ...]

    def __post_init__(self) -> None:
        rows = tuple(tuple(to_gaussian(entry) for entry in row) for row in self.matrix)
        if any(len(row) != 2 for row in rows):
            raise ValueError("a plane embedding needs exactly two columns")
        object.__setattr__(self, "matrix", rows)
        if Matrix([[QQ_I.to_sympy(entry) for entry in row] for row in rows]).rank() != 2:
            raise NonTransversePlaneError("plane embedding matrix does not have rank 2")

    @classmethod
    def from_entries(cls, entries: Sequence[Coefficient]) -> "PlaneEmbedding":
        """Row-major entries a11, a12, a21, a22, ..."""
        if len(entries) % 2 or len(entries) < 4:
            raise ValueError(f"expected 2n matrix entries with n >= 2, got {len(entries)}")
        return cls(tuple(tuple(entries[i:i + 2]) for i in range(0, len(entries), 2)))

    @property
    def n(self) -> int:
        return len(self.matrix)


@dataclass(frozen=True)
class LinearChange:
    """Coordinate change old = A . new, applied to both x and dx."""
    matrix: tuple[tuple[int, ...], ...]

    @classmethod
    def identity(cls, n: int) -> "LinearChange":
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @property
    def is_identity(self) -> bool:
        return self == LinearChange.identity(len(self.matrix))


def differential_blocks(form: MultiPoly, coordinates: Sequence[str]) -> dict[tuple[int, ...], MultiPoly]:
    """Split a form into coefficients (polynomials in ``coordinates``) keyed by dx-exponent vectors."""
    coordinates = tuple(coordinates)
    n = len(coordinates)
    variables = coordinates + tuple(differential(name) for name in coordinates)
    try:
        aligned = form.with_variables(variables)
    except ValueError as e:
        raise HolowebError(f"form uses variables outside {variables}") from e
    blocks: dict[tuple[int, ...], dict] = defaultdict(dict)
    for exponents, coefficient in aligned.terms.items():
        blocks[exponents[n:]][exponents[:n]] = coefficient
    return {dx: MultiPoly(terms, coordinates) for dx, terms in blocks.items()}


def content(form: MultiPoly, coordinates: Sequence[str]) -> MultiPoly:
    """gcd of all dx-monomial coefficients."""
    return reduce(gcd, differential_blocks(form, coordinates).values())


def remove_content(form: MultiPoly, coordinates: Sequence[str]) -> MultiPoly:
    if form.is_zero:
        return form
    return form.exquo(content(form, coordinates))


def repeated_differential_factor(form: MultiPoly, coordinates: Sequence[str]) -> MultiPoly:
    """gcd of the form with all its dx-partials; has positive dx-degree iff the form has a square factor."""
    return reduce(gcd, (form.diff(differential(name)) for name in coordinates), form)


def differential_square_free_part(form: MultiPoly, coordinates: Sequence[str]) -> MultiPoly:
    return form.exquo(repeated_differential_factor(form, coordinates))


def differential_degree(form: MultiPoly, coordinates: Sequence[str]) -> int:
    return max((sum(dx) for dx in differential_blocks(form, coordinates)), default=-1)


def make_web(form: MultiPoly, n: int, k: int, coordinates: Sequence[str] | None = None) -> Web:
    """
    Validate and canonicalize a symmetric form into a Web.

    Args:
        form (MultiPoly): Polynomial in the coordinates and their differentials.
        n (int): Ambient dimension.
        k (int): Expected degree in the differentials.
        coordinates (Sequence[str] | None): Coordinate names, default x, y (n = 2) or x1..xn.

    Returns:
        Web: The web with its form normalized (graded-lex leading coefficient 1).

    Raises:
        DegenerateWebError: If the form is zero.
        NotHomogeneousError: If some term does not have dx-degree k.
        CommonFactorError: If all coefficients share a non-constant factor.
        SquareFactorError: If the form has a repeated factor in the differentials.
    """
    coordinates = tuple(coordinates) if coordinates else coordinate_names(n)
    if len(coordinates) != n:
        raise ValueError(f"{len(coordinates)} coordinate names given for n = {n}")
    if form.is_zero:
        raise DegenerateWebError("the zero form does not define a web")
    blocks = differential_blocks(form, coordinates)
    degrees = sorted({sum(dx) for dx in blocks})
    if degrees != [k]:
        raise NotHomogeneousError(f"form must be homogeneous of degree {k} in the differentials, found degrees {degrees}")
    shared = reduce(gcd, blocks.values())
    if not shared.is_constant:
        raise CommonFactorError(f"all coefficients share the factor {shared}")
    repeated = repeated_differential_factor(form, coordinates)
    if differential_degree(repeated, coordinates) > 0:
        raise SquareFactorError(f"square factor {repeated} in the differentials")
    web = Web(coordinates, k, form.with_variables(coordinates + tuple(map(differential, coordinates))).normalized())
    logger.debug("web n=%d k=%d accepted", n, k)
    return web


def superpose(webs: Sequence[Web]) -> Web:
    """Product of the forms; the inputs must be pairwise coprime."""
    if not webs:
        raise ValueError("nothing to superpose")
    coordinates = webs[0].coordinates
    for web in webs[1:]:
        if web.coordinates != coordinates:
            raise HolowebError(f"cannot superpose webs on {coordinates} and {web.coordinates}")
    for a, b in combinations(webs, 2):
        shared = gcd(a.form, b.form)
        if differential_degree(shared, coordinates) > 0:
            raise SquareFactorError(f"square factor {shared} shared by superposed webs")
    form = reduce(lambda acc, web: acc * web.form, webs[1:], webs[0].form)
    return make_web(form, len(coordinates), sum(web.k for web in webs), coordinates)


def web_symbol(web: Web, point: Sequence[Coefficient]) -> MultiPoly:
    """The symbol form(x*, .) at an exact point, as a polynomial in the differentials."""
    if len(point) != web.n:
        raise ValueError(f"point has {len(point)} coordinates, web lives in dimension {web.n}")
    values = {name: MultiPoly.constant(value) for name, value in zip(web.coordinates, point)}
    return web.form.subs(values).with_variables(web.differentials)


def apply_linear_change(web: Web, matrix: Sequence[Sequence[Coefficient]]) -> Web:
    """Substitute x = A x' and dx = A dx' (same names) and re-canonicalize."""
    coordinates, differentials = web.coordinates, web.differentials
    mapping = {}
    for i in range(web.n):
        mapping[coordinates[i]] = sum(
            (MultiPoly.variable(coordinates[j], web.variables).scale(matrix[i][j]) for j in range(web.n)),
            MultiPoly.zero(web.variables),
        )
        mapping[differentials[i]] = sum(
            (MultiPoly.variable(differentials[j], web.variables).scale(matrix[i][j]) for j in range(web.n)),
            MultiPoly.zero(web.variables),
        )
    return make_web(web.form.subs(mapping).with_variables(web.variables), web.n, web.k, coordinates)


def _shear_candidates(n: int, search_range: int) -> list[tuple[int, ...]]:
    candidates = product(range(-search_range, search_range + 1), repeat=n - 1)
    return sorted(candidates, key=lambda c: (max(map(abs, c)), sum(map(abs, c)), c))


def adapt_chart(web: Web, search_range: int = SHEAR_RANGE) -> tuple[Web, LinearChange]:
    """
    Find a shear x_i -> x_i + c_i x_n (i < n), c_i in [-range, range], that
    makes the coefficient of dx_n^k nonzero at the origin.

    Candidates are tried by increasing max |c_i|, then sum |c_i|, then
    lexicographically; the identity comes first.

    Raises:
        ChartSearchExhaustedError: If no candidate works.
    """
    symbol = web_symbol(web, (0,) * web.n)
    candidates = _shear_candidates(web.n, search_range)
    for shear in candidates:
        direction = {name: value for name, value in zip(web.differentials, shear + (1,))}
        if symbol.subs(direction).constant_value == QQ_I.zero:
            continue
        if not any(shear):
            return web, LinearChange.identity(web.n)
        matrix = tuple(
            tuple(int(i == j) + (shear[i] if j == web.n - 1 and i < web.n - 1 else 0) for j in range(web.n))
            for i in range(web.n)
        )
        logger.info("Adapted chart with shear %s", shear)
        return apply_linear_change(web, matrix), LinearChange(matrix)
    raise ChartSearchExhaustedError(len(candidates))


def _restriction_coefficients(evaluate, a: np.ndarray, b: np.ndarray, k: int) -> np.ndarray:
    """Coefficients (highest first) of t -> phi(a + t b) from k + 1 samples on the unit circle."""
    nodes = np.exp(2j * np.pi * np.arange(k + 1) / (k + 1))
    samples = np.array([evaluate(a + t * b) for t in nodes])
    return (np.fft.fft(samples) / (k + 1))[::-1]


def _kernel_basis(gradient: np.ndarray) -> np.ndarray:
    """Columns spanning {w : sum g_i w_i = 0} (bilinear, no conjugation)."""
    _, _, vh = np.linalg.svd(gradient[None, :])
    return vh[1:].conj().T


@timeit
def brill_check(web: Web, samples: int = 20, tolerance: float = 1e-8, seed: int = 0,
                box: int = 5, retries: int = 50) -> bool:
    """
    Monte-Carlo necessary test that the symbol splits into linear factors.

    At seeded lattice base points x* the symbol phi = form(x*, .) is sampled
    on random complex lines; at smooth points v of the cone {phi = 0} the
    Hessian of phi must vanish on the kernel of the gradient (each component
    is a hyperplane). Planar webs always pass.

    Raises:
        DegenerateSymbolError: If no smooth cone point can be located.
    """
    if web.n == 2:
        return True
    rng = np.random.default_rng(seed)
    gradient_polys = [web.form.diff(d) for d in web.differentials]
    hessian_polys = [[g.diff(d) for d in web.differentials] for g in gradient_polys]
    form_fn = web.form.numeric_function()
    gradient_fns = [g.numeric_function() for g in gradient_polys]
    hessian_fns = [[h.numeric_function() for h in row] for row in hessian_polys]
    checked = 0

    for _ in range(samples):
        base = rng.integers(-box, box + 1, size=web.n).astype(complex)
        point = None
        for _ in range(retries):
            a = rng.standard_normal(web.n) + 1j * rng.standard_normal(web.n)
            b = rng.standard_normal(web.n) + 1j * rng.standard_normal(web.n)
            coefficients = _restriction_coefficients(lambda v: form_fn(*base, *v), a, b, web.k)
            try:
                roots = polynomial_roots(coefficients)
            except RootFinderError:
                break
            for t in roots:
                v = a + t * b
                v = v / np.linalg.norm(v)
                gradient = np.array([fn(*base, *v) for fn in gradient_fns], dtype=complex)
                if np.linalg.norm(gradient) > 1e-6:
                    point = (v, gradient)
                    break
            if point is not None:
                break
        if point is None:
            continue
        v, gradient = point
        hessian = np.array([[fn(*base, *v) for fn in row] for row in hessian_fns], dtype=complex)
        kernel = _kernel_basis(gradient)
        restricted = kernel.T @ hessian @ kernel
        scale = max(1.0, float(np.max(np.abs(hessian))))
        checked += 1
        if np.max(np.abs(restricted)) > tolerance * scale:
            logger.info("Brill condition fails at base point %s", base.real.astype(int).tolist())
            return False
    if checked == 0:
        raise DegenerateSymbolError(f"no smooth point of the symbol cone found at {samples} base points")
    return True


def frobenius_check_decomposable(factors: Sequence[MultiPoly], coordinates: Sequence[str] | None = None) -> bool:
    """
    Exact integrability test theta ^ d theta = 0 for each 1-form factor.

    For theta = sum a_i dx_i the 3-form theta ^ d theta has components
    a_i (d_j a_l - d_l a_j) + a_j (d_l a_i - d_i a_l) + a_l (d_i a_j - d_j a_i), i < j < l.
    """
    for theta in factors:
        names = tuple(coordinates) if coordinates else _infer_coordinates(theta)
        blocks = differential_blocks(theta, names)
        if any(sum(dx) != 1 for dx in blocks):
            raise NotHomogeneousError(f"{theta} is not a 1-form")
        n = len(names)
        a = [blocks.get(tuple(int(i == j) for i in range(n)), MultiPoly.zero(names)) for j in range(n)]
        for i, j, l in combinations(range(n), 3):
            component = (a[i] * (a[l].diff(names[j]) - a[j].diff(names[l]))
                         + a[j] * (a[i].diff(names[l]) - a[l].diff(names[i]))
                         + a[l] * (a[j].diff(names[i]) - a[i].diff(names[j])))
            if not component.is_zero:
                logger.debug("theta ^ d theta has component %s on (%s, %s, %s)", component, names[i], names[j], names[l])
                return False
    return True


def _infer_coordinates(theta: MultiPoly) -> tuple[str, ...]:
    """Coordinates of a 1-form: bases of its d-prefixed variables, then its other variables."""
    seen: dict[str, None] = {}
    for name in theta.used_variables:
        if name.startswith("d") and len(name) > 1:
            seen.setdefault(name[1:], None)
    for name in theta.used_variables:
        if not (name.startswith("d") and len(name) > 1):
            seen.setdefault(name, None)
    return tuple(seen)


def restrict_to_plane(web: Web, plane: PlaneEmbedding) -> Web:
    """
    Pull the web back along x = A (u, v), dx = A (du, dv).

    Raises:
        NonTransversePlaneError: If the pullback vanishes, drops degree or
            acquires a square factor.
    """
    if plane.n != web.n:
        raise HolowebError(f"plane embeds into dimension {plane.n}, web lives in dimension {web.n}")
    target = PLANE_COORDINATES + tuple(map(differential, PLANE_COORDINATES))
    u, v, du, dv = (MultiPoly.variable(name, target) for name in target)
    mapping = {}
    for name, (first, second) in zip(web.coordinates, plane.matrix):
        mapping[name] = u.scale(first) + v.scale(second)
        mapping[differential(name)] = du.scale(first) + dv.scale(second)
    pulled = web.form.subs(mapping).with_variables(target)
    if pulled.is_zero:
        raise NonTransversePlaneError("the pullback of the web vanishes on the plane")
    pulled = remove_content(pulled, PLANE_COORDINATES)
    try:
        return make_web(pulled, 2, web.k, PLANE_COORDINATES)
    except (SquareFactorError, NotHomogeneousError) as e:
        raise NonTransversePlaneError(f"plane is not transverse to the web: {e}") from e
