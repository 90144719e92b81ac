"""
Text formats for webs, first integrals, points and plane embeddings.

    web n=<n> k=<k> vars=x1,...,xn
    <polynomial in x1..xn, dx1..dxn>

    fi k=<k> vars=x,y
    f0 = <polynomial>
    ...

Inputs that are not files are read inline: a bare web polynomial is planar
in x, y, dx, dy and a bare first integral is a polynomial in x, y, z.
"""
import logging
import os
import re
from pathlib import Path
from typing import Sequence

from app.core.errors import FormatError, HolowebError, PolynomialSyntaxError
from app.services.clairaut import ClairautEquation
from app.services.contact_lift import ODE_VARIABLES, SLOPE
from app.services.elimination import PARAMETER, FirstIntegral
from app.services.parser import parse_poly
from app.services.polynomial import IMAGINARY_UNIT, MultiPoly, to_gaussian
from app.services.web_model import PLANAR_COORDINATES, PlaneEmbedding, Web, differential, make_web, differential_blocks

logger = logging.getLogger(__name__)

_NAMES = r"[A-Za-z_][A-Za-z0-9_]*(?:,[A-Za-z_][A-Za-z0-9_]*)*"
_WEB_HEADER = re.compile(rf"web\s+n=(\d+)\s+k=(\d+)\s+vars=({_NAMES})\s*\Z")
_FI_HEADER = re.compile(rf"fi\s+k=(\d+)\s+vars=({_NAMES})\s*\Z")
_FI_LINE = re.compile(r"\s*f(\d+)\s*=(.*)\Z")


def read_input(value: str) -> str:
    """The contents of ``value`` when it names an existing file, else ``value`` itself."""
    if os.path.isfile(value):
        logger.debug("reading %s", value)
        return Path(value).read_text(encoding="utf-8")
    return value


def _header_coordinates(text: str, reserved: Sequence[str] = ()) -> tuple[str, ...]:
    """Coordinate names of a header; duplicates, 'i' and clashes with ``reserved`` are rejected."""
    coordinates = tuple(text.split(","))
    if len(set(coordinates)) != len(coordinates):
        raise FormatError(f"duplicate coordinate names in vars={text}")
    clashes = sorted(set(coordinates) & ({IMAGINARY_UNIT} | set(reserved)))
    if clashes:
        raise FormatError(f"reserved names {clashes} cannot be coordinates")
    return coordinates


def _split_header(text: str) -> tuple[str, list[str]]:
    lines = text.strip("\n").split("\n")
    return lines[0].strip(), lines[1:]


def parse_web_text(text: str) -> Web:
    """
    Parse a web file, or a bare planar form.

    The degree of a bare form is read off its terms.

    Raises:
        FormatError: On a malformed header or a bare form without differentials.
        PolynomialSyntaxError: On a malformed polynomial, with file line numbers.
    """
    header, body = _split_header(text)
    if header.startswith("web"):
        match = _WEB_HEADER.match(header)
        if not match:
            raise FormatError(f"malformed web header '{header}'")
        n, k = int(match.group(1)), int(match.group(2))
        coordinates = _header_coordinates(match.group(3))
        if set(coordinates) & set(map(differential, coordinates)):
            raise FormatError(f"coordinate names {coordinates} clash with their differentials")
        if len(coordinates) != n:
            raise FormatError(f"header declares n={n} but lists {len(coordinates)} coordinates")
        form = _parse_form("\n".join(body), coordinates, line_offset=1)
        return make_web(form, n, k, coordinates)
    form = _parse_form(text, PLANAR_COORDINATES)
    degrees = {sum(dx) for dx in differential_blocks(form, PLANAR_COORDINATES)}
    if not degrees or degrees == {0}:
        raise FormatError("a web form must involve the differentials dx, dy")
    return make_web(form, 2, max(degrees), PLANAR_COORDINATES)


def _parse_form(text: str, coordinates: Sequence[str], line_offset: int = 0) -> MultiPoly:
    variables = tuple(coordinates) + tuple(map(differential, coordinates))
    aliases = {}
    if len(coordinates) == 2 and tuple(coordinates) != PLANAR_COORDINATES:
        for alias, name in zip(PLANAR_COORDINATES, coordinates):
            if alias not in variables and differential(alias) not in variables:
                aliases[alias] = name
                aliases[differential(alias)] = differential(name)
    form = parse_poly(text, variables + tuple(aliases), line_offset)
    if aliases:
        form = form.subs({alias: MultiPoly.variable(name, variables) for alias, name in aliases.items()})
    return form.with_variables(variables)


def parse_first_integral_text(text: str) -> FirstIntegral:
    """
    Parse a first-integral file or a bare polynomial in x, y, z.

    Raises:
        FormatError: On a malformed header, missing or repeated coefficient lines.
    """
    header, body = _split_header(text)
    if not header.startswith("fi"):
        return FirstIntegral.from_polynomial(parse_poly(text, PLANAR_COORDINATES + (PARAMETER,)))
    match = _FI_HEADER.match(header)
    if not match:
        raise FormatError(f"malformed first-integral header '{header}'")
    k = int(match.group(1))
    coordinates = _header_coordinates(match.group(2), (PARAMETER,))
    coefficients: dict[int, MultiPoly] = {}
    for number, line in enumerate(body, start=2):
        if not line.strip():
            continue
        entry = _FI_LINE.match(line)
        if not entry:
            raise FormatError(f"line {number}: expected 'f<j> = <polynomial>'")
        j = int(entry.group(1))
        if j >= k or j in coefficients:
            raise FormatError(f"line {number}: unexpected or repeated coefficient f{j}")
        try:
            coefficients[j] = parse_poly(entry.group(2), coordinates)
        except PolynomialSyntaxError as e:
            raise FormatError(f"line {number}: {e}") from e
    missing = sorted(set(range(k)) - set(coefficients))
    if missing:
        raise FormatError(f"missing coefficient lines {', '.join(f'f{j}' for j in missing)}")
    return FirstIntegral(tuple(coefficients[j] for j in range(k)), coordinates)


def parse_clairaut_text(text: str) -> ClairautEquation:
    return ClairautEquation(parse_poly(text, (SLOPE,)))


def parse_function_text(text: str) -> MultiPoly:
    return parse_poly(text, ODE_VARIABLES)


def parse_point(text: str, size: int | None = None) -> tuple[complex, ...]:
    """Comma separated complex numbers in Python syntax; 'i' is accepted for 'j'."""
    try:
        point = tuple(complex(part.strip().replace("i", "j")) for part in text.split(","))
    except ValueError as e:
        raise FormatError(f"'{text}' is not a list of complex numbers") from e
    if size is not None and len(point) != size:
        raise FormatError(f"expected {size} coordinates, got {len(point)}")
    return point


def parse_plane(text: str) -> PlaneEmbedding:
    """Row-major exact entries of an n x 2 matrix, comma separated."""
    entries = [parse_poly(part, ()) for part in text.split(",")]
    try:
        return PlaneEmbedding.from_entries([to_gaussian(entry.constant_value) for entry in entries])
    except ValueError as e:
        if isinstance(e, HolowebError):
            raise
        raise FormatError(str(e)) from e
