"""
Exact multivariate polynomials over the Gaussian rationals.

``MultiPoly`` keeps a canonical term map (exponent vector -> nonzero
coefficient) over an ordered variable list and delegates the heavy algebra
(products, gcd, resultants, pseudo-division) to ``sympy.Poly`` over ``QQ_I``.
Every value is immutable; all operations return new polynomials.
"""
import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from types import MappingProxyType
from typing import Callable, Iterable, Mapping, Sequence, Union

from sympy import Expr, Poly, Symbol, lambdify
from sympy.polys.domains import QQ, QQ_I
from sympy.polys.domains.gaussiandomains import GaussianElement, GaussianRational
from sympy.polys.polyerrors import ExactQuotientFailed, PolynomialError
from sympy.polys.polyfuncs import horner

from app.core.errors import DegreeError, HolowebError, NotAnInvolutionError
from app.core.monitoring import timeit

logger = logging.getLogger(__name__)

IDENTIFIER = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
IMAGINARY_UNIT = "i"
CONJUGATE_SUFFIX = "_bar"

# sympy.Poly needs at least one generator; constants over an empty variable
# list are stored on this placeholder and stripped on the way back.
_PLACEHOLDER = Symbol("_holoweb_constant")

Coefficient = Union[int, Fraction, GaussianElement, Expr, tuple]


def to_gaussian(value: Coefficient) -> GaussianRational:
    """
    Convert a number to a Gaussian rational.

    Accepts ints, ``Fraction``, Gaussian domain elements, sympy numbers
    (``Rational``, ``I``) and ``(re, im)`` pairs of rationals.

    Raises:
        TypeError: If the value is a float or not a number.
    """
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, GaussianElement):
        return QQ_I(QQ.convert(value.x), QQ.convert(value.y))
    if isinstance(value, (bool, float, complex)):
        raise TypeError(f"{value!r} is not an exact coefficient")
    if isinstance(value, Fraction):
        return QQ_I(QQ(value.numerator, value.denominator), 0)
    if isinstance(value, tuple) and len(value) == 2:
        re_part, im_part = (to_fraction(to_gaussian(part)) for part in value)
        return QQ_I(QQ(re_part.numerator, re_part.denominator), QQ(im_part.numerator, im_part.denominator))
    try:
        return QQ_I.convert(value)
    except Exception as e:
        raise TypeError(f"{value!r} is not an exact coefficient") from e


def to_fraction(value: GaussianRational) -> Fraction:
    """Real part of a Gaussian rational as a ``Fraction``; the imaginary part must vanish."""
    if value.y != 0:
        raise ValueError(f"{value} is not real")
    return Fraction(int(value.x.numerator), int(value.x.denominator))


def real_part(value: GaussianRational) -> Fraction:
    return Fraction(int(value.x.numerator), int(value.x.denominator))


def imag_part(value: GaussianRational) -> Fraction:
    return Fraction(int(value.y.numerator), int(value.y.denominator))


def to_complex(value: GaussianRational) -> complex:
    return complex(float(value.x), float(value.y))


def conjugate_coefficient(value: GaussianRational) -> GaussianRational:
    return QQ_I(value.x, -value.y)


def union_variables(*polys: "MultiPoly") -> tuple[str, ...]:
    """Ordered union of the variable lists, first occurrence wins."""
    seen: dict[str, None] = {}
    for poly in polys:
        for name in poly.variables:
            seen.setdefault(name, None)
    return tuple(seen)


def _check_variables(variables: tuple[str, ...]) -> None:
    if len(set(variables)) != len(variables):
        raise ValueError(f"Duplicate variable names in {variables}")
    for name in variables:
        if not IDENTIFIER.match(name) or name == IMAGINARY_UNIT:
            raise ValueError(f"'{name}' is not a valid variable name")


def _format_rational(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _format_coefficient(coefficient: GaussianRational) -> tuple[bool, str]:
    """Split a coefficient into (negative, magnitude text) for printing."""
    re_part, im_part = real_part(coefficient), imag_part(coefficient)
    if im_part == 0:
        return re_part < 0, _format_rational(abs(re_part))
    if re_part == 0:
        magnitude = abs(im_part)
        text = IMAGINARY_UNIT if magnitude == 1 else f"{_format_rational(magnitude)}*{IMAGINARY_UNIT}"
        return im_part < 0, text
    sign = "+" if im_part > 0 else "-"
    magnitude = abs(im_part)
    im_text = IMAGINARY_UNIT if magnitude == 1 else f"{_format_rational(magnitude)}*{IMAGINARY_UNIT}"
    return False, f"({_format_rational(re_part)}{sign}{im_text})"


def _grlex_key(exponents: tuple[int, ...]) -> tuple:
    return sum(exponents), exponents


class MultiPoly:
    """
    Exact multivariate polynomial with Gaussian rational coefficients.

    Attributes:
        variables (tuple[str, ...]): Ordered indeterminates; the order fixes the
            graded-lexicographic monomial order used for printing and
            normalization.
        terms (Mapping[tuple[int, ...], GaussianRational]): Nonzero coefficients
            keyed by exponent vectors of length ``len(variables)``.

    Equality and hashing ignore the variable order and unused variables, so
    ``x + y`` over ``(x, y)`` equals ``y + x`` over ``(y, x, z)``.
    """

    def __init__(self, terms: Mapping[tuple[int, ...], Coefficient], variables: Sequence[str]) -> None:
        variables = tuple(variables)
        _check_variables(variables)
        clean: dict[tuple[int, ...], GaussianRational] = {}
        for exponents, coefficient in terms.items():
            exponents = tuple(int(e) for e in exponents)
            if len(exponents) != len(variables):
                raise ValueError(f"Exponent vector {exponents} does not match variables {variables}")
            if any(e < 0 for e in exponents):
                raise ValueError(f"Negative exponent in {exponents}")
            value = to_gaussian(coefficient)
            if value != QQ_I.zero:
                clean[exponents] = value
        self._variables = variables
        self._terms = MappingProxyType(clean)

    # construction

    @classmethod
    def zero(cls, variables: Sequence[str] = ()) -> "MultiPoly":
        return cls({}, variables)

    @classmethod
    def constant(cls, value: Coefficient, variables: Sequence[str] = ()) -> "MultiPoly":
        variables = tuple(variables)
        return cls({(0,) * len(variables): value}, variables)

    @classmethod
    def variable(cls, name: str, variables: Sequence[str] | None = None) -> "MultiPoly":
        variables = (name,) if variables is None else tuple(variables)
        exponents = tuple(1 if v == name else 0 for v in variables)
        if sum(exponents) != 1:
            raise ValueError(f"'{name}' is not in {variables}")
        return cls({exponents: 1}, variables)

    @classmethod
    def from_poly(cls, poly: Poly, variables: Sequence[str]) -> "MultiPoly":
        """Build from a ``sympy.Poly`` whose generators are named by ``variables`` (or the placeholder)."""
        variables = tuple(variables)
        index = {name: i for i, name in enumerate(variables)}
        names = [str(gen) for gen in poly.gens]
        terms = {}
        for exponents, coefficient in poly.as_dict(native=True).items():
            full = [0] * len(variables)
            for name, e in zip(names, exponents):
                if e and name != _PLACEHOLDER.name:
                    full[index[name]] = e
            terms[tuple(full)] = coefficient
        return cls(terms, variables)

    @classmethod
    def from_expr(cls, expr: Expr, variables: Sequence[str]) -> "MultiPoly":
        """Expand a sympy expression that is polynomial in ``variables``."""
        variables = tuple(variables)
        gens = [Symbol(name) for name in variables] or [_PLACEHOLDER]
        try:
            poly = Poly(expr, *gens, domain=QQ_I)
        except PolynomialError as e:
            raise HolowebError(f"{expr} is not a polynomial in {variables} over Q(i)") from e
        return cls.from_poly(poly, variables)

    @classmethod
    def parse(cls, text: str, variables: Sequence[str]) -> "MultiPoly":
        from app.services.parser import parse_poly

        return parse_poly(text, variables)

    # views

    @property
    def variables(self) -> tuple[str, ...]:
        return self._variables

    @property
    def terms(self) -> Mapping[tuple[int, ...], GaussianRational]:
        return self._terms

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def is_constant(self) -> bool:
        return all(not any(exponents) for exponents in self._terms)

    @property
    def constant_value(self) -> GaussianRational:
        return self._terms.get((0,) * len(self._variables), QQ_I.zero)

    @property
    def used_variables(self) -> tuple[str, ...]:
        return tuple(name for i, name in enumerate(self._variables)
                     if any(exponents[i] for exponents in self._terms))

    @property
    def total_degree(self) -> int:
        return max((sum(exponents) for exponents in self._terms), default=-1)

    def degree(self, var: str) -> int:
        """Degree in ``var``; -1 for the zero polynomial, 0 when ``var`` does not occur."""
        if self.is_zero:
            return -1
        if var not in self._variables:
            return 0
        i = self._variables.index(var)
        return max(exponents[i] for exponents in self._terms)

    def leading_term(self) -> tuple[tuple[int, ...], GaussianRational]:
        """Leading (exponents, coefficient) under graded-lex order of ``variables``."""
        if self.is_zero:
            raise ValueError("The zero polynomial has no leading term")
        exponents = max(self._terms, key=_grlex_key)
        return exponents, self._terms[exponents]

    @property
    def leading_coefficient(self) -> GaussianRational:
        return self.leading_term()[1]

    def coefficient(self, var: str, power: int) -> "MultiPoly":
        """Coefficient of ``var**power``, as a polynomial over the remaining variables."""
        rest = tuple(name for name in self._variables if name != var)
        if var not in self._variables:
            return self.with_variables(rest) if power == 0 else MultiPoly.zero(rest)
        i = self._variables.index(var)
        terms = {exponents[:i] + exponents[i + 1:]: c
                 for exponents, c in self._terms.items() if exponents[i] == power}
        return MultiPoly(terms, rest)

    def coefficients(self, var: str) -> list["MultiPoly"]:
        """Coefficients of ``var**0 .. var**degree``."""
        return [self.coefficient(var, j) for j in range(max(self.degree(var), 0) + 1)]

    # variable-list manipulation

    def _aligned_terms(self, variables: tuple[str, ...]) -> dict[tuple[int, ...], GaussianRational]:
        index = {name: i for i, name in enumerate(variables)}
        aligned = {}
        for exponents, coefficient in self._terms.items():
            full = [0] * len(variables)
            for name, e in zip(self._variables, exponents):
                if e:
                    if name not in index:
                        raise ValueError(f"Variable '{name}' is used but missing from {variables}")
                    full[index[name]] = e
            aligned[tuple(full)] = coefficient
        return aligned

    def with_variables(self, variables: Sequence[str]) -> "MultiPoly":
        """Re-embed over another variable list containing every used variable."""
        variables = tuple(variables)
        if variables == self._variables:
            return self
        return MultiPoly(self._aligned_terms(variables), variables)

    def rename(self, mapping: Mapping[str, str]) -> "MultiPoly":
        return MultiPoly(dict(self._terms), [mapping.get(name, name) for name in self._variables])

    def to_poly(self, variables: Sequence[str] | None = None) -> Poly:
        variables = self._variables if variables is None else tuple(variables)
        terms = self._aligned_terms(variables)
        if not variables:
            return Poly.from_dict({(0,): c for c in terms.values()}, _PLACEHOLDER, domain=QQ_I)
        return Poly.from_dict(terms, *[Symbol(name) for name in variables], domain=QQ_I)

    def to_expr(self) -> Expr:
        return self.to_poly().as_expr()

    # arithmetic

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            return other
        return MultiPoly.constant(to_gaussian(other), self._variables)

    def _binary(self, other, operation: Callable[[Poly, Poly], Poly]) -> "MultiPoly":
        other = self._coerce(other)
        variables = union_variables(self, other)
        return MultiPoly.from_poly(operation(self.to_poly(variables), other.to_poly(variables)), variables)

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    def __radd__(self, other):
        return self._coerce(other) + self

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        return self._binary(other, lambda a, b: a * b)

    def __rmul__(self, other):
        return self._coerce(other) * self

    def __neg__(self):
        return MultiPoly({e: -c for e, c in self._terms.items()}, self._variables)

    def __pow__(self, power: int):
        if not isinstance(power, int) or power < 0:
            raise ValueError("Only natural powers are supported")
        return MultiPoly.from_poly(self.to_poly() ** power, self._variables)

    def scale(self, factor: Coefficient) -> "MultiPoly":
        factor = to_gaussian(factor)
        return MultiPoly({e: c * factor for e, c in self._terms.items()}, self._variables)

    def conjugate(self) -> "MultiPoly":
        """Conjugate every coefficient, keeping the variables."""
        return MultiPoly({e: conjugate_coefficient(c) for e, c in self._terms.items()}, self._variables)

    def exquo(self, other: "MultiPoly") -> "MultiPoly":
        """Exact quotient; raises ``ValueError`` when ``other`` does not divide."""
        variables = union_variables(self, other)
        try:
            quotient = self.to_poly(variables).exquo(other.to_poly(variables))
        except ExactQuotientFailed as e:
            raise ValueError(f"{other} does not divide {self}") from e
        result = MultiPoly.from_poly(quotient, variables)
        if set(result.used_variables) <= set(self._variables):
            return result.with_variables(self._variables)
        return result

    def diff(self, var: str) -> "MultiPoly":
        if var not in self._variables:
            return MultiPoly.zero(self._variables)
        return MultiPoly.from_poly(self.to_poly().diff(Symbol(var)), self._variables)

    def subs(self, mapping: Mapping[str, Union["MultiPoly", Coefficient]]) -> "MultiPoly":
        """
        Simultaneous substitution of variables by polynomials or constants.

        The result lives over the unsubstituted variables followed by the
        variables of the replacements.
        """
        replacements = {name: value if isinstance(value, MultiPoly) else MultiPoly.constant(value)
                        for name, value in mapping.items()}
        kept = MultiPoly.zero([name for name in self._variables if name not in replacements])
        variables = union_variables(kept, *replacements.values())
        expr = self.to_expr().xreplace({Symbol(name): value.to_expr() for name, value in replacements.items()})
        return MultiPoly.from_expr(expr, variables)

    # normalization

    def normalized(self) -> "MultiPoly":
        """Divide by the graded-lex leading coefficient; the zero polynomial is returned as is."""
        if self.is_zero:
            return self
        return self.scale(QQ_I.one / self.leading_coefficient)

    def is_proportional(self, other: "MultiPoly") -> bool:
        """True iff the two polynomials agree up to a nonzero constant factor."""
        return self.normalized() == other.normalized()

    # numerics

    @cached_property
    def _numeric(self) -> Callable[..., complex]:
        symbols = [Symbol(name) for name in self._variables]
        if self.is_constant:
            value = to_complex(self.constant_value)
            return lambda *args: value
        return lambdify(symbols, horner(self.to_expr(), *symbols), modules="numpy")

    def evaluate_numeric(self, values: Mapping[str, complex]) -> complex:
        """Float evaluation by a nested Horner scheme; every variable must be assigned."""
        missing = [name for name in self._variables if name not in values]
        if missing:
            raise ValueError(f"Numeric evaluation needs values for {missing}")
        return complex(self._numeric(*[complex(values[name]) for name in self._variables]))

    def numeric_function(self) -> Callable[..., complex]:
        """Compiled evaluator taking positional arguments in ``variables`` order."""
        return self._numeric

    def majorant(self) -> "MultiPoly":
        """Polynomial with coefficients |Re c| + |Im c|; bounds |p| on polydiscs."""
        return MultiPoly({e: QQ_I(abs(c.x) + abs(c.y), 0) for e, c in self._terms.items()}, self._variables)

    # comparison and printing

    def _key(self) -> frozenset:
        return frozenset(
            (tuple((name, e) for name, e in zip(self._variables, exponents) if e), coefficient)
            for exponents, coefficient in self._terms.items()
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiPoly):
            try:
                other = self._coerce(other)
            except TypeError:
                return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def to_text(self) -> str:
        """Print in the polynomial grammar, terms in decreasing graded-lex order."""
        if self.is_zero:
            return "0"
        pieces = []
        for exponents in sorted(self._terms, key=_grlex_key, reverse=True):
            negative, magnitude = _format_coefficient(self._terms[exponents])
            monomial = "*".join(name if e == 1 else f"{name}^{e}"
                                for name, e in zip(self._variables, exponents) if e)
            if not monomial:
                body = magnitude
            elif magnitude == "1":
                body = monomial
            else:
                body = f"{magnitude}*{monomial}"
            if not pieces:
                pieces.append(f"-{body}" if negative else body)
            else:
                pieces.append(f" - {body}" if negative else f" + {body}")
        return "".join(pieces)

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"MultiPoly('{self.to_text()}', variables={list(self._variables)})"


@dataclass(frozen=True)
class HermitianPoly:
    """
    Polynomial in holomorphic variables and their formal conjugates.

    Attributes:
        base (MultiPoly): The defining polynomial F(x, x_bar).
        pairing (Mapping[str, str]): Involution x_j <-> x_j_bar on variable names.
    """
    base: MultiPoly
    pairing: Mapping[str, str] = field(compare=False)

    def __post_init__(self) -> None:
        check_involution(self.pairing)

    @property
    def holomorphic_variables(self) -> tuple[str, ...]:
        return tuple(name for name in self.base.variables
                     if name in self.pairing and not name.endswith(CONJUGATE_SUFFIX))

    def is_real(self) -> bool:
        return conj_swap(self.base, self.pairing) == self.base

    def __str__(self) -> str:
        return str(self.base)


def conjugate_name(name: str) -> str:
    return name[:-len(CONJUGATE_SUFFIX)] if name.endswith(CONJUGATE_SUFFIX) else name + CONJUGATE_SUFFIX


def conjugate_pairing(names: Iterable[str]) -> dict[str, str]:
    """The involution x <-> x_bar on the given holomorphic (or conjugate) names."""
    pairing = {}
    for name in names:
        partner = conjugate_name(name)
        pairing[name] = partner
        pairing[partner] = name
    return pairing


def check_involution(pairing: Mapping[str, str]) -> None:
    for name, image in pairing.items():
        if pairing.get(image, image) != name:
            raise NotAnInvolutionError(f"pairing sends {name} -> {image} but {image} -> {pairing.get(image, image)}")


# operations


def arithmetic(lhs: MultiPoly, rhs: MultiPoly, op: str) -> MultiPoly:
    """Exact ring operation ``op`` in {"add", "sub", "mul"} over the union of variables."""
    operations = {"add": MultiPoly.__add__, "sub": MultiPoly.__sub__, "mul": MultiPoly.__mul__}
    if op not in operations:
        raise ValueError(f"Unknown operation '{op}'")
    return operations[op](lhs, rhs)


def partial_derivative(p: MultiPoly, var: str) -> MultiPoly:
    if var not in p.variables:
        raise ValueError(f"'{var}' is not a variable of {p!r}")
    return p.diff(var)


def evaluate(p: MultiPoly, assignment: Mapping[str, Union[Coefficient, complex, float]]) -> Union[MultiPoly, complex]:
    """
    Substitute values for variables.

    Exact values (ints, fractions, Gaussian rationals) may leave variables
    unassigned and give the exact polynomial over the rest. Any float or
    complex value switches to numeric evaluation, which returns a number, so
    every variable of ``p`` must then be assigned.

    Raises:
        ValueError: If a float or complex value is given and a variable of
            ``p`` has no value.
    """
    remaining = [name for name in p.variables if name not in assignment]
    if any(isinstance(value, (float, complex)) for value in assignment.values()):
        if remaining:
            raise ValueError(f"float values need every variable assigned; {remaining} have no value "
                             f"(substitute exact values for a partial evaluation)")
        return p.evaluate_numeric(assignment)
    return p.subs({name: value for name, value in assignment.items() if name in p.variables}).with_variables(remaining)


def gcd(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    """
    Greatest common divisor, graded-lex leading coefficient 1.

    sympy runs a primitive polynomial remainder sequence recursively over the
    variable tower; gcd(a, 0) is the normalized ``a``.
    """
    variables = union_variables(a, b)
    if a.is_zero and b.is_zero:
        return MultiPoly.zero(variables)
    g = a.to_poly(variables).gcd(b.to_poly(variables))
    return MultiPoly.from_poly(g, variables).normalized()


def square_free_part(p: MultiPoly, var: str) -> MultiPoly:
    """p / gcd(p, dp/dvar), normalized; removes repeated factors involving ``var``."""
    if p.degree(var) < 1:
        raise DegreeError(f"{p} has degree zero in {var}")
    return p.exquo(gcd(p, p.diff(var))).normalized()


def radical(p: MultiPoly) -> MultiPoly:
    """Square-free part with respect to every variable (normalized)."""
    if p.is_zero:
        return p
    if p.is_constant:
        return MultiPoly.constant(1, p.variables)
    g = reduce(gcd, (p.diff(name) for name in p.used_variables), p)
    return p.exquo(g).normalized()


@timeit
def resultant(f: MultiPoly, g: MultiPoly, var: str) -> MultiPoly:
    """
    Sylvester resultant of ``f`` and ``g`` with respect to ``var``.

    Convention: Res(f, g) = lc(f)^deg(g) * prod g(a) over the roots a of f,
    i.e. the determinant of the Sylvester matrix built from the nominal
    degrees of the inputs. The result lives over the remaining variables.

    Raises:
        DegreeError: If either input has degree zero in ``var``.
    """
    if f.degree(var) < 1 or g.degree(var) < 1:
        raise DegreeError(f"resultant in {var} needs positive degree: deg f = {f.degree(var)}, deg g = {g.degree(var)}")
    variables = union_variables(f, g)
    order = (var,) + tuple(name for name in variables if name != var)
    rest = order[1:]
    value = f.to_poly(order).resultant(g.to_poly(order))
    if isinstance(value, Poly):
        return MultiPoly.from_poly(value, rest)
    return MultiPoly.constant(QQ_I.from_sympy(value), rest)


def pseudo_remainder(f: MultiPoly, g: MultiPoly, var: str) -> MultiPoly:
    """Pseudo-remainder of ``f`` by ``g`` viewed as polynomials in ``var``."""
    if g.degree(var) < 1:
        raise DegreeError(f"{g} has degree zero in {var}")
    variables = union_variables(f, g)
    order = (var,) + tuple(name for name in variables if name != var)
    return MultiPoly.from_poly(f.to_poly(order).prem(g.to_poly(order)), order).with_variables(variables)


def discriminant_in(p: MultiPoly, var: str) -> MultiPoly:
    """
    Reduced discriminant of ``p`` in ``var``: Res(p, dp/dvar) / lc(p), then
    made square-free and normalized.

    Raises:
        DegreeError: If ``p`` has degree < 2 in ``var``.
    """
    d = p.degree(var)
    if d < 2:
        raise DegreeError(f"discriminant in {var} needs degree >= 2, got {d}")
    rest = tuple(name for name in p.variables if name != var)
    raw = resultant(p, p.diff(var), var)
    return radical(raw.exquo(p.coefficient(var, d))).with_variables(rest)


def conj_swap(p: MultiPoly, pairing: Mapping[str, str]) -> MultiPoly:
    """
    Conjugate every coefficient and rename variables by the involution
    ``pairing``; names outside the pairing are fixed.

    Raises:
        NotAnInvolutionError: If ``pairing`` is not an involution.
    """
    check_involution(pairing)
    renamed = tuple(pairing.get(name, name) for name in p.variables)
    swapped = MultiPoly({e: conjugate_coefficient(c) for e, c in p.terms.items()}, renamed)
    if set(renamed) == set(p.variables):
        return swapped.with_variables(p.variables)
    return swapped
