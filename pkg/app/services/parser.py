"""
Recursive-descent parser for the polynomial text grammar.

    expression := sign? term (('+' | '-') term)*
    term       := factor ('*' factor)*
    factor     := base ('^' natural)?
    base       := identifier | rational | 'i' | '(' expression ')'
    rational   := integer ('/' natural)?

``i`` is the imaginary unit and can never be a variable. Whitespace
(including newlines) is insignificant.
"""
import logging
import re
from typing import NamedTuple, Sequence

from sympy import I, Integer, Rational, Symbol

from app.core.errors import PolynomialSyntaxError, UnknownIdentifierError
from app.services.polynomial import IMAGINARY_UNIT, MultiPoly

logger = logging.getLogger(__name__)

_TOKEN_RE = re.compile(r"(?P<number>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*^/()])")
_WHITESPACE_RE = re.compile(r"\s+")


class Token(NamedTuple):
    kind: str
    value: str
    position: int


def tokenize(text: str, line_offset: int = 0) -> list[Token]:
    tokens = []
    position = 0
    while position < len(text):
        blank = _WHITESPACE_RE.match(text, position)
        if blank:
            position = blank.end()
            continue
        match = _TOKEN_RE.match(text, position)
        if not match:
            raise PolynomialSyntaxError(f"unexpected character '{text[position]}'", text, position, line_offset)
        tokens.append(Token(match.lastgroup, match.group(), position))
        position = match.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, variables: Sequence[str], line_offset: int) -> None:
        self.text = text
        self.line_offset = line_offset
        self.symbols = {name: Symbol(name) for name in variables}
        self.tokens = tokenize(text, line_offset)
        self.index = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def _error(self, message: str, token: Token | None = None) -> PolynomialSyntaxError:
        token = token or self.current
        return PolynomialSyntaxError(message, self.text, token.position, self.line_offset)

    def _accept(self, value: str) -> bool:
        if self.current.kind == "op" and self.current.value == value:
            self.index += 1
            return True
        return False

    def _expect_natural(self) -> int:
        token = self.current
        if token.kind != "number":
            raise self._error(f"expected a natural number, found '{token.value or 'end of input'}'")
        self.index += 1
        return int(token.value)

    def parse(self):
        if self.current.kind == "end":
            raise self._error("empty polynomial")
        expr = self._expression()
        if self.current.kind != "end":
            raise self._error(f"unexpected '{self.current.value}'")
        return expr

    def _expression(self):
        negative = False
        if self._accept("-"):
            negative = True
        else:
            self._accept("+")
        value = self._term()
        if negative:
            value = -value
        while True:
            if self._accept("+"):
                value = value + self._term()
            elif self._accept("-"):
                value = value - self._term()
            else:
                return value

    def _term(self):
        value = self._factor()
        while self._accept("*"):
            value = value * self._factor()
        return value

    def _factor(self):
        value = self._base()
        if self._accept("^"):
            value = value ** self._expect_natural()
        return value

    def _base(self):
        token = self.current
        if token.kind == "number":
            self.index += 1
            numerator = int(token.value)
            if self._accept("/"):
                slash = self.tokens[self.index - 1]
                denominator = self._expect_natural()
                if denominator == 0:
                    raise self._error("zero denominator", slash)
                return Rational(numerator, denominator)
            return Integer(numerator)
        if token.kind == "name":
            self.index += 1
            if token.value == IMAGINARY_UNIT:
                return I
            if token.value not in self.symbols:
                raise UnknownIdentifierError(f"unknown identifier '{token.value}'", self.text, token.position,
                                             self.line_offset)
            return self.symbols[token.value]
        if self._accept("("):
            value = self._expression()
            if not self._accept(")"):
                raise self._error("expected ')'")
            return value
        raise self._error(f"expected a number, identifier or '(', found '{token.value or 'end of input'}'")


def parse_poly(text: str, variables: Sequence[str], line_offset: int = 0) -> MultiPoly:
    """
    Parse ``text`` into a canonical polynomial over ``variables``.

    Args:
        text (str): Polynomial in the grammar above.
        variables (Sequence[str]): Allowed identifiers, in canonical order.
        line_offset (int): Added to reported line numbers (for text embedded in files).

    Returns:
        MultiPoly: The expanded polynomial.

    Raises:
        PolynomialSyntaxError: On malformed text, with line and column.
        UnknownIdentifierError: If an identifier is not in ``variables``.
    """
    variables = tuple(variables)
    if IMAGINARY_UNIT in variables:
        raise PolynomialSyntaxError("'i' is reserved for the imaginary unit and cannot name a variable")
    if len(set(variables)) != len(variables):
        raise PolynomialSyntaxError(f"duplicate variable names in {variables}")
    expr = _Parser(text, variables, line_offset).parse()
    return MultiPoly.from_expr(expr, variables)
