# ------ src/vfparse/parser.py ------

"""
Recursive-descent parser and evaluator for vector-field expressions.

Grammar (lowest precedence first):

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?          right-associative
    atom   := NUMBER | NAME | FUNC '(' expr ')' | '(' expr ')'

"-x^2" therefore reads as -(x^2) and "2^3^2" as 2^(3^2).
"""

import logging
import re

import numpy as np

from src.errors import ArityError, FieldSyntaxError, NumericError, UnknownIdentifier
from src.vfparse.nodes import BinOp, Call, FieldExpr, FUNCTIONS, Neg, Number, Variable
from src.vfparse.tokenizer import EOF, IDENT, LPAREN, NUMBER, OPERATOR, RPAREN, tokenize_text

logger = logging.getLogger(__name__)

SHORT_NAMES = {'x': 1, 'y': 2, 'z': 3}
INDEXED_NAME = re.compile(r"x([1-9]\d*)$")


class Parser:
    """
    Parse one expression over the variables of a dim-dimensional field.
    """
    def __init__(self, text, dim):
        self.text = text
        self.dim = dim
        self.tokens = tokenize_text(text)
        self.index = 0

    @property
    def token(self):
        return self.tokens[self.index]

    def advance(self):
        token = self.token
        if token.kind != EOF:
            self.index += 1
        return token

    def expect(self, kind, expected):
        if self.token.kind != kind:
            raise FieldSyntaxError(self.token.position, expected, self.token.text or None)
        return self.advance()

    def parse(self):
        if self.token.kind == EOF:
            raise FieldSyntaxError(self.token.position, 'an expression')
        node = self.expr()
        if self.token.kind != EOF:
            raise FieldSyntaxError(self.token.position, 'an operator or end of input', self.token.text)
        return node

    def expr(self):
        node = self.term()
        while self.token.kind == OPERATOR and self.token.text in '+-':
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.token.kind == OPERATOR and self.token.text in '*/':
            op = self.advance().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.token.kind == OPERATOR and self.token.text == '-':
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.token.kind == OPERATOR and self.token.text == '^':
            position = self.advance().position
            exponent = self.unary()
            if exponent.variables():
                raise FieldSyntaxError(position + 1, 'a constant exponent')
            return BinOp('^', base, exponent)
        return base

    def atom(self):
        token = self.token
        if token.kind == NUMBER:
            self.advance()
            return Number(float(token.text))
        if token.kind == LPAREN:
            self.advance()
            node = self.expr()
            self.expect(RPAREN, "')'")
            return node
        if token.kind == IDENT:
            self.advance()
            if token.text in FUNCTIONS:
                self.expect(LPAREN, f"'(' after {token.text}")
                arg = self.expr()
                self.expect(RPAREN, "')'")
                return Call(token.text, arg)
            return self.variable(token)
        raise FieldSyntaxError(token.position, 'an operand', token.text or None)

    def variable(self, token):
        name = token.text
        if name in SHORT_NAMES and self.dim <= 3:
            index = SHORT_NAMES[name]
        else:
            match = INDEXED_NAME.match(name)
            if match is None:
                raise UnknownIdentifier(name, token.position)
            index = int(match.group(1))
        if index > self.dim:
            raise ArityError(name, index, self.dim)
        return Variable(name, index)


def parse_field(text, dim):
    """
    Parse one component of a vector field.

    Args:
        text (str): Expression source, e.g. "x - x^3"
        dim (int): Dimension of the phase space

    Returns:
        FieldExpr: Immutable parsed expression
    """
    if not text or not text.strip():
        raise FieldSyntaxError(1, 'an expression')
    ast = Parser(text, dim).parse()
    indices = ast.variables()
    arity = max(indices) if indices else 0
    logger.debug("parsed %r as %s (arity %d)", text, ast, arity)
    return FieldExpr(ast=ast, arity=arity, source=text)


def eval_field(expr, point):
    """
    Evaluate a parsed expression at one point.

    Args:
        expr (FieldExpr): Parsed expression
        point (sequence): Coordinates, at least expr.arity of them

    Returns:
        float: The value

    Raises:
        NumericError: If the result is NaN or infinite
    """
    point = np.atleast_1d(np.asarray(point, dtype=float))
    if point.shape[0] < expr.arity:
        raise ValueError(f"point has {point.shape[0]} components, expression needs {expr.arity}")
    value = float(expr.evaluate(point))
    if not np.isfinite(value):
        raise NumericError(f"{expr.source or expr} evaluated to {value} at {point.tolist()}")
    return value
