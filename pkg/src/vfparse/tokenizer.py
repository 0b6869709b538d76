# ------ src/vfparse/tokenizer.py ------

import re
from dataclasses import dataclass

from src.errors import FieldSyntaxError

NUMBER = 'number'
IDENT = 'ident'
OPERATOR = 'op'
LPAREN = '('
RPAREN = ')'
EOF = 'eof'

TOKEN_PATTERN = re.compile(
    r"(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^])"
    r"|(?P<lparen>\()"
    r"|(?P<rparen>\))"
    r"|(?P<space>\s+)"
)


@dataclass(frozen=True)
class Token:
    """A lexical token; position is the 1-based column of its first character."""
    kind: str
    text: str
    position: int


def tokenize_text(text):
    """
    Split a field expression into tokens.

    Args:
        text (str): Expression source

    Returns:
        list: Tokens, terminated by an EOF token at len(text) + 1

    Raises:
        FieldSyntaxError: On a character no token can start with
    """
    tokens = []
    index = 0
    while index < len(text):
        match = TOKEN_PATTERN.match(text, index)
        if match is None:
            raise FieldSyntaxError(index + 1, 'a number, name, operator or parenthesis', text[index])
        group = match.lastgroup
        if group == 'number':
            tokens.append(Token(NUMBER, match.group(), index + 1))
        elif group == 'ident':
            tokens.append(Token(IDENT, match.group(), index + 1))
        elif group == 'op':
            tokens.append(Token(OPERATOR, match.group(), index + 1))
        elif group == 'lparen':
            tokens.append(Token(LPAREN, '(', index + 1))
        elif group == 'rparen':
            tokens.append(Token(RPAREN, ')', index + 1))
        index = match.end()
    tokens.append(Token(EOF, '', len(text) + 1))
    return tokens
