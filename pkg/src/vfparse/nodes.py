# ------ src/vfparse/nodes.py ------

"""
Expression tree for vector-field components.

Every node evaluates on floats or on numpy arrays alike, so one tree serves
a single point and a whole batch of grid samples.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

FUNCTIONS = {
    'sin': np.sin,
    'cos': np.cos,
    'exp': np.exp,
    'tanh': np.tanh,
    'abs': np.abs,
    'sqrt': np.sqrt,
}

BINARY = {
    '+': np.add,
    '-': np.subtract,
    '*': np.multiply,
    '/': np.divide,
    '^': np.power,
}


@dataclass(frozen=True)
class Number:
    value: float

    def evaluate(self, columns):
        return self.value

    def variables(self):
        return frozenset()

    def __str__(self):
        return repr(float(self.value))


@dataclass(frozen=True)
class Variable:
    name: str
    index: int  # 1-based component index

    def evaluate(self, columns):
        return columns[self.index - 1]

    def variables(self):
        return frozenset([self.index])

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Neg:
    operand: object

    def evaluate(self, columns):
        return np.negative(self.operand.evaluate(columns))

    def variables(self):
        return self.operand.variables()

    def __str__(self):
        return f"(-{self.operand})"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object

    def evaluate(self, columns):
        return BINARY[self.op](self.left.evaluate(columns), self.right.evaluate(columns))

    def variables(self):
        return self.left.variables() | self.right.variables()

    def __str__(self):
        return f"({self.left} {self.op} {self.right})"


@dataclass(frozen=True)
class Call:
    func: str
    arg: object

    def evaluate(self, columns):
        return FUNCTIONS[self.func](self.arg.evaluate(columns))

    def variables(self):
        return self.arg.variables()

    def __str__(self):
        return f"{self.func}({self.arg})"


@dataclass(frozen=True)
class FieldExpr:
    """A parsed component of a vector field."""
    ast: object
    arity: int
    source: str = ''

    @property
    def indices(self) -> Tuple[int, ...]:
        return tuple(sorted(self.ast.variables()))

    def evaluate(self, points):
        """
        Evaluate on a batch of points.

        Args:
            points (ndarray): Shape (n, dim) or (dim,)

        Returns:
            ndarray: Shape (n,) or a 0-d array; non-finite entries are left in place
        """
        points = np.asarray(points, dtype=float)
        columns = points.T if points.ndim == 2 else points
        with np.errstate(all='ignore'):
            result = self.ast.evaluate(columns)
        if points.ndim == 2:
            return np.broadcast_to(np.asarray(result, dtype=float), (points.shape[0],))
        return np.asarray(result, dtype=float)

    def __str__(self):
        return str(self.ast)
