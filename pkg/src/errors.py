# ------ src/errors.py ------

"""
Exceptions raised by the analysis modules.

Input errors (bad files, bad identifiers, bad flags) map to CLI exit code 2;
everything else derives from AnalysisError directly.
"""


class AnalysisError(ValueError):
    """Base class for every error raised by this package."""


class InputError(AnalysisError):
    """An error caused by user-supplied input."""


class ParseError(InputError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        location = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{location}")


class SchemaError(InputError):
    def __init__(self, message, field=None):
        self.field = field
        prefix = f"{field}: " if field else ""
        super().__init__(f"{prefix}{message}")


class FieldSyntaxError(InputError):
    def __init__(self, position, expected, found=None):
        self.position = position
        self.expected = expected
        self.found = found
        got = f", found {found!r}" if found is not None else ""
        super().__init__(f"syntax error at position {position}: expected {expected}{got}")


class UnknownIdentifier(InputError):
    def __init__(self, name, position=None):
        self.name = name
        self.position = position
        at = f" at position {position}" if position is not None else ""
        super().__init__(f"unknown identifier {name!r}{at}")


class ArityError(InputError):
    def __init__(self, name, index, dim):
        self.name = name
        self.index = index
        self.dim = dim
        super().__init__(f"variable {name!r} refers to component {index} but dim is {dim}")


class UnknownState(InputError):
    def __init__(self, state):
        self.state = state
        super().__init__(f"unknown state {state!r}")


class OutOfDomain(InputError):
    def __init__(self, point):
        self.point = point
        super().__init__(f"initial point {point!r} lies outside the domain box")


class NonIntegerTime(InputError):
    def __init__(self, t):
        self.t = t
        super().__init__(f"finite systems evolve in integer steps, got t={t!r}")


class GridTooLarge(InputError):
    def __init__(self, n_cells, cap):
        self.n_cells = n_cells
        self.cap = cap
        super().__init__(f"grid has {n_cells} cells, cap is {cap} (set MFW_CELL_CAP to raise it)")


class EmptyInput(InputError):
    def __init__(self, what='cell set'):
        super().__init__(f"{what} must be nonempty")


class ChainNotIncreasing(InputError):
    def __init__(self, index):
        self.index = index
        super().__init__(f"chain entry {index} does not strictly contain its predecessor")


class ChainEntryNotAttractor(InputError):
    def __init__(self, index):
        self.index = index
        super().__init__(f"chain entry {index} is not an attractor of the restricted system")


class NumericError(AnalysisError):
    """Evaluation produced NaN or infinity."""


class MultivaluedState(AnalysisError):
    def __init__(self, state, count):
        self.state = state
        self.count = count
        super().__init__(f"state {state!r} has {count} successors; evolve needs exactly one")


class NotDeterministic(AnalysisError):
    def __init__(self, what):
        super().__init__(f"{what} is only defined for deterministic systems")


class NotAbsorbing(AnalysisError):
    def __init__(self, cell):
        self.cell = cell
        super().__init__(f"set is not absorbing: cell {cell!r} keeps leaving it")


class EscapesDomain(AnalysisError):
    def __init__(self, cell):
        self.cell = cell
        super().__init__(f"cell {cell!r} reaches the escape sink")


class NotForwardClosed(AnalysisError):
    def __init__(self, cell):
        self.cell = cell
        super().__init__(f"set is not forward closed at cell {cell!r}")


class NotAttractorInSubsystem(AnalysisError):
    def __init__(self):
        super().__init__("set is not an attractor of the restricted system")


class EmptyAttractor(AnalysisError):
    def __init__(self):
        super().__init__("attractor cell set is empty")


class NotInBasin(AnalysisError):
    def __init__(self, x):
        self.x = x
        super().__init__(f"{x!r} is not in the region of attraction")


class HorizonTooShort(AnalysisError):
    def __init__(self, horizon, zeta):
        self.horizon = horizon
        self.zeta = zeta
        super().__init__(f"trajectory still at zeta={zeta:.3g} after horizon {horizon}")


class Overlap(AnalysisError):
    def __init__(self, cells):
        self.cells = cells
        super().__init__(f"separation set meets the attractor in cells {sorted(cells)!r}")
