# ------ src/transition/grid.py ------

import itertools

import numpy as np

from config.config import MAX_GRID_DIM
from src.errors import InputError


class Grid:
    """
    Uniform box grid with 2^depth cells per axis.

    Cells are indexed by the C-order ravel of their multi-index, so in one
    dimension cell i is [a + i*w, a + (i+1)*w].
    """
    def __init__(self, box, depth):
        self.box = np.asarray(box, dtype=float).reshape(-1, 2)
        self.depth = int(depth)
        if self.depth < 0:
            raise InputError(f"depth must be nonnegative, got {depth}")
        if self.dim > MAX_GRID_DIM:
            raise InputError(f"grids are limited to {MAX_GRID_DIM} dimensions, got {self.dim}")
        self.per_axis = 2 ** self.depth
        self.shape = (self.per_axis,) * self.dim
        self.lower = self.box[:, 0]
        self.upper = self.box[:, 1]
        self.widths = (self.upper - self.lower) / self.per_axis

    @property
    def dim(self):
        return self.box.shape[0]

    @property
    def n_cells(self):
        return self.per_axis ** self.dim

    @property
    def width(self):
        """Cell width along the first axis."""
        return float(self.widths[0])

    def multi_index(self, cells):
        return np.stack(np.unravel_index(np.asarray(cells, dtype=np.int64), self.shape), axis=-1)

    def index_of(self, multi):
        multi = np.asarray(multi, dtype=np.int64).reshape(-1, self.dim)
        return np.ravel_multi_index(tuple(multi.T), self.shape)

    def bounds(self, cells):
        """
        Lower and upper corners of the given cells.

        Args:
            cells (array-like): Cell indices

        Returns:
            tuple: (lower (n, dim), upper (n, dim))
        """
        lo = self.lower + self.multi_index(cells) * self.widths
        return lo, lo + self.widths

    def centers(self, cells=None):
        if cells is None:
            cells = np.arange(self.n_cells)
        lo, hi = self.bounds(cells)
        return 0.5 * (lo + hi)

    def cell_of(self, points):
        """
        Cell index of each point; -1 for points outside the box.

        Points on an interior face belong to the upper cell, points on the
        upper face of the box to the last cell.
        """
        points = np.asarray(points, dtype=float).reshape(-1, self.dim)
        inside = np.all((points >= self.lower) & (points <= self.upper), axis=1)
        multi = np.floor((points - self.lower) / self.widths).astype(np.int64)
        multi = np.clip(multi, 0, self.per_axis - 1)
        cells = np.full(len(points), -1, dtype=np.int64)
        if inside.any():
            cells[inside] = self.index_of(multi[inside])
        return cells

    def cell_hull(self, cells):
        """Bounding box (lower, upper) of a nonempty union of cells."""
        lo, hi = self.bounds(sorted(cells))
        return lo.min(axis=0), hi.max(axis=0)

    def samples(self, cells, per_axis):
        """
        Regular sample pattern inside each cell, corners included.

        Args:
            cells (array-like): Cell indices
            per_axis (int): Samples per axis, >= 2

        Returns:
            ndarray: Shape (n, per_axis**dim, dim)
        """
        offsets = np.linspace(0.0, 1.0, per_axis)
        pattern = np.array(list(itertools.product(offsets, repeat=self.dim)))
        lo, _ = self.bounds(cells)
        return lo[:, None, :] + pattern[None, :, :] * self.widths

    def index_ranges(self, lo, hi):
        """Per-axis index ranges of cells meeting the closed boxes [lo, hi]."""
        first = np.floor((lo - self.lower) / self.widths).astype(np.int64)
        last = np.floor((hi - self.lower) / self.widths).astype(np.int64)
        return np.clip(first, 0, self.per_axis - 1), np.clip(last, 0, self.per_axis - 1)

    def cells_in_ranges(self, first, last):
        axes = [range(f, l + 1) for f, l in zip(first, last)]
        return [int(np.ravel_multi_index(multi, self.shape)) for multi in itertools.product(*axes)]

    def describe(self):
        return {
            'box': self.box.tolist(),
            'depth': self.depth,
            'n_cells': self.n_cells,
            'widths': self.widths.tolist(),
        }
