"""Dense real matrices and the handful of kernels the fractional backward needs.

Values are float64, row-major and read-only once built. Inner sums always
run left to right in index order, so identical inputs give identical bits
regardless of which kernel backend is active.
"""

import numpy as np

from . import _backend
from .errors import ShapeError


class Matrix:
    """Immutable ``rows x cols`` float64 matrix."""

    __slots__ = ("_a",)

    def __init__(self, data):
        a = np.array(data, dtype=np.float64, order="C", copy=True)
        if a.ndim == 1:
            a = a.reshape(1, -1)
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise ShapeError(f"Matrix needs a non-empty 2-D array, got shape {a.shape}")
        if not np.isfinite(a).all():
            raise ValueError("Matrix entries must be finite")
        a.flags.writeable = False
        self._a = a

    @classmethod
    def _wrap(cls, a):
        # trusted kernel output: skip copy and finiteness scan
        m = cls.__new__(cls)
        a = np.ascontiguousarray(a, dtype=np.float64)
        a.flags.writeable = False
        m._a = a
        return m

    @property
    def rows(self):
        return self._a.shape[0]

    @property
    def cols(self):
        return self._a.shape[1]

    @property
    def shape(self):
        return self._a.shape

    @property
    def data(self):
        """Row-major flat copy of the entries."""
        return self._a.ravel().tolist()

    @property
    def nbytes(self):
        return self._a.nbytes

    def to_numpy(self):
        """Read-only view of the underlying array."""
        return self._a

    def tolist(self):
        return self._a.tolist()

    def __getitem__(self, idx):
        return float(self._a[idx])

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self._a, other._a))

    __hash__ = None

    def __repr__(self):
        return f"Matrix({self.rows}x{self.cols}, {self._a.tolist()!r})"


def _shape_str(m):
    return f"{m.rows}x{m.cols}"


def matmul(a, b):
    if a.cols != b.rows:
        raise ShapeError(f"matmul: cannot multiply {_shape_str(a)} by {_shape_str(b)}")
    return Matrix._wrap(_backend.kernels.matmul(a._a, b._a))


def matmul_tn(a, b):
    """``transpose(a) . b``; bitwise equal to ``matmul(transpose(a), b)``."""
    if a.rows != b.rows:
        raise ShapeError(
            f"matmul_tn: cannot multiply transpose of {_shape_str(a)} by {_shape_str(b)}"
        )
    return Matrix._wrap(_backend.kernels.matmul_tn(a._a, b._a))


def _broadcast_ok(a, b):
    return a.shape == b.shape or (b.rows == 1 and b.cols == a.cols)


def hadamard(a, b):
    """Element-wise product. ``b`` may be a ``1 x m`` row broadcast over ``a``'s rows."""
    if not _broadcast_ok(a, b):
        raise ShapeError(f"hadamard: incompatible shapes {_shape_str(a)} and {_shape_str(b)}")
    return Matrix._wrap(a._a * b._a)


def add(a, b):
    """Element-wise sum with the same row-broadcast rule as :func:`hadamard`."""
    if not _broadcast_ok(a, b):
        raise ShapeError(f"add: incompatible shapes {_shape_str(a)} and {_shape_str(b)}")
    return Matrix._wrap(a._a + b._a)


def sub(a, b):
    if not _broadcast_ok(a, b):
        raise ShapeError(f"sub: incompatible shapes {_shape_str(a)} and {_shape_str(b)}")
    return Matrix._wrap(a._a - b._a)


def scale(a, c):
    return Matrix._wrap(float(c) * a._a)


def colsum(g):
    """Column sums as a ``1 x n`` row, accumulated top to bottom."""
    return Matrix._wrap(_backend.kernels.colsum(g._a))


def transpose(a):
    return Matrix._wrap(np.ascontiguousarray(a._a.T))


def map_elementwise(a, f):
    """Apply scalar ``f`` to every entry in row-major order."""
    out = [f(v) for v in a._a.ravel().tolist()]
    return Matrix._wrap(np.array(out, dtype=np.float64).reshape(a.shape))


def fill(rows, cols, value):
    if rows < 1 or cols < 1:
        raise ShapeError(f"fill: shape must be positive, got {rows}x{cols}")
    return Matrix._wrap(np.full((rows, cols), float(value)))


def zeros(rows, cols):
    return fill(rows, cols, 0.0)


def ones(rows, cols):
    return fill(rows, cols, 1.0)


def identity(n):
    return Matrix._wrap(np.eye(n))


def slice_column(a, j):
    """Column ``j`` (0-based) as an ``rows x 1`` matrix."""
    if not 0 <= j < a.cols:
        raise IndexError(f"slice_column: column {j} out of range for {_shape_str(a)}")
    return Matrix._wrap(a._a[:, j : j + 1].copy())


def max_abs(a):
    return float(np.max(np.abs(a._a)))


def max_rel_error(a, b):
    """Norm-wise relative error ``max|a-b| / max|b|`` (absolute if ``b`` is all zero)."""
    if a.shape != b.shape:
        raise ShapeError(f"max_rel_error: shapes {_shape_str(a)} and {_shape_str(b)} differ")
    diff = float(np.max(np.abs(a._a - b._a)))
    scale_ = float(np.max(np.abs(b._a)))
    return diff / scale_ if scale_ > 0.0 else diff
