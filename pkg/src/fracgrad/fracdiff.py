"""Fractional-order differentiation of linear layers.

For ``y = x*w + b`` with lower bound 0 the order-``alpha`` derivative with
respect to ``w`` is::

    x / G(2-alpha) * |w|^(1-alpha) + sign(w) * b / G(1-alpha) * |w|^(-alpha)

Applied to ``Y = X.W + b`` this yields the fractional Jacobian
``d^alpha vec(Y) / d vec(W)^T``, an ``n x n`` grid of ``p x m`` blocks.
Training uses only block (1,1), computed implicitly with matrix operations
(:func:`weight_grad_block11`). Everything else here (explicit blocks, full
Jacobian, block census) is the element-wise reference used to check it.

``|w|`` is floored at ``eps`` before the fractional powers; order 1 never
touches the powers at all and reduces to the integer-order gradient exactly.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import ShapeError
from .linalg import Matrix, matmul_tn
from .special import check_alpha, is_integer_order, recip_gamma_or_zero, sign

DEFAULT_EPS = 1e-8


@dataclass(frozen=True)
class LinearContext:
    """Operands of one linear layer ``Y = X.W + b``."""

    X: Matrix
    W: Matrix
    b: Matrix
    alpha: float
    eps: float = DEFAULT_EPS

    def __post_init__(self):
        object.__setattr__(self, "alpha", check_alpha(self.alpha))
        if not self.eps > 0:
            raise ValueError(f"eps must be positive, got {self.eps!r}")
        if self.X.cols != self.W.rows:
            raise ShapeError(f"X is {self.X.rows}x{self.X.cols} but W is {self.W.rows}x{self.W.cols}")
        if self.b.shape != (1, self.W.cols):
            raise ShapeError(f"b must be 1x{self.W.cols}, got {self.b.rows}x{self.b.cols}")

    @property
    def p(self):
        return self.X.rows

    @property
    def m(self):
        return self.X.cols

    @property
    def n(self):
        return self.W.cols


def _coefficients(alpha):
    # (1/G(2-alpha), 1/G(1-alpha)); the second is 0 at alpha = 1
    return recip_gamma_or_zero(2.0 - alpha), recip_gamma_or_zero(1.0 - alpha)


def main_factor(w, alpha, eps=DEFAULT_EPS):
    """Multiplier of the coefficient ``x``: ``|w|_eps^(1-alpha) / G(2-alpha)``."""
    rg2, _ = _coefficients(alpha)
    return math.pow(max(abs(w), eps), 1.0 - alpha) * rg2


def frac_factor(w, alpha, eps=DEFAULT_EPS):
    """Multiplier of the constant ``b``: ``sign(w) |w|_eps^(-alpha) / G(1-alpha)``."""
    _, rg1 = _coefficients(alpha)
    return sign(w) * math.pow(max(abs(w), eps), -alpha) * rg1


def frac_scalar_terms(x, w, b, alpha, eps=DEFAULT_EPS):
    """The two addends of the scalar derivative: (main term, fractional term).

    The fractional term is the part with no integer-order counterpart; it acts
    as an implicit penalty on the weight.
    """
    alpha = check_alpha(alpha)
    if is_integer_order(alpha):
        return float(x), 0.0
    return x * main_factor(w, alpha, eps), b * frac_factor(w, alpha, eps)


def frac_scalar_deriv(x, w, b, alpha, eps=DEFAULT_EPS):
    """Order-``alpha`` derivative of ``x*w + b`` with respect to ``w``."""
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps!r}")
    if is_integer_order(check_alpha(alpha)):
        return float(x)
    main, frac = frac_scalar_terms(x, w, b, alpha, eps)
    return main + frac


def row_factors(F, alpha, eps=DEFAULT_EPS):
    """Per-weight multipliers for a weight column ``F`` (sequence of floats)."""
    mf = np.array([main_factor(f, alpha, eps) for f in F], dtype=np.float64)
    ff = np.array([frac_factor(f, alpha, eps) for f in F], dtype=np.float64)
    return mf, ff


def block11_matrix(ctx):
    """The ``p x m`` block (1,1) of the fractional Jacobian, built with matrix ops.

    ``F`` is the first weight column laid out as a row. Row ``k`` needs the
    full pre-activation ``X[k].F`` minus the differentiated term, plus the
    first bias entry; that is the constant of the scalar formula.
    """
    if is_integer_order(ctx.alpha):
        return ctx.X
    W = ctx.W.to_numpy()
    F = np.ascontiguousarray(W[:, 0])
    mf, ff = row_factors(F.tolist(), ctx.alpha, ctx.eps)
    b0 = float(ctx.b.to_numpy()[0, 0])
    return Matrix._wrap(_backend.kernels.block11(ctx.X.to_numpy(), F, mf, ff, b0))


def weight_grad_block11(ctx, G):
    """Fractional weight gradient ``block11^T . G`` (``m x n``).

    At order 1 this is ``X^T . G`` and skips every power and gamma evaluation.
    """
    if G.shape != (ctx.p, ctx.n):
        raise ShapeError(f"G must be {ctx.p}x{ctx.n} to match Y, got {G.rows}x{G.cols}")
    if is_integer_order(ctx.alpha):
        return matmul_tn(ctx.X, G)
    return matmul_tn(block11_matrix(ctx), G)


# --- explicit element-wise reference ---------------------------------------


def _check_block(ctx, block_id):
    i, j = block_id
    if not (1 <= i <= ctx.n and 1 <= j <= ctx.n):
        raise IndexError(f"block {block_id} outside the {ctx.n}x{ctx.n} grid")
    return i - 1, j - 1


def diff_block_explicit(ctx, block_id):
    """Block ``(i, j)`` (1-based) evaluated entry by entry.

    Entry ``(k, l)`` is the derivative of output ``Y[k, i]`` with respect to
    ``W[l, j]``. On diagonal blocks the weight appears with coefficient
    ``X[k, l]`` and the rest of the row sum is constant; off the diagonal the
    whole output is a constant in that weight, whose fractional derivative
    does not vanish.
    """
    r, c = _check_block(ctx, block_id)
    X = ctx.X.tolist()
    W = ctx.W.tolist()
    b = ctx.b.tolist()[0]
    out = [[0.0] * ctx.m for _ in range(ctx.p)]
    for k in range(ctx.p):
        for l in range(ctx.m):
            if r == c:
                coeff = X[k][l]
                var = W[l][r]
                const = math.fsum([X[k][i] * W[i][r] for i in range(ctx.m) if i != l] + [b[r]])
            else:
                coeff = 0.0
                var = W[l][c]
                const = math.fsum([X[k][i] * W[i][r] for i in range(ctx.m)] + [b[r]])
            out[k][l] = frac_scalar_deriv(coeff, var, const, ctx.alpha, ctx.eps)
    return Matrix(out)


def jacobian_full(ctx):
    """Full ``pn x mn`` fractional Jacobian in column-stacked (vec) ordering."""
    p, m, n = ctx.p, ctx.m, ctx.n
    J = np.zeros((p * n, m * n))
    for i in range(n):
        for j in range(n):
            J[i * p : (i + 1) * p, j * m : (j + 1) * m] = diff_block_explicit(
                ctx, (i + 1, j + 1)
            ).to_numpy()
    return Matrix._wrap(J)


def jacobian_block(J, ctx, block_id):
    """Slice block ``(i, j)`` (1-based) out of a full Jacobian."""
    r, c = _check_block(ctx, block_id)
    a = J.to_numpy()
    return Matrix._wrap(a[r * ctx.p : (r + 1) * ctx.p, c * ctx.m : (c + 1) * ctx.m].copy())


def count_distinct_blocks(ctx, tol=1e-12):
    """Number of distinct blocks among the ``n^2``, comparing by max abs difference."""
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    reps = []
    for i in range(1, ctx.n + 1):
        for j in range(1, ctx.n + 1):
            blk = diff_block_explicit(ctx, (i, j)).to_numpy()
            if not any(np.max(np.abs(blk - rep)) <= tol for rep in reps):
                reps.append(blk)
    return len(reps)
