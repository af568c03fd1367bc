import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracgrad.errors import ShapeError
from fracgrad.fracdiff import (
    LinearContext,
    block11_matrix,
    count_distinct_blocks,
    diff_block_explicit,
    frac_scalar_deriv,
    frac_scalar_terms,
    jacobian_block,
    jacobian_full,
    weight_grad_block11,
)
from fracgrad.linalg import Matrix, matmul, max_rel_error, transpose
from fracgrad.verify import random_context


def mp_scalar(x, w, b, alpha):
    """High-precision evaluation of the scalar formula (no clamp needed for w != 0)."""
    mpmath.mp.dps = 40
    x, w, b, a = map(mpmath.mpf, (x, w, b, alpha))
    sgn = 1 if w > 0 else -1
    return float(x / mpmath.gamma(2 - a) * abs(w) ** (1 - a) + sgn * b / mpmath.gamma(1 - a) * abs(w) ** (-a))


def ctx_from(X, W, b, alpha, eps=1e-8):
    return LinearContext(Matrix(X), Matrix(W), Matrix(b), alpha, eps)


# -- scalar formula ---------------------------------------------------------


def test_scalar_alpha_one_returns_coefficient():
    assert frac_scalar_deriv(2.0, 1.5, 0.5, 1.0) == 2.0


def test_scalar_values_against_high_precision():
    # frozen from mp_scalar: 1/G(1.5) and 3/(sqrt(pi) sqrt(2))
    assert frac_scalar_deriv(1.0, 1.0, 0.0, 0.5) == pytest.approx(1.1283791670955126, rel=1e-13)
    assert frac_scalar_deriv(0.0, 2.0, 3.0, 0.5) == pytest.approx(1.1968268412042980, rel=1e-13)
    assert mp_scalar(2.0, 1.5, 0.5, 0.5) == pytest.approx(2.9942826287515742, rel=1e-15)


def test_scalar_sign_follows_weight():
    pos = frac_scalar_terms(1.0, 0.5, 1.0, 0.7)[1]
    neg = frac_scalar_terms(1.0, -0.5, 1.0, 0.7)[1]
    assert pos > 0 and neg == -pos


def test_scalar_clamp_keeps_zero_weight_finite():
    v = frac_scalar_deriv(1.0, 0.0, 1.0, 0.5)
    assert math.isfinite(v)
    # sign(0) = 0 kills the constant term; the main term uses |w| = eps
    assert v == pytest.approx(1e-8**0.5 / math.gamma(1.5), rel=1e-12)
    big = frac_scalar_deriv(0.0, 1e-12, 1.0, 0.5)
    assert big == pytest.approx(1e-8**-0.5 / math.sqrt(math.pi), rel=1e-12)


def test_scalar_rejects_nonpositive_eps():
    with pytest.raises(ValueError):
        frac_scalar_deriv(1.0, 1.0, 1.0, 0.5, eps=0.0)


@settings(max_examples=200, deadline=None)
@given(
    st.floats(-5, 5),
    st.floats(0.01, 5) | st.floats(-5, -0.01),
    st.floats(-5, 5),
    st.sampled_from([0.3, 0.5, 0.7, 0.9]),
)
def test_scalar_matches_high_precision(x, w, b, alpha):
    got = frac_scalar_deriv(x, w, b, alpha)
    want = mp_scalar(x, w, b, alpha)
    assert got == pytest.approx(want, rel=1e-11, abs=1e-11 * (abs(x) + abs(b) + 1) * max(abs(w), 1 / abs(w)))


def test_decomposition_terms_sum_exactly(rng):
    for _ in range(1000):
        x, w, b = rng.uniform(-3, 3, 3)
        alpha = rng.choice([0.3, 0.5, 0.7, 0.9, 1.0])
        main, frac = frac_scalar_terms(x, w, b, alpha)
        assert main + frac == frac_scalar_deriv(x, w, b, alpha)


def test_fractional_term_vanishes_toward_order_one(rng):
    alpha = 1 - 1e-6
    for _ in range(100):
        w = rng.uniform(0.1, 10) * rng.choice([-1, 1])
        x, b = rng.uniform(-10, 10, 2)
        _, frac = frac_scalar_terms(x, w, b, alpha)
        assert abs(frac) <= 1e-4 * (abs(b) + 1)


# -- implicit block (1,1) gradient -------------------------------------------


def test_weight_grad_alpha_one_is_integer_gradient(rng):
    for _ in range(50):
        ctx, G = random_context(rng, 1.0)
        assert weight_grad_block11(ctx, G) == matmul(transpose(ctx.X), G)


def test_weight_grad_scalar_case():
    ctx = ctx_from([[2.0]], [[1.5]], [[0.5]], 0.5)
    got = weight_grad_block11(ctx, Matrix([[1.0]]))
    assert got[0, 0] == pytest.approx(frac_scalar_deriv(2.0, 1.5, 0.5, 0.5), rel=1e-14)
    assert got[0, 0] == pytest.approx(2.9942826287515742, rel=1e-12)


def test_weight_grad_matches_explicit_block(rng):
    ctx, G = random_context(rng, 0.7, p=2, m=3, n=2)
    explicit = matmul(transpose(diff_block_explicit(ctx, (1, 1))), G)
    assert max_rel_error(weight_grad_block11(ctx, G), explicit) <= 1e-10


def test_weight_grad_shape_checks(rng):
    ctx, G = random_context(rng, 0.5, p=3, m=2, n=4)
    with pytest.raises(ShapeError):
        weight_grad_block11(ctx, Matrix(np.ones((3, 3))))
    with pytest.raises(ShapeError):
        LinearContext(Matrix(np.ones((2, 3))), Matrix(np.ones((2, 2))), Matrix(np.ones((1, 2))), 0.5)
    with pytest.raises(ShapeError):
        LinearContext(Matrix(np.ones((2, 2))), Matrix(np.ones((2, 2))), Matrix(np.ones((1, 3))), 0.5)
    with pytest.raises(ValueError):
        LinearContext(ctx.X, ctx.W, ctx.b, 0.5, eps=-1.0)


@settings(max_examples=300, deadline=None)
@given(
    st.integers(1, 6), st.integers(1, 6), st.integers(1, 6),
    st.sampled_from([0.3, 0.5, 0.7, 0.9, 1.0]), st.integers(0, 2**32 - 1),
)
def test_oracle_equivalence_property(p, m, n, alpha, seed):
    ctx, G = random_context(np.random.default_rng(seed), alpha, p, m, n)
    explicit = matmul(transpose(diff_block_explicit(ctx, (1, 1))), G)
    assert max_rel_error(weight_grad_block11(ctx, G), explicit) <= 1e-10


# -- explicit blocks and the full Jacobian -----------------------------------


def test_explicit_entries_follow_scalar_formula():
    X = [[0.5, -1.0], [2.0, 0.25], [-0.75, 1.5]]
    W = [[0.8, -0.4], [-0.6, 1.2]]
    b = [[0.3, -0.2]]
    ctx = ctx_from(X, W, b, 0.6)
    A11 = diff_block_explicit(ctx, (1, 1))
    A12 = diff_block_explicit(ctx, (1, 2))
    for k in range(3):
        f1 = X[k][0] * W[0][0] + X[k][1] * W[1][0] + b[0][0]
        for l in range(2):
            const = f1 - X[k][l] * W[l][0]
            assert A11[k, l] == pytest.approx(mp_scalar(X[k][l], W[l][0], const, 0.6), rel=1e-12)
            # output column 1 is a constant with respect to weight column 2
            assert A12[k, l] == pytest.approx(mp_scalar(0.0, W[l][1], f1, 0.6), rel=1e-12)


def test_alpha_one_blocks_are_integer_structure(rng):
    ctx, _ = random_context(rng, 1.0, p=3, m=4, n=3)
    for i in range(1, 4):
        for j in range(1, 4):
            blk = diff_block_explicit(ctx, (i, j))
            if i == j:
                assert blk == ctx.X
            else:
                assert blk == Matrix(np.zeros((3, 4)))


def test_block11_matches_implicit_intermediate(rng):
    ctx, _ = random_context(rng, 0.5, p=4, m=3, n=2)
    assert max_rel_error(block11_matrix(ctx), diff_block_explicit(ctx, (1, 1))) <= 1e-12


def test_bad_block_id(rng):
    ctx, _ = random_context(rng, 0.5, n=2)
    for bad in [(0, 1), (1, 3), (3, 3)]:
        with pytest.raises(IndexError):
            diff_block_explicit(ctx, bad)


def test_jacobian_alpha_one_matches_finite_differences(rng):
    # independent check of the vec ordering: d vec(Y) / d vec(W)^T, column-major stacking
    p, m, n = 3, 2, 3
    ctx, _ = random_context(rng, 1.0, p, m, n)
    X, W, b = ctx.X.to_numpy(), ctx.W.to_numpy(), ctx.b.to_numpy()

    def vecY(Wv):
        return ((X @ Wv.reshape(n, m).T) + b).T.ravel()

    w0 = W.T.ravel()
    h = 1e-6
    J = np.empty((p * n, m * n))
    for c in range(m * n):
        e = np.zeros(m * n)
        e[c] = h
        J[:, c] = (vecY(w0 + e) - vecY(w0 - e)) / (2 * h)
    assert np.allclose(jacobian_full(ctx).to_numpy(), J, atol=1e-8)


def test_jacobian_single_output_is_block11(rng):
    ctx, _ = random_context(rng, 0.5, p=3, m=4, n=1)
    assert jacobian_full(ctx) == diff_block_explicit(ctx, (1, 1))


def test_jacobian_blocks_distinct_for_fractional(rng):
    ctx, _ = random_context(rng, 0.5, p=3, m=2, n=2)
    J = jacobian_full(ctx)
    assert J.shape == (6, 4)
    blocks = [jacobian_block(J, ctx, (i, j)).to_numpy() for i in (1, 2) for j in (1, 2)]
    for a in range(4):
        for c in range(a + 1, 4):
            assert np.max(np.abs(blocks[a] - blocks[c])) > 1e-6
    for i in (1, 2):
        for j in (1, 2):
            assert jacobian_block(J, ctx, (i, j)) == diff_block_explicit(ctx, (i, j))


def test_jacobian_alpha_one_block_diagonal(rng):
    ctx, _ = random_context(rng, 1.0, p=2, m=3, n=3)
    J = jacobian_full(ctx).to_numpy()
    want = np.kron(np.eye(3), ctx.X.to_numpy())
    assert np.array_equal(J, want)


@pytest.mark.parametrize("n,want", [(1, 1), (2, 4), (3, 9)])
def test_census_fractional(rng, n, want):
    ctx, _ = random_context(rng, 0.5, p=3, m=4, n=n)
    assert count_distinct_blocks(ctx, 1e-12) == want


@pytest.mark.parametrize("n,want", [(1, 1), (3, 2)])
def test_census_integer(rng, n, want):
    ctx, _ = random_context(rng, 1.0, p=3, m=4, n=n)
    assert count_distinct_blocks(ctx, 1e-12) == want


def test_census_rejects_bad_tol(rng):
    ctx, _ = random_context(rng, 0.5)
    with pytest.raises(ValueError):
        count_distinct_blocks(ctx, 0.0)
