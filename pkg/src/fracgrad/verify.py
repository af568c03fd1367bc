"""Oracle suites: the implicit block-(1,1) gradient against explicit
element-wise evaluation, the order-1 reduction, the block census, and a
finite-difference check of the whole network."""

from dataclasses import dataclass

import numpy as np

from .autograd import Tape
from .fracdiff import (
    LinearContext,
    count_distinct_blocks,
    diff_block_explicit,
    weight_grad_block11,
)
from .linalg import Matrix, matmul, max_rel_error, transpose
from .model import TwoLayerPerceptron

DEFAULT_ALPHAS = (0.3, 0.5, 0.7, 0.9, 1.0)


@dataclass
class SuiteResult:
    name: str
    passed: bool
    worst: float
    tol: float
    detail: str = ""

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<22} worst={self.worst:.3e}  tol={self.tol:.1e}  {self.detail}"


def random_context(rng, alpha, p=None, m=None, n=None, eps=1e-8):
    p = p or int(rng.integers(1, 7))
    m = m or int(rng.integers(1, 7))
    n = n or int(rng.integers(1, 7))
    X = Matrix(rng.uniform(-1.0, 1.0, (p, m)))
    W = Matrix(rng.uniform(-1.0, 1.0, (m, n)))
    b = Matrix(rng.uniform(-1.0, 1.0, (1, n)))
    G = Matrix(rng.uniform(-1.0, 1.0, (p, n)))
    return LinearContext(X, W, b, alpha, eps), G


def oracle_equivalence(cases=1000, seed=0, alphas=DEFAULT_ALPHAS, tol=1e-10):
    rng = np.random.default_rng(seed)
    worst = 0.0
    worst_case = ""
    for c in range(cases):
        alpha = alphas[c % len(alphas)]
        ctx, G = random_context(rng, alpha)
        implicit = weight_grad_block11(ctx, G)
        explicit = matmul(transpose(diff_block_explicit(ctx, (1, 1))), G)
        err = max_rel_error(implicit, explicit)
        if err > worst:
            worst, worst_case = err, f"case {c}: p,m,n={ctx.p},{ctx.m},{ctx.n} alpha={alpha}"
    return SuiteResult("oracle-equivalence", worst <= tol, worst, tol, worst_case)


def alpha1_reduction(cases=200, seed=0):
    rng = np.random.default_rng(seed)
    mismatches = 0
    for _ in range(cases):
        ctx, G = random_context(rng, 1.0)
        if weight_grad_block11(ctx, G) != matmul(transpose(ctx.X), G):
            mismatches += 1
    return SuiteResult("alpha1-reduction", mismatches == 0, float(mismatches), 0.0,
                       f"{mismatches}/{cases} not bitwise equal")


def block_census(seed=0, alphas=DEFAULT_ALPHAS, tol=1e-12):
    rng = np.random.default_rng(seed)
    bad = []
    for alpha in alphas:
        for n in (1, 2, 3):
            ctx, _ = random_context(rng, alpha, p=3, m=4, n=n)
            got = count_distinct_blocks(ctx, tol)
            if alpha == 1.0:
                want = 1 if n == 1 else 2
                for i in range(1, n + 1):
                    for j in range(1, n + 1):
                        blk = diff_block_explicit(ctx, (i, j))
                        ref = ctx.X if i == j else Matrix(np.zeros((ctx.p, ctx.m)))
                        if blk != ref:
                            bad.append(f"alpha=1 block ({i},{j}) wrong")
            else:
                want = n * n
            if got != want:
                bad.append(f"alpha={alpha} n={n}: {got} != {want}")
    return SuiteResult("block-census", not bad, float(len(bad)), 0.0, "; ".join(bad) or "n^2 distinct")


def network_loss(model, X, Y):
    tape = Tape()
    return model.loss(tape, X, Y).loss


def finite_difference(seed=0, hidden=8, p=5, in_dim=6, out_dim=3, step=1e-5, tol=1e-6):
    """Central differences on every parameter of a two-layer net at order 1."""
    rng = np.random.default_rng(seed)
    model = TwoLayerPerceptron(in_dim, hidden, out_dim, alpha=1.0, seed=seed)
    # nonzero biases so their gradients are exercised away from the init
    for layer in model.layers:
        layer.set_params(layer.W, Matrix(rng.uniform(-0.5, 0.5, layer.b.shape)))
    X = Matrix(rng.uniform(-1.0, 1.0, (p, in_dim)))
    Y = Matrix(rng.uniform(-1.0, 1.0, (p, out_dim)))
    tape = Tape()
    model.loss(tape, X, Y)
    tape.backward()
    grads = tape.param_grads()
    worst = 0.0
    where = ""
    for layer in model.layers:
        for pname in ("W", "b"):
            base = getattr(layer, pname).to_numpy()
            fd = np.empty_like(base)
            for idx in np.ndindex(base.shape):
                vals = []
                for delta in (step, -step):
                    bumped = base.copy()
                    bumped[idx] += delta
                    saved = (layer.W, layer.b)
                    if pname == "W":
                        layer.set_params(Matrix(bumped), layer.b)
                    else:
                        layer.set_params(layer.W, Matrix(bumped))
                    vals.append(network_loss(model, X, Y))
                    layer.set_params(*saved)
                fd[idx] = (vals[0] - vals[1]) / (2 * step)
            err = max_rel_error(grads[f"{layer.name}.{pname}"], Matrix(fd))
            if err > worst:
                worst, where = err, f"{layer.name}.{pname}"
    return SuiteResult("finite-difference", worst <= tol, worst, tol, where)


def run_all(cases=1000, seed=0, alphas=DEFAULT_ALPHAS):
    return [
        oracle_equivalence(cases, seed, alphas),
        alpha1_reduction(max(1, cases // 5), seed),
        block_census(seed, alphas),
        finite_difference(seed),
    ]
