"""Plain integer-order SGD for the two-layer net, written without the tape.

Used as the baseline that FSGD at order 1 must reproduce exactly, and as
the integer path in timing comparisons.
"""

import math
import time

from .autograd import mse_value
from .linalg import add, colsum, matmul, scale, sub, transpose
from .model import init_params
from .optim import epoch_batches


class ReferenceNet:
    def __init__(self, in_dim, hidden, out_dim, seed):
        (self.W1, self.b1), (self.W2, self.b2) = init_params(
            [(in_dim, hidden), (hidden, out_dim)], seed
        )

    def forward(self, X):
        H = add(matmul(X, self.W1), self.b1)
        return H, add(matmul(H, self.W2), self.b2)

    def step(self, X, Y, lr):
        H, P = self.forward(X)
        loss = mse_value(P, Y)
        G2 = scale(sub(P, Y), 2.0 / (P.rows * P.cols))
        gW2 = matmul(transpose(H), G2)
        gb2 = colsum(G2)
        G1 = matmul(G2, transpose(self.W2))
        gW1 = matmul(transpose(X), G1)
        gb1 = colsum(G1)
        matmul(G1, transpose(self.W1))  # input gradient, computed as the tape does
        self.W1 = sub(self.W1, scale(gW1, lr))
        self.b1 = sub(self.b1, scale(gb1, lr))
        self.W2 = sub(self.W2, scale(gW2, lr))
        self.b2 = sub(self.b2, scale(gb2, lr))
        return loss

    def val_loss(self, split):
        from .linalg import Matrix

        _, P = self.forward(Matrix._wrap(split.X))
        d = P.to_numpy() - split.Y
        return math.fsum((d * d).ravel().tolist()) / d.size


def train_reference(dataset, cfg, sgd):
    """Returns ``(train_losses, val_losses)`` for ``cfg.iters`` integer-order SGD steps."""
    net = ReferenceNet(dataset.input_dim, cfg.hidden, dataset.horizon, cfg.seed)
    train_losses, val_losses = [], []
    epoch = 0
    while len(train_losses) < cfg.iters:
        for X, Y in epoch_batches(dataset, cfg, epoch):
            if len(train_losses) >= cfg.iters:
                break
            train_losses.append(net.step(X, Y, sgd.lr))
            val_losses.append(net.val_loss(dataset.val))
        epoch += 1
    return train_losses, val_losses


def time_reference_iteration(net, batch, lr, repeats):
    X, Y = batch
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        net.step(X, Y, lr)
        best = min(best, time.perf_counter() - t0)
    return best
