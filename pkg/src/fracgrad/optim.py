"""FSGD: plain SGD steps applied to fractional gradients, plus the training loop."""

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .autograd import Tape
from .data import batches
from .errors import ConfigError, DivergenceError, StateError
from .fracdiff import DEFAULT_EPS
from .linalg import Matrix, scale, sub
from .special import check_alpha


@dataclass
class SgdConfig:
    lr: float = 1e-4
    momentum: float = 0.0
    weight_decay: float = 0.0

    def __post_init__(self):
        if not self.lr > 0:
            raise ConfigError(f"learning rate must be positive, got {self.lr}")
        if self.momentum != 0.0 or self.weight_decay != 0.0:
            # either would break the additivity of the fractional gradient
            raise ConfigError("momentum and weight_decay are fixed at 0")


@dataclass
class TrainConfig:
    window: int = 36
    horizon: int = 48
    batch: int = 256
    hidden: int = 128
    alpha: float = 1.0
    iters: int = 1500
    seed: int = 42
    eps: float = DEFAULT_EPS

    def __post_init__(self):
        self.alpha = check_alpha(self.alpha)
        for name in ("window", "horizon", "batch", "hidden", "iters"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if not self.eps > 0:
            raise ConfigError(f"eps must be positive, got {self.eps}")


@dataclass
class TrainReport:
    alpha: float
    lr: float
    seed: int
    train_loss: list = field(default_factory=list)
    val_loss: list = field(default_factory=list)
    best_val_loss: float = math.inf
    best_iter: int = 0
    test_mse: float = math.nan
    test_mae: float = math.nan
    secs_per_epoch: float = math.nan
    peak_buffer_bytes: int = 0
    best_state: list = field(default=None, repr=False)


def sgd_step(params, grads, cfg):
    """``w <- w - lr * g`` for every named parameter.

    ``params`` maps names to matrices and is updated in place.
    """
    for name, w in params.items():
        g = grads.get(name)
        if g is None:
            raise StateError(f"no gradient for parameter {name!r}; run backward first")
        if g.shape != w.shape:
            raise StateError(f"gradient for {name!r} is {g.shape}, parameter is {w.shape}")
        params[name] = sub(w, scale(g, cfg.lr))
    return params


def apply_step(model, grads, cfg):
    params = sgd_step(model.parameters(), grads, cfg)
    for layer in model.layers:
        layer.set_params(params[f"{layer.name}.W"], params[f"{layer.name}.b"])


def evaluate(model, split):
    """(MSE, MAE) over every prediction element of a split."""
    if len(split) == 0:
        raise ConfigError("cannot evaluate an empty split")
    pred = model.predict(split.X).to_numpy()
    d = pred - split.Y
    n = d.size
    return math.fsum((d * d).ravel().tolist()) / n, math.fsum(np.abs(d).ravel().tolist()) / n


def epoch_batches(dataset, cfg, epoch):
    return batches(dataset.train, cfg.batch, seed=(cfg.seed, epoch), shuffle=True)


def train(model, dataset, cfg, sgd, log=None):
    """Run ``cfg.iters`` mini-batch steps, keep the best-validation snapshot, score it on test."""
    if min(len(dataset.train), len(dataset.val), len(dataset.test)) == 0:
        raise ConfigError("train, validation and test splits must all be non-empty")
    report = TrainReport(alpha=cfg.alpha, lr=sgd.lr, seed=cfg.seed)
    epoch_secs = []
    it = 0
    epoch = 0
    with np.errstate(over="ignore", invalid="ignore"):
        while it < cfg.iters:
            elapsed = 0.0
            done = 0
            for X, Y in epoch_batches(dataset, cfg, epoch):
                if it >= cfg.iters:
                    break
                it += 1
                t0 = time.perf_counter()
                tape = Tape()
                loss_node = model.loss(tape, X, Y)
                loss = loss_node.loss
                if not math.isfinite(loss):
                    raise DivergenceError(
                        f"training loss became non-finite at iteration {it} "
                        f"(alpha={cfg.alpha}, lr={sgd.lr})",
                        alpha=cfg.alpha,
                        lr=sgd.lr,
                        iteration=it,
                    )
                tape.backward()
                apply_step(model, tape.param_grads(), sgd)
                elapsed += time.perf_counter() - t0
                done += 1
                report.peak_buffer_bytes = max(report.peak_buffer_bytes, tape.peak_bytes)

                val = evaluate(model, dataset.val)[0]
                report.train_loss.append(loss)
                report.val_loss.append(val)
                if val < report.best_val_loss:
                    report.best_val_loss = val
                    report.best_iter = it
                    report.best_state = model.state()
                if log is not None:
                    log(it, loss, val)
            n_batches = math.ceil(len(dataset.train) / cfg.batch)
            if done:
                epoch_secs.append(elapsed * n_batches / done)
            epoch += 1
    report.secs_per_epoch = float(np.mean(epoch_secs))
    if report.best_state is None:
        # every validation loss was NaN; fall back to the final parameters
        report.best_state = model.state()
        report.best_val_loss = math.nan
    final_state = model.state()
    model.load_state(report.best_state)
    report.test_mse, report.test_mae = evaluate(model, dataset.test)
    model.load_state(final_state)
    return report


def time_iterations(model, batch, sgd, repeats, update=False):
    """Minimum wall time of one forward/backward(/update) over ``repeats`` runs."""
    X, Y = batch
    best = math.inf
    peak = 0
    for _ in range(repeats):
        t0 = time.perf_counter()
        tape = Tape()
        model.loss(tape, X, Y)
        tape.backward()
        if update:
            apply_step(model, tape.param_grads(), sgd)
        best = min(best, time.perf_counter() - t0)
        peak = max(peak, tape.peak_bytes)
    return best, peak
