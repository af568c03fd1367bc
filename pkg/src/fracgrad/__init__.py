"""Fractional-order Jacobian matrix differentiation for linear layers.

A small reverse-mode tape where linear layers compute their weight gradient
with a fractional-order derivative (block (1,1) of the fractional Jacobian),
SGD training on sliding-window time series, and oracle checks.
"""

from ._backend import active as backend
from .autograd import FLinearLayer, Tape, backward, flinear_forward, mse_forward, zero_grad
from .errors import (
    ConfigError,
    DivergenceError,
    DomainError,
    ParseError,
    ShapeError,
    StateError,
)
from .fracdiff import (
    LinearContext,
    count_distinct_blocks,
    diff_block_explicit,
    frac_scalar_deriv,
    frac_scalar_terms,
    jacobian_full,
    weight_grad_block11,
)
from .linalg import Matrix
from .model import TwoLayerPerceptron, init_params
from .optim import SgdConfig, TrainConfig, TrainReport, evaluate, sgd_step, train

__version__ = "0.1.0"
