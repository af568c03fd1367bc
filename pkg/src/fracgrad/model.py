"""The two-layer perceptron used for forecasting: two FLinear layers, no activation."""

import numpy as np

from .autograd import FLinearLayer, flinear_forward, mse_forward
from .errors import ShapeError
from .fracdiff import DEFAULT_EPS
from .linalg import Matrix, add, matmul


def init_params(shapes, seed):
    """Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)) from PCG64(seed); zero biases."""
    rng = np.random.Generator(np.random.PCG64(seed))
    params = []
    for fan_in, fan_out in shapes:
        bound = 1.0 / np.sqrt(fan_in)
        W = rng.uniform(-bound, bound, size=(fan_in, fan_out))
        params.append((Matrix._wrap(W), Matrix._wrap(np.zeros((1, fan_out)))))
    return params


class TwoLayerPerceptron:
    def __init__(self, in_dim, hidden, out_dim, alpha=1.0, eps=DEFAULT_EPS, seed=0, params=None):
        if params is None:
            params = init_params([(in_dim, hidden), (hidden, out_dim)], seed)
        (W1, b1), (W2, b2) = params
        if W1.shape != (in_dim, hidden) or W2.shape != (hidden, out_dim):
            raise ShapeError("parameter shapes do not match the requested architecture")
        self.layers = [
            FLinearLayer(W1, b1, alpha, eps, name="layer1"),
            FLinearLayer(W2, b2, alpha, eps, name="layer2"),
        ]
        self.alpha = alpha
        self.eps = eps

    @property
    def dims(self):
        l1, l2 = self.layers
        return l1.in_features, l1.out_features, l2.out_features

    def forward(self, tape, X):
        node = tape.input(X)
        for layer in self.layers:
            node = flinear_forward(tape, node, layer)
        return node

    def loss(self, tape, X, Y):
        return mse_forward(tape, self.forward(tape, X), Y)

    def predict(self, X):
        """Forward pass without recording a tape."""
        if not isinstance(X, Matrix):
            X = Matrix._wrap(np.asarray(X, dtype=np.float64))
        for layer in self.layers:
            X = add(matmul(X, layer.W), layer.b)
        return X

    def parameters(self):
        out = {}
        for layer in self.layers:
            out[f"{layer.name}.W"] = layer.W
            out[f"{layer.name}.b"] = layer.b
        return out

    def state(self):
        """Ordered parameter list ``[W1, b1, W2, b2]``; cheap since matrices are immutable."""
        return [m for layer in self.layers for m in (layer.W, layer.b)]

    def load_state(self, mats):
        for i, layer in enumerate(self.layers):
            layer.set_params(mats[2 * i], mats[2 * i + 1])
