"""Computation tape with a single reverse sweep.

Only the weight leaves get fractional gradients (block (1,1) of the
fractional Jacobian). Bias gradients and the signal propagated to the
previous node stay integer-order, i.e. for a two-layer net::

    dL/dW1 = dL/dY2 . dY2/dY1 . d^alpha Y1 / dW1^alpha
"""

import math

import numpy as np

from .errors import ShapeError, StateError
from .fracdiff import DEFAULT_EPS, LinearContext, weight_grad_block11
from .linalg import Matrix, add, colsum, matmul, scale, sub, transpose
from .special import check_alpha


class FLinearLayer:
    """Linear layer ``Y = X.W + b`` whose weight gradient is fractional."""

    def __init__(self, W, b, alpha=1.0, eps=DEFAULT_EPS, name="linear"):
        if not isinstance(W, Matrix):
            W = Matrix(W)
        if not isinstance(b, Matrix):
            b = Matrix(b)
        if b.shape != (1, W.cols):
            raise ShapeError(f"bias must be 1x{W.cols}, got {b.rows}x{b.cols}")
        if not eps > 0:
            raise ValueError(f"eps must be positive, got {eps!r}")
        self.W = W
        self.b = b
        self.alpha = check_alpha(alpha)
        self.eps = float(eps)
        self.name = name

    @property
    def in_features(self):
        return self.W.rows

    @property
    def out_features(self):
        return self.W.cols

    def set_params(self, W, b):
        if W.shape != self.W.shape or b.shape != self.b.shape:
            raise ShapeError(f"{self.name}: parameter shapes are fixed at construction")
        self.W = W
        self.b = b

    def __repr__(self):
        return f"FLinearLayer({self.name!r}, {self.in_features}->{self.out_features}, alpha={self.alpha})"


class Node:
    __slots__ = ("index", "value")

    def __init__(self, index, value):
        self.index = index
        self.value = value


class InputNode(Node):
    __slots__ = ("trainable",)

    def __init__(self, index, value, trainable=False):
        super().__init__(index, value)
        self.trainable = trainable


class FLinearNode(Node):
    __slots__ = ("layer", "parent", "X", "ctx")

    def __init__(self, index, value, layer, parent, X):
        super().__init__(index, value)
        self.layer = layer
        self.parent = parent
        self.X = X
        # parameters are snapshotted so a later update cannot leak into backward
        self.ctx = LinearContext(X, layer.W, layer.b, layer.alpha, layer.eps)


class MseNode(Node):
    __slots__ = ("parent", "label", "loss")

    def __init__(self, index, value, parent, label, loss):
        super().__init__(index, value)
        self.parent = parent
        self.label = label
        self.loss = loss


class Tape:
    """Ordered record of one forward pass.

    ``grads`` maps nodes to the gradient of the loss with respect to their
    value, and ``"<layer>.W"`` / ``"<layer>.b"`` keys to parameter gradients.
    """

    def __init__(self):
        self.nodes = []
        self.grads = {}
        self._bytes = 0
        self.peak_bytes = 0

    def _account(self, nbytes):
        self._bytes += nbytes
        self.peak_bytes = max(self.peak_bytes, self._bytes)

    def _append(self, node, nbytes):
        self.nodes.append(node)
        self._account(nbytes)
        return node

    def input(self, value, trainable=False):
        if not isinstance(value, Matrix):
            value = Matrix(value)
        return self._append(InputNode(len(self.nodes), value, trainable), value.nbytes)

    @property
    def buffer_bytes(self):
        """Bytes currently held by node values and gradients."""
        return self._bytes

    def _store(self, key, g):
        old = self.grads.get(key)
        if old is not None:
            self._bytes -= old.nbytes
        self.grads[key] = g
        self._account(g.nbytes)

    def zero_grad(self):
        for g in self.grads.values():
            self._bytes -= g.nbytes
        self.grads.clear()

    def grad(self, key):
        """Stored gradient for a node or parameter key; ``KeyError`` if absent."""
        try:
            return self.grads[key]
        except KeyError:
            raise KeyError(f"no gradient stored for {key!r}") from None

    def param_grads(self):
        return {k: v for k, v in self.grads.items() if isinstance(k, str)}

    def backward(self):
        return backward(self)


def flinear_forward(tape, input_node, layer):
    X = input_node.value
    if X.cols != layer.in_features:
        raise ShapeError(
            f"{layer.name}: input is {X.rows}x{X.cols} but W is {layer.W.rows}x{layer.W.cols}"
        )
    Y = add(matmul(X, layer.W), layer.b)
    return tape._append(FLinearNode(len(tape.nodes), Y, layer, input_node, X), Y.nbytes)


def mse_forward(tape, pred_node, label):
    """Mean squared error over all elements of the prediction."""
    if not isinstance(label, Matrix):
        label = Matrix(label)
    pred = pred_node.value
    if pred.shape != label.shape:
        raise ShapeError(f"mse: prediction {pred.rows}x{pred.cols} vs label {label.rows}x{label.cols}")
    loss = mse_value(pred, label)
    node = MseNode(len(tape.nodes), Matrix._wrap(np.array([[loss]])), pred_node, label, loss)
    return tape._append(node, label.nbytes + 8)


def mse_value(pred, label):
    d = pred.to_numpy() - label.to_numpy()
    return math.fsum((d * d).ravel().tolist()) / d.size


def backward(tape):
    if not tape.nodes or not isinstance(tape.nodes[-1], MseNode):
        raise StateError("backward needs a completed forward pass ending in an MSE loss node")
    tape.zero_grad()
    root = tape.nodes[-1]
    tape._store(root, Matrix._wrap(np.ones((1, 1))))
    upstream = {}
    pred = root.parent
    N = pred.value.rows * pred.value.cols
    upstream[pred.index] = scale(sub(pred.value, root.label), 2.0 / N)
    for node in reversed(tape.nodes[:-1]):
        G = upstream.pop(node.index, None)
        if G is None:
            continue
        tape._store(node, G)
        if isinstance(node, FLinearNode):
            name = node.layer.name
            tape._store(f"{name}.W", weight_grad_block11(node.ctx, G))
            tape._store(f"{name}.b", colsum(G))
            upstream[node.parent.index] = matmul(G, transpose(node.ctx.W))
    return tape.grads


def zero_grad(tape):
    tape.zero_grad()
