"""Exception types shared across the package."""


class ShapeError(ValueError):
    """Operand shapes do not compose."""


class DomainError(ValueError):
    """Argument outside a function's domain (e.g. a gamma pole)."""


class StateError(RuntimeError):
    """An operation was called in the wrong lifecycle state."""


class ConfigError(ValueError):
    """Invalid configuration or hyperparameters."""


class ParseError(ValueError):
    """Malformed input file; the message carries the row/column location."""


class DivergenceError(RuntimeError):
    """Training or an iteration produced a non-finite value."""

    def __init__(self, message, *, alpha=None, lr=None, iteration=None):
        super().__init__(message)
        self.alpha = alpha
        self.lr = lr
        self.iteration = iteration
