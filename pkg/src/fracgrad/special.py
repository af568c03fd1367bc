"""Gamma function, reciprocal gamma with the pole convention, and sign."""

import math

from .errors import DomainError

POLE_TOL = 1e-12

# Lanczos approximation, g = 7, n = 9 (Godfrey's coefficients)
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)


def check_alpha(alpha):
    """Validate a fractional order; returns it as float. Orders live in (0, 1]."""
    a = float(alpha)
    if not (0.0 < a <= 1.0):
        raise ValueError(f"fractional order alpha must lie in (0, 1], got {alpha!r}")
    return a


def is_integer_order(alpha):
    return abs(float(alpha) - 1.0) <= POLE_TOL


def _near_pole(x):
    return x <= POLE_TOL and abs(x - round(x)) <= POLE_TOL


def _lanczos(x):
    # valid for x >= 0.5
    x -= 1.0
    s = _LANCZOS_COEF[0]
    for i in range(1, 9):
        s += _LANCZOS_COEF[i] / (x + i)
    t = x + _LANCZOS_G + 0.5
    return _SQRT_2PI * t ** (x + 0.5) * math.exp(-t) * s


def gamma(x):
    """Gamma function for real non-pole ``x``.

    Positive integers up to 30 return exact factorials; other arguments use
    the Lanczos series, with the reflection formula below 0.5.
    """
    x = float(x)
    if _near_pole(x):
        raise DomainError(f"gamma has a pole at {x!r}")
    if x == int(x) and 1 <= x <= 30:
        return float(math.factorial(int(x) - 1))
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * _lanczos(1.0 - x))
    return _lanczos(x)


def recip_gamma_or_zero(x):
    """``1/gamma(x)``, or exactly ``0.0`` within ``POLE_TOL`` of a pole."""
    x = float(x)
    if _near_pole(x):
        return 0.0
    return 1.0 / gamma(x)


def sign(x):
    if x > 0:
        return 1.0
    if x < 0:
        return -1.0
    return 0.0
