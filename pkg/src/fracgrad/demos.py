"""Scalar demonstrations: fractional GD trajectories, saddle-point gradients,
and the split of the fractional derivative into a main term and an implicit
penalty term."""

import csv
import math
from dataclasses import dataclass, field

from .errors import DivergenceError
from .fracdiff import DEFAULT_EPS, frac_scalar_terms
from .special import check_alpha, is_integer_order, recip_gamma_or_zero, sign

START = (-3.5, -4.7)
MINIMUM = (-2.0, -3.0)


def quadratic(x1, x2):
    u, v = x1 + 2.0, x2 + 3.0
    return u * u + v * v


@dataclass
class TrajectoryRecord:
    rows: list = field(default_factory=list)  # (k, x1, x2, y)

    def __len__(self):
        return len(self.rows)

    def point(self, k):
        _, x1, x2, _ = self.rows[k]
        return x1, x2

    def distance_to_minimum(self, k):
        x1, x2 = self.point(k)
        return math.hypot(x1 - MINIMUM[0], x2 - MINIMUM[1])

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["k", "x1", "x2", "y"])
            for k, x1, x2, y in self.rows:
                w.writerow([k, repr(x1), repr(x2), repr(y)])


def _quadratic_partial(u, other, alpha, eps):
    # order-alpha partial of u^2 + other^2 in u with lower bound 0: the other
    # coordinate's square acts as a constant and keeps a nonzero derivative
    if is_integer_order(alpha):
        return 2.0 * u
    au = max(abs(u), eps)
    return sign(u) * (
        2.0 * recip_gamma_or_zero(3.0 - alpha) * au ** (2.0 - alpha)
        + other * other * recip_gamma_or_zero(1.0 - alpha) * au ** (-alpha)
    )


def quadratic_trajectory(alpha, eta=0.1, steps=20, start=START, eps=DEFAULT_EPS):
    """Fractional gradient descent on ``(x1+2)^2 + (x2+3)^2``.

    Both coordinates update simultaneously from the previous iterate. At
    ``alpha = 1`` this is ordinary gradient descent.
    """
    alpha = check_alpha(alpha)
    if not eta > 0:
        raise ValueError(f"eta must be positive, got {eta}")
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    x1, x2 = map(float, start)
    rec = TrajectoryRecord([(0, x1, x2, quadratic(x1, x2))])
    for k in range(1, steps + 1):
        u, v = x1 + 2.0, x2 + 3.0
        try:
            x1, x2 = (
                x1 - eta * _quadratic_partial(u, v, alpha, eps),
                x2 - eta * _quadratic_partial(v, u, alpha, eps),
            )
        except OverflowError:
            x1 = math.inf
        if not (math.isfinite(x1) and math.isfinite(x2)):
            raise DivergenceError(f"trajectory diverged at step {k} (alpha={alpha}, eta={eta})",
                                  alpha=alpha, iteration=k)
        rec.rows.append((k, x1, x2, quadratic(x1, x2)))
    return rec


def closed_form_gd(eta, steps, start=START):
    """Exact iterates of integer-order GD on the quadratic: ``u_k = u_0 (1 - 2 eta)^k``."""
    r = 1.0 - 2.0 * eta
    return [
        (MINIMUM[0] + (start[0] - MINIMUM[0]) * r**k, MINIMUM[1] + (start[1] - MINIMUM[1]) * r**k)
        for k in range(steps + 1)
    ]


def saddle_gradients(alpha, point, eps=DEFAULT_EPS):
    """Integer and fractional gradients of ``z = x^2 - y^2`` at ``point``.

    The fractional partials treat the other squared coordinate as a constant
    term, the same pattern as the linear-layer formula.
    """
    alpha = check_alpha(alpha)
    x, y = map(float, point)
    integer = (2.0 * x, -2.0 * y)
    if is_integer_order(alpha):
        return integer, integer
    rg3 = recip_gamma_or_zero(3.0 - alpha)
    rg1 = recip_gamma_or_zero(1.0 - alpha)
    ax, ay = max(abs(x), eps), max(abs(y), eps)
    gx = sign(x) * (2.0 * rg3 * ax ** (2.0 - alpha) - y * y * rg1 * ax ** (-alpha))
    gy = sign(y) * (-2.0 * rg3 * ay ** (2.0 - alpha) + x * x * rg1 * ay ** (-alpha))
    return integer, (gx, gy)


def gradient_field(alpha, xs, ys, eps=DEFAULT_EPS):
    rows = []
    for x in xs:
        for y in ys:
            (gxi, gyi), (gxf, gyf) = saddle_gradients(alpha, (x, y), eps)
            rows.append((x, y, gxi, gyi, gxf, gyf))
    return rows


def write_gradient_field(rows, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y", "gx_int", "gy_int", "gx_frac", "gy_frac"])
        for row in rows:
            w.writerow([repr(v) for v in row])


def regularization_decomposition(x, w, b, alpha, upstream=1.0, eps=DEFAULT_EPS):
    """``(J1', p1')``: upstream-scaled main term and implicit penalty term."""
    main, frac = frac_scalar_terms(x, w, b, alpha, eps)
    return upstream * main, upstream * frac


def write_decomposition(rows, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "w", "b", "alpha", "upstream", "J1_prime", "p1_prime", "total"])
        for row in rows:
            w.writerow([repr(v) for v in row])
