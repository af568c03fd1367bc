"""Numpy fallback kernels.

Each function performs the same IEEE operations in the same order as the
compiled kernels, so the two backends are interchangeable bit for bit.
Accumulation loops run over the summed index in Python and vectorise the
free indices, which keeps the fallback usable at training scale.
"""

import numpy as np

NAME = "python"


def matmul(a, b):
    p, m = a.shape
    c = np.zeros((p, b.shape[1]), dtype=np.float64)
    for k in range(m):
        c += a[:, k, None] * b[k]
    return c


def matmul_tn(a, b):
    c = np.zeros((a.shape[1], b.shape[1]), dtype=np.float64)
    for k in range(a.shape[0]):
        c += a[k][:, None] * b[k]
    return c


def colsum(g):
    c = np.zeros((1, g.shape[1]), dtype=np.float64)
    for k in range(g.shape[0]):
        c += g[k]
    return c


def block11(x, f, mf, ff, b0):
    s = matmul(x, f.reshape(-1, 1))
    xf = x * f
    return x * mf + ((s - xf) + b0) * ff
