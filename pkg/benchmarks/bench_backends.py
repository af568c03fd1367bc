"""Compare the compiled kernels with the numpy fallback.

    python3 benchmarks/bench_backends.py [--repeats 20]

Prints min-of-repeats timings per kernel and for one full training step,
and checks that both backends return bitwise-identical results.
"""

import argparse
import time

import numpy as np

from fracgrad import _backend
from fracgrad.data import batches, prepare, synth_series
from fracgrad.model import TwoLayerPerceptron
from fracgrad.optim import SgdConfig, time_iterations


def best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeats", type=int, default=20)
    args = ap.parse_args()
    names = sorted(_backend.BACKENDS)
    if len(names) < 2:
        print("compiled extension not built; only", names, "available")

    rng = np.random.default_rng(0)
    a = rng.uniform(-1, 1, (256, 252))
    b = rng.uniform(-1, 1, (252, 128))
    g = rng.uniform(-1, 1, (256, 128))
    f = rng.uniform(-1, 1, 252)
    mf, ff = np.abs(f) ** 0.1, np.sign(f) * np.abs(f) ** -0.9
    ds = prepare(synth_series("smooth", 2000, 7, 42), 36, 48)
    batch = batches(ds.train, 256, seed=0)[0]

    results, outputs = {}, {}
    for name in names:
        k = _backend.BACKENDS[name]
        _backend.use(name)
        outputs[name] = (k.matmul(a, b), k.matmul_tn(a, g), k.block11(a, f, mf, ff, 0.3))
        row = {
            "matmul 256x252x128": best_of(lambda: k.matmul(a, b), args.repeats),
            "matmul_tn 252x256x128": best_of(lambda: k.matmul_tn(a, g), args.repeats),
            "block11 256x252": best_of(lambda: k.block11(a, f, mf, ff, 0.3), args.repeats),
        }
        for alpha in (1.0, 0.9):
            model = TwoLayerPerceptron(ds.input_dim, 128, 48, alpha, seed=42)
            time_iterations(model, batch, SgdConfig(), 3, True)  # warm-up
            row[f"train step alpha={alpha}"] = time_iterations(model, batch, SgdConfig(), args.repeats, True)[0]
        results[name] = row

    row_names = list(results[names[0]])
    print(f"{'kernel':<26}" + "".join(f"{n:>12}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for r in row_names:
        cells = "".join(f"{results[n][r] * 1e3:>10.3f}ms" for n in names)
        extra = f"{results['python'][r] / results['cython'][r]:>11.1f}x" if len(names) > 1 else ""
        print(f"{r:<26}{cells}{extra}")
    print(f"numpy BLAS matmul reference: {best_of(lambda: a @ b, args.repeats) * 1e3:.3f}ms")
    if len(names) > 1:
        same = all(np.array_equal(x, y) for x, y in zip(*outputs.values()))
        print("backends bitwise identical:", same)


if __name__ == "__main__":
    main()
