"""Command-line entry point.

Exit codes: 0 ok, 1 verification failure, 2 usage/config error, 3 divergence.
"""

import argparse
import csv
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import _backend
from . import demos, verify
from .data import load_csv, parse_source, prepare, synth_series
from .errors import ConfigError, DivergenceError, ParseError
from .model import TwoLayerPerceptron
from .optim import SgdConfig, TrainConfig, apply_step, epoch_batches, evaluate, train
from .runstore import load_model, write_run

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_DIVERGED = 0, 1, 2, 3


def _alpha(text):
    try:
        a = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 < a <= 1.0:
        raise argparse.ArgumentTypeError(f"alpha must lie in (0, 1], got {a}")
    return a


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {v}")
    return v


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _alpha_list(text):
    return [_alpha(t) for t in text.split(",") if t.strip()]


def _add_data_flags(p):
    p.add_argument("--data", default="synth:smooth", help="CSV path or synth:smooth / synth:spiky")
    p.add_argument("--label", default="OT", help="label column name for CSV input")
    p.add_argument("--synth-length", type=_positive_int, default=2000)
    p.add_argument("--synth-features", type=_positive_int, default=7)


def _add_train_flags(p):
    _add_data_flags(p)
    p.add_argument("--alpha", type=_alpha, default=1.0)
    p.add_argument("--lr", type=_positive_float, default=1e-4)
    p.add_argument("--window", type=_positive_int, default=36)
    p.add_argument("--horizon", type=_positive_int, default=48)
    p.add_argument("--batch", type=_positive_int, default=256)
    p.add_argument("--hidden", type=_positive_int, default=128)
    p.add_argument("--iters", type=_positive_int, default=1500)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--eps", type=_positive_float, default=1e-8)


def build_parser():
    parser = argparse.ArgumentParser(prog="fracgrad", description=__doc__.splitlines()[0])
    parser.add_argument("--backend", choices=sorted(_backend.BACKENDS), help="kernel backend override")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train the two-layer FLinear perceptron with FSGD")
    _add_train_flags(p)
    p.add_argument("--out", default="run")
    p.add_argument("--quiet", action="store_true")

    p = sub.add_parser("eval", help="re-evaluate a saved run on its test split")
    p.add_argument("--run", required=True, help="run directory containing metrics.json and model.bin")
    p.add_argument("--data", help="override the data source recorded in metrics.json")

    p = sub.add_parser("verify", help="run the oracle verification suites")
    p.add_argument("--cases", type=_positive_int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha-grid", type=_alpha_list, default=list(verify.DEFAULT_ALPHAS))

    p = sub.add_parser("demo", help="scalar demonstrations (CSV output)")
    p.add_argument("name", choices=["trajectory", "saddle", "decomposition"])
    p.add_argument("--alpha", type=_alpha, default=0.5)
    p.add_argument("--eta", type=_positive_float, default=0.1)
    p.add_argument("--steps", type=_positive_int, default=20)
    p.add_argument("--samples", type=_positive_int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=".")

    p = sub.add_parser("bench", help="time one training epoch per alpha")
    _add_data_flags(p)
    p.add_argument("--alphas", type=_alpha_list, default=[0.9, 1.0])
    p.add_argument("--window", type=_positive_int, default=36)
    p.add_argument("--horizon", type=_positive_int, default=48)
    p.add_argument("--batch", type=_positive_int, default=256)
    p.add_argument("--hidden", type=_positive_int, default=128)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--lr", type=_positive_float, default=1e-4)
    p.add_argument("--with-reference", action="store_true", help="add a plain integer SGD row")
    p.add_argument("--out", default=".")
    return parser


def _seed(args):
    env = os.environ.get("FRACGRAD_SEED")
    if env is not None and env.strip():
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"FRACGRAD_SEED must be an integer, got {env!r}") from None
    return args.seed


def load_frame(source, label="OT", length=2000, features=7, seed=42):
    kind, arg = parse_source(source)
    if kind == "synth":
        return synth_series(arg, length, features, seed)
    return load_csv(arg, label)


def _data_config(args, seed):
    return {
        "data": args.data,
        "label": args.label,
        "synth_length": args.synth_length,
        "synth_features": args.synth_features,
        "data_seed": seed,
    }


def cmd_train(args):
    seed = _seed(args)
    cfg = TrainConfig(args.window, args.horizon, args.batch, args.hidden, args.alpha,
                      args.iters, seed, args.eps)
    sgd = SgdConfig(lr=args.lr)
    frame = load_frame(args.data, args.label, args.synth_length, args.synth_features, seed)
    ds = prepare(frame, cfg.window, cfg.horizon)
    model = TwoLayerPerceptron(ds.input_dim, cfg.hidden, cfg.horizon, cfg.alpha, cfg.eps, seed=seed)

    def log(it, loss, val):
        if not args.quiet and (it % 100 == 0 or it == 1):
            print(f"iter {it:5d}  train {loss:.6f}  val {val:.6f}", flush=True)

    report = train(model, ds, cfg, sgd, log=log)
    extra = _data_config(args, seed)
    extra.update(window=cfg.window, horizon=cfg.horizon, batch=cfg.batch, hidden=cfg.hidden,
                 iters=cfg.iters, eps=cfg.eps, backend=_backend.active())
    out = write_run(args.out, report, extra)
    print(f"best iter {report.best_iter}  val {report.best_val_loss:.6f}")
    print(f"test MSE {report.test_mse:.6f}  test MAE {report.test_mae:.6f}")
    print(f"artifacts written to {out}")
    return EXIT_OK


def cmd_eval(args):
    run = Path(args.run)
    meta = json.loads((run / "metrics.json").read_text())
    frame = load_frame(args.data or meta["data"], meta["label"], meta["synth_length"],
                       meta["synth_features"], meta["data_seed"])
    ds = prepare(frame, meta["window"], meta["horizon"])
    mats = load_model(run / "model.bin")
    model = TwoLayerPerceptron(ds.input_dim, meta["hidden"], meta["horizon"], meta["alpha"],
                               meta["eps"], params=[(mats[0], mats[1]), (mats[2], mats[3])])
    mse, mae = evaluate(model, ds.test)
    print(f"test MSE {mse:.6f}  test MAE {mae:.6f}")
    print(json.dumps({"test_mse": mse, "test_mae": mae}))
    return EXIT_OK


def cmd_verify(args):
    results = verify.run_all(args.cases, args.seed, tuple(args.alpha_grid))
    print(f"alpha grid: {','.join(str(a) for a in args.alpha_grid)}  cases: {args.cases}  seed: {args.seed}")
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.passed]
    if failed:
        for r in failed:
            print(f"failing property: {r.name} (worst error {r.worst:.3e})", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_demo(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.name == "trajectory":
        rec = demos.quadratic_trajectory(args.alpha, args.eta, args.steps)
        path = out / "demo_trajectory.csv"
        rec.write_csv(path)
        print(f"{len(rec)} rows; final distance to minimum {rec.distance_to_minimum(args.steps):.6g}")
    elif args.name == "saddle":
        grid = np.linspace(-1.0, 1.0, 11).tolist()
        rows = demos.gradient_field(args.alpha, grid, grid)
        path = out / "demo_saddle.csv"
        demos.write_gradient_field(rows, path)
        print(f"{len(rows)} grid points")
    else:
        rng = np.random.default_rng(args.seed)
        rows = []
        for _ in range(args.samples):
            x, w, b, up = rng.uniform(-2.0, 2.0, 4).tolist()
            j1, p1 = demos.regularization_decomposition(x, w, b, args.alpha, up)
            rows.append((x, w, b, args.alpha, up, j1, p1, j1 + p1))
        path = out / "demo_decomposition.csv"
        demos.write_decomposition(rows, path)
        print(f"{len(rows)} samples")
    print(f"wrote {path}")
    return EXIT_OK


def bench_epoch(ds, alpha, args, seed):
    """Wall time and peak graph bytes of one training epoch (no validation)."""
    from .autograd import Tape

    cfg = TrainConfig(args.window, args.horizon, args.batch, args.hidden, alpha, 1, seed)
    sgd = SgdConfig(lr=args.lr)
    model = TwoLayerPerceptron(ds.input_dim, args.hidden, args.horizon, alpha, seed=seed)
    peak = 0
    batches = epoch_batches(ds, cfg, 0)
    t0 = time.perf_counter()
    for X, Y in batches:
        tape = Tape()
        model.loss(tape, X, Y)
        tape.backward()
        apply_step(model, tape.param_grads(), sgd)
        peak = max(peak, tape.peak_bytes)
    return time.perf_counter() - t0, len(batches), peak


def bench_reference_epoch(ds, args, seed):
    from .reference import ReferenceNet

    cfg = TrainConfig(args.window, args.horizon, args.batch, args.hidden, 1.0, 1, seed)
    net = ReferenceNet(ds.input_dim, args.hidden, args.horizon, seed)
    batches = epoch_batches(ds, cfg, 0)
    t0 = time.perf_counter()
    for X, Y in batches:
        net.step(X, Y, args.lr)
    return time.perf_counter() - t0, len(batches)


def cmd_bench(args):
    seed = _seed(args)
    frame = load_frame(args.data, args.label, args.synth_length, args.synth_features, seed)
    ds = prepare(frame, args.window, args.horizon)
    rows = []
    for alpha in args.alphas:
        secs, n, peak = bench_epoch(ds, alpha, args, seed)
        rows.append(("FSGD", alpha, secs, secs / n, peak))
    if args.with_reference:
        secs, n = bench_reference_epoch(ds, args, seed)
        rows.append(("SGD", "", secs, secs / n, ""))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "bench.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["method", "alpha", "secs", "secs_per_iter", "peak_buffer_bytes"])
        for row in rows:
            w.writerow(row)
            print(f"{row[0]:<5} alpha={row[1]!s:<4} {row[2]:.4f}s  ({row[3] * 1e3:.2f} ms/iter)  peak={row[4]}")
    print(f"backend {_backend.active()}; wrote {path}")
    return EXIT_OK


COMMANDS = {"train": cmd_train, "eval": cmd_eval, "verify": cmd_verify, "demo": cmd_demo, "bench": cmd_bench}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.backend:
        _backend.use(args.backend)
    try:
        return COMMANDS[args.command](args)
    except DivergenceError as e:
        print(f"diverged: {e}", file=sys.stderr)
        return EXIT_DIVERGED
    except (ConfigError, ParseError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
