"""Run-directory artifacts: history.csv, metrics.json, model.bin."""

import csv
import json
import struct
from pathlib import Path

import numpy as np

from .linalg import Matrix

MAGIC = b"FGRD1"


def save_model(path, mats):
    """Magic ``FGRD1`` then, per matrix, uint32 rows, uint32 cols and row-major float64, all little-endian."""
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        for m in mats:
            fh.write(struct.pack("<II", m.rows, m.cols))
            fh.write(m.to_numpy().astype("<f8").tobytes())


def load_model(path):
    raw = Path(path).read_bytes()
    if raw[: len(MAGIC)] != MAGIC:
        raise ValueError(f"{path}: not a model file (bad magic)")
    pos = len(MAGIC)
    mats = []
    while pos < len(raw):
        if pos + 8 > len(raw):
            raise ValueError(f"{path}: truncated matrix header at byte {pos}")
        rows, cols = struct.unpack_from("<II", raw, pos)
        pos += 8
        size = rows * cols * 8
        if pos + size > len(raw):
            raise ValueError(f"{path}: truncated matrix data at byte {pos}")
        a = np.frombuffer(raw, dtype="<f8", count=rows * cols, offset=pos).reshape(rows, cols)
        mats.append(Matrix(a))
        pos += size
    return mats


def write_history(path, report):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["iter", "train_loss", "val_loss"])
        for i, (tl, vl) in enumerate(zip(report.train_loss, report.val_loss), start=1):
            w.writerow([i, repr(tl), repr(vl)])


def read_history(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [float(r["train_loss"]) for r in rows], [float(r["val_loss"]) for r in rows]


def metrics_dict(report, extra=None):
    out = {
        "alpha": report.alpha,
        "lr": report.lr,
        "seed": report.seed,
        "best_iter": report.best_iter,
        "best_val_loss": report.best_val_loss,
        "test_mse": report.test_mse,
        "test_mae": report.test_mae,
        "secs_per_epoch": report.secs_per_epoch,
        "peak_buffer_bytes": report.peak_buffer_bytes,
    }
    if extra:
        out.update(extra)
    return out


def write_run(out_dir, report, extra=None):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_history(out / "history.csv", report)
    (out / "metrics.json").write_text(json.dumps(metrics_dict(report, extra), indent=2) + "\n")
    save_model(out / "model.bin", report.best_state)
    return out
