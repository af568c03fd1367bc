"""Time-series ingestion and sliding-window datasets."""

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ParseError
from .linalg import Matrix


@dataclass
class TimeSeriesFrame:
    columns: list
    values: np.ndarray  # T x F, time order
    label_index: int

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2:
            raise ValueError("frame values must be a T x F array")
        if len(self.columns) != self.values.shape[1]:
            raise ValueError("one column name per feature required")
        if not 0 <= self.label_index < self.values.shape[1]:
            raise ValueError(f"label index {self.label_index} out of range")

    @property
    def length(self):
        return self.values.shape[0]

    @property
    def n_features(self):
        return self.values.shape[1]

    @property
    def label(self):
        return self.columns[self.label_index]


def _is_number(s):
    try:
        float(s)
    except ValueError:
        return False
    return True


def load_csv(path, label_column):
    """Read a headered numeric CSV. A non-numeric first column (dates) is dropped."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ParseError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    body = [r for r in rows[1:] if r and any(c.strip() for c in r)]
    if not body:
        raise ParseError(f"{path}: no data rows")
    skip = 1 if not _is_number(body[0][0].strip()) else 0
    names = header[skip:]
    if label_column not in names:
        raise ParseError(f"{path}: label column {label_column!r} not found in header {names}")
    values = np.empty((len(body), len(names)))
    for r, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise ParseError(f"{path}: row {r} has {len(row)} fields, header has {len(header)}")
        for c in range(skip, len(header)):
            cell = row[c].strip()
            try:
                v = float(cell)
            except ValueError:
                raise ParseError(
                    f"{path}: row {r}, column {c + 1} ({header[c]!r}): not a number: {cell!r}"
                ) from None
            if not np.isfinite(v):
                raise ParseError(f"{path}: row {r}, column {c + 1} ({header[c]!r}): non-finite value")
            values[r - 2, c - skip] = v
    return TimeSeriesFrame(names, values, names.index(label_column))


def split_7_2_1(frame_or_length):
    """Chronological (train, val, test) ``range`` objects of sizes 70%/20%/rest."""
    T = frame_or_length if isinstance(frame_or_length, int) else frame_or_length.length
    if T < 10:
        raise ConfigError(f"need at least 10 timesteps to split 7:2:1, got {T}")
    n_train = T * 7 // 10
    n_val = T * 2 // 10
    return range(0, n_train), range(n_train, n_train + n_val), range(n_train + n_val, T)


@dataclass(frozen=True)
class MinMax:
    lo: np.ndarray
    hi: np.ndarray

    def apply(self, values):
        return (values - self.lo) / (self.hi - self.lo)

    def invert(self, values):
        return values * (self.hi - self.lo) + self.lo


def fit_apply_minmax(frame, train_range):
    """Scale every column with statistics from the training range only."""
    train = frame.values[train_range.start : train_range.stop]
    lo, hi = train.min(axis=0), train.max(axis=0)
    flat = np.flatnonzero(hi == lo)
    if flat.size:
        cols = [frame.columns[i] for i in flat]
        raise ConfigError(f"constant column(s) on the training split, cannot min-max scale: {cols}")
    params = MinMax(lo, hi)
    scaled = TimeSeriesFrame(list(frame.columns), params.apply(frame.values), frame.label_index)
    return scaled, params


@dataclass
class Split:
    X: np.ndarray  # samples x (window * F)
    Y: np.ndarray  # samples x horizon
    starts: np.ndarray = field(default=None)  # window start index of each sample

    def __len__(self):
        return self.X.shape[0]


@dataclass
class WindowDataset:
    train: Split
    val: Split
    test: Split
    window: int
    horizon: int
    n_features: int
    scaler: MinMax = None
    ranges: tuple = None

    @property
    def input_dim(self):
        return self.window * self.n_features

    def split(self, name):
        return {"train": self.train, "val": self.val, "test": self.test}[name]


def _windows(values, label_index, rng, window, horizon):
    L = len(rng)
    if L < window + horizon:
        raise ConfigError(
            f"split [{rng.start}, {rng.stop}) has {L} steps, needs window + horizon = {window + horizon}"
        )
    count = L - window - horizon + 1
    F = values.shape[1]
    X = np.empty((count, window * F))
    Y = np.empty((count, horizon))
    for s in range(count):
        t = rng.start + s
        X[s] = values[t : t + window].ravel()
        Y[s] = values[t + window : t + window + horizon, label_index]
    return Split(X, Y, np.arange(rng.start, rng.start + count))


def make_windows(frame, ranges, window, horizon, scaler=None):
    """Stride-1 windows; inputs flatten ``window`` rows time-major, targets are the next ``horizon`` labels."""
    if window < 1 or horizon < 1:
        raise ConfigError("window and horizon must be positive")
    splits = [_windows(frame.values, frame.label_index, r, window, horizon) for r in ranges]
    return WindowDataset(*splits, window, horizon, frame.n_features, scaler, tuple(ranges))


def prepare(frame, window, horizon):
    """Split, scale on the training part, and window: the full preprocessing pipeline."""
    ranges = split_7_2_1(frame)
    scaled, scaler = fit_apply_minmax(frame, ranges[0])
    return make_windows(scaled, ranges, window, horizon, scaler)


def fisher_yates(n, rng):
    perm = list(range(n))
    for i in range(n - 1, 0, -1):
        j = int(rng.integers(0, i + 1))
        perm[i], perm[j] = perm[j], perm[i]
    return perm


def batches(split, batch_size, seed=None, shuffle=True):
    """List of ``(X, Ylabel)`` matrix pairs; the last batch may be short."""
    if batch_size < 1:
        raise ConfigError(f"batch size must be >= 1, got {batch_size}")
    n = len(split)
    if shuffle:
        order = fisher_yates(n, np.random.Generator(np.random.PCG64(seed)))
    else:
        order = list(range(n))
    out = []
    for s in range(0, n, batch_size):
        idx = order[s : s + batch_size]
        out.append((Matrix._wrap(split.X[idx]), Matrix._wrap(split.Y[idx])))
    return out


def synth_series(kind, T, F, seed):
    """Deterministic stand-in series.

    ``smooth``: a few low-frequency sinusoids per feature, a mild trend and
    small Gaussian noise. ``spiky``: the same plus sparse heavy-tailed shocks
    that persist for a while, mimicking a noisy market index. The last column
    is the label, named ``OT``.
    """
    if kind not in ("smooth", "spiky"):
        raise ConfigError(f"unknown synthetic series kind {kind!r} (smooth|spiky)")
    if T < 1 or F < 1:
        raise ConfigError("T and F must be positive")
    rng = np.random.Generator(np.random.PCG64(seed))
    t = np.arange(T, dtype=np.float64)
    values = np.empty((T, F))
    periods = (24.0, 168.0, 720.0)
    for f in range(F):
        amps = rng.uniform(0.3, 1.0, size=3)
        phases = rng.uniform(0.0, 2 * np.pi, size=3)
        col = sum(a * np.sin(2 * np.pi * t / P + ph) for a, P, ph in zip(amps, periods, phases))
        col += rng.uniform(-1.0, 1.0) * t / max(T, 1)
        col += 0.05 * rng.standard_normal(T)
        values[:, f] = col
    if kind == "spiky":
        hits = rng.random((T, F)) < 0.05
        shocks = np.where(hits, rng.standard_t(2.0, size=(T, F)), 0.0)
        # shocks decay instead of vanishing after one step
        decayed = np.empty_like(shocks)
        acc = np.zeros(F)
        for i in range(T):
            acc = 0.8 * acc + shocks[i]
            decayed[i] = acc
        values += decayed + 0.2 * rng.standard_normal((T, F))
    columns = [f"x{i}" for i in range(F - 1)] + ["OT"]
    return TimeSeriesFrame(columns, values, F - 1)


def parse_source(spec):
    """``'synth:smooth'`` -> ``('synth', 'smooth')``; anything else is a CSV path."""
    if spec.startswith("synth:"):
        return "synth", spec.split(":", 1)[1]
    return "csv", spec
