"""Dataset generation and CSV ingestion for the experiments."""

import csv
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .centers import GridSpec, uniform_grid_centers
from .exceptions import DataError
from .metrics import classification_accuracy, mse_db  # noqa: F401  (re-export)


@dataclass
class Dataset:
    """Inputs, targets and an optional train/test split."""

    inputs: np.ndarray
    targets: np.ndarray
    split: Optional[Tuple[np.ndarray, np.ndarray]] = None
    feature_names: Optional[List[str]] = None
    class_labels: Optional[List[str]] = None

    def __post_init__(self):
        self.inputs = np.asarray(self.inputs, dtype=float)
        if self.inputs.ndim == 1:
            self.inputs = self.inputs[:, np.newaxis]
        self.targets = np.asarray(self.targets, dtype=float).ravel()
        n = self.inputs.shape[0]
        if self.targets.shape[0] != n:
            raise DataError(f"{n} input rows but {self.targets.shape[0]} targets")
        if self.split is not None:
            tr = np.asarray(self.split[0], dtype=int)
            te = np.asarray(self.split[1], dtype=int)
            both = np.concatenate([tr, te])
            if both.size and (both.min() < 0 or both.max() >= n):
                raise DataError("split index out of range")
            if np.unique(both).size != both.size:
                raise DataError("train and test indices overlap or repeat")
            self.split = (tr, te)

    def __len__(self):
        return self.inputs.shape[0]

    @property
    def n_features(self):
        return self.inputs.shape[1]

    def _part(self, which):
        if self.split is None:
            return np.arange(len(self)) if which == 0 else np.empty(0, dtype=int)
        return self.split[which]

    @property
    def train_indices(self):
        return self._part(0)

    @property
    def test_indices(self):
        return self._part(1)

    def train(self):
        idx = self.train_indices
        return self.inputs[idx], self.targets[idx]

    def test(self):
        idx = self.test_indices
        return self.inputs[idx], self.targets[idx]


@dataclass(frozen=True)
class PlantParams:
    """Coefficients of the nonlinear test plant.

    ``b_const`` is the frequency inside the cosine term and ``noise_var`` the
    variance of the additive Gaussian disturbance.
    """

    a1: float = 2.0
    a2: float = -0.5
    a3: float = -0.1
    a4: float = -0.7
    b_const: float = 3.0
    noise_var: float = 0.0025
    n_samples: int = 100
    seed: int = 0

    def __post_init__(self):
        if not self.b_const > 0:
            raise ValueError("b_const must be positive")
        if not self.noise_var >= 0:
            raise ValueError("noise_var must be non-negative")
        if self.n_samples < 1:
            raise ValueError("n_samples must be positive")


def plant_response(r, params, noise=None):
    """Plant output for the excitation ``r`` (with ``r(-1) = r(-2) = 0``)."""
    r = np.asarray(r, dtype=float).ravel()
    r1 = np.concatenate([[0.0], r[:-1]])
    r2 = np.concatenate([[0.0, 0.0], r[:-2]])[: r.size]
    y = (
        params.a1 * r + params.a2 * r1 + params.a3 * r2
        + params.a4 * (np.cos(params.b_const * r) + np.exp(-np.abs(r)))
    )
    if noise is not None:
        y = y + noise
    return y


def gen_plant_series(params=PlantParams(), excitation="unit_step"):
    """Input/output record of the plant.

    ``excitation`` is ``"unit_step"`` or a vector of ``n_samples`` input
    values. The network input is the scalar ``r(t)``; the lagged terms only
    enter the target. Noise comes from ``numpy.random.default_rng(seed)``
    (PCG64, standard normal via ziggurat) scaled by ``sqrt(noise_var)``.
    """
    n = params.n_samples
    if isinstance(excitation, str):
        if excitation != "unit_step":
            raise ValueError(f"unknown excitation {excitation!r}")
        r = np.ones(n)
    else:
        r = np.asarray(excitation, dtype=float).ravel()
        if r.size != n:
            raise ValueError(f"excitation has {r.size} samples, expected {n}")
    noise = None
    if params.noise_var > 0:
        rng = np.random.default_rng(params.seed)
        noise = math.sqrt(params.noise_var) * rng.standard_normal(n)
    y = plant_response(r, params, noise)
    return Dataset(r[:, np.newaxis], y, feature_names=["r"])


def target_function(x, y):
    return np.exp(x * x - y)


def gen_function_grid(lo, hi, step):
    """Samples of ``exp(x^2 - y)`` on a square 2-D grid."""
    grid = uniform_grid_centers(GridSpec(lo, hi, step, dim=2))
    return Dataset(grid, target_function(grid[:, 0], grid[:, 1]), feature_names=["x", "y"])


def concat_train_test(train, test):
    """Stack two datasets and record which rows came from which."""
    n_tr = len(train)
    return Dataset(
        np.vstack([train.inputs, test.inputs]),
        np.concatenate([train.targets, test.targets]),
        split=(np.arange(n_tr), np.arange(n_tr, n_tr + len(test))),
        feature_names=train.feature_names,
        class_labels=train.class_labels,
    )


def gen_blobs(n_train=38, n_test=34, dim=5, spread=0.35, seed=0):
    """Two Gaussian classes with different mean directions.

    Class 0 is centred on the first half of the axes and class 1 on the
    second half, so both distance and angle separate them.
    """
    rng = np.random.default_rng(seed)
    half = dim // 2
    mean0 = np.zeros(dim)
    mean1 = np.zeros(dim)
    mean0[: max(half, 1)] = 1.0
    mean1[max(half, 1):] = 1.0

    def draw(n):
        y = (np.arange(n) % 2).astype(float)
        means = np.where(y[:, np.newaxis] == 1, mean1, mean0)
        return means + spread * rng.standard_normal((n, dim)), y

    X_tr, y_tr = draw(n_train)
    X_te, y_te = draw(n_test)
    names = [f"f{i}" for i in range(dim)]
    return concat_train_test(
        Dataset(X_tr, y_tr, feature_names=names, class_labels=["A", "B"]),
        Dataset(X_te, y_te, feature_names=names, class_labels=["A", "B"]),
    )


def class_means(dataset):
    """Mean training input of class 0 and of class 1."""
    X, y = dataset.train()
    return X[y < 0.5].mean(axis=0), X[y >= 0.5].mean(axis=0)


def _resolve_column(header, column, what):
    if isinstance(column, int):
        if not -len(header) <= column < len(header):
            raise DataError(f"{what} index {column} out of range", line=1)
        return column % len(header)
    if column not in header:
        raise DataError(f"{what} {column!r} not in header", line=1)
    return header.index(column)


def load_csv_dataset(path, target_column=-1, split_column=None):
    """Read a comma-separated file with a header row.

    Every column except the target and the optional split column is a
    numeric feature. Numeric targets are kept as is; any other target
    values are treated as class labels and mapped to 0.0, 1.0, ... in order
    of first appearance. Split values must be ``train`` or ``test``.
    """
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot open {path}: {exc.strerror}") from None
    with fh:
        rows = [(n, r) for n, r in enumerate(csv.reader(fh), start=1)
                if r and any(c.strip() for c in r)]
    if not rows:
        raise DataError(f"{path} is empty")
    header = [c.strip() for c in rows[0][1]]
    t_col = _resolve_column(header, target_column, "target column")
    s_col = None if split_column is None else _resolve_column(header, split_column, "split column")
    f_cols = [i for i in range(len(header)) if i not in (t_col, s_col)]

    inputs, raw_targets, train_idx, test_idx = [], [], [], []
    for k, (line, row) in enumerate(rows[1:]):
        if len(row) != len(header):
            raise DataError(f"expected {len(header)} fields, found {len(row)}", line=line)
        feats = []
        for c in f_cols:
            try:
                feats.append(float(row[c]))
            except ValueError:
                raise DataError(
                    f"non-numeric feature value {row[c]!r}", line=line, column=header[c]
                ) from None
        inputs.append(feats)
        raw_targets.append(row[t_col].strip())
        if s_col is not None:
            token = row[s_col].strip()
            if token == "train":
                train_idx.append(k)
            elif token == "test":
                test_idx.append(k)
            else:
                raise DataError(f"unknown split token {token!r}", line=line, column=header[s_col])

    class_labels = None
    try:
        targets = [float(t) for t in raw_targets]
    except ValueError:
        class_labels = list(dict.fromkeys(raw_targets))
        targets = [float(class_labels.index(t)) for t in raw_targets]
    return Dataset(
        np.array(inputs, dtype=float).reshape(len(inputs), len(f_cols)),
        np.array(targets, dtype=float),
        split=None if s_col is None else (np.array(train_idx, dtype=int), np.array(test_idx, dtype=int)),
        feature_names=[header[c] for c in f_cols],
        class_labels=class_labels,
    )


def fmt_float(v):
    """Lossless, deterministic decimal text for a float."""
    return format(float(v), ".17g")


def write_csv(path, header, rows):
    """Write ``rows`` with a one-line header; floats use :func:`fmt_float`."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(
                [fmt_float(v) if isinstance(v, (float, np.floating)) else v for v in row]
            )


def write_csv_dataset(dataset, path, target_name="target", split_name=None):
    """Inverse of :func:`load_csv_dataset`."""
    names = dataset.feature_names or [f"x{i}" for i in range(dataset.n_features)]
    header = list(names) + [target_name]
    if split_name is not None:
        header.append(split_name)
        test = set(dataset.test_indices.tolist())
    rows = []
    for i in range(len(dataset)):
        t = dataset.targets[i]
        row = [float(v) for v in dataset.inputs[i]]
        row.append(dataset.class_labels[int(t)] if dataset.class_labels else float(t))
        if split_name is not None:
            row.append("test" if i in test else "train")
        rows.append(row)
    write_csv(path, header, rows)
