"""RBF network with an adaptively fused hidden-layer kernel.

The network is trained online: every sample triggers one gradient step on
the instantaneous squared error for the output weights, the bias and (unless
frozen) the two raw kernel mixing weights.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DataError, DivergenceError
from .kernels import (
    _alpha_grad,
    KernelConfig,
    MixingState,
    cosine_matrix,
    fuse,
    fused_eval,
    gaussian_matrix,
)
from .metrics import mse_db

SNAPSHOT_VERSION = 1


@dataclass
class RbfNetwork:
    """Learnable model: fixed centers, output weights, bias and mixing."""

    centers: np.ndarray
    weights: np.ndarray
    bias: float
    kernel_config: KernelConfig
    mixing: MixingState

    def __post_init__(self):
        self.centers = np.atleast_2d(np.asarray(self.centers, dtype=float))
        self.weights = np.asarray(self.weights, dtype=float).ravel().copy()
        self.bias = float(self.bias)
        if self.centers.shape[0] < 1:
            raise ValueError("network needs at least one center")
        if not np.all(np.isfinite(self.centers)):
            raise ValueError("centers must be finite")
        if self.weights.shape[0] != self.centers.shape[0]:
            raise ValueError(
                f"{self.weights.shape[0]} weights for {self.centers.shape[0]} centers"
            )

    @classmethod
    def zeros(cls, centers, kernel_config, mixing):
        """Network with zero weights and bias."""
        centers = np.atleast_2d(np.asarray(centers, dtype=float))
        return cls(centers, np.zeros(centers.shape[0]), 0.0, kernel_config, mixing)

    @property
    def n_inputs(self):
        return self.centers.shape[1]

    @property
    def n_centers(self):
        return self.centers.shape[0]

    def copy(self):
        return RbfNetwork(
            self.centers.copy(), self.weights.copy(), self.bias,
            self.kernel_config, self.mixing,
        )


@dataclass(frozen=True)
class TrainConfig:
    eta: float = 1e-3
    epochs: int = 1
    shuffle: bool = False
    seed: int = 0
    freeze_mixing: bool = False

    def __post_init__(self):
        # eta == 0 is allowed: it is handy for evaluating a model in place
        if not (np.isfinite(self.eta) and self.eta >= 0):
            raise ValueError(f"eta must be non-negative, got {self.eta!r}")
        if int(self.epochs) != self.epochs or self.epochs < 1:
            raise ValueError(f"epochs must be a positive integer, got {self.epochs!r}")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


@dataclass
class TrainTrace:
    """Per-epoch record of a training run."""

    mse_db: np.ndarray = field(default_factory=lambda: np.empty(0))
    alpha1: np.ndarray = field(default_factory=lambda: np.empty(0))
    alpha2: np.ndarray = field(default_factory=lambda: np.empty(0))

    @property
    def best_epoch(self):
        """Index of the first epoch attaining the minimum MSE."""
        return int(np.argmin(self.mse_db))

    @property
    def best_mse_db(self):
        return float(np.min(self.mse_db))

    def __len__(self):
        return len(self.mse_db)


def _check_input(net, x):
    x = np.asarray(x, dtype=float).ravel()
    if x.shape[0] != net.n_inputs:
        raise ValueError(
            f"dimension mismatch: expected {net.n_inputs} inputs, got {x.shape[0]}"
        )
    return x


def forward(net, x):
    """Network output for one input and the kernel vector that produced it."""
    x = _check_input(net, x)
    kv = fused_eval(x, net.centers, net.mixing, net.kernel_config)
    y = float(np.dot(net.weights, kv.fused)) + net.bias
    return y, kv


def _step(weights, bias, a1, a2, phi1, phi2, d, eta, freeze_mixing):
    """One online update from precomputed kernel responses.

    Every partial derivative is evaluated at the incoming parameters; the
    caller commits the returned values. Returns
    ``(error, weights, bias, a1, a2)``.
    """
    m1 = abs(a1)
    m2 = abs(a2)
    total = m1 + m2
    fused = (m1 / total) * phi1 + (m2 / total) * phi2
    y = float(np.dot(weights, fused)) + bias
    if not np.isfinite(y):
        raise DivergenceError("y")
    e = d - y
    if not np.isfinite(e):
        raise DivergenceError("error")
    if not freeze_mixing:
        g1, g2 = _alpha_grad(e, float(np.dot(weights, phi1 - phi2)), a1, a2)
        # guarded components have a zero gradient and stay put
        a1_new = a1 - eta * g1
        a2_new = a2 - eta * g2
        if not np.isfinite(a1_new):
            raise DivergenceError("a1_raw")
        if not np.isfinite(a2_new):
            raise DivergenceError("a2_raw")
        a1, a2 = a1_new, a2_new
    weights = weights + (eta * e) * fused
    bias = bias + eta * e
    if not np.all(np.isfinite(weights)):
        raise DivergenceError("weights")
    if not np.isfinite(bias):
        raise DivergenceError("bias")
    return e, weights, bias, a1, a2


def _commit(net, weights, bias, a1, a2):
    net.weights = weights
    net.bias = bias
    if a1 != net.mixing.a1_raw or a2 != net.mixing.a2_raw:
        net.mixing = MixingState(a1, a2)


def train_step(net, x, d, eta, freeze_mixing=False):
    """Apply one online gradient step for the pair ``(x, d)``.

    The mixing weights, output weights and bias are all updated from the
    same pre-step snapshot. Returns the prediction error ``d - y``.
    """
    x = _check_input(net, x)
    kv = fused_eval(x, net.centers, net.mixing, net.kernel_config)
    e, w, b, a1, a2 = _step(
        net.weights, net.bias, net.mixing.a1_raw, net.mixing.a2_raw,
        kv.phi1, kv.phi2, float(d), float(eta), freeze_mixing,
    )
    _commit(net, w, b, a1, a2)
    return e


def kernel_matrices(net, X):
    """Cosine and Gaussian responses of every row of ``X`` to every center."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return (
        cosine_matrix(X, net.centers, net.kernel_config),
        gaussian_matrix(X, net.centers, net.kernel_config),
    )


def train(net, inputs, targets, cfg):
    """Run ``cfg.epochs`` online passes over ``(inputs, targets)``.

    Centers are fixed, so kernel responses are computed once up front and the
    epoch loop only touches the learnable parameters. The network is updated
    in place (also when training aborts with :class:`DivergenceError`, in
    which case it holds the last finite state).
    """
    X = np.atleast_2d(np.asarray(inputs, dtype=float))
    d = np.asarray(targets, dtype=float).ravel()
    if X.shape[0] == 0:
        raise DataError("training set is empty")
    if X.shape[0] != d.shape[0]:
        raise ValueError(f"{X.shape[0]} input rows but {d.shape[0]} targets")
    if X.shape[1] != net.n_inputs:
        raise ValueError(
            f"dimension mismatch: expected {net.n_inputs} inputs, got {X.shape[1]}"
        )
    P1, P2 = kernel_matrices(net, X)
    n = X.shape[0]
    rng = np.random.default_rng(cfg.seed)
    eta = float(cfg.eta)
    freeze = cfg.freeze_mixing

    w, b = net.weights, net.bias
    a1, a2 = net.mixing.a1_raw, net.mixing.a2_raw
    trace_mse = np.empty(cfg.epochs)
    trace_a1 = np.empty(cfg.epochs)
    trace_a2 = np.empty(cfg.epochs)
    errors = np.empty(n)
    order = np.arange(n)
    try:
        for epoch in range(cfg.epochs):
            if cfg.shuffle:
                order = rng.permutation(n)
            for k in range(n):
                i = order[k]
                try:
                    e, w, b, a1, a2 = _step(w, b, a1, a2, P1[i], P2[i], d[i], eta, freeze)
                except DivergenceError as exc:
                    raise DivergenceError(exc.quantity, epoch=epoch, sample=int(i)) from None
                errors[k] = e
            with np.errstate(over="ignore"):
                trace_mse[epoch] = mse_db(errors)
            if not np.isfinite(trace_mse[epoch]):
                raise DivergenceError("epoch mse", epoch=epoch)
            total = abs(a1) + abs(a2)
            trace_a1[epoch] = abs(a1) / total
            trace_a2[epoch] = abs(a2) / total
    finally:
        _commit(net, w, b, a1, a2)
    return TrainTrace(trace_mse, trace_a1, trace_a2)


def predict_batch(net, inputs):
    """Network outputs for every row of ``inputs`` (no mutation)."""
    X = np.asarray(inputs, dtype=float)
    if X.size == 0:
        return np.empty(0)
    X = np.atleast_2d(X)
    if X.shape[1] != net.n_inputs:
        raise ValueError(
            f"dimension mismatch: expected {net.n_inputs} inputs, got {X.shape[1]}"
        )
    P1, P2 = kernel_matrices(net, X)
    fused = fuse(P1, P2, net.mixing)
    return np.array([float(np.dot(net.weights, row)) + net.bias for row in fused])


def _fmt(v):
    return format(float(v), ".17g")


def save_snapshot(net, path):
    """Write ``net`` to a versioned plain-text file (lossless)."""
    lines = [
        f"version = {SNAPSHOT_VERSION}",
        f"m0 = {net.n_inputs}",
        f"m1 = {net.n_centers}",
        f"sigma = {_fmt(net.kernel_config.sigma)}",
        f"gamma = {_fmt(net.kernel_config.gamma)}",
        f"a1_raw = {_fmt(net.mixing.a1_raw)}",
        f"a2_raw = {_fmt(net.mixing.a2_raw)}",
        f"bias = {_fmt(net.bias)}",
        "[centers]",
    ]
    lines += [" ".join(_fmt(v) for v in row) for row in net.centers]
    lines.append("[weights]")
    lines += [_fmt(v) for v in net.weights]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_snapshot(path):
    """Read a network written by :func:`save_snapshot`."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    header = {}
    i = 0
    while i < len(lines) and lines[i] != "[centers]":
        key, sep, value = lines[i].partition("=")
        if not sep:
            raise DataError("malformed snapshot header", line=i + 1)
        header[key.strip()] = value.strip()
        i += 1
    required = ("version", "m0", "m1", "sigma", "gamma", "a1_raw", "a2_raw", "bias")
    missing = [k for k in required if k not in header]
    if missing:
        raise DataError(f"snapshot header missing {', '.join(missing)}")
    if int(header["version"]) != SNAPSHOT_VERSION:
        raise DataError(f"unsupported snapshot version {header['version']}")
    m0, m1 = int(header["m0"]), int(header["m1"])
    try:
        start = i + 1
        centers = np.array(
            [[float(v) for v in lines[start + r].split()] for r in range(m1)]
        ).reshape(m1, m0)
        if lines[start + m1] != "[weights]":
            raise DataError("expected [weights] section", line=start + m1 + 1)
        weights = np.array([float(v) for v in lines[start + m1 + 1:start + 2 * m1 + 1]])
    except (IndexError, ValueError) as exc:
        raise DataError(f"malformed snapshot body: {exc}") from None
    if weights.shape[0] != m1:
        raise DataError(f"expected {m1} weights, found {weights.shape[0]}")
    return RbfNetwork(
        centers, weights, float(header["bias"]),
        KernelConfig(float(header["sigma"]), float(header["gamma"])),
        MixingState(float(header["a1_raw"]), float(header["a2_raw"])),
    )

