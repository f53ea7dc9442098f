"""Experiment harness: builds data and centers, trains one network per arm,
writes CSV outputs."""

import configparser
import dataclasses
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Union

import mpmath as mp
import numpy as np

from .centers import GridSpec, SubtractiveSpec, subtractive_clustering, uniform_grid_centers
from .data import (
    PlantParams,
    class_means,
    concat_train_test,
    gen_blobs,
    gen_function_grid,
    gen_plant_series,
    load_csv_dataset,
    write_csv,
)
from .estimator import ARMS, arm_mixing
from .exceptions import ConfigError
from .kernels import (
    DEFAULT_GAMMA,
    KernelConfig,
    MixingState,
    alpha_gradient,
    cosine_matrix,
    fuse,
    gaussian_matrix,
)
from .metrics import classification_accuracy, mse_db
from .network import RbfNetwork, TrainConfig, forward, predict_batch, train

log = logging.getLogger(__name__)

EXPERIMENTS = ("sysid", "classify", "approx")


@dataclass(frozen=True)
class FunctionGridSource:
    train_lo: float = -1.0
    train_hi: float = 1.0
    train_step: float = 0.2
    test_lo: float = -0.9
    test_hi: float = 0.9
    test_step: float = 0.2


@dataclass(frozen=True)
class CsvSource:
    path: str
    target_column: Union[str, int] = -1
    split_column: Optional[str] = None


@dataclass(frozen=True)
class BlobSource:
    n_train: int = 38
    n_test: int = 34
    dim: int = 5
    spread: float = 0.35
    seed: int = 0


DataSource = Union[PlantParams, FunctionGridSource, CsvSource, BlobSource]


@dataclass
class ExperimentConfig:
    experiment: str
    arm: str
    kernel: KernelConfig
    train: TrainConfig
    centers: Union[GridSpec, SubtractiveSpec]
    data: DataSource
    output_dir: str = "out"
    threshold: float = 0.5
    emit_kernel_map: bool = False

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if self.arm not in ARMS:
            raise ConfigError(f"unknown arm {self.arm!r}; expected one of {sorted(ARMS)}")

    def with_arm(self, arm, output_dir=None):
        return dataclasses.replace(
            self, arm=arm, output_dir=output_dir if output_dir is not None else self.output_dir
        )


@dataclass
class RunSummary:
    arm: str
    best_mse_db: float
    best_epoch: int
    final_alpha1: float
    final_alpha2: float
    train_accuracy: Optional[float] = None
    test_accuracy: Optional[float] = None
    test_mse_db: Optional[float] = None
    wall_seconds: float = 0.0
    error: Optional[str] = None


def default_config(experiment, arm="adaptive", output_dir="out"):
    """Configuration reproducing one of the three experiments."""
    if experiment == "sysid":
        return ExperimentConfig(
            experiment, arm, KernelConfig(0.1, DEFAULT_GAMMA),
            TrainConfig(eta=1e-3, epochs=2000),
            GridSpec(-50.0, 50.0, 0.25, dim=1), PlantParams(), output_dir,
        )
    if experiment == "approx":
        return ExperimentConfig(
            experiment, arm, KernelConfig(0.2, DEFAULT_GAMMA),
            TrainConfig(eta=1e-3, epochs=10000),
            GridSpec(-1.0, 1.0, 0.2, dim=2), FunctionGridSource(), output_dir,
        )
    if experiment == "classify":
        return ExperimentConfig(
            experiment, arm, KernelConfig(0.2, DEFAULT_GAMMA),
            TrainConfig(eta=1e-3, epochs=500),
            SubtractiveSpec(influence=0.1), BlobSource(), output_dir,
        )
    raise ConfigError(f"unknown experiment {experiment!r}")


# --------------------------------------------------------------------------
# config files

def _coerce(value, like):
    if isinstance(like, bool):
        low = value.strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"not a boolean: {value!r}")
    if isinstance(like, int):
        return int(value)
    if isinstance(like, float):
        return float(value)
    if like is None:
        v = value.strip()
        if v.lower() in ("", "none"):
            return None
        try:
            return int(v)
        except ValueError:
            return v
    return value.strip()


def _apply(obj, section, exclude=()):
    kwargs = {}
    for key, value in section.items():
        if key in exclude:
            continue
        names = {f.name for f in dataclasses.fields(obj)}
        if key not in names:
            raise ConfigError(f"unknown key {key!r} in [{section.name}]")
        try:
            kwargs[key] = _coerce(value, getattr(obj, key))
        except ValueError as exc:
            raise ConfigError(f"[{section.name}] {key}: {exc}") from None
    try:
        return dataclasses.replace(obj, **kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[{section.name}]: {exc}") from None


def load_config(path, experiment):
    """Read an INI-style configuration file on top of the experiment defaults.

    Sections: ``[experiment]`` (arm, output_dir, threshold, emit_kernel_map),
    ``[kernel]``, ``[train]``, ``[centers]`` (``strategy = grid|subtractive``
    plus the spec fields) and ``[data]`` (``source = plant|grid|csv|blobs``
    plus the source fields).
    """
    parser = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from None
    return config_from_parser(parser, experiment)


def config_from_parser(parser, experiment):
    cfg = default_config(experiment)
    unknown = set(parser.sections()) - {"experiment", "kernel", "train", "centers", "data"}
    if unknown:
        raise ConfigError(f"unknown config sections: {', '.join(sorted(unknown))}")
    if parser.has_section("experiment"):
        sec = parser["experiment"]
        if "experiment" in sec and sec["experiment"].strip() != experiment:
            raise ConfigError(
                f"config is for {sec['experiment'].strip()!r}, not {experiment!r}"
            )
        allowed = {"experiment", "arm", "output_dir", "threshold", "emit_kernel_map"}
        extra = set(sec) - allowed
        if extra:
            raise ConfigError(f"unknown key(s) in [experiment]: {', '.join(sorted(extra))}")
        cfg = _apply(cfg, sec, exclude=("experiment",))
    if parser.has_section("kernel"):
        cfg.kernel = _apply(cfg.kernel, parser["kernel"])
    if parser.has_section("train"):
        cfg.train = _apply(cfg.train, parser["train"])
    if parser.has_section("centers"):
        sec = parser["centers"]
        strategy = sec.get("strategy", "").strip()
        if strategy == "grid" and not isinstance(cfg.centers, GridSpec):
            cfg.centers = GridSpec(-1.0, 1.0, 0.2, dim=1)
        elif strategy == "subtractive" and not isinstance(cfg.centers, SubtractiveSpec):
            cfg.centers = SubtractiveSpec()
        elif strategy not in ("", "grid", "subtractive"):
            raise ConfigError(f"unknown center strategy {strategy!r}")
        cfg.centers = _apply(cfg.centers, sec, exclude=("strategy",))
    if parser.has_section("data"):
        sec = parser["data"]
        source = sec.get("source", "").strip()
        templates = {
            "plant": PlantParams(), "grid": FunctionGridSource(),
            "blobs": BlobSource(), "csv": CsvSource(path=""),
        }
        if source:
            if source not in templates:
                raise ConfigError(f"unknown data source {source!r}")
            if type(cfg.data) is not type(templates[source]):
                cfg.data = templates[source]
        cfg.data = _apply(cfg.data, sec, exclude=("source",))
        if isinstance(cfg.data, CsvSource) and not cfg.data.path:
            raise ConfigError("[data] source = csv needs a path")
    return cfg


# --------------------------------------------------------------------------
# building blocks

def build_dataset(cfg):
    """Materialize the configured data source."""
    src = cfg.data
    if isinstance(src, PlantParams):
        return gen_plant_series(src)
    if isinstance(src, FunctionGridSource):
        try:
            return concat_train_test(
                gen_function_grid(src.train_lo, src.train_hi, src.train_step),
                gen_function_grid(src.test_lo, src.test_hi, src.test_step),
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    if isinstance(src, BlobSource):
        return gen_blobs(src.n_train, src.n_test, src.dim, src.spread, src.seed)
    if isinstance(src, CsvSource):
        return load_csv_dataset(src.path, src.target_column, src.split_column)
    raise ConfigError(f"unsupported data source {src!r}")


def build_centers(cfg, dataset):
    """Centers for the configured strategy; subtractive uses training rows."""
    spec = cfg.centers
    if isinstance(spec, GridSpec):
        C = uniform_grid_centers(spec)
        if C.shape[1] != dataset.n_features:
            raise ConfigError(
                f"grid has dim {C.shape[1]} but data has {dataset.n_features} features"
            )
        return C
    X, _ = dataset.train()
    if spec.max_centers is None and cfg.experiment == "classify":
        # one center per training sample, bypassing the stopping thresholds
        spec = dataclasses.replace(spec, max_centers=X.shape[0])
    return subtractive_clustering(X, spec)


def build_network(cfg, centers):
    mixing, frozen = arm_mixing(cfg.arm)
    net = RbfNetwork.zeros(centers, cfg.kernel, mixing)
    return net, dataclasses.replace(cfg.train, freeze_mixing=frozen)


def emit_kernel_map(net, dataset, centers_pair, out):
    """Write each sample's fused kernel response to two reference centers.

    Rows: ``index, label, phi_c1, phi_c2`` using the network's kernel
    settings and current mixing weights.
    """
    c = np.atleast_2d(np.asarray(centers_pair, dtype=float))
    if c.shape[0] != 2:
        raise ValueError(f"need exactly two centers, got {c.shape[0]}")
    P1 = cosine_matrix(dataset.inputs, c, net.kernel_config)
    P2 = gaussian_matrix(dataset.inputs, c, net.kernel_config)
    phi = fuse(P1, P2, net.mixing)
    rows = []
    for i in range(len(dataset)):
        t = dataset.targets[i]
        label = dataset.class_labels[int(t)] if dataset.class_labels else float(t)
        rows.append([i, label, float(phi[i, 0]), float(phi[i, 1])])
    write_csv(out, ["index", "label", "phi_c1", "phi_c2"], rows)
    return out


def _summary_rows(s):
    opt = lambda v: "" if v is None else float(v)  # noqa: E731
    return [
        s.arm, float(s.best_mse_db), s.best_epoch, float(s.final_alpha1),
        float(s.final_alpha2), opt(s.train_accuracy), opt(s.test_accuracy), opt(s.test_mse_db),
    ]


SUMMARY_HEADER = [
    "arm", "best_mse_db", "best_epoch", "final_alpha1", "final_alpha2",
    "train_accuracy", "test_accuracy", "test_mse_db",
]


def run_experiment(cfg, dataset=None, centers=None):
    """Train and evaluate one arm, writing its CSV outputs to ``cfg.output_dir``.

    ``dataset`` and ``centers`` may be passed in so that several arms share
    exactly the same realization.
    """
    start = time.perf_counter()
    if dataset is None:
        dataset = build_dataset(cfg)
    if centers is None:
        centers = build_centers(cfg, dataset)
    net, tcfg = build_network(cfg, centers)
    X_tr, y_tr = dataset.train()
    trace = train(net, X_tr, y_tr, tcfg)

    pred = predict_batch(net, dataset.inputs)
    test_idx = dataset.test_indices
    summary = RunSummary(
        arm=cfg.arm,
        best_mse_db=trace.best_mse_db,
        best_epoch=trace.best_epoch,
        final_alpha1=float(trace.alpha1[-1]),
        final_alpha2=float(trace.alpha2[-1]),
    )
    if test_idx.size:
        summary.test_mse_db = mse_db(dataset.targets[test_idx] - pred[test_idx])
    if cfg.experiment == "classify":
        tr = dataset.train_indices
        summary.train_accuracy = classification_accuracy(
            pred[tr], dataset.targets[tr], cfg.threshold)
        if test_idx.size:
            summary.test_accuracy = classification_accuracy(
                pred[test_idx], dataset.targets[test_idx], cfg.threshold)

    os.makedirs(cfg.output_dir, exist_ok=True)
    write_csv(
        os.path.join(cfg.output_dir, "trace.csv"),
        ["epoch", "mse_db", "alpha1", "alpha2"],
        ([k + 1, float(trace.mse_db[k]), float(trace.alpha1[k]), float(trace.alpha2[k])]
         for k in range(len(trace))),
    )
    names = dataset.feature_names or [f"x{i}" for i in range(dataset.n_features)]
    test_set = set(test_idx.tolist())
    write_csv(
        os.path.join(cfg.output_dir, "predictions.csv"),
        list(names) + ["target", "prediction", "subset"],
        ([*map(float, dataset.inputs[i]), float(dataset.targets[i]), float(pred[i]),
          "test" if i in test_set else "train"] for i in range(len(dataset))),
    )
    write_csv(os.path.join(cfg.output_dir, "summary.csv"), SUMMARY_HEADER,
              [_summary_rows(summary)])
    if cfg.emit_kernel_map:
        emit_kernel_map(net, dataset, class_means(dataset),
                        os.path.join(cfg.output_dir, "kernel_map.csv"))
    summary.wall_seconds = time.perf_counter() - start
    log.info("%s/%s: best %.4f dB at epoch %d, alpha=(%.4f, %.4f), %.1fs",
             cfg.experiment, cfg.arm, summary.best_mse_db, summary.best_epoch + 1,
             summary.final_alpha1, summary.final_alpha2, summary.wall_seconds)
    return summary


def _run_arm(args):
    cfg, dataset, centers = args
    try:
        return run_experiment(cfg, dataset, centers)
    except Exception as exc:  # recorded in the comparison table
        log.error("%s/%s failed: %s", cfg.experiment, cfg.arm, exc)
        return RunSummary(cfg.arm, float("nan"), -1, float("nan"), float("nan"),
                          error=f"{type(exc).__name__}: {exc}")


def run_suite(configs, output_dir=None, workers=None):
    """Run several arms of one experiment on a shared dataset and center set.

    Each arm writes into its own ``output_dir``; the comparison table
    ``comparison.csv`` goes to ``output_dir`` (default: the parent of the
    first arm's directory). Failed arms are recorded with their error
    message rather than raised.
    """
    configs = list(configs)
    if not configs:
        raise ValueError("run_suite needs at least one configuration")
    if len({c.experiment for c in configs}) != 1:
        raise ConfigError("all configurations in a suite must share the experiment")
    dataset = build_dataset(configs[0])
    centers = build_centers(configs[0], dataset)
    jobs = [(c, dataset, centers) for c in configs]
    if workers is None:
        workers = min(len(jobs), os.cpu_count() or 1)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            summaries = list(pool.map(_run_arm, jobs))
    else:
        summaries = [_run_arm(j) for j in jobs]

    if output_dir is None:
        output_dir = os.path.dirname(os.path.normpath(configs[0].output_dir)) or "."
    os.makedirs(output_dir, exist_ok=True)
    write_csv(
        os.path.join(output_dir, "comparison.csv"),
        SUMMARY_HEADER + ["status"],
        (_summary_rows(s) + ["ok" if s.error is None else s.error] for s in summaries),
    )
    return summaries


# --------------------------------------------------------------------------
# gradient check

@dataclass
class GradcheckReport:
    trials: int
    max_rel_error: float
    worst_trial: int
    tolerance: float
    rel_errors: np.ndarray = field(repr=False, default_factory=lambda: np.empty(0))

    @property
    def passed(self):
        return bool(self.max_rel_error < self.tolerance)


def instantaneous_cost(x, centers, weights, bias, d, a1, a2, config, dps=30):
    """``(d - y)^2 / 2`` for raw mixing weights ``(a1, a2)``, in ``dps`` digits.

    Written out independently of :mod:`adaptive_rbf.kernels` so that it can
    serve as a reference; the extra precision keeps central differences of
    the cost free of float64 cancellation. Returns an ``mpmath.mpf``.
    """
    with mp.workdps(dps):
        x = [mp.mpf(float(v)) for v in np.ravel(x)]
        x_norm = mp.sqrt(mp.fsum(v * v for v in x))
        a1, a2 = mp.mpf(a1), mp.mpf(a2)
        total = abs(a1) + abs(a2)
        sigma_sq = mp.mpf(config.sigma) ** 2
        y = mp.mpf(float(bias))
        for c, w in zip(np.atleast_2d(centers), np.ravel(weights)):
            c = [mp.mpf(float(v)) for v in c]
            cos = mp.fsum(p * q for p, q in zip(x, c)) / (
                x_norm * mp.sqrt(mp.fsum(v * v for v in c)) + mp.mpf(config.gamma))
            gauss = mp.exp(-mp.fsum((p - q) ** 2 for p, q in zip(x, c)) / sigma_sq)
            y += mp.mpf(float(w)) * (abs(a1) * cos + abs(a2) * gauss) / total
        return (mp.mpf(float(d)) - y) ** 2 / 2


def check_state(x, centers, weights, bias, d, state, config, step=1e-6):
    """Analytic and central-difference gradients w.r.t. the raw weights."""
    net = RbfNetwork(centers, weights, bias, config, state)
    y, kv = forward(net, x)
    analytic = alpha_gradient(d - y, net.weights, state, kv)
    a1, a2 = state.a1_raw, state.a2_raw

    def cost(p, q):
        return instantaneous_cost(x, centers, weights, bias, d, p, q, config)

    with mp.workdps(30):
        h = mp.mpf(step)
        numeric = (
            float((cost(a1 + h, a2) - cost(a1 - h, a2)) / (2 * h)),
            float((cost(a1, a2 + h) - cost(a1, a2 - h)) / (2 * h)),
        )
    return np.array(analytic), np.array(numeric)


def relative_error(analytic, numeric, atol=1e-9):
    """Componentwise relative error; pairs both below ``atol`` count as equal."""
    a = np.asarray(analytic, dtype=float)
    n = np.asarray(numeric, dtype=float)
    scale = np.maximum(np.abs(a), np.abs(n))
    out = np.zeros_like(scale)
    big = scale > atol
    out[big] = np.abs(a[big] - n[big]) / scale[big]
    return out


def random_state(rng, max_centers=8, max_inputs=4, alpha_range=(0.05, 2.0)):
    """Random small network, sample and target for gradient checking."""
    m1 = int(rng.integers(1, max_centers + 1))
    m0 = int(rng.integers(1, max_inputs + 1))
    centers = rng.uniform(-1, 1, (m1, m0))
    x = rng.uniform(-1, 1, m0)
    weights = rng.normal(size=m1)
    bias = float(rng.normal())
    d = float(rng.normal())
    mags = rng.uniform(*alpha_range, size=2)
    signs = rng.choice([-1.0, 1.0], size=2)
    state = MixingState(*(mags * signs))
    config = KernelConfig(float(rng.uniform(0.2, 2.0)), DEFAULT_GAMMA)
    return x, centers, weights, bias, d, state, config


def gradcheck(seed=0, trials=1000, step=1e-6, tolerance=1e-6):
    """Compare the analytic mixing gradient with finite differences."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rng = np.random.default_rng(seed)
    errs = np.empty(trials)
    for t in range(trials):
        args = random_state(rng)
        analytic, numeric = check_state(*args, step=step)
        errs[t] = relative_error(analytic, numeric).max()
    worst = int(np.argmax(errs))
    return GradcheckReport(trials, float(errs[worst]), worst, tolerance, errs)
