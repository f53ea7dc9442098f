"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line (shown in the terminal summary) before
asserting. Set ``ADAPTIVE_RBF_LEUKEMIA_CSV`` to a prepared Leukemia file
(five selected genes, a class column and a train/test split column) to run
the optional real-data classification check.
"""

import dataclasses
import os
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from adaptive_rbf.centers import SubtractiveSpec, subtractive_clustering
from adaptive_rbf.experiments import (
    CsvSource,
    default_config,
    gradcheck,
    run_experiment,
    run_suite,
)
from adaptive_rbf.kernels import (
    KernelConfig,
    MixingState,
    cosine_matrix,
    fused_eval,
    gaussian_eval,
    gaussian_matrix,
)
from adaptive_rbf.network import RbfNetwork, TrainConfig, forward, train, train_step

from . import oracles
from .conftest import ACCEPTANCE_LINES

ARMS = ("cosine", "euclidean", "manual", "adaptive")


def record(criterion, checks):
    """Log one line per criterion; ``checks`` maps a description to a bool."""
    ok = all(checks.values())
    detail = "; ".join(f"{'ok' if v else 'FAILED'}: {k}" for k, v in checks.items())
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {criterion} -- {detail}")
    failed = [k for k, v in checks.items() if not v]
    assert not failed, f"{criterion}: " + "; ".join(failed)


def suite(experiment, out):
    cfgs = [default_config(experiment, arm, str(out / arm)) for arm in ARMS]
    start = time.perf_counter()
    summaries = run_suite(cfgs, output_dir=str(out))
    elapsed = time.perf_counter() - start
    by_arm = {s.arm: s for s in summaries}
    assert all(s.error is None for s in summaries), [s.error for s in summaries]
    return by_arm, elapsed


def test_c1_gradient_oracle():
    start = time.perf_counter()
    report = gradcheck(seed=0, trials=1000)
    elapsed = time.perf_counter() - start
    record("C1 gradient oracle", {
        f"max relative error {report.max_rel_error:.2e} < 1e-6": report.max_rel_error < 1e-6,
        f"runtime {elapsed:.2f}s < 5s": elapsed < 5.0,
    })


def _pure_gaussian_rbf(centers, w, b, cfg, x):
    phi = gaussian_matrix(x, centers, cfg)[0]
    return float(np.dot(w, phi)) + b


def _pure_cosine_rbf(centers, w, b, cfg, x):
    phi = cosine_matrix(x, centers, cfg)[0]
    return float(np.dot(w, phi)) + b


def _manual_fusion_trajectory(centers, cfg, X, d, eta):
    """Fixed equal-weight fusion, trained on output weights and bias only."""
    w = np.zeros(len(centers))
    b = 0.0
    for x, t in zip(X, d):
        fused = 0.5 * cosine_matrix(x, centers, cfg)[0] + 0.5 * gaussian_matrix(x, centers, cfg)[0]
        e = t - (float(np.dot(w, fused)) + b)
        w = w + (eta * e) * fused
        b = b + eta * e
    return w, b


def test_c2_reduction_equivalence():
    start = time.perf_counter()
    rng = np.random.default_rng(2)
    centers = rng.uniform(-1, 1, (10, 3))
    w = rng.normal(size=10)
    b = 0.3
    cfg = KernelConfig(0.6)
    X = rng.normal(size=(100, 3))
    d = rng.normal(size=100)

    gauss_net = RbfNetwork(centers, w, b, cfg, MixingState(0.0, 1.0))
    cos_net = RbfNetwork(centers, w, b, cfg, MixingState(1.0, 0.0))
    gauss_ok = all(forward(gauss_net, x)[0] == _pure_gaussian_rbf(centers, w, b, cfg, x) for x in X)
    cos_ok = all(forward(cos_net, x)[0] == _pure_cosine_rbf(centers, w, b, cfg, x) for x in X)

    ref_w, ref_b = _manual_fusion_trajectory(centers, cfg, X, d, 0.01)
    manual_ok = {}
    for c in (0.5, 1.0, 3.0):
        net = RbfNetwork.zeros(centers, cfg, MixingState(c, c))
        train(net, X, d, TrainConfig(eta=0.01, epochs=1, freeze_mixing=True))
        manual_ok[c] = np.array_equal(net.weights, ref_w) and net.bias == ref_b
    elapsed = time.perf_counter() - start
    record("C2 reduction equivalence", {
        "frozen (0,1) == pure Gaussian on 100 inputs": gauss_ok,
        "frozen (1,0) == pure cosine on 100 inputs": cos_ok,
        **{f"frozen ({c},{c}) trajectory == equal-weight fusion": v for c, v in manual_ok.items()},
        f"runtime {elapsed:.2f}s < 1s": elapsed < 1.0,
    })


def test_c3_function_approximation(tmp_path):
    s, elapsed = suite("approx", tmp_path)
    euc, cos, man, ada = (s[a].best_mse_db for a in ("euclidean", "cosine", "manual", "adaptive"))
    record("C3 function approximation", {
        f"euclidean best {euc:.3f} dB <= -16": euc <= -16.0,
        f"cosine best {cos:.3f} dB >= -8": cos >= -8.0,
        f"|adaptive - euclidean| = {abs(ada - euc):.3f} dB <= 1.5": abs(ada - euc) <= 1.5,
        f"manual - adaptive = {man - ada:.3f} dB >= 1": man - ada >= 1.0,
        f"final adaptive alpha2 {s['adaptive'].final_alpha2:.4f} > 0.9": s["adaptive"].final_alpha2 > 0.9,
        f"runtime {elapsed:.1f}s < 180s": elapsed < 180.0,
    })


def test_c4_system_identification(tmp_path):
    s, elapsed = suite("sysid", tmp_path)
    euc, cos, man, ada = (s[a].best_mse_db for a in ("euclidean", "cosine", "manual", "adaptive"))
    record("C4 system identification", {
        f"cosine - euclidean = {cos - euc:.3f} dB >= 5": cos - euc >= 5.0,
        f"|adaptive - euclidean| = {abs(ada - euc):.3f} dB <= 1.5": abs(ada - euc) <= 1.5,
        f"adaptive {ada:.3f} dB < manual {man:.3f} dB": ada < man,
        f"final adaptive alpha2 {s['adaptive'].final_alpha2:.4f} > 0.9": s["adaptive"].final_alpha2 > 0.9,
        f"runtime {elapsed:.1f}s < 300s": elapsed < 300.0,
    })


def test_c5_classification(tmp_path):
    s, elapsed = suite("classify", tmp_path)
    checks = {
        f"{arm} train accuracy {s[arm].train_accuracy:.4f} == 1": s[arm].train_accuracy == 1.0
        for arm in ARMS
    }
    checks[f"adaptive test {s['adaptive'].test_accuracy:.4f} >= manual test "
           f"{s['manual'].test_accuracy:.4f}"] = s["adaptive"].test_accuracy >= s["manual"].test_accuracy
    checks[f"runtime {elapsed:.1f}s < 30s"] = elapsed < 30.0
    record("C5 classification (synthetic)", checks)


@pytest.mark.skipif(not os.environ.get("ADAPTIVE_RBF_LEUKEMIA_CSV"),
                    reason="set ADAPTIVE_RBF_LEUKEMIA_CSV to the prepared Leukemia file")
def test_c5_leukemia(tmp_path):
    path = os.environ["ADAPTIVE_RBF_LEUKEMIA_CSV"]
    target = os.environ.get("ADAPTIVE_RBF_LEUKEMIA_TARGET", "class")
    split = os.environ.get("ADAPTIVE_RBF_LEUKEMIA_SPLIT", "split")
    cfg = default_config("classify", "adaptive", str(tmp_path))
    cfg.data = CsvSource(path, target, split)
    s = run_experiment(cfg)
    record("C5 classification (Leukemia)", {
        f"adaptive test accuracy {s.test_accuracy:.4f} >= 0.9412": s.test_accuracy >= 32 / 34 - 1e-12,
    })


def test_c6_one_step_oracle():
    start = time.perf_counter()
    rng = np.random.default_rng(6)
    worst = 0.0
    for _ in range(500):
        m1, m0 = int(rng.integers(1, 5)), int(rng.integers(1, 4))
        a = rng.uniform(0.05, 2, 2) * rng.choice([-1.0, 1.0], 2)
        centers = rng.uniform(-1, 1, (m1, m0))
        net = RbfNetwork(centers, rng.normal(size=m1), float(rng.normal()),
                         KernelConfig(float(rng.uniform(0.3, 2))), MixingState(*a))
        x, d, eta = rng.normal(size=m0), float(rng.normal()), float(rng.uniform(1e-3, 0.1))
        ref = oracles.train_step(centers, net.weights, net.bias, a[0], a[1], x, d, eta,
                                 net.kernel_config.sigma, net.kernel_config.gamma)
        e = train_step(net, x, d, eta)
        errs = [oracles.rel_err(e, ref[0]), oracles.rel_err(net.bias, ref[2]),
                oracles.rel_err(net.mixing.a1_raw, ref[3]), oracles.rel_err(net.mixing.a2_raw, ref[4])]
        errs += [oracles.rel_err(w, r) for w, r in zip(net.weights, ref[1])]
        worst = max(worst, max(errs))
    elapsed = time.perf_counter() - start
    record("C6 one-step oracle", {
        f"max relative error {worst:.2e} < 1e-12 over 500 instances": worst < 1e-12,
        f"runtime {elapsed:.2f}s < 1s": elapsed < 1.0,
    })


def _short(cfg, epochs):
    cfg.train = dataclasses.replace(cfg.train, epochs=epochs)
    return cfg


def test_c7_determinism(tmp_path):
    checks = {}
    for experiment, epochs in (("classify", 500), ("approx", 200), ("sysid", 200)):
        for arm in ("adaptive", "manual"):
            outs = []
            for rep in ("a", "b"):
                cfg = _short(default_config(experiment, arm, str(tmp_path / rep / experiment / arm)), epochs)
                run_experiment(cfg)
                outs.append(cfg.output_dir)
            same = all(
                open(os.path.join(outs[0], f), "rb").read() == open(os.path.join(outs[1], f), "rb").read()
                for f in ("trace.csv", "predictions.csv", "summary.csv")
            )
            checks[f"{experiment}/{arm} byte-identical"] = same
    record("C7 determinism", checks)


_C8_CHECKS = {}

raw = st.floats(-3, 3, allow_nan=False).filter(lambda a: abs(a) > 1e-6)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), raw, raw, st.floats(0.005, 0.1), st.booleans())
def _alpha_normalization_property(seed, a1, a2, eta, shuffle):
    rng = np.random.default_rng(seed)
    net = RbfNetwork.zeros(rng.uniform(-1, 1, (5, 2)), KernelConfig(0.5), MixingState(a1, a2))
    X = rng.normal(size=(12, 2))
    d = rng.normal(size=12)
    trace = train(net, X, d, TrainConfig(eta=eta, epochs=15, shuffle=shuffle, seed=seed))
    assert np.all(np.abs(trace.alpha1 + trace.alpha2 - 1.0) <= 2 * np.spacing(1.0))
    assert np.all((trace.alpha1 >= 0) & (trace.alpha1 <= 1))


@settings(max_examples=300, deadline=None)
@given(arrays(float, 3, elements=st.floats(-5, 5)), arrays(float, (4, 3), elements=st.floats(-5, 5)),
       raw, raw, st.floats(0.05, 5))
def _convexity_property(x, centers, a1, a2, sigma):
    kv = fused_eval(x, centers, MixingState(a1, a2), KernelConfig(sigma))
    lo = np.minimum(kv.phi1, kv.phi2)
    hi = np.maximum(kv.phi1, kv.phi2)
    assert np.all(kv.fused >= lo - 1e-15) and np.all(kv.fused <= hi + 1e-15)


@settings(max_examples=300, deadline=None)
@given(arrays(float, 3, elements=st.floats(-5, 5)), arrays(float, 3, elements=st.floats(-5, 5)),
       st.floats(0.3, 5))
def _gaussian_range_property(x, c, sigma):
    v = gaussian_eval(x, c, KernelConfig(sigma))
    assert 0.0 <= v <= 1.0
    # strictly positive wherever exp() does not underflow
    if np.sum((x - c) ** 2) / sigma**2 < 700:
        assert v > 0.0


@settings(max_examples=100, deadline=None)
@given(arrays(float, st.tuples(st.integers(1, 30), st.integers(1, 4)),
              elements=st.floats(-50, 50, allow_nan=False)),
       st.floats(0.05, 1.0), st.one_of(st.none(), st.integers(1, 40)))
def _subtractive_subset_property(X, influence, max_centers):
    C = subtractive_clustering(X, SubtractiveSpec(influence=influence, max_centers=max_centers))
    rows = {tuple(r) for r in X}
    assert all(tuple(c) in rows for c in C)
    assert len({tuple(c) for c in C}) == len(C)


def test_c8_invariant_suite():
    start = time.perf_counter()
    checks = {}
    for name, prop in [
        ("alpha normalization sums to 1 every epoch", _alpha_normalization_property),
        ("fused kernel within [min, max] of components", _convexity_property),
        ("Gaussian kernel in (0, 1]", _gaussian_range_property),
        ("subtractive centers are distinct data points", _subtractive_subset_property),
    ]:
        try:
            prop()
            checks[name] = True
        except AssertionError:
            checks[name] = False
    elapsed = time.perf_counter() - start
    checks[f"runtime {elapsed:.2f}s < 10s"] = elapsed < 10.0
    record("C8 invariant suite", checks)
