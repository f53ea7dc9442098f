"""Gaussian, cosine and adaptively fused kernels.

Everything here is stateless. The batched ``*_matrix`` helpers are the single
code path for kernel values: the scalar and per-sample functions call them
with one-row inputs so that cached kernel matrices and freshly evaluated
kernels agree bit for bit.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateMixingError

#: Raw mixing weights with magnitude below this are treated as zero.
ZERO_GUARD = 1e-12

#: Cosine denominator guard used by every experiment.
DEFAULT_GAMMA = 1e-50


@dataclass(frozen=True)
class KernelConfig:
    """Fixed kernel hyperparameters.

    Parameters
    ----------
    sigma : float
        Spread of the Gaussian kernel.
    gamma : float
        Small positive constant added to the cosine denominator.
    """

    sigma: float
    gamma: float = DEFAULT_GAMMA

    def __post_init__(self):
        if not (np.isfinite(self.sigma) and self.sigma > 0):
            raise ValueError(f"sigma must be positive, got {self.sigma!r}")
        if not (np.isfinite(self.gamma) and self.gamma > 0):
            raise ValueError(f"gamma must be positive, got {self.gamma!r}")


@dataclass(frozen=True)
class MixingState:
    """Raw (signed, unnormalized) kernel mixing weights.

    ``a1_raw`` weights the cosine kernel and ``a2_raw`` the Gaussian one.
    """

    a1_raw: float
    a2_raw: float

    def __post_init__(self):
        if abs(self.a1_raw) < ZERO_GUARD and abs(self.a2_raw) < ZERO_GUARD:
            raise DegenerateMixingError(
                f"both mixing weights are zero: ({self.a1_raw!r}, {self.a2_raw!r})"
            )
        if not (np.isfinite(self.a1_raw) and np.isfinite(self.a2_raw)):
            raise ValueError("mixing weights must be finite")

    @property
    def normalized(self):
        return normalized_weights(self)


@dataclass(frozen=True)
class KernelVector:
    """Per-center kernel responses for one input sample."""

    phi1: np.ndarray  # cosine
    phi2: np.ndarray  # gaussian
    fused: np.ndarray


def _as_2d(a, name):
    a = np.asarray(a, dtype=float)
    if a.ndim == 1:
        a = a[np.newaxis, :]
    if a.ndim != 2:
        raise ValueError(f"{name} must be a vector or a matrix, got ndim={a.ndim}")
    return a


def _check_dims(X, C):
    if X.shape[1] != C.shape[1]:
        raise ValueError(
            f"dimension mismatch: inputs have {X.shape[1]} features, "
            f"centers have {C.shape[1]}"
        )


def gaussian_matrix(X, centers, config):
    """Gaussian kernel between every row of ``X`` and every center.

    Returns an array of shape ``(n_samples, n_centers)``.
    """
    X = _as_2d(X, "X")
    C = _as_2d(centers, "centers")
    _check_dims(X, C)
    diff = X[:, np.newaxis, :] - C[np.newaxis, :, :]
    sq = np.sum(diff * diff, axis=-1)
    return np.exp(-sq / (config.sigma * config.sigma))


def cosine_matrix(X, centers, config):
    """Guarded cosine kernel between every row of ``X`` and every center."""
    X = _as_2d(X, "X")
    C = _as_2d(centers, "centers")
    _check_dims(X, C)
    dots = np.sum(X[:, np.newaxis, :] * C[np.newaxis, :, :], axis=-1)
    xn = np.sqrt(np.sum(X * X, axis=-1))
    cn = np.sqrt(np.sum(C * C, axis=-1))
    return dots / (xn[:, np.newaxis] * cn[np.newaxis, :] + config.gamma)


def gaussian_eval(x, center, config):
    """``exp(-||x - center||^2 / sigma^2)`` for a single pair of vectors."""
    x = np.asarray(x, dtype=float).ravel()
    center = np.asarray(center, dtype=float).ravel()
    if x.shape != center.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {center.shape}")
    return float(gaussian_matrix(x, center, config)[0, 0])


def cosine_eval(x, center, config):
    """``x.c / (|x||c| + gamma)`` for a single pair of vectors."""
    x = np.asarray(x, dtype=float).ravel()
    center = np.asarray(center, dtype=float).ravel()
    if x.shape != center.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {center.shape}")
    return float(cosine_matrix(x, center, config)[0, 0])


def normalized_weights(state):
    """Map raw mixing weights to ``(|a1|, |a2|) / (|a1| + |a2|)``."""
    m1 = abs(state.a1_raw)
    m2 = abs(state.a2_raw)
    if m1 < ZERO_GUARD and m2 < ZERO_GUARD:
        raise DegenerateMixingError("both mixing weights are zero")
    total = m1 + m2
    return m1 / total, m2 / total


def fuse(phi1, phi2, state):
    """Convex combination of precomputed cosine and Gaussian responses."""
    n1, n2 = normalized_weights(state)
    return n1 * phi1 + n2 * phi2


def fused_eval(x, centers, state, config):
    """Evaluate both kernels and their fusion for one input sample."""
    C = _as_2d(centers, "centers")
    x = np.asarray(x, dtype=float).ravel()
    if x.shape[0] != C.shape[1]:
        raise ValueError(
            f"dimension mismatch: input has {x.shape[0]} features, "
            f"centers have {C.shape[1]}"
        )
    phi1 = cosine_matrix(x, C, config)[0]
    phi2 = gaussian_matrix(x, C, config)[0]
    return KernelVector(phi1=phi1, phi2=phi2, fused=fuse(phi1, phi2, state))


def alpha_gradient(error, weights, state, kv):
    """Gradient of the instantaneous cost ``e^2 / 2`` w.r.t. the raw weights.

    Components whose raw weight lies inside the zero guard are reported as
    zero; the derivative is singular there.

    Returns
    -------
    (float, float)
        ``(dE/da1, dE/da2)``.
    """
    s = float(np.dot(weights, kv.phi1 - kv.phi2))
    return _alpha_grad(float(error), s, state.a1_raw, state.a2_raw)


def _alpha_grad(error, s, a1, a2):
    # s = sum_i w_i (phi1_i - phi2_i); the a2 bracket is its negation.
    # |a1||a2| / (a1 (|a1|+|a2|)^2) is evaluated as sign(a1) |a2| / (|a1|+|a2|)^2
    m1, m2 = abs(a1), abs(a2)
    total = m1 + m2
    sq = total * total
    g1 = 0.0
    g2 = 0.0
    if m1 >= ZERO_GUARD:
        g1 = -error * s * (np.copysign(1.0, a1) * m2 / sq)
    if m2 >= ZERO_GUARD:
        g2 = error * s * (np.copysign(1.0, a2) * m1 / sq)
    return g1, g2
