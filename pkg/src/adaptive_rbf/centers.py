"""Center selection: uniform grids and subtractive clustering."""

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .exceptions import DataError


@dataclass(frozen=True)
class GridSpec:
    """Evenly spaced points ``lo, lo + step, ..., hi`` along ``dim`` axes."""

    lo: float
    hi: float
    step: float
    dim: int = 1

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"grid needs lo < hi, got {self.lo} >= {self.hi}")
        if not self.step > 0:
            raise ValueError(f"grid step must be positive, got {self.step}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"grid dim must be a positive integer, got {self.dim}")
        n = (self.hi - self.lo) / self.step
        if abs(n - round(n)) > 1e-9:
            raise ValueError(
                f"span {self.hi - self.lo} is not a whole number of steps of {self.step}"
            )

    @property
    def n_points(self):
        return int(round((self.hi - self.lo) / self.step)) + 1


def grid_axis(spec):
    # lo + k*step rather than np.arange: no accumulated drift, hi hit exactly
    n = spec.n_points
    axis = spec.lo + spec.step * np.arange(n, dtype=float)
    axis[-1] = spec.hi
    # snap values like 0.6000000000000001 to their shortest decimal form
    return np.round(axis, 12)


def uniform_grid_centers(spec):
    """All points of the grid as an ``(n_points ** dim, dim)`` matrix.

    Rows come out in lexicographic order.
    """
    axis = grid_axis(spec)
    return np.array(list(itertools.product(axis, repeat=spec.dim)), dtype=float)


@dataclass(frozen=True)
class SubtractiveSpec:
    """Parameters of subtractive clustering.

    ``influence`` is the neighbourhood radius on min-max normalized data.
    Setting ``max_centers`` bypasses the accept/reject thresholds and keeps
    selecting until that many centers (or every distinct data point) are
    chosen.
    """

    influence: float = 0.1
    accept_ratio: float = 0.5
    reject_ratio: float = 0.15
    squash: float = 1.5
    max_centers: Optional[int] = None

    def __post_init__(self):
        if not 0 < self.influence <= 1:
            raise ValueError(f"influence must be in (0, 1], got {self.influence}")
        if not 0 < self.accept_ratio < 1 or not 0 < self.reject_ratio < 1:
            raise ValueError("accept_ratio and reject_ratio must be in (0, 1)")
        if not self.reject_ratio < self.accept_ratio:
            raise ValueError("reject_ratio must be below accept_ratio")
        if self.max_centers is not None and self.max_centers < 1:
            raise ValueError("max_centers must be positive")


def _normalize(X):
    lo = X.min(axis=0)
    span = X.max(axis=0) - lo
    span[span == 0] = 1.0
    return (X - lo) / span


def _sq_dists(X):
    diff = X[:, np.newaxis, :] - X[np.newaxis, :, :]
    return np.sum(diff * diff, axis=-1)


def subtractive_clustering_indices(data, spec):
    """Row indices of the selected centers, in selection order."""
    X = np.asarray(data, dtype=float)
    if X.ndim == 1:
        X = X[:, np.newaxis]
    if X.shape[0] == 0:
        raise DataError("subtractive clustering needs at least one data point")
    if not np.all(np.isfinite(X)):
        raise DataError("subtractive clustering needs finite data")

    D2 = _sq_dists(_normalize(X))
    ra = spec.influence
    rb = spec.squash * ra
    alpha = 4.0 / (ra * ra)
    beta = 4.0 / (rb * rb)
    potential = np.exp(-alpha * D2).sum(axis=1)

    n = X.shape[0]
    limit = n if spec.max_centers is None else min(spec.max_centers, n)
    chosen = []
    available = np.ones(n, dtype=bool)
    first_peak = None
    while len(chosen) < limit:
        masked = np.where(available, potential, -np.inf)
        k = int(np.argmax(masked))  # argmax: ties go to the lowest row index
        peak = masked[k]
        if spec.max_centers is None:
            if first_peak is None:
                first_peak = peak
            elif peak <= 0 or peak < spec.reject_ratio * first_peak:
                break
            elif peak < spec.accept_ratio * first_peak:
                d_min = np.sqrt(D2[k, chosen].min())
                if d_min / ra + peak / first_peak < 1.0:
                    # grey zone and too close: drop this point, try the next one
                    available[k] = False
                    if not available.any():
                        break
                    continue
        chosen.append(k)
        # exact duplicates of a chosen point would give identical hidden units
        available[np.all(X == X[k], axis=1)] = False
        if not available.any():
            break
        potential = potential - peak * np.exp(-beta * D2[k])
    return np.array(chosen, dtype=int)


def subtractive_clustering(data, spec):
    """Select centers among the data points by subtractive clustering.

    Potentials are computed on per-feature min-max normalized data; the
    centers are returned in the original coordinates.
    """
    X = np.asarray(data, dtype=float)
    if X.ndim == 1:
        X = X[:, np.newaxis]
    idx = subtractive_clustering_indices(X, spec)
    return X[idx].copy()


class SubtractiveClustering(BaseEstimator):
    """Estimator wrapper around :func:`subtractive_clustering`.

    Attributes
    ----------
    cluster_centers_ : ndarray of shape (n_centers, n_features)
    center_indices_ : ndarray of shape (n_centers,)
        Row of ``X`` each center was taken from.
    """

    def __init__(self, influence=0.1, accept_ratio=0.5, reject_ratio=0.15,
                 squash=1.5, max_centers=None):
        self.influence = influence
        self.accept_ratio = accept_ratio
        self.reject_ratio = reject_ratio
        self.squash = squash
        self.max_centers = max_centers

    def fit(self, X, y=None):
        X = check_array(X)
        spec = SubtractiveSpec(
            self.influence, self.accept_ratio, self.reject_ratio,
            self.squash, self.max_centers,
        )
        self.center_indices_ = subtractive_clustering_indices(X, spec)
        self.cluster_centers_ = X[self.center_indices_].copy()
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        """Index of the nearest selected center for each row."""
        check_is_fitted(self, "cluster_centers_")
        X = check_array(X)
        d = X[:, np.newaxis, :] - self.cluster_centers_[np.newaxis, :, :]
        return np.argmin(np.sum(d * d, axis=-1), axis=1)
