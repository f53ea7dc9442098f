"""Evaluation metrics used in experiment reports."""

import numpy as np

#: Returned by :func:`mse_db` when every error is exactly zero.
MSE_DB_FLOOR = -320.0


def mse_db(errors):
    """Mean squared error in decibels, ``10 log10(mean(e^2))``.

    An all-zero error vector maps to :data:`MSE_DB_FLOOR` instead of -inf.
    """
    e = np.asarray(errors, dtype=float).ravel()
    if e.size == 0:
        raise ValueError("mse_db needs at least one error value")
    mse = float(np.mean(e * e))
    if mse == 0.0:
        return MSE_DB_FLOOR
    return float(10.0 * np.log10(mse))


def classification_accuracy(predictions, targets, threshold=0.5):
    """Fraction of samples on the same side of ``threshold`` as their target."""
    p = np.asarray(predictions, dtype=float).ravel()
    t = np.asarray(targets, dtype=float).ravel()
    if p.shape != t.shape:
        raise ValueError(f"length mismatch: {p.shape[0]} predictions, {t.shape[0]} targets")
    if p.size == 0:
        raise ValueError("classification_accuracy needs at least one sample")
    return float(np.mean((p >= threshold) == (t >= threshold)))
