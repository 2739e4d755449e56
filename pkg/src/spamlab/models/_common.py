from __future__ import annotations

import numpy as np


def as_2d(X) -> np.ndarray:
    X = np.asarray(X)
    return X[None, :] if X.ndim == 1 else X


def class_log_priors(y) -> np.ndarray:
    y = np.asarray(y)
    counts = np.array([(y == 0).sum(), (y == 1).sum()], dtype=float)
    return np.log(counts / counts.sum())


def column_scale(X) -> np.ndarray:
    """Per-column maximum, with 1 for all-zero columns."""
    m = np.abs(np.asarray(X, dtype=float)).max(axis=0)
    m[m == 0] = 1.0
    return m


def standardizer(X) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=float)
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    std[std == 0] = 1.0
    return mean, std
