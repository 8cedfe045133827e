"""One-class baselines: peer group analysis, global density estimation, and
a one-class adaptation of the local outlier factor.

All three operate on the flattened feature space with Euclidean distances
(optionally z-scored) and share the train/classify shape the evaluation
harness expects.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import TooFewRows

_EPS = 1e-9


def _as_matrix(dataset) -> np.ndarray:
    X = np.asarray(dataset.rows, dtype=float)
    if X.ndim != 2:
        raise ValueError("dataset rows must be a 2-D matrix")
    return X


def _standardize_fit(X: np.ndarray):
    mu = X.mean(axis=0)
    sd = np.maximum(X.std(axis=0), _EPS)
    return mu, sd


def _pairwise_distances(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    aa = (A * A).sum(axis=1)[:, None]
    bb = (B * B).sum(axis=1)[None, :]
    sq = np.maximum(aa + bb - 2.0 * (A @ B.T), 0.0)
    return np.sqrt(sq)


def _kth_nn_distance(D: np.ndarray, k: int) -> np.ndarray:
    """Distance to the k-th nearest training point, self excluded."""
    D = D.copy()
    np.fill_diagonal(D, np.inf)
    part = np.partition(D, k - 1, axis=1)
    return part[:, k - 1]


# ---------------------------------------------------------------------------
# Peer group analysis
# ---------------------------------------------------------------------------

@dataclass
class PgaModel:
    training_points: np.ndarray
    nn_distances: np.ndarray
    alpha: float
    k: int
    cutoff: float
    mu: np.ndarray = None
    sd: np.ndarray = None


def pga_train(dataset, alpha: float = 0.1, k: int = 1,
              standardize: bool = False) -> PgaModel:
    X = _as_matrix(dataset)
    m = X.shape[0]
    if m < 2 or k >= m:
        raise TooFewRows(f"need more than {k} rows, got {m}")
    mu = sd = None
    if standardize:
        mu, sd = _standardize_fit(X)
        X = (X - mu) / sd
    D = _pairwise_distances(X, X)
    nn = _kth_nn_distance(D, k)
    # nearest-rank (1 - alpha) quantile of the training nn distances
    idx = max(0, math.ceil((1.0 - alpha) * m) - 1)
    cutoff = float(np.sort(nn)[idx])
    return PgaModel(training_points=X, nn_distances=nn, alpha=alpha, k=k,
                    cutoff=cutoff, mu=mu, sd=sd)


def pga_scores(model: PgaModel, X) -> np.ndarray:
    """k-th nearest-neighbor distance per instance; larger = more anomalous."""
    X = np.asarray(X, dtype=float)
    if model.mu is not None:
        X = (X - model.mu) / model.sd
    D = _pairwise_distances(X, model.training_points)
    part = np.partition(D, model.k - 1, axis=1)
    return part[:, model.k - 1]


def pga_classify(model: PgaModel, x):
    score = float(pga_scores(model, np.asarray(x, dtype=float)[None, :])[0])
    label = "anomalous" if score >= model.cutoff else "normal"
    return score, label


# ---------------------------------------------------------------------------
# Global density estimation
# ---------------------------------------------------------------------------

@dataclass
class GdeModel:
    training_points: np.ndarray
    radius: float
    mean_neighbors: float
    std_neighbors: float
    sign_mode: str  # "corrected" or "literal"
    mu: np.ndarray = None
    sd: np.ndarray = None


def gde_train(dataset, sign_mode: str = "corrected",
              standardize: bool = False) -> GdeModel:
    if sign_mode not in ("corrected", "literal"):
        raise ValueError(f"unknown sign mode {sign_mode!r}")
    X = _as_matrix(dataset)
    m = X.shape[0]
    if m < 2:
        raise TooFewRows(f"need at least 2 rows, got {m}")
    mu = sd = None
    if standardize:
        mu, sd = _standardize_fit(X)
        X = (X - mu) / sd
    D = _pairwise_distances(X, X)
    nn = _kth_nn_distance(D, 1)
    radius = max(2.0 * float(nn.mean()), _EPS)
    np.fill_diagonal(D, np.inf)  # self excluded from training counts
    counts = (D <= radius).sum(axis=1).astype(float)
    mean_n = float(counts.mean())
    std_n = max(float(counts.std()), _EPS)
    return GdeModel(training_points=X, radius=radius, mean_neighbors=mean_n,
                    std_neighbors=std_n, sign_mode=sign_mode, mu=mu, sd=sd)


def gde_scores(model: GdeModel, X) -> np.ndarray:
    """Exponential neighbor-count score; larger = more normal in corrected
    mode, the opposite in literal mode."""
    X = np.asarray(X, dtype=float)
    if model.mu is not None:
        X = (X - model.mu) / model.sd
    D = _pairwise_distances(X, model.training_points)
    counts = (D <= model.radius).sum(axis=1).astype(float)
    z = (counts - model.mean_neighbors) / model.std_neighbors
    if model.sign_mode == "corrected":
        return np.exp(z)
    return np.exp(-z)


def gde_classify(model: GdeModel, x):
    score = float(gde_scores(model, np.asarray(x, dtype=float)[None, :])[0])
    label = "normal" if score > 0.5 else "anomalous"
    return score, label


# ---------------------------------------------------------------------------
# One-class local outlier factor
# ---------------------------------------------------------------------------

@dataclass
class LofModel:
    training_points: np.ndarray
    min_pts: int
    k_distances: np.ndarray
    lrd: np.ndarray
    training_lof: np.ndarray
    lof_max: float
    mu: np.ndarray = None
    sd: np.ndarray = None


def lof_train(dataset, min_pts: int = 10, standardize: bool = False) -> LofModel:
    X = _as_matrix(dataset)
    m = X.shape[0]
    if m <= min_pts:
        raise TooFewRows(f"need more than min_pts={min_pts} rows, got {m}")
    mu = sd = None
    if standardize:
        mu, sd = _standardize_fit(X)
        X = (X - mu) / sd
    D = _pairwise_distances(X, X)
    np.fill_diagonal(D, np.inf)
    order = np.argsort(D, axis=1, kind="stable")
    neighbors = order[:, :min_pts]
    kdist = np.take_along_axis(D, neighbors[:, -1:], axis=1)[:, 0]
    reach = np.maximum(kdist[neighbors],
                       np.take_along_axis(D, neighbors, axis=1))
    lrd = 1.0 / np.maximum(reach.mean(axis=1), _EPS)
    lof = lrd[neighbors].mean(axis=1) / lrd
    return LofModel(training_points=X, min_pts=min_pts, k_distances=kdist,
                    lrd=lrd, training_lof=lof, lof_max=float(lof.max()),
                    mu=mu, sd=sd)


def lof_scores(model: LofModel, X) -> np.ndarray:
    """Local outlier factor per instance; larger = more anomalous."""
    X = np.asarray(X, dtype=float)
    if model.mu is not None:
        X = (X - model.mu) / model.sd
    D = _pairwise_distances(X, model.training_points)
    order = np.argsort(D, axis=1, kind="stable")
    neighbors = order[:, :model.min_pts]
    dists = np.take_along_axis(D, neighbors, axis=1)
    reach = np.maximum(model.k_distances[neighbors], dists)
    lrd_x = 1.0 / np.maximum(reach.mean(axis=1), _EPS)
    return model.lrd[neighbors].mean(axis=1) / lrd_x


def lof_classify(model: LofModel, x):
    score = float(lof_scores(model, np.asarray(x, dtype=float)[None, :])[0])
    label = "anomalous" if score >= model.lof_max else "normal"
    return score, label
