"""Two-way k-means clustering of chunk vectors and label-agnostic accuracy."""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field, replace
from typing import Hashable, Sequence

import numpy as np

MAX_ITER = 300


@dataclass(frozen=True)
class ClusterRun:
    assignments: tuple[int, ...]
    seed: int
    iterations: int
    inertia: float
    degenerate: bool = False
    accuracy: float | None = None
    inertia_history: tuple[float, ...] = field(default=(), repr=False, compare=False)


@dataclass(frozen=True)
class ClusterReport:
    accuracies: tuple[float, ...]

    @property
    def mean(self) -> float:
        return statistics.fmean(self.accuracies)

    @property
    def sd(self) -> float:
        return statistics.pstdev(self.accuracies)


def row_normalize(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    norms = np.linalg.norm(X, axis=1, keepdims=True)
    return np.divide(X, norms, out=np.zeros_like(X), where=norms > 0)


def _assign(X: np.ndarray, centers: np.ndarray) -> tuple[np.ndarray, float]:
    d = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    a = np.argmin(d, axis=1)  # ties go to cluster 0
    return a, float(d[np.arange(len(X)), a].sum())


def inertia(X, assignments: Sequence[int]) -> float:
    X = np.asarray(X, dtype=float)
    a = np.asarray(assignments)
    total = 0.0
    for c in np.unique(a):
        pts = X[a == c]
        total += float(((pts - pts.mean(axis=0)) ** 2).sum())
    return total


def kmeans2(vectors, seed: int = 0, max_iter: int = MAX_ITER, normalize: bool = True) -> ClusterRun:
    """Lloyd's algorithm with k=2 and Forgy initialisation.

    Rows are L2-normalised first (unless ``normalize`` is False). The two
    initial centres are distinct data points drawn with ``seed``. If all
    rows coincide the run is flagged degenerate with a single cluster.
    """
    X = row_normalize(vectors) if normalize else np.asarray(vectors, dtype=float)
    n = len(X)
    if n < 2:
        raise ValueError("k-means needs at least two vectors")
    rng = np.random.default_rng(seed)
    first = int(rng.integers(n))
    others = np.flatnonzero(np.any(X != X[first], axis=1))
    if len(others) == 0:
        return ClusterRun(tuple([0] * n), seed, 0, 0.0, degenerate=True)
    second = int(others[rng.integers(len(others))])
    centers = X[[first, second]].copy()
    assign, sse = _assign(X, centers)
    history = [sse]
    it = 0
    while it < max_iter:
        it += 1
        for c in (0, 1):
            members = X[assign == c]
            if len(members):
                centers[c] = members.mean(axis=0)
        new, sse = _assign(X, centers)
        history.append(sse)
        if np.array_equal(new, assign):
            break
        assign = new
    return ClusterRun(
        tuple(int(a) for a in assign),
        seed,
        it,
        inertia(X, assign),
        degenerate=len(set(assign.tolist())) < 2,
        inertia_history=tuple(history),
    )


def assignment_accuracy(assignments: Sequence[int], labels: Sequence[Hashable]) -> float:
    """Best accuracy over the two ways of naming clusters 0/1 with the two labels."""
    if len(assignments) != len(labels):
        raise ValueError(f"{len(assignments)} assignments but {len(labels)} labels")
    if not labels:
        raise ValueError("no labels")
    values = sorted(set(labels), key=str)
    if len(values) > 2:
        raise ValueError("at most two distinct labels")
    if len(values) == 1:
        zeros = sum(c == 0 for c in assignments)
        return max(zeros, len(labels) - zeros) / len(labels)
    a, b = values
    direct = sum((c == 0 and l == a) or (c != 0 and l == b) for c, l in zip(assignments, labels))
    return max(direct, len(labels) - direct) / len(labels)


def cluster_experiment(
    vectors, labels: Sequence[Hashable], runs: int = 30, base_seed: int = 0, max_iter: int = MAX_ITER
) -> tuple[ClusterReport, list[ClusterRun]]:
    """k-means from ``runs`` seeds base_seed.. base_seed+runs-1, scored against labels."""
    if runs < 1:
        raise ValueError("runs must be positive")
    X = row_normalize(vectors)
    out = []
    for s in range(base_seed, base_seed + runs):
        run = kmeans2(X, seed=s, max_iter=max_iter, normalize=False)
        out.append(replace(run, accuracy=assignment_accuracy(run.assignments, labels)))
    return ClusterReport(tuple(r.accuracy for r in out)), out
