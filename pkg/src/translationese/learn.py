"""Linear SVM trained by sequential minimal optimization, plus class balancing
and stratified cross-validation."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .model import Label

MODEL_FORMAT = "translationese-svm"
MODEL_VERSION = 1


def encode(labels: Sequence[Label | str]) -> np.ndarray:
    """O -> -1, T -> +1."""
    return np.array([1.0 if Label(l) is Label.T else -1.0 for l in labels])


def decode(y: float) -> Label:
    return Label.T if y > 0 else Label.O


@dataclass(frozen=True)
class SvmModel:
    weights: np.ndarray
    bias: float
    C: float
    iterations: int = 0
    gap: float = 0.0
    degenerate: bool = False
    vocabulary: tuple[str, ...] = ()
    alpha: np.ndarray | None = field(default=None, repr=False, compare=False)
    objective_history: tuple[float, ...] = field(default=(), repr=False, compare=False)

    def decision(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.shape[-1] != self.weights.shape[0]:
            raise ValueError(f"expected {self.weights.shape[0]} features, got {X.shape[-1]}")
        return X @ self.weights + self.bias

    def predict(self, X: np.ndarray) -> list[Label]:
        return [decode(f) for f in np.atleast_1d(self.decision(X))]

    def save(self, path: str | Path) -> None:
        payload = {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "vocabulary": list(self.vocabulary),
            "weights": [float(w) for w in self.weights],
            "bias": float(self.bias),
            "C": self.C,
            "meta": {"iterations": self.iterations, "gap": self.gap, "degenerate": self.degenerate},
        }
        Path(path).write_text(json.dumps(payload, indent=1), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "SvmModel":
        d = json.loads(Path(path).read_text(encoding="utf-8"))
        if d.get("format") != MODEL_FORMAT or d.get("version") != MODEL_VERSION:
            raise ValueError(f"{path}: not a version {MODEL_VERSION} {MODEL_FORMAT} file")
        meta = d.get("meta", {})
        return cls(
            np.array(d["weights"], dtype=float),
            float(d["bias"]),
            float(d["C"]),
            iterations=meta.get("iterations", 0),
            gap=meta.get("gap", 0.0),
            degenerate=meta.get("degenerate", False),
            vocabulary=tuple(d.get("vocabulary", ())),
        )


def predict(model: SvmModel, x) -> tuple[Label, float]:
    """Label and margin ``w.x + b`` for one vector; a zero margin goes to O."""
    margin = float(model.decision(np.asarray(x, dtype=float).reshape(-1)))
    return decode(margin), margin


def dual_objective(alpha: np.ndarray, y: np.ndarray, K: np.ndarray) -> float:
    """sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij"""
    v = alpha * y
    return float(alpha.sum() - 0.5 * v @ K @ v)


@dataclass
class SmoResult:
    alpha: np.ndarray
    bias: float
    iterations: int
    gap: float
    history: list[float]


def smo_solve(
    K: np.ndarray, y: np.ndarray, C: float, tol: float = 1e-3, max_iter: int = 1_000_000, record: bool = False
) -> SmoResult:
    """Solve the soft-margin SVM dual for a precomputed kernel matrix.

    Works on the minimisation form f(a) = 1/2 a'Qa - e'a with
    Q_ij = y_i y_j K_ij and gradient G = Qa - e. Each step takes the
    maximal violating pair; if that pair cannot move (zero step after
    clipping), the remaining violating partners of ``i`` are tried in order
    of violation. Stops once max_{I_up} -yG - min_{I_low} -yG <= tol,
    which bounds every example's KKT violation by tol.
    """
    n = len(y)
    alpha = np.zeros(n)
    G = -np.ones(n)
    diag = np.diag(K).copy()
    history = [0.0] if record else []
    it = 0
    gap = 0.0
    eps = 1e-12
    while it < max_iter:
        minus_yG = -y * G
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
        if not up.any() or not low.any():
            gap = 0.0
            break
        i = int(np.flatnonzero(up)[np.argmax(minus_yG[up])])
        m_up = minus_yG[i]
        low_idx = np.flatnonzero(low)
        M_low = minus_yG[low_idx].min()
        gap = float(m_up - M_low)
        if gap <= tol:
            break
        moved = False
        # candidates in order of violation; the first is the maximal violating pair
        order = low_idx[np.argsort(minus_yG[low_idx], kind="stable")]
        for j in order:
            j = int(j)
            viol = m_up - minus_yG[j]
            if viol <= 0:
                break
            if j == i:
                continue
            a = diag[i] + diag[j] - 2.0 * K[i, j]
            t = viol / max(a, eps)
            t = min(t, C - alpha[i] if y[i] > 0 else alpha[i])
            t = min(t, alpha[j] if y[j] > 0 else C - alpha[j])
            if t <= 0:
                continue
            alpha[i] += y[i] * t
            alpha[j] -= y[j] * t
            # snap to the box to keep the bound sets exact
            for k in (i, j):
                if alpha[k] < 1e-15 * C:
                    alpha[k] = 0.0
                elif alpha[k] > C * (1 - 1e-15):
                    alpha[k] = C
            G += y * t * (K[:, i] - K[:, j])
            moved = True
            break
        it += 1
        if record:
            history.append(float(alpha.sum() - 0.5 * (alpha * (G + 1)).sum()))
        if not moved:
            break
    return SmoResult(alpha, _bias(alpha, y, G, C), it, gap, history)


def _bias(alpha: np.ndarray, y: np.ndarray, G: np.ndarray, C: float) -> float:
    minus_yG = -y * G
    free = (alpha > 0) & (alpha < C)
    if free.any():
        return float(minus_yG[free].mean())
    up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
    low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
    lo = minus_yG[up].max() if up.any() else -np.inf
    hi = minus_yG[low].min() if low.any() else np.inf
    if np.isfinite(lo) and np.isfinite(hi):
        return float((lo + hi) / 2)
    return float(lo if np.isfinite(lo) else hi)


def train_smo(
    X,
    labels: Sequence[Label | str],
    C: float = 1.0,
    tol: float = 1e-3,
    vocabulary: Sequence[str] = (),
    record_history: bool = False,
    max_iter: int = 1_000_000,
) -> SvmModel:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("X must be a 2-D array")
    if not np.isfinite(X).all():
        raise ValueError("feature values must be finite")
    if C <= 0:
        raise ValueError("C must be positive")
    y = encode(labels)
    if len(y) != X.shape[0]:
        raise ValueError(f"{X.shape[0]} vectors but {len(y)} labels")
    if len(y) == 0:
        raise ValueError("no training examples")
    if len(set(y)) == 1:
        return SvmModel(np.zeros(X.shape[1]), float(y[0]), C, degenerate=True, vocabulary=tuple(vocabulary))
    K = X @ X.T
    res = smo_solve(K, y, C, tol, max_iter=max_iter, record=record_history)
    w = (res.alpha * y) @ X
    return SvmModel(
        w,
        res.bias,
        C,
        iterations=res.iterations,
        gap=res.gap,
        vocabulary=tuple(vocabulary),
        alpha=res.alpha,
        objective_history=tuple(res.history),
    )


def kkt_violations(model: SvmModel, X, labels) -> np.ndarray:
    """Per-example violation of the soft-margin KKT conditions for a trained model."""
    if model.alpha is None:
        raise ValueError("model carries no dual coefficients")
    return _kkt(model.alpha, model.bias, X, labels, model.C)


def _kkt(alpha: np.ndarray, bias: float, X, labels, C: float) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    y = encode(labels)
    w = (alpha * y) @ X
    yf = y * (X @ w + bias)
    at_zero = alpha <= 0
    at_c = alpha >= C
    free = ~at_zero & ~at_c
    v = np.zeros(len(y))
    v[at_zero] = np.maximum(0.0, 1 - yf[at_zero])
    v[at_c] = np.maximum(0.0, yf[at_c] - 1)
    v[free] = np.abs(yf[free] - 1)
    return v


# ---------------------------------------------------------------------------
# balancing and cross-validation


def balance_classes(o_items: Sequence, t_items: Sequence, seed: int = 0) -> tuple[list, list]:
    """Subsample the larger class uniformly (seeded) to the size of the smaller; order kept."""
    if not o_items or not t_items:
        raise ValueError("both classes need at least one example")
    n = min(len(o_items), len(t_items))
    rng = np.random.default_rng(seed)

    def take(items):
        if len(items) == n:
            return list(items)
        keep = np.sort(rng.choice(len(items), size=n, replace=False))
        return [items[i] for i in keep]

    return take(o_items), take(t_items)


def stratified_folds(labels: Sequence[Label | str], folds: int, seed: int = 0) -> list[np.ndarray]:
    rng = np.random.default_rng(seed)
    labels = [Label(l) for l in labels]
    assignment = np.empty(len(labels), dtype=int)
    offset = 0
    for cls in (Label.O, Label.T):
        idx = np.array([i for i, l in enumerate(labels) if l is cls], dtype=int)
        idx = idx[rng.permutation(len(idx))]
        # deal round-robin, continuing where the previous class left off
        assignment[idx] = (np.arange(len(idx)) + offset) % folds
        offset = (offset + len(idx)) % folds
    return [np.flatnonzero(assignment == f) for f in range(folds)]


@dataclass(frozen=True)
class CvReport:
    fold_accuracies: tuple[float, ...]
    confusion: dict[str, int]  # "O->O", "O->T", "T->O", "T->T" (true->predicted)

    @property
    def mean_accuracy(self) -> float:
        return float(np.mean(self.fold_accuracies))

    @property
    def total(self) -> int:
        return sum(self.confusion.values())

    def to_tsv(self) -> str:
        lines = ["fold\taccuracy"]
        lines += [f"{i + 1}\t{a:.6f}" for i, a in enumerate(self.fold_accuracies)]
        lines.append(f"mean\t{self.mean_accuracy:.6f}")
        lines += [f"confusion:{k}\t{v}" for k, v in self.confusion.items()]
        return "\n".join(lines) + "\n"

    def summary(self) -> str:
        c = self.confusion
        return (
            f"{len(self.fold_accuracies)}-fold accuracy {100 * self.mean_accuracy:.2f}% "
            f"(min {100 * min(self.fold_accuracies):.1f}, max {100 * max(self.fold_accuracies):.1f}); "
            f"O->O {c['O->O']} O->T {c['O->T']} T->O {c['T->O']} T->T {c['T->T']}"
        )


def cross_validate(
    X, labels: Sequence[Label | str], folds: int = 10, seed: int = 0, C: float = 1.0, tol: float = 1e-3
) -> CvReport:
    X = np.asarray(X, dtype=float)
    labels = [Label(l) for l in labels]
    if len(labels) < folds:
        raise ValueError(f"{len(labels)} examples is too few for {folds} folds")
    fold_idx = stratified_folds(labels, folds, seed)
    confusion = Counter({"O->O": 0, "O->T": 0, "T->O": 0, "T->T": 0})
    accs = []
    for test in fold_idx:
        train = np.setdiff1d(np.arange(len(labels)), test)
        model = train_smo(X[train], [labels[i] for i in train], C=C, tol=tol)
        pred = model.predict(X[test])
        correct = 0
        for i, p in zip(test, pred):
            confusion[f"{labels[i].value}->{p.value}"] += 1
            correct += p is labels[i]
        accs.append(correct / len(test))
    return CvReport(tuple(accs), dict(confusion))
