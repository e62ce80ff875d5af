"""Experiment configuration and the supervised / clustering / sensitivity pipelines."""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
import math
import platform
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from .cluster import ClusterReport, cluster_experiment
from .features import (
    CHUNK_TARGET,
    VOCAB_K,
    Family,
    FeatureSpec,
    build_spec,
    chunk_corpus,
    load_fw_list,
    read_chunks,
    to_matrix,
    vectorize,
)
from .learn import CvReport, balance_classes, cross_validate
from .model import Chunk, Label, read_aligned_corpus, read_tagged
from .synthetic import generate

logger = logging.getLogger(__name__)

DEFAULT_SWEEP = (200, 400, 600, 800, 1000, 1200, 1600, 2000)


class ResourceError(OSError):
    """A configured input file is missing or unreadable."""


@dataclass
class ExperimentConfig:
    name: str = "experiment"
    source: str = "synthetic"  # synthetic | aligned | tagged | chunks
    corpus_paths: list[str] = field(default_factory=list)
    lang: str = "en"
    tagged_original: list[str] = field(default_factory=list)
    tagged_translated: list[str] = field(default_factory=list)
    chunks_path: str | None = None
    synthetic: dict[str, Any] = field(default_factory=dict)
    family: str = "FW"
    fw_list: str = "en"
    chunk_target: int = CHUNK_TARGET
    vocab_k: int = VOCAB_K
    C: float = 1.0
    tol: float = 1e-3
    folds: int = 10
    cluster_runs: int = 30
    seed: int = 0
    max_chunks: int = 1000
    sweep_sizes: list[int] = field(default_factory=lambda: list(DEFAULT_SWEEP))
    shuffle_labels: bool = False

    def __post_init__(self):
        self.family = Family.parse(self.family).value
        if self.source not in ("synthetic", "aligned", "tagged", "chunks"):
            raise ValueError(f"unknown source {self.source!r}")
        for name in ("chunk_target", "vocab_k", "C", "tol", "folds", "cluster_runs", "max_chunks"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if any(s <= 0 for s in self.sweep_sizes) or list(self.sweep_sizes) != sorted(set(self.sweep_sizes)):
            raise ValueError("sweep sizes must be positive and strictly ascending")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ResourceError(f"cannot read config {path}: {exc.strerror}") from exc
        return cls.from_dict(json.loads(text))

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


# ---------------------------------------------------------------------------
# data loading


def _need(path: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise ResourceError(f"missing resource: {path}")
    return p


def load_chunks(cfg: ExperimentConfig) -> list[Chunk]:
    if cfg.source == "chunks":
        if not cfg.chunks_path:
            raise ValueError("source 'chunks' needs chunks_path")
        return read_chunks(_need(cfg.chunks_path))
    if cfg.source == "synthetic":
        params = {"chunks_per_class": cfg.max_chunks // 2, "chunk_tokens": cfg.chunk_target, "seed": cfg.seed}
        params.update(cfg.synthetic)
        if "fw_list" in params:
            params["fw_list"] = load_fw_list(params["fw_list"])
        sentences = generate(**params).sentences
    elif cfg.source == "aligned":
        if not cfg.corpus_paths:
            raise ValueError("source 'aligned' needs corpus_paths")
        sentences = []
        for path in cfg.corpus_paths:
            sentences.extend(read_aligned_corpus(_need(path)).labeled_sentences(cfg.lang))
    else:
        if not cfg.tagged_original or not cfg.tagged_translated:
            raise ValueError("source 'tagged' needs tagged_original and tagged_translated")
        sentences = [(s, Label.O) for p in cfg.tagged_original for s in read_tagged(_need(p))]
        sentences += [(s, Label.T) for p in cfg.tagged_translated for s in read_tagged(_need(p))]
    return chunk_corpus(sentences, cfg.chunk_target)


def resolve_fw(cfg: ExperimentConfig) -> frozenset[str]:
    if not Family(cfg.family).needs_fw:
        return frozenset()
    if cfg.fw_list not in ("en", "fr", "de"):
        _need(cfg.fw_list)
    return load_fw_list(cfg.fw_list)


def shuffle_labels(chunks: Sequence[Chunk], seed: int) -> list[Chunk]:
    """Null corpus: permute the O/T labels across chunks."""
    rng = np.random.default_rng(seed)
    labels = [c.label for c in chunks]
    perm = rng.permutation(len(labels))
    return [dataclasses.replace(c, label=labels[i]) for c, i in zip(chunks, perm)]


@dataclass
class Dataset:
    X: np.ndarray
    labels: list[Label]
    spec: FeatureSpec


def prepare(cfg: ExperimentConfig, chunks: Sequence[Chunk] | None = None) -> Dataset:
    """chunk -> vectorize -> balance, capped at ``max_chunks`` in total."""
    chunks = list(chunks) if chunks is not None else load_chunks(cfg)
    if cfg.shuffle_labels:
        chunks = shuffle_labels(chunks, cfg.seed)
    spec = build_spec(chunks, Family(cfg.family), cfg.vocab_k, resolve_fw(cfg))
    vectors = vectorize(chunks, spec)
    o = [v for v in vectors if v.chunk_label is Label.O]
    t = [v for v in vectors if v.chunk_label is Label.T]
    o, t = balance_classes(o, t, cfg.seed)
    per_class = min(len(o), cfg.max_chunks // 2)
    if per_class < len(o):
        rng = np.random.default_rng(cfg.seed + 1)
        keep = np.sort(rng.choice(len(o), size=per_class, replace=False))
        o = [o[i] for i in keep]
        keep = np.sort(rng.choice(len(t), size=per_class, replace=False))
        t = [t[i] for i in keep]
    X, labels = to_matrix(o + t, spec)
    return Dataset(X, labels, spec)


# ---------------------------------------------------------------------------
# reports


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class TableRow:
    corpus: str
    family: str
    chunks: int
    accuracy: float  # percent, unrounded
    sd: float | None = None

    def rounded(self) -> int:
        return round_half_up(self.accuracy)

    def tsv(self) -> str:
        sd = "" if self.sd is None else f"{self.sd:.4f}"
        return f"{self.corpus}\t{self.family}\t{self.chunks}\t{self.accuracy:.4f}\t{sd}\t{self.rounded()}"


TABLE_HEADER = "corpus\tfeature\tchunks\taccuracy\tsd\trounded"


def run_supervised(cfg: ExperimentConfig, data: Dataset | None = None) -> tuple[CvReport, TableRow]:
    data = data or prepare(cfg)
    report = cross_validate(data.X, data.labels, folds=cfg.folds, seed=cfg.seed, C=cfg.C, tol=cfg.tol)
    return report, TableRow(cfg.name, cfg.family, len(data.labels), 100 * report.mean_accuracy)


def run_unsupervised(cfg: ExperimentConfig, data: Dataset | None = None) -> tuple[ClusterReport, TableRow]:
    data = data or prepare(cfg)
    report, _ = cluster_experiment(data.X, data.labels, runs=cfg.cluster_runs, base_seed=cfg.seed)
    return report, TableRow(cfg.name, cfg.family, len(data.labels), 100 * report.mean, 100 * report.sd)


@dataclass(frozen=True)
class SensitivityPoint:
    size: int
    supervised: float
    clustering: float
    clustering_sd: float

    def tsv(self) -> str:
        return f"{self.size}\t{self.supervised:.4f}\t{self.clustering:.4f}\t{self.clustering_sd:.4f}"


SENSITIVITY_HEADER = "chunks\tsupervised\tclustering\tclustering_sd"


def run_sensitivity(cfg: ExperimentConfig, data: Dataset | None = None) -> list[SensitivityPoint]:
    """Accuracy of both pipelines on balanced, seeded subsamples of each sweep size."""
    if data is None:
        cfg_all = dataclasses.replace(cfg, max_chunks=max(cfg.sweep_sizes))
        data = prepare(cfg_all)
    o_idx = [i for i, l in enumerate(data.labels) if l is Label.O]
    t_idx = [i for i, l in enumerate(data.labels) if l is Label.T]
    available = 2 * min(len(o_idx), len(t_idx))
    points = []
    for size in cfg.sweep_sizes:
        if size > available:
            logger.warning("skipping size %d: only %d balanced chunks available", size, available)
            continue
        rng = np.random.default_rng(cfg.seed + size)
        half = size // 2
        pick = np.concatenate([
            np.sort(rng.choice(o_idx, size=half, replace=False)),
            np.sort(rng.choice(t_idx, size=half, replace=False)),
        ])
        sub = Dataset(data.X[pick], [data.labels[i] for i in pick], data.spec)
        cv, _ = run_supervised(cfg, sub)
        cl, _ = run_unsupervised(cfg, sub)
        points.append(SensitivityPoint(size, 100 * cv.mean_accuracy, 100 * cl.mean, 100 * cl.sd))
    return points


def write_manifest(out_dir: str | Path, cfg: ExperimentConfig, command: str) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = {
        "command": command,
        "config": cfg.to_dict(),
        "config_sha256": cfg.digest(),
        "seed": cfg.seed,
        "versions": {
            "translationese": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
        },
        "created": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
    path = out / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path
