"""Chunking and the four feature families: function words, POS trigrams,
positional tokens and contextual function-word trigrams."""

from __future__ import annotations

import enum
import json
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .model import Chunk, Label, Sentence, Token

CHUNK_TARGET = 2000
KEEP_RATIO = 0.75
VOCAB_K = 1000


class Family(str, enum.Enum):
    FW = "FW"
    POS_TRIGRAM = "POS_TRIGRAM"
    POSITIONAL_TOKEN = "POSITIONAL_TOKEN"
    CONTEXTUAL_FW = "CONTEXTUAL_FW"

    @classmethod
    def parse(cls, name: str) -> "Family":
        key = name.strip().upper().replace("-", "_")
        aliases = {"POS": cls.POS_TRIGRAM, "POSITIONAL": cls.POSITIONAL_TOKEN, "CFW": cls.CONTEXTUAL_FW}
        return aliases.get(key) or cls(key)

    @property
    def needs_tags(self) -> bool:
        return self in (Family.POS_TRIGRAM, Family.CONTEXTUAL_FW)

    @property
    def needs_fw(self) -> bool:
        return self in (Family.FW, Family.CONTEXTUAL_FW)


class UntaggedTokenError(ValueError):
    pass


# ---------------------------------------------------------------------------
# function word lists


def parse_fw_list(lines: Iterable[str]) -> frozenset[str]:
    words = set()
    for line in lines:
        line = line.split("#", 1)[0].strip()
        if line:
            words.add(line.lower())
    return frozenset(words)


def load_fw_list(path_or_lang: str | Path) -> frozenset[str]:
    """Load a function-word list from a file, or a shipped list by language code."""
    p = str(path_or_lang)
    if p in ("en", "fr", "de"):
        text = resources.files("translationese").joinpath(f"data/fw_{p}.txt").read_text(encoding="utf-8")
        return parse_fw_list(text.splitlines())
    with open(p, encoding="utf-8") as fh:
        return parse_fw_list(fh)


# ---------------------------------------------------------------------------
# chunking


def chunk_stream(
    sentences: Iterable[Sentence], label: Label, target: int = CHUNK_TARGET, keep_ratio: float = KEEP_RATIO
) -> list[Chunk]:
    chunks = []
    buf: list[Sentence] = []
    count = 0
    for sent in sentences:
        buf.append(sent)
        count += len(sent)
        if count >= target:
            chunks.append(Chunk(tuple(buf), label))
            buf, count = [], 0
    if buf and count >= keep_ratio * target:
        chunks.append(Chunk(tuple(buf), label))
    return chunks


def chunk_corpus(
    sentences: Iterable[tuple[Sentence, Label]], target: int = CHUNK_TARGET, keep_ratio: float = KEEP_RATIO
) -> list[Chunk]:
    """Greedy whole-sentence chunking, run separately for each label.

    A chunk is closed as soon as it reaches ``target`` tokens; a trailing
    remainder is kept only if it has at least ``keep_ratio * target``
    tokens. Output lists all O chunks, then all T chunks.
    """
    if target < 1:
        raise ValueError("chunk target must be positive")
    streams: dict[Label, list[Sentence]] = {Label.O: [], Label.T: []}
    for sent, label in sentences:
        streams[Label(label)].append(sent)
    return [c for label in (Label.O, Label.T) for c in chunk_stream(streams[label], label, target, keep_ratio)]


# ---------------------------------------------------------------------------
# extractors (raw counts)


def _sentences(chunk: Chunk | Sentence | Sequence[Sentence]) -> Sequence[Sentence]:
    if isinstance(chunk, Chunk):
        return chunk.sentences
    if isinstance(chunk, Sentence):
        return (chunk,)
    return chunk


def _require_tags(sentences: Sequence[Sentence]) -> None:
    pos = 0
    for si, sent in enumerate(sentences):
        for ti, tok in enumerate(sent.tokens):
            if tok.tag is None:
                raise UntaggedTokenError(
                    f"token {tok.surface!r} at sentence {si}, position {ti} (chunk offset {pos + ti}) has no POS tag"
                )
        pos += len(sent)


def count_fw(chunk, fw_list: Iterable[str]) -> Counter[str]:
    fw = fw_list if isinstance(fw_list, (set, frozenset)) else frozenset(fw_list)
    if not fw:
        raise ValueError("function word list is empty")
    counts: Counter[str] = Counter()
    for sent in _sentences(chunk):
        for tok in sent.tokens:
            w = tok.surface.lower()
            if w in fw:
                counts[w] += 1
    return counts


def extract_pos_trigrams(chunk) -> Counter[str]:
    sentences = _sentences(chunk)
    _require_tags(sentences)
    counts: Counter[str] = Counter()
    for sent in sentences:
        tags = sent.tags
        for i in range(len(tags) - 2):
            counts[f"{tags[i]}_{tags[i + 1]}_{tags[i + 2]}"] += 1
    return counts


POSITIONS = (("first", 0), ("second", 1), ("third", 2), ("penultimate", -2), ("last", -1))


def extract_positional_tokens(chunk) -> Counter[str]:
    counts: Counter[str] = Counter()
    for sent in _sentences(chunk):
        if len(sent) < 5:
            continue
        for name, idx in POSITIONS:
            counts[f"{name}:{sent.tokens[idx].surface.lower()}"] += 1
    return counts


def extract_contextual_fw(chunk, fw_list: Iterable[str]) -> Counter[str]:
    fw = fw_list if isinstance(fw_list, (set, frozenset)) else frozenset(fw_list)
    sentences = _sentences(chunk)
    _require_tags(sentences)
    counts: Counter[str] = Counter()
    for sent in sentences:
        rendered = []
        for tok in sent.tokens:
            w = tok.surface.lower()
            rendered.append((w, True) if w in fw else (tok.tag, False))
        for i in range(len(rendered) - 2):
            window = rendered[i:i + 3]
            if sum(is_fw for _, is_fw in window) >= 2:
                counts["_".join(x for x, _ in window)] += 1
    return counts


# ---------------------------------------------------------------------------
# feature spaces and vectors


@dataclass(frozen=True)
class FeatureSpec:
    family: Family
    vocabulary: tuple[str, ...]
    fw_list: frozenset[str] = frozenset()

    def __post_init__(self):
        if len(set(self.vocabulary)) != len(self.vocabulary):
            raise ValueError("vocabulary has duplicate keys")
        if self.family.needs_fw and not self.fw_list:
            raise ValueError(f"{self.family.value} needs a function word list")

    @property
    def index(self) -> dict[str, int]:
        return {k: i for i, k in enumerate(self.vocabulary)}

    def __len__(self) -> int:
        return len(self.vocabulary)

    def to_json(self) -> dict:
        return {"family": self.family.value, "vocabulary": list(self.vocabulary), "fw_list": sorted(self.fw_list)}

    @classmethod
    def from_json(cls, d: Mapping) -> "FeatureSpec":
        return cls(Family(d["family"]), tuple(d["vocabulary"]), frozenset(d.get("fw_list", ())))


@dataclass(frozen=True)
class FeatureVector:
    values: dict[str, float]
    chunk_label: Label
    token_count: int = field(default=0, compare=False)


def raw_counts(chunk, family: Family, fw_list: Iterable[str] = ()) -> Counter[str]:
    family = Family(family)
    if family is Family.FW:
        return count_fw(chunk, fw_list)
    if family is Family.POS_TRIGRAM:
        return extract_pos_trigrams(chunk)
    if family is Family.POSITIONAL_TOKEN:
        return extract_positional_tokens(chunk)
    return extract_contextual_fw(chunk, fw_list)


def extract_fw(chunk: Chunk, fw_list: Iterable[str]) -> FeatureVector:
    n = chunk.token_count
    return FeatureVector({w: c / n for w, c in count_fw(chunk, fw_list).items()}, chunk.label, n)


def build_vocabulary(
    counts: Counter[str] | Iterable[Mapping[str, int]],
    family: Family,
    k: int = VOCAB_K,
    fw_list: Iterable[str] = (),
) -> FeatureSpec:
    """Top-``k`` keys by total frequency, ties broken lexicographically.

    The function-word family always uses the whole function-word list.
    """
    family = Family(family)
    fw = frozenset(fw_list)
    if family is Family.FW:
        return FeatureSpec(family, tuple(sorted(fw)), fw)
    if k < 1:
        raise ValueError("k must be at least 1")
    if isinstance(counts, Counter):
        total = counts
    else:
        total = Counter()
        for c in counts:
            total.update(c)
    ranked = sorted((key for key, v in total.items() if v > 0), key=lambda key: (-total[key], key))
    return FeatureSpec(family, tuple(ranked[:k]), fw)


def build_spec(chunks: Sequence[Chunk], family: Family, k: int = VOCAB_K, fw_list: Iterable[str] = ()) -> FeatureSpec:
    """Vocabulary over the whole pooled dataset (both classes)."""
    family = Family(family)
    fw = frozenset(fw_list)
    if family is Family.FW:
        return build_vocabulary(Counter(), family, k, fw)
    return build_vocabulary((raw_counts(c, family, fw) for c in chunks), family, k, fw)


def vectorize(chunks: Iterable[Chunk], spec: FeatureSpec, family: Family | None = None) -> list[FeatureVector]:
    if family is not None and Family(family) is not spec.family:
        raise ValueError(f"spec is for {spec.family.value}, not {Family(family).value}")
    vocab = set(spec.vocabulary)
    out = []
    for chunk in chunks:
        n = chunk.token_count
        counts = raw_counts(chunk, spec.family, spec.fw_list)
        out.append(FeatureVector({k: v / n for k, v in counts.items() if k in vocab}, chunk.label, n))
    return out


def to_matrix(vectors: Sequence[FeatureVector], spec: FeatureSpec) -> tuple[np.ndarray, list[Label]]:
    idx = spec.index
    X = np.zeros((len(vectors), len(spec)))
    for r, v in enumerate(vectors):
        for k, val in v.values.items():
            X[r, idx[k]] = val
    return X, [v.chunk_label for v in vectors]


def write_feature_matrix(vectors: Sequence[FeatureVector], spec: FeatureSpec, path: str | Path) -> None:
    X, labels = to_matrix(vectors, spec)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\t".join(("label",) + spec.vocabulary) + "\n")
        for label, row in zip(labels, X):
            fh.write("\t".join([label.value] + [repr(float(x)) for x in row]) + "\n")


def read_feature_matrix(path: str | Path) -> tuple[list[str], np.ndarray, list[Label]]:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if not header or header[0] != "label":
            raise ValueError("feature matrix header must start with 'label'")
        rows, labels = [], []
        for line in fh:
            if not line.strip():
                continue
            cols = line.rstrip("\n").split("\t")
            labels.append(Label(cols[0]))
            rows.append([float(x) for x in cols[1:]])
    X = np.array(rows, dtype=float).reshape(len(rows), len(header) - 1)
    return header[1:], X, labels


# ---------------------------------------------------------------------------
# chunk files (JSON lines)


def chunk_to_json(chunk: Chunk) -> str:
    return json.dumps(
        {"label": chunk.label.value, "sentences": [[[t.surface, t.tag] for t in s.tokens] for s in chunk.sentences]},
        ensure_ascii=False,
    )


def chunk_from_json(line: str) -> Chunk:
    d = json.loads(line)
    return Chunk(tuple(Sentence(tuple(Token(w, t) for w, t in s)) for s in d["sentences"]), Label(d["label"]))


def write_chunks(chunks: Iterable[Chunk], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for c in chunks:
            fh.write(chunk_to_json(c) + "\n")


def read_chunks(path: str | Path) -> list[Chunk]:
    with open(path, encoding="utf-8") as fh:
        return [chunk_from_json(line) for line in fh if line.strip()]
