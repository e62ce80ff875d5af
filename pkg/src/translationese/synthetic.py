"""Synthetic original/translated token streams with a planted function-word shift.

Both classes draw tokens i.i.d. from the same Zipfian distribution over
function words, pseudo content words and a comma; sentences end with a
full stop. In the translated stream a set of frequent function words has
its probability multiplied by ``shift`` before renormalising. Every word
type carries a fixed POS tag, so all four feature families apply.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .features import load_fw_list
from .model import Label, Sentence, Token

FW_TAGS = ("DT", "IN", "PP", "CC", "MD", "RB", "WDT", "TO")
CONTENT_TAGS = ("NN", "NN", "VB", "JJ", "NNS", "VBD", "VBZ", "NP")


@dataclass(frozen=True)
class SyntheticCorpus:
    sentences: tuple[tuple[Sentence, Label], ...]
    fw_list: frozenset[str]
    shifted: tuple[str, ...]
    shift: float
    seed: int


def _zipf(n: int, s: float = 1.0) -> np.ndarray:
    w = 1.0 / np.arange(1, n + 1) ** s
    return w / w.sum()


def generate(
    chunks_per_class: int = 100,
    chunk_tokens: int = 2000,
    shift: float = 1.5,
    n_shifted: int = 20,
    seed: int = 0,
    fw_list: frozenset[str] | None = None,
    n_content: int = 3000,
    fw_mass: float = 0.45,
    sentence_len: tuple[int, int] = (8, 30),
    shift_pool: int = 40,
) -> SyntheticCorpus:
    """Generate enough labelled sentences for ``chunks_per_class`` chunks per class."""
    rng = np.random.default_rng(seed)
    fw = sorted(fw_list or load_fw_list("en"))
    order = rng.permutation(len(fw))
    fw_ranked = [fw[i] for i in order]
    shifted = tuple(fw_ranked[i] for i in sorted(rng.choice(min(shift_pool, len(fw)), size=n_shifted, replace=False)))

    words = fw_ranked + [f"w{i:04d}" for i in range(n_content)] + [","]
    tags = (
        [FW_TAGS[i % len(FW_TAGS)] for i in range(len(fw_ranked))]
        + [CONTENT_TAGS[i % len(CONTENT_TAGS)] for i in range(n_content)]
        + [","]
    )
    vocab = [Token(w, t) for w, t in zip(words, tags)]
    stop = Token(".", "SENT")

    base = np.concatenate([fw_mass * _zipf(len(fw_ranked)), (0.95 - fw_mass) * _zipf(n_content), [0.05]])
    base /= base.sum()
    translated = base.copy()
    for w in shifted:
        translated[fw_ranked.index(w)] *= shift
    translated /= translated.sum()

    # headroom so the greedy chunker never runs short
    budget = chunks_per_class * (chunk_tokens + sentence_len[1]) + chunk_tokens
    out: list[tuple[Sentence, Label]] = []
    for label, p in ((Label.O, base), (Label.T, translated)):
        lengths = []
        total = 0
        while total < budget:
            k = int(rng.integers(sentence_len[0], sentence_len[1] + 1))
            lengths.append(k)
            total += k
        ids = rng.choice(len(vocab), size=total - len(lengths), p=p)
        pos = 0
        for k in lengths:
            body = tuple(vocab[i] for i in ids[pos:pos + k - 1])
            pos += k - 1
            out.append((Sentence(body + (stop,)), label))
    return SyntheticCorpus(tuple(out), frozenset(fw), shifted, shift, seed)
