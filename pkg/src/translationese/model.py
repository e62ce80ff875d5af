"""Core corpus types: tokens, sentences, bitext pairs, chunks and corpus statistics."""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple, Sequence

LANGUAGES = frozenset({"en", "fr", "de", "it", "es"})


class CorpusFormatError(ValueError):
    """Raised for malformed corpus files; carries the offending line number."""

    def __init__(self, message: str, lineno: int | None = None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno


class EmptyInputError(ValueError):
    pass


class Label(str, enum.Enum):
    O = "O"  # original
    T = "T"  # translated

    def __str__(self) -> str:
        return self.value


class Token(NamedTuple):
    surface: str
    tag: str | None = None


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]

    def __post_init__(self):
        if not self.tokens:
            raise ValueError("sentence must contain at least one token")
        for tok in self.tokens:
            if not tok.surface:
                raise ValueError("token surface must be non-empty")

    @classmethod
    def from_text(cls, text: str) -> "Sentence":
        """Build from pre-tokenized, whitespace-delimited text."""
        return cls(tuple(Token(w) for w in text.split()))

    @classmethod
    def from_tagged(cls, pairs: Iterable[tuple[str, str | None]]) -> "Sentence":
        return cls(tuple(Token(w, t) for w, t in pairs))

    @property
    def words(self) -> list[str]:
        return [t.surface for t in self.tokens]

    @property
    def tags(self) -> list[str | None]:
        return [t.tag for t in self.tokens]

    @property
    def text(self) -> str:
        return " ".join(t.surface for t in self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class Paragraph:
    sentences: tuple[Sentence, ...]

    def __post_init__(self):
        if not self.sentences:
            raise ValueError("paragraph must contain at least one sentence")


@dataclass(frozen=True)
class TranslationDirection:
    source_lang: str
    target_lang: str

    def __post_init__(self):
        for lang in (self.source_lang, self.target_lang):
            if lang not in LANGUAGES:
                raise ValueError(f"unsupported language code {lang!r}")
        if self.source_lang == self.target_lang:
            raise ValueError("source and target language must differ")

    @classmethod
    def parse(cls, text: str) -> "TranslationDirection":
        src, sep, tgt = text.strip().lower().partition("->")
        if not sep:
            raise ValueError(f"direction must look like 'fr->en', got {text!r}")
        return cls(src.strip(), tgt.strip())

    @property
    def languages(self) -> frozenset[str]:
        return frozenset((self.source_lang, self.target_lang))

    def __str__(self) -> str:
        return f"{self.source_lang}->{self.target_lang}"


def side_label(direction: TranslationDirection, side_lang: str) -> Label:
    """O when the text on this side is in the language the pair was originally produced in."""
    if side_lang not in direction.languages:
        raise ValueError(f"{side_lang!r} is not a side of {direction}")
    return Label.O if side_lang == direction.source_lang else Label.T


@dataclass(frozen=True)
class BitextPair:
    """A one-to-one aligned pair; ``src`` is the original, ``tgt`` its translation."""

    src: Sentence
    tgt: Sentence
    direction: TranslationDirection

    def side(self, lang: str) -> tuple[Sentence, Label]:
        """Return the sentence written in ``lang`` and its O/T label."""
        label = side_label(self.direction, lang)
        return (self.src if label is Label.O else self.tgt), label


@dataclass(frozen=True)
class AlignedCorpus:
    name: str
    pairs: tuple[BitextPair, ...]
    provenance: dict[str, str] = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if self.pairs:
            langs = self.pairs[0].direction.languages
            for i, p in enumerate(self.pairs):
                if p.direction.languages != langs:
                    raise ValueError(
                        f"pair {i} has languages {sorted(p.direction.languages)}, "
                        f"corpus uses {sorted(langs)}"
                    )

    @property
    def languages(self) -> frozenset[str]:
        return self.pairs[0].direction.languages if self.pairs else frozenset()

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self) -> Iterator[BitextPair]:
        return iter(self.pairs)

    def labeled_sentences(self, lang: str) -> list[tuple[Sentence, Label]]:
        return [p.side(lang) for p in self.pairs]


@dataclass(frozen=True)
class Chunk:
    sentences: tuple[Sentence, ...]
    label: Label

    @property
    def token_count(self) -> int:
        return sum(len(s) for s in self.sentences)

    @property
    def tokens(self) -> list[Token]:
        return [t for s in self.sentences for t in s.tokens]


@dataclass(frozen=True)
class CorpusStats:
    sentence_counts: dict[str, int]  # direction -> number of pairs
    token_counts: dict[str, int]  # "src" / "tgt"
    type_counts: dict[str, int]
    by_direction: dict[str, dict[str, int]] = field(default_factory=dict)

    @property
    def total_sentences(self) -> int:
        return sum(self.sentence_counts.values())


def corpus_stats(corpus: AlignedCorpus | Sequence[BitextPair]) -> CorpusStats:
    """Count sentences per direction, and tokens and case-sensitive types per side.

    ``by_direction`` breaks token and type counts down further, giving the
    per-original-language columns of the usual corpus statistics table.
    """
    pairs = corpus.pairs if isinstance(corpus, AlignedCorpus) else tuple(corpus)
    if not pairs:
        raise EmptyInputError("corpus_stats needs a non-empty corpus")
    sentences: Counter[str] = Counter()
    tokens = {"src": 0, "tgt": 0}
    types: dict[str, set[str]] = {"src": set(), "tgt": set()}
    per_dir: dict[str, dict] = {}
    for p in pairs:
        key = str(p.direction)
        sentences[key] += 1
        d = per_dir.setdefault(key, {"src_tokens": 0, "tgt_tokens": 0, "src": set(), "tgt": set()})
        for side, sent in (("src", p.src), ("tgt", p.tgt)):
            words = sent.words
            tokens[side] += len(words)
            types[side].update(words)
            d[f"{side}_tokens"] += len(words)
            d[side].update(words)
    by_direction = {
        k: {
            "src_tokens": d["src_tokens"],
            "tgt_tokens": d["tgt_tokens"],
            "src_types": len(d["src"]),
            "tgt_types": len(d["tgt"]),
        }
        for k, d in sorted(per_dir.items())
    }
    return CorpusStats(
        sentence_counts=dict(sorted(sentences.items())),
        token_counts=tokens,
        type_counts={k: len(v) for k, v in types.items()},
        by_direction=by_direction,
    )


# ---------------------------------------------------------------------------
# file formats


def _check_cell(text: str, lineno: int | None) -> str:
    if "\t" in text:
        raise CorpusFormatError("tab inside sentence text", lineno)
    if not text.split():
        raise CorpusFormatError("empty sentence", lineno)
    return text


def format_pair(pair: BitextPair) -> str:
    return "\t".join(
        (_check_cell(pair.src.text, None), _check_cell(pair.tgt.text, None), str(pair.direction))
    )


def parse_pair_line(line: str, lineno: int | None = None) -> BitextPair:
    cols = line.rstrip("\r\n").split("\t")
    if len(cols) != 3:
        raise CorpusFormatError(f"expected 3 tab-separated columns, got {len(cols)}", lineno)
    src, tgt, direction = cols
    try:
        d = TranslationDirection.parse(direction)
    except ValueError as exc:
        raise CorpusFormatError(str(exc), lineno) from exc
    return BitextPair(
        Sentence.from_text(_check_cell(src, lineno)),
        Sentence.from_text(_check_cell(tgt, lineno)),
        d,
    )


def write_aligned_corpus(corpus: AlignedCorpus | Iterable[BitextPair], path: str | Path) -> None:
    pairs = corpus.pairs if isinstance(corpus, AlignedCorpus) else corpus
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for p in pairs:
            fh.write(format_pair(p) + "\n")


def read_aligned_corpus(path: str | Path, name: str | None = None) -> AlignedCorpus:
    path = Path(path)
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            pairs.append(parse_pair_line(line, lineno))
    try:
        return AlignedCorpus(name or path.stem, tuple(pairs), {"path": str(path)})
    except ValueError as exc:
        raise CorpusFormatError(str(exc)) from exc


def parse_tagged(lines: Iterable[str]) -> list[Sentence]:
    """Parse ``token<TAB>TAG`` lines; blank lines separate sentences."""
    sentences: list[Sentence] = []
    current: list[Token] = []
    lineno = 0
    for lineno, line in enumerate(lines, 1):
        line = line.rstrip("\r\n")
        if not line.strip():
            if current:
                sentences.append(Sentence(tuple(current)))
                current = []
            continue
        cols = line.split("\t")
        if len(cols) != 2 or not cols[0] or not cols[1]:
            raise CorpusFormatError("expected 'token<TAB>TAG'", lineno)
        current.append(Token(cols[0], cols[1]))
    if current:
        sentences.append(Sentence(tuple(current)))
    return sentences


def read_tagged(path: str | Path) -> list[Sentence]:
    with open(path, encoding="utf-8") as fh:
        return parse_tagged(fh)


def write_tagged(sentences: Iterable[Sentence], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for sent in sentences:
            for tok in sent.tokens:
                if tok.tag is None:
                    raise ValueError(f"token {tok.surface!r} has no tag")
                fh.write(f"{tok.surface}\t{tok.tag}\n")
            fh.write("\n")


def check_tagset(sentences: Iterable[Sentence], tagset: Iterable[str]) -> None:
    allowed = set(tagset)
    for i, sent in enumerate(sentences):
        for j, tok in enumerate(sent.tokens):
            if tok.tag is not None and tok.tag not in allowed:
                raise ValueError(f"sentence {i}, token {j}: tag {tok.tag!r} not in tagset")
