"""Original-language annotation propagation and reliability filtering for Europarl bitexts.

Each English-French (or English-German) sentence pair is looked up in five
monolingual reference corpora; every corpus that contains the pair
contributes one original-language tag. Only pairs tagged by all five
corpora, unanimously, survive. Whole-line parenthetical comments such as
"(Applause)" are removed afterwards.
"""

from __future__ import annotations

import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .model import LANGUAGES, BitextPair, CorpusFormatError, Sentence, TranslationDirection

N_REFERENCE = 5

_WS = re.compile(r"\s+")


def normalize(text: str) -> str:
    return _WS.sub(" ", text).strip()


@dataclass(frozen=True)
class RawPair:
    """Sentence pair with no direction yet; ``texts`` maps language -> sentence."""

    texts: tuple[tuple[str, str], tuple[str, str]]
    paragraph: str | None = None

    @classmethod
    def of(cls, lang_a: str, text_a: str, lang_b: str, text_b: str, paragraph: str | None = None) -> "RawPair":
        if lang_a == lang_b:
            raise ValueError("a raw pair needs two different languages")
        return cls(((lang_a, text_a), (lang_b, text_b)), paragraph)

    def text(self, lang: str) -> str:
        for code, text in self.texts:
            if code == lang:
                return text
        raise KeyError(lang)

    @property
    def languages(self) -> tuple[str, str]:
        return self.texts[0][0], self.texts[1][0]


@dataclass(frozen=True)
class ReferenceCorpus:
    """A monolingual Europarl release mapping utterances to their original language.

    ``key_lang`` is the language the utterance keys are written in. For the
    English and French releases that is their own language; releases in a
    third language must be keyed through one of the pair's languages.
    """

    lang: str
    tags: Mapping[str, str]
    key_lang: str | None = None

    @property
    def match_lang(self) -> str:
        return self.key_lang or self.lang

    def lookup(self, text: str) -> str | None:
        return self.tags.get(normalize(text))


def make_reference(lang: str, rows: Iterable[tuple[str, str]], key_lang: str | None = None) -> ReferenceCorpus:
    tags = {}
    for utterance, tag in rows:
        tags[normalize(utterance)] = tag.strip().lower()
    return ReferenceCorpus(lang, tags, key_lang)


def read_reference(path, lang: str, key_lang: str | None = None) -> ReferenceCorpus:
    """Read ``utterance<TAB>original-language`` rows."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\r\n")
            if not line.strip():
                continue
            cols = line.split("\t")
            if len(cols) != 2:
                raise CorpusFormatError("expected 'utterance<TAB>language'", lineno)
            rows.append((cols[0], cols[1]))
    return make_reference(lang, rows, key_lang)


@dataclass(frozen=True)
class AnnotatedPair:
    pair: RawPair
    annotations: tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.annotations) > N_REFERENCE:
            raise ValueError(f"at most {N_REFERENCE} annotations, got {len(self.annotations)}")


def _paragraph_keys(bitext: Sequence[RawPair], lang: str) -> list[str]:
    grouped: dict[str, list[str]] = defaultdict(list)
    for p in bitext:
        if p.paragraph is not None:
            grouped[p.paragraph].append(p.text(lang))
    return [
        normalize(" ".join(grouped[p.paragraph])) if p.paragraph is not None else p.text(lang)
        for p in bitext
    ]


def propagate_annotations(
    bitext: Sequence[RawPair],
    references: Sequence[ReferenceCorpus],
    granularity: str = "sentence",
) -> list[AnnotatedPair]:
    """Collect one original-language tag per reference corpus that contains the pair.

    With ``granularity="paragraph"`` the lookup key is the whole paragraph a
    pair belongs to (pairs sharing a ``paragraph`` id, joined in order).
    """
    if len(references) > N_REFERENCE:
        raise ValueError(f"at most {N_REFERENCE} reference corpora")
    if granularity not in ("sentence", "paragraph"):
        raise ValueError(f"unknown granularity {granularity!r}")
    keys: dict[str, list[str]] = {}
    for ref in references:
        lang = ref.match_lang
        if lang not in keys:
            if granularity == "paragraph":
                keys[lang] = _paragraph_keys(bitext, lang)
            else:
                keys[lang] = [p.text(lang) for p in bitext]
    out = []
    for i, p in enumerate(bitext):
        tags = []
        for ref in references:
            tag = ref.lookup(keys[ref.match_lang][i])
            if tag is not None:
                tags.append(tag)
        out.append(AnnotatedPair(p, tuple(tags)))
    return out


@dataclass
class FilterReport:
    total: int = 0
    incomplete: int = 0
    inconsistent: int = 0
    foreign_origin: int = 0
    comments: int = 0
    kept: int = 0
    extra: dict = field(default_factory=dict)

    def fraction(self, name: str) -> float:
        return getattr(self, name) / self.total if self.total else 0.0

    def lines(self) -> list[str]:
        out = [f"total={self.total}", f"kept={self.kept}"]
        for name in ("incomplete", "inconsistent", "foreign_origin", "comments"):
            out.append(f"{name}={getattr(self, name)}")
            out.append(f"{name}_fraction={self.fraction(name):.6f}")
        return out


def _orient(pair: RawPair, origin: str) -> BitextPair:
    (la, ta), (lb, tb) = pair.texts
    if origin == la:
        return BitextPair(Sentence.from_text(ta), Sentence.from_text(tb), TranslationDirection(la, lb))
    return BitextPair(Sentence.from_text(tb), Sentence.from_text(ta), TranslationDirection(lb, la))


def filter_by_consistency(
    pairs: Sequence[AnnotatedPair], report: FilterReport | None = None
) -> tuple[list[BitextPair], float]:
    """Keep pairs with five unanimous annotations and orient them accordingly.

    Returns the survivors and the fraction of input pairs dropped for
    inconsistent annotations. Unanimous tags naming a third language (the
    pair is a translation of a translation) are dropped and counted as
    ``foreign_origin`` in the report.
    """
    report = report if report is not None else FilterReport()
    report.total = report.total or len(pairs)
    kept = []
    n_inconsistent = 0
    for ap in pairs:
        if len(ap.annotations) != N_REFERENCE:
            report.incomplete += 1
            continue
        tags = Counter(ap.annotations)
        if len(tags) != 1:
            n_inconsistent += 1
            continue
        (origin,) = tags
        if origin not in ap.pair.languages:
            report.foreign_origin += 1
            continue
        kept.append(_orient(ap.pair, origin))
    report.inconsistent += n_inconsistent
    report.kept = len(kept)
    return kept, (n_inconsistent / len(pairs) if pairs else 0.0)


def is_comment(text: str) -> bool:
    """True when the whole sentence is one parenthesised group, e.g. "(Applause)"."""
    s = text.strip()
    if len(s) < 2 or s[0] != "(" or s[-1] != ")":
        return False
    depth = 0
    for i, ch in enumerate(s):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth == 0 and i != len(s) - 1:
                return False
    return depth == 0


def strip_comments(
    pairs: Sequence[BitextPair], report: FilterReport | None = None
) -> tuple[list[BitextPair], float]:
    kept = [p for p in pairs if not (is_comment(p.src.text) or is_comment(p.tgt.text))]
    removed = len(pairs) - len(kept)
    if report is not None:
        report.comments += removed
        report.kept = len(kept)
    return kept, (removed / len(pairs) if pairs else 0.0)


def europarl_filter(
    bitext: Sequence[RawPair],
    references: Sequence[ReferenceCorpus],
    granularity: str = "sentence",
) -> tuple[list[BitextPair], FilterReport]:
    """Full pipeline; report fractions are relative to the input bitext size."""
    report = FilterReport(total=len(bitext))
    annotated = propagate_annotations(bitext, references, granularity)
    consistent, _ = filter_by_consistency(annotated, report)
    kept, _ = strip_comments(consistent, report)
    return kept, report


def read_raw_bitext(path, lang_a: str, lang_b: str) -> list[RawPair]:
    """Read ``text_a<TAB>text_b[<TAB>paragraph-id]`` rows."""
    for lang in (lang_a, lang_b):
        if lang not in LANGUAGES:
            raise ValueError(f"unsupported language code {lang!r}")
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\r\n")
            if not line.strip():
                continue
            cols = line.split("\t")
            if len(cols) not in (2, 3):
                raise CorpusFormatError("expected 2 or 3 tab-separated columns", lineno)
            para = cols[2] if len(cols) == 3 else None
            out.append(RawPair.of(lang_a, normalize(cols[0]), lang_b, normalize(cols[1]), para))
    return out
