"""Parsers and segmenters for subtitles, plain-text books and Hansard records."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from typing import Collection, Iterable, Sequence

from .model import BitextPair, CorpusFormatError, Sentence, TranslationDirection

logger = logging.getLogger(__name__)


class SrtParseError(CorpusFormatError):
    pass


@dataclass(frozen=True)
class SubtitleFrame:
    index: int
    start_ms: int
    end_ms: int
    text: str

    def __post_init__(self):
        if self.index < 1:
            raise ValueError(f"frame index must be positive, got {self.index}")
        if self.start_ms < 0 or self.start_ms > self.end_ms:
            raise ValueError(f"frame {self.index}: bad time span {self.start_ms}..{self.end_ms}")

    @property
    def duration_ms(self) -> int:
        return self.end_ms - self.start_ms


@dataclass(frozen=True)
class SubtitleDocument:
    frames: tuple[SubtitleFrame, ...]
    lang: str = "en"

    def __post_init__(self):
        # overlapping frames are legal; ordering is not optional
        for prev, cur in zip(self.frames, self.frames[1:]):
            if cur.index <= prev.index:
                raise ValueError(f"frame indices out of order: {prev.index} then {cur.index}")
            if cur.start_ms < prev.start_ms:
                raise ValueError(f"frame {cur.index} starts before frame {prev.index}")

    def __len__(self) -> int:
        return len(self.frames)


_TIME = r"(\d{2,}):(\d{2}):(\d{2})[,.](\d{3})"
_TIME_LINE = re.compile(rf"^\s*{_TIME}\s*-->\s*{_TIME}(?:\s.*)?$")
_INDEX_LINE = re.compile(r"^\s*(\d+)\s*$")


def _to_ms(h: str, m: str, s: str, ms: str) -> int:
    return ((int(h) * 60 + int(m)) * 60 + int(s)) * 1000 + int(ms)


def format_timestamp(ms: int) -> str:
    h, rem = divmod(ms, 3_600_000)
    m, rem = divmod(rem, 60_000)
    s, ms = divmod(rem, 1000)
    return f"{h:02d}:{m:02d}:{s:02d},{ms:03d}"


def parse_srt(raw: str, lang: str = "en") -> SubtitleDocument:
    """Parse SubRip text. Multi-line frame text is joined with single spaces.

    Blocks consisting of an index and time line but no text are skipped.
    """
    lines = raw.lstrip("﻿").replace("\r\n", "\n").replace("\r", "\n").split("\n")
    frames: list[SubtitleFrame] = []
    i, n = 0, len(lines)
    while i < n:
        if not lines[i].strip():
            i += 1
            continue
        m = _INDEX_LINE.match(lines[i])
        if not m:
            raise SrtParseError(f"expected frame index, got {lines[i]!r}", i + 1)
        index = int(m.group(1))
        if i + 1 >= n:
            raise SrtParseError("missing time line", i + 2)
        t = _TIME_LINE.match(lines[i + 1])
        if not t:
            raise SrtParseError(f"malformed time line {lines[i + 1]!r}", i + 2)
        start, end = _to_ms(*t.groups()[:4]), _to_ms(*t.groups()[4:])
        i += 2
        text_lines = []
        while i < n and lines[i].strip():
            text_lines.append(lines[i].strip())
            i += 1
        if not text_lines:
            logger.debug("skipping empty frame %d", index)
            continue
        if frames and index <= frames[-1].index:
            raise ValueError(f"line {i}: frame index {index} follows {frames[-1].index}")
        try:
            frames.append(SubtitleFrame(index, start, end, " ".join(text_lines)))
        except ValueError as exc:
            raise SrtParseError(str(exc), i) from exc
    return SubtitleDocument(tuple(frames), lang)


def serialize_srt(doc: SubtitleDocument) -> str:
    blocks = [
        f"{f.index}\n{format_timestamp(f.start_ms)} --> {format_timestamp(f.end_ms)}\n{f.text}\n"
        for f in doc.frames
    ]
    return "\n".join(blocks)


DEFAULT_TERMINATORS = frozenset(".!?…")
CLOSERS = "\"'»”’)]"


def ends_sentence(
    text: str,
    terminators: Collection[str] = DEFAULT_TERMINATORS,
    exceptions: Collection[str] = (),
) -> bool:
    """True when text ends in a terminator, possibly followed by closing quotes/brackets."""
    stripped = text.rstrip()
    core = stripped.rstrip(CLOSERS)
    if not core or core[-1] not in terminators:
        return False
    if exceptions:
        last = core.split()[-1]
        if last in exceptions or last.lower() in exceptions:
            return False
    return True


def merge_frames_to_sentences(
    doc: SubtitleDocument,
    terminators: Collection[str] = DEFAULT_TERMINATORS,
    exceptions: Collection[str] = (),
) -> SubtitleDocument:
    """Concatenate consecutive frames until one ends on a sentence terminator.

    Merged frames are renumbered from 1; start/end come from the first and
    last frame in the group. A trailing group without a terminator is kept.
    """
    out: list[SubtitleFrame] = []
    group: list[SubtitleFrame] = []

    def flush():
        out.append(
            SubtitleFrame(
                len(out) + 1,
                group[0].start_ms,
                group[-1].end_ms,
                " ".join(f.text for f in group),
            )
        )
        group.clear()

    for frame in doc.frames:
        group.append(frame)
        if ends_sentence(frame.text, terminators, exceptions):
            flush()
    if group:
        flush()
    return SubtitleDocument(tuple(out), doc.lang)


DEFAULT_CHAPTER_PATTERNS = (
    r"(?i:chapter|chapitre|kapitel)\s+([IVXLCDM]+|\d+)\b.*",
    r"[IVXLCDM]+\.?",
)


class NoChaptersFound(ValueError):
    pass


def segment_chapters(
    book: str,
    title_patterns: Sequence[str] = DEFAULT_CHAPTER_PATTERNS,
    fallback: bool = False,
) -> list[str]:
    """Split a book at chapter-title lines.

    A line is a title if its stripped form fully matches one of the
    patterns. Text before the first title is dropped and titles are not
    part of the bodies.
    """
    if not title_patterns:
        raise ValueError("at least one chapter title pattern is required")
    patterns = [re.compile(p) for p in title_patterns]
    chapters: list[list[str]] = []
    for line in book.replace("\r\n", "\n").split("\n"):
        stripped = line.strip()
        if stripped and any(p.fullmatch(stripped) for p in patterns):
            chapters.append([])
        elif chapters:
            chapters[-1].append(line)
    if not chapters:
        if fallback:
            return [book.strip()]
        raise NoChaptersFound("no chapters found")
    return ["\n".join(body).strip() for body in chapters]


_PARA_BREAK = re.compile(r"\n(?:[ \t]*\n)+")


def split_paragraphs(chapter: str) -> list[str]:
    text = chapter.replace("\r\n", "\n").replace("\r", "\n")
    paragraphs = []
    for block in _PARA_BREAK.split(text):
        para = " ".join(line.strip() for line in block.split("\n") if line.strip())
        if para:
            paragraphs.append(para)
    return paragraphs


# ---------------------------------------------------------------------------
# Hansard

DEFAULT_HANSARD_LABELS = frozenset({"speech", "date", "speaker-name", "other-metadata"})


@dataclass(frozen=True)
class HansardRecord:
    line_type: str
    src_text: str
    tgt_text: str
    direction: TranslationDirection | None = None


def filter_hansard(
    records: Iterable[HansardRecord],
    default_direction: TranslationDirection | None = None,
    labels: Collection[str] = DEFAULT_HANSARD_LABELS,
    keep: str = "speech",
) -> list[BitextPair]:
    """Keep only speech lines, in order, as bitext pairs."""
    if keep not in labels:
        raise ValueError(f"kept label {keep!r} is not in the label set")
    pairs = []
    for rec in records:
        if rec.line_type not in labels:
            raise ValueError(f"unknown Hansard line type {rec.line_type!r}")
        if rec.line_type != keep:
            continue
        direction = rec.direction or default_direction
        if direction is None:
            raise ValueError("speech record without a direction and no default given")
        pairs.append(BitextPair(Sentence.from_text(rec.src_text), Sentence.from_text(rec.tgt_text), direction))
    return pairs


def parse_hansard(lines: Iterable[str]) -> list[HansardRecord]:
    """Read ``line_type<TAB>src<TAB>tgt[<TAB>direction]`` rows."""
    records = []
    for lineno, line in enumerate(lines, 1):
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) not in (3, 4):
            raise CorpusFormatError(f"expected 3 or 4 columns, got {len(cols)}", lineno)
        direction = TranslationDirection.parse(cols[3]) if len(cols) == 4 else None
        records.append(HansardRecord(cols[0], cols[1], cols[2], direction))
    return records
