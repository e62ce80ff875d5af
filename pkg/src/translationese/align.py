"""Length-based sentence alignment and subtitle paragraph synchronisation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .ingest import SubtitleDocument, SubtitleFrame
from .model import BitextPair, Paragraph, Sentence, TranslationDirection

# (source sentences, target sentences) per bead kind, in DP tie-break order
KINDS: tuple[tuple[int, int], ...] = ((1, 1), (1, 0), (0, 1), (2, 1), (1, 2), (2, 2))

# Canonical Gale-Church match probabilities; the 1-0/0-1 and 2-1/1-2 masses are
# split evenly between the two orientations.
DEFAULT_PRIORS = {
    (1, 1): 0.89,
    (1, 0): 0.0099 / 2,
    (0, 1): 0.0099 / 2,
    (2, 1): 0.089 / 2,
    (1, 2): 0.089 / 2,
    (2, 2): 0.011,
}

PROB_FLOOR = 1e-12


def kind_name(kind: tuple[int, int]) -> str:
    return f"{kind[0]}-{kind[1]}"


@dataclass(frozen=True)
class AlignerConfig:
    priors: dict[tuple[int, int], float] = field(default_factory=lambda: dict(DEFAULT_PRIORS))
    c: float = 1.0
    s2: float = 6.8
    delta_ms: int = 500

    def __post_init__(self):
        unknown = set(self.priors) - set(KINDS)
        if unknown:
            raise ValueError(f"unknown bead kinds {sorted(unknown)}")
        if any(p <= 0 for p in self.priors.values()):
            raise ValueError("bead priors must be positive (drop a kind to disable it)")
        if abs(sum(self.priors.values()) - 1.0) > 1e-3:
            raise ValueError(f"bead priors sum to {sum(self.priors.values())}, expected 1")
        if self.c <= 0 or self.s2 <= 0:
            raise ValueError("length model constants must be positive")
        if self.delta_ms <= 0:
            raise ValueError("delta_ms must be positive")

    @property
    def kinds(self) -> list[tuple[int, int]]:
        return [k for k in KINDS if k in self.priors]


@dataclass(frozen=True)
class Bead:
    src_start: int
    src_end: int
    tgt_start: int
    tgt_end: int

    @property
    def kind(self) -> tuple[int, int]:
        return (self.src_end - self.src_start, self.tgt_end - self.tgt_start)

    @property
    def src_span(self) -> range:
        return range(self.src_start, self.src_end)

    @property
    def tgt_span(self) -> range:
        return range(self.tgt_start, self.tgt_end)

    def shifted(self, ds: int, dt: int) -> "Bead":
        return Bead(self.src_start + ds, self.src_end + ds, self.tgt_start + dt, self.tgt_end + dt)

    def __str__(self) -> str:
        return f"{kind_name(self.kind)}[{self.src_start}:{self.src_end}|{self.tgt_start}:{self.tgt_end}]"


def sentence_length(sent: Sentence | str) -> int:
    """Character length, counting the single spaces between tokens."""
    return len(sent if isinstance(sent, str) else sent.text)


def length_cost(len_src: int, len_tgt: int, c: float = 1.0, s2: float = 6.8) -> float:
    """-log P(match | lengths) from the two-sided normal tail of the length discrepancy."""
    mean = (len_src + len_tgt / c) / 2
    if mean <= 0:
        return 0.0
    z = (len_tgt - len_src * c) / math.sqrt(mean * s2)
    p = math.erfc(abs(z) / math.sqrt(2))
    return -math.log(max(p, PROB_FLOOR))


def bead_cost(kind: tuple[int, int], len_src: int, len_tgt: int, cfg: AlignerConfig) -> float:
    return -math.log(cfg.priors[kind]) + length_cost(len_src, len_tgt, cfg.c, cfg.s2)


def _lengths(xs: Sequence[Sentence | str | int]) -> list[int]:
    return [x if isinstance(x, int) else sentence_length(x) for x in xs]


def gale_church_lengths(
    src_lens: Sequence[int], tgt_lens: Sequence[int], cfg: AlignerConfig | None = None
) -> tuple[list[Bead], float]:
    """Minimum-cost bead tiling over raw lengths; returns (beads, total cost)."""
    cfg = cfg or AlignerConfig()
    m, n = len(src_lens), len(tgt_lens)
    ps = [0]
    for x in src_lens:
        ps.append(ps[-1] + x)
    pt = [0]
    for x in tgt_lens:
        pt.append(pt[-1] + x)
    kinds = cfg.kinds
    inf = math.inf
    cost = [[inf] * (n + 1) for _ in range(m + 1)]
    back: list[list[tuple[int, int] | None]] = [[None] * (n + 1) for _ in range(m + 1)]
    cost[0][0] = 0.0
    for i in range(m + 1):
        for j in range(n + 1):
            if i == 0 and j == 0:
                continue
            best, arg = inf, None
            for di, dj in kinds:
                pi, pj = i - di, j - dj
                if pi < 0 or pj < 0 or cost[pi][pj] == inf:
                    continue
                c = cost[pi][pj] + bead_cost((di, dj), ps[i] - ps[pi], pt[j] - pt[pj], cfg)
                if c < best:
                    best, arg = c, (di, dj)
            cost[i][j] = best
            back[i][j] = arg
    if cost[m][n] == inf:
        raise ValueError(f"no tiling of {m}x{n} with bead kinds {kinds}")
    beads = []
    i, j = m, n
    while i or j:
        di, dj = back[i][j]
        beads.append(Bead(i - di, i, j - dj, j))
        i, j = i - di, j - dj
    beads.reverse()
    return beads, cost[m][n]


def gale_church_align(
    src: Sequence[Sentence | str], tgt: Sequence[Sentence | str], cfg: AlignerConfig | None = None
) -> list[Bead]:
    beads, _ = gale_church_lengths(_lengths(src), _lengths(tgt), cfg)
    return beads


def alignment_cost(beads: Sequence[Bead], src_lens: Sequence[int], tgt_lens: Sequence[int], cfg: AlignerConfig) -> float:
    total = 0.0
    for b in beads:
        total += bead_cost(b.kind, sum(src_lens[b.src_start:b.src_end]), sum(tgt_lens[b.tgt_start:b.tgt_end]), cfg)
    return total


class ParagraphCountMismatch(ValueError):
    pass


def align_paragraph_wise(
    src_doc: Sequence[Paragraph], tgt_doc: Sequence[Paragraph], cfg: AlignerConfig | None = None
) -> list[Bead]:
    """Align sentences one paragraph pair at a time.

    Bead spans index into the flattened sentence lists of each document, so
    no bead crosses a paragraph boundary.
    """
    if len(src_doc) != len(tgt_doc):
        raise ParagraphCountMismatch(
            f"{len(src_doc)} source vs {len(tgt_doc)} target paragraphs; "
            "run paragraph alignment first"
        )
    out: list[Bead] = []
    ds = dt = 0
    for sp, tp in zip(src_doc, tgt_doc):
        out.extend(b.shifted(ds, dt) for b in gale_church_align(sp.sentences, tp.sentences, cfg))
        ds += len(sp.sentences)
        dt += len(tp.sentences)
    return out


# ---------------------------------------------------------------------------
# subtitle paragraph alignment


@dataclass(frozen=True)
class ParagraphPair:
    left: tuple[SubtitleFrame, ...]
    right: tuple[SubtitleFrame, ...]

    @property
    def paired(self) -> bool:
        return bool(self.left) and bool(self.right)

    @property
    def left_text(self) -> str:
        return " ".join(f.text for f in self.left)

    @property
    def right_text(self) -> str:
        return " ".join(f.text for f in self.right)


def subtitle_paragraph_align(
    left: SubtitleDocument | Sequence[SubtitleFrame],
    right: SubtitleDocument | Sequence[SubtitleFrame],
    cfg: AlignerConfig | None = None,
) -> list[ParagraphPair]:
    """Synchronise two sentence-merged subtitle tracks by frame end times.

    From the current frame on each side, the side whose accumulated end time
    is smaller keeps absorbing its next frame until the two end times are
    within ``delta_ms`` or either side reaches its last frame; the two
    accumulated spans are then emitted as a pair. Once one side runs out, the
    rest of the other side is emitted as a single unpaired entry.
    """
    delta = (cfg or AlignerConfig()).delta_ms
    lf = left.frames if isinstance(left, SubtitleDocument) else tuple(left)
    rf = right.frames if isinstance(right, SubtitleDocument) else tuple(right)
    nl, nr = len(lf), len(rf)
    out: list[ParagraphPair] = []
    li = ri = 0
    while True:
        if li >= nl and ri >= nr:
            break
        if li >= nl:
            out.append(ParagraphPair((), rf[ri:]))
            break
        if ri >= nr:
            out.append(ParagraphPair(lf[li:], ()))
            break
        l0, r0 = li, ri
        l_end, r_end = lf[li].end_ms, rf[ri].end_ms
        while abs(l_end - r_end) > delta and li < nl - 1 and ri < nr - 1:
            if l_end > r_end:
                ri += 1
                r_end = rf[ri].end_ms
            else:
                li += 1
                l_end = lf[li].end_ms
        out.append(ParagraphPair(lf[l0:li + 1], rf[r0:ri + 1]))
        li += 1
        ri += 1
    return out


def filter_one_to_one(
    beads: Sequence[Bead],
    src: Sequence[Sentence],
    tgt: Sequence[Sentence],
    direction: TranslationDirection,
) -> tuple[list[BitextPair], float]:
    """Keep 1-1 beads as pairs; also return the discarded fraction of beads."""
    pairs = [
        BitextPair(src[b.src_start], tgt[b.tgt_start], direction)
        for b in beads
        if b.kind == (1, 1)
    ]
    discarded = (len(beads) - len(pairs)) / len(beads) if beads else 0.0
    return pairs, discarded
