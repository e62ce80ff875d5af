import random
from collections import Counter

import pytest

from translationese.europarl import (
    AnnotatedPair,
    RawPair,
    europarl_filter,
    filter_by_consistency,
    is_comment,
    make_reference,
    propagate_annotations,
    strip_comments,
)
from translationese.model import BitextPair, Sentence, TranslationDirection

REF_LANGS = [("en", None), ("fr", None), ("de", "en"), ("it", "en"), ("es", "fr")]


def refs_from(table):
    """table: list of (raw pair, list of 5 tags or None per reference corpus)."""
    refs = []
    for r, (lang, key) in enumerate(REF_LANGS):
        rows = [(p.text(key or lang), tags[r]) for p, tags in table if tags[r] is not None]
        refs.append(make_reference(lang, rows, key))
    return refs


def raw(i, en=None, fr=None):
    return RawPair.of("en", en or f"english sentence {i} .", "fr", fr or f"phrase française {i} .")


def test_all_five_agree():
    p = raw(0)
    out = propagate_annotations([p], refs_from([(p, ["fr"] * 5)]))
    assert out[0].annotations == ("fr",) * 5
    kept, frac = filter_by_consistency(out)
    assert frac == 0
    assert kept == [BitextPair(Sentence.from_text(p.text("fr")), Sentence.from_text(p.text("en")), TranslationDirection("fr", "en"))]


def test_four_annotations():
    p = raw(0)
    out = propagate_annotations([p], refs_from([(p, ["en", "en", None, "en", "en"])]))
    assert len(out[0].annotations) == 4
    assert filter_by_consistency(out)[0] == []


def test_inconsistent_dropped():
    p = raw(0)
    ap = AnnotatedPair(p, ("fr", "fr", "fr", "fr", "de"))
    kept, frac = filter_by_consistency([ap])
    assert kept == [] and frac == 1.0


def test_whitespace_normalised_matching():
    p = raw(0, en="Hello   world .")
    ref = make_reference("en", [(" Hello world . ", "EN")])
    assert propagate_annotations([p], [ref])[0].annotations == ("en",)


def test_propagation_matches_lookup_oracle():
    rng = random.Random(1)
    pairs = [raw(i) for i in range(300)]
    table = []
    for p in pairs:
        table.append((p, [rng.choice([None, "en", "fr", "de"]) for _ in REF_LANGS]))
    refs = refs_from(table)
    got = propagate_annotations(pairs, refs)
    for (p, tags), ap in zip(table, got):
        assert Counter(ap.annotations) == Counter(t for t in tags if t is not None)


def test_paragraph_granularity():
    a = RawPair.of("en", "one .", "fr", "un .", paragraph="p1")
    b = RawPair.of("en", "two .", "fr", "deux .", paragraph="p1")
    refs = [make_reference("en", [("one . two .", "en")]), make_reference("fr", [("un . deux .", "en")])]
    out = propagate_annotations([a, b], refs, granularity="paragraph")
    assert [ap.annotations for ap in out] == [("en", "en")] * 2
    assert propagate_annotations([a, b], refs)[0].annotations == ()


@pytest.mark.parametrize(
    "text, expected",
    [("(Applause)", True), ("  (Applaudissements) ", True), ("(The sitting was closed at 8 p.m.)", True),
     ("He spoke (briefly) today.", False), ("(a) and (b)", False), ("()", True), ("(", False), ("text", False)],
)
def test_is_comment(text, expected):
    assert is_comment(text) is expected


def test_strip_comments():
    d = TranslationDirection("en", "fr")
    pairs = [
        BitextPair(Sentence.from_text("(Applause)"), Sentence.from_text("(Applaudissements)"), d),
        BitextPair(Sentence.from_text("He spoke (briefly) today ."), Sentence.from_text("Il a parlé ."), d),
        BitextPair(Sentence.from_text("Fine ."), Sentence.from_text("(Rires)"), d),
    ]
    kept, frac = strip_comments(pairs)
    assert kept == [pairs[1]]
    assert frac == 2 / 3


def test_strip_comments_random_oracle():
    rng = random.Random(2)
    d = TranslationDirection("en", "fr")
    texts = ["(Applause)", "ok .", "(a) b", "x (y)", "(Laughter)", "plain text"]
    for _ in range(100):
        pairs = [BitextPair(Sentence.from_text(rng.choice(texts)), Sentence.from_text(rng.choice(texts)), d)
                 for _ in range(rng.randint(0, 20))]
        kept, _ = strip_comments(pairs)
        oracle = [p for p in pairs if p.src.text not in ("(Applause)", "(Laughter)") and p.tgt.text not in ("(Applause)", "(Laughter)")]
        assert kept == oracle


def planted_corpus(n=20000, inconsistent=100, comments=100, incomplete=0, seed=0):
    rng = random.Random(seed)
    table = []
    kinds = ["bad"] * inconsistent + ["comment"] * comments + ["missing"] * incomplete
    kinds += ["good"] * (n - len(kinds))
    rng.shuffle(kinds)
    for i, kind in enumerate(kinds):
        origin = rng.choice(["en", "fr"])
        if kind == "comment":
            p = raw(i, en=f"( Applause {i} )", fr=f"( Applaudissements {i} )")
        else:
            p = raw(i)
        tags = [origin] * 5
        if kind == "bad":
            tags[rng.randrange(5)] = "fr" if origin == "en" else "en"
        if kind == "missing":
            tags[rng.randrange(5)] = None
        table.append((p, tags))
    return [p for p, _ in table], refs_from(table)


def test_pipeline_reports_planted_fractions():
    bitext, refs = planted_corpus()
    kept, report = europarl_filter(bitext, refs)
    assert report.fraction("inconsistent") == 0.005
    assert report.fraction("comments") == 0.005
    assert report.kept == len(kept) == 20000 - 200


def test_pipeline_idempotent():
    bitext, refs = planted_corpus(n=2000, inconsistent=10, comments=10, incomplete=30)
    kept, report = europarl_filter(bitext, refs)
    assert report.incomplete == 30
    again = [RawPair.of("en", (p.src if p.direction.source_lang == "en" else p.tgt).text,
                        "fr", (p.src if p.direction.source_lang == "fr" else p.tgt).text) for p in kept]
    kept2, report2 = europarl_filter(again, refs)
    assert kept2 == kept
    assert report2.inconsistent == report2.comments == report2.incomplete == 0


def test_foreign_origin_dropped():
    p = raw(0)
    out = propagate_annotations([p], refs_from([(p, ["de"] * 5)]))
    kept, frac = filter_by_consistency(out)
    assert kept == [] and frac == 0.0
