"""Command-line entry point: one subcommand per corpus-building or experiment stage.

Exit status is 0 on success, 1 on validation errors and 2 on missing or
unreadable resources. Tables go to stdout or files as UTF-8 TSV;
diagnostics (``key=value`` lines) go to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .align import AlignerConfig, align_paragraph_wise, filter_one_to_one, gale_church_align, subtitle_paragraph_align
from .europarl import europarl_filter, read_raw_bitext, read_reference
from .experiments import (
    SENSITIVITY_HEADER,
    TABLE_HEADER,
    ExperimentConfig,
    ResourceError,
    run_sensitivity,
    run_supervised,
    run_unsupervised,
    write_manifest,
)
from .features import (
    Family,
    build_spec,
    chunk_corpus,
    load_fw_list,
    read_chunks,
    vectorize,
    write_chunks,
    write_feature_matrix,
)
from .ingest import (
    DEFAULT_CHAPTER_PATTERNS,
    DEFAULT_TERMINATORS,
    filter_hansard,
    merge_frames_to_sentences,
    parse_hansard,
    parse_srt,
    segment_chapters,
    serialize_srt,
    split_paragraphs,
)
from .model import (
    Label,
    Paragraph,
    Sentence,
    TranslationDirection,
    corpus_stats,
    format_pair,
    read_aligned_corpus,
    read_tagged,
    write_aligned_corpus,
    write_tagged,
)
from .synthetic import generate

logger = logging.getLogger("translationese")


def diag(**kv) -> None:
    for k, v in kv.items():
        if isinstance(v, float):
            v = f"{v:.6f}"
        print(f"{k}={v}", file=sys.stderr)


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise ResourceError(f"missing resource: {path}") from exc


def _open_out(path: str | None):
    if path in (None, "-"):
        return sys.stdout
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    return open(path, "w", encoding="utf-8", newline="\n")


def _emit(text: str, path: str | None) -> None:
    fh = _open_out(path)
    try:
        fh.write(text)
    finally:
        if fh is not sys.stdout:
            fh.close()


# ---------------------------------------------------------------------------
# ingest


def cmd_ingest(args) -> None:
    if args.kind == "srt":
        doc = parse_srt(_read_text(args.input), args.lang)
        n_in = len(doc)
        if args.merge:
            terminators = set(args.terminators) if args.terminators else DEFAULT_TERMINATORS
            exceptions = set(args.exception or ())
            doc = merge_frames_to_sentences(doc, terminators, exceptions)
        _emit(serialize_srt(doc), args.output)
        diag(frames_in=n_in, frames_out=len(doc))
    elif args.kind == "book":
        chapters = segment_chapters(_read_text(args.input), args.pattern or DEFAULT_CHAPTER_PATTERNS, args.fallback)
        lines = ["chapter\tparagraph\ttext"]
        for ci, chapter in enumerate(chapters, 1):
            for pi, para in enumerate(split_paragraphs(chapter), 1):
                lines.append(f"{ci}\t{pi}\t{para}")
        _emit("\n".join(lines) + "\n", args.output)
        diag(chapters=len(chapters), paragraphs=len(lines) - 1)
    else:
        records = parse_hansard(_read_text(args.input).splitlines())
        direction = TranslationDirection.parse(args.direction) if args.direction else None
        labels = set(args.labels.split(",")) if args.labels else None
        kwargs = {"labels": labels} if labels else {}
        pairs = filter_hansard(records, direction, **kwargs)
        _write_pairs(pairs, args.output)
        eliminated = (len(records) - len(pairs)) / len(records) if records else 0.0
        diag(records=len(records), kept=len(pairs), eliminated_fraction=eliminated)


# ---------------------------------------------------------------------------
# align


def _read_paragraph_file(path: str) -> list[Paragraph]:
    """One pre-tokenized sentence per line; blank lines separate paragraphs."""
    paragraphs = []
    current: list[Sentence] = []
    for line in _read_text(path).splitlines():
        if line.strip():
            current.append(Sentence.from_text(line))
        elif current:
            paragraphs.append(Paragraph(tuple(current)))
            current = []
    if current:
        paragraphs.append(Paragraph(tuple(current)))
    return paragraphs


def cmd_align(args) -> None:
    cfg = AlignerConfig(delta_ms=args.delta)
    direction = TranslationDirection.parse(args.direction)
    pairs = []
    n_beads = n_dropped = 0
    if args.kind == "sentences":
        src_doc, tgt_doc = _read_paragraph_file(args.src), _read_paragraph_file(args.tgt)
        beads = align_paragraph_wise(src_doc, tgt_doc, cfg)
        src = [s for p in src_doc for s in p.sentences]
        tgt = [s for p in tgt_doc for s in p.sentences]
        pairs, frac = filter_one_to_one(beads, src, tgt, direction)
        n_beads = len(beads)
    else:
        terminators = set(args.terminators) if args.terminators else DEFAULT_TERMINATORS
        left = merge_frames_to_sentences(parse_srt(_read_text(args.src), direction.source_lang), terminators)
        right = merge_frames_to_sentences(parse_srt(_read_text(args.tgt), direction.target_lang), terminators)
        paragraphs = subtitle_paragraph_align(left, right, cfg)
        for pp in paragraphs:
            if not pp.paired:
                n_dropped += 1
                continue
            src = [Sentence.from_text(f.text) for f in pp.left if f.text.split()]
            tgt = [Sentence.from_text(f.text) for f in pp.right if f.text.split()]
            beads = gale_church_align(src, tgt, cfg)
            kept, _ = filter_one_to_one(beads, src, tgt, direction)
            pairs.extend(kept)
            n_beads += len(beads)
        frac = (n_beads - len(pairs)) / n_beads if n_beads else 0.0
        diag(paragraph_pairs=len(paragraphs), unpaired_remainders=n_dropped)
    _write_pairs(pairs, args.output)
    diag(beads=n_beads, pairs=len(pairs), discarded_fraction=frac)


def _write_pairs(pairs, path: str | None) -> None:
    if path in (None, "-"):
        _emit("".join(format_pair(p) + "\n" for p in pairs), None)
    else:
        write_aligned_corpus(pairs, path)


# ---------------------------------------------------------------------------
# europarl


def cmd_europarl(args) -> None:
    lang_a, lang_b = args.langs
    bitext = read_raw_bitext(_need_file(args.bitext), lang_a, lang_b)
    refs = []
    for spec in args.ref:
        head, sep, path = spec.partition("=")
        if not sep:
            raise ValueError(f"--ref must look like LANG[@KEYLANG]=PATH, got {spec!r}")
        lang, _, key_lang = head.partition("@")
        refs.append(read_reference(_need_file(path), lang, key_lang or None))
    pairs, report = europarl_filter(bitext, refs, args.granularity)
    _write_pairs(pairs, args.output)
    for line in report.lines():
        print(line, file=sys.stderr)


def _need_file(path: str) -> str:
    if not Path(path).is_file():
        raise ResourceError(f"missing resource: {path}")
    return path


# ---------------------------------------------------------------------------
# chunking and features


def cmd_chunk(args) -> None:
    sentences = []
    for path in args.corpus or ():
        sentences.extend(read_aligned_corpus(_need_file(path)).labeled_sentences(args.lang))
    for path in args.original or ():
        sentences.extend((s, Label.O) for s in read_tagged(_need_file(path)))
    for path in args.translated or ():
        sentences.extend((s, Label.T) for s in read_tagged(_need_file(path)))
    if not sentences:
        raise ValueError("no input sentences; give --corpus or --original/--translated")
    chunks = chunk_corpus(sentences, args.target)
    write_chunks(chunks, args.output)
    n_o = sum(c.label is Label.O for c in chunks)
    diag(chunks=len(chunks), original=n_o, translated=len(chunks) - n_o)


def cmd_features(args) -> None:
    chunks = read_chunks(_need_file(args.chunks))
    family = Family.parse(args.family)
    fw = load_fw_list(args.fw if args.fw in ("en", "fr", "de") else _need_file(args.fw)) if family.needs_fw else ()
    spec = build_spec(chunks, family, args.k, fw)
    write_feature_matrix(vectorize(chunks, spec), spec, args.output)
    if args.spec_out:
        Path(args.spec_out).write_text(json.dumps(spec.to_json(), ensure_ascii=False), encoding="utf-8")
    diag(chunks=len(chunks), features=len(spec))


# ---------------------------------------------------------------------------
# experiments


def _config(args) -> ExperimentConfig:
    base = ExperimentConfig.load(args.config).to_dict() if args.config else {}
    overrides = {
        "name": args.name,
        "family": args.family,
        "seed": args.seed,
        "C": args.C,
        "folds": args.folds,
        "cluster_runs": args.runs,
        "max_chunks": args.max_chunks,
        "sweep_sizes": args.sizes,
        "fw_list": args.fw,
    }
    base.update({k: v for k, v in overrides.items() if v is not None})
    if args.null:
        base["shuffle_labels"] = True
    return ExperimentConfig.from_dict(base)


def _write_results(args, cfg, command: str, header: str, rows: list[str]) -> None:
    text = header + "\n" + "".join(r + "\n" for r in rows)
    if args.out:
        out = Path(args.out)
        write_manifest(out, cfg, command)
        (out / f"{command}.tsv").write_text(text, encoding="utf-8")
    sys.stdout.write(text)


def cmd_supervised(args) -> None:
    cfg = _config(args)
    report, row = run_supervised(cfg)
    print(report.summary(), file=sys.stderr)
    _write_results(args, cfg, "supervised", TABLE_HEADER, [row.tsv()])
    if args.out:
        (Path(args.out) / "cv_report.tsv").write_text(report.to_tsv(), encoding="utf-8")


def cmd_unsupervised(args) -> None:
    cfg = _config(args)
    report, row = run_unsupervised(cfg)
    diag(mean=report.mean, sd=report.sd, runs=len(report.accuracies))
    _write_results(args, cfg, "unsupervised", TABLE_HEADER, [row.tsv()])


def cmd_sensitivity(args) -> None:
    cfg = _config(args)
    points = run_sensitivity(cfg)
    _write_results(args, cfg, "sensitivity", SENSITIVITY_HEADER, [p.tsv() for p in points])


def cmd_stats(args) -> None:
    lines = ["corpus\tdirection\tsentences\tsrc_tokens\ttgt_tokens\tsrc_types\ttgt_types"]
    for path in args.corpus:
        corpus = read_aligned_corpus(_need_file(path))
        st = corpus_stats(corpus)
        for d, n in st.sentence_counts.items():
            b = st.by_direction[d]
            lines.append(
                f"{corpus.name}\t{d}\t{n}\t{b['src_tokens']}\t{b['tgt_tokens']}\t{b['src_types']}\t{b['tgt_types']}"
            )
        lines.append(
            f"{corpus.name}\ttotal\t{st.total_sentences}\t{st.token_counts['src']}\t{st.token_counts['tgt']}"
            f"\t{st.type_counts['src']}\t{st.type_counts['tgt']}"
        )
    _emit("\n".join(lines) + "\n", args.output)


def cmd_synth(args) -> None:
    sc = generate(args.chunks_per_class, seed=args.seed, shift=args.shift)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_tagged([s for s, l in sc.sentences if l is Label.O], out / "original.tagged")
    write_tagged([s for s, l in sc.sentences if l is Label.T], out / "translated.tagged")
    (out / "shifted_fw.txt").write_text("\n".join(sc.shifted) + "\n", encoding="utf-8")
    diag(sentences=len(sc.sentences), shifted=",".join(sc.shifted))


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="translationese", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("ingest", help="parse subtitles, books or Hansard records")
    s.add_argument("kind", choices=("srt", "book", "hansard"))
    s.add_argument("input")
    s.add_argument("-o", "--output")
    s.add_argument("--lang", default="en")
    s.add_argument("--merge", action="store_true", help="merge subtitle frames into sentences")
    s.add_argument("--terminators", help="sentence terminator characters")
    s.add_argument("--exception", action="append", help="word whose final period does not end a sentence")
    s.add_argument("--pattern", action="append", help="chapter title regex (repeatable)")
    s.add_argument("--fallback", action="store_true", help="whole book as one chapter if no title matches")
    s.add_argument("--direction", help="default direction for Hansard rows, e.g. fr->en")
    s.add_argument("--labels", help="comma-separated Hansard line-type label set")
    s.set_defaults(func=cmd_ingest)

    s = sub.add_parser("align", help="sentence-align paragraphs or subtitle tracks, keep 1-1 pairs")
    s.add_argument("kind", choices=("sentences", "subtitles"))
    s.add_argument("src", help="original-language side")
    s.add_argument("tgt", help="translation side")
    s.add_argument("--direction", required=True)
    s.add_argument("--delta", type=int, default=500, help="end-time tolerance in ms (subtitles)")
    s.add_argument("--terminators")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_align)

    s = sub.add_parser("europarl-filter", help="propagate and filter original-language annotations")
    s.add_argument("--bitext", required=True, help="TSV text_a<TAB>text_b[<TAB>paragraph]")
    s.add_argument("--langs", nargs=2, default=("en", "fr"), metavar=("A", "B"))
    s.add_argument("--ref", action="append", required=True, help="LANG[@KEYLANG]=PATH, five times")
    s.add_argument("--granularity", choices=("sentence", "paragraph"), default="sentence")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_europarl)

    s = sub.add_parser("chunk", help="split labelled text into ~2000-token chunks")
    s.add_argument("--corpus", action="append", help="aligned corpus TSV")
    s.add_argument("--lang", default="en", help="which side of the aligned corpus to chunk")
    s.add_argument("--original", action="append", help="tagged file of original text")
    s.add_argument("--translated", action="append", help="tagged file of translated text")
    s.add_argument("--target", type=int, default=2000)
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_chunk)

    s = sub.add_parser("features", help="build a feature matrix from chunks")
    s.add_argument("chunks")
    s.add_argument("--family", default="FW")
    s.add_argument("--fw", default="en", help="function-word list file or shipped language code")
    s.add_argument("-k", type=int, default=1000)
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--spec-out")
    s.set_defaults(func=cmd_features)

    for name, func, helptext in (
        ("supervised", cmd_supervised, "ten-fold SVM cross-validation"),
        ("unsupervised", cmd_unsupervised, "two-way clustering averaged over restarts"),
        ("sensitivity", cmd_sensitivity, "accuracy as a function of the number of chunks"),
    ):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("--config", help="JSON experiment config")
        s.add_argument("--name")
        s.add_argument("--family")
        s.add_argument("--fw")
        s.add_argument("--seed", type=int)
        s.add_argument("--C", type=float)
        s.add_argument("--folds", type=int)
        s.add_argument("--runs", type=int)
        s.add_argument("--max-chunks", type=int)
        s.add_argument("--sizes", type=int, nargs="+")
        s.add_argument("--null", action="store_true", help="shuffle chunk labels (null corpus)")
        s.add_argument("--out", help="directory for results and manifest")
        s.set_defaults(func=func)

    s = sub.add_parser("stats", help="sentence/token/type counts per direction")
    s.add_argument("corpus", nargs="+")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_stats)

    s = sub.add_parser("synth", help="write a synthetic tagged original/translated corpus")
    s.add_argument("--out", required=True)
    s.add_argument("--chunks-per-class", type=int, default=100)
    s.add_argument("--shift", type=float, default=1.5)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_synth)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        args.func(args)
    except (ResourceError, FileNotFoundError, PermissionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
