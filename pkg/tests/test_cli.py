import json
import subprocess
import sys

import pytest

from translationese.cli import main
from translationese.experiments import ExperimentConfig, run_supervised
from translationese.features import read_chunks, read_feature_matrix
from translationese.model import read_aligned_corpus

SRT_EN = """1
00:00:01,000 --> 00:00:02,000
Hello there

2
00:00:02,000 --> 00:00:03,000
my friend .

3
00:00:04,000 --> 00:00:06,000
How are you ?
"""

SRT_FR = """1
00:00:01,000 --> 00:00:03,100
Bonjour mon ami .

2
00:00:04,000 --> 00:00:06,200
Comment vas-tu ?
"""


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_ingest_srt_merge(tmp_path, capsys):
    (tmp_path / "en.srt").write_text(SRT_EN)
    code, out, err = run(capsys, "ingest", "srt", tmp_path / "en.srt", "--merge")
    assert code == 0
    assert "Hello there my friend ." in out
    assert "frames_in=3" in err and "frames_out=2" in err


def test_ingest_book(tmp_path, capsys):
    (tmp_path / "b.txt").write_text("CHAPTER I\nOne.\n\nTwo.\nCHAPTER II\nThree.\n")
    code, out, err = run(capsys, "ingest", "book", tmp_path / "b.txt")
    assert code == 0
    assert out.splitlines()[1:] == ["1\t1\tOne.", "1\t2\tTwo.", "2\t1\tThree."]


def test_ingest_hansard(tmp_path, capsys):
    (tmp_path / "h.tsv").write_text("speech\tHello .\tBonjour .\ndate\t1\t1\nspeech\tYes .\tOui .\n")
    code, out, err = run(capsys, "ingest", "hansard", tmp_path / "h.tsv", "--direction", "en->fr", "-o", tmp_path / "o.tsv")
    assert code == 0
    assert len(read_aligned_corpus(tmp_path / "o.tsv").pairs) == 2
    assert "eliminated_fraction=0.333333" in err


def test_align_sentences(tmp_path, capsys):
    (tmp_path / "s.txt").write_text("one two three .\nfour five .\n\nsix seven .\n")
    (tmp_path / "t.txt").write_text("un deux trois .\nquatre cinq .\n\nsix sept .\n")
    code, out, err = run(capsys, "align", "sentences", tmp_path / "s.txt", tmp_path / "t.txt", "--direction", "en->fr")
    assert code == 0
    assert out.splitlines() == ["one two three .\tun deux trois .\ten->fr", "four five .\tquatre cinq .\ten->fr", "six seven .\tsix sept .\ten->fr"]
    assert "discarded_fraction=0.000000" in err


def test_align_sentences_mismatch_is_validation_error(tmp_path, capsys):
    (tmp_path / "s.txt").write_text("a .\n\nb .\n")
    (tmp_path / "t.txt").write_text("a .\n")
    code, _, err = run(capsys, "align", "sentences", tmp_path / "s.txt", tmp_path / "t.txt", "--direction", "en->fr")
    assert code == 1 and "paragraph alignment" in err


def test_align_subtitles(tmp_path, capsys):
    (tmp_path / "fr.srt").write_text(SRT_FR)
    (tmp_path / "en.srt").write_text(SRT_EN)
    code, out, err = run(capsys, "align", "subtitles", tmp_path / "fr.srt", tmp_path / "en.srt", "--direction", "fr->en")
    assert code == 0
    assert out.splitlines()[0] == "Bonjour mon ami .\tHello there my friend .\tfr->en"
    assert "paragraph_pairs=2" in err


def test_europarl_filter(tmp_path, capsys):
    (tmp_path / "bi.tsv").write_text("Hello .\tBonjour .\n(Applause)\t(Applaudissements)\nYes .\tOui .\n")
    refs = []
    for lang, key, rows in [
        ("en", None, [("Hello .", "en"), ("(Applause)", "en"), ("Yes .", "fr")]),
        ("fr", None, [("Bonjour .", "en"), ("(Applaudissements)", "en"), ("Oui .", "fr")]),
        ("de", "en", [("Hello .", "en"), ("(Applause)", "en"), ("Yes .", "fr")]),
        ("it", "en", [("Hello .", "en"), ("(Applause)", "en"), ("Yes .", "en")]),
        ("es", "fr", [("Bonjour .", "en"), ("(Applaudissements)", "en"), ("Oui .", "fr")]),
    ]:
        p = tmp_path / f"ref_{lang}.tsv"
        p.write_text("".join(f"{u}\t{l}\n" for u, l in rows))
        refs += ["--ref", f"{lang}@{key}={p}" if key else f"{lang}={p}"]
    code, out, err = run(capsys, "europarl-filter", "--bitext", tmp_path / "bi.tsv", *refs)
    assert code == 0
    assert out.splitlines() == ["Hello .\tBonjour .\ten->fr"]
    assert "inconsistent=1" in err and "comments=1" in err


def test_synth_chunk_features_supervised(tmp_path, capsys):
    assert run(capsys, "synth", "--out", tmp_path / "syn", "--chunks-per-class", 15, "--shift", 3)[0] == 0
    code, _, err = run(
        capsys, "chunk", "--original", tmp_path / "syn/original.tagged", "--translated", tmp_path / "syn/translated.tagged",
        "-o", tmp_path / "chunks.jsonl",
    )
    assert code == 0 and "original=16" in err and "translated=16" in err
    assert len(read_chunks(tmp_path / "chunks.jsonl")) == 32
    code, _, _ = run(capsys, "features", tmp_path / "chunks.jsonl", "--family", "POS", "-k", 30, "-o", tmp_path / "m.tsv")
    assert code == 0
    keys, X, labels = read_feature_matrix(tmp_path / "m.tsv")
    assert X.shape == (32, 30) and len(keys) == 30

    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"name": "SYN", "source": "chunks", "chunks_path": str(tmp_path / "chunks.jsonl"), "folds": 5}))
    code, out, _ = run(capsys, "supervised", "--config", cfg, "--out", tmp_path / "res")
    assert code == 0
    header, row = out.splitlines()
    assert header.startswith("corpus\tfeature")
    _, api_row = run_supervised(ExperimentConfig.load(cfg))
    assert row == api_row.tsv() and row.startswith("SYN\tFW\t32\t")
    manifest = json.loads((tmp_path / "res/manifest.json").read_text())
    assert manifest["command"] == "supervised" and manifest["config"]["folds"] == 5
    assert (tmp_path / "res/cv_report.tsv").exists()

    code, out, err = run(capsys, "unsupervised", "--config", cfg, "--runs", 3)
    assert code == 0 and "runs=3" in err
    code, out, _ = run(capsys, "sensitivity", "--config", cfg, "--sizes", 10, 20, 40)
    assert code == 0 and [l.split("\t")[0] for l in out.splitlines()] == ["chunks", "10", "20"]


def test_stats(tmp_path, capsys):
    (tmp_path / "c.tsv").write_text("a b\tc\ten->fr\nd\te f g\tfr->en\n")
    code, out, _ = run(capsys, "stats", tmp_path / "c.tsv")
    assert code == 0
    assert "c\ttotal\t2\t3\t4\t3\t4" in out.splitlines()


def test_exit_codes(tmp_path, capsys):
    assert run(capsys, "stats", tmp_path / "missing.tsv")[0] == 2
    assert run(capsys, "supervised", "--config", tmp_path / "missing.json")[0] == 2
    (tmp_path / "bad.json").write_text('{"C": -1}')
    assert run(capsys, "supervised", "--config", tmp_path / "bad.json")[0] == 1
    (tmp_path / "bad.tsv").write_text("only two\tcolumns\n")
    code, _, err = run(capsys, "stats", tmp_path / "bad.tsv")
    assert code == 1 and "line 1" in err
    with pytest.raises(SystemExit):
        main(["nonsense"])


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "translationese", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip()
