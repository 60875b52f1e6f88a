"""Parallel corpus ingestion, validation, filtering, and sampling.

Supported on-disk formats:

- ``tsv-pair``:   ``src_text<TAB>tgt_text``, UTF-8, no header.
- ``tsv-scored``: ``score<TAB>src_text<TAB>tgt_text`` (mined-corpus convention,
  score is an alignment-similarity real, larger is better).
- ``jsonl``: one object per line, keys ``src_lang, tgt_lang, src_text,
  tgt_text`` and optional ``score``.

All text is NFC-normalized and stripped of outer whitespace at load time.
Malformed lines are counted and reported on the returned corpus; they are
never silently dropped without trace.  A corpus whose malformed fraction
exceeds the configured threshold fails loudly.
"""
from __future__ import annotations

import json
import math
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence

from . import sampling
from .languages import LanguagePair, LanguageRegistry

FORMATS = ("tsv-pair", "tsv-scored", "jsonl")


class CorpusError(ValueError):
    """Raised for unreadable files, bad formats, or missing scores."""


@dataclass(frozen=True)
class ParallelSentence:
    """One aligned sentence pair with an optional alignment-quality score."""

    src_lang: str
    tgt_lang: str
    src_text: str
    tgt_text: str
    score: float | None = None

    def __post_init__(self) -> None:
        if self.src_lang == self.tgt_lang:
            raise ValueError(f"source and target language are both {self.src_lang!r}")
        for label, text in (("source", self.src_text), ("target", self.tgt_text)):
            if not text.strip():
                raise ValueError(f"{label} text is empty")
            if "\n" in text or "\r" in text:
                raise ValueError(f"{label} text contains a newline")
        if self.score is not None and (math.isnan(self.score) or self.score < 0):
            raise ValueError(f"score must be a nonnegative real, got {self.score!r}")

    @property
    def pair(self) -> LanguagePair:
        return LanguagePair(self.src_lang, self.tgt_lang)


@dataclass(frozen=True)
class Corpus:
    """An ordered, immutable sequence of ParallelSentence.

    Iteration order is stable and equals input order unless an operation
    documents otherwise.  ``n_malformed`` and ``malformed_examples`` carry
    the load diagnostics; derived corpora keep them at zero.
    """

    sentences: tuple[ParallelSentence, ...]
    provenance: str
    n_malformed: int = 0
    malformed_examples: tuple[tuple[int, str], ...] = field(default=())

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self) -> Iterator[ParallelSentence]:
        return iter(self.sentences)

    def __getitem__(self, i: int) -> ParallelSentence:
        return self.sentences[i]

    def derive(self, sentences: Sequence[ParallelSentence], step: str) -> "Corpus":
        return Corpus(tuple(sentences), f"{self.provenance}; {step}")


# --- quality-filter modes ---------------------------------------------------

@dataclass(frozen=True)
class Threshold:
    """Keep records with score >= t."""
    t: float


@dataclass(frozen=True)
class TopK:
    """Keep the k highest-scored records; equal scores prefer earlier records."""
    k: int


@dataclass(frozen=True)
class BottomK:
    """Keep the k lowest-scored records; equal scores prefer later records.

    The tie direction complements TopK so that top_k(k) and bottom_k(n-k)
    partition a corpus exactly.
    """
    k: int


QualityMode = Threshold | TopK | BottomK


def _clean(text: str) -> str:
    return unicodedata.normalize("NFC", text).strip()


def _parse_line(line: str, fmt: str, src: str, tgt: str) -> ParallelSentence:
    if fmt == "tsv-pair":
        fields = line.split("\t")
        if len(fields) != 2:
            raise ValueError(f"expected 2 tab-separated fields, got {len(fields)}")
        return ParallelSentence(src, tgt, _clean(fields[0]), _clean(fields[1]))
    if fmt == "tsv-scored":
        fields = line.split("\t")
        if len(fields) != 3:
            raise ValueError(f"expected 3 tab-separated fields, got {len(fields)}")
        try:
            score = float(fields[0])
        except ValueError:
            raise ValueError(f"unparseable score {fields[0]!r}") from None
        return ParallelSentence(src, tgt, _clean(fields[1]), _clean(fields[2]), score)
    if fmt == "jsonl":
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise ValueError(f"bad JSON: {e.msg}") from None
        if not isinstance(obj, dict):
            raise ValueError("line is not a JSON object")
        missing = {"src_lang", "tgt_lang", "src_text", "tgt_text"} - obj.keys()
        if missing:
            raise ValueError(f"missing keys {sorted(missing)}")
        if obj["src_lang"] != src or obj["tgt_lang"] != tgt:
            raise ValueError(
                f"language pair {obj['src_lang']}-{obj['tgt_lang']} does not match declared {src}-{tgt}")
        score = obj.get("score")
        if score is not None:
            score = float(score)
        return ParallelSentence(src, tgt, _clean(str(obj["src_text"])),
                                _clean(str(obj["tgt_text"])), score)
    raise CorpusError(f"unknown corpus format {fmt!r}, expected one of {FORMATS}")


def load_corpus(path: str | Path, fmt: str, src: str, tgt: str, *,
                malformed_threshold: float = 0.1,
                registry: LanguageRegistry | None = None) -> Corpus:
    """Load a parallel corpus file into memory.

    Args:
        path: corpus file.
        fmt: one of ``tsv-pair``, ``tsv-scored``, ``jsonl``.
        src, tgt: declared language codes for the whole file.
        malformed_threshold: abort when the malformed-line fraction exceeds
            this value (default 0.1).
        registry: optional registry; when given, src and tgt must be known.

    Returns:
        Corpus with diagnostics attached.
    """
    if fmt not in FORMATS:
        raise CorpusError(f"unknown corpus format {fmt!r}, expected one of {FORMATS}")
    LanguagePair(src, tgt)  # distinctness
    if registry is not None:
        registry.require(src, tgt)
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as e:
        raise CorpusError(f"cannot read corpus file {path}: {e}") from None

    sentences: list[ParallelSentence] = []
    bad: list[tuple[int, str]] = []
    lines = raw.splitlines()
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue  # blank lines carry no record and are not an error
        try:
            sentences.append(_parse_line(line, fmt, src, tgt))
        except ValueError as e:
            bad.append((lineno, str(e)))
    n_records = len(sentences) + len(bad)
    if n_records and len(bad) / n_records > malformed_threshold:
        head = "; ".join(f"line {n}: {m}" for n, m in bad[:5])
        raise CorpusError(
            f"{path}: {len(bad)}/{n_records} lines malformed "
            f"(threshold {malformed_threshold:.0%}): {head}")
    return Corpus(tuple(sentences), f"{path} ({fmt})",
                  n_malformed=len(bad), malformed_examples=tuple(bad[:10]))


def serialize_corpus(corpus: Corpus, path: str | Path, fmt: str) -> None:
    """Write a corpus back to disk in any supported format.

    TSV formats refuse texts containing tabs (they cannot round-trip);
    scores are emitted with repr so that load(serialize(c)) == c.
    """
    if fmt not in FORMATS:
        raise CorpusError(f"unknown corpus format {fmt!r}, expected one of {FORMATS}")
    out: list[str] = []
    for i, s in enumerate(corpus):
        if fmt != "jsonl" and ("\t" in s.src_text or "\t" in s.tgt_text):
            raise CorpusError(f"record {i}: text contains a tab, not representable as {fmt}")
        if fmt == "tsv-pair":
            out.append(f"{s.src_text}\t{s.tgt_text}")
        elif fmt == "tsv-scored":
            if s.score is None:
                raise CorpusError(f"record {i}: no score, not representable as tsv-scored")
            out.append(f"{s.score!r}\t{s.src_text}\t{s.tgt_text}")
        else:
            obj = {"src_lang": s.src_lang, "tgt_lang": s.tgt_lang,
                   "src_text": s.src_text, "tgt_text": s.tgt_text}
            if s.score is not None:
                obj["score"] = s.score
            out.append(json.dumps(obj, ensure_ascii=False))
    Path(path).write_text("".join(line + "\n" for line in out), encoding="utf-8")


def filter_by_quality(corpus: Corpus, mode: QualityMode) -> Corpus:
    """Filter by alignment score; output preserves input order.

    Raises CorpusError naming the first record that lacks a score.
    """
    for i, s in enumerate(corpus):
        if s.score is None:
            raise CorpusError(
                f"record {i} ({s.src_lang}-{s.tgt_lang} {s.src_text[:30]!r}) has no score; "
                f"score-based filtering needs every record scored")
    n = len(corpus)
    if isinstance(mode, Threshold):
        keep = [i for i, s in enumerate(corpus) if s.score >= mode.t]
        step = f"filter=threshold({mode.t!r})"
    elif isinstance(mode, TopK):
        if mode.k < 0:
            raise CorpusError("k must be >= 0")
        order = sorted(range(n), key=lambda i: (-corpus[i].score, i))
        keep = sorted(order[:mode.k])
        step = f"filter=top_k({mode.k})"
    elif isinstance(mode, BottomK):
        if mode.k < 0:
            raise CorpusError("k must be >= 0")
        order = sorted(range(n), key=lambda i: (corpus[i].score, -i))
        keep = sorted(order[:mode.k])
        step = f"filter=bottom_k({mode.k})"
    else:
        raise CorpusError(f"unknown quality mode {mode!r}")
    return corpus.derive([corpus[i] for i in keep], step)


def sample_per_pair(corpus: Corpus, n: int, seed: int) -> Corpus:
    """Uniform sample without replacement of min(n, len) sentences.

    Deterministic for a fixed seed on any platform; the selected records
    keep their original relative order.  Short corpora pass through whole.
    """
    if n < 1:
        raise CorpusError("sample size must be >= 1")
    k = min(n, len(corpus))
    idx = sorted(sampling.sample_indices(len(corpus), k, seed))
    step = f"sample={k}/{len(corpus)} algorithm={sampling.ALGORITHM_ID} seed={seed}"
    return corpus.derive([corpus[i] for i in idx], step)
