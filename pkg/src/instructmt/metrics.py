"""Tokenization, BLEU, length ratio, rank correlation, scaling fits.

The BLEU here matches the standard community scorer on real corpora:
order-4 modified n-gram precision, geometric mean, brevity penalty
exp(1 - ref/hyp) when the hypothesis is shorter.  Corpus scoring applies
no smoothing by default; sentence scoring applies exponential smoothing
and restricts the geometric mean to the orders the sentence can support
(a single-token hypothesis equal to its reference scores 100, not 0).

Tokenizer ``intl-13a`` reproduces the international variant of the
mteval tokenization: split punctuation from adjacent non-digits, space
out symbol characters, then split on whitespace.  ``char`` yields the
individual non-space characters, the usual convention for Chinese.
"""
from __future__ import annotations

import math
import unicodedata
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import __version__

BLEU_ORDER = 4

TOKENIZER_MODES = ("intl-13a", "char")


@dataclass(frozen=True)
class TokenSequence:
    """Tokens plus the tokenizer that produced them, recorded for audit."""

    tokens: tuple[str, ...]
    tokenizer_id: str

    def __post_init__(self) -> None:
        if any(not t for t in self.tokens):
            raise ValueError("empty token in sequence")

    def __len__(self) -> int:
        return len(self.tokens)


# --- tokenizers -------------------------------------------------------------

# character class codes: P punctuation, S symbol, D decimal digit, O other.
# Memoized per character; the full Unicode table never needs a bulk scan.
_CHAR_CLASS: dict[str, str] = {}


def _char_class(ch: str) -> str:
    cls = _CHAR_CLASS.get(ch)
    if cls is None:
        cat = unicodedata.category(ch)
        if cat[0] == "P":
            cls = "P"
        elif cat[0] == "S":
            cls = "S"
        elif cat == "Nd":
            cls = "D"
        else:
            cls = "O"
        _CHAR_CLASS[ch] = cls
    return cls


def _tokenize_intl(text: str) -> tuple[str, ...]:
    # Three passes matching the sequential substitutions of the reference
    # tokenizer.  Each pass consumes matched pairs left to right without
    # overlap, so a later rule must run on the previous rule's output,
    # never on the original string.
    cc = _char_class
    out: list[str] = []
    i, n = 0, len(text)
    while i < n:  # (non-digit)(punct) -> "c p "
        c = text[i]
        if i + 1 < n and cc(c) != "D" and cc(text[i + 1]) == "P":
            out += (c, " ", text[i + 1], " ")
            i += 2
        else:
            out.append(c)
            i += 1
    s = "".join(out)
    out = []
    i, n = 0, len(s)
    while i < n:  # (punct)(non-digit) -> " p c"
        c = s[i]
        if i + 1 < n and cc(c) == "P" and cc(s[i + 1]) != "D":
            out += (" ", c, " ", s[i + 1])
            i += 2
        else:
            out.append(c)
            i += 1
    s = "".join(out)
    out = []
    for c in s:  # symbols always get spaced out
        if cc(c) == "S":
            out += (" ", c, " ")
        else:
            out.append(c)
    return tuple("".join(out).split())


def tokenize(text: str, mode: str = "intl-13a") -> TokenSequence:
    """Tokenize ``text`` under the named mode ("intl-13a" or "char")."""
    if mode == "intl-13a":
        return TokenSequence(_tokenize_intl(text), mode)
    if mode == "char":
        return TokenSequence(tuple(c for c in text if not c.isspace()), mode)
    raise ValueError(f"unknown tokenizer mode {mode!r}, expected one of {TOKENIZER_MODES}")


# --- BLEU -------------------------------------------------------------------

@dataclass(frozen=True)
class Exp:
    """Exponential smoothing: each zero-count order halves a running factor."""

    @property
    def id(self) -> str:
        return "exp"


@dataclass(frozen=True)
class Floor:
    """Floor smoothing: zero-count orders get precision f / total."""

    f: float

    @property
    def id(self) -> str:
        return f"floor:{self.f!r}"


Smoothing = Exp | Floor | None


def _smoothing_id(smoothing: Smoothing) -> str:
    return "none" if smoothing is None else smoothing.id


def bleu_signature(tokenizer_id: str, smoothing: Smoothing, order: int = BLEU_ORDER) -> str:
    """Audit string emitted with every score."""
    return f"bleu|order:{order}|tok:{tokenizer_id}|smooth:{_smoothing_id(smoothing)}|version:instructmt-{__version__}"


@dataclass(frozen=True)
class BleuScore:
    """A BLEU result with its components.

    ``ngram_precisions`` are fractions in [0, 1], one per order;
    ``effective_order`` is the number of leading orders that actually
    entered the geometric mean (orders with no n-grams at all in the
    hypothesis side are excluded).  The identity
    ``score = 100 * bp * exp(mean(log p))`` holds over those orders
    whenever the score is nonzero.
    """

    score: float
    ngram_precisions: tuple[float, ...]
    brevity_penalty: float
    hyp_len: int
    ref_len: int
    effective_order: int
    signature: str

    def __str__(self) -> str:
        precs = "/".join(f"{100 * p:.1f}" for p in self.ngram_precisions)
        return (f"BLEU = {self.score:.2f} {precs} "
                f"(BP = {self.brevity_penalty:.3f} hyp_len = {self.hyp_len} ref_len = {self.ref_len})")


def _ngram_counts(tokens: Sequence[str], order: int) -> Counter:
    counts: Counter = Counter()
    for n in range(1, order + 1):
        for i in range(len(tokens) - n + 1):
            counts[tuple(tokens[i:i + n])] += 1
    return counts


def _uniform_tokenizer(hyps: Sequence[TokenSequence], refs: Sequence[TokenSequence]) -> str:
    ids = {t.tokenizer_id for t in hyps} | {t.tokenizer_id for t in refs}
    if len(ids) != 1:
        raise ValueError(f"mixed tokenizers in one BLEU call: {sorted(ids)}")
    return ids.pop()


def _compute_bleu(correct: list[int], total: list[int], hyp_len: int, ref_len: int,
                  smoothing: Smoothing, tokenizer_id: str, order: int) -> BleuScore:
    precisions = [0.0] * order
    effective = 0
    smooth_factor = 1.0
    for n in range(order):
        if total[n] == 0:
            break  # the hypothesis side has no n-grams of this length at all
        effective = n + 1
        if correct[n] == 0:
            if isinstance(smoothing, Exp):
                smooth_factor *= 2.0
                precisions[n] = 1.0 / (smooth_factor * total[n])
            elif isinstance(smoothing, Floor):
                precisions[n] = smoothing.f / total[n]
            # unsmoothed zero stays zero and zeroes the score below
        else:
            precisions[n] = correct[n] / total[n]

    if hyp_len == 0:
        bp = 0.0
    elif hyp_len < ref_len:
        bp = math.exp(1.0 - ref_len / hyp_len)
    else:
        bp = 1.0

    if effective == 0 or any(p == 0.0 for p in precisions[:effective]):
        score = 0.0
    else:
        mean_log = sum(math.log(p) for p in precisions[:effective]) / effective
        score = 100.0 * bp * math.exp(mean_log)
    return BleuScore(score, tuple(precisions), bp, hyp_len, ref_len, effective,
                     bleu_signature(tokenizer_id, smoothing, order))


def corpus_bleu(hyps: Sequence[TokenSequence], refs: Sequence[TokenSequence], *,
                smoothing: Smoothing = None, order: int = BLEU_ORDER) -> BleuScore:
    """Corpus-level BLEU over aligned hypothesis/reference sequences.

    Default is unsmoothed: any order with zero matches corpus-wide zeroes
    the score.  All sequences must come from one tokenizer.
    """
    if len(hyps) != len(refs):
        raise ValueError(f"length mismatch: {len(hyps)} hypotheses vs {len(refs)} references")
    if not hyps:
        raise ValueError("empty corpus")
    tokenizer_id = _uniform_tokenizer(hyps, refs)
    correct = [0] * order
    total = [0] * order
    hyp_len = 0
    ref_len = 0
    for hyp, ref in zip(hyps, refs):
        hyp_len += len(hyp)
        ref_len += len(ref)
        hyp_counts = _ngram_counts(hyp.tokens, order)
        ref_counts = _ngram_counts(ref.tokens, order)
        for gram, cnt in hyp_counts.items():
            n = len(gram)
            total[n - 1] += cnt
            ref_cnt = ref_counts.get(gram)
            if ref_cnt:
                correct[n - 1] += min(cnt, ref_cnt)
    return _compute_bleu(correct, total, hyp_len, ref_len, smoothing, tokenizer_id, order)


def sentence_bleu(hyp: TokenSequence, ref: TokenSequence, *,
                  smoothing: Smoothing = Exp(), order: int = BLEU_ORDER) -> BleuScore:
    """Sentence-level BLEU, exponentially smoothed by default."""
    tokenizer_id = _uniform_tokenizer([hyp], [ref])
    correct = [0] * order
    total = [0] * order
    hyp_counts = _ngram_counts(hyp.tokens, order)
    ref_counts = _ngram_counts(ref.tokens, order)
    for gram, cnt in hyp_counts.items():
        n = len(gram)
        total[n - 1] += cnt
        ref_cnt = ref_counts.get(gram)
        if ref_cnt:
            correct[n - 1] += min(cnt, ref_cnt)
    return _compute_bleu(correct, total, len(hyp), len(ref), smoothing, tokenizer_id, order)


def length_ratio(hyp: TokenSequence, ref: TokenSequence) -> float:
    """Token-length ratio |hyp| / |ref|.  Empty reference is an error."""
    if len(ref) == 0:
        raise ValueError("length ratio needs a nonempty reference")
    return len(hyp) / len(ref)


# --- rank correlation and scaling fits --------------------------------------

def average_ranks(values: Sequence[float]) -> np.ndarray:
    """1-based ranks with ties sharing the average of their positions."""
    values = np.asarray(values, dtype=float)
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=float)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        # positions i..j (0-based) share rank mean of (i+1 .. j+1)
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Spearman rank correlation with average-tie handling.

    Pearson correlation of the average-ranked values.  Raises on length
    mismatch, fewer than two points, or a constant input on either side.
    """
    if len(xs) != len(ys):
        raise ValueError(f"length mismatch: {len(xs)} vs {len(ys)}")
    if len(xs) < 2:
        raise ValueError("need at least two points")
    rx = average_ranks(xs)
    ry = average_ranks(ys)
    dx = rx - rx.mean()
    dy = ry - ry.mean()
    sx = float(dx @ dx)
    sy = float(dy @ dy)
    if sx == 0.0 or sy == 0.0:
        raise ValueError("constant input makes rank correlation undefined")
    return float((dx @ dy) / math.sqrt(sx * sy))


@dataclass(frozen=True)
class LoglinearFit:
    """Least-squares fit of score = intercept + slope * ln(n)."""

    slope: float
    intercept: float
    r_squared: float


def loglinear_fit(ns: Sequence[float], scores: Sequence[float]) -> LoglinearFit:
    """Fit score = a + b * ln(n) by least squares.

    Raises on length mismatch, fewer than two points, nonpositive n, or
    all-equal n (degenerate design).
    """
    if len(ns) != len(scores):
        raise ValueError(f"length mismatch: {len(ns)} vs {len(scores)}")
    if len(ns) < 2:
        raise ValueError("need at least two points")
    ns = np.asarray(ns, dtype=float)
    scores = np.asarray(scores, dtype=float)
    if np.any(ns <= 0):
        raise ValueError("all n values must be positive")
    log_ns = np.log(ns)
    if np.all(log_ns == log_ns[0]):
        raise ValueError("all n values equal, slope undefined")
    design = np.column_stack([np.ones_like(log_ns), log_ns])
    coef, _, _, _ = np.linalg.lstsq(design, scores, rcond=None)
    intercept, slope = float(coef[0]), float(coef[1])
    residuals = scores - design @ coef
    ss_res = float(residuals @ residuals)
    centered = scores - scores.mean()
    ss_tot = float(centered @ centered)
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return LoglinearFit(slope, intercept, r_squared)
