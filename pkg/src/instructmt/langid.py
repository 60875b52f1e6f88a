"""Character n-gram language identification over the language registry.

A profile per language holds additively smoothed log-probabilities of
character n-grams (orders 1 to 4) drawn from monolingual text.  A text
is scored per language by the mean per-character log-likelihood summed
over the orders, and the argmax wins; short or empty texts return the
designated "und" outcome instead of a guess.

Two implementation details matter for the invariants:

- N-grams are extracted cyclically (the window wraps around the end of
  the text), so every text of length L contributes exactly L n-grams at
  every order, and doubling a text exactly doubles every count.
- Scores are computed as count-vector dot log-probability-matrix, never
  as a running per-position sum.  Doubling all counts multiplies each
  product and each partial sum by exactly 2 in binary floating point, so
  identify(t) and identify(t + t) agree bit for bit.

Preprocessing is strictly per character (lowercase, any whitespace to a
single space) for the same reason: processed(t + t) == processed(t) * 2.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

UNDETERMINED = "und"

PROFILE_FORMAT_VERSION = 1

DEFAULT_ORDERS = (1, 2, 3, 4)
DEFAULT_ALPHA = 0.1
DEFAULT_MIN_CHARS = 20
DEFAULT_SHORT_MARGIN_BAR = 0.75


def preprocess(text: str) -> str:
    # charwise on purpose, see module docstring
    return "".join(" " if c.isspace() else c.lower() for c in text)


def cyclic_ngrams(chars: str, n: int) -> Iterable[str]:
    """All L windows of width n over the text read as a ring."""
    L = len(chars)
    if L == 0:
        return ()
    if L < n:
        reps = -(-(L + n - 1) // L)  # ceil
        ring = (chars * reps)[:L + n - 1]
    else:
        ring = chars + chars[:n - 1]
    return (ring[i:i + n] for i in range(L))


@dataclass(frozen=True)
class LangPrediction:
    """Identification outcome: language (or "und"), score, runner-up gap."""

    lang: str
    score: float
    margin: float


@dataclass(frozen=True)
class LangProfile:
    """Per-language view of the trained tables (mapping form, for audit)."""

    lang: str
    ngram_logprobs: Mapping[str, float]
    smoothing_mass: float
    n_chars: int
    warnings: tuple[str, ...] = field(default=())


class ProfileSet:
    """Trained profiles for a fixed language set, ready for batch scoring.

    Internal layout: one matrix per order with a row per known n-gram
    plus a trailing unknown row, columns in sorted language order.
    """

    def __init__(self, langs: Sequence[str], orders: Sequence[int], alpha: float,
                 vocab: dict[int, dict[str, int]], matrices: dict[int, np.ndarray],
                 n_chars: dict[str, int], warnings: dict[str, list[str]]):
        self.langs = tuple(langs)
        self.orders = tuple(orders)
        self.alpha = alpha
        self._vocab = vocab
        self._matrices = matrices
        self.n_chars = dict(n_chars)
        self.warnings = {k: list(v) for k, v in warnings.items()}

    def profile(self, lang: str) -> LangProfile:
        if lang not in self.langs:
            raise KeyError(f"no profile for language {lang!r}")
        col = self.langs.index(lang)
        table: dict[str, float] = {}
        for n in self.orders:
            mat = self._matrices[n]
            for gram, row in self._vocab[n].items():
                table[gram] = float(mat[row, col])
        return LangProfile(lang, table, self.alpha, self.n_chars[lang],
                           tuple(self.warnings.get(lang, ())))

    # ---- scoring ----

    def score_text(self, text: str) -> np.ndarray | None:
        """Mean per-character log-likelihood per language, or None if empty."""
        chars = preprocess(text)
        if not chars.strip():
            return None
        scores = np.zeros(len(self.langs))
        for n in self.orders:
            vocab = self._vocab[n]
            unknown_row = len(vocab)
            counts: dict[int, int] = {}
            for gram in cyclic_ngrams(chars, n):
                row = vocab.get(gram, unknown_row)
                counts[row] = counts.get(row, 0) + 1
            rows = np.fromiter(counts.keys(), dtype=np.intp, count=len(counts))
            cnts = np.fromiter(counts.values(), dtype=np.float64, count=len(counts))
            scores += cnts @ self._matrices[n][rows, :]
        scores /= len(self.orders) * len(chars)
        return scores


def train_profiles(mono: Mapping[str, Sequence[str]], *,
                   orders: Sequence[int] = DEFAULT_ORDERS,
                   alpha: float = DEFAULT_ALPHA,
                   min_train_chars: int = 2000) -> ProfileSet:
    """Train additively smoothed n-gram profiles from monolingual text.

    Args:
        mono: language code -> sentences.  Every language must bring
            nonempty text; a language under ``min_train_chars`` trains
            anyway but records a warning in its profile metadata.
    """
    if not mono:
        raise ValueError("no languages to train on")
    langs = sorted(mono)
    counts: dict[int, dict[str, np.ndarray]] = {}
    totals: dict[int, np.ndarray] = {n: np.zeros(len(langs)) for n in orders}
    n_chars: dict[str, int] = {}
    warnings: dict[str, list[str]] = {}
    per_lang_counters: dict[int, list[dict[str, int]]] = {n: [] for n in orders}

    for lang in langs:
        sentences = mono[lang]
        chars_total = 0
        lang_counts: dict[int, dict[str, int]] = {n: {} for n in orders}
        for sentence in sentences:
            chars = preprocess(sentence)
            if not chars:
                continue
            chars_total += len(chars)
            for n in orders:
                table = lang_counts[n]
                for gram in cyclic_ngrams(chars, n):
                    table[gram] = table.get(gram, 0) + 1
        if chars_total == 0:
            raise ValueError(f"language {lang!r} has no training text")
        n_chars[lang] = chars_total
        if chars_total < min_train_chars:
            warnings.setdefault(lang, []).append(
                f"only {chars_total} training characters, below the configured minimum {min_train_chars}")
        for n in orders:
            per_lang_counters[n].append(lang_counts[n])

    vocab: dict[int, dict[str, int]] = {}
    matrices: dict[int, np.ndarray] = {}
    for n in orders:
        grams = sorted(set().union(*[c.keys() for c in per_lang_counters[n]]))
        vocab[n] = {g: i for i, g in enumerate(grams)}
        v_size = len(grams) + 1  # plus the unknown event
        mat = np.empty((v_size, len(langs)))
        for col, lang_counts in enumerate(per_lang_counters[n]):
            total = sum(lang_counts.values())
            denom = math.log(total + alpha * v_size)
            column = np.full(v_size, math.log(alpha) - denom)
            for gram, cnt in lang_counts.items():
                column[vocab[n][gram]] = math.log(cnt + alpha) - denom
            mat[:, col] = column
        matrices[n] = mat
    return ProfileSet(langs, orders, alpha, vocab, matrices, n_chars, warnings)


def identify(text: str, profiles: ProfileSet, *,
             min_chars: int = DEFAULT_MIN_CHARS,
             short_margin_bar: float = DEFAULT_SHORT_MARGIN_BAR) -> LangPrediction:
    """Identify the language of a text.

    Returns "und" for empty or whitespace-only input, and for texts
    shorter than ``min_chars`` whose winning margin stays below
    ``short_margin_bar`` (both configurable).  Ties break toward the
    lexicographically first language code.
    """
    scores = profiles.score_text(text)
    if scores is None:
        return LangPrediction(UNDETERMINED, float("-inf"), 0.0)
    best = int(np.argmax(scores))
    score = float(scores[best])
    if len(scores) > 1:
        rest = np.delete(scores, best)
        margin = score - float(rest.max())
    else:
        margin = math.inf
    n_chars = len(preprocess(text))
    if n_chars < min_chars and margin < short_margin_bar:
        return LangPrediction(UNDETERMINED, score, margin)
    return LangPrediction(profiles.langs[best], score, margin)


def identify_batch(texts: Sequence[str], profiles: ProfileSet, **kwargs) -> list[LangPrediction]:
    return [identify(t, profiles, **kwargs) for t in texts]


# ---- serialization ----------------------------------------------------------

def save_profiles(profiles: ProfileSet, path: str | Path) -> None:
    """Write profiles as a versioned .npz bundle."""
    arrays: dict[str, np.ndarray] = {}
    meta = {
        "format_version": PROFILE_FORMAT_VERSION,
        "langs": list(profiles.langs),
        "orders": list(profiles.orders),
        "alpha": profiles.alpha,
        "n_chars": profiles.n_chars,
        "warnings": profiles.warnings,
    }
    for n in profiles.orders:
        grams = sorted(profiles._vocab[n], key=profiles._vocab[n].__getitem__)
        # processed text never contains newlines, so the join is safe
        arrays[f"vocab_{n}"] = np.frombuffer("\n".join(grams).encode("utf-8"), dtype=np.uint8)
        arrays[f"logprobs_{n}"] = profiles._matrices[n]
    arrays["meta"] = np.frombuffer(json.dumps(meta).encode("utf-8"), dtype=np.uint8)
    with open(path, "wb") as f:
        np.savez_compressed(f, **arrays)


def load_profiles(path: str | Path) -> ProfileSet:
    with np.load(path) as bundle:
        meta = json.loads(bytes(bundle["meta"]).decode("utf-8"))
        if meta.get("format_version") != PROFILE_FORMAT_VERSION:
            raise ValueError(f"unsupported profile format version {meta.get('format_version')!r}")
        vocab: dict[int, dict[str, int]] = {}
        matrices: dict[int, np.ndarray] = {}
        for n in meta["orders"]:
            raw = bytes(bundle[f"vocab_{n}"]).decode("utf-8")
            grams = raw.split("\n") if raw else []
            vocab[n] = {g: i for i, g in enumerate(grams)}
            matrices[n] = bundle[f"logprobs_{n}"]
    return ProfileSet(meta["langs"], meta["orders"], meta["alpha"],
                      vocab, matrices, meta["n_chars"], meta["warnings"])


def load_external_labels(path: str | Path, *,
                         valid_langs: Iterable[str] | None = None,
                         known_ids: Iterable[str] | None = None) -> dict[str, str]:
    """Read a TSV of ``record_id<TAB>lang`` external identification labels.

    When ``valid_langs`` is given, labels outside it (other than "und")
    are reported; when ``known_ids`` is given, labels for unknown record
    ids are an error.  An empty file yields an empty mapping, which makes
    callers fall back to the built-in identifier.
    """
    labels: dict[str, str] = {}
    bad_langs: list[str] = []
    for lineno, line in enumerate(Path(path).read_text("utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValueError(f"{path} line {lineno}: expected 'id<TAB>lang'")
        rec_id, lang = parts
        labels[rec_id] = lang
        if valid_langs is not None and lang != UNDETERMINED and lang not in set(valid_langs):
            bad_langs.append(f"line {lineno}: {lang!r}")
    if bad_langs:
        raise ValueError(f"{path}: unknown language codes: " + "; ".join(bad_langs[:5]))
    if known_ids is not None:
        stray = set(labels) - set(known_ids)
        if stray:
            raise ValueError(f"{path}: labels for unknown record ids: {sorted(stray)[:5]}")
    return labels
