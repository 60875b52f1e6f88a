"""Instruction rendering, inverse parsing, training files, ICL prompts.

Two instance kinds exist.  A translation instance wraps an aligned pair:

    Translation: [French]: Bonjour. [English]: Hello.

A monolingual instance wraps a single sentence:

    [Tamil]: ...

Rendered instances are single lines; a training file is one instance per
line, deterministically shuffled, with a manifest recording counts, the
seed, and a content digest.  Few-shot prompts join demonstrations as
"src = tgt" lines and end with the bare query followed by " = ".
"""
from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from . import sampling
from .corpus import ParallelSentence
from .languages import LanguagePair, LanguageRegistry

KIND_TRANSLATION = "translation"
KIND_MONOLINGUAL = "monolingual"

DEFAULT_TRANSLATION_TEMPLATE = "Translation: [{src_name}]: {src} [{tgt_name}]: {tgt}"
DEFAULT_MONOLINGUAL_TEMPLATE = "[{tgt_name}]: {tgt}"

# splitting this substring out of a rendered instance is ambiguous, so
# texts containing it render fine but get flagged in the manifest
_PARSE_HAZARD = "]: "


@dataclass(frozen=True)
class TemplateSet:
    """Render patterns with {src_name} {tgt_name} {src} {tgt} placeholders."""

    translation: str = DEFAULT_TRANSLATION_TEMPLATE
    monolingual: str = DEFAULT_MONOLINGUAL_TEMPLATE


def load_template_overrides(path: str | Path) -> TemplateSet:
    """Read a small override file with ``translation=`` / ``monolingual=`` lines."""
    translation = DEFAULT_TRANSLATION_TEMPLATE
    monolingual = DEFAULT_MONOLINGUAL_TEMPLATE
    for lineno, line in enumerate(Path(path).read_text("utf-8").splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"template override line {lineno}: no '=' in {line!r}")
        key = key.strip()
        if key == "translation":
            translation = value
        elif key == "monolingual":
            monolingual = value
        else:
            raise ValueError(f"template override line {lineno}: unknown key {key!r}")
    return TemplateSet(translation, monolingual)


@dataclass(frozen=True)
class InstructionInstance:
    """One rendered training instance.

    ``pair`` is set for translation instances; monolingual instances set
    ``lang`` instead.  ``parse_safe`` is False when an embedded text
    contains the "]: " substring that defeats inverse parsing.
    """

    text: str
    kind: str
    pair: LanguagePair | None = None
    lang: str | None = None
    parse_safe: bool = True

    def __post_init__(self) -> None:
        if self.kind not in (KIND_TRANSLATION, KIND_MONOLINGUAL):
            raise ValueError(f"unknown instance kind {self.kind!r}")
        if "\n" in self.text or "\r" in self.text:
            raise ValueError("rendered instance contains a newline")
        if self.kind == KIND_TRANSLATION and self.pair is None:
            raise ValueError("translation instance needs a language pair")
        if self.kind == KIND_MONOLINGUAL and self.lang is None:
            raise ValueError("monolingual instance needs a language")

    @property
    def group_key(self) -> str:
        """Manifest bucket: 'src-tgt' for translation, the code for monolingual."""
        return self.pair.key() if self.pair is not None else self.lang


def render_translation_instruction(sentence: ParallelSentence,
                                   registry: LanguageRegistry,
                                   templates: TemplateSet | None = None) -> InstructionInstance:
    """Render one aligned pair into the translation template.

    Deterministic and byte-stable; unknown language codes raise KeyError.
    """
    templates = templates or TemplateSet()
    src_name = registry.display_name(sentence.src_lang)
    tgt_name = registry.display_name(sentence.tgt_lang)
    text = templates.translation.format(src_name=src_name, tgt_name=tgt_name,
                                        src=sentence.src_text, tgt=sentence.tgt_text)
    safe = _PARSE_HAZARD not in sentence.src_text and _PARSE_HAZARD not in sentence.tgt_text
    return InstructionInstance(text, KIND_TRANSLATION, pair=sentence.pair, parse_safe=safe)


def render_monolingual_instruction(lang: str, text: str,
                                   registry: LanguageRegistry,
                                   templates: TemplateSet | None = None) -> InstructionInstance:
    """Render one sentence into the monolingual template."""
    templates = templates or TemplateSet()
    name = registry.display_name(lang)
    if not text.strip():
        raise ValueError("monolingual instruction needs nonempty text")
    if "\n" in text or "\r" in text:
        raise ValueError("monolingual text contains a newline")
    rendered = templates.monolingual.format(src_name=name, tgt_name=name,
                                            src=text, tgt=text)
    safe = _PARSE_HAZARD not in text
    return InstructionInstance(rendered, KIND_MONOLINGUAL, lang=lang, parse_safe=safe)


def _inverse_regex(template: str) -> re.Pattern:
    # Literal segments are escaped; name placeholders match up to the next
    # bracket, text placeholders are lazy except the final one.
    pieces = re.split(r"(\{(?:src_name|tgt_name|src|tgt)\})", template)
    out = ["^"]
    placeholders = [p for p in pieces if p.startswith("{")]
    seen = 0
    for piece in pieces:
        if piece in ("{src_name}", "{tgt_name}"):
            out.append(f"(?P<{piece[1:-1]}>[^\\[\\]]+?)")
            seen += 1
        elif piece in ("{src}", "{tgt}"):
            seen += 1
            greedy = ".*" if seen == len(placeholders) else ".*?"
            out.append(f"(?P<{piece[1:-1]}>{greedy})")
        else:
            out.append(re.escape(piece))
    out.append("$")
    return re.compile("".join(out))


_DEFAULT_INVERSE = _inverse_regex(DEFAULT_TRANSLATION_TEMPLATE)


def parse_translation_instruction(text: str, registry: LanguageRegistry,
                                  templates: TemplateSet | None = None) -> ParallelSentence:
    """Invert a rendered translation instance back to its sentence pair.

    Exact inverse of render_translation_instruction for texts that do not
    contain "]: ".  Raises ValueError when the line does not match the
    grammar or names an unregistered language.
    """
    pattern = _DEFAULT_INVERSE if templates is None else _inverse_regex(templates.translation)
    m = pattern.match(text)
    if m is None:
        raise ValueError(f"line does not match the translation instruction grammar: {text[:60]!r}")
    try:
        src = registry.code_for_name(m.group("src_name"))
        tgt = registry.code_for_name(m.group("tgt_name"))
    except KeyError as e:
        raise ValueError(f"unparseable instruction: {e}") from None
    return ParallelSentence(src, tgt, m.group("src"), m.group("tgt"))


def build_training_file(instances: Sequence[InstructionInstance],
                        shuffle_seed: int, out: str | Path) -> dict:
    """Write one instance per line, deterministically shuffled.

    Returns the manifest: total, per-group and per-kind counts, the seed,
    the sha256 digest of the written bytes, the shuffle algorithm id, and
    how many instances carry parse-hazard texts.
    """
    if not instances:
        raise ValueError("no instances to write")
    order = sampling.permutation(len(instances), shuffle_seed)
    lines = [instances[i].text for i in order]
    payload = "".join(line + "\n" for line in lines).encode("utf-8")
    Path(out).write_bytes(payload)

    per_pair: dict[str, int] = {}
    per_kind: dict[str, int] = {}
    flagged = 0
    for inst in instances:
        per_pair[inst.group_key] = per_pair.get(inst.group_key, 0) + 1
        per_kind[inst.kind] = per_kind.get(inst.kind, 0) + 1
        if not inst.parse_safe:
            flagged += 1
    return {
        "total": len(instances),
        "per_pair_counts": dict(sorted(per_pair.items())),
        "per_kind_counts": dict(sorted(per_kind.items())),
        "seed": shuffle_seed,
        "digest": hashlib.sha256(payload).hexdigest(),
        "shuffle": sampling.ALGORITHM_ID,
        "flagged_parse_unsafe": flagged,
    }


@dataclass(frozen=True)
class IclPrompt:
    """A rendered few-shot prompt: k demonstrations then the bare query."""

    demonstrations: tuple[tuple[str, str], ...]
    query_src: str
    rendered: str


def build_icl_prompt(demos: Sequence[ParallelSentence], query: str,
                     k: int, seed: int) -> IclPrompt:
    """Sample k demonstrations and render the prompt.

    Demonstrations whose source equals the query are excluded before
    sampling.  The pool must still hold at least k items.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    if not query.strip():
        raise ValueError("query must be nonempty")
    pool = [d for d in demos if d.src_text != query]
    if len(pool) < k:
        raise ValueError(f"demo pool holds {len(pool)} usable items, need {k}")
    chosen = sampling.sample(pool, k, seed)
    shots = tuple((d.src_text, d.tgt_text) for d in chosen)
    lines = [f"{s} = {t}" for s, t in shots]
    lines.append(f"{query} = ")
    return IclPrompt(shots, query, "\n".join(lines))
