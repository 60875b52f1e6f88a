"""Language codes, display names, and ordered language pairs.

The registry is the single source of truth for which languages exist and
how they are rendered inside instruction templates.  Codes are short
lowercase identifiers ("en", "sw"); display names are the human-readable
forms substituted into templates ("English", "Swahili").
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterator


@dataclass(frozen=True)
class LanguageCode:
    """A registered language: short code plus template display name."""

    code: str
    display_name: str

    def __post_init__(self) -> None:
        if not self.code or not self.code.isascii() or not self.code.islower() \
                or not self.code.isalpha() or not 2 <= len(self.code) <= 3:
            raise ValueError(f"bad language code {self.code!r}: want 2-3 lowercase ASCII letters")
        if not self.display_name or self.display_name != self.display_name.strip():
            raise ValueError(f"bad display name {self.display_name!r} for {self.code}")
        # brackets and colons would collide with the instruction template grammar
        if any(ch in self.display_name for ch in "[]:"):
            raise ValueError(f"display name {self.display_name!r} contains reserved characters")


@dataclass(frozen=True)
class LanguagePair:
    """Ordered (source, target) pair of language codes."""

    src: str
    tgt: str

    def __post_init__(self) -> None:
        if self.src == self.tgt:
            raise ValueError(f"language pair must have distinct members, got {self.src!r} twice")

    def reverse(self) -> "LanguagePair":
        return LanguagePair(self.tgt, self.src)

    def key(self) -> str:
        """Stable string form used in manifests and report rows, e.g. "de-fr"."""
        return f"{self.src}-{self.tgt}"

    @classmethod
    def from_key(cls, key: str) -> "LanguagePair":
        src, sep, tgt = key.partition("-")
        if not sep or not src or not tgt:
            raise ValueError(f"bad pair key {key!r}, expected 'src-tgt'")
        return cls(src, tgt)


class LanguageRegistry:
    """Bijective code -> display-name mapping with a marked core subset.

    Parameters
    ----------
    languages:
        LanguageCode entries.  Codes and display names must each be unique.
    core:
        Codes forming the primary evaluation set.  Defaults to all codes.
    """

    def __init__(self, languages: list[LanguageCode], core: set[str] | None = None):
        by_code: dict[str, LanguageCode] = {}
        names: set[str] = set()
        for lang in languages:
            if lang.code in by_code:
                raise ValueError(f"duplicate language code {lang.code!r}")
            if lang.display_name in names:
                raise ValueError(f"duplicate display name {lang.display_name!r}")
            by_code[lang.code] = lang
            names.add(lang.display_name)
        self._by_code = by_code
        self._by_name = {l.display_name: l.code for l in languages}
        self._core = frozenset(core if core is not None else by_code)
        unknown = self._core - set(by_code)
        if unknown:
            raise ValueError(f"core set references unknown codes: {sorted(unknown)}")

    def __contains__(self, code: str) -> bool:
        return code in self._by_code

    def __iter__(self) -> Iterator[str]:
        return iter(self._by_code)

    def __len__(self) -> int:
        return len(self._by_code)

    def get(self, code: str) -> LanguageCode:
        try:
            return self._by_code[code]
        except KeyError:
            raise KeyError(f"unknown language code {code!r}") from None

    def display_name(self, code: str) -> str:
        return self.get(code).display_name

    def code_for_name(self, display_name: str) -> str:
        try:
            return self._by_name[display_name]
        except KeyError:
            raise KeyError(f"unknown language name {display_name!r}") from None

    @property
    def codes(self) -> tuple[str, ...]:
        return tuple(self._by_code)

    @property
    def core_codes(self) -> tuple[str, ...]:
        return tuple(c for c in self._by_code if c in self._core)

    def require(self, *codes: str) -> None:
        for code in codes:
            if code not in self._by_code:
                raise KeyError(f"unknown language code {code!r}")

    @classmethod
    def from_json(cls, path: str | Path) -> "LanguageRegistry":
        with open(path, encoding="utf-8") as f:
            payload = json.load(f)
        return cls._from_payload(payload)

    @classmethod
    def _from_payload(cls, payload: dict) -> "LanguageRegistry":
        langs = [LanguageCode(e["code"], e["name"]) for e in payload["languages"]]
        core = {e["code"] for e in payload["languages"] if e.get("core", True)}
        return cls(langs, core)

    @classmethod
    def default(cls) -> "LanguageRegistry":
        """The registry bundled with the package."""
        text = resources.files("instructmt.data").joinpath("languages.json").read_text("utf-8")
        return cls._from_payload(json.loads(text))
