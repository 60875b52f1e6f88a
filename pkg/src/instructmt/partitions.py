"""Language-pair training partitions and the six evaluation conditions.

A partition assigns every language one role (unseen, only-source,
only-target, or source-and-target) and fixes an explicit list of trained
directions.  Every evaluation direction then lands in exactly one of six
conditions, determined purely by the trained-pair list:

- SameDirection:     the direction itself was trained.
- ReversedDirection: only its reverse was trained.
- UnseenDirection:   both languages occur in trained pairs, but neither
                     the direction nor its reverse does.
- UnseenSrc:         the source language occurs in no trained pair while
                     the target does.
- UnseenTgt:         the mirror case.
- UnseenBoth:        neither language occurs in any trained pair.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from .languages import LanguagePair


class Condition(str, Enum):
    SAME_DIRECTION = "SameDirection"
    REVERSED_DIRECTION = "ReversedDirection"
    UNSEEN_DIRECTION = "UnseenDirection"
    UNSEEN_SRC = "UnseenSrc"
    UNSEEN_TGT = "UnseenTgt"
    UNSEEN_BOTH = "UnseenBoth"


@dataclass(frozen=True)
class PartitionSpec:
    """Validated role assignment plus the trained-direction list."""

    name: str
    unseen: frozenset[str]
    only_source: frozenset[str]
    only_target: frozenset[str]
    source_target: frozenset[str]
    train_pairs: frozenset[LanguagePair]

    def __post_init__(self) -> None:
        groups = [self.unseen, self.only_source, self.only_target, self.source_target]
        for i in range(len(groups)):
            for j in range(i + 1, len(groups)):
                overlap = groups[i] & groups[j]
                if overlap:
                    raise ValueError(f"language role groups overlap on {sorted(overlap)}")
        src_ok = self.only_source | self.source_target
        tgt_ok = self.only_target | self.source_target
        for pair in self.train_pairs:
            if pair.src not in src_ok:
                raise ValueError(f"pair {pair.key()} uses {pair.src!r} on the source side, "
                                 f"but its role does not allow that")
            if pair.tgt not in tgt_ok:
                raise ValueError(f"pair {pair.key()} uses {pair.tgt!r} on the target side, "
                                 f"but its role does not allow that")

    @property
    def languages(self) -> frozenset[str]:
        return self.unseen | self.only_source | self.only_target | self.source_target


def enumerate_directions(langs: Iterable[str]) -> list[LanguagePair]:
    """All ordered pairs of distinct languages, sorted by (source, target)."""
    codes = sorted(set(langs))
    if len(codes) < 2:
        raise ValueError("need at least two languages to form directions")
    return [LanguagePair(s, t) for s in codes for t in codes if s != t]


def build_partition(registry_langs: Iterable[str], *,
                    unseen: Iterable[str] = (),
                    only_source: Iterable[str] = (),
                    only_target: Iterable[str] = (),
                    pair_rules: Iterable[LanguagePair],
                    name: str = "partition") -> PartitionSpec:
    """Assemble and validate a partition over a language set.

    Languages not named in unseen/only_source/only_target land in the
    source-and-target group.  Role violations in the explicit pair list
    raise with the offending pair named.
    """
    all_langs = set(registry_langs)
    unseen = frozenset(unseen)
    only_source = frozenset(only_source)
    only_target = frozenset(only_target)
    for group_name, group in (("unseen", unseen), ("only_source", only_source),
                              ("only_target", only_target)):
        stray = group - all_langs
        if stray:
            raise ValueError(f"{group_name} names languages outside the registry: {sorted(stray)}")
    source_target = frozenset(all_langs - unseen - only_source - only_target)
    pairs = frozenset(pair_rules)
    for pair in pairs:
        if pair.src not in all_langs or pair.tgt not in all_langs:
            raise ValueError(f"pair {pair.key()} names a language outside the registry")
    return PartitionSpec(name, unseen, only_source, only_target, source_target, pairs)


def classify(spec: PartitionSpec, direction: LanguagePair) -> Condition:
    """Assign the unique condition for one evaluation direction."""
    langs = spec.languages
    if direction.src not in langs:
        raise KeyError(f"unknown language {direction.src!r}")
    if direction.tgt not in langs:
        raise KeyError(f"unknown language {direction.tgt!r}")
    if direction in spec.train_pairs:
        return Condition.SAME_DIRECTION
    if direction.reverse() in spec.train_pairs:
        return Condition.REVERSED_DIRECTION
    src_seen = any(direction.src in (p.src, p.tgt) for p in spec.train_pairs)
    tgt_seen = any(direction.tgt in (p.src, p.tgt) for p in spec.train_pairs)
    if src_seen and tgt_seen:
        return Condition.UNSEEN_DIRECTION
    if not src_seen and tgt_seen:
        return Condition.UNSEEN_SRC
    if src_seen and not tgt_seen:
        return Condition.UNSEEN_TGT
    return Condition.UNSEEN_BOTH


def condition_matrix(spec: PartitionSpec, langs: Sequence[str] | None = None) -> str:
    """TSV grid of condition labels, source in rows, target in columns."""
    codes = list(langs) if langs is not None else sorted(spec.languages)
    rows = ["\t".join([""] + codes)]
    for s in codes:
        cells = [s]
        for t in codes:
            cells.append("" if s == t else classify(spec, LanguagePair(s, t)).value)
        rows.append("\t".join(cells))
    return "\n".join(rows) + "\n"


def save_partition(spec: PartitionSpec, path: str | Path, *, reconstruction: bool | None = None) -> None:
    payload = {
        "name": spec.name,
        "unseen": sorted(spec.unseen),
        "only_source": sorted(spec.only_source),
        "only_target": sorted(spec.only_target),
        "source_target": sorted(spec.source_target),
        "train_pairs": sorted(p.key() for p in spec.train_pairs),
    }
    if reconstruction is not None:
        payload["reconstruction"] = reconstruction
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def load_partition(path: str | Path) -> PartitionSpec:
    """Read a partition config; validation runs on load."""
    payload = json.loads(Path(path).read_text("utf-8"))
    missing = {"unseen", "only_source", "only_target", "source_target", "train_pairs"} - payload.keys()
    if missing:
        raise ValueError(f"partition config {path} lacks keys {sorted(missing)}")
    langs = (set(payload["unseen"]) | set(payload["only_source"])
             | set(payload["only_target"]) | set(payload["source_target"]))
    pairs = [LanguagePair.from_key(k) for k in payload["train_pairs"]]
    spec = build_partition(langs,
                           unseen=payload["unseen"],
                           only_source=payload["only_source"],
                           only_target=payload["only_target"],
                           pair_rules=pairs,
                           name=payload.get("name", Path(path).stem))
    declared = frozenset(payload["source_target"])
    if spec.source_target != declared:
        raise ValueError(
            f"partition config {path}: declared source_target {sorted(declared)} "
            f"does not match derived {sorted(spec.source_target)}")
    return spec
