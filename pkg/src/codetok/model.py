"""Trained subword models: shared bookkeeping, serialization, coverage.

Both algorithms produce a ``SubwordModel``.  The token/ID mapping is
fixed: IDs 0-3 are the reserved specials, followed by the model's
tokens in the order stored in ``tokens``.  Model files are a single
versioned JSON document with a trailing content checksum.
"""

from __future__ import annotations

import hashlib
import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

from .atoms import MARKER, SPECIAL, SPECIAL_NAMES, NormalizedSeq, sentinel_for
from .errors import (
    ChecksumMismatch,
    EmptyCorpus,
    FormatVersionMismatch,
    UnknownId,
)

FORMAT_VERSION = 1

PAD, UNK, BOS, EOS = "<pad>", "<unk>", "<s>", "</s>"
RESERVED = (PAD, UNK, BOS, EOS)
PAD_ID, UNK_ID, BOS_ID, EOS_ID = 0, 1, 2, 3

BPE = "bpe"
UNIGRAM = "unigram"

# Marker and folded special atoms are always part of the alphabet.
ALWAYS_COVERED = (MARKER,) + tuple(sentinel_for(n) for n in SPECIAL_NAMES)


@dataclass
class SubwordModel:
    """An immutable trained tokenizer (mutated only by its lazy caches)."""

    algorithm: str
    level: int
    coverage: float
    alphabet: frozenset[str]
    tokens: tuple[str, ...]                    # id order, specials excluded
    merges: tuple[tuple[str, str], ...] = ()   # bpe
    scores: dict[str, float] = field(default_factory=dict)  # unigram
    checksum: str = ""

    _ids: dict[str, int] | None = field(default=None, repr=False, compare=False)
    _segment_cache: dict[str, tuple[str, ...]] = field(
        default_factory=dict, repr=False, compare=False)

    @property
    def vocab_size(self) -> int:
        return len(RESERVED) + len(self.tokens)

    def id_of(self, token: str) -> int:
        if self._ids is None:
            ids = {t: i for i, t in enumerate(RESERVED)}
            for i, t in enumerate(self.tokens):
                ids[t] = len(RESERVED) + i
            self._ids = ids
        return self._ids[token]

    def token_of(self, idx: int) -> str:
        if 0 <= idx < len(RESERVED):
            return RESERVED[idx]
        if len(RESERVED) <= idx < self.vocab_size:
            return self.tokens[idx - len(RESERVED)]
        raise UnknownId(f"id {idx} out of range for vocab of {self.vocab_size}")

    def identity(self) -> str:
        """Stable content hash, also used as the file checksum."""
        if not self.checksum:
            self.checksum = _digest(_document(self))
        return self.checksum


def _document(model: SubwordModel) -> dict:
    doc = {
        "format_version": FORMAT_VERSION,
        "algorithm": model.algorithm,
        "level": model.level,
        "coverage": model.coverage,
        "marker": MARKER,
        "specials": list(RESERVED),
        "alphabet": sorted(model.alphabet),
        "vocab_size": model.vocab_size,
    }
    if model.algorithm == BPE:
        doc["vocab"] = [{"token": t, "rank": i} for i, t in enumerate(model.tokens)]
        doc["merges"] = [[left, right] for left, right in model.merges]
    else:
        doc["vocab"] = [{"token": t, "score": model.scores[t]} for t in model.tokens]
    return doc


def _digest(doc: dict) -> str:
    blob = json.dumps(doc, sort_keys=True, ensure_ascii=True,
                      separators=(",", ":")).encode()
    return "sha256:" + hashlib.sha256(blob).hexdigest()


def save(model: SubwordModel, path) -> None:
    doc = _document(model)
    doc["checksum"] = _digest(doc)
    model.checksum = doc["checksum"]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, ensure_ascii=True, indent=1)
        fh.write("\n")


def load(path) -> SubwordModel:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatVersionMismatch(f"{path}: not a model file ({exc})") from exc
    if not isinstance(doc, dict) or doc.get("format_version") != FORMAT_VERSION:
        raise FormatVersionMismatch(
            f"{path}: expected format_version {FORMAT_VERSION}, "
            f"got {doc.get('format_version')!r}")
    stated = doc.pop("checksum", None)
    if stated is None or _digest(doc) != stated:
        raise ChecksumMismatch(f"{path}: checksum mismatch")

    algorithm = doc["algorithm"]
    tokens = tuple(entry["token"] for entry in doc["vocab"])
    model = SubwordModel(
        algorithm=algorithm,
        level=int(doc["level"]),
        coverage=float(doc["coverage"]),
        alphabet=frozenset(doc["alphabet"]),
        tokens=tokens,
        merges=tuple((l, r) for l, r in doc.get("merges", [])),
        scores={e["token"]: float(e["score"]) for e in doc["vocab"]}
        if algorithm == UNIGRAM else {},
        checksum=stated,
    )
    return model


def char_frequencies(corpus: Iterable[NormalizedSeq]) -> Counter:
    """Character mass over atom texts (specials count as one symbol)."""
    freq: Counter = Counter()
    for seq in corpus:
        for a in seq.atoms:
            if a.cls == SPECIAL:
                freq[sentinel_for(a.text)] += 1
            else:
                freq.update(a.text)
    return freq


def coverage_charset(corpus: Iterable[NormalizedSeq], coverage: float) -> frozenset[str]:
    """Retained characters covering at least ``coverage`` of char mass.

    The rarest characters are dropped while their cumulative mass stays
    within the allowed 1 - coverage tail; the marker and special-atom
    symbols are always retained.
    """
    if not 0 < coverage <= 1:
        raise ValueError(f"coverage must be in (0, 1], got {coverage}")
    freq = char_frequencies(corpus)
    return charset_from_frequencies(freq, coverage)


def charset_from_frequencies(freq: Counter, coverage: float) -> frozenset[str]:
    freq = Counter(freq)
    for ch in ALWAYS_COVERED:
        freq.pop(ch, None)
    total = sum(freq.values())
    if total == 0:
        raise EmptyCorpus("no characters in corpus")
    allowed_tail = (1.0 - coverage) * total
    dropped_mass = 0
    dropped = set()
    for ch, count in sorted(freq.items(), key=lambda kv: (kv[1], kv[0])):
        if dropped_mass + count <= allowed_tail:
            dropped_mass += count
            dropped.add(ch)
        else:
            break
    kept = set(freq) - dropped
    kept.update(ALWAYS_COVERED)
    return frozenset(kept)
