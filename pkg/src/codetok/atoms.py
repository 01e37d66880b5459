"""Atoms and normalized sequences: the interchange representation.

A normalized sequence is an ordered list of atoms: word runs, single
punctuation characters, and the special structure tokens NEW_LINE /
INDENT / DEDENT.  It serializes to one line of space-separated atom
texts, which is the corpus format every other module consumes.

For subword training a sequence is lowered to a *marker stream*: each
atom is prefixed with the whitespace marker U+2581 and special atoms are
folded to single private-use sentinel characters so they behave as
indivisible symbols during segmentation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import CorpusFormatError

# Whitespace marker: stands for the single space between atoms.
MARKER = "▁"

WORD = "WORD"
PUNCT = "PUNCT"
SPECIAL = "SPECIAL"

NEW_LINE = "NEW_LINE"
INDENT = "INDENT"
DEDENT = "DEDENT"
SPECIAL_NAMES = (NEW_LINE, INDENT, DEDENT)

# Single-codepoint stand-ins for special atoms inside marker streams.
_SENTINELS = {NEW_LINE: "", INDENT: "", DEDENT: ""}
_SENTINEL_TO_NAME = {s: n for n, s in _SENTINELS.items()}
SENTINEL_CHARS = frozenset(_SENTINELS.values())

_WORD_RE = re.compile(r"\w+", re.UNICODE)


def is_word_char(ch: str) -> bool:
    """Word characters: underscore plus anything Unicode-alphanumeric."""
    return ch == "_" or ch.isalnum()


def is_word_text(text: str) -> bool:
    return bool(text) and all(is_word_char(c) for c in text)


def classify(text: str) -> str:
    """Atom class implied by an atom's text."""
    if text in SPECIAL_NAMES:
        return SPECIAL
    if is_word_text(text):
        return WORD
    if len(text) == 1 and not text.isspace():
        return PUNCT
    raise CorpusFormatError(f"not a valid atom text: {text!r}")


@dataclass(frozen=True)
class Atom:
    text: str
    cls: str

    def __post_init__(self):
        if self.cls not in (WORD, PUNCT, SPECIAL):
            raise ValueError(f"bad atom class {self.cls!r}")


def atom(text: str) -> Atom:
    return Atom(text, classify(text))


def atomize(fragment: str) -> list[Atom]:
    """Split arbitrary text into WORD / PUNCT atoms.

    Word runs stay together; every other non-space character becomes its
    own punctuation atom.  Whitespace only separates.
    """
    out = []
    i = 0
    n = len(fragment)
    while i < n:
        ch = fragment[i]
        if ch.isspace():
            i += 1
            continue
        m = _WORD_RE.match(fragment, i)
        if m and is_word_char(ch):
            text = m.group()
            # Reserved structure names always read back as specials, so a
            # word spelled like one must be special here too or the
            # serialized corpus line would not round-trip.
            cls = SPECIAL if text in SPECIAL_NAMES else WORD
            out.append(Atom(text, cls))
            i = m.end()
        else:
            out.append(Atom(ch, PUNCT))
            i += 1
    return out


# Source languages of a normalized sequence.
LANG_INDENTED = "indented"
LANG_BRACED = "braced"
LANG_TEXT = "text"


@dataclass(frozen=True)
class NormalizedSeq:
    atoms: tuple[Atom, ...]
    source_lang: str = LANG_TEXT

    def __len__(self) -> int:
        return len(self.atoms)

    def __iter__(self) -> Iterator[Atom]:
        return iter(self.atoms)

    def serialize(self) -> str:
        """One line: space-separated atom texts; specials by name."""
        return " ".join(a.text for a in self.atoms)

    def to_stream(self) -> str:
        """Marker stream: every atom marker-prefixed, specials folded."""
        parts = []
        for a in self.atoms:
            parts.append(MARKER)
            parts.append(_SENTINELS[a.text] if a.cls == SPECIAL else a.text)
        return "".join(parts)


def deserialize(line: str, source_lang: str = LANG_TEXT) -> NormalizedSeq:
    """Inverse of NormalizedSeq.serialize (whitespace-delimited atoms)."""
    atoms = tuple(atom(tok) for tok in line.split())
    return NormalizedSeq(atoms, source_lang)


def seq_from_atoms(atoms: Iterable[Atom], source_lang: str = LANG_TEXT) -> NormalizedSeq:
    return NormalizedSeq(tuple(atoms), source_lang)


def stream_to_serialized(stream: str) -> str:
    """Map a marker stream back to the serialized one-line form."""
    text = stream.replace(MARKER, " ")
    for sent, name in _SENTINEL_TO_NAME.items():
        text = text.replace(sent, name)
    return text.lstrip(" ")


def stream_to_seq(stream: str, source_lang: str = LANG_TEXT) -> NormalizedSeq:
    """Parse a marker stream into atoms.

    Chunks that are not single atoms (possible only for streams that did
    not come from a real sequence, e.g. containing UNK pieces) are
    re-atomized rather than rejected.
    """
    atoms: list[Atom] = []
    for chunk in stream.split(MARKER):
        if not chunk:
            continue
        pos = 0
        for m in re.finditer("|".join(sorted(SENTINEL_CHARS)), chunk):
            if m.start() > pos:
                atoms.extend(atomize(chunk[pos:m.start()]))
            atoms.append(Atom(_SENTINEL_TO_NAME[m.group()], SPECIAL))
            pos = m.end()
        if pos < len(chunk):
            atoms.extend(atomize(chunk[pos:]))
    return NormalizedSeq(tuple(atoms), source_lang)


def sentinel_for(name: str) -> str:
    return _SENTINELS[name]


def specials_balanced(seq: NormalizedSeq) -> bool:
    """Every DEDENT must have a matching earlier INDENT."""
    depth = 0
    for a in seq.atoms:
        if a.text == INDENT:
            depth += 1
        elif a.text == DEDENT:
            depth -= 1
            if depth < 0:
                return False
    return True
