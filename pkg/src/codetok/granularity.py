"""Composite-token granularity levels 0..4.

A level constrains which candidate tokens a subword trainer may form:

* Level 0: no composite tokens; every token lies within one atom.
* Level 1: tokens made purely of punctuation / special atoms are also
  allowed (statement-closing runs like ``] ) :``).
* Level 2: additionally a dot may fuse with the following word
  (``.shape``-style API tokens).
* Level 3: any combination is allowed except mixing words with special
  atoms; pure punctuation/special combinations stay legal.
* Level 4: anything goes.

Levels 0-2 are equivalently expressed as pre-token boundaries: maximal
spans inside which merges are free.  Levels 3-4 have no boundary form
and are enforced by the ``token_valid`` predicate alone.
"""

from __future__ import annotations

from dataclasses import dataclass

from .atoms import MARKER, PUNCT, SENTINEL_CHARS, SPECIAL, WORD, NormalizedSeq, is_word_char
from .errors import UnsupportedLevel

LEVELS = (0, 1, 2, 3, 4)

# Fragment classes between markers inside a candidate token.
_W, _P, _S, _BAD = 0, 1, 2, 3


def _frag_class(frag: str) -> int:
    if len(frag) == 1:
        if frag in SENTINEL_CHARS:
            return _S
        if is_word_char(frag):
            return _W
        return _P
    if all(is_word_char(c) for c in frag):
        return _W
    return _BAD


def _parse(candidate: str):
    """Split a candidate into (lead_marker, fragments, trail_marker).

    Returns None for strings that cannot be substrings of any marker
    stream (empty fragments between two markers, empty candidate).
    """
    if not candidate:
        return None
    pieces = candidate.split(MARKER)
    lead = pieces[0] == ""
    trail = len(pieces) > 1 and pieces[-1] == ""
    frags = pieces[1 if lead else 0:len(pieces) - 1 if trail else len(pieces)]
    if any(f == "" for f in frags):
        return None
    return lead, frags, trail


def token_valid(candidate: str, level: int) -> bool:
    """Whether a candidate token (marker-stream form) is legal at a level.

    A token never ends with a dangling marker: the marker belongs to the
    atom it precedes.  The bare marker itself is the one exception; it
    is a covered character and must stay emittable at every level.
    """
    if level == 4:
        return True
    if candidate == MARKER:
        return True
    parsed = _parse(candidate)
    if parsed is None:
        return False
    _, frags, trail = parsed
    if trail or not frags:
        return False
    classes = [_frag_class(f) for f in frags]
    if _BAD in classes:
        return False

    word_fragment = len(frags) == 1 and classes[0] == _W
    pure_punct = all(c in (_P, _S) for c in classes)

    if level == 0:
        return len(frags) == 1
    if level == 1:
        return word_fragment or pure_punct
    if level == 2:
        if word_fragment or pure_punct:
            return True
        return (len(frags) == 2 and frags[0] == "." and classes[1] == _W)
    if level == 3:
        return pure_punct or _S not in classes
    raise ValueError(f"unknown level {level}")


@dataclass(frozen=True)
class PreToken:
    """Contiguous atom span [start, end) with its marker-stream form."""

    start: int
    end: int
    char_form: str


def pretokenize(seq: NormalizedSeq, level: int) -> list[PreToken]:
    """Merge-scope boundaries for levels 0-2.

    Level 0 isolates every atom; level 1 groups maximal punctuation/
    special runs; level 2 additionally fuses a dot with the word that
    follows it (such a dot leaves its punctuation run).
    """
    if level not in (0, 1, 2):
        raise UnsupportedLevel(f"level {level} has no boundary form")
    atoms = seq.atoms
    spans: list[tuple[int, int]] = []
    if level == 0:
        spans = [(i, i + 1) for i in range(len(atoms))]
    else:
        i = 0
        n = len(atoms)
        while i < n:
            a = atoms[i]
            if a.cls == WORD:
                spans.append((i, i + 1))
                i += 1
                continue
            if (level == 2 and a.cls == PUNCT and a.text == "."
                    and i + 1 < n and atoms[i + 1].cls == WORD):
                spans.append((i, i + 2))
                i += 2
                continue
            j = i
            while j < n and atoms[j].cls in (PUNCT, SPECIAL):
                if (level == 2 and atoms[j].text == "."
                        and j + 1 < n and atoms[j + 1].cls == WORD):
                    break
                j += 1
            spans.append((i, j))
            i = j

    return [PreToken(s, e, NormalizedSeq(atoms[s:e]).to_stream())
            for s, e in spans]


def merge_units(seq: NormalizedSeq, level: int) -> list[str]:
    """Char streams inside which merges are confined.

    Pre-token forms at levels 0-2; the whole-sequence stream at levels
    3-4 (there the validity predicate does the constraining).
    """
    if level in (0, 1, 2):
        return [pt.char_form for pt in pretokenize(seq, level)]
    stream = seq.to_stream()
    return [stream] if stream else []


def _is_dot_seam(candidate: str) -> bool:
    """Pure punctuation/special candidate ending in a (possibly marker-
    trailed) dot fragment: the known level-2 seam where a boundary-
    crossing substring is still string-valid (it could lie inside a
    dot-free context's punctuation run)."""
    parsed = _parse(candidate)
    if parsed is None:
        return False
    _, frags, _ = parsed
    return bool(frags) and frags[-1] == "." and all(
        _frag_class(f) in (_P, _S) for f in frags)


def boundary_predicate_agreement(seq: NormalizedSeq, level: int) -> bool:
    """Self-check: pre-token boundaries and token_valid tell one story.

    Every producible substring (one not ending in a dangling marker)
    lying inside a single pre-token must be valid, and every substring
    crossing a boundary must be invalid.  At level 2 a crossing
    substring that swallows the dot of a following dot-word pre-token
    is exempt from the second direction: as a string it is a legal
    punctuation combination, it just cannot be formed at that position
    because merges never cross pre-tokens.
    """
    pts = pretokenize(seq, level)
    stream = NormalizedSeq(seq.atoms).to_stream()
    owner = []  # pre-token index of each stream position
    for k, pt in enumerate(pts):
        owner.extend([k] * len(pt.char_form))
    if len(owner) != len(stream):
        return False
    n = len(stream)
    for i in range(n):
        for j in range(i + 1, n + 1):
            sub = stream[i:j]
            inside = owner[i] == owner[j - 1]
            valid = token_valid(sub, level)
            dangling = sub != MARKER and sub.endswith(MARKER)
            if inside and not valid and not dangling:
                return False
            if not inside and valid:
                if level == 2 and _is_dot_seam(sub):
                    continue
                return False
    return True
