"""Corpus and vocabulary measurements.

Covers sequence-length comparisons, vocabulary composition by token
shape, alignment of produced subtokens with camelCase / snake_case
identifier structure, token frequency profiles, cross-language
frequency contrast, and input/output subtoken intersection.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from random import Random
from typing import Sequence

from . import bpe as _bpe
from . import unigram as _unigram
from .atoms import MARKER, PUNCT, WORD, NormalizedSeq, is_word_char
from .codec import encode
from .errors import EmptyCorpus
from .granularity import merge_units
from .model import BPE, SubwordModel

_OPENING = set("([{<")
_CLOSING = set(")]}>")


def _content(token: str) -> str:
    return token.replace(MARKER, "")


def is_composite(token: str) -> bool:
    """Composite tokens span more than one atom: internal marker present."""
    return MARKER in token[1:]


def is_punct_special_only(token: str) -> bool:
    content = _content(token)
    return bool(content) and not any(is_word_char(c) for c in content)


def is_textual(token: str) -> bool:
    """No punctuation characters and no special atoms."""
    content = _content(token)
    return bool(content) and all(is_word_char(c) for c in content)


def _segment(model: SubwordModel, unit: str) -> list[str]:
    if model.algorithm == BPE:
        return _bpe.segment_bpe(model, unit)
    return _unigram.viterbi_segment(model, unit)


def _token_count(model: SubwordModel, seq: NormalizedSeq) -> int:
    return sum(len(_segment(model, unit))
               for unit in merge_units(seq, model.level))


# ---------------------------------------------------------------- lengths

@dataclass
class LengthEntry:
    label: str
    average_tokens: float
    delta_pct: float


@dataclass
class LengthReport:
    baseline_label: str
    n_sequences: int
    entries: list[LengthEntry]

    def to_dict(self) -> dict:
        return {
            "baseline": self.baseline_label,
            "n_sequences": self.n_sequences,
            "entries": [vars(e) for e in self.entries],
        }


def length_report(models: Sequence[SubwordModel], corpus: Sequence[NormalizedSeq],
                  baseline_index: int = 0,
                  labels: Sequence[str] | None = None) -> LengthReport:
    """Average unclipped token counts per model, with percent deltas
    against the designated baseline."""
    if not corpus:
        raise EmptyCorpus("length report needs at least one sequence")
    if labels is None:
        labels = [f"{m.algorithm}-L{m.level}-{m.vocab_size}" for m in models]
    averages = []
    for model in models:
        total = sum(_token_count(model, seq) for seq in corpus)
        averages.append(total / len(corpus))
    base = averages[baseline_index]
    entries = [
        LengthEntry(label, avg, 100.0 * (avg - base) / base if base else 0.0)
        for label, avg in zip(labels, averages)
    ]
    return LengthReport(labels[baseline_index], len(corpus), entries)


# ------------------------------------------------------------ composition

@dataclass
class CompositionReport:
    vocab_size: int
    composite_fraction: float
    punct_only_fraction: float
    bracket_closing_only: float
    bracket_opening_only: float
    bracket_both: float

    def to_dict(self) -> dict:
        return vars(self).copy()


def vocab_composition(model: SubwordModel) -> CompositionReport:
    """Classify vocabulary tokens by atom span and character content.

    Fractions are over the full vocabulary size; bracket classes are
    over the punctuation-only composite tokens (tokens without any
    bracket leave the three classes summing below one).
    """
    composites = [t for t in model.tokens if is_composite(t)]
    punct_only = [t for t in composites if is_punct_special_only(t)]
    closing = opening = both = 0
    for t in punct_only:
        content = _content(t)
        has_open = any(c in _OPENING for c in content)
        has_close = any(c in _CLOSING for c in content)
        if has_open and has_close:
            both += 1
        elif has_open:
            opening += 1
        elif has_close:
            closing += 1
    denom = max(1, len(punct_only))
    return CompositionReport(
        vocab_size=model.vocab_size,
        composite_fraction=len(composites) / model.vocab_size,
        punct_only_fraction=len(punct_only) / model.vocab_size,
        bracket_closing_only=closing / denom,
        bracket_opening_only=opening / denom,
        bracket_both=both / denom,
    )


# ------------------------------------------------------- native alignment

def native_split(identifier: str) -> list[str]:
    """Split an identifier at snake_case and camelCase boundaries.

    Underscores become their own pieces; an uppercase run followed by
    lowercase splits before its final uppercase letter.  Pieces
    concatenate back to the input.
    """
    pieces: list[str] = []
    chunk_start = 0
    for k, ch in enumerate(identifier):
        if ch == "_":
            if k > chunk_start:
                pieces.extend(_camel_split(identifier[chunk_start:k]))
            pieces.append("_")
            chunk_start = k + 1
    if chunk_start < len(identifier):
        pieces.extend(_camel_split(identifier[chunk_start:]))
    return pieces


def _camel_split(chunk: str) -> list[str]:
    out = []
    start = 0
    for i in range(1, len(chunk)):
        cur = chunk[i]
        if not cur.isupper():
            continue
        prev = chunk[i - 1]
        nxt = chunk[i + 1] if i + 1 < len(chunk) else ""
        if not prev.isupper() or (nxt and nxt.islower()):
            out.append(chunk[start:i])
            start = i
    out.append(chunk[start:])
    return out


@dataclass
class AlignmentSide:
    label: str
    jaccard_native: float
    jaccard_resplit: float
    rate_single_upper: float
    rate_underscore_upper: float
    rate_merged_native: float


@dataclass
class AlignmentReport:
    sample_size: int
    requested_size: int
    insufficient_sample: bool
    empty_sample: bool
    sides: list[AlignmentSide]

    def to_dict(self) -> dict:
        return {
            "sample_size": self.sample_size,
            "requested_size": self.requested_size,
            "insufficient_sample": self.insufficient_sample,
            "empty_sample": self.empty_sample,
            "sides": [vars(s) for s in self.sides],
        }


def _jaccard(a: set, b: set) -> float:
    if not a and not b:
        return 1.0
    union = a | b
    return len(a & b) / len(union)


def alignment_report(model_a: SubwordModel, model_b: SubwordModel,
                     corpus: Sequence[NormalizedSeq], sample_size: int,
                     rng_seed: int = 0,
                     labels: tuple[str, str] = ("a", "b")) -> AlignmentReport:
    """Compare both models' identifier splits against the native one.

    Samples identifiers with at least two native pieces on which the
    two models disagree; reports mean Jaccard similarity to the native
    piece set, the same after re-splitting produced tokens natively,
    and the uppercase-detachment / native-merge pattern rates.
    """
    seen: dict[str, None] = {}
    for seq in corpus:
        for a in seq.atoms:
            if a.cls == WORD:
                seen.setdefault(a.text, None)

    qualifying: list[tuple[str, list[str], list[str]]] = []
    for word in seen:
        if len(native_split(word)) < 2:
            continue
        unit = MARKER + word
        seg_a = _segment(model_a, unit)
        seg_b = _segment(model_b, unit)
        if seg_a != seg_b:
            qualifying.append((word, seg_a, seg_b))

    if len(qualifying) > sample_size:
        rng = Random(rng_seed)
        qualifying = rng.sample(qualifying, sample_size)
    report = AlignmentReport(
        sample_size=len(qualifying),
        requested_size=sample_size,
        insufficient_sample=0 < len(qualifying) < sample_size,
        empty_sample=not qualifying,
        sides=[],
    )
    for label, idx in ((labels[0], 1), (labels[1], 2)):
        jn = jr = single = underscore = merged = 0.0
        for item in qualifying:
            word, produced = item[0], item[idx]
            native = set(native_split(word))
            contents = [_content(t) for t in produced if _content(t)]
            jn += _jaccard(native, set(contents))
            resplit = {p for c in contents for p in native_split(c)}
            jr += _jaccard(native, resplit)
            single += any(len(c) == 1 and c.isupper() for c in contents)
            underscore += any(len(c) == 2 and c[0] == "_" and c[1].isupper()
                              for c in contents)
            merged += any(len(native_split(c)) >= 2 for c in contents)
        n = max(1, len(qualifying))
        report.sides.append(AlignmentSide(
            label, jn / n, jr / n, single / n, underscore / n, merged / n))
    return report


# -------------------------------------------------------------- frequency

@dataclass
class FrequencyProfile:
    model_label: str
    total_tokens: int
    entries: list[tuple[str, int]]  # (token, count), descending

    def to_dict(self) -> dict:
        return {
            "model": self.model_label,
            "total_tokens": self.total_tokens,
            "entries": [{"rank": i + 1, "token": t, "count": c}
                        for i, (t, c) in enumerate(self.entries)],
        }

    def to_csv_rows(self):
        yield "rank,count,token"
        for i, (t, c) in enumerate(self.entries):
            quoted = t.replace('"', '""')
            yield f'{i + 1},{c},"{quoted}"'


def frequency_profile(model: SubwordModel, corpus: Sequence[NormalizedSeq],
                      label: str = "model") -> FrequencyProfile:
    """Occurrence counts of the model's tokens over a corpus encoding."""
    if not corpus:
        raise EmptyCorpus("frequency profile needs at least one sequence")
    counts: Counter = Counter()
    for seq in corpus:
        for unit in merge_units(seq, model.level):
            counts.update(_segment(model, unit))
    entries = sorted(counts.items(), key=lambda tc: (-tc[1], tc[0]))
    return FrequencyProfile(label, sum(counts.values()), entries)


# ------------------------------------------------------------ cross-language

@dataclass
class CrossLangReport:
    f_hi: float
    f_lo: float
    vocab_tokens: int
    language_specific: int
    language_specific_fraction: float
    per_token: list[tuple[str, float, float]] = field(repr=False, default_factory=list)

    def to_dict(self) -> dict:
        return {
            "f_hi": self.f_hi,
            "f_lo": self.f_lo,
            "vocab_tokens": self.vocab_tokens,
            "language_specific": self.language_specific,
            "language_specific_fraction": self.language_specific_fraction,
        }


def cross_language_report(model: SubwordModel, corpus_a: Sequence[NormalizedSeq],
                          corpus_b: Sequence[NormalizedSeq],
                          f_hi: float = 100.0, f_lo: float = 1.0) -> CrossLangReport:
    """Fraction of vocabulary tokens frequent in one language (at least
    f_hi per million) and rare in the other (at most f_lo per million)."""
    if f_hi <= f_lo or f_lo < 0:
        raise ValueError("thresholds must satisfy f_hi > f_lo >= 0")
    profiles = []
    for corpus in (corpus_a, corpus_b):
        prof = frequency_profile(model, corpus)
        scale = 1e6 / prof.total_tokens
        profiles.append({t: c * scale for t, c in prof.entries})
    fa, fb = profiles
    per_token = [(t, fa.get(t, 0.0), fb.get(t, 0.0)) for t in model.tokens]
    specific = sum(1 for _, a, b in per_token
                   if (a >= f_hi and b <= f_lo) or (b >= f_hi and a <= f_lo))
    return CrossLangReport(
        f_hi=f_hi, f_lo=f_lo,
        vocab_tokens=len(model.tokens),
        language_specific=specific,
        language_specific_fraction=specific / max(1, len(model.tokens)),
        per_token=per_token,
    )


# ------------------------------------------------------------ intersection

@dataclass
class IntersectionReport:
    n_pairs: int
    mean_jaccard: float
    both_empty_pairs: int

    def to_dict(self) -> dict:
        return vars(self).copy()


def io_intersection(model: SubwordModel,
                    pairs: Sequence[tuple[NormalizedSeq, NormalizedSeq]]
                    ) -> IntersectionReport:
    """Mean Jaccard similarity between the textual-subtoken sets of
    paired input and output sequences."""
    total = 0.0
    both_empty = 0
    for src, tgt in pairs:
        sets = []
        for seq in (src, tgt):
            toks = encode(model, seq).tokens
            sets.append({_content(t) for t in toks if is_textual(t)})
        if not sets[0] and not sets[1]:
            both_empty += 1
        total += _jaccard(sets[0], sets[1])
    n = len(pairs)
    return IntersectionReport(n, total / n if n else 0.0, both_empty)


# ---------------------------------------------------------- corpus shape

def punctuation_char_fraction(corpus: Sequence[NormalizedSeq]) -> float:
    """Fraction of corpus characters that are punctuation.

    Counted over the non-space characters of the serialized corpus:
    every atom contributes its text, so structure atoms count as their
    literal NEW_LINE / INDENT / DEDENT spellings.
    """
    punct = total = 0
    for seq in corpus:
        for a in seq.atoms:
            total += len(a.text)
            if a.cls == PUNCT:
                punct += len(a.text)
    if total == 0:
        raise EmptyCorpus("no characters in corpus")
    return punct / total
