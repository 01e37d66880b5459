"""End-to-end encoding pipeline: dispatch, clipping, fair cropping.

Encoding is lossless for covered input: decoding a tokenized sequence
reproduces the normalized sequence exactly.  ``fair_crop`` implements
the equal-character-budget truncation protocol used when comparing
tokenizers of different granularity on one text.
"""

from __future__ import annotations

from dataclasses import dataclass
from random import Random
from typing import Iterable, Sequence

from . import bpe, unigram
from .atoms import MARKER, NormalizedSeq, SPECIAL_NAMES, sentinel_for, stream_to_seq
from .errors import InconsistentSources
from .granularity import merge_units
from .model import BOS, BOS_ID, BPE, EOS, EOS_ID, PAD_ID, SubwordModel

_SENT_EXTRA = {sentinel_for(n): len(n) - 1 for n in SPECIAL_NAMES}


def _contrib(token: str) -> int:
    """Serialized characters this token adds (specials expand to names)."""
    return len(token) + sum(token.count(ch) * extra
                            for ch, extra in _SENT_EXTRA.items())


@dataclass
class TokenizedSeq:
    ids: list[int]
    tokens: list[str]
    model_ref: str

    def __len__(self) -> int:
        return len(self.ids)


def encode(model: SubwordModel, seq: NormalizedSeq, add_bos: bool = False,
           add_eos: bool = False) -> TokenizedSeq:
    """Tokenize a normalized sequence with either algorithm."""
    segment = bpe.segment_bpe if model.algorithm == BPE else unigram.viterbi_segment
    tokens: list[str] = []
    for unit in merge_units(seq, model.level):
        tokens.extend(segment(model, unit))
    return _finish(model, tokens, add_bos, add_eos)


def sample_encode(model: SubwordModel, seq: NormalizedSeq, alpha: float,
                  rng_seed: int, add_bos: bool = False,
                  add_eos: bool = False) -> TokenizedSeq:
    """Stochastic tokenization (UnigramLM models only)."""
    if model.algorithm == BPE:
        raise ValueError("stochastic segmentation needs a unigram model")
    rng = Random(rng_seed)
    tokens: list[str] = []
    for unit in merge_units(seq, model.level):
        tokens.extend(unigram.sample_segment(model, unit, alpha, rng))
    return _finish(model, tokens, add_bos, add_eos)


def _finish(model: SubwordModel, tokens: list[str], add_bos: bool,
            add_eos: bool) -> TokenizedSeq:
    if add_bos:
        tokens = [BOS] + tokens
    if add_eos:
        tokens = tokens + [EOS]
    ids = [model.id_of(t) for t in tokens]
    return TokenizedSeq(ids, tokens, model.identity())


def decode(model: SubwordModel, ids: Iterable[int]) -> NormalizedSeq:
    """Inverse of encode for covered input; UNK pieces decode literally."""
    pieces = []
    for idx in ids:
        if idx in (PAD_ID, BOS_ID, EOS_ID):
            continue
        pieces.append(model.token_of(idx))
    return stream_to_seq("".join(pieces))


def clip(ts: TokenizedSeq, max_len: int) -> TokenizedSeq:
    """Keep the first max_len tokens; no-op when already short enough."""
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    if len(ts.ids) <= max_len:
        return ts
    return TokenizedSeq(ts.ids[:max_len], ts.tokens[:max_len], ts.model_ref)


def detokenized_length(tokens: Sequence[str]) -> int:
    """Character length of the serialized text a token prefix decodes to."""
    total = sum(_contrib(t) for t in tokens)
    if tokens and tokens[0].startswith(MARKER):
        total -= 1  # leading marker strips to nothing
    return total


def fair_crop(tokenized: Sequence[TokenizedSeq], max_len: int) -> list[TokenizedSeq]:
    """Crop parallel tokenizations of one text to a common character budget.

    Each sequence is first clipped to ``max_len`` tokens; the smallest
    detokenized character length then becomes the budget, and every
    sequence is cut to the longest token prefix within it.
    """
    texts = ["".join(ts.tokens) for ts in tokenized]
    longest = max(texts, key=len, default="")
    for ts, text in zip(tokenized, texts):
        if not longest.startswith(text):
            raise InconsistentSources(
                f"sequence from model {ts.model_ref[:24]} does not share "
                "the underlying text")

    clipped = [clip(ts, max_len) for ts in tokenized]
    budget = min(detokenized_length(ts.tokens) for ts in clipped)
    out = []
    for ts in clipped:
        keep = 0
        length = -1 if ts.tokens and ts.tokens[0].startswith(MARKER) else 0
        for k, tok in enumerate(ts.tokens):
            length += _contrib(tok)
            if length > budget:
                break
            keep = k + 1
        out.append(TokenizedSeq(ts.ids[:keep], ts.tokens[:keep], ts.model_ref))
    return out
