"""Byte-pair-encoding trainer and encoder under a granularity constraint.

Training builds the vocabulary bottom-up: starting from the covered
characters, the most frequent adjacent symbol pair is merged repeatedly
until the vocabulary budget is reached or no legal pair occurs at least
twice.  Pairs whose concatenation violates the granularity level are
never merged; at levels 0-2 the pre-token boundaries make every pair
legal by construction.

Determinism: ties between equally frequent pairs break toward the
lexicographically smallest (left, right) token strings.
"""

from __future__ import annotations

import heapq
from collections import Counter
from typing import Iterable

from .atoms import NormalizedSeq
from .errors import EmptyCorpus, VocabTooSmall
from .granularity import merge_units, token_valid
from .model import (
    BPE,
    RESERVED,
    UNK,
    SubwordModel,
    char_frequencies,
    charset_from_frequencies,
)

MIN_PAIR_FREQ = 2


def _iter_pairs(symbols: list[str]):
    return zip(symbols, symbols[1:])


def _apply_merge(symbols: list[str], left: str, right: str) -> list[str]:
    """Replace occurrences of (left, right) left-to-right, non-overlapping."""
    out = []
    i = 0
    n = len(symbols)
    while i < n:
        if i + 1 < n and symbols[i] == left and symbols[i + 1] == right:
            out.append(left + right)
            i += 2
        else:
            out.append(symbols[i])
            i += 1
    return out


def train_bpe(corpus: Iterable[NormalizedSeq], level: int, vocab_size: int,
              coverage: float = 0.9999) -> SubwordModel:
    """Train a BPE model; deterministic given corpus and parameters."""
    units: Counter = Counter()
    char_freq: Counter = Counter()
    for seq in corpus:
        char_freq.update(char_frequencies([seq]))
        for unit in merge_units(seq, level):
            units[unit] += 1
    if not units:
        raise EmptyCorpus("no sequences to train on")
    alphabet = charset_from_frequencies(char_freq, coverage)

    budget = vocab_size - len(RESERVED) - len(alphabet)
    if budget < 0:
        raise VocabTooSmall(
            f"vocab_size {vocab_size} below alphabet size "
            f"{len(alphabet)} + {len(RESERVED)} reserved")

    # Deduplicated working units: symbol lists with corpus counts.
    work = [([c if c in alphabet else UNK for c in unit], count)
            for unit, count in sorted(units.items())]

    # Level 4 allows anything; below it every merge result must be a
    # legal token (this also blocks dangling-marker pieces at 0-2).
    check = None if level == 4 else (lambda l, r: token_valid(l + r, level))
    existing = set(alphabet)

    pair_counts: Counter = Counter()
    where: dict[tuple[str, str], set[int]] = {}
    for idx, (symbols, count) in enumerate(work):
        for pair in _iter_pairs(symbols):
            if UNK in pair:
                continue
            pair_counts[pair] += count
            where.setdefault(pair, set()).add(idx)

    heap = [(-c, p) for p, c in pair_counts.items()]
    heapq.heapify(heap)

    merges: list[tuple[str, str]] = []
    while len(merges) < budget and heap:
        neg, pair = heapq.heappop(heap)
        count = pair_counts.get(pair, 0)
        if count != -neg:
            continue  # stale entry
        if count < MIN_PAIR_FREQ:
            break
        left, right = pair
        merged = left + right
        if merged in existing or (check and not check(left, right)):
            # Not mergeable: retire so it stops dominating the heap.
            del pair_counts[pair]
            continue
        merges.append(pair)
        existing.add(merged)

        for idx in sorted(where.get(pair, ())):
            symbols, count_u = work[idx]
            if count_u == 0:
                continue
            new_symbols = _apply_merge(symbols, left, right)
            if len(new_symbols) == len(symbols):
                continue
            touched = set()
            for p in _iter_pairs(symbols):
                if UNK not in p:
                    pair_counts[p] -= count_u
                    touched.add(p)
            for p in _iter_pairs(new_symbols):
                if UNK not in p:
                    pair_counts[p] += count_u
                    where.setdefault(p, set()).add(idx)
                    touched.add(p)
            work[idx] = (new_symbols, count_u)
            for p in touched:
                c = pair_counts[p]
                if c <= 0:
                    pair_counts.pop(p, None)
                else:
                    heapq.heappush(heap, (-c, p))
        pair_counts.pop(pair, None)

    tokens = tuple(sorted(alphabet)) + tuple(l + r for l, r in merges)
    return SubwordModel(
        algorithm=BPE,
        level=level,
        coverage=coverage,
        alphabet=alphabet,
        tokens=tokens,
        merges=tuple(merges),
    )


def _ranks(model: SubwordModel) -> dict[tuple[str, str], int]:
    ranks = getattr(model, "_bpe_ranks", None)
    if ranks is None:
        ranks = {pair: i for i, pair in enumerate(model.merges)}
        model._bpe_ranks = ranks
    return ranks


def segment_bpe(model: SubwordModel, stream: str) -> list[str]:
    """Tokenize one merge unit by replaying merges in rank order."""
    cached = model._segment_cache.get(stream)
    if cached is not None:
        return list(cached)
    ranks = _ranks(model)
    symbols = [c if c in model.alphabet else UNK for c in stream]
    while len(symbols) > 1:
        best = None
        for pair in zip(symbols, symbols[1:]):
            r = ranks.get(pair)
            if r is not None and (best is None or r < best[0]):
                best = (r, pair)
        if best is None:
            break
        symbols = _apply_merge(symbols, *best[1])
    if len(stream) <= 64:
        model._segment_cache[stream] = tuple(symbols)
    return symbols
