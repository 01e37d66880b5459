"""UnigramLM trainer and encoders under a granularity constraint.

Training goes top-down: a large seed vocabulary of frequent legal
substrings is re-weighted by EM (lattice forward-backward over each
merge unit) and periodically shrunk by dropping the tokens whose
removal costs the corpus likelihood the least, until the vocabulary
budget is met.  Single covered characters are never pruned, so any
covered text stays segmentable.

Encoding offers the maximum-likelihood (Viterbi) segmentation and
stochastic sampling proportional to segmentation probability raised to
a smoothing exponent.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from random import Random
from typing import Iterable

from .atoms import NormalizedSeq
from .errors import EmptyCorpus, VocabTooSmall
from .granularity import merge_units, token_valid
from .model import (
    RESERVED,
    UNIGRAM,
    UNK,
    SubwordModel,
    char_frequencies,
    charset_from_frequencies,
)

DEFAULT_SEED_MULTIPLIER = 10
DEFAULT_SHRINK_FACTOR = 0.75
DEFAULT_EM_ITERATIONS = 2

# Seed substrings are capped at this many stream characters.
MAX_PIECE_CHARS = 16

_NEG_INF = float("-inf")


def _logadd(a: float, b: float) -> float:
    if a < b:
        a, b = b, a
    if b == _NEG_INF:
        return a
    return a + math.log1p(math.exp(b - a))


def _build_trie(scores: dict[str, float]) -> dict:
    """Dict-of-dicts trie; terminal entry under the empty-string key."""
    root: dict = {}
    for token, score in scores.items():
        node = root
        for ch in token:
            node = node.setdefault(ch, {})
        node[""] = (token, score)
    return root


def _covered_pieces(stream: str, alphabet: frozenset[str]) -> list[str]:
    """Split a stream at uncovered characters.

    Returns alternating pieces; uncovered positions appear as "" entries
    so the encoder can emit UNK there.
    """
    pieces: list[str] = []
    buf: list[str] = []
    for ch in stream:
        if ch in alphabet:
            buf.append(ch)
        else:
            if buf:
                pieces.append("".join(buf))
                buf = []
            pieces.append("")
    if buf:
        pieces.append("".join(buf))
    return pieces


def _seed_vocab(units: Counter, level: int, alphabet: frozenset[str],
                max_multi: int) -> dict[str, float]:
    """Most frequent legal substrings (plus every covered char) with
    initial scores proportional to their corpus frequency."""
    counts: Counter = Counter()
    for unit, weight in units.items():
        for piece in _covered_pieces(unit, alphabet):
            n = len(piece)
            for i in range(n):
                top = min(n, i + MAX_PIECE_CHARS)
                for j in range(i + 1, top + 1):
                    counts[piece[i:j]] += weight

    multi = [(token, c) for token, c in counts.items()
             if len(token) > 1 and c >= 2
             and (level == 4 or token_valid(token, level))]
    multi.sort(key=lambda tc: (-tc[1], tc[0]))
    del multi[max_multi:]

    seed = {ch: float(counts.get(ch, 1)) for ch in sorted(alphabet)}
    seed.update((t, float(c)) for t, c in multi)
    total = math.log(sum(seed.values()))
    return {t: math.log(c) - total for t, c in seed.items()}


def _forward_edges(piece: str, trie: dict):
    """Lattice edges of a covered piece: edges_at[i] = [(j, token, score)]."""
    n = len(piece)
    edges_at: list[list[tuple[int, str, float]]] = [[] for _ in range(n)]
    for i in range(n):
        node = trie
        j = i
        row = edges_at[i]
        while j < n:
            node = node.get(piece[j])
            if node is None:
                break
            j += 1
            term = node.get("")
            if term is not None:
                row.append((j, term[0], term[1]))
    return edges_at


def _em_pass(unit_counter: Counter, alphabet: frozenset[str],
             scores: dict[str, float]):
    """One E-step: expected token counts and the corpus log-likelihood."""
    trie = _build_trie(scores)
    expected: defaultdict[str, float] = defaultdict(float)
    loglik = 0.0
    for unit, weight in unit_counter.items():
        for piece in _covered_pieces(unit, alphabet):
            if not piece:
                continue
            n = len(piece)
            edges_at = _forward_edges(piece, trie)
            alpha = [_NEG_INF] * (n + 1)
            alpha[0] = 0.0
            for i in range(n):
                ai = alpha[i]
                if ai == _NEG_INF:
                    continue
                for j, _, lp in edges_at[i]:
                    alpha[j] = _logadd(alpha[j], ai + lp)
            z = alpha[n]
            if z == _NEG_INF:
                continue  # unsegmentable piece; cannot happen with full charset
            loglik += weight * z
            beta = [_NEG_INF] * (n + 1)
            beta[n] = 0.0
            for i in range(n - 1, -1, -1):
                bi = _NEG_INF
                for j, _, lp in edges_at[i]:
                    bi = _logadd(bi, lp + beta[j])
                beta[i] = bi
            for i in range(n):
                ai = alpha[i]
                if ai == _NEG_INF:
                    continue
                for j, token, lp in edges_at[i]:
                    post = math.exp(ai + lp + beta[j] - z)
                    if post > 0.0:
                        expected[token] += weight * post
    return expected, loglik


def _renormalize(scores: dict[str, float]) -> dict[str, float]:
    logz = _NEG_INF
    for s in scores.values():
        logz = _logadd(logz, s)
    return {t: s - logz for t, s in scores.items()}


def _alt_cost(token: str, trie: dict, scores: dict[str, float]) -> float:
    """Cost (-log p) of the best segmentation of a token's own string
    that does not use the token itself."""
    n = len(token)
    best = [_NEG_INF] * (n + 1)
    best[0] = 0.0
    edges_at = _forward_edges(token, trie)
    for i in range(n):
        bi = best[i]
        if bi == _NEG_INF:
            continue
        for j, tok, lp in edges_at[i]:
            if i == 0 and j == n and tok == token:
                continue
            if bi + lp > best[j]:
                best[j] = bi + lp
    return -best[n]


def _prune(scores: dict[str, float], expected: dict[str, float],
           keep: int) -> dict[str, float]:
    """Drop the multi-char tokens with the least likelihood contribution."""
    trie = _build_trie(scores)
    singles = {t for t in scores if len(t) == 1}
    ranked = []
    for token, score in scores.items():
        if token in singles:
            continue
        loss = expected.get(token, 0.0) * (_alt_cost(token, trie, scores) + score)
        ranked.append((-loss, token))
    ranked.sort()
    n_multi = max(0, keep - len(singles))
    kept = {token for _, token in ranked[:n_multi]}
    return _renormalize({t: s for t, s in scores.items()
                         if t in singles or t in kept})


def train_unigram(corpus: Iterable[NormalizedSeq], level: int, vocab_size: int,
                  coverage: float = 0.9999,
                  seed_multiplier: int = DEFAULT_SEED_MULTIPLIER,
                  shrink_factor: float = DEFAULT_SHRINK_FACTOR,
                  em_iterations: int = DEFAULT_EM_ITERATIONS) -> SubwordModel:
    """Train a UnigramLM model; deterministic given corpus and parameters."""
    if seed_multiplier < 2:
        raise ValueError("seed_multiplier must be >= 2")
    if not 0 < shrink_factor < 1:
        raise ValueError("shrink_factor must be in (0, 1)")

    units: Counter = Counter()
    char_freq: Counter = Counter()
    for seq in corpus:
        char_freq.update(char_frequencies([seq]))
        for unit in merge_units(seq, level):
            units[unit] += 1
    if not units:
        raise EmptyCorpus("no sequences to train on")
    alphabet = charset_from_frequencies(char_freq, coverage)

    target = vocab_size - len(RESERVED)
    if target < len(alphabet):
        raise VocabTooSmall(
            f"vocab_size {vocab_size} below alphabet size "
            f"{len(alphabet)} + {len(RESERVED)} reserved")

    scores = _seed_vocab(units, level, alphabet, seed_multiplier * vocab_size)
    while True:
        for _ in range(em_iterations):
            expected, _ = _em_pass(units, alphabet, scores)
            total = math.log(sum(expected.values()))
            scores = {t: math.log(expected[t]) - total if expected.get(t)
                      else scores[t] - 40.0
                      for t in scores}
        if len(scores) <= target:
            break
        keep = max(target, int(len(scores) * shrink_factor))
        scores = _prune(scores, expected, keep)

    scores = _renormalize(scores)
    ordered = tuple(sorted(scores, key=lambda t: (-scores[t], t)))
    return SubwordModel(
        algorithm=UNIGRAM,
        level=level,
        coverage=coverage,
        alphabet=alphabet,
        tokens=ordered,
        scores=scores,
    )


def _trie_of(model: SubwordModel) -> dict:
    trie = getattr(model, "_unigram_trie", None)
    if trie is None:
        trie = _build_trie(model.scores)
        model._unigram_trie = trie
    return trie


def _path(back: list, j: int) -> list[str]:
    out = []
    while j > 0:
        i, token = back[j]
        out.append(token)
        j = i
    out.reverse()
    return out


def _viterbi_piece(piece: str, trie: dict) -> list[str]:
    """Maximum-likelihood segmentation.

    Ties break toward fewer tokens, then toward the lexicographically
    smallest token sequence (earliest difference decides).
    """
    n = len(piece)
    best = [_NEG_INF] * (n + 1)
    ntok = [0] * (n + 1)
    back: list = [None] * (n + 1)
    best[0] = 0.0
    edges_at = _forward_edges(piece, trie)
    for i in range(n):
        bi = best[i]
        if bi == _NEG_INF:
            continue
        for j, token, lp in edges_at[i]:
            s = bi + lp
            if s < best[j]:
                continue
            if s > best[j]:
                best[j] = s
                ntok[j] = ntok[i] + 1
                back[j] = (i, token)
                continue
            nt = ntok[i] + 1
            if nt > ntok[j]:
                continue
            if nt < ntok[j]:
                ntok[j] = nt
                back[j] = (i, token)
                continue
            if _path(back, i) + [token] < _path(back, j):
                back[j] = (i, token)
    return _path(back, n)


def viterbi_segment(model: SubwordModel, stream: str) -> list[str]:
    """Tokenize one merge unit; uncovered characters become UNK."""
    cached = model._segment_cache.get(stream)
    if cached is not None:
        return list(cached)
    trie = _trie_of(model)
    out: list[str] = []
    for piece in _covered_pieces(stream, model.alphabet):
        if piece:
            out.extend(_viterbi_piece(piece, trie))
        else:
            out.append(UNK)
    if len(stream) <= 64:
        model._segment_cache[stream] = tuple(out)
    return out


def sample_segment(model: SubwordModel, stream: str, alpha: float,
                   rng: Random) -> list[str]:
    """Sample a segmentation with probability proportional to the product
    of token probabilities raised to ``alpha`` (forward filtering,
    backward sampling)."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    trie = _trie_of(model)
    out: list[str] = []
    for piece in _covered_pieces(stream, model.alphabet):
        if not piece:
            out.append(UNK)
            continue
        n = len(piece)
        edges_at = _forward_edges(piece, trie)
        incoming: list[list[tuple[int, str, float]]] = [[] for _ in range(n + 1)]
        fwd = [_NEG_INF] * (n + 1)
        fwd[0] = 0.0
        for i in range(n):
            fi = fwd[i]
            if fi == _NEG_INF:
                continue
            for j, token, lp in edges_at[i]:
                w = alpha * lp
                fwd[j] = _logadd(fwd[j], fi + w)
                incoming[j].append((i, token, w))
        picked: list[str] = []
        j = n
        while j > 0:
            r = rng.random()
            acc = 0.0
            chosen = None
            for i, token, w in incoming[j]:
                p = math.exp(fwd[i] + w - fwd[j])
                acc += p
                if r < acc:
                    chosen = (i, token)
                    break
            if chosen is None:  # guard against rounding at acc ~ 1.0
                i, token, _ = incoming[j][-1]
                chosen = (i, token)
            picked.append(chosen[1])
            j = chosen[0]
        picked.reverse()
        out.extend(picked)
    return out
