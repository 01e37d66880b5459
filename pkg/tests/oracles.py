"""Independent reference implementations used to compute expected values.

Everything here is deliberately naive (full recounts, exhaustive
enumeration) and stays independent of the code paths it checks.
"""

from __future__ import annotations

import io
import math
import re
import tokenize as py_tokenize
from collections import Counter, defaultdict

from codetok.granularity import token_valid
from codetok.model import UNK

# ------------------------------------------------------------------ BPE

def bpe_apply_merge(symbols, left, right):
    out = []
    i = 0
    while i < len(symbols):
        if i + 1 < len(symbols) and symbols[i] == left and symbols[i + 1] == right:
            out.append(left + right)
            i += 2
        else:
            out.append(symbols[i])
            i += 1
    return out


def bpe_reference_train(units, level, max_merges, alphabet):
    """Quadratic BPE: recount all pairs from scratch every iteration.

    units: list of (char-stream string, count).  Returns the merge list
    and the final symbolization of every unit.
    """
    work = [([c if c in alphabet else UNK for c in u], n) for u, n in units]
    existing = set(alphabet)
    merges = []
    while len(merges) < max_merges:
        counts = Counter()
        for symbols, n in work:
            for pair in zip(symbols, symbols[1:]):
                if UNK not in pair:
                    counts[pair] += n
        candidates = [
            (pair, c) for pair, c in counts.items()
            if c >= 2 and pair[0] + pair[1] not in existing
            and (level == 4 or token_valid(pair[0] + pair[1], level))
        ]
        if not candidates:
            break
        pair, _ = min(candidates, key=lambda pc: (-pc[1], pc[0]))
        merges.append(pair)
        existing.add(pair[0] + pair[1])
        work = [(bpe_apply_merge(s, *pair), n) for s, n in work]
    return merges, work


def bpe_reference_encode(stream, merges, alphabet):
    """Apply the merge list in rank order to one unit."""
    symbols = [c if c in alphabet else UNK for c in stream]
    for left, right in merges:
        symbols = bpe_apply_merge(symbols, left, right)
    return symbols


# ------------------------------------------------------------- UnigramLM

def all_segmentations(s, vocab):
    """Every way to split s into vocabulary tokens."""
    if not s:
        yield []
        return
    for k in range(1, len(s) + 1):
        head = s[:k]
        if head in vocab:
            for rest in all_segmentations(s[k:], vocab):
                yield [head] + rest


def viterbi_oracle(s, scores):
    """Argmax segmentation with the production tie-break: highest score,
    then fewest tokens, then lexicographically smallest sequence."""
    best = None
    for seg in all_segmentations(s, set(scores)):
        key = (-sum(scores[t] for t in seg), len(seg), seg)
        if best is None or key < best:
            best = key
    return best[2] if best else None


def segmentation_distribution(s, scores, alpha=1.0):
    """Exact probability of every segmentation under the alpha-smoothed
    unigram segmentation model."""
    segs = list(all_segmentations(s, set(scores)))
    weights = [math.exp(alpha * sum(scores[t] for t in seg)) for seg in segs]
    z = sum(weights)
    return {tuple(seg): w / z for seg, w in zip(segs, weights)}


def em_expected_oracle(units, scores):
    """One exact E-step by enumerating all segmentations of every unit."""
    expected = defaultdict(float)
    loglik = 0.0
    for s, w in units.items():
        segs = list(all_segmentations(s, set(scores)))
        if not segs:
            continue
        probs = [math.exp(sum(scores[t] for t in seg)) for seg in segs]
        z = sum(probs)
        loglik += w * math.log(z)
        for seg, p in zip(segs, probs):
            share = p / z
            for t in seg:
                expected[t] += w * share
    return expected, loglik


# ----------------------------------------------------------- normalizers

def indented_comment_spans(source):
    """Comment spans via the stdlib tokenizer (independent reference)."""
    spans = []
    tokens = py_tokenize.generate_tokens(io.StringIO(source).readline)
    for tok in tokens:
        if tok.type == py_tokenize.COMMENT:
            spans.append((tok.start, tok.end, tok.string))
    return spans


def strip_indented_comments(source):
    """Remove '#' comments using the stdlib tokenizer's spans."""
    lines = source.splitlines(keepends=True)
    for (row, col), _, text in sorted(indented_comment_spans(source), reverse=True):
        line = lines[row - 1]
        lines[row - 1] = line[:col] + line[col + len(text):]
    return "".join(lines)


_BRACED_TOKEN_RE = re.compile(
    r'"(?:\\.|[^"\\\n])*"'
    r"|'(?:\\.|[^'\\\n])*'"
    r"|//[^\n]*"
    r"|/\*.*?\*/",
    re.DOTALL,
)


def strip_braced_comments(source):
    """Remove //... and /*...*/ comments with a regex pass that skips
    string literals."""
    def repl(m):
        text = m.group()
        if text.startswith(("//", "/*")):
            return " "
        return text
    return _BRACED_TOKEN_RE.sub(repl, source)
