"""codetok: code-aware subword tokenization and corpus analysis."""

from .atoms import (
    Atom,
    MARKER,
    NormalizedSeq,
    atomize,
    deserialize,
    seq_from_atoms,
)
from .bpe import train_bpe
from .codec import TokenizedSeq, clip, decode, encode, fair_crop, sample_encode
from .granularity import (
    LEVELS,
    PreToken,
    boundary_predicate_agreement,
    pretokenize,
    token_valid,
)
from .model import SubwordModel, coverage_charset, load, save
from .normalize import normalize_braced, normalize_indented
from .unigram import train_unigram

__all__ = [
    "Atom",
    "MARKER",
    "NormalizedSeq",
    "PreToken",
    "SubwordModel",
    "TokenizedSeq",
    "LEVELS",
    "atomize",
    "boundary_predicate_agreement",
    "clip",
    "coverage_charset",
    "decode",
    "deserialize",
    "encode",
    "fair_crop",
    "load",
    "normalize_braced",
    "normalize_indented",
    "pretokenize",
    "sample_encode",
    "save",
    "seq_from_atoms",
    "token_valid",
    "train_bpe",
    "train_unigram",
]

__version__ = "0.1.0"
