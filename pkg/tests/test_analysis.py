import pytest

from codetok.analysis import (
    alignment_report,
    cross_language_report,
    frequency_profile,
    io_intersection,
    is_composite,
    is_punct_special_only,
    is_textual,
    length_report,
    native_split,
    punctuation_char_fraction,
    vocab_composition,
)
from codetok.atoms import MARKER, deserialize, sentinel_for
from codetok.errors import EmptyCorpus
from codetok.model import UNIGRAM, SubwordModel

M = MARKER


def fake_model(segmentations, tokens=(), level=4):
    """A unigram-shaped model whose segmenter output is pinned via the
    encoder cache (keys are whole-unit streams at level 4)."""
    toks = tuple(tokens) or tuple(sorted(
        {t for ts in segmentations.values() for t in ts}))
    model = SubwordModel(
        algorithm=UNIGRAM, level=level, coverage=1.0,
        alphabet=frozenset("abcxyz_()" + M),
        tokens=toks,
        scores={t: 0.0 for t in toks},
    )
    for text, toks in segmentations.items():
        stream = deserialize(text).to_stream()
        model._segment_cache[stream] = tuple(toks)
    return model


# --------------------------------------------------------------- lengths

def test_length_report_exact_hand_counts():
    corpus = [deserialize(t) for t in ("a b", "c", "a b c")]
    base = fake_model({
        "a b": (M + "a", M + "b"),
        "c": (M + "c",),
        "a b c": (M + "a", M + "b", M + "c"),
    })
    coarse = fake_model({
        "a b": (M + "a" + M + "b",),
        "c": (M + "c",),
        "a b c": (M + "a" + M + "b", M + "c"),
    })
    rep = length_report([base, coarse], corpus, baseline_index=0,
                        labels=["base", "coarse"])
    assert rep.entries[0].average_tokens == pytest.approx(2.0)  # (2+1+3)/3
    assert rep.entries[1].average_tokens == pytest.approx(4 / 3)
    assert rep.entries[0].delta_pct == 0.0
    assert rep.entries[1].delta_pct == pytest.approx(100 * (4 / 3 - 2) / 2)


def test_length_report_baseline_vs_itself():
    corpus = [deserialize("a b")]
    m = fake_model({"a b": (M + "a", M + "b")})
    rep = length_report([m, m], corpus, baseline_index=0, labels=["m", "m2"])
    assert rep.entries[1].delta_pct == 0.0


def test_length_report_empty_corpus():
    m = fake_model({})
    with pytest.raises(EmptyCorpus):
        length_report([m], [], baseline_index=0)


# ----------------------------------------------------------- composition

def test_token_shape_classifiers():
    assert not is_composite(M + "for")
    assert not is_composite("ange")
    assert is_composite(M + "]" + M + ")")
    assert is_textual(M + "for") and not is_textual(M + "]")
    assert is_punct_special_only(M + "]" + M + ")")
    assert not is_punct_special_only(M + "." + M + "shape")


def test_vocab_composition_hand_vocab():
    nl = sentinel_for("NEW_LINE")
    tokens = (
        M + "for",                  # plain word
        "ange",                     # word fragment
        M + "]" + M + ")" + M + ":",   # punct composite, closing only
        M + "(" + M + "[",          # punct composite, opening only
        M + "(" + M + ")",          # punct composite, both
        M + "," + M + ";",          # punct composite, no brackets
        M + "." + M + "shape",      # composite with a word: not punct-only
        M,                          # bare marker
        M + "<",                    # single punctuation
        M + nl,                     # single special
    )
    model = SubwordModel(algorithm=UNIGRAM, level=4, coverage=1.0,
                         alphabet=frozenset("x"), tokens=tokens, scores={})
    rep = vocab_composition(model)
    assert rep.vocab_size == 14
    assert rep.composite_fraction == pytest.approx(5 / 14)
    assert rep.punct_only_fraction == pytest.approx(4 / 14)
    assert rep.bracket_closing_only == pytest.approx(1 / 4)
    assert rep.bracket_opening_only == pytest.approx(1 / 4)
    assert rep.bracket_both == pytest.approx(1 / 4)
    total = (rep.bracket_closing_only + rep.bracket_opening_only
             + rep.bracket_both)
    assert total <= 1.0


def test_vocab_composition_level0_model_has_no_composites(rng):
    from codetok.unigram import train_unigram
    from conftest import random_seq
    corpus = [random_seq(rng, 1, 8) for _ in range(40)]
    model = train_unigram(corpus, level=0, vocab_size=300, coverage=1.0,
                          seed_multiplier=3)
    rep = vocab_composition(model)
    assert rep.composite_fraction == 0.0


# -------------------------------------------------------------- native

@pytest.mark.parametrize("identifier,expected", [
    ("fromDottedString", ["from", "Dotted", "String"]),
    ("PA_Hierarchy_ID", ["PA", "_", "Hierarchy", "_", "ID"]),
    ("x", ["x"]),
    ("isInstantiated", ["is", "Instantiated"]),
    ("GridBagConverter", ["Grid", "Bag", "Converter"]),
    ("HTTPServer", ["HTTP", "Server"]),
    ("snake_case", ["snake", "_", "case"]),
    ("__init__", ["_", "_", "init", "_", "_"]),
    ("TOTAL", ["TOTAL"]),
])
def test_native_split(identifier, expected):
    got = native_split(identifier)
    assert got == expected
    assert "".join(got) == identifier


def test_native_split_idempotent_on_pieces():
    for piece in native_split("fromDottedString") + native_split("PA_Hierarchy_ID"):
        assert native_split(piece) == [piece]


# ------------------------------------------------------------- alignment

IDENTS = ["fromDottedString", "isInstantiated", "PA_Hierarchy_ID"]


def _alignment_models():
    a = fake_model({}, tokens=("t",))
    b = fake_model({}, tokens=("t",))
    seg_a = {
        "fromDottedString": (M + "from", "Dotted", "String"),
        "isInstantiated": (M + "is", "Instantiate", "d"),
        "PA_Hierarchy_ID": (M + "PA", "_", "Hierarchy", "_ID"),
    }
    seg_b = {
        "fromDottedString": (M + "from", "Dot", "ted", "String"),
        "isInstantiated": (M + "isIn", "stanti", "ated"),
        "PA_Hierarchy_ID": (M + "PA", "_H", "ierarchy", "_ID"),
    }
    for model, segs in ((a, seg_a), (b, seg_b)):
        for word, toks in segs.items():
            model._segment_cache[M + word] = toks
    return a, b


def test_alignment_report_hand_computed():
    a, b = _alignment_models()
    corpus = [deserialize(" ".join(IDENTS))]
    rep = alignment_report(a, b, corpus, sample_size=10, labels=("uni", "bpe"))
    assert rep.sample_size == 3
    assert rep.insufficient_sample
    uni, bpe_side = rep.sides
    assert uni.jaccard_native == pytest.approx((1.0 + 0.25 + 0.6) / 3)
    assert uni.jaccard_resplit == pytest.approx((1.0 + 0.25 + 1.0) / 3)
    assert bpe_side.jaccard_native == pytest.approx((0.4 + 0.0 + 1 / 7) / 3)
    # isInstantiated resplit: {is, In, stanti, ated} vs {is, Instantiated}
    assert bpe_side.jaccard_resplit == pytest.approx((0.4 + 1 / 5 + 0.5) / 3)
    assert uni.jaccard_native > bpe_side.jaccard_native
    assert bpe_side.rate_underscore_upper == pytest.approx(1 / 3)
    assert uni.rate_underscore_upper == 0.0
    assert bpe_side.rate_merged_native == pytest.approx(2 / 3)
    assert uni.rate_merged_native == pytest.approx(1 / 3)


def test_alignment_identical_models_flags_empty():
    a, _ = _alignment_models()
    corpus = [deserialize(" ".join(IDENTS))]
    rep = alignment_report(a, a, corpus, sample_size=5)
    assert rep.empty_sample
    assert rep.sample_size == 0


# ------------------------------------------------------------- frequency

def test_frequency_profile_hand_counts():
    corpus = [deserialize("a b"), deserialize("a b"), deserialize("a")]
    m = fake_model({
        "a b": (M + "a", M + "b"),
        "a": (M + "a",),
    })
    prof = frequency_profile(m, corpus)
    assert prof.entries == [(M + "a", 3), (M + "b", 2)]
    assert prof.total_tokens == 5
    rows = list(prof.to_csv_rows())
    assert rows[0] == "rank,count,token"
    assert rows[1].startswith("1,3,")


def test_frequency_profile_single_char_corpus():
    m = fake_model({"a": (M + "a",)})
    prof = frequency_profile(m, [deserialize("a")])
    assert len(prof.entries) == 1
    assert prof.total_tokens == 1


# ---------------------------------------------------------- cross-language

def test_cross_language_identical_corpora():
    m = fake_model({"a b": (M + "a", M + "b")})
    corpus = [deserialize("a b")]
    rep = cross_language_report(m, corpus, corpus, f_hi=100, f_lo=1)
    assert rep.language_specific_fraction == 0.0


def test_cross_language_disjoint_synthetic():
    segs = {"a a": (M + "a", M + "a"), "b b": (M + "b", M + "b")}
    m = fake_model(segs, tokens=(M + "a", M + "b", M + "c"))
    corpus_a = [deserialize("a a")]
    corpus_b = [deserialize("b b")]
    rep = cross_language_report(m, corpus_a, corpus_b, f_hi=100, f_lo=1)
    # "c" never occurs: 0 in both, not language-specific
    assert rep.language_specific == 2
    assert rep.language_specific_fraction == pytest.approx(2 / 3)


# ------------------------------------------------------------ intersection

def test_io_intersection_hand_pairs():
    segs = {
        "x y": (M + "x", M + "y"),
        "x": (M + "x",),
        "y": (M + "y",),
        "a b": (M + "a", M + "b"),
        "b c": (M + "b", M + "c"),
        "(": (M + "(",),
        "a": (M + "a",),
        "a b c": (M + "a", M + "b", M + "c"),
    }
    m = fake_model(segs)
    pairs = [
        (deserialize("x y"), deserialize("x y")),   # 1.0
        (deserialize("x"), deserialize("y")),       # 0.0
        (deserialize("a b"), deserialize("b c")),   # 1/3
        (deserialize("("), deserialize("(")),       # both empty -> 1.0
        (deserialize("a"), deserialize("a b")),     # 1/2
    ]
    rep = io_intersection(m, pairs)
    assert rep.n_pairs == 5
    assert rep.both_empty_pairs == 1
    assert rep.mean_jaccard == pytest.approx((1 + 0 + 1 / 3 + 1 + 0.5) / 5)


# ------------------------------------------------------------ char stats

def test_punctuation_char_fraction():
    corpus = [deserialize("ab ( c ) NEW_LINE")]
    # non-space chars: ab ( c ) NEW_LINE = 2+1+1+1+8 = 13, punct: (,) = 2
    assert punctuation_char_fraction(corpus) == pytest.approx(2 / 13)
